//! Finite groups given by multiplication tables, and exact arithmetic in the
//! integral group ring.
//!
//! Elements are indexed `0..order`. For cyclic groups element `i` is `t^i`
//! and the identity is index 0.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, GroupError, Result};

/// Orders up to this bound get an exhaustive associativity check.
pub const ASSOCIATIVITY_CHECK_LIMIT: usize = 64;

#[derive(Debug, Clone)]
pub struct FiniteGroup {
    order: usize,
    mul_table: Vec<usize>,
    inv_table: Vec<usize>,
    identity_index: usize,
    associativity_verified: bool,
    cyclic: bool,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.mul_table == other.mul_table
    }
}

impl Eq for FiniteGroup {}

/// Cyclic group of order `n`, element `i` standing for `t^i`.
pub fn cyclic_group(n: usize) -> Result<Arc<FiniteGroup>> {
    if n == 0 {
        return Err(GroupError::Empty.into());
    }
    let mut mul_table = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            mul_table.push((a + b) % n);
        }
    }
    let inv_table = (0..n).map(|a| (n - a) % n).collect();
    Ok(Arc::new(FiniteGroup {
        order: n,
        mul_table,
        inv_table,
        identity_index: 0,
        associativity_verified: true,
        cyclic: true,
    }))
}

/// Builds a group from a square multiplication table, `table[a][b] = a*b`.
///
/// Identity and inverses are derived. Associativity is checked exhaustively
/// for orders up to [`ASSOCIATIVITY_CHECK_LIMIT`]; above that the group is
/// accepted with [`FiniteGroup::associativity_verified`] false.
pub fn group_from_table(table: &[Vec<usize>]) -> std::result::Result<Arc<FiniteGroup>, GroupError> {
    let order = table.len();
    if order == 0 {
        return Err(GroupError::Empty);
    }
    for (row, r) in table.iter().enumerate() {
        if r.len() != order {
            return Err(GroupError::NotSquare { row, len: r.len(), order });
        }
        for (col, &value) in r.iter().enumerate() {
            if value >= order {
                return Err(GroupError::IndexOutOfRange { row, col, value });
            }
        }
    }
    let mut seen = vec![usize::MAX; order];
    for (row, r) in table.iter().enumerate() {
        for &value in r {
            if seen[value] == row {
                return Err(GroupError::NotLatinSquare { axis: "row", index: row, value });
            }
            seen[value] = row;
        }
    }
    let mut seen = vec![usize::MAX; order];
    for col in 0..order {
        for r in table {
            let value = r[col];
            if seen[value] == col {
                return Err(GroupError::NotLatinSquare { axis: "column", index: col, value });
            }
            seen[value] = col;
        }
    }

    let identity_index = (0..order)
        .find(|&e| (0..order).all(|g| table[e][g] == g && table[g][e] == g))
        .ok_or(GroupError::NoIdentity)?;

    let mut inv_table = Vec::with_capacity(order);
    for (g, row) in table.iter().enumerate() {
        // Latin square: exactly one right inverse
        let r = row.iter().position(|&x| x == identity_index).unwrap();
        if table[r][g] != identity_index {
            return Err(GroupError::MissingInverse(g));
        }
        inv_table.push(r);
    }

    let associativity_verified = order <= ASSOCIATIVITY_CHECK_LIMIT;
    if associativity_verified {
        for a in 0..order {
            for b in 0..order {
                let ab = table[a][b];
                for c in 0..order {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(GroupError::NotAssociative { a, b, c });
                    }
                }
            }
        }
    }

    Ok(Arc::new(FiniteGroup {
        order,
        mul_table: table.iter().flatten().copied().collect(),
        inv_table,
        identity_index,
        associativity_verified,
        cyclic: false,
    }))
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity_index
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul_table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv_table[a]
    }

    pub fn inv_table(&self) -> &[usize] {
        &self.inv_table
    }

    /// Rows of the multiplication table.
    pub fn mul_rows(&self) -> Vec<Vec<usize>> {
        self.mul_table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    /// False only for table groups too large for the exhaustive check.
    pub fn associativity_verified(&self) -> bool {
        self.associativity_verified
    }

    /// True when built by [`cyclic_group`]; such groups print and parse
    /// elements as polynomials in `t`.
    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }
}

/// Same group, compared by pointer first and table second.
pub fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Convolution of two coefficient vectors over `group`.
pub(crate) fn convolve(group: &FiniteGroup, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = group.order();
    let mut out = vec![BigInt::zero(); n];
    for (g, ag) in a.iter().enumerate() {
        if ag.is_zero() {
            continue;
        }
        for (h, bh) in b.iter().enumerate() {
            if bh.is_zero() {
                continue;
            }
            out[group.mul(g, h)] += ag * bh;
        }
    }
    out
}

/// A formal integer combination of group elements.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupRingElement {
    group: Arc<FiniteGroup>,
    coeffs: Vec<BigInt>,
}

impl GroupRingElement {
    pub fn zero(group: &Arc<FiniteGroup>) -> Self {
        Self { group: group.clone(), coeffs: vec![BigInt::zero(); group.order()] }
    }

    pub fn one(group: &Arc<FiniteGroup>) -> Self {
        Self::basis(group, group.identity(), BigInt::one())
    }

    /// `coeff * g` for the element with index `g`.
    pub fn basis(group: &Arc<FiniteGroup>, g: usize, coeff: BigInt) -> Self {
        let mut e = Self::zero(group);
        e.coeffs[g] = coeff;
        e
    }

    pub fn from_int(group: &Arc<FiniteGroup>, c: i64) -> Self {
        Self::basis(group, group.identity(), BigInt::from(c))
    }

    pub fn from_coeffs(group: &Arc<FiniteGroup>, coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() != group.order() {
            return Err(Error::Shape(format!(
                "{} coefficients for a group of order {}",
                coeffs.len(),
                group.order()
            )));
        }
        Ok(Self { group: group.clone(), coeffs })
    }

    /// Sum of `c * g` over the given pairs. Repeated indices accumulate.
    pub fn from_terms<C: Into<BigInt> + Clone>(group: &Arc<FiniteGroup>, terms: &[(C, usize)]) -> Result<Self> {
        let mut e = Self::zero(group);
        for (c, g) in terms {
            if *g >= group.order() {
                return Err(Error::InvalidArgument(format!("element index {g} out of range")));
            }
            e.coeffs[*g] += c.clone().into();
        }
        Ok(e)
    }

    /// `t^exp` in a cyclic group; negative exponents wrap around.
    pub fn monomial(group: &Arc<FiniteGroup>, exp: i64) -> Self {
        let n = group.order() as i64;
        Self::basis(group, exp.rem_euclid(n) as usize, BigInt::one())
    }

    /// Sum over `(coefficient, exponent)` pairs in a cyclic group.
    pub fn from_exponents(group: &Arc<FiniteGroup>, terms: &[(i64, i64)]) -> Self {
        let n = group.order() as i64;
        let mut e = Self::zero(group);
        for &(c, exp) in terms {
            e.coeffs[exp.rem_euclid(n) as usize] += c;
        }
        e
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, g: usize) -> &BigInt {
        &self.coeffs[g]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(g, c)| {
            if g == self.group.identity() {
                c.is_one()
            } else {
                c.is_zero()
            }
        })
    }

    /// Nonzero `(coefficient, index)` pairs in index order.
    pub fn terms(&self) -> Vec<(BigInt, usize)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(g, c)| (c.clone(), g))
            .collect()
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if !same_group(&self.group, &other.group) {
            return Err(Error::GroupMismatch);
        }
        Ok(Self { group: self.group.clone(), coeffs: convolve(&self.group, &self.coeffs, &other.coeffs) })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if !same_group(&self.group, &other.group) {
            return Err(Error::GroupMismatch);
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { group: self.group.clone(), coeffs })
    }

    /// The anti-automorphism `g -> g^{-1}`.
    pub fn involute(&self) -> Self {
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len()];
        for (g, c) in self.coeffs.iter().enumerate() {
            coeffs[self.group.inv(g)] = c.clone();
        }
        Self { group: self.group.clone(), coeffs }
    }

    /// Sum of coefficients.
    pub fn augmentation(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self { group: self.group.clone(), coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }
}

/// Ring product. Fails when the operands live over different groups.
pub fn gr_mul(a: &GroupRingElement, b: &GroupRingElement) -> Result<GroupRingElement> {
    a.checked_mul(b)
}

pub fn gr_involute(a: &GroupRingElement) -> GroupRingElement {
    a.involute()
}

pub fn augmentation(a: &GroupRingElement) -> BigInt {
    a.augmentation()
}

/// The sum of all group elements.
pub fn norm_element(group: &Arc<FiniteGroup>) -> GroupRingElement {
    GroupRingElement { group: group.clone(), coeffs: vec![BigInt::one(); group.order()] }
}

// Operator impls panic on group mismatch; use the checked forms at API edges.

impl Mul for &GroupRingElement {
    type Output = GroupRingElement;
    fn mul(self, rhs: Self) -> GroupRingElement {
        self.checked_mul(rhs).expect("group ring product over different groups")
    }
}

impl Add for &GroupRingElement {
    type Output = GroupRingElement;
    fn add(self, rhs: Self) -> GroupRingElement {
        self.checked_add(rhs).expect("group ring sum over different groups")
    }
}

impl Sub for &GroupRingElement {
    type Output = GroupRingElement;
    fn sub(self, rhs: Self) -> GroupRingElement {
        self.checked_add(&-rhs).expect("group ring difference over different groups")
    }
}

impl Neg for &GroupRingElement {
    type Output = GroupRingElement;
    fn neg(self) -> GroupRingElement {
        GroupRingElement { group: self.group.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for GroupRingElement {
    type Output = GroupRingElement;
    fn neg(self) -> GroupRingElement {
        -&self
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, g)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let symbol = if self.group.is_cyclic() {
                match g {
                    0 => String::new(),
                    1 => "t".to_string(),
                    _ => format!("t^{g}"),
                }
            } else if *g == self.group.identity() {
                String::new()
            } else {
                format!("g{g}")
            };
            if symbol.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{symbol}")?;
            } else {
                write!(f, "{mag}{symbol}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupRingElement({self})")
    }
}

/// Parses a polynomial such as `"1 - t^4"`, `"2t^-1 + 3*t"` or `"-t"` over a
/// cyclic group. Exponents are reduced modulo the group order.
pub fn parse_cyclic(group: &Arc<FiniteGroup>, text: &str) -> Result<GroupRingElement> {
    if !group.is_cyclic() {
        return Err(Error::Parse("polynomial syntax requires a cyclic group".into()));
    }
    let n = group.order() as i64;
    let s: String = text.replace('\u{2212}', "-").chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let bytes = s.as_bytes();
    let mut out = GroupRingElement::zero(group);
    let mut pos = 0;
    let mut first = true;
    while pos < bytes.len() {
        let mut sign = BigInt::one();
        match bytes[pos] {
            b'+' => pos += 1,
            b'-' => {
                sign = -sign;
                pos += 1;
            }
            _ if first => {}
            other => return Err(Error::Parse(format!("expected '+' or '-' at byte {pos}, found '{}'", other as char))),
        }
        first = false;
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        let coeff = if pos > start {
            s[start..pos].parse::<BigInt>().map_err(|e| Error::Parse(e.to_string()))?
        } else {
            BigInt::one()
        };
        if pos < bytes.len() && bytes[pos] == b'*' {
            pos += 1;
        }
        let mut exp: i64 = 0;
        if pos < bytes.len() && bytes[pos] == b't' {
            pos += 1;
            exp = 1;
            if pos < bytes.len() && bytes[pos] == b'^' {
                pos += 1;
                let es = pos;
                if pos < bytes.len() && bytes[pos] == b'-' {
                    pos += 1;
                }
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                exp = s[es..pos]
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad exponent at byte {es} in '{text}'")))?;
            }
        } else if pos == start {
            return Err(Error::Parse(format!("empty term at byte {start} in '{text}'")));
        }
        out.coeffs[exp.rem_euclid(n) as usize] += sign * coeff;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: usize) -> Arc<FiniteGroup> {
        cyclic_group(n).unwrap()
    }

    fn klein() -> Vec<Vec<usize>> {
        vec![vec![0, 1, 2, 3], vec![1, 0, 3, 2], vec![2, 3, 0, 1], vec![3, 2, 1, 0]]
    }

    #[test]
    fn cyclic_tables() {
        let g = c(1);
        assert_eq!(g.inv_table(), &[0]);
        let g = c(2);
        assert_eq!(g.mul_rows(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(g.inv_table(), &[0, 1]);
        let g = c(5);
        assert_eq!(g.inv_table(), &[0, 4, 3, 2, 1]);
        for a in 0..5 {
            assert_eq!(g.mul(a, g.inv(a)), 0);
        }
        assert!(cyclic_group(0).is_err());
    }

    #[test]
    fn table_groups() {
        let v4 = group_from_table(&klein()).unwrap();
        assert_eq!(v4.order(), 4);
        assert!((0..4).all(|g| v4.inv(g) == g));
        let c2 = group_from_table(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(*c2, *c(2));
        assert!(matches!(
            group_from_table(&[vec![0, 1], vec![1, 1]]),
            Err(GroupError::NotLatinSquare { .. })
        ));
    }

    #[test]
    fn table_errors_are_distinct() {
        assert!(matches!(group_from_table(&[vec![0, 1]]), Err(GroupError::NotSquare { .. })));
        assert!(matches!(group_from_table(&[vec![0, 2], vec![1, 0]]), Err(GroupError::IndexOutOfRange { .. })));
        // Latin square without identity
        assert!(matches!(group_from_table(&[vec![0, 2, 1], vec![2, 1, 0], vec![1, 0, 2]]), Err(GroupError::NoIdentity)));
        // loop of order 5 that is not associative
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(group_from_table(&loop5), Err(GroupError::NotAssociative { .. })));
    }

    #[test]
    fn products_in_c5() {
        let g = c(5);
        let sigma = norm_element(&g);
        let one_minus_t = GroupRingElement::from_exponents(&g, &[(1, 0), (-1, 1)]);
        assert!((&one_minus_t * &sigma).is_zero());

        let beta = parse_cyclic(&g, "1 + t - t^3").unwrap();
        let alpha = &beta * &parse_cyclic(&g, "1 - t^4").unwrap();
        assert_eq!(alpha, parse_cyclic(&g, "t + t^2 - t^3 - t^4").unwrap());

        // (t^2 - 1)(1 + t^2 + t^4) = t^6 - 1 = t - 1 in Z[C5]
        let lhs = &parse_cyclic(&g, "t^2 - 1").unwrap() * &parse_cyclic(&g, "1 + t^2 + t^4").unwrap();
        assert_eq!(lhs, parse_cyclic(&g, "t - 1").unwrap());
    }

    #[test]
    fn five_term_geometric_sum_in_c9() {
        // (t^2 - 1)(1 + t^2 + ... + t^8) = t^10 - 1 = t - 1 in Z[C9]
        let g = c(9);
        let lhs = &parse_cyclic(&g, "t^2 - 1").unwrap() * &parse_cyclic(&g, "1 + t^2 + t^4 + t^6 + t^8").unwrap();
        assert_eq!(lhs, parse_cyclic(&g, "t - 1").unwrap());
        // the same element in Z[C5] collapses to the norm element
        let g5 = c(5);
        let s = parse_cyclic(&g5, "1 + t^2 + t^4 + t^6 + t^8").unwrap();
        assert_eq!(s, norm_element(&g5));
    }

    #[test]
    fn involution_and_augmentation() {
        let g = c(7);
        let x = parse_cyclic(&g, "1 - t").unwrap();
        assert_eq!(x.involute(), parse_cyclic(&g, "1 - t^-1").unwrap());
        assert_eq!(norm_element(&g).involute(), norm_element(&g));
        assert_eq!(norm_element(&g).augmentation(), BigInt::from(7));
        assert_eq!(x.augmentation(), BigInt::zero());
        assert_eq!(norm_element(&c(1)), GroupRingElement::one(&c(1)));
        assert_eq!(norm_element(&c(3)), parse_cyclic(&c(3), "1 + t + t^2").unwrap());
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = GroupRingElement::one(&c(3));
        let b = GroupRingElement::one(&c(4));
        assert_eq!(gr_mul(&a, &b), Err(Error::GroupMismatch));
    }

    #[test]
    fn display_and_parse_agree() {
        let g = c(6);
        for s in ["0", "1", "-t", "2t^3 - 5", "1 + t - t^3", "-3 + 4t^5"] {
            let e = parse_cyclic(&g, s).unwrap();
            assert_eq!(parse_cyclic(&g, &e.to_string()).unwrap(), e, "{s}");
        }
        assert_eq!(parse_cyclic(&g, "3*t^2 − t").unwrap().to_string(), "-t + 3t^2");
        assert!(parse_cyclic(&g, "1 + + t").is_err());
        assert!(parse_cyclic(&g, "t^").is_err());
        assert!(parse_cyclic(&g, "x").is_err());
    }
}
