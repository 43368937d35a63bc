//! Dense integer matrices: Smith normal form with transforms, exact integral
//! solving, and homology of a composable pair.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        Ok(Self { rows, cols, entries })
    }

    /// Builds from nested rows of machine integers. Panics on ragged input.
    pub fn from_rows<T: Into<BigInt> + Copy>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            entries.extend(row.iter().map(|&x| x.into()));
        }
        Self { rows: r, cols: c, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        if self.cols == 0 {
            return vec![Vec::new(); self.rows];
        }
        self.entries.chunks(self.cols).map(<[BigInt]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        *out.get_mut(i, j) += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] -= q * row[source], restricted to columns `from..`.
    fn row_axpy(&mut self, target: usize, source: usize, q: &BigInt, from: usize) {
        for j in from..self.cols {
            let s = self.entries[source * self.cols + j].clone();
            if !s.is_zero() {
                self.entries[target * self.cols + j] -= q * s;
            }
        }
    }

    /// col[target] -= q * col[source], restricted to rows `from..`.
    fn col_axpy(&mut self, target: usize, source: usize, q: &BigInt, from: usize) {
        for i in from..self.rows {
            let s = self.entries[i * self.cols + source].clone();
            if !s.is_zero() {
                self.entries[i * self.cols + target] -= q * s;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = &mut self.entries[i * self.cols + j];
            *v = -std::mem::take(v);
        }
    }
}

impl Mul for &IntegerMatrix {
    type Output = IntegerMatrix;
    fn mul(self, rhs: Self) -> IntegerMatrix {
        self.checked_mul(rhs).expect("integer matrix shape mismatch")
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegerMatrix {}x{} [", self.rows, self.cols)?;
        for (i, row) in self.to_rows().iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let s: Vec<String> = row.iter().map(ToString::to_string).collect();
            write!(f, "{}", s.join(" "))?;
        }
        write!(f, "]")
    }
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` in Smith form.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
    /// The nonzero diagonal entries, each dividing the next.
    pub diagonal: Vec<BigInt>,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }
}

/// Finitely generated abelian group `Z^free_rank + Z/t1 + ... + Z/tk` with
/// `t1 | t2 | ... | tk`, all `ti > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroupInfo {
    pub free_rank: usize,
    #[serde(with = "crate::io::bigint_vec")]
    pub torsion: Vec<BigInt>,
}

impl AbelianGroupInfo {
    pub fn free(rank: usize) -> Self {
        Self { free_rank: rank, torsion: Vec::new() }
    }

    pub fn new(free_rank: usize, torsion: &[i64]) -> Self {
        Self { free_rank, torsion: torsion.iter().map(|&t| BigInt::from(t)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for AbelianGroupInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Reduces `a` in place to Smith form. When `track` is set the row and column
/// transforms are accumulated and returned.
fn smith_in_place(a: &mut IntegerMatrix, track: bool) -> (Option<IntegerMatrix>, Option<IntegerMatrix>, Vec<BigInt>) {
    let (m, n) = (a.rows, a.cols);
    let mut u = track.then(|| IntegerMatrix::identity(m));
    let mut v = track.then(|| IntegerMatrix::identity(n));
    let mut diag = Vec::new();

    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let x = a.get(i, j);
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                    best = Some((i, j));
                    if x.abs().is_one() {
                        break;
                    }
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        if let Some(u) = u.as_mut() {
            u.swap_rows(t, pi);
        }
        a.swap_cols(t, pj);
        if let Some(v) = v.as_mut() {
            v.swap_cols(t, pj);
        }

        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = a.get(i, t).div_floor(a.get(t, t));
                a.row_axpy(i, t, &q, t);
                if let Some(u) = u.as_mut() {
                    u.row_axpy(i, t, &q, 0);
                }
                if !a.get(i, t).is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = a.get(t, j).div_floor(a.get(t, t));
                a.col_axpy(j, t, &q, t);
                if let Some(v) = v.as_mut() {
                    v.col_axpy(j, t, &q, 0);
                }
                if !a.get(t, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // a remainder smaller than the pivot survived; promote it
                let mut best = (t, t);
                for i in t + 1..m {
                    let x = a.get(i, t);
                    if !x.is_zero() && x.abs() < a.get(best.0, best.1).abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..n {
                    let x = a.get(t, j);
                    if !x.is_zero() && x.abs() < a.get(best.0, best.1).abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    a.swap_rows(t, best.0);
                    if let Some(u) = u.as_mut() {
                        u.swap_rows(t, best.0);
                    }
                } else if best.1 != t {
                    a.swap_cols(t, best.1);
                    if let Some(v) = v.as_mut() {
                        v.swap_cols(t, best.1);
                    }
                }
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let p = a.get(t, t).clone();
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !a.get(i, j).is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    a.row_axpy(t, i, &minus_one, t);
                    if let Some(u) = u.as_mut() {
                        u.row_axpy(t, i, &minus_one, 0);
                    }
                }
                None => break,
            }
        }

        if a.get(t, t).is_negative() {
            a.negate_row(t);
            if let Some(u) = u.as_mut() {
                u.negate_row(t);
            }
        }
        diag.push(a.get(t, t).clone());
        t += 1;
    }
    (u, v, diag)
}

/// Smith normal form with unimodular transforms.
///
/// Pivoting takes the smallest nonzero entry of the trailing block, which
/// keeps intermediate coefficients small on the dense matrices produced by
/// regular-representation expansion.
pub fn smith_normal_form(a: &IntegerMatrix) -> SmithDecomposition {
    let mut d = a.clone();
    let (u, v, diagonal) = smith_in_place(&mut d, true);
    SmithDecomposition { u: u.unwrap(), d, v: v.unwrap(), diagonal }
}

/// Nonzero invariant factors of `a`, without transforms.
pub fn invariant_factors(a: &IntegerMatrix) -> Vec<BigInt> {
    let mut d = a.clone();
    smith_in_place(&mut d, false).2
}

pub fn rank(a: &IntegerMatrix) -> usize {
    invariant_factors(a).len()
}

/// Solves `A X = B` over the integers.
///
/// Returns `Ok(None)` when no integral solution exists. Among the solutions
/// the one with zero free coordinates in the Smith basis is returned, so the
/// result is deterministic.
pub fn solve_integer(a: &IntegerMatrix, b: &IntegerMatrix) -> Result<Option<IntegerMatrix>> {
    if a.rows != b.rows {
        return Err(Error::Shape(format!("A has {} rows but B has {}", a.rows, b.rows)));
    }
    let snf = smith_normal_form(a);
    let ub = &snf.u * b;
    let r = snf.rank();
    let mut y = IntegerMatrix::zeros(a.cols, b.cols);
    for i in 0..a.rows {
        for j in 0..b.cols {
            let c = ub.get(i, j);
            if i < r {
                let (q, rem) = c.div_rem(&snf.diagonal[i]);
                if !rem.is_zero() {
                    return Ok(None);
                }
                y.set(i, j, q);
            } else if !c.is_zero() {
                return Ok(None);
            }
        }
    }
    Ok(Some(&snf.v * &y))
}

/// `ker(outgoing) / im(incoming)` for `Z^a --incoming--> Z^m --outgoing--> Z^p`.
pub fn homology_pair(incoming: &IntegerMatrix, outgoing: &IntegerMatrix) -> Result<AbelianGroupInfo> {
    if incoming.rows != outgoing.cols {
        return Err(Error::Shape(format!(
            "incoming lands in Z^{} but outgoing starts from Z^{}",
            incoming.rows, outgoing.cols
        )));
    }
    let composite = outgoing * incoming;
    if !composite.is_zero() {
        return Err(Error::NonzeroComposition("outgoing * incoming".into()));
    }
    let inv = invariant_factors(incoming);
    let rank_out = rank(outgoing);
    let free_rank = incoming.rows - rank_out - inv.len();
    let torsion = inv.into_iter().filter(|d| !d.is_one()).collect();
    Ok(AbelianGroupInfo { free_rank, torsion })
}

/// Integer row vectors spanning the left kernel of `a` (a saturated basis).
pub fn left_kernel_basis(a: &IntegerMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    (snf.rank()..a.rows).map(|i| snf.u.row(i)).collect()
}

/// Integer column vectors spanning the right kernel of `a` (a saturated basis).
pub fn kernel_basis(a: &IntegerMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    (snf.rank()..a.cols).map(|j| snf.v.column(j)).collect()
}

/// Determinant by fraction-free elimination. Square matrices only.
pub fn determinant(a: &IntegerMatrix) -> Result<BigInt> {
    if a.rows != a.cols {
        return Err(Error::Shape("determinant of a non-square matrix".into()));
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m.get(i, k).is_zero()) else {
            return Ok(BigInt::zero());
        };
        if p != k {
            m.swap_rows(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                m.set(i, j, v);
            }
        }
        prev = m.get(k, k).clone();
    }
    Ok(sign * prev)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntegerMatrix {
        IntegerMatrix::from_rows(rows)
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn smith_examples() {
        assert_eq!(smith_normal_form(&IntegerMatrix::identity(2)).diagonal, big(&[1, 1]));
        let s = smith_normal_form(&m(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.diagonal, big(&[1, 6]));
        assert_eq!(&(&s.u * &m(&[vec![2, 0], vec![0, 3]])) * &s.v, s.d);
        assert!(smith_normal_form(&IntegerMatrix::zeros(3, 2)).diagonal.is_empty());
        let e = smith_normal_form(&IntegerMatrix::zeros(0, 4));
        assert_eq!((e.u.rows(), e.v.rows()), (0, 4));
    }

    #[test]
    fn smith_transforms_are_unimodular() {
        let a = m(&[vec![4, 6, 2], vec![6, 9, 3], vec![2, 5, 7], vec![0, 0, 0]]);
        let s = smith_normal_form(&a);
        assert_eq!(&(&s.u * &a) * &s.v, s.d);
        assert_eq!(determinant(&s.u).unwrap().abs(), BigInt::one());
        assert_eq!(determinant(&s.v).unwrap().abs(), BigInt::one());
        for w in s.diagonal.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
    }

    #[test]
    fn solve_examples() {
        let x = solve_integer(&m(&[vec![2]]), &m(&[vec![4]])).unwrap().unwrap();
        assert_eq!(x, m(&[vec![2]]));
        assert!(solve_integer(&m(&[vec![2]]), &m(&[vec![3]])).unwrap().is_none());
        let x = solve_integer(&m(&[vec![1, 0], vec![0, 2]]), &m(&[vec![5], vec![6]])).unwrap().unwrap();
        assert_eq!(x, m(&[vec![5], vec![3]]));
        assert!(solve_integer(&m(&[vec![1]]), &m(&[vec![1], vec![2]])).is_err());
        // inconsistent system with rank deficiency
        assert!(solve_integer(&m(&[vec![1, 1], vec![1, 1]]), &m(&[vec![1], vec![2]])).unwrap().is_none());
    }

    #[test]
    fn homology_pair_examples() {
        let h = homology_pair(&m(&[vec![7]]), &m(&[vec![0]])).unwrap();
        assert_eq!(h, AbelianGroupInfo::new(0, &[7]));
        let h = homology_pair(&m(&[vec![0]]), &m(&[vec![0]])).unwrap();
        assert_eq!(h, AbelianGroupInfo::free(1));
        let h = homology_pair(&IntegerMatrix::zeros(1, 0), &m(&[vec![0]])).unwrap();
        assert_eq!(h, AbelianGroupInfo::free(1));
        assert!(homology_pair(&m(&[vec![1]]), &m(&[vec![1]])).is_err());
    }

    #[test]
    fn six_term_integer_complex() {
        // Z -0-> Z -n-> Z -0-> Z -n-> Z -0-> Z, differentials d5..d1
        let n = 5;
        let maps = [0, n, 0, n, 0];
        let d = |i: usize| -> IntegerMatrix {
            if (1..=5).contains(&i) {
                m(&[vec![maps[5 - i]]])
            } else if i == 0 {
                IntegerMatrix::zeros(0, 1)
            } else {
                IntegerMatrix::zeros(1, 0)
            }
        };
        let got: Vec<String> = (0..=5).map(|i| homology_pair(&d(i + 1), &d(i)).unwrap().to_string()).collect();
        assert_eq!(got, ["Z", "Z/5", "0", "Z/5", "0", "Z"]);
    }

    #[test]
    fn kernels() {
        let a = m(&[vec![1, 2, 3], vec![2, 4, 6]]);
        for v in kernel_basis(&a) {
            let col = IntegerMatrix::from_entries(3, 1, v).unwrap();
            assert!((&a * &col).is_zero());
        }
        assert_eq!(kernel_basis(&a).len(), 2);
        let lk = left_kernel_basis(&a);
        assert_eq!(lk.len(), 1);
        let row = IntegerMatrix::from_entries(1, 2, lk[0].clone()).unwrap();
        assert!((&row * &a).is_zero());
    }

    #[test]
    fn display_groups() {
        assert_eq!(AbelianGroupInfo::new(0, &[]).to_string(), "0");
        assert_eq!(AbelianGroupInfo::new(2, &[2, 4]).to_string(), "Z^2 + Z/2 + Z/4");
    }
}
