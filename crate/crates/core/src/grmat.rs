//! Matrices over `Z[G]`.
//!
//! A `rows x cols` matrix is a map of free right modules `Z[G]^cols ->
//! Z[G]^rows` acting on column vectors: `x -> M x`, with group-ring scalars
//! acting on the right. Composition is matrix product.
//!
//! The dual of a map is the involuted transpose; no signs are introduced.
//!
//! Expansion to integer matrices replaces each entry `a` by the `|G| x |G|`
//! matrix of `y -> a y` on `Z[G]`, with rows and columns indexed by group
//! elements in table order: entry `(k, h)` is the coefficient of `k h^{-1}`
//! in `a`. With this basis the expansion is multiplicative and
//! `expand(dual(A)) = expand(A)^T` holds literally.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::group::{convolve, same_group, FiniteGroup, GroupRingElement};
use crate::intmat::{determinant, solve_integer, IntegerMatrix};

#[derive(Clone, PartialEq, Eq)]
pub struct GRMatrix {
    group: Arc<FiniteGroup>,
    rows: usize,
    cols: usize,
    entries: Vec<GroupRingElement>,
}

impl GRMatrix {
    pub fn zeros(group: &Arc<FiniteGroup>, rows: usize, cols: usize) -> Self {
        Self { group: group.clone(), rows, cols, entries: vec![GroupRingElement::zero(group); rows * cols] }
    }

    pub fn identity(group: &Arc<FiniteGroup>, n: usize) -> Self {
        Self::scalar(group, n, &GroupRingElement::one(group))
    }

    /// `a` times the identity matrix.
    pub fn scalar(group: &Arc<FiniteGroup>, n: usize, a: &GroupRingElement) -> Self {
        let mut m = Self::zeros(group, n, n);
        for i in 0..n {
            m.entries[i * n + i] = a.clone();
        }
        m
    }

    /// The 1x1 matrix `[a]`.
    pub fn single(a: &GroupRingElement) -> Self {
        Self { group: a.group().clone(), rows: 1, cols: 1, entries: vec![a.clone()] }
    }

    /// Embeds an integer matrix, each entry placed on the identity element.
    pub fn from_integer(group: &Arc<FiniteGroup>, m: &IntegerMatrix) -> Self {
        let entries = m.entries().iter().map(|c| GroupRingElement::basis(group, group.identity(), c.clone())).collect();
        Self { group: group.clone(), rows: m.rows(), cols: m.cols(), entries }
    }

    pub fn from_entries(group: &Arc<FiniteGroup>, rows: usize, cols: usize, entries: Vec<GroupRingElement>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        if entries.iter().any(|e| !same_group(e.group(), group)) {
            return Err(Error::GroupMismatch);
        }
        Ok(Self { group: group.clone(), rows, cols, entries })
    }

    /// Builds from nested rows. Panics on ragged input.
    pub fn from_rows(group: &Arc<FiniteGroup>, rows: Vec<Vec<GroupRingElement>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            entries.extend(row);
        }
        Self::from_entries(group, r, c, entries).expect("from_rows")
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &GroupRingElement {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: GroupRingElement) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[GroupRingElement] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<GroupRingElement>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).clone()).collect()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(GroupRingElement::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| if i == j { self.get(i, j).is_one() } else { self.get(i, j).is_zero() })
            })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!("cannot add {:?} and {:?}", self.shape(), other.shape())));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(Self { group: self.group.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if same_group(&self.group, &other.group) {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let n = self.group.order();
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = vec![BigInt::zero(); n];
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    for (slot, v) in acc.iter_mut().zip(convolve(&self.group, a.coeffs(), b.coeffs())) {
                        *slot += v;
                    }
                }
                entries.push(GroupRingElement::from_coeffs(&self.group, acc)?);
            }
        }
        Ok(Self { group: self.group.clone(), rows: self.rows, cols: other.cols, entries })
    }

    /// Involuted transpose: the dual map `Z[G]^rows -> Z[G]^cols`.
    pub fn dual(&self) -> Self {
        let mut out = Self::zeros(&self.group, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).involute());
            }
        }
        out
    }

    /// Integer matrix of the underlying map of free abelian groups.
    pub fn expand(&self) -> IntegerMatrix {
        let g = &self.group;
        let n = g.order();
        let mut out = IntegerMatrix::zeros(self.rows * n, self.cols * n);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for (a, c) in self.get(i, j).coeffs().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    for h in 0..n {
                        out.set(i * n + g.mul(a, h), j * n + h, c.clone());
                    }
                }
            }
        }
        out
    }

    /// Entrywise augmentation: the map on trivial coefficients.
    pub fn augment(&self) -> IntegerMatrix {
        let entries = self.entries.iter().map(GroupRingElement::augmentation).collect();
        IntegerMatrix::from_entries(self.rows, self.cols, entries).expect("shape")
    }

    /// The block matrix `[[a, b], [c, d]]`. Empty blocks are fine as long as
    /// the shapes line up.
    pub fn block(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(Error::Shape(format!(
                "block shapes {:?} {:?} / {:?} {:?} do not tile",
                a.shape(),
                b.shape(),
                c.shape(),
                d.shape()
            )));
        }
        for m in [b, c, d] {
            a.check_same(m)?;
        }
        let (rows, cols) = (a.rows + c.rows, a.cols + b.cols);
        let mut out = Self::zeros(&a.group, rows, cols);
        for (m, r0, c0) in [(a, 0, 0), (b, 0, a.cols), (c, a.rows, 0), (d, a.rows, a.cols)] {
            for i in 0..m.rows {
                for j in 0..m.cols {
                    out.set(r0 + i, c0 + j, m.get(i, j).clone());
                }
            }
        }
        Ok(out)
    }

    /// Block diagonal `diag(a, b)`.
    pub fn direct_sum(a: &Self, b: &Self) -> Result<Self> {
        let g = &a.group;
        Self::block(a, &Self::zeros(g, a.rows, b.cols), &Self::zeros(g, b.rows, a.cols), b)
    }

    /// Rows `r0..r0+nr`, columns `c0..c0+nc`.
    pub fn submatrix(&self, r0: usize, nr: usize, c0: usize, nc: usize) -> Self {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "submatrix out of range");
        let mut out = Self::zeros(&self.group, nr, nc);
        for i in 0..nr {
            for j in 0..nc {
                out.set(i, j, self.get(r0 + i, c0 + j).clone());
            }
        }
        out
    }

    /// Inverse over `Z[G]`, if one exists.
    pub fn inverse(&self) -> Result<Option<Self>> {
        if self.rows != self.cols {
            return Ok(None);
        }
        if self.rows == 0 {
            return Ok(Some(self.clone()));
        }
        let det = determinant(&self.expand())?;
        if det != BigInt::from(1) && det != BigInt::from(-1) {
            return Ok(None);
        }
        solve_gr_linear(self, &Self::identity(&self.group, self.rows))
    }

    /// First nonzero entry as `(row, col, value)`; a residue witness.
    pub fn first_nonzero(&self) -> Option<(usize, usize, GroupRingElement)> {
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .find(|&(i, j)| !self.get(i, j).is_zero())
            .map(|(i, j)| (i, j, self.get(i, j).clone()))
    }
}

impl Mul for &GRMatrix {
    type Output = GRMatrix;
    fn mul(self, rhs: Self) -> GRMatrix {
        self.compose(rhs).expect("group ring matrix product")
    }
}

impl Add for &GRMatrix {
    type Output = GRMatrix;
    fn add(self, rhs: Self) -> GRMatrix {
        self.checked_add(rhs).expect("group ring matrix sum")
    }
}

impl Sub for &GRMatrix {
    type Output = GRMatrix;
    fn sub(self, rhs: Self) -> GRMatrix {
        self.checked_sub(rhs).expect("group ring matrix difference")
    }
}

impl Neg for &GRMatrix {
    type Output = GRMatrix;
    fn neg(self) -> GRMatrix {
        GRMatrix {
            group: self.group.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }
}

impl Neg for GRMatrix {
    type Output = GRMatrix;
    fn neg(self) -> GRMatrix {
        -&self
    }
}

impl fmt::Debug for GRMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GRMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|j| format!("({})", self.get(i, j))).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

pub fn gr_compose(a: &GRMatrix, b: &GRMatrix) -> Result<GRMatrix> {
    a.compose(b)
}

pub fn dual_matrix(a: &GRMatrix) -> GRMatrix {
    a.dual()
}

pub fn expand_regular(a: &GRMatrix) -> IntegerMatrix {
    a.expand()
}

pub fn augment_matrix(a: &GRMatrix) -> IntegerMatrix {
    a.augment()
}

/// Solves `A X = B` over `Z[G]`.
///
/// Right-linearity means `X` is determined by where it sends the basis
/// vectors, so only the identity column of each expanded block of `B` is
/// solved for. Returns `Ok(None)` when no solution exists.
pub fn solve_gr_linear(a: &GRMatrix, b: &GRMatrix) -> Result<Option<GRMatrix>> {
    a.check_same(b)?;
    if a.rows != b.rows {
        return Err(Error::Shape(format!("A has {} rows but B has {}", a.rows, b.rows)));
    }
    let g = a.group.clone();
    let n = g.order();
    let mut rhs = IntegerMatrix::zeros(b.rows * n, b.cols);
    for i in 0..b.rows {
        for j in 0..b.cols {
            for (h, c) in b.get(i, j).coeffs().iter().enumerate() {
                rhs.set(i * n + h, j, c.clone());
            }
        }
    }
    let Some(y) = solve_integer(&a.expand(), &rhs)? else {
        return Ok(None);
    };
    let mut x = GRMatrix::zeros(&g, a.cols, b.cols);
    for i in 0..a.cols {
        for j in 0..b.cols {
            let coeffs = (0..n).map(|h| y.get(i * n + h, j).clone()).collect();
            x.set(i, j, GroupRingElement::from_coeffs(&g, coeffs)?);
        }
    }
    Ok(Some(x))
}
