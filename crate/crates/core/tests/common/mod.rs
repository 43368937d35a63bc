//! Strategies and property bodies shared by the property and acceptance suites.
#![allow(dead_code)]

use std::sync::Arc;

use dualform_core::group::{cyclic_group, group_from_table, FiniteGroup, GroupRingElement};
use dualform_core::grmat::GRMatrix;
use dualform_core::intmat::{determinant, rank, smith_normal_form, solve_integer, IntegerMatrix};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

/// Dihedral group of order `2m`; element `r^i s^j` has index `i + m j`.
pub fn dihedral(m: usize) -> Arc<FiniteGroup> {
    let n = 2 * m;
    let table: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let (i1, j1, i2, j2) = (a % m, a / m, b % m, b / m);
                    let i = if j1 == 0 { (i1 + i2) % m } else { (i1 + m - i2) % m };
                    i + m * ((j1 + j2) % 2)
                })
                .collect()
        })
        .collect();
    group_from_table(&table).unwrap()
}

pub fn quaternion() -> Arc<FiniteGroup> {
    // elements +-1, +-i, +-j, +-k as (sign, unit) with unit in {1, i, j, k}
    let unit_mul = |a: usize, b: usize| -> (bool, usize) {
        match (a, b) {
            (0, x) | (x, 0) => (false, x),
            (x, y) if x == y => (true, 0),
            (1, 2) => (false, 3),
            (2, 1) => (true, 3),
            (2, 3) => (false, 1),
            (3, 2) => (true, 1),
            (3, 1) => (false, 2),
            (1, 3) => (true, 2),
            _ => unreachable!(),
        }
    };
    let table: Vec<Vec<usize>> = (0..8)
        .map(|a| {
            (0..8)
                .map(|b| {
                    let (neg, u) = unit_mul(a % 4, b % 4);
                    let sign = (a / 4 + b / 4 + usize::from(neg)) % 2;
                    u + 4 * sign
                })
                .collect()
        })
        .collect();
    group_from_table(&table).unwrap()
}

pub fn klein() -> Arc<FiniteGroup> {
    group_from_table(&(0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect::<Vec<_>>()).unwrap()
}

/// Groups of order at most 12, abelian and not.
pub fn groups() -> Vec<Arc<FiniteGroup>> {
    let mut out: Vec<_> = (1..=12).map(|n| cyclic_group(n).unwrap()).collect();
    out.extend([3, 4, 5, 6].map(dihedral));
    out.push(quaternion());
    out.push(klein());
    out
}

pub fn group_strategy() -> impl Strategy<Value = Arc<FiniteGroup>> {
    proptest::sample::select(groups())
}

pub fn element(g: &Arc<FiniteGroup>) -> impl Strategy<Value = GroupRingElement> {
    let g = g.clone();
    proptest::collection::vec(-4i64..=4, g.order())
        .prop_map(move |c| GroupRingElement::from_coeffs(&g, c.into_iter().map(BigInt::from).collect()).unwrap())
}

pub fn gr_matrix(g: &Arc<FiniteGroup>, rows: usize, cols: usize) -> impl Strategy<Value = GRMatrix> {
    let g = g.clone();
    proptest::collection::vec(element(&g), rows * cols)
        .prop_map(move |e| GRMatrix::from_entries(&g, rows, cols, e).unwrap())
}

pub fn elements3() -> impl Strategy<Value = (GroupRingElement, GroupRingElement, GroupRingElement)> {
    group_strategy().prop_flat_map(|g| (element(&g), element(&g), element(&g)))
}

/// Composable pair `(A, B)` with `A: m x k`, `B: k x p`.
pub fn composable() -> impl Strategy<Value = (GRMatrix, GRMatrix)> {
    (group_strategy(), 1usize..=3, 1usize..=3, 1usize..=3)
        .prop_flat_map(|(g, m, k, p)| (gr_matrix(&g, m, k), gr_matrix(&g, k, p)))
}

pub fn int_matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = IntegerMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(-bound..=bound, r * c).prop_map(move |e| {
            IntegerMatrix::from_entries(r, c, e.into_iter().map(BigInt::from).collect()).unwrap()
        })
    })
}

/// `(A, X)` with `A: r x c`, `X: c x 2`.
pub fn solvable_system() -> impl Strategy<Value = (IntegerMatrix, IntegerMatrix)> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
        let a = proptest::collection::vec(-6i64..=6, r * c);
        let x = proptest::collection::vec(-6i64..=6, c * 2);
        (a, x).prop_map(move |(a, x)| {
            (
                IntegerMatrix::from_entries(r, c, a.into_iter().map(BigInt::from).collect()).unwrap(),
                IntegerMatrix::from_entries(c, 2, x.into_iter().map(BigInt::from).collect()).unwrap(),
            )
        })
    })
}

/// Antisymmetric integer matrix of odd size at most 9.
pub fn odd_antisymmetric() -> impl Strategy<Value = IntegerMatrix> {
    prop_oneof![Just(1usize), Just(3), Just(5), Just(7), Just(9)].prop_flat_map(|n| {
        proptest::collection::vec(-5i64..=5, n * (n - 1) / 2).prop_map(move |upper| {
            let mut m = IntegerMatrix::zeros(n, n);
            let mut it = upper.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    let x = BigInt::from(it.next().unwrap());
                    m.set(j, i, -&x);
                    m.set(i, j, x);
                }
            }
            m
        })
    })
}

pub fn check_involution(
    (a, b, c): (GroupRingElement, GroupRingElement, GroupRingElement),
) -> Result<(), TestCaseError> {
    prop_assert_eq!((&a * &b).involute(), &b.involute() * &a.involute());
    prop_assert_eq!(a.involute().involute(), a.clone());
    prop_assert_eq!((&a + &c).involute(), &a.involute() + &c.involute());
    prop_assert_eq!((&a * &b).augmentation(), a.augmentation() * b.augmentation());
    prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    Ok(())
}

pub fn check_dual_contravariance((a, b): (GRMatrix, GRMatrix)) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.compose(&b).unwrap().dual(), b.dual().compose(&a.dual()).unwrap());
    prop_assert_eq!(a.dual().dual(), a.clone());
    Ok(())
}

pub fn check_expand_multiplicative((a, b): (GRMatrix, GRMatrix)) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.compose(&b).unwrap().expand(), &a.expand() * &b.expand());
    prop_assert_eq!(a.dual().expand(), a.expand().transpose());
    prop_assert_eq!(a.compose(&b).unwrap().augment(), &a.augment() * &b.augment());
    Ok(())
}

pub fn check_snf(a: IntegerMatrix) -> Result<(), TestCaseError> {
    let s = smith_normal_form(&a);
    prop_assert!(determinant(&s.u).unwrap().abs().is_one());
    prop_assert!(determinant(&s.v).unwrap().abs().is_one());
    prop_assert_eq!(&(&s.u * &a) * &s.v, s.d.clone());
    for i in 0..s.d.rows() {
        for j in 0..s.d.cols() {
            let expected = if i == j && i < s.diagonal.len() { s.diagonal[i].clone() } else { BigInt::zero() };
            prop_assert_eq!(s.d.get(i, j).clone(), expected);
        }
    }
    prop_assert!(s.diagonal.iter().all(|d| d.is_positive()));
    for w in s.diagonal.windows(2) {
        prop_assert!((&w[1] % &w[0]).is_zero(), "{} does not divide {}", w[0], w[1]);
    }
    prop_assert_eq!(s.rank(), rank(&a.transpose()));
    Ok(())
}

pub fn check_solve((a, x0): (IntegerMatrix, IntegerMatrix)) -> Result<(), TestCaseError> {
    let b = &a * &x0;
    let x = solve_integer(&a, &b).unwrap();
    prop_assert!(x.is_some(), "a consistent system was reported unsolvable");
    prop_assert_eq!(&a * &x.unwrap(), b.clone());
    // perturbed right-hand sides: any reported solution must be genuine
    let mut b2 = b;
    let v = b2.get(0, 0) + BigInt::one();
    b2.set(0, 0, v);
    if let Some(y) = solve_integer(&a, &b2).unwrap() {
        prop_assert_eq!(&a * &y, b2);
    }
    Ok(())
}

pub fn check_antisymmetric_rank(m: IntegerMatrix) -> Result<(), TestCaseError> {
    prop_assert_eq!(m.transpose(), IntegerMatrix::from_entries(m.rows(), m.cols(), m.entries().iter().map(|x| -x).collect()).unwrap());
    prop_assert_eq!(rank(&m) % 2, 0);
    prop_assert!(determinant(&m).unwrap().is_zero());
    Ok(())
}
