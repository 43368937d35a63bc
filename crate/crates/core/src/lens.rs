//! The lens spaces `L(n; 1, 1)` as dual-form complexes over `Z[C_n]`.
//!
//! ```text
//! A:  Z[C_n] --(1-t^-1)--> Z[C_n] --N--> Z[C_n] --(1-t^-1)--> Z[C_n] --N--> Z[C_n] --(1-t)--> Z[C_n]
//! ```
//!
//! `N` is the norm element. For `n = 4k + 1` the middle differential can be
//! replaced by an antisymmetric one through the unit
//! `beta = sum_{r=1-k}^{k} t^r - sum_{r=k+2}^{3k} t^r`.

use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use crate::complex::{
    compose_chain_maps, dual_chain_map, dualize_complex, is_chain_map, verify_homotopy, ChainComplex, ChainHomotopy,
    ChainMap, Generators, HomotopyReport,
};
use crate::dual_form::{asd_check, recognize_dual_form};
use crate::error::{Error, Result};
use crate::group::{cyclic_group, norm_element, FiniteGroup, GroupRingElement};
use crate::grmat::{solve_gr_linear, GRMatrix};

fn one_by_one(a: &GroupRingElement) -> GRMatrix {
    GRMatrix::single(a)
}

fn poly(g: &Arc<FiniteGroup>, terms: &[(i64, i64)]) -> GroupRingElement {
    GroupRingElement::from_exponents(g, terms)
}

fn lens_group(n: usize) -> Result<Arc<FiniteGroup>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("lens spaces need n >= 2, got {n}")));
    }
    cyclic_group(n)
}

fn with_middle(g: &Arc<FiniteGroup>, d3: &GroupRingElement) -> Result<ChainComplex> {
    let s = one_by_one(&norm_element(g));
    let a = one_by_one(&poly(g, &[(1, 0), (-1, -1)]));
    let b = one_by_one(&poly(g, &[(1, 0), (-1, 1)]));
    let one = vec![BigInt::from(1)];
    ChainComplex::from_top_down(g, vec![1; 6], vec![a, s.clone(), one_by_one(d3), s, b])?
        .with_generators(Generators { top: one.clone(), bottom: one })
}

/// The rank-one dual-form complex of `L(n; 1, 1)`.
pub fn lens_complex(n: usize) -> Result<ChainComplex> {
    let g = lens_group(n)?;
    with_middle(&g, &poly(&g, &[(1, 0), (-1, -1)]))
}

/// The duality map `A^* -> A`, components `(1, 1, 1, -t, -1, -1)` in degrees
/// 0 to 5.
pub fn lens_duality_map(n: usize) -> Result<ChainMap> {
    let a = lens_complex(n)?;
    duality_map_of(&a)
}

fn duality_map_of(a: &ChainComplex) -> Result<ChainMap> {
    let g = a.group();
    let c = |e: i64| one_by_one(&GroupRingElement::from_int(g, e));
    let minus_t = one_by_one(&poly(g, &[(-1, 1)]));
    ChainMap::new(&dualize_complex(a), a, vec![c(1), c(1), c(1), minus_t, c(-1), c(-1)])
}

/// `k` with `n = 4k + 1`, if any.
pub fn asd_parameter(n: usize) -> Option<usize> {
    (n >= 5 && n % 4 == 1).then_some((n - 1) / 4)
}

#[derive(Debug, Clone)]
pub struct AsdUnit {
    pub k: usize,
    pub alpha: GroupRingElement,
    pub beta: GroupRingElement,
    pub beta_inv: GroupRingElement,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsdIdentities {
    /// `beta beta_inv = beta_inv beta = 1`.
    pub beta_unit: bool,
    /// `beta (1 - t^-1) = alpha`.
    pub beta_times_boundary: bool,
    /// `N beta = N`.
    pub norm_absorbs_beta: bool,
    /// `alpha (t^{1+k} + t^{1-k}) = t^2 - 1`.
    pub alpha_factor: bool,
    /// `conj(alpha) = -alpha`.
    pub alpha_antisymmetric: bool,
    /// `t conj(beta) = beta`.
    pub beta_twisted_symmetric: bool,
}

impl AsdIdentities {
    pub fn all(&self) -> bool {
        self.beta_unit
            && self.beta_times_boundary
            && self.norm_absorbs_beta
            && self.alpha_factor
            && self.alpha_antisymmetric
            && self.beta_twisted_symmetric
    }
}

impl AsdUnit {
    pub fn identities(&self) -> AsdIdentities {
        let g = self.alpha.group().clone();
        let k = self.k as i64;
        let t = poly(&g, &[(1, 1)]);
        AsdIdentities {
            beta_unit: (&self.beta * &self.beta_inv).is_one() && (&self.beta_inv * &self.beta).is_one(),
            beta_times_boundary: &self.beta * &poly(&g, &[(1, 0), (-1, -1)]) == self.alpha,
            norm_absorbs_beta: &norm_element(&g) * &self.beta == norm_element(&g),
            alpha_factor: &self.alpha * &poly(&g, &[(1, 1 + k), (1, 1 - k)]) == poly(&g, &[(1, 2), (-1, 0)]),
            alpha_antisymmetric: self.alpha.involute() == -&self.alpha,
            beta_twisted_symmetric: &t * &self.beta.involute() == self.beta,
        }
    }
}

/// `alpha = t^{k+1} + t^k - t^{-k} - t^{-(k+1)}` and the unit `beta` with
/// `beta (1 - t^-1) = alpha`, for `n = 4k + 1`.
pub fn asd_unit(n: usize) -> Result<AsdUnit> {
    let k = asd_parameter(n).ok_or_else(|| Error::InvalidArgument(format!("{n} is not of the form 4k + 1 with k >= 1")))?;
    let g = cyclic_group(n)?;
    let ki = k as i64;
    let alpha = poly(&g, &[(1, ki + 1), (1, ki), (-1, -ki), (-1, -ki - 1)]);
    let mut terms: Vec<(i64, i64)> = (1 - ki..=ki).map(|r| (1, r)).collect();
    terms.extend((ki + 2..=3 * ki).map(|r| (-1, r)));
    let beta = poly(&g, &terms);
    let beta_inv = solve_gr_linear(&one_by_one(&beta), &GRMatrix::identity(&g, 1))?
        .ok_or_else(|| Error::NotInvertible(format!("beta = {beta} is not a unit")))?
        .get(0, 0)
        .clone();
    Ok(AsdUnit { k, alpha, beta, beta_inv })
}

/// The complex `A'` with middle differential `alpha`.
pub fn lens_asd_complex(n: usize) -> Result<ChainComplex> {
    let u = asd_unit(n)?;
    with_middle(u.alpha.group(), &u.alpha)
}

/// Which global sign of the `+-1` diagonal map the composite is homotopic to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalSign {
    /// `+1` in degrees 0..2, `-1` in degrees 3..5.
    LowPositive,
    /// `-1` in degrees 0..2, `+1` in degrees 3..5.
    LowNegative,
}

#[derive(Debug, Clone)]
pub struct AsdTransform {
    pub unit: AsdUnit,
    pub a: ChainComplex,
    pub a_prime: ChainComplex,
    /// `A -> A'`, `beta` in degree 2 and `1` elsewhere.
    pub f: ChainMap,
    /// `f phi f^*: A'^* -> A'`.
    pub composite: ChainMap,
    /// `alpha x = beta - 1`.
    pub x: GroupRingElement,
    pub diagonal: ChainMap,
    pub sign: Option<DiagonalSign>,
    /// Between `composite` and `diagonal`; only the degree-2 component is
    /// nonzero.
    pub homotopy: ChainHomotopy,
    pub homotopy_report: HomotopyReport,
    pub f_is_chain_map: bool,
    pub asd: bool,
}

impl AsdTransform {
    pub fn verified(&self) -> bool {
        self.unit.identities().all() && self.f_is_chain_map && self.asd && self.sign.is_some() && self.homotopy_report.verified()
    }
}

fn diagonal(c: &ChainComplex, low: i64) -> Result<ChainMap> {
    let g = c.group();
    let e = |s: i64| one_by_one(&GroupRingElement::from_int(g, s));
    ChainMap::new(&dualize_complex(c), c, vec![e(low), e(low), e(low), e(-low), e(-low), e(-low)])
}

/// Moves the lens duality map to an antisymmetric dual form and exhibits the
/// one-component homotopy to the `+-1` diagonal map.
pub fn lens_asd_transform(n: usize) -> Result<AsdTransform> {
    let unit = asd_unit(n)?;
    let g = unit.alpha.group().clone();
    let a = lens_complex(n)?;
    let a_prime = with_middle(&g, &unit.alpha)?;
    let id = || GRMatrix::identity(&g, 1);
    let f = ChainMap::new(&a, &a_prime, vec![id(), id(), one_by_one(&unit.beta), id(), id(), id()])?;
    let f_is_chain_map = is_chain_map(&f).is_chain_map();
    let phi = duality_map_of(&a)?;
    let composite = compose_chain_maps(&f, &compose_chain_maps(&phi, &dual_chain_map(&f))?)?;

    let beta_minus_one = &unit.beta - &GroupRingElement::one(&g);
    let x = solve_gr_linear(&one_by_one(&unit.alpha), &one_by_one(&beta_minus_one))?
        .ok_or_else(|| Error::NoLift("alpha x = beta - 1".into()))?
        .get(0, 0)
        .clone();
    let zero = || GRMatrix::zeros(&g, 1, 1);
    let components = vec![zero(), zero(), one_by_one(&x), zero(), zero()];

    let mut chosen = None;
    for (low, sign) in [(1, DiagonalSign::LowPositive), (-1, DiagonalSign::LowNegative)] {
        let d = diagonal(&a_prime, low)?;
        let h = ChainHomotopy::new(&composite, &d, components.clone())?;
        let rep = verify_homotopy(&h);
        let ok = rep.verified();
        if chosen.is_none() || ok {
            chosen = Some((d, h, rep, ok.then_some(sign)));
        }
        if ok {
            break;
        }
    }
    let (diagonal, homotopy, homotopy_report, sign) = chosen.expect("two signs tried");
    let asd = recognize_dual_form(&a_prime).map(|v| asd_check(&v)).unwrap_or(false);
    Ok(AsdTransform {
        unit,
        a,
        a_prime,
        f,
        composite,
        x,
        diagonal,
        sign,
        homotopy,
        homotopy_report,
        f_is_chain_map,
        asd,
    })
}

/// Everything known about one lens space.
#[derive(Debug, Clone)]
pub struct LensInstance {
    pub n: usize,
    pub a: ChainComplex,
    pub phi: ChainMap,
    pub k: Option<usize>,
    pub transform: Option<AsdTransform>,
}

impl LensInstance {
    pub fn new(n: usize) -> Result<Self> {
        let a = lens_complex(n)?;
        let phi = duality_map_of(&a)?;
        let k = asd_parameter(n);
        let transform = k.map(|_| lens_asd_transform(n)).transpose()?;
        Ok(Self { n, a, phi, k, transform })
    }
}
