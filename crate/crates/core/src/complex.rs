//! Chain complexes of free `Z[G]`-modules, chain maps and homotopies.
//!
//! Modules are indexed by degree, `0..=top`. For algebraic 5-complexes
//! `top = 5` and the differentials are `d_i : F_i -> F_{i-1}`, `i = 1..=5`.
//!
//! The augmented ends `coker(d_1) = Z` and `ker(d_top) = Z` are recorded by
//! integer vectors:
//!
//! * `bottom = c` means the functional `x -> sum_i c_i * aug(x_i)` on `F_0`;
//! * `top = c` means the cycle whose `i`-th coordinate is `c_i * N`, `N` the
//!   norm element.
//!
//! Both shapes are forced by the trivial `G`-action on `Z`. Dualizing swaps
//! them: the dual of the bottom functional is the top cycle of the dual
//! complex under the pairing `<u, x> = coefficient of 1 in sum_i conj(u_i) x_i`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::grmat::GRMatrix;
use crate::intmat::{homology_pair, smith_normal_form, AbelianGroupInfo, IntegerMatrix};

/// Certificates for the identifications of both augmented ends with `Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generators {
    pub top: Vec<BigInt>,
    pub bottom: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
    group: Arc<FiniteGroup>,
    ranks: Vec<usize>,
    differentials: Vec<GRMatrix>,
    generators: Option<Generators>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coefficients {
    /// Homology of the underlying free abelian complex (the universal cover).
    Integral,
    /// Homology after tensoring with the trivial module `Z`.
    Trivial,
}

/// A nonzero entry of something that should vanish.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Residue {
    pub degree: usize,
    pub row: usize,
    pub col: usize,
    pub value: String,
}

impl Residue {
    fn of(degree: usize, m: &GRMatrix) -> Option<Self> {
        m.first_nonzero().map(|(row, col, v)| Residue { degree, row, col, value: v.to_string() })
    }
}

impl ChainComplex {
    /// `ranks[i]` is the rank of `F_i`; `differentials[i - 1]` is `d_i`.
    pub fn new(group: &Arc<FiniteGroup>, ranks: Vec<usize>, differentials: Vec<GRMatrix>) -> Result<Self> {
        if ranks.is_empty() {
            return Err(Error::Shape("a complex needs at least one module".into()));
        }
        if differentials.len() + 1 != ranks.len() {
            return Err(Error::Shape(format!(
                "{} modules need {} differentials, got {}",
                ranks.len(),
                ranks.len() - 1,
                differentials.len()
            )));
        }
        for (k, d) in differentials.iter().enumerate() {
            let i = k + 1;
            if !crate::group::same_group(d.group(), group) {
                return Err(Error::GroupMismatch);
            }
            if d.shape() != (ranks[i - 1], ranks[i]) {
                return Err(Error::Shape(format!(
                    "d_{i} is {:?}, expected {}x{}",
                    d.shape(),
                    ranks[i - 1],
                    ranks[i]
                )));
            }
        }
        Ok(Self { group: group.clone(), ranks, differentials, generators: None })
    }

    /// Same as [`ChainComplex::new`] with both lists ordered from the top degree down.
    pub fn from_top_down(group: &Arc<FiniteGroup>, ranks: Vec<usize>, differentials: Vec<GRMatrix>) -> Result<Self> {
        let mut r = ranks;
        r.reverse();
        let mut d = differentials;
        d.reverse();
        Self::new(group, r, d)
    }

    pub fn with_generators(mut self, generators: Generators) -> Result<Self> {
        if generators.top.len() != self.rank(self.top_degree()) || generators.bottom.len() != self.rank(0) {
            return Err(Error::Shape("generator certificate lengths do not match the end ranks".into()));
        }
        self.generators = Some(generators);
        Ok(self)
    }

    pub fn without_generators(mut self) -> Self {
        self.generators = None;
        self
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn top_degree(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn rank(&self, degree: usize) -> usize {
        self.ranks.get(degree).copied().unwrap_or(0)
    }

    /// Ranks by degree, `0..=top`.
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn generators(&self) -> Option<&Generators> {
        self.generators.as_ref()
    }

    /// `d_i` for `1 <= i <= top`; the zero map out of `F_0` or into `F_top`
    /// otherwise.
    pub fn boundary(&self, i: usize) -> GRMatrix {
        if i >= 1 && i <= self.top_degree() {
            self.differentials[i - 1].clone()
        } else if i == 0 {
            GRMatrix::zeros(&self.group, 0, self.rank(0))
        } else {
            GRMatrix::zeros(&self.group, self.rank(i - 1), 0)
        }
    }

    pub fn differential(&self, i: usize) -> &GRMatrix {
        &self.differentials[i - 1]
    }

    pub fn differentials(&self) -> &[GRMatrix] {
        &self.differentials
    }

    pub fn is_valid(&self) -> bool {
        validate_complex(self).valid()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    /// `d_i d_{i+1}` residues, labelled by `i`.
    pub failures: Vec<Residue>,
}

impl ValidationReport {
    pub fn valid(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that consecutive differentials compose to zero.
pub fn validate_complex(c: &ChainComplex) -> ValidationReport {
    let mut failures = Vec::new();
    for i in 1..c.top_degree() {
        let comp = c.differential(i).compose(c.differential(i + 1)).expect("shapes checked at construction");
        if let Some(r) = Residue::of(i, &comp) {
            failures.push(r);
        }
    }
    ValidationReport { failures }
}

/// Alternating sum of the ranks of the modules over `Z`.
pub fn euler_characteristic(c: &ChainComplex) -> i64 {
    let n = c.group.order() as i64;
    c.ranks.iter().enumerate().map(|(i, &r)| if i % 2 == 0 { r as i64 * n } else { -(r as i64) * n }).sum()
}

/// The dual complex: reversed grading, dual differentials, no signs.
pub fn dualize_complex(c: &ChainComplex) -> ChainComplex {
    let top = c.top_degree();
    let ranks: Vec<usize> = c.ranks.iter().rev().copied().collect();
    let differentials = (1..=top).map(|i| c.differential(top + 1 - i).dual()).collect();
    ChainComplex {
        group: c.group.clone(),
        ranks,
        differentials,
        generators: c.generators.as_ref().map(|g| Generators { top: g.bottom.clone(), bottom: g.top.clone() }),
    }
}

fn expanded_boundary(c: &ChainComplex, i: usize, coeffs: Coefficients) -> IntegerMatrix {
    let d = c.boundary(i);
    match coeffs {
        Coefficients::Integral => d.expand(),
        Coefficients::Trivial => d.augment(),
    }
}

/// Homology of the raw complex at `degree` (ends not augmented).
pub fn homology(c: &ChainComplex, degree: usize, coeffs: Coefficients) -> Result<AbelianGroupInfo> {
    if degree > c.top_degree() {
        return Err(Error::DegreeOutOfRange { degree, top: c.top_degree() });
    }
    homology_pair(&expanded_boundary(c, degree + 1, coeffs), &expanded_boundary(c, degree, coeffs))
}

/// `H^i(C)`, computed as the homology of `C^*` in degree `top - i`.
pub fn cohomology(c: &ChainComplex, degree: usize, coeffs: Coefficients) -> Result<AbelianGroupInfo> {
    if degree > c.top_degree() {
        return Err(Error::DegreeOutOfRange { degree, top: c.top_degree() });
    }
    homology(&dualize_complex(c), c.top_degree() - degree, coeffs)
}

pub fn homology_all(c: &ChainComplex, coeffs: Coefficients) -> Result<Vec<AbelianGroupInfo>> {
    (0..=c.top_degree()).map(|i| homology(c, i, coeffs)).collect()
}

/// Per-block value of a vector that is constant on each `|G|`-block; `None`
/// when some block is not constant (nontrivial action).
fn block_constants(v: &[BigInt], order: usize) -> Option<Vec<BigInt>> {
    v.chunks(order)
        .map(|block| if block.iter().all(|x| *x == block[0]) { Some(block[0].clone()) } else { None })
        .collect()
}

fn normalize_sign(mut v: Vec<BigInt>) -> Vec<BigInt> {
    if v.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative) {
        for x in &mut v {
            *x = -std::mem::take(x);
        }
    }
    v
}

/// What is known about one augmented end.
#[derive(Debug, Clone, Serialize)]
pub struct EndReport {
    /// The homology at the end is infinite cyclic.
    pub is_z: bool,
    /// `G` acts trivially on it.
    pub trivial_action: bool,
    /// The generator certificate in use, if any.
    #[serde(with = "crate::io::opt_bigint_vec")]
    pub generator: Option<Vec<BigInt>>,
    pub detail: String,
}

impl EndReport {
    pub fn ok(&self) -> bool {
        self.is_z && self.trivial_action && self.generator.is_some()
    }
}

fn end_from_basis(basis: Vec<Vec<BigInt>>, torsion_free: bool, order: usize, certificate: Option<&Vec<BigInt>>) -> EndReport {
    if basis.len() != 1 || !torsion_free {
        return EndReport {
            is_z: false,
            trivial_action: false,
            generator: None,
            detail: format!("rank {} over Z{}", basis.len(), if torsion_free { "" } else { " with torsion" }),
        };
    }
    let Some(consts) = block_constants(&basis[0], order) else {
        return EndReport { is_z: true, trivial_action: false, generator: None, detail: "G acts nontrivially".into() };
    };
    let computed = normalize_sign(consts);
    match certificate {
        None => EndReport { is_z: true, trivial_action: true, generator: Some(computed), detail: "computed".into() },
        Some(cert) => {
            let neg: Vec<BigInt> = computed.iter().map(|x| -x).collect();
            if *cert == computed || *cert == neg {
                EndReport { is_z: true, trivial_action: true, generator: Some(cert.clone()), detail: "certificate".into() }
            } else {
                EndReport {
                    is_z: true,
                    trivial_action: true,
                    generator: None,
                    detail: "certificate does not generate".into(),
                }
            }
        }
    }
}

/// The functional identifying `coker(d_1)` with `Z`.
pub fn bottom_end(c: &ChainComplex) -> EndReport {
    let d1 = if c.top_degree() >= 1 { c.differential(1).expand() } else { IntegerMatrix::zeros(c.rank(0) * c.group.order(), 0) };
    let snf = smith_normal_form(&d1);
    let torsion_free = snf.diagonal.iter().all(One::is_one);
    let basis = (snf.rank()..d1.rows()).map(|i| snf.u.row(i)).collect();
    end_from_basis(basis, torsion_free, c.group.order(), c.generators.as_ref().map(|g| &g.bottom))
}

/// The cycle identifying `ker(d_top)` with `Z`.
pub fn top_end(c: &ChainComplex) -> EndReport {
    let top = c.top_degree();
    let dt = if top >= 1 { c.differential(top).expand() } else { IntegerMatrix::zeros(0, c.rank(0) * c.group.order()) };
    let snf = smith_normal_form(&dt);
    let basis = (snf.rank()..dt.cols()).map(|j| snf.v.column(j)).collect();
    end_from_basis(basis, true, c.group.order(), c.generators.as_ref().map(|g| &g.top))
}

/// Certificates for both ends, taken from the complex or computed.
pub fn end_generators(c: &ChainComplex) -> Result<Generators> {
    let (b, t) = (bottom_end(c), top_end(c));
    match (b.generator, t.generator) {
        (Some(bottom), Some(top)) => Ok(Generators { top, bottom }),
        (None, _) => Err(Error::NotAlg5(format!("coker(d_1): {}", b.detail))),
        (_, None) => Err(Error::NotAlg5(format!("ker(d_top): {}", t.detail))),
    }
}

/// Attaches computed end certificates when the complex has none.
pub fn with_computed_generators(c: &ChainComplex) -> Result<ChainComplex> {
    if c.generators.is_some() {
        return Ok(c.clone());
    }
    let g = end_generators(c)?;
    c.clone().with_generators(g)
}

#[derive(Debug, Clone, Serialize)]
pub struct Alg5Report {
    pub length_six: bool,
    pub composition_zero: bool,
    pub exact_at_f4: bool,
    pub exact_at_f1: bool,
    pub bottom: EndReport,
    pub top: EndReport,
    pub euler_characteristic: i64,
}

impl Alg5Report {
    pub fn member(&self) -> bool {
        self.length_six
            && self.composition_zero
            && self.exact_at_f4
            && self.exact_at_f1
            && self.bottom.ok()
            && self.top.ok()
            && self.euler_characteristic == 0
    }

    /// Names of the failed conditions.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let checks = [
            (self.length_six, "length_six"),
            (self.composition_zero, "composition_zero"),
            (self.exact_at_f4, "exact_at_f4"),
            (self.exact_at_f1, "exact_at_f1"),
            (self.bottom.ok(), "coker_d1_is_z"),
            (self.top.ok(), "ker_d5_is_z"),
            (self.euler_characteristic == 0, "euler_characteristic_zero"),
        ];
        for (ok, name) in checks {
            if !ok {
                out.push(name);
            }
        }
        out
    }
}

/// Membership test for algebraic 5-complexes: exact at `F_4` and `F_1`,
/// both augmented ends infinite cyclic with trivial action, `chi = 0`.
pub fn is_alg5(c: &ChainComplex) -> Alg5Report {
    let length_six = c.top_degree() == 5;
    let composition_zero = validate_complex(c).valid();
    let exact = |d: usize| {
        length_six && composition_zero && homology(c, d, Coefficients::Integral).map(|h| h.is_zero()).unwrap_or(false)
    };
    Alg5Report {
        length_six,
        composition_zero,
        exact_at_f4: exact(4),
        exact_at_f1: exact(1),
        bottom: bottom_end(c),
        top: top_end(c),
        euler_characteristic: euler_characteristic(c),
    }
}

/// A degreewise family of maps `source_i -> target_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainMap {
    pub source: ChainComplex,
    pub target: ChainComplex,
    pub components: Vec<GRMatrix>,
}

impl ChainMap {
    pub fn new(source: &ChainComplex, target: &ChainComplex, components: Vec<GRMatrix>) -> Result<Self> {
        if source.top_degree() != target.top_degree() || components.len() != source.ranks.len() {
            return Err(Error::Shape("chain map degrees do not line up".into()));
        }
        for (i, f) in components.iter().enumerate() {
            if f.shape() != (target.rank(i), source.rank(i)) {
                return Err(Error::Shape(format!(
                    "component {i} is {:?}, expected {}x{}",
                    f.shape(),
                    target.rank(i),
                    source.rank(i)
                )));
            }
        }
        Ok(Self { source: source.clone(), target: target.clone(), components })
    }

    pub fn identity(c: &ChainComplex) -> Self {
        let components = c.ranks.iter().map(|&r| GRMatrix::identity(&c.group, r)).collect();
        Self { source: c.clone(), target: c.clone(), components }
    }

    pub fn component(&self, degree: usize) -> &GRMatrix {
        &self.components[degree]
    }

    pub fn negate(&self) -> Self {
        Self { components: self.components.iter().map(|m| -m).collect(), ..self.clone() }
    }

    /// Component matrices ordered from the top degree down.
    pub fn top_down(&self) -> Vec<&GRMatrix> {
        self.components.iter().rev().collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainMapReport {
    /// `target.d_i f_i - f_{i-1} source.d_i`, labelled by `i`.
    pub failures: Vec<Residue>,
    /// `(x, y)`: induced maps on `coker(d_1)` and `ker(d_top)`, when both
    /// ends are identified with `Z`.
    #[serde(with = "crate::io::opt_bigint_pair")]
    pub end_scalars: Option<(BigInt, BigInt)>,
    pub end_detail: String,
}

impl ChainMapReport {
    pub fn is_chain_map(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn is_chain_map(f: &ChainMap) -> ChainMapReport {
    let mut failures = Vec::new();
    for i in 1..=f.source.top_degree() {
        let lhs = f.target.differential(i).compose(&f.components[i]).expect("shape");
        let rhs = f.components[i - 1].compose(f.source.differential(i)).expect("shape");
        if let Some(r) = Residue::of(i, &(&lhs - &rhs)) {
            failures.push(r);
        }
    }
    let (end_scalars, end_detail) = match end_scalars(f) {
        Ok(xy) => (Some(xy), String::new()),
        Err(e) => (None, e.to_string()),
    };
    ChainMapReport { failures, end_scalars, end_detail }
}

/// Scalar `s` with `lhs = s * rhs`, if any.
fn proportional(lhs: &[BigInt], rhs: &[BigInt]) -> Option<BigInt> {
    let k = rhs.iter().position(|x| !x.is_zero())?;
    let s = &lhs[k] / &rhs[k];
    lhs.iter().zip(rhs).all(|(a, b)| *a == &s * b).then_some(s)
}

/// The integers `(x, y)` by which `f` acts on `coker(d_1) = Z` and
/// `ker(d_top) = Z`.
pub fn end_scalars(f: &ChainMap) -> Result<(BigInt, BigInt)> {
    let gs = end_generators(&f.source)?;
    let gt = end_generators(&f.target)?;
    let top = f.source.top_degree();

    // bottom: c_T . aug(f_0) = x c_S
    let f0 = f.components[0].augment();
    let row = IntegerMatrix::from_entries(1, gt.bottom.len(), gt.bottom.clone())?;
    let pulled = (&row * &f0).row(0);
    let x = if gs.bottom.iter().all(Zero::is_zero) {
        None
    } else {
        proportional(&pulled, &gs.bottom)
    }
    .ok_or_else(|| Error::Verification("f_0 does not descend to coker(d_1)".into()))?;

    // top: aug(f_top) c_S = y c_T
    let ft = f.components[top].augment();
    let col = IntegerMatrix::from_entries(gs.top.len(), 1, gs.top.clone())?;
    let pushed = (&ft * &col).column(0);
    let y = proportional(&pushed, &gt.top).ok_or_else(|| Error::Verification("f_top does not preserve ker(d_top)".into()))?;
    Ok((x, y))
}

/// `outer . inner`, for `inner: A -> B` and `outer: B -> C`.
pub fn compose_chain_maps(outer: &ChainMap, inner: &ChainMap) -> Result<ChainMap> {
    if outer.source.ranks != inner.target.ranks {
        return Err(Error::Shape("chain maps are not composable".into()));
    }
    let components = outer.components.iter().zip(&inner.components).map(|(a, b)| a.compose(b)).collect::<Result<_>>()?;
    Ok(ChainMap { source: inner.source.clone(), target: outer.target.clone(), components })
}

/// The dual `f^*: T^* -> S^*` of `f: S -> T`.
pub fn dual_chain_map(f: &ChainMap) -> ChainMap {
    let top = f.source.top_degree();
    let components = (0..=top).map(|i| f.components[top - i].dual()).collect();
    ChainMap { source: dualize_complex(&f.target), target: dualize_complex(&f.source), components }
}

/// Homotopy data `I_i: source_i -> target_{i+1}`, `i = 0..top`.
#[derive(Debug, Clone)]
pub struct ChainHomotopy {
    pub between: (ChainMap, ChainMap),
    pub components: Vec<GRMatrix>,
}

impl ChainHomotopy {
    pub fn new(f: &ChainMap, g: &ChainMap, components: Vec<GRMatrix>) -> Result<Self> {
        if f.source != g.source || f.target != g.target {
            return Err(Error::Shape("homotopy between maps with different ends".into()));
        }
        let top = f.source.top_degree();
        if components.len() != top {
            return Err(Error::Shape(format!("expected {top} homotopy components, got {}", components.len())));
        }
        for (i, h) in components.iter().enumerate() {
            if h.shape() != (f.target.rank(i + 1), f.source.rank(i)) {
                return Err(Error::Shape(format!("homotopy component {i} is {:?}", h.shape())));
            }
        }
        Ok(Self { between: (f.clone(), g.clone()), components })
    }

    /// Number of nonzero components.
    pub fn support(&self) -> usize {
        self.components.iter().filter(|m| !m.is_zero()).count()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HomotopyReport {
    /// `f_i - g_i - (d I_i + I_{i-1} d)`, labelled by `i`.
    pub failures: Vec<Residue>,
    /// Both maps induce the same end scalars (`None` when unavailable).
    pub end_scalars_agree: Option<bool>,
}

impl HomotopyReport {
    pub fn verified(&self) -> bool {
        self.failures.is_empty() && self.end_scalars_agree != Some(false)
    }
}

/// Checks `f_i - g_i = d_{i+1} I_i + I_{i-1} d_i` in every degree.
pub fn verify_homotopy(h: &ChainHomotopy) -> HomotopyReport {
    let (f, g) = &h.between;
    let (s, t) = (&f.source, &f.target);
    let top = s.top_degree();
    let mut failures = Vec::new();
    for i in 0..=top {
        let mut rhs = GRMatrix::zeros(s.group(), t.rank(i), s.rank(i));
        if i < top {
            rhs = &rhs + &t.differential(i + 1).compose(&h.components[i]).expect("shape");
        }
        if i > 0 {
            rhs = &rhs + &h.components[i - 1].compose(s.differential(i)).expect("shape");
        }
        let diff = &(&f.components[i] - &g.components[i]) - &rhs;
        if let Some(r) = Residue::of(i, &diff) {
            failures.push(r);
        }
    }
    let end_scalars_agree = match (end_scalars(f), end_scalars(g)) {
        (Ok(a), Ok(b)) => Some(a == b),
        _ => None,
    };
    HomotopyReport { failures, end_scalars_agree }
}
