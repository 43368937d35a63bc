//! Dual forms of algebraic 5-complexes.
//!
//! A complex is in dual form when it reads
//!
//! ```text
//! F0* --d1*--> F1* --d2*--> F2* --d3--> F2 --d2--> F1 --d1--> F0
//! ```
//!
//! Any algebraic 5-complex is brought to this shape in two steps. First a
//! fixed sequence of simple homotopy moves ([`to_dual_form_stage6`]) makes the
//! low three terms and the dual of the high three terms into two resolutions
//! of the same length. Then an explicit chain isomorphism between those
//! segments ([`solve_chain_isomorphism`]) conjugates the top half into the
//! dual of the bottom half ([`assemble_dual_form`]).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::complex::{
    compose_chain_maps, dual_chain_map, dualize_complex, end_generators, end_scalars, homology, is_alg5,
    is_chain_map, verify_homotopy, with_computed_generators, ChainComplex, ChainHomotopy, ChainMap, Coefficients,
    Generators, HomotopyReport, Residue,
};
use crate::error::{Error, Result};
use crate::grmat::{solve_gr_linear, GRMatrix};
use crate::group::GroupRingElement;
use crate::intmat::{kernel_basis, rank, solve_integer, IntegerMatrix};

fn hcat(a: &GRMatrix, b: &GRMatrix) -> Result<GRMatrix> {
    let g = a.group();
    GRMatrix::block(a, b, &GRMatrix::zeros(g, 0, a.cols()), &GRMatrix::zeros(g, 0, b.cols()))
}

fn vcat(a: &GRMatrix, b: &GRMatrix) -> Result<GRMatrix> {
    let g = a.group();
    GRMatrix::block(a, &GRMatrix::zeros(g, a.rows(), 0), b, &GRMatrix::zeros(g, b.rows(), 0))
}

fn padded(v: &[BigInt], extra: usize) -> Vec<BigInt> {
    let mut out = v.to_vec();
    out.resize(v.len() + extra, BigInt::zero());
    out
}

/// Rows of a matrix with entries printed as group ring elements.
pub fn matrix_strings(m: &GRMatrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

fn same_differentials(a: &ChainComplex, b: &ChainComplex) -> bool {
    a.ranks() == b.ranks() && a.differentials() == b.differentials()
}

/// Adds a free module of rank `n` in the top degree, mapping to zero.
pub fn stabilize(c: &ChainComplex, n: usize) -> Result<ChainComplex> {
    let top = c.top_degree();
    let mut ranks = c.ranks().to_vec();
    ranks[top] += n;
    let mut diffs = c.differentials().to_vec();
    if top >= 1 {
        let d = &diffs[top - 1];
        diffs[top - 1] = hcat(d, &GRMatrix::zeros(c.group(), d.rows(), n))?;
    }
    let out = ChainComplex::new(c.group(), ranks, diffs)?;
    match c.generators() {
        Some(g) => out.with_generators(Generators { top: padded(&g.top, n), bottom: g.bottom.clone() }),
        None => Ok(out),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveDirection {
    Expand,
    Collapse,
}

/// An elementary expansion `after = before (+) [Z[G]^f --iso--> Z[G]^f]`
/// placed in degrees `position + 1` and `position`, with the maps that make
/// the two complexes chain homotopy equivalent.
#[derive(Debug, Clone)]
pub struct SimpleMove {
    pub position: usize,
    pub rank: usize,
    pub iso: GRMatrix,
    pub before: ChainComplex,
    pub after: ChainComplex,
    /// `before -> after`, the summand inclusion.
    pub inclusion: ChainMap,
    /// `after -> before`, the summand projection.
    pub projection: ChainMap,
    /// Between the identity of `after` and `inclusion . projection`.
    pub homotopy: ChainHomotopy,
}

impl SimpleMove {
    /// Re-checks both chain maps, `projection . inclusion = 1` and the homotopy.
    pub fn verify(&self) -> bool {
        let back = compose_chain_maps(&self.projection, &self.inclusion);
        is_chain_map(&self.inclusion).is_chain_map()
            && is_chain_map(&self.projection).is_chain_map()
            && back.is_ok_and(|m| m.components == ChainMap::identity(&self.before).components)
            && verify_homotopy(&self.homotopy).failures.is_empty()
    }
}

/// Expansion by an arbitrary invertible `iso`.
pub fn expand_move(c: &ChainComplex, position: usize, iso: &GRMatrix) -> Result<SimpleMove> {
    let top = c.top_degree();
    if position >= top {
        return Err(Error::InvalidArgument(format!("move position {position} needs 0 <= position < {top}")));
    }
    let f = iso.rows();
    let iso_inv = iso
        .inverse()?
        .ok_or_else(|| Error::NotInvertible("the move isomorphism has no inverse over Z[G]".into()))?;
    let g = c.group();
    let p = position;

    let mut ranks = c.ranks().to_vec();
    ranks[p] += f;
    ranks[p + 1] += f;
    let mut diffs = Vec::with_capacity(top);
    for i in 1..=top {
        let d = c.differential(i);
        diffs.push(if i == p + 1 {
            GRMatrix::direct_sum(d, iso)?
        } else if i == p + 2 {
            vcat(d, &GRMatrix::zeros(g, f, d.cols()))?
        } else if i == p {
            hcat(d, &GRMatrix::zeros(g, d.rows(), f))?
        } else {
            d.clone()
        });
    }
    let mut after = ChainComplex::new(g, ranks, diffs)?;
    if let Some(gens) = c.generators() {
        let bottom = if p == 0 { padded(&gens.bottom, f) } else { gens.bottom.clone() };
        let top_gen = if p + 1 == top { padded(&gens.top, f) } else { gens.top.clone() };
        after = after.with_generators(Generators { top: top_gen, bottom })?;
    }

    let incl: Vec<GRMatrix> = (0..=top)
        .map(|i| {
            let id = GRMatrix::identity(g, c.rank(i));
            if i == p || i == p + 1 {
                vcat(&id, &GRMatrix::zeros(g, f, c.rank(i)))
            } else {
                Ok(id)
            }
        })
        .collect::<Result<_>>()?;
    let proj: Vec<GRMatrix> = (0..=top)
        .map(|i| {
            let id = GRMatrix::identity(g, c.rank(i));
            if i == p || i == p + 1 {
                hcat(&id, &GRMatrix::zeros(g, c.rank(i), f))
            } else {
                Ok(id)
            }
        })
        .collect::<Result<_>>()?;
    let inclusion = ChainMap::new(c, &after, incl)?;
    let projection = ChainMap::new(&after, c, proj)?;
    let hom: Vec<GRMatrix> = (0..top)
        .map(|i| {
            if i == p {
                let zero_tl = GRMatrix::zeros(g, c.rank(p + 1), c.rank(p));
                GRMatrix::block(
                    &zero_tl,
                    &GRMatrix::zeros(g, c.rank(p + 1), f),
                    &GRMatrix::zeros(g, f, c.rank(p)),
                    &iso_inv,
                )
            } else {
                Ok(GRMatrix::zeros(g, after.rank(i + 1), after.rank(i)))
            }
        })
        .collect::<Result<_>>()?;
    let round_trip = compose_chain_maps(&inclusion, &projection)?;
    let homotopy = ChainHomotopy::new(&ChainMap::identity(&after), &round_trip, hom)?;
    Ok(SimpleMove { position, rank: f, iso: iso.clone(), before: c.clone(), after, inclusion, projection, homotopy })
}

/// Removes a trailing elementary block of rank `rank` from degrees
/// `position + 1` and `position`. The block must be visible: the last `rank`
/// basis elements in both degrees are joined by an invertible matrix and
/// meet nothing else.
pub fn collapse_move(c: &ChainComplex, position: usize, rank: usize) -> Result<SimpleMove> {
    let top = c.top_degree();
    let p = position;
    if p >= top {
        return Err(Error::InvalidArgument(format!("move position {p} needs 0 <= position < {top}")));
    }
    let (lo, hi) = (c.rank(p), c.rank(p + 1));
    if rank > lo || rank > hi {
        return Err(Error::InvalidArgument(format!("no room for a rank {rank} block at position {p}")));
    }
    let (lo0, hi0) = (lo - rank, hi - rank);
    let d = c.differential(p + 1);
    let iso = d.submatrix(lo0, rank, hi0, rank);
    let no_block = || Error::InvalidArgument(format!("no elementary block of rank {rank} at position {p}"));
    if !d.submatrix(lo0, rank, 0, hi0).is_zero() || !d.submatrix(0, lo0, hi0, rank).is_zero() {
        return Err(no_block());
    }
    if p + 2 <= top && !c.differential(p + 2).submatrix(hi0, rank, 0, c.rank(p + 2)).is_zero() {
        return Err(no_block());
    }
    if p >= 1 && !c.differential(p).submatrix(0, c.rank(p - 1), lo0, rank).is_zero() {
        return Err(no_block());
    }
    let mut ranks = c.ranks().to_vec();
    ranks[p] = lo0;
    ranks[p + 1] = hi0;
    let diffs = (1..=top)
        .map(|i| {
            let d = c.differential(i);
            d.submatrix(0, ranks[i - 1], 0, ranks[i])
        })
        .collect();
    let mut before = ChainComplex::new(c.group(), ranks, diffs)?;
    if let Some(gens) = c.generators() {
        let bottom = gens.bottom[..before.rank(0)].to_vec();
        let top_gen = gens.top[..before.rank(top)].to_vec();
        before = before.with_generators(Generators { top: top_gen, bottom })?;
    }
    let mv = expand_move(&before, p, &iso).map_err(|_| no_block())?;
    if !same_differentials(&mv.after, c) {
        return Err(no_block());
    }
    Ok(mv)
}

/// Expands with an identity block, or collapses a trailing block, of rank
/// `rank` at `position`. For a collapse the returned move's `before` is the
/// smaller complex.
pub fn simple_move(c: &ChainComplex, position: usize, rank: usize, direction: MoveDirection) -> Result<SimpleMove> {
    match direction {
        MoveDirection::Expand => expand_move(c, position, &GRMatrix::identity(c.group(), rank)),
        MoveDirection::Collapse => collapse_move(c, position, rank),
    }
}

/// One entry of the pipeline's move log.
#[derive(Debug, Clone, Serialize)]
pub struct MoveRecord {
    pub step: usize,
    pub position: usize,
    pub rank: usize,
    pub iso: &'static str,
    /// Ranks after the move, top degree first.
    pub ranks_after: Vec<usize>,
    pub verified: bool,
}

#[derive(Debug, Clone)]
pub struct Stage6 {
    pub input: ChainComplex,
    pub complex: ChainComplex,
    pub moves: Vec<SimpleMove>,
    pub log: Vec<MoveRecord>,
    /// `input -> complex`.
    pub inclusion: ChainMap,
    /// `complex -> input`.
    pub projection: ChainMap,
}

/// Runs the five simple homotopy moves that prepare an algebraic 5-complex
/// for the dual form.
///
/// With `c_i` the input ranks the moves add, in order: `c_0` at degrees 5/4,
/// `c_5` at 1/0, `c_1 + c_5` at 4/3, `c_4 + c_0` at 2/1 (all identity blocks),
/// and finally an identity `theta` of rank `c_2 + c_4 + c_0` at 3/2. The last
/// rank also equals `c_3 + c_1 + c_5` because the Euler characteristic is 0.
pub fn to_dual_form_stage6(c: &ChainComplex) -> Result<Stage6> {
    let rep = is_alg5(c);
    if !rep.member() {
        return Err(Error::NotAlg5(rep.failures().join(", ")));
    }
    let input = with_computed_generators(c)?;
    let r = input.ranks().to_vec();
    let theta = r[2] + r[4] + r[0];
    if theta != r[3] + r[1] + r[5] {
        return Err(Error::Verification("theta block is not square although chi = 0".into()));
    }
    let plan = [
        (4, r[0], "identity"),
        (0, r[5], "identity"),
        (3, r[1] + r[5], "identity"),
        (1, r[4] + r[0], "identity"),
        (2, theta, "theta"),
    ];
    let mut current = input.clone();
    let mut inclusion = ChainMap::identity(&input);
    let mut projection = ChainMap::identity(&input);
    let mut moves = Vec::new();
    let mut log = Vec::new();
    for (step, &(position, rank, iso)) in plan.iter().enumerate() {
        let mv = simple_move(&current, position, rank, MoveDirection::Expand)?;
        inclusion = compose_chain_maps(&mv.inclusion, &inclusion)?;
        projection = compose_chain_maps(&projection, &mv.projection)?;
        current = mv.after.clone();
        log.push(MoveRecord {
            step: step + 1,
            position,
            rank,
            iso,
            ranks_after: current.ranks().iter().rev().copied().collect(),
            verified: mv.verify(),
        });
        moves.push(mv);
    }
    Ok(Stage6 { input, complex: current, moves, log, inclusion, projection })
}

/// A view of a complex in dual form.
#[derive(Debug, Clone)]
pub struct DualFormView {
    pub base: ChainComplex,
    pub d1: GRMatrix,
    pub d2: GRMatrix,
    /// `F_2^* -> F_2`.
    pub d3: GRMatrix,
    /// Z-rank of `J = ker(d_2)`.
    pub j_rank: usize,
    /// Z-rank of the image of `d_3`.
    pub form_rank: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DualFormSummary {
    pub ranks: Vec<usize>,
    pub j_rank: usize,
    pub j_rank_residue: usize,
    pub form_rank: usize,
    pub d3: Vec<Vec<String>>,
}

impl DualFormView {
    pub fn summary(&self) -> DualFormSummary {
        let n = self.base.group().order();
        DualFormSummary {
            ranks: self.base.ranks().iter().rev().copied().collect(),
            j_rank: self.j_rank,
            j_rank_residue: self.j_rank % n,
            form_rank: self.form_rank,
            d3: matrix_strings(&self.d3),
        }
    }
}

/// Recognizes the dual-form shape. The error explains the first mismatch.
pub fn recognize_dual_form(c: &ChainComplex) -> Result<DualFormView> {
    let fail = |s: String| Err(Error::NotDualForm(s));
    if c.top_degree() != 5 {
        return fail(format!("length {} instead of 6", c.top_degree() + 1));
    }
    let r = c.ranks();
    if r[5] != r[0] || r[4] != r[1] || r[3] != r[2] {
        return fail(format!("ranks {:?} are not symmetric", r.iter().rev().collect::<Vec<_>>()));
    }
    let d1 = c.differential(1).clone();
    let d2 = c.differential(2).clone();
    let d3 = c.differential(3).clone();
    if *c.differential(5) != d1.dual() {
        let w = (c.differential(5) - &d1.dual()).first_nonzero().expect("nonzero difference");
        return fail(format!("d5 differs from d1* at ({}, {})", w.0, w.1));
    }
    if *c.differential(4) != d2.dual() {
        let w = (c.differential(4) - &d2.dual()).first_nonzero().expect("nonzero difference");
        return fail(format!("d4 differs from d2* at ({}, {})", w.0, w.1));
    }
    if !d2.compose(&d3)?.is_zero() || !d3.compose(&d2.dual())?.is_zero() {
        return fail("d3 does not factor through J*".into());
    }
    let n = c.group().order();
    let j_rank = n * r[2] - rank(&d2.expand());
    let form_rank = rank(&d3.expand());
    Ok(DualFormView { base: c.clone(), d1, d2, d3, j_rank, form_rank })
}

/// True iff `d3^* = -d3`, i.e. the form on `J` is antisymmetric.
pub fn asd_check(v: &DualFormView) -> bool {
    v.d3.dual() == -&v.d3
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionReport {
    pub group_order_even: bool,
    pub h3_free_rank: usize,
    pub j_rank: usize,
    pub form_rank: usize,
    /// `j_rank mod |G|`.
    pub j_rank_congruence: usize,
    /// `h3_free_rank == j_rank - form_rank`.
    pub cross_check: bool,
    /// No antisymmetric dual form can exist.
    pub obstructed: bool,
}

/// Parity obstruction: over a group of even order an antisymmetric form
/// would need a nondegenerate antisymmetric pairing on a lattice of odd rank
/// whenever the free part of `H_3` of the cover has even rank.
pub fn obstruction_check(v: &DualFormView) -> Result<ObstructionReport> {
    let n = v.base.group().order();
    let h3 = homology(&v.base, 3, Coefficients::Integral)?.free_rank;
    let group_order_even = n.is_multiple_of(2);
    Ok(ObstructionReport {
        group_order_even,
        h3_free_rank: h3,
        j_rank: v.j_rank,
        form_rank: v.form_rank,
        j_rank_congruence: v.j_rank % n,
        cross_check: v.j_rank >= v.form_rank && h3 == v.j_rank - v.form_rank,
        obstructed: group_order_even && h3 % 2 == 0,
    })
}

/// Result of bringing a duality map to the shape `(1, 1, theta_1, theta_2, -1, -1)`
/// (degrees 0 to 5).
#[derive(Debug, Clone)]
pub struct NormalizedDuality {
    /// The input map, after the global sign adjustment.
    pub phi: ChainMap,
    pub negated: bool,
    pub psi: ChainMap,
    pub theta1: GRMatrix,
    pub theta2: GRMatrix,
    /// Between `psi` and `phi`.
    pub homotopy: ChainHomotopy,
    pub homotopy_report: HomotopyReport,
    pub psi_failures: Vec<Residue>,
    /// `d3 theta_2 = theta_1 d3^*`.
    pub central_square: bool,
    /// Traces of `aug(theta_1)` and `aug(theta_2)` reduced mod `|G|`.
    pub theta_traces: (BigInt, BigInt),
}

impl NormalizedDuality {
    pub fn verified(&self) -> bool {
        self.psi_failures.is_empty() && self.homotopy_report.verified() && self.central_square
    }

    pub fn summary(&self) -> NormalizedSummary {
        NormalizedSummary {
            negated: self.negated,
            theta1: matrix_strings(&self.theta1),
            theta2: matrix_strings(&self.theta2),
            homotopy: self.homotopy.components.iter().map(matrix_strings).collect(),
            psi_is_chain_map: self.psi_failures.is_empty(),
            homotopy_verified: self.homotopy_report.verified(),
            central_square: self.central_square,
            theta_traces_mod_order: [self.theta_traces.0.to_string(), self.theta_traces.1.to_string()],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizedSummary {
    pub negated: bool,
    pub theta1: Vec<Vec<String>>,
    pub theta2: Vec<Vec<String>>,
    /// Homotopy components `I_0..I_4`.
    pub homotopy: Vec<Vec<Vec<String>>>,
    pub psi_is_chain_map: bool,
    pub homotopy_verified: bool,
    pub central_square: bool,
    pub theta_traces_mod_order: [String; 2],
}

fn trace_mod(m: &IntegerMatrix, n: usize) -> BigInt {
    let t: BigInt = (0..m.rows().min(m.cols())).map(|i| m.get(i, i).clone()).sum();
    let n = BigInt::from(n);
    ((t % &n) + &n) % &n
}

fn lift(a: &GRMatrix, b: &GRMatrix, name: &str) -> Result<GRMatrix> {
    solve_gr_linear(a, b)?.ok_or_else(|| Error::NoLift(format!("{name} (the complex is not exact where required)")))
}

/// Replaces a duality map `phi: C^* -> C` of a dual form by a homotopic map
/// that is `1` in degrees 0 and 1 and `-1` in degrees 4 and 5.
///
/// `phi` must induce `(x, y) = (1, -1)` on the ends; `(-1, 1)` is accepted
/// and handled by negating `phi`.
pub fn normalize_duality(v: &DualFormView, phi: &ChainMap) -> Result<NormalizedDuality> {
    let base = &v.base;
    if !same_differentials(&phi.target, base) || !same_differentials(&phi.source, &dualize_complex(base)) {
        return Err(Error::InvalidArgument("phi must map the dual complex to the complex".into()));
    }
    let rep = is_chain_map(phi);
    if let Some(w) = rep.failures.first() {
        return Err(Error::Verification(format!("phi is not a chain map: degree {} entry ({}, {}) = {}", w.degree, w.row, w.col, w.value)));
    }
    let (x, y) = end_scalars(phi)?;
    let one = BigInt::one();
    let (phi, negated) = if x == one && y == -&one {
        (phi.clone(), false)
    } else if x == -&one && y == one {
        (phi.negate(), true)
    } else {
        return Err(Error::EndScalars { x: x.to_string(), y: y.to_string() });
    };

    let g = base.group();
    let (d1, d2) = (&v.d1, &v.d2);
    let id = |k: usize| GRMatrix::identity(g, k);
    let r = base.ranks();
    let f = &phi.components;

    let i0 = lift(d1, &(&id(r[0]) - &f[0]), "I_0")?;
    let i1 = lift(d2, &(&(&id(r[1]) - &f[1]) - &i0.compose(d1)?), "I_1")?;
    let i4s = lift(d1, &(&(-id(r[0])) - &f[5].dual()), "I_4")?;
    let i3s = lift(d2, &(&(&(-id(r[1])) - &f[4].dual()) - &i4s.compose(d1)?), "I_3")?;
    let (i4, i3) = (i4s.dual(), i3s.dual());
    let i2 = GRMatrix::zeros(g, r[3], r[2]);

    let theta1 = &f[2] + &i1.compose(d2)?;
    let theta2 = &f[3] + &d2.dual().compose(&i3)?;
    let psi = ChainMap::new(
        &phi.source,
        &phi.target,
        vec![id(r[0]), id(r[1]), theta1.clone(), theta2.clone(), -id(r[4]), -id(r[5])],
    )?;
    let psi_failures = is_chain_map(&psi).failures;
    let homotopy = ChainHomotopy::new(&psi, &phi, vec![i0, i1, i2, i3, i4])?;
    let homotopy_report = verify_homotopy(&homotopy);
    let central_square = v.d3.compose(&theta2)? == theta1.compose(&v.d3.dual())?;
    let n = g.order();
    let theta_traces = (trace_mod(&theta1.augment(), n), trace_mod(&theta2.augment(), n));
    Ok(NormalizedDuality {
        phi,
        negated,
        psi,
        theta1,
        theta2,
        homotopy,
        homotopy_report,
        psi_failures,
        central_square,
        theta_traces,
    })
}

/// A three-term piece `S_2 --d2--> S_1 --d1--> S_0` with an optional
/// augmentation functional on `S_0` (same encoding as bottom generators).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub d1: GRMatrix,
    pub d2: GRMatrix,
    pub augmentation: Option<Vec<BigInt>>,
}

impl Segment {
    pub fn new(d1: GRMatrix, d2: GRMatrix, augmentation: Option<Vec<BigInt>>) -> Result<Self> {
        if d1.cols() != d2.rows() {
            return Err(Error::Shape(format!("segment maps {:?} and {:?} do not compose", d1.shape(), d2.shape())));
        }
        if augmentation.as_ref().is_some_and(|a| a.len() != d1.rows()) {
            return Err(Error::Shape("augmentation length differs from the rank of S_0".into()));
        }
        Ok(Self { d1, d2, augmentation })
    }

    pub fn ranks(&self) -> [usize; 3] {
        [self.d1.rows(), self.d1.cols(), self.d2.cols()]
    }
}

/// Degrees 2, 1, 0 of a length-6 complex, augmented by the bottom generator.
pub fn tail_segment(c: &ChainComplex) -> Result<Segment> {
    if c.top_degree() != 5 {
        return Err(Error::Shape("segments are taken from length-6 complexes".into()));
    }
    let gens = end_generators(c)?;
    Segment::new(c.differential(1).clone(), c.differential(2).clone(), Some(gens.bottom))
}

/// Duals of degrees 3, 4, 5 of a length-6 complex, augmented by the top
/// generator.
pub fn dual_head_segment(c: &ChainComplex) -> Result<Segment> {
    if c.top_degree() != 5 {
        return Err(Error::Shape("segments are taken from length-6 complexes".into()));
    }
    let gens = end_generators(c)?;
    Segment::new(c.differential(5).dual(), c.differential(4).dual(), Some(gens.top))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IsoStrategy {
    Identity,
    Schanuel,
    Search,
}

/// Mutually inverse chain isomorphisms `h: tail -> head`, `k: head -> tail`.
#[derive(Debug, Clone)]
pub struct SegmentIso {
    pub h: [GRMatrix; 3],
    pub k: [GRMatrix; 3],
    pub strategy: IsoStrategy,
    /// Candidates tried.
    pub attempts: usize,
}

/// Checks that `h` and `k` are inverse chain maps respecting the
/// augmentations up to sign.
pub fn verify_segment_iso(tail: &Segment, head: &Segment, h: &[GRMatrix; 3], k: &[GRMatrix; 3]) -> std::result::Result<(), String> {
    let (rt, rh) = (tail.ranks(), head.ranks());
    for i in 0..3 {
        if h[i].shape() != (rh[i], rt[i]) || k[i].shape() != (rt[i], rh[i]) {
            return Err(format!("degree {i}: wrong shapes"));
        }
    }
    let sq = |a: &GRMatrix, b: &GRMatrix, c: &GRMatrix, d: &GRMatrix| -> bool {
        matches!((a.compose(b), c.compose(d)), (Ok(x), Ok(y)) if x == y)
    };
    if !sq(&head.d1, &h[1], &h[0], &tail.d1) || !sq(&head.d2, &h[2], &h[1], &tail.d2) {
        return Err("h does not commute with the differentials".into());
    }
    if !sq(&tail.d1, &k[1], &k[0], &head.d1) || !sq(&tail.d2, &k[2], &k[1], &head.d2) {
        return Err("k does not commute with the differentials".into());
    }
    for i in 0..3 {
        let hk = h[i].compose(&k[i]).map_err(|e| e.to_string())?;
        let kh = k[i].compose(&h[i]).map_err(|e| e.to_string())?;
        if !hk.is_identity() || !kh.is_identity() {
            return Err(format!("degree {i}: h and k are not inverse"));
        }
    }
    if let (Some(at), Some(ah)) = (&tail.augmentation, &head.augmentation) {
        if augmentation_sign(at, ah, &h[0]).is_none() {
            return Err("h_0 does not respect the augmentations".into());
        }
    }
    Ok(())
}

/// `s` with `ah . aug(h0) = s * at`, `s = +-1`.
fn augmentation_sign(at: &[BigInt], ah: &[BigInt], h0: &GRMatrix) -> Option<i8> {
    let row = IntegerMatrix::from_entries(1, ah.len(), ah.to_vec()).ok()?;
    let pulled = row.checked_mul(&h0.augment()).ok()?.row(0);
    if pulled == at {
        Some(1)
    } else if pulled.iter().zip(at).all(|(p, a)| *p == -a) {
        Some(-1)
    } else {
        None
    }
}

/// `[[a, 1 - a b], [-1, b]]` and its inverse `[[b, b a - 1], [1, a]]`.
fn schanuel_pair(a: &GRMatrix, b: &GRMatrix) -> Result<(GRMatrix, GRMatrix)> {
    let g = a.group();
    let ab = a.compose(b)?;
    let ba = b.compose(a)?;
    let phi = GRMatrix::block(a, &(&GRMatrix::identity(g, ab.rows()) - &ab), &(-GRMatrix::identity(g, a.cols())), b)?;
    let psi = GRMatrix::block(b, &(&ba - &GRMatrix::identity(g, ba.rows())), &GRMatrix::identity(g, a.cols()), a)?;
    Ok((phi, psi))
}

/// Block sizes of a segment of the form
/// `P (+) [Y -1-> Y] (+) [W -1-> W] (+) [V -> 0]`, i.e.
/// `S_0 = P_0 Y`, `S_1 = P_1 Y W`, `S_2 = P_2 W V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Layout {
    p: [usize; 3],
    y: usize,
    w: usize,
    v: usize,
}

fn matches_layout(s: &Segment, l: &Layout) -> bool {
    let [p0, p1, p2] = l.p;
    let (y, w, v) = (l.y, l.w, l.v);
    let r = s.ranks();
    if p0 + y != r[0] || p1 + y + w != r[1] || p2 + w + v != r[2] {
        return false;
    }
    let (d1, d2) = (&s.d1, &s.d2);
    let id = |m: &GRMatrix| m.is_identity();
    d1.submatrix(0, p0, p1, y + w).is_zero()
        && d1.submatrix(p0, y, 0, p1).is_zero()
        && id(&d1.submatrix(p0, y, p1, y))
        && d1.submatrix(p0, y, p1 + y, w).is_zero()
        && d2.submatrix(0, p1, p2, w + v).is_zero()
        && d2.submatrix(p1, y, 0, r[2]).is_zero()
        && d2.submatrix(p1 + y, w, 0, p2).is_zero()
        && id(&d2.submatrix(p1 + y, w, p2, w))
        && d2.submatrix(p1 + y, w, p2 + w, v).is_zero()
}

/// Integer vector `u` with `c . u = 1`.
fn unit_dual(c: &[BigInt]) -> Option<Vec<BigInt>> {
    if c.is_empty() {
        return None;
    }
    let row = IntegerMatrix::from_entries(1, c.len(), c.to_vec()).ok()?;
    let rhs = IntegerMatrix::from_rows(&[vec![1i64]]);
    solve_integer(&row, &rhs).ok().flatten().map(|u| u.column(0))
}

fn outer(u: &[BigInt], c: &[BigInt]) -> IntegerMatrix {
    let entries = u.iter().flat_map(|a| c.iter().map(move |b| a * b)).collect();
    IntegerMatrix::from_entries(u.len(), c.len(), entries).expect("shape")
}

/// Builds the iterated Schanuel isomorphism for a matching pair of layouts.
fn schanuel_iso(tail: &Segment, lt: &Layout, head: &Segment, lh: &Layout) -> Result<Option<([GRMatrix; 3], [GRMatrix; 3])>> {
    let g = tail.d1.group();
    let (Some(at), Some(ah)) = (&tail.augmentation, &head.augmentation) else {
        return Ok(None);
    };
    let [p0, p1, p2] = lt.p;
    let [q0, q1, q2] = lh.p;
    if at[p0..].iter().any(|c| !c.is_zero()) || ah[q0..].iter().any(|c| !c.is_zero()) {
        return Ok(None);
    }
    let (cp, cq) = (&at[..p0], &ah[..q0]);
    let (Some(u), Some(w)) = (unit_dual(cq), unit_dual(cp)) else {
        return Ok(None);
    };
    // degree 0: lifts of the augmentations through each other
    let a0 = GRMatrix::from_integer(g, &outer(&u, cp));
    let b0 = GRMatrix::from_integer(g, &outer(&w, cq));
    let (h0, k0) = schanuel_pair(&a0, &b0)?;

    // degree 1
    let pd1 = tail.d1.submatrix(0, p0, 0, p1);
    let qd1 = head.d1.submatrix(0, q0, 0, q1);
    let sigma1 = h0.compose(&GRMatrix::direct_sum(&pd1, &GRMatrix::identity(g, lt.y))?)?;
    let tau1 = GRMatrix::direct_sum(&qd1, &GRMatrix::identity(g, lh.y))?;
    let (Some(a1), Some(b1)) = (solve_gr_linear(&tau1, &sigma1)?, solve_gr_linear(&sigma1, &tau1)?) else {
        return Ok(None);
    };
    let (h1, k1) = schanuel_pair(&a1, &b1)?;

    // degree 2
    let sigma2 = h1.compose(&tail.d2.submatrix(0, tail.d2.rows(), 0, p2 + lt.w))?;
    let tau2 = head.d2.submatrix(0, head.d2.rows(), 0, q2 + lh.w);
    let (Some(a2), Some(b2)) = (solve_gr_linear(&tau2, &sigma2)?, solve_gr_linear(&sigma2, &tau2)?) else {
        return Ok(None);
    };
    let (h2, k2) = schanuel_pair(&a2, &b2)?;
    let shapes_ok = [(&h0, 0), (&h1, 1), (&h2, 2)]
        .iter()
        .all(|(m, i)| m.shape() == (head.ranks()[*i], tail.ranks()[*i]));
    Ok(shapes_ok.then_some(([h0, h1, h2], [k0, k1, k2])))
}

/// Enumerates integer vectors of length `m` by increasing max-norm, up to
/// `max_norm`.
struct SmallVectors {
    m: usize,
    max_norm: i64,
    norm: i64,
    current: Option<Vec<i64>>,
}

impl SmallVectors {
    fn new(m: usize, max_norm: i64) -> Self {
        Self { m, max_norm, norm: 0, current: Some(vec![0; m]) }
    }

    fn advance(v: &mut [i64], l: i64) -> bool {
        for x in v.iter_mut().rev() {
            if *x < l {
                *x += 1;
                return true;
            }
            *x = -l;
        }
        false
    }
}

impl Iterator for SmallVectors {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        loop {
            let out = self.current.clone()?;
            let l = self.norm;
            let mut v = out.clone();
            if self.m > 0 && Self::advance(&mut v, l) {
                self.current = Some(v);
            } else if self.norm < self.max_norm && self.m > 0 {
                self.norm += 1;
                self.current = Some(vec![-self.norm; self.m]);
            } else {
                self.current = None;
            }
            if out.iter().map(|x| x.abs()).max().unwrap_or(0) == l {
                return Some(out);
            }
        }
    }
}

const SEARCH_MAX_NORM: i64 = 2;

/// Solutions of `a X = b`: a particular one plus small kernel combinations
/// in each column.
fn lift_candidates<'a>(a: &GRMatrix, b: &GRMatrix) -> Result<Option<impl Iterator<Item = GRMatrix> + 'a>> {
    let Some(x0) = solve_gr_linear(a, b)? else {
        return Ok(None);
    };
    let g = a.group().clone();
    let n = g.order();
    let kernel: Vec<Vec<GroupRingElement>> = kernel_basis(&a.expand())
        .into_iter()
        .map(|v| {
            v.chunks(n)
                .map(|c| GroupRingElement::from_coeffs(&g, c.to_vec()).expect("block length"))
                .collect()
        })
        .collect();
    let cols = x0.cols();
    let params = cols * kernel.len();
    Ok(Some(SmallVectors::new(params, SEARCH_MAX_NORM).map(move |c| {
        let mut x = x0.clone();
        for (k, &coef) in c.iter().enumerate() {
            if coef == 0 {
                continue;
            }
            let (j, b) = (k / kernel.len(), k % kernel.len());
            let s = BigInt::from(coef);
            for (i, e) in kernel[b].iter().enumerate() {
                x.set(i, j, x.get(i, j) + &e.scale(&s));
            }
        }
        x
    })))
}

fn search_iso(tail: &Segment, head: &Segment, budget: usize, attempts: &mut usize) -> Result<Option<SegmentIso>> {
    let g = tail.d1.group();
    let r0 = tail.ranks()[0];
    for sign in [1i64, -1] {
        let h0 = GRMatrix::scalar(g, r0, &GroupRingElement::from_int(g, sign));
        if let (Some(at), Some(ah)) = (&tail.augmentation, &head.augmentation) {
            if augmentation_sign(at, ah, &h0).is_none() {
                continue;
            }
        }
        let Some(c1) = lift_candidates(&head.d1, &h0.compose(&tail.d1)?)? else {
            continue;
        };
        for h1 in c1 {
            if *attempts >= budget {
                return Ok(None);
            }
            *attempts += 1;
            let Some(k1) = h1.inverse()? else { continue };
            let Some(c2) = lift_candidates(&head.d2, &h1.compose(&tail.d2)?)? else {
                continue;
            };
            for h2 in c2 {
                if *attempts >= budget {
                    return Ok(None);
                }
                *attempts += 1;
                let Some(k2) = h2.inverse()? else { continue };
                let k0 = h0.clone();
                let h = [h0.clone(), h1.clone(), h2];
                let k = [k0, k1.clone(), k2];
                if verify_segment_iso(tail, head, &h, &k).is_ok() {
                    return Ok(Some(SegmentIso { h, k, strategy: IsoStrategy::Search, attempts: *attempts }));
                }
            }
        }
    }
    Ok(None)
}

/// Looks for an explicit chain isomorphism `tail -> head`.
///
/// Tries, in order: the identity; the iterated Schanuel construction for
/// every block layout in which both segments are a resolution piece plus
/// elementary summands; a budgeted search over lifts. `Ok(None)` only means
/// nothing was found within `budget` candidate maps.
pub fn solve_chain_isomorphism(tail: &Segment, head: &Segment, budget: usize) -> Result<Option<SegmentIso>> {
    if tail.ranks() != head.ranks() {
        return Err(Error::Shape(format!("segment ranks {:?} and {:?} differ", tail.ranks(), head.ranks())));
    }
    let g = tail.d1.group();
    let mut attempts = 1;
    if tail.d1 == head.d1 && tail.d2 == head.d2 {
        let id: [GRMatrix; 3] = tail.ranks().map(|r| GRMatrix::identity(g, r));
        if verify_segment_iso(tail, head, &id, &id).is_ok() {
            return Ok(Some(SegmentIso { h: id.clone(), k: id, strategy: IsoStrategy::Identity, attempts }));
        }
    }

    let [t0, t1, t2] = tail.ranks();
    for y in 0..=t0 {
        for w in 0..=(t1 - y) {
            for v in 0..=(t2 - w) {
                let lt = Layout { p: [t0 - y, t1 - y - w, t2 - w - v], y, w, v };
                if !matches_layout(tail, &lt) {
                    continue;
                }
                // the head layout is forced by the tail one
                let [p0, p1, p2] = lt.p;
                let (x, q0) = (p0, y);
                let z = p1 + q0;
                let Some(q1) = t1.checked_sub(x + z) else { continue };
                let Some(q2) = v.checked_sub(z) else { continue };
                if w != q1 + x || t2 != q2 + z + p2 + w {
                    continue;
                }
                let lh = Layout { p: [q0, q1, q2], y: x, w: z, v: p2 + w };
                if !matches_layout(head, &lh) {
                    continue;
                }
                attempts += 1;
                if let Some((h, k)) = schanuel_iso(tail, &lt, head, &lh)? {
                    if verify_segment_iso(tail, head, &h, &k).is_ok() {
                        return Ok(Some(SegmentIso { h, k, strategy: IsoStrategy::Schanuel, attempts }));
                    }
                }
            }
        }
    }
    search_iso(tail, head, budget, &mut attempts)
}

/// A dual-form complex chain isomorphic to its source.
#[derive(Debug, Clone)]
pub struct AssembledDualForm {
    pub complex: ChainComplex,
    pub view: DualFormView,
    /// `source -> complex`: identity in degrees 0..2, `h^*` above.
    pub forward: ChainMap,
    /// `complex -> source`.
    pub backward: ChainMap,
}

impl AssembledDualForm {
    /// Transports a duality map of the source to one of the dual form:
    /// `F phi F^*`.
    pub fn transport(&self, phi: &ChainMap) -> Result<ChainMap> {
        let inner = compose_chain_maps(phi, &dual_chain_map(&self.forward))?;
        compose_chain_maps(&self.forward, &inner)
    }
}

/// Conjugates the top half of `c6` by the dual of `iso` so that the outer
/// differentials become `d1^*` and `d2^*`. The middle one becomes
/// `d3 k_2^*`.
pub fn assemble_dual_form(c6: &ChainComplex, iso: &SegmentIso) -> Result<AssembledDualForm> {
    let tail = tail_segment(c6)?;
    let head = dual_head_segment(c6)?;
    verify_segment_iso(&tail, &head, &iso.h, &iso.k).map_err(Error::Verification)?;
    let g = c6.group();
    let r = c6.ranks();
    let ranks = vec![r[0], r[1], r[2], r[2], r[1], r[0]];
    let d1 = c6.differential(1).clone();
    let d2 = c6.differential(2).clone();
    let d3 = c6.differential(3).compose(&iso.k[2].dual())?;
    let complex = ChainComplex::new(g, ranks, vec![d1.clone(), d2.clone(), d3, d2.dual(), d1.dual()])?;
    let gens = end_generators(c6)?;
    let top_col = IntegerMatrix::from_entries(gens.top.len(), 1, gens.top.clone())?;
    let top = iso.h[0].augment().transpose().checked_mul(&top_col)?.column(0);
    let complex = complex.with_generators(Generators { top, bottom: gens.bottom.clone() })?;

    let id = |k: usize| GRMatrix::identity(g, k);
    let forward = ChainMap::new(
        c6,
        &complex,
        vec![id(r[0]), id(r[1]), id(r[2]), iso.h[2].dual(), iso.h[1].dual(), iso.h[0].dual()],
    )?;
    let backward = ChainMap::new(
        &complex,
        c6,
        vec![id(r[0]), id(r[1]), id(r[2]), iso.k[2].dual(), iso.k[1].dual(), iso.k[0].dual()],
    )?;
    for m in [&forward, &backward] {
        if let Some(w) = is_chain_map(m).failures.first() {
            return Err(Error::Verification(format!("conjugation is not a chain map in degree {}", w.degree)));
        }
    }
    let view = recognize_dual_form(&complex)?;
    Ok(AssembledDualForm { complex, view, forward, backward })
}
