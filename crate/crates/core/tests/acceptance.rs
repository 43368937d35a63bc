//! One line per acceptance criterion; the test fails if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use dualform_core::complex::{
    end_scalars, euler_characteristic, homology_all, is_alg5, is_chain_map, ChainComplex, Coefficients,
};
use dualform_core::dual_form::{
    assemble_dual_form, asd_check, dual_head_segment, normalize_duality, obstruction_check, recognize_dual_form,
    solve_chain_isomorphism, tail_segment, to_dual_form_stage6, DualFormView,
};
use dualform_core::group::{parse_cyclic, GroupRingElement};
use dualform_core::intmat::AbelianGroupInfo;
use dualform_core::lens::{asd_unit, lens_asd_transform, lens_complex, lens_duality_map};
use num_bigint::BigInt;
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn names(v: &[AbelianGroupInfo]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn lens_homology() -> Outcome {
    let mut slowest = Duration::ZERO;
    for n in [2usize, 3, 4, 5, 8, 9, 13, 25] {
        let start = Instant::now();
        let a = lens_complex(n).map_err(|e| e.to_string())?;
        let tri = names(&homology_all(&a, Coefficients::Trivial).map_err(|e| e.to_string())?);
        let int = names(&homology_all(&a, Coefficients::Integral).map_err(|e| e.to_string())?);
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        let zn = format!("Z/{n}");
        ensure(tri == ["Z", zn.as_str(), "0", zn.as_str(), "0", "Z"], || format!("n={n}: trivial {tri:?}"))?;
        ensure(int == ["Z", "0", "0", "0", "0", "Z"], || format!("n={n}: integral {int:?}"))?;
        ensure(elapsed < Duration::from_secs(1), || format!("n={n}: took {elapsed:?}"))?;
    }
    Ok(format!("8 orders, slowest {slowest:?}"))
}

fn duality_map() -> Outcome {
    for n in 2..=50 {
        let phi = lens_duality_map(n).map_err(|e| e.to_string())?;
        let rep = is_chain_map(&phi);
        ensure(rep.is_chain_map(), || format!("n={n}: {:?}", rep.failures.first()))?;
        let xy = end_scalars(&phi).map_err(|e| e.to_string())?;
        ensure(xy == (BigInt::from(1), BigInt::from(-1)), || format!("n={n}: end scalars {xy:?}"))?;
    }
    Ok("n = 2..50, (x, y) = (1, -1)".into())
}

fn asd_forms() -> Outcome {
    for k in 1..=6usize {
        let n = 4 * k + 1;
        let u = asd_unit(n).map_err(|e| e.to_string())?;
        let ids = u.identities();
        ensure(ids.all(), || format!("n={n}: {ids:?}"))?;
        let t = lens_asd_transform(n).map_err(|e| e.to_string())?;
        ensure(t.asd, || format!("n={n}: A' not antisymmetric"))?;
        ensure(t.f_is_chain_map, || format!("n={n}: f is not a chain map"))?;
        ensure(t.homotopy_report.verified(), || format!("n={n}: {:?}", t.homotopy_report.failures.first()))?;
        ensure(t.homotopy.support() == 1, || format!("n={n}: homotopy has {} components", t.homotopy.support()))?;
        let g = t.x.group().clone();
        ensure(&t.unit.alpha * &t.x == &t.unit.beta - &GroupRingElement::one(&g), || format!("n={n}: alpha x != beta - 1"))?;
    }
    let b = asd_unit(5).map_err(|e| e.to_string())?.beta;
    let expected = parse_cyclic(b.group(), "1 + t - t^3").map_err(|e| e.to_string())?;
    ensure(b == expected, || format!("beta(5) = {b}"))?;
    Ok("k = 1..6, beta(5) = 1 + t - t^3".into())
}

fn view(c: &ChainComplex) -> Result<DualFormView, String> {
    recognize_dual_form(c).map_err(|e| e.to_string())
}

fn obstruction() -> Outcome {
    let (mut even, mut asd) = (0, 0);
    for n in 2..=50usize {
        let rep = obstruction_check(&view(&lens_complex(n).map_err(|e| e.to_string())?)?).map_err(|e| e.to_string())?;
        ensure(rep.cross_check, || format!("n={n}: H_3 cross-check failed"))?;
        if n % 2 == 0 {
            ensure(rep.obstructed, || format!("n={n}: not obstructed"))?;
            even += 1;
        }
        if n % 4 == 1 && n >= 5 {
            ensure(!rep.obstructed, || format!("n={n}: obstructed"))?;
            let t = lens_asd_transform(n).map_err(|e| e.to_string())?;
            let rep2 = obstruction_check(&view(&t.a_prime)?).map_err(|e| e.to_string())?;
            ensure(!rep2.obstructed && asd_check(&view(&t.a_prime)?), || format!("n={n}: A' inconsistent"))?;
            asd += 1;
        }
    }
    Ok(format!("{even} even orders obstructed, {asd} orders 4k+1 free"))
}

/// `lens(n)` with the basis of `F_1` changed by a unit.
fn twisted(n: usize, u: &str) -> Result<ChainComplex, String> {
    let c = lens_complex(n).map_err(|e| e.to_string())?;
    let g = c.group().clone();
    let u = dualform_core::GRMatrix::single(&parse_cyclic(&g, u).map_err(|e| e.to_string())?);
    let inv = u.inverse().map_err(|e| e.to_string())?.ok_or("not a unit")?;
    let mut d = c.differentials().to_vec();
    d[0] = d[0].compose(&u).map_err(|e| e.to_string())?;
    d[1] = inv.compose(&d[1]).map_err(|e| e.to_string())?;
    ChainComplex::new(&g, vec![1; 6], d).map_err(|e| e.to_string())
}

fn rank_congruence() -> Outcome {
    let mut forms: Vec<(String, DualFormView)> = Vec::new();
    for n in 2..=50usize {
        forms.push((format!("lens({n})"), view(&lens_complex(n).map_err(|e| e.to_string())?)?));
    }
    for k in 1..=6usize {
        let t = lens_asd_transform(4 * k + 1).map_err(|e| e.to_string())?;
        forms.push((format!("A'({})", 4 * k + 1), view(&t.a_prime)?));
    }
    for n in [3usize, 4, 5] {
        let st = to_dual_form_stage6(&lens_complex(n).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        forms.push((format!("stage6(lens({n}))"), view(&st.complex)?));
    }
    for (n, u) in [(3usize, "-t"), (5, "1 + t - t^3"), (9, "t^4")] {
        let st = to_dual_form_stage6(&twisted(n, u)?).map_err(|e| e.to_string())?;
        let tail = tail_segment(&st.complex).map_err(|e| e.to_string())?;
        let head = dual_head_segment(&st.complex).map_err(|e| e.to_string())?;
        let iso = solve_chain_isomorphism(&tail, &head, 100).map_err(|e| e.to_string())?.ok_or("no isomorphism")?;
        let asm = assemble_dual_form(&st.complex, &iso).map_err(|e| e.to_string())?;
        forms.push((format!("assembled(twisted {n})"), asm.view));
    }
    for (name, v) in &forms {
        let order = v.base.group().order();
        ensure(v.j_rank % order == order - 1, || format!("{name}: j_rank {} mod {order}", v.j_rank))?;
    }
    Ok(format!("{} recognized dual forms", forms.len()))
}

fn pipeline() -> Outcome {
    for n in [3usize, 4, 5] {
        let a = lens_complex(n).map_err(|e| e.to_string())?;
        let st = to_dual_form_stage6(&a).map_err(|e| e.to_string())?;
        let c6 = &st.complex;
        ensure(c6.ranks() == [2, 4, 6, 6, 4, 2], || format!("n={n}: ranks {:?}", c6.ranks()))?;
        ensure(euler_characteristic(c6) == 0, || format!("n={n}: chi != 0"))?;
        ensure(is_alg5(c6).member(), || format!("n={n}: {:?}", is_alg5(c6).failures()))?;
        ensure(st.log.iter().all(|m| m.verified), || format!("n={n}: a move failed to verify"))?;
        for coeffs in [Coefficients::Integral, Coefficients::Trivial] {
            let before = homology_all(&a, coeffs).map_err(|e| e.to_string())?;
            let after = homology_all(c6, coeffs).map_err(|e| e.to_string())?;
            ensure(before == after, || format!("n={n} {coeffs:?}: {:?} vs {:?}", names(&before), names(&after)))?;
        }
    }
    Ok("n = 3, 4, 5".into())
}

fn almost_ones() -> Outcome {
    for n in 2..=20usize {
        let a = lens_complex(n).map_err(|e| e.to_string())?;
        let v = view(&a)?;
        let nd = normalize_duality(&v, &lens_duality_map(n).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(nd.psi_failures.is_empty(), || format!("n={n}: psi is not a chain map"))?;
        ensure(nd.homotopy_report.verified(), || format!("n={n}: {:?}", nd.homotopy_report.failures.first()))?;
        ensure(nd.central_square, || format!("n={n}: central square fails"))?;
        let c = &nd.psi.components;
        ensure(c[0].is_identity() && c[1].is_identity(), || format!("n={n}: low components"))?;
        ensure((-&c[4]).is_identity() && (-&c[5]).is_identity(), || format!("n={n}: high components"))?;
    }
    Ok("n = 2..20".into())
}

fn run_property<S: Strategy>(name: &str, strategy: S, body: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config { cases: 1000, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, body).map_err(|e| format!("{name}: {e}"))
}

fn property_suites() -> Outcome {
    run_property("involution", common::elements3(), common::check_involution)?;
    run_property("dual contravariance", common::composable(), common::check_dual_contravariance)?;
    run_property("expansion", common::composable(), common::check_expand_multiplicative)?;
    run_property("smith form", common::int_matrix(6, 20), common::check_snf)?;
    run_property("solve", common::solvable_system(), common::check_solve)?;
    Ok("5 suites x 1000 cases".into())
}

fn antisymmetric() -> Outcome {
    run_property("antisymmetric rank", common::odd_antisymmetric(), common::check_antisymmetric_rank)?;
    Ok("1000 matrices".into())
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 9] = [
        ("lens homology", lens_homology),
        ("duality map end scalars", duality_map),
        ("antisymmetric lens forms for n = 4k+1", asd_forms),
        ("parity obstruction", obstruction),
        ("rank of J is -1 mod |G|", rank_congruence),
        ("pipeline invariance", pipeline),
        ("duality normalization", almost_ones),
        ("algebra property suites", property_suites),
        ("odd antisymmetric matrices", antisymmetric),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} ({ms} ms)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} ({ms} ms)", i + 1);
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
