use dualform_core::complex::{
    compose_chain_maps, dual_chain_map, end_scalars, homology_all, is_alg5, is_chain_map, ChainComplex, ChainMap,
    Coefficients,
};
use dualform_core::dual_form::{
    assemble_dual_form, dual_head_segment, normalize_duality, obstruction_check, recognize_dual_form,
    solve_chain_isomorphism, tail_segment, to_dual_form_stage6, IsoStrategy,
};
use dualform_core::group::parse_cyclic;
use dualform_core::io::{read_complex, write_complex};
use dualform_core::lens::{lens_complex, lens_duality_map};
use dualform_core::GRMatrix;
use num_bigint::BigInt;

/// `lens(n)` with `F_1` rebased by the unit `u`, and the chain isomorphism
/// from `lens(n)`.
fn twisted(n: usize, u: &str) -> (ChainComplex, ChainMap) {
    let a = lens_complex(n).unwrap();
    let g = a.group().clone();
    let u = GRMatrix::single(&parse_cyclic(&g, u).unwrap());
    let inv = u.inverse().unwrap().unwrap();
    let mut d = a.differentials().to_vec();
    d[0] = d[0].compose(&u).unwrap();
    d[1] = inv.compose(&d[1]).unwrap();
    let c = ChainComplex::new(&g, vec![1; 6], d).unwrap();
    let id = || GRMatrix::identity(&g, 1);
    let t = ChainMap::new(&a, &c, vec![id(), inv, id(), id(), id(), id()]).unwrap();
    (c, t)
}

fn conjugate(t: &ChainMap, phi: &ChainMap) -> ChainMap {
    compose_chain_maps(t, &compose_chain_maps(phi, &dual_chain_map(t)).unwrap()).unwrap()
}

#[test]
fn twisted_lens_reaches_a_normalized_dual_form() {
    for (n, u) in [(5usize, "1 + t - t^3"), (7, "t^3"), (4, "-t")] {
        let (c, t) = twisted(n, u);
        assert!(is_chain_map(&t).is_chain_map());
        assert!(recognize_dual_form(&c).is_err(), "twisted complex should not be in dual form");
        let phi = conjugate(&t, &lens_duality_map(n).unwrap());
        assert!(is_chain_map(&phi).is_chain_map());

        let st = to_dual_form_stage6(&c).unwrap();
        let phi6 = conjugate(&st.inclusion, &phi);
        let iso = solve_chain_isomorphism(&tail_segment(&st.complex).unwrap(), &dual_head_segment(&st.complex).unwrap(), 50)
            .unwrap()
            .expect("isomorphism");
        assert_eq!(iso.strategy, IsoStrategy::Schanuel);
        let asm = assemble_dual_form(&st.complex, &iso).unwrap();
        assert!(is_alg5(&asm.complex).member());
        for coeffs in [Coefficients::Integral, Coefficients::Trivial] {
            assert_eq!(homology_all(&asm.complex, coeffs).unwrap(), homology_all(&c, coeffs).unwrap());
        }

        let phi_d = asm.transport(&phi6).unwrap();
        let rep = is_chain_map(&phi_d);
        assert!(rep.is_chain_map());
        let (x, y) = end_scalars(&phi_d).unwrap();
        assert_eq!(x.clone() * &y, BigInt::from(-1), "n={n}: end scalars ({x}, {y})");

        let nd = normalize_duality(&asm.view, &phi_d).unwrap();
        assert!(nd.verified(), "n={n}");
        let obs = obstruction_check(&asm.view).unwrap();
        assert!(obs.cross_check);
        assert_eq!(obs.obstructed, n % 2 == 0);
    }
}

#[test]
fn files_round_trip_through_the_pipeline() {
    let (c, _) = twisted(5, "1 + t - t^3");
    let st = to_dual_form_stage6(&c).unwrap();
    let text = write_complex(&st.complex);
    let back = read_complex(&text).unwrap();
    assert_eq!(back, st.complex);
    assert_eq!(write_complex(&back), text);
}
