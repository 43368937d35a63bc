mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn involution_is_an_anti_automorphism(t in elements3()) {
        check_involution(t)?;
    }

    #[test]
    fn dual_is_contravariant(p in composable()) {
        check_dual_contravariance(p)?;
    }

    #[test]
    fn expansion_is_multiplicative(p in composable()) {
        check_expand_multiplicative(p)?;
    }

    #[test]
    fn smith_form_invariants(a in int_matrix(6, 20)) {
        check_snf(a)?;
    }

    #[test]
    fn solutions_are_sound(s in solvable_system()) {
        check_solve(s)?;
    }

    #[test]
    fn odd_antisymmetric_matrices_are_singular(m in odd_antisymmetric()) {
        check_antisymmetric_rank(m)?;
    }
}
