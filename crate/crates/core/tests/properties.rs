mod common;

use common::*;
use gaia_core::analysis::{p34, s4_closed_form, InterferenceReport};
use gaia_core::gaia_grid::{kappa_grid, lz_probability, smatrix_grid, theta_grid, unitary_factor};
use gaia_core::gaia_lzsm::{basis_state, crossing, propagate_lzsm, step_unitary, theta_lzsm_parts};
use gaia_core::legacy_wkb::{smatrix_legacy, verify_appendix_identity, NormalizationLadder};
use gaia_core::linalg::{max_abs_diff, unitarity_residual};
use gaia_core::models::file::{model_to_json, parse_model, Model};
use gaia_core::{build_grid, CMat, TwoBand};
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_smatrix_is_unitary(seed in any::<u64>(), n in 1usize..=6) {
        let m = random_grid(&mut rng(seed), n, 2.0);
        prop_assert!(smatrix_grid(&m).unwrap().unitarity_residual() <= 1e-12);
    }

    #[test]
    fn every_factor_is_unitary(seed in any::<u64>(), n in 1usize..=4) {
        let m = random_grid(&mut rng(seed), n, 2.0);
        for (i, j) in m.pairs() {
            prop_assert!(unitarity_residual(&unitary_factor(&m, i, j).unwrap()) <= 1e-14);
        }
    }

    #[test]
    fn phase_parts_add_up(seed in any::<u64>(), n in 1usize..=4) {
        let m = random_grid(&mut rng(seed), n, 2.0);
        for (i, j) in m.pairs() {
            let (theta, parts) = theta_grid(&m, i, j).unwrap();
            prop_assert_eq!(theta, parts.total());
        }
    }

    #[test]
    fn connection_recursion_holds(seed in any::<u64>(), n in 2usize..=4) {
        let m = random_grid(&mut rng(seed), n, 1.0);
        for k in 1..2 * n {
            prop_assert!(verify_appendix_identity(&m, k).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn connection_recursion_error_scales_with_ladder(seed in any::<u64>(), n in 2usize..=4) {
        let m = random_grid(&mut rng(seed), n, 2.0);
        let ladder = NormalizationLadder::new(&m);
        let scale = (0..2 * n).flat_map(|k| ladder.step(k).to_vec()).fold(1.0f64, f64::max);
        for k in 1..2 * n {
            prop_assert!(verify_appendix_identity(&m, k).unwrap() <= 1e-13 * scale);
        }
    }

    #[test]
    fn legacy_matches_gaia_for_increasing_offsets(seed in any::<u64>(), n in 1usize..=4) {
        let m = random_grid(&mut rng(seed), n, 1.0);
        let legacy = smatrix_legacy(&m).unwrap().smatrix;
        prop_assert!(max_abs_diff(legacy.matrix(), smatrix_grid(&m).unwrap().matrix()) <= 1e-10);
    }

    #[test]
    fn two_level_survival_is_lz(b in 0.0f64..3.0, v in 0.2f64..5.0, eta in 0.1f64..10.0, a in -5.0f64..5.0) {
        let m = build_grid(1, v, eta, vec![a], CMat::from_element(1, 1, Complex64::new(b, 0.0))).unwrap();
        let kappa = kappa_grid(&m, 0, 1).unwrap();
        prop_assert!((smatrix_grid(&m).unwrap().probability(0, 0) - lz_probability(kappa)).abs() <= 1e-14);
    }

    #[test]
    fn interference_probability_is_bounded_and_consistent(x in 1.0f64..60.0, d in 0.0f64..2.0, g in 0.0f64..2.0) {
        let b = CMat::from_fn(2, 2, |r, c| Complex64::new(if r == c { d } else { g }, 0.0));
        let m = build_grid(2, 1.0, 1.0, vec![0.0, x], b).unwrap();
        let r = p34(&m).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.p34));
        prop_assert!((InterferenceReport::from_parts(r.p_a, r.p_b, r.phase).clamp(0.0, 1.0) - r.p34).abs() <= 1e-12);
        prop_assert!((r.p34 - smatrix_grid(&m).unwrap().probability(2, 3)).abs() <= 1e-10);
        let closed = s4_closed_form(&m).unwrap();
        prop_assert!(max_abs_diff(closed.matrix(), smatrix_grid(&m).unwrap().matrix()) <= 1e-12);
    }

    #[test]
    fn driven_products_are_unitary(seed in any::<u64>(), n in 1usize..=6) {
        let m = random_lzsm(&mut rng(seed), n, 2.0, 20);
        let (trace, s) = propagate_lzsm(&m, &basis_state(m.dim(), 0), 20).unwrap();
        prop_assert!(s.unitarity_residual() <= 1e-12);
        for p in &trace.probabilities {
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn step_unitaries_are_unitary(seed in any::<u64>(), n in 1usize..=4, ordinal in -3i64..6) {
        let m = random_lzsm(&mut rng(seed), n, 2.0, 4);
        for (i, j) in m.coupled_pairs() {
            let c = crossing(&m, i, j, ordinal).unwrap();
            prop_assert!(unitarity_residual(&step_unitary(&c).matrix(m.dim())) <= 1e-14);
            let parts = theta_lzsm_parts(&m, i, j, ordinal).unwrap();
            prop_assert_eq!(parts.total(), c.theta);
        }
    }

    #[test]
    fn grid_files_round_trip_bit_exactly(seed in any::<u64>(), n in 1usize..=4) {
        let model = Model::Grid(random_grid(&mut rng(seed), n, 2.0));
        let back = parse_model(&model_to_json(&model)).unwrap();
        prop_assert_eq!(back, model);
    }

    #[test]
    fn driven_files_round_trip_bit_exactly(seed in any::<u64>(), n in 1usize..=4) {
        let model = Model::Lzsm(random_lzsm(&mut rng(seed), n, 2.0, 7));
        let back = parse_model(&model_to_json(&model)).unwrap();
        prop_assert_eq!(back, model);
    }
}
