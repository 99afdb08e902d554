mod common;

use common::*;
use gaia_core::exact_oracle::{default_window, propagate_exact, PropagatorConfig};
use gaia_core::gaia_lzsm::{
    basis_state, destructive_condition, propagate_lzsm, schedule, solve_destructive, theta_lzsm, zeta,
};
use gaia_core::linalg::max_abs_diff;
use gaia_core::{build_lzsm, build_spin_boson, CMat, GaiaError, TwoBand};
use num_complex::Complex64;
use std::f64::consts::PI;

#[test]
fn zeta_at_half_period_for_equal_offsets() {
    let m = spin_boson(0.1, 0.2, 10.0, 4);
    let c = gaia_core::gaia_lzsm::crossing(&m, 0, 5, 1).unwrap();
    assert!((c.time - PI).abs() < 1e-15);
    let z = zeta(&m, 0, 5, 1).unwrap();
    assert!((z - (-c.lambda.signum() * 4.0 * 10.0)).abs() < 1e-12);
}

#[test]
fn one_period_holds_two_crossings_per_equal_offset_pair() {
    let m = spin_boson(0.1, 0.2, 10.0, 2);
    let sched = schedule(&m, 2).unwrap();
    for k in 0..5 {
        let count = sched.crossings().filter(|c| c.i == k && c.j == 5 + k).count();
        assert_eq!(count, 2);
    }
    let times: Vec<f64> = sched.crossings().map(|c| c.time).collect();
    assert!(sched.groups.iter().all(|g| g.crossings.windows(2).all(|w| w[0].time <= w[1].time)));
    assert!(times.iter().all(|t| (m.start_time()..=m.start_time() + 2.0 * PI).contains(t)));
}

#[test]
fn reference_time_drops_out_after_full_periods() {
    let m = spin_boson(0.1, 0.2, 10.0, 4);
    let shifted = m.clone().with_reference_time(0.731);
    let (_, s0) = propagate_lzsm(&m, &basis_state(10, 0), 4).unwrap();
    let (_, s1) = propagate_lzsm(&shifted, &basis_state(10, 0), 4).unwrap();
    let d = (s0.probabilities() - s1.probabilities()).abs().max();
    assert!(d < 1e-12, "{d}");
}

#[test]
fn zero_coupling_is_identity_for_any_length() {
    let m = build_spin_boson(0.0, 0.0, 0.3, 1.0, 10.0, 4, 9).unwrap();
    for k in [0, 1, 9] {
        let (_, s) = propagate_lzsm(&m, &basis_state(8, 0), k).unwrap();
        assert_eq!(s.into_matrix(), CMat::identity(8, 8));
    }
}

#[test]
fn unnormalised_state_is_rejected() {
    let m = spin_boson(0.1, 0.2, 10.0, 2);
    let psi = basis_state(10, 0) * Complex64::new(2.0, 0.0);
    assert!(matches!(propagate_lzsm(&m, &psi, 2), Err(GaiaError::InvalidConfig(_))));
    assert!(matches!(propagate_lzsm(&m, &basis_state(4, 0), 2), Err(GaiaError::ShapeMismatch { .. })));
}

#[test]
fn pairs_that_never_cross_are_rejected_only_when_coupled() {
    let coupled = CMat::from_element(2, 2, Complex64::new(0.2, 0.0));
    let r = build_lzsm(2, 1.0, 5.0, vec![-1.5, 1.5], coupled, 2);
    assert!(matches!(r, Err(GaiaError::RealityViolation { .. })));
    let mut b = CMat::from_element(2, 2, Complex64::new(0.2, 0.0));
    b[(0, 1)] = Complex64::new(0.0, 0.0);
    b[(1, 0)] = Complex64::new(0.0, 0.0);
    let m = build_lzsm(2, 1.0, 5.0, vec![-1.5, 1.5], b, 2).unwrap();
    assert_eq!(m.coupled_pairs(), vec![(0, 2), (1, 3)]);
    assert!(matches!(theta_lzsm(&m, 0, 3, 0), Err(GaiaError::RealityViolation { .. })));
}

#[test]
fn destructive_condition_needs_two_boson_levels() {
    let m = build_spin_boson(0.1, 0.1, 0.2, 1.0, 10.0, 1, 2).unwrap();
    assert!(matches!(destructive_condition(&m, 1e-3), Err(GaiaError::UnsupportedModel(_))));
}

#[test]
fn solutions_are_rechecked_and_fragile() {
    let family = |eta: f64| build_spin_boson(0.1, 0.1, 0.2, 1.0, eta, 5, 2);
    let loose = 0.13;
    let sols = solve_destructive(&family, (10.0, 11.0), loose, 101).unwrap();
    assert!(!sols.is_empty());
    for &eta in &sols {
        let r = destructive_condition(&family(eta).unwrap(), loose).unwrap();
        assert!(r.holds);
        let off = destructive_condition(&family(1.05 * eta).unwrap(), loose).unwrap();
        assert!(!off.holds);
        assert!(off.s11.norm() < 1.0);
    }
}

#[test]
fn weak_coupling_trace_follows_oracle() {
    let m = spin_boson(0.02, 1.0, 10.0, 6);
    let (gaia, _) = propagate_lzsm(&m, &basis_state(10, 0), 6).unwrap();
    let cfg = PropagatorConfig::new(default_window(&m)).with_tolerance(1e-9).with_samples(gaia.times.clone());
    let exact = propagate_exact(&m, &cfg).unwrap();
    for (g, e) in gaia.probabilities.iter().zip(&exact.probabilities) {
        let d = g.iter().zip(e).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(d < 0.05, "{d}");
    }
}

#[test]
fn full_product_matches_stepwise_states() {
    let m = spin_boson(0.1, 1.0, 10.0, 6);
    let psi = basis_state(10, 3);
    let (trace, s) = propagate_lzsm(&m, &psi, 6).unwrap();
    let last = trace.states.last().unwrap();
    let direct = s.matrix() * &psi;
    let d = max_abs_diff(&CMat::from_column_slice(10, 1, last.as_slice()), &CMat::from_column_slice(10, 1, direct.as_slice()));
    assert!(d < 1e-15);
    assert_eq!(m.dim(), 10);
}
