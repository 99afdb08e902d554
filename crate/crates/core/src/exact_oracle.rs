//! Reference propagator: exponential-midpoint stepping with step-doubling
//! error control, U ← exp(−i·h·H(t + h/2))·U.

use crate::error::{GaiaError, Result};
use crate::linalg::{expm_hermitian, hermiticity_residual, max_abs_diff, CMat, SMatrix};
use crate::models::{GridModel, Hamiltonian, LzsmModel, TwoBand};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_STEPS: usize = 50_000_000;

/// LZ transition width in τ = √(ηv)·t units, times the safety factor.
const WINDOW_WIDTHS: f64 = 20.0;
const WINDOW_SAFETY: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorConfig {
    /// (t_I, t_F); t_F < t_I propagates backwards.
    pub window: (f64, f64),
    /// Local error target per step, max-norm on the step propagator.
    pub tolerance: f64,
    pub max_steps: usize,
    /// Times at which probabilities are recorded; must lie inside the window.
    pub sample_times: Vec<f64>,
    /// Initial diabatic level for the recorded probabilities.
    pub initial_level: usize,
    pub initial_step: Option<f64>,
}

impl PropagatorConfig {
    pub fn new(window: (f64, f64)) -> Self {
        PropagatorConfig {
            window,
            tolerance: DEFAULT_TOLERANCE,
            max_steps: DEFAULT_MAX_STEPS,
            sample_times: Vec::new(),
            initial_level: 0,
            initial_step: None,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn with_samples(mut self, times: Vec<f64>) -> Self {
        self.sample_times = times;
        self
    }

    pub fn with_initial_level(mut self, level: usize) -> Self {
        self.initial_level = level;
        self
    }

    pub fn with_max_steps(mut self, steps: usize) -> Self {
        self.max_steps = steps;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationTrace {
    pub times: Vec<f64>,
    /// Diabatic probabilities at each sample time.
    pub probabilities: Vec<Vec<f64>>,
    /// U(t_F, t_I).
    pub propagator: CMat,
    pub steps: usize,
}

impl PropagationTrace {
    pub fn smatrix(&self) -> SMatrix {
        SMatrix::from_matrix(self.propagator.clone())
    }

    pub fn final_probabilities(&self, initial: usize) -> Vec<f64> {
        (0..self.propagator.nrows()).map(|r| self.propagator[(r, initial)].norm_sqr()).collect()
    }
}

/// Window rule shared by the oracle and the AIA quadrature.
pub trait DefaultWindow {
    fn default_window(&self) -> (f64, f64);
}

impl DefaultWindow for GridModel {
    /// [t_first − m, t_last + m] with m = 5·20·max(1, √κ_max)/√(ηv).
    fn default_window(&self) -> (f64, f64) {
        let sched = self.crossing_schedule();
        let first = sched.first().map_or(0.0, |c| c.time);
        let last = sched.last().map_or(0.0, |c| c.time);
        let kmax = self
            .pairs()
            .into_iter()
            .map(|(i, j)| self.coupling(i, j).norm_sqr() / (2.0 * self.v()))
            .fold(0.0f64, f64::max);
        let m = WINDOW_SAFETY * WINDOW_WIDTHS * kmax.sqrt().max(1.0) / (self.eta() * self.v()).sqrt();
        (first - m, last + m)
    }
}

impl DefaultWindow for LzsmModel {
    /// From the drive maximum before the first group through `n_crossings` groups.
    fn default_window(&self) -> (f64, f64) {
        let b = self.group_boundaries(self.n_crossings());
        (b[0], *b.last().unwrap())
    }
}

pub fn default_window<M: DefaultWindow>(model: &M) -> (f64, f64) {
    model.default_window()
}

fn step_propagator<H: Hamiltonian + ?Sized>(model: &H, t: f64, h: f64, buf: &mut CMat) -> CMat {
    model.fill(t + 0.5 * h, buf);
    expm_hermitian(buf, h)
}

pub fn propagate_exact<H: Hamiltonian + ?Sized>(model: &H, config: &PropagatorConfig) -> Result<PropagationTrace> {
    let dim = model.dim();
    let (t_i, t_f) = config.window;
    if !(config.tolerance > 0.0) || !t_i.is_finite() || !t_f.is_finite() || t_i == t_f {
        return Err(GaiaError::InvalidConfig(format!(
            "need a non-empty finite window and positive tolerance, got {:?}, tol {}",
            config.window, config.tolerance
        )));
    }
    if config.initial_level >= dim {
        return Err(GaiaError::InvalidConfig(format!("initial level {} outside 0..{dim}", config.initial_level)));
    }
    let dir = (t_f - t_i).signum();
    let (lo, hi) = if dir > 0.0 { (t_i, t_f) } else { (t_f, t_i) };
    if let Some(t) = config.sample_times.iter().find(|t| **t < lo || **t > hi) {
        return Err(GaiaError::InvalidConfig(format!("sample time {t} outside the window")));
    }
    let mut buf = CMat::zeros(dim, dim);
    model.fill(t_i, &mut buf);
    let herm = hermiticity_residual(&buf);
    let scale = buf.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    if herm > 1e-12 * scale {
        return Err(GaiaError::NonHermitianInput { residual: herm });
    }

    let mut samples: Vec<f64> = config.sample_times.clone();
    samples.sort_by(|a, b| if dir > 0.0 { a.total_cmp(b) } else { b.total_cmp(a) });
    let mut targets = samples.clone();
    targets.push(t_f);

    let mut u = CMat::identity(dim, dim);
    let mut t = t_i;
    let mut h = config.initial_step.unwrap_or(0.01 / scale).abs();
    let mut steps = 0usize;
    let mut probabilities = Vec::with_capacity(samples.len());
    let tol = config.tolerance;

    for (idx, &target) in targets.iter().enumerate() {
        while (target - t) * dir > 0.0 {
            if steps >= config.max_steps {
                return Err(GaiaError::StepLimitExceeded { steps, time: t });
            }
            let remaining = (target - t).abs();
            let last = h >= remaining;
            let hs = if last { remaining } else { h };
            let full = step_propagator(model, t, dir * hs, &mut buf);
            let first = step_propagator(model, t, 0.5 * dir * hs, &mut buf);
            let second = step_propagator(model, t + 0.5 * dir * hs, 0.5 * dir * hs, &mut buf);
            let halves = second * first;
            let err = max_abs_diff(&full, &halves);
            steps += 1;
            let factor = if err > 0.0 { 0.9 * (tol / err).cbrt() } else { 2.0 };
            if err <= tol {
                u = halves * u;
                t = if last { target } else { t + dir * hs };
                let grown = hs * factor.clamp(0.2, 2.0);
                h = if last { h.max(grown) } else { grown };
            } else {
                h = hs * factor.clamp(0.1, 0.9);
            }
        }
        if idx < samples.len() {
            probabilities.push((0..dim).map(|r| u[(r, config.initial_level)].norm_sqr()).collect());
        }
    }
    Ok(PropagationTrace { times: samples, probabilities, propagator: u, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaia_grid::lz_probability;
    use crate::linalg::unitarity_residual;
    use crate::models::{build_grid, build_lzsm};
    use num_complex::Complex64;

    fn two_level(b: f64, eta: f64) -> GridModel {
        build_grid(1, 1.0, eta, vec![0.0], CMat::from_element(1, 1, Complex64::new(b, 0.0))).unwrap()
    }

    #[test]
    fn diagonal_hamiltonian_keeps_populations() {
        let m = build_grid(2, 1.0, 1.0, vec![0.0, 1.0], CMat::zeros(2, 2)).unwrap();
        let cfg = PropagatorConfig::new((-3.0, 3.0)).with_samples(vec![-1.0, 0.0, 2.0]).with_initial_level(2);
        let tr = propagate_exact(&m, &cfg).unwrap();
        // off-diagonal populations stay exactly zero; the phase product rounds at the ulp level
        for p in &tr.probabilities {
            assert_eq!([p[0], p[1], p[3]], [0.0; 3]);
            assert!((p[2] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn lz_survival_and_unitarity() {
        let m = two_level((2.0f64 * 0.5).sqrt(), 1.0);
        let w = default_window(&m);
        assert!((w.0 + w.1).abs() < 1e-12);
        let tr = propagate_exact(&m, &PropagatorConfig::new(w)).unwrap();
        let p = tr.final_probabilities(0)[0];
        assert!((p - lz_probability(0.5)).abs() < 0.01, "{p}");
        assert!(unitarity_residual(&tr.propagator) < 1e-9);
    }

    #[test]
    fn backward_run_undoes_forward_run() {
        let b = CMat::from_fn(2, 2, |r, c| Complex64::new(0.3 + 0.1 * r as f64, 0.2 * c as f64));
        let m = build_lzsm(2, 1.0, 3.0, vec![0.0, 0.4], b, 2).unwrap();
        let w = default_window(&m);
        let fwd = propagate_exact(&m, &PropagatorConfig::new(w)).unwrap();
        let bwd = propagate_exact(&m, &PropagatorConfig::new((w.1, w.0))).unwrap();
        let id = &bwd.propagator * &fwd.propagator;
        assert!(max_abs_diff(&id, &CMat::identity(4, 4)) < 1e-8);
    }

    #[test]
    fn step_limit_is_reported() {
        let m = two_level(0.5, 1.0);
        let cfg = PropagatorConfig::new((-10.0, 10.0)).with_max_steps(10);
        assert!(matches!(propagate_exact(&m, &cfg), Err(GaiaError::StepLimitExceeded { .. })));
    }

    #[test]
    fn lzsm_window_spans_groups() {
        let b = CMat::from_element(1, 1, Complex64::new(0.1, 0.0));
        let m = build_lzsm(1, 2.0, 1.0, vec![0.0], b, 20).unwrap();
        let (a, z) = default_window(&m);
        assert!((a - std::f64::consts::PI / 4.0).abs() < 1e-15);
        assert!((z - a - 10.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    struct Skewed;
    impl Hamiltonian for Skewed {
        fn dim(&self) -> usize {
            2
        }
        fn fill(&self, _t: f64, out: &mut CMat) {
            out.fill(Complex64::new(0.0, 0.0));
            out[(0, 1)] = Complex64::new(1.0, 0.0);
        }
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let r = propagate_exact(&Skewed, &PropagatorConfig::new((0.0, 1.0)));
        assert!(matches!(r, Err(GaiaError::NonHermitianInput { .. })));
    }
}
