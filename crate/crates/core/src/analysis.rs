//! Four-level closed forms, interference zeros, and GAIA-versus-oracle tables.

use crate::error::{GaiaError, Result};
use crate::exact_oracle::{default_window, propagate_exact, PropagatorConfig};
use crate::gaia_grid::{gaia_validity_margin, kappa_grid, lz_probability, smatrix_grid, theta_grid, VALIDITY_THRESHOLD};
use crate::gaia_lzsm::{basis_state, propagate_lzsm};
use crate::linalg::{CMat, SMatrix};
use crate::models::{GridModel, LzsmModel, TwoBand};
use crate::special::arg_gamma_one_minus_i;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Couplings and offset gap of the symmetric four-level grid model:
/// b(0,2) = b(1,3) = Δ, b(0,3) = b(1,2) = γ, a_1 − a_0 = a > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourLevel {
    pub delta: Complex64,
    pub gamma: Complex64,
    pub gap: f64,
}

pub fn four_level(model: &GridModel) -> Result<FourLevel> {
    let shape = |found: String| GaiaError::ShapeMismatch {
        expected: "N = 2 grid with b13 = b24, b14 = b23 and a2 > a1".into(),
        found,
    };
    if model.n() != 2 {
        return Err(shape(format!("N = {}", model.n())));
    }
    let b = model.couplings();
    if b[(0, 0)] != b[(1, 1)] || b[(0, 1)] != b[(1, 0)] {
        return Err(shape(format!("b = {b}")));
    }
    let gap = model.offset(1) - model.offset(0);
    if !(gap > 0.0) {
        return Err(shape(format!("a = {:?}", model.offsets())));
    }
    Ok(FourLevel { delta: b[(0, 0)], gamma: b[(0, 1)], gap })
}

/// α̃⁺ = √(1−p)e^{iθ} and α̃⁻ = −√(1−p)e^{−iθ} of one grid crossing, with √p.
fn amplitudes(model: &GridModel, i: usize, j: usize) -> Result<(f64, Complex64, Complex64)> {
    let kappa = kappa_grid(model, i, j)?;
    let p = lz_probability(kappa);
    let q = (1.0 - p).max(0.0).sqrt();
    let theta = if kappa == 0.0 { 0.0 } else { theta_grid(model, i, j)?.0 };
    Ok((p.sqrt(), Complex64::from_polar(q, theta), -Complex64::from_polar(q, -theta)))
}

/// The four-level S-matrix written out entry by entry.
pub fn s4_closed_form(model: &GridModel) -> Result<SMatrix> {
    four_level(model)?;
    let (r13, a13p, a13m) = amplitudes(model, 0, 2)?;
    let (r14, a14p, a14m) = amplitudes(model, 0, 3)?;
    let (r23, a23p, a23m) = amplitudes(model, 1, 2)?;
    let (r24, a24p, a24m) = amplitudes(model, 1, 3)?;
    let re = |x: f64| Complex64::new(x, 0.0);
    let zero = re(0.0);
    let rows = [
        [re(r14 * r13), zero, -a13p, -a14p * r13],
        [
            a24p * a14m * r23 + a23p * a13m * r14,
            re(r23 * r24),
            -a23p * r13,
            -a24p * r23 * r14 - a23p * a13m * a14p,
        ],
        [
            -a23m * a24p * a14m - a13m * r23 * r14,
            -a23m * r24,
            re(r23 * r13),
            a24p * a23m * r14 + a13m * a14p * r23,
        ],
        [-a14m * r24, -a24m, zero, re(r24 * r14)],
    ];
    Ok(SMatrix::from_matrix(CMat::from_fn(4, 4, |r, c| rows[r][c])))
}

/// Two-path decomposition of the probability of reaching level 3 from level 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceReport {
    pub p_a: f64,
    pub p_b: f64,
    pub kappa_delta: f64,
    pub kappa_gamma: f64,
    /// Relative phase of the two paths, not reduced modulo 2π.
    pub phase: f64,
    pub p34: f64,
}

impl InterferenceReport {
    pub fn from_parts(p_a: f64, p_b: f64, phase: f64) -> f64 {
        p_a + p_b + 2.0 * (p_a * p_b).sqrt() * phase.cos()
    }
}

pub fn p34(model: &GridModel) -> Result<InterferenceReport> {
    let fl = four_level(model)?;
    let v = model.v();
    let kd = fl.delta.norm_sqr() / (2.0 * v);
    let kg = fl.gamma.norm_sqr() / (2.0 * v);
    let (pd, pg) = (lz_probability(kd), lz_probability(kg));
    let p_a = pg * (1.0 - pd) * (1.0 - pg);
    let p_b = (1.0 - pg) * (1.0 - pd) * pg;
    let x = model.eta() * fl.gap * fl.gap / (2.0 * v);
    let phase = 2.0 * (arg_gamma_one_minus_i(kg) - arg_gamma_one_minus_i(kd))
        + 2.0 * (fl.gamma.arg() - fl.delta.arg())
        + x
        + 2.0 * (kg - kd) * x.ln();
    let p34 = InterferenceReport::from_parts(p_a, p_b, phase).clamp(0.0, 1.0);
    Ok(InterferenceReport { p_a, p_b, kappa_delta: kd, kappa_gamma: kg, phase, p34 })
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn golden_min(f: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..200 {
        if hi - lo <= 1e-14 * lo.abs().max(hi.abs()).max(1.0) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// P₃₄ below this counts as a zero.
pub const ZERO_FLOOR: f64 = 1e-10;

/// Parameter values in the sweep at which P₃₄ vanishes.
///
/// The phase is bracketed on consecutive sweep points against odd multiples
/// of π, and P₃₄ is then minimised by golden section inside the bracket.
/// Minima above `ZERO_FLOOR` (unequal path weights) are dropped.
pub fn p34_zeros(family: &(dyn Fn(f64) -> Result<GridModel> + Sync), sweep: &[f64]) -> Result<Vec<f64>> {
    if sweep.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(GaiaError::InvalidConfig("sweep must be strictly increasing".into()));
    }
    let phases: Vec<f64> = sweep.par_iter().map(|&x| Ok(p34(&family(x)?)?.phase)).collect::<Result<_>>()?;
    let branch = |ph: f64| ((ph - PI) / (2.0 * PI)).floor();
    let p = |x: f64| -> Result<f64> { Ok(p34(&family(x)?)?.p34) };
    let mut zeros = Vec::new();
    for k in 0..sweep.len().saturating_sub(1) {
        let (b0, b1) = (branch(phases[k]), branch(phases[k + 1]));
        if b0 == b1 {
            continue;
        }
        // several odd multiples in one cell: split it so each sub-bracket holds one
        let m = (b1 - b0).abs() as usize;
        let (lo, hi) = (sweep[k], sweep[k + 1]);
        let mut last = None;
        for s in 0..m {
            let target = PI + 2.0 * PI * (b0.min(b1) + 1.0 + s as f64);
            let g = |x: f64| -> Result<f64> { Ok(p34(&family(x)?)?.phase - target) };
            let root = bisect(&g, lo, hi)?;
            let h = ((hi - lo) / (4 * m) as f64).max(1e-12 * root.abs());
            let (x, val) = golden_min(&p, (root - h).max(lo), (root + h).min(hi))?;
            let (x, val) = if p(root)? < val { (root, p(root)?) } else { (x, val) };
            if val <= ZERO_FLOOR && last != Some(x) {
                zeros.push(x);
                last = Some(x);
            }
        }
    }
    Ok(zeros)
}

fn bisect(g: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut glo = g(lo)?;
    if glo == 0.0 {
        return Ok(lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-10 * mid.abs().max(1e-300) {
            break;
        }
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if (gm < 0.0) == (glo < 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Oracle settings shared by the comparison pipelines.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSettings {
    pub tolerance: f64,
    pub max_steps: usize,
    /// Overrides the default window when set.
    pub window: Option<(f64, f64)>,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings {
            tolerance: crate::exact_oracle::DEFAULT_TOLERANCE,
            max_steps: crate::exact_oracle::DEFAULT_MAX_STEPS,
            window: None,
        }
    }
}

/// GAIA and oracle probabilities out of one initial level at one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub parameter: f64,
    pub p_gaia: Vec<f64>,
    pub p_exact: Vec<f64>,
    /// max_i |p_gaia[i] − p_exact[i]|
    pub diff: f64,
    pub margin: f64,
    /// Margin below the independence threshold.
    pub red_region: bool,
}

fn max_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

pub fn compare_grid(model: &GridModel, initial: usize, oracle: &OracleSettings) -> Result<CompareRow> {
    if initial >= model.dim() {
        return Err(GaiaError::InvalidConfig(format!("initial level {initial} outside 0..{}", model.dim())));
    }
    let p_gaia = smatrix_grid(model)?.column_probabilities(initial);
    let window = oracle.window.unwrap_or_else(|| default_window(model));
    let cfg = PropagatorConfig::new(window)
        .with_tolerance(oracle.tolerance)
        .with_max_steps(oracle.max_steps)
        .with_initial_level(initial);
    let p_exact = propagate_exact(model, &cfg)?.final_probabilities(initial);
    let margin = gaia_validity_margin(model);
    Ok(CompareRow {
        parameter: f64::NAN,
        diff: max_diff(&p_gaia, &p_exact),
        p_gaia,
        p_exact,
        margin,
        red_region: margin < VALIDITY_THRESHOLD,
    })
}

/// Compares GAIA with the oracle at every sweep value, in sweep order.
/// Model construction failures abort; per-point oracle failures are kept.
pub fn compare_gaia_oracle(
    family: &(dyn Fn(f64) -> Result<GridModel> + Sync),
    sweep: &[f64],
    initial: usize,
    oracle: &OracleSettings,
) -> Result<Vec<(f64, Result<CompareRow>)>> {
    let models: Vec<GridModel> = sweep.iter().map(|&x| family(x)).collect::<Result<_>>()?;
    Ok(sweep
        .par_iter()
        .zip(models.par_iter())
        .map(|(&x, m)| {
            let row = compare_grid(m, initial, oracle).map(|mut r| {
                r.parameter = x;
                r
            });
            (x, row)
        })
        .collect())
}

/// GAIA and oracle probabilities at one trace sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub time: f64,
    pub p_gaia: Vec<f64>,
    pub p_exact: Vec<f64>,
    pub diff: f64,
}

/// Traces of the driven model out of `initial`, sampled at passage boundaries.
pub fn compare_lzsm(model: &LzsmModel, initial: usize, oracle: &OracleSettings) -> Result<Vec<TraceRow>> {
    let dim = model.dim();
    if initial >= dim {
        return Err(GaiaError::InvalidConfig(format!("initial level {initial} outside 0..{dim}")));
    }
    let (gaia, _) = propagate_lzsm(model, &basis_state(dim, initial), model.n_crossings())?;
    let times = gaia.times.clone();
    let window = oracle.window.unwrap_or_else(|| default_window(model));
    let cfg = PropagatorConfig::new(window)
        .with_tolerance(oracle.tolerance)
        .with_max_steps(oracle.max_steps)
        .with_initial_level(initial)
        .with_samples(times.clone());
    let exact = propagate_exact(model, &cfg)?;
    Ok(times
        .into_iter()
        .zip(gaia.probabilities)
        .zip(exact.probabilities)
        .map(|((time, g), e)| TraceRow { time, diff: max_diff(&g, &e), p_gaia: g, p_exact: e })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::models::build_grid;
    use std::f64::consts::SQRT_2;

    fn s4(delta: f64, gamma: f64, a: f64, eta: f64) -> GridModel {
        let b = CMat::from_fn(2, 2, |r, c| Complex64::new(if r == c { delta } else { gamma }, 0.0));
        build_grid(2, 1.0, eta, vec![0.0, a], b).unwrap()
    }

    #[test]
    fn closed_form_matches_product() {
        for a in [15.0, 17.3, 30.0] {
            let m = s4(0.5, 1.0, a, 1.3);
            let closed = s4_closed_form(&m).unwrap();
            let prod = smatrix_grid(&m).unwrap();
            assert!(max_abs_diff(closed.matrix(), prod.matrix()) < 1e-12);
            assert_eq!(closed.entry(0, 1), Complex64::new(0.0, 0.0));
            assert_eq!(closed.entry(3, 2), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn uncoupled_closed_form_is_identity() {
        let s = s4_closed_form(&s4(0.0, 0.0, 3.0, 1.0)).unwrap();
        assert_eq!(s.into_matrix(), CMat::identity(4, 4));
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let m = build_grid(1, 1.0, 1.0, vec![0.0], CMat::from_element(1, 1, Complex64::new(1.0, 0.0))).unwrap();
        assert!(matches!(s4_closed_form(&m), Err(GaiaError::ShapeMismatch { .. })));
        let b = CMat::from_fn(2, 2, |r, c| Complex64::new((r + 2 * c) as f64, 0.0));
        let m = build_grid(2, 1.0, 1.0, vec![0.0, 1.0], b).unwrap();
        assert!(matches!(p34(&m), Err(GaiaError::ShapeMismatch { .. })));
    }

    #[test]
    fn interference_matches_product_entry() {
        for a in [14.2, 20.0, 33.3] {
            let m = s4(0.5, 1.0, a, 1.0);
            let r = p34(&m).unwrap();
            assert!((r.kappa_delta - 0.125).abs() < 1e-15 && (r.kappa_gamma - 0.5).abs() < 1e-15);
            assert!((r.p_a - r.p_b).abs() < 1e-16);
            let prod = smatrix_grid(&m).unwrap().probability(2, 3);
            assert!((r.p34 - prod).abs() < 1e-10, "{} vs {prod}", r.p34);
            assert!((InterferenceReport::from_parts(r.p_a, r.p_b, r.phase) - r.p34).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_kappas_give_quadratic_phase() {
        let r = p34(&s4(0.7, 0.7, 4.0, 1.0)).unwrap();
        assert!((r.phase - 8.0).abs() < 1e-14);
    }

    #[test]
    fn zeros_are_zeros() {
        let fam = |x: f64| Ok(s4(0.5, 1.0, x, 1.0));
        let sweep: Vec<f64> = (0..=400).map(|k| 10.0 * SQRT_2 + k as f64 * (40.0 - 10.0 * SQRT_2) / 400.0).collect();
        let zeros = p34_zeros(&fam, &sweep).unwrap();
        assert!(zeros.len() > 20, "{}", zeros.len());
        for z in zeros {
            assert!(p34(&fam(z).unwrap()).unwrap().p34 < ZERO_FLOOR);
        }
    }

    #[test]
    fn single_point_sweep_has_no_zeros() {
        let fam = |x: f64| Ok(s4(0.5, 1.0, x, 1.0));
        assert!(p34_zeros(&fam, &[20.0]).unwrap().is_empty());
        assert!(p34_zeros(&fam, &[]).unwrap().is_empty());
    }

    #[test]
    fn uncoupled_comparison_has_zero_diff() {
        let fam = |x: f64| Ok(s4(0.0, 0.0, x, 1.0));
        let rows = compare_gaia_oracle(&fam, &[5.0, 8.0], 3, &OracleSettings::default()).unwrap();
        for (_, r) in rows {
            assert!(r.unwrap().diff < 1e-14);
        }
    }
}
