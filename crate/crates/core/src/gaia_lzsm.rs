//! GAIA for the sinusoidally driven two-band model: one unitary factor per
//! anticrossing, composed in time order across drive passages.

use crate::error::{GaiaError, Result};
use crate::gaia_grid::{group_simultaneous, lz_probability};
use crate::linalg::{apply_block_left, embed_block, CMat, CVec, SMatrix};
use crate::models::{CrossingSite, LzsmModel, PairLattice, TwoBand};
use crate::special::arg_gamma_one_minus_i;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_4, PI};

/// Default tolerance on the θ-sum residuals, in radians.
pub const DESTRUCTIVE_TOL: f64 = 1e-3;

/// One anticrossing with its LZ data and phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub i: usize,
    pub j: usize,
    pub n: i64,
    pub time: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub p: f64,
    pub theta: f64,
}

/// Additive pieces of an LZSM crossing phase; `total()` is θ.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LzsmPhase {
    pub quarter_pi: f64,
    pub arg_gamma: f64,
    pub arg_coupling: f64,
    pub zeta: f64,
    pub log_scale: f64,
    /// −Θ, the non-local contribution with its sign.
    pub nonlocal: f64,
}

impl LzsmPhase {
    pub fn total(&self) -> f64 {
        self.quarter_pi + self.arg_gamma + self.arg_coupling + self.zeta + self.log_scale + self.nonlocal
    }
}

fn site(model: &LzsmModel, i: usize, j: usize, n: i64) -> Result<(CrossingSite, PairLattice)> {
    model.check_pair(i, j)?;
    let lat = model.lattice(i, j).ok_or(GaiaError::RealityViolation {
        i,
        j,
        gap: model.offset(i) - model.offset(j),
    })?;
    let (time, lambda) = lat.ordinal(n);
    Ok((CrossingSite { i, j, n, time, lambda }, lat))
}

fn pair_kappa(model: &LzsmModel, i: usize, j: usize, lat: &PairLattice) -> f64 {
    model.coupling(i, j).norm_sqr() / lat.slope
}

/// sgn(λ)·∫_{t_R}^{t_n} (H_ii − H_jj) dt.
pub fn zeta(model: &LzsmModel, i: usize, j: usize, n: i64) -> Result<f64> {
    let (s, _) = site(model, i, j, n)?;
    Ok(zeta_at(model, i, j, s.time, s.lambda))
}

fn zeta_at(model: &LzsmModel, i: usize, j: usize, t: f64, lambda: f64) -> f64 {
    let (v, eta, t_ref) = (model.v(), model.eta(), model.reference_time());
    let da = model.offset(i) - model.offset(j);
    let integral = (2.0 / v) * ((v * t).cos() - (v * t_ref).cos()) + da * (t - t_ref);
    lambda.signum() * eta * integral
}

fn log_abs_sin(v: f64, dt: f64, pair: (usize, usize), other: (usize, usize), t: f64) -> Result<f64> {
    let s = (0.5 * v * dt).sin().abs();
    if s == 0.0 {
        return Err(GaiaError::DegenerateCrossing { first: pair, second: other, time: t });
    }
    Ok(s.ln())
}

/// Θ at crossing n of (i, j): the self term plus sgn(λ_n) times the
/// neighbour terms, each a ratio over the two slope lattices of a coupled pair.
pub fn nonlocal_lzsm(model: &LzsmModel, i: usize, j: usize, n: i64) -> Result<f64> {
    let (s, lat) = site(model, i, j, n)?;
    let v = model.v();
    let (t, sg) = (s.time, s.lambda.signum());
    let kappa = pair_kappa(model, i, j, &lat);
    let mut theta = 0.0;
    if kappa > 0.0 {
        let other = lat.base(sg < 0.0);
        let ls = log_abs_sin(v, t - other, (i, j), (i, j), t)?;
        theta += 2.0 * kappa * ((v / (2.0 * lat.slope)).ln() - ls);
    }
    let nb = model.n();
    let neighbours = (0..nb).filter(|&k| k != i).map(|k| (k, j)).chain((nb..2 * nb).filter(|&l| l != j).map(|l| (i, l)));
    let mut cross = 0.0;
    for (k, l) in neighbours {
        if model.coupling(k, l).norm_sqr() == 0.0 {
            continue;
        }
        let Some(nl) = model.lattice(k, l) else { continue };
        let kap = pair_kappa(model, k, l, &nl);
        let up = log_abs_sin(v, t - nl.rising, (i, j), (k, l), t)?;
        let down = log_abs_sin(v, t - nl.falling, (i, j), (k, l), t)?;
        cross += kap * (up - down);
    }
    Ok(theta + sg * cross)
}

/// Θ from the infinite product over crossing lattices, truncated to `periods`
/// drive periods on each side of crossing n. Exponents are +κ on crossings whose
/// slope sign matches crossing n and −κ otherwise.
pub fn nonlocal_lzsm_product(model: &LzsmModel, i: usize, j: usize, n: i64, periods: usize) -> Result<f64> {
    let (s, lat) = site(model, i, j, n)?;
    let (t, sg) = (s.time, s.lambda.signum());
    let m = periods as i64;
    let sum_over = |nl: &PairLattice, skip_self: bool| -> f64 {
        let mut acc = 0.0;
        for (base, sign) in [(nl.rising, 1.0), (nl.falling, -1.0)] {
            let centre = ((t - base) / nl.period).round() as i64;
            for r in centre - m..=centre + m {
                let tm = base + r as f64 * nl.period;
                let d = (t - tm).abs();
                if skip_self && d < 1e-9 * nl.period {
                    continue;
                }
                acc += sign * sg * (nl.slope * d).ln();
            }
        }
        acc
    };
    let mut total = 2.0 * pair_kappa(model, i, j, &lat) * sum_over(&lat, true);
    let nb = model.n();
    let neighbours = (0..nb).filter(|&k| k != i).map(|k| (k, j)).chain((nb..2 * nb).filter(|&l| l != j).map(|l| (i, l)));
    for (k, l) in neighbours {
        if model.coupling(k, l).norm_sqr() == 0.0 {
            continue;
        }
        let Some(nl) = model.lattice(k, l) else { continue };
        total += pair_kappa(model, k, l, &nl) * sum_over(&nl, false);
    }
    Ok(total)
}

pub fn theta_lzsm_parts(model: &LzsmModel, i: usize, j: usize, n: i64) -> Result<LzsmPhase> {
    let (s, lat) = site(model, i, j, n)?;
    let kappa = pair_kappa(model, i, j, &lat);
    Ok(LzsmPhase {
        quarter_pi: FRAC_PI_4,
        arg_gamma: arg_gamma_one_minus_i(kappa),
        arg_coupling: model.coupling(i, j).arg(),
        zeta: zeta_at(model, i, j, s.time, s.lambda),
        log_scale: kappa * (model.eta() / lat.slope).ln(),
        nonlocal: -nonlocal_lzsm(model, i, j, n)?,
    })
}

pub fn theta_lzsm(model: &LzsmModel, i: usize, j: usize, n: i64) -> Result<f64> {
    Ok(theta_lzsm_parts(model, i, j, n)?.total())
}

/// Full record for crossing n of pair (i, j).
pub fn crossing(model: &LzsmModel, i: usize, j: usize, n: i64) -> Result<Crossing> {
    let (s, lat) = site(model, i, j, n)?;
    let kappa = pair_kappa(model, i, j, &lat);
    Ok(Crossing {
        i,
        j,
        n,
        time: s.time,
        lambda: s.lambda,
        kappa,
        p: lz_probability(kappa),
        theta: theta_lzsm(model, i, j, n)?,
    })
}

/// A crossing and its 2×2 unitary block on levels (i, j).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepUnitary {
    pub crossing: Crossing,
    pub block: [[Complex64; 2]; 2],
}

impl StepUnitary {
    pub fn matrix(&self, dim: usize) -> CMat {
        embed_block(dim, self.crossing.i, self.crossing.j, self.block)
    }
}

/// Block [[√p, −α̃⁺], [−α̃⁻, √p]] with α̃± = ±sgn(λ)·√(1−p)·e^{±i·sgn(λ)·θ}.
pub fn step_unitary(crossing: &Crossing) -> StepUnitary {
    let c = crossing;
    let sg = c.lambda.signum();
    let d = Complex64::new(c.p.sqrt(), 0.0);
    let q = (1.0 - c.p).max(0.0).sqrt();
    let alpha_plus = Complex64::from_polar(sg * q, sg * c.theta);
    let alpha_minus = -Complex64::from_polar(sg * q, -sg * c.theta);
    StepUnitary { crossing: *c, block: [[d, -alpha_plus], [-alpha_minus, d]] }
}

/// Crossings of one drive passage, ascending in time.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingGroup {
    pub start: f64,
    pub end: f64,
    pub crossings: Vec<Crossing>,
}

/// Time-ordered crossings over consecutive drive passages.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingSchedule {
    pub groups: Vec<CrossingGroup>,
}

impl CrossingSchedule {
    pub fn crossings(&self) -> impl Iterator<Item = &Crossing> {
        self.groups.iter().flat_map(|g| g.crossings.iter())
    }
}

pub fn schedule(model: &LzsmModel, n_groups: usize) -> Result<CrossingSchedule> {
    let bounds = model.group_boundaries(n_groups);
    let mut groups = Vec::with_capacity(n_groups);
    for w in bounds.windows(2) {
        let sites = model.sites_between(w[0], w[1]);
        let entries: Vec<(f64, usize, usize)> = sites.iter().map(|s| (s.time, s.i, s.j)).collect();
        group_simultaneous(&entries, w[1].abs().max(1.0 / model.v()))?;
        let crossings = sites.iter().map(|s| crossing(model, s.i, s.j, s.n)).collect::<Result<Vec<_>>>()?;
        groups.push(CrossingGroup { start: w[0], end: w[1], crossings });
    }
    Ok(CrossingSchedule { groups })
}

/// GAIA state after each crossing group.
#[derive(Debug, Clone, PartialEq)]
pub struct GaiaTrace {
    /// Group boundaries, starting with the initial time.
    pub times: Vec<f64>,
    pub states: Vec<CVec>,
    pub probabilities: Vec<Vec<f64>>,
}

/// Applies the time-ordered step unitaries of `n_crossings` groups to `initial`.
pub fn propagate_lzsm(model: &LzsmModel, initial: &CVec, n_crossings: usize) -> Result<(GaiaTrace, SMatrix)> {
    let dim = model.dim();
    if initial.len() != dim {
        return Err(GaiaError::ShapeMismatch { expected: format!("state of length {dim}"), found: initial.len().to_string() });
    }
    let norm = initial.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(GaiaError::InvalidConfig(format!("initial state has norm {norm}")));
    }
    let sched = schedule(model, n_crossings)?;
    let mut s = CMat::identity(dim, dim);
    let probs = |psi: &CVec| psi.iter().map(|z| z.norm_sqr()).collect::<Vec<f64>>();
    let mut trace = GaiaTrace {
        times: vec![model.start_time()],
        states: vec![initial.clone()],
        probabilities: vec![probs(initial)],
    };
    for g in &sched.groups {
        for c in &g.crossings {
            if c.kappa == 0.0 {
                continue;
            }
            let u = step_unitary(c);
            apply_block_left(&mut s, c.i, c.j, &u.block);
        }
        let psi = &s * initial;
        trace.times.push(g.end);
        trace.probabilities.push(probs(&psi));
        trace.states.push(psi);
    }
    Ok((trace, SMatrix::from_matrix(s)))
}

/// Basis vector for level `k`.
pub fn basis_state(dim: usize, k: usize) -> CVec {
    let mut v = CVec::zeros(dim);
    v[k] = Complex64::new(1.0, 0.0);
    v
}

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DestructiveReport {
    /// θ_{n=1} + θ_{n=2} of pairs (0, N) and (0, N+1), reduced to (−π, π].
    pub signed_residuals: [f64; 2],
    /// Distance of each θ-sum to the nearest multiple of 2π.
    pub residuals: [f64; 2],
    pub holds: bool,
    /// Return amplitude of level 0 from the three-path formula.
    pub s11: Complex64,
}

/// Destructive-interference test for the first two crossings of pairs
/// (0, N) and (0, N+1).
pub fn destructive_condition(model: &LzsmModel, tol: f64) -> Result<DestructiveReport> {
    let n = model.n();
    if n < 2 {
        return Err(GaiaError::UnsupportedModel("destructive condition needs N ≥ 2".into()));
    }
    let mut sums = [0.0; 2];
    let mut ps = [0.0; 2];
    for (slot, j) in [n, n + 1].into_iter().enumerate() {
        let c1 = crossing(model, 0, j, 1)?;
        let c2 = crossing(model, 0, j, 2)?;
        sums[slot] = c1.theta + c2.theta;
        ps[slot] = c1.p;
    }
    let signed = [wrap(sums[0]), wrap(sums[1])];
    let residuals = [signed[0].abs(), signed[1].abs()];
    let (p1, p2) = (ps[0], ps[1]);
    let s11 = Complex64::from_polar(1.0 - p1, sums[0])
        + Complex64::from_polar(p1 * (1.0 - p2), sums[1])
        + Complex64::new(p1 * p2, 0.0);
    Ok(DestructiveReport { signed_residuals: signed, residuals, holds: residuals[0] <= tol && residuals[1] <= tol, s11 })
}

/// Bisection on a signed residual between bracketing points.
fn bisect(f: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, mut flo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-13 * mid.abs().max(1.0) {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// All η in `eta_range` at which both θ-sum residuals are within `tol`.
///
/// Each residual is scanned on `scan_points` η values; sign changes that are
/// not 2π wrap jumps are refined by bisection, and a root of either residual
/// is kept when the full condition holds there.
pub fn solve_destructive(
    family: &(dyn Fn(f64) -> Result<LzsmModel> + Sync),
    eta_range: (f64, f64),
    tol: f64,
    scan_points: usize,
) -> Result<Vec<f64>> {
    let (lo, hi) = eta_range;
    if !(lo < hi) || scan_points < 2 {
        return Err(GaiaError::InvalidConfig("need lo < hi and at least two scan points".into()));
    }
    let grid: Vec<f64> = (0..scan_points).map(|k| lo + (hi - lo) * k as f64 / (scan_points - 1) as f64).collect();
    let signed = |eta: f64| -> Result<[f64; 2]> { Ok(destructive_condition(&family(eta)?, tol)?.signed_residuals) };
    let values: Vec<[f64; 2]> = grid.par_iter().map(|&e| signed(e)).collect::<Result<Vec<_>>>()?;

    let mut roots = Vec::new();
    for slot in 0..2 {
        let f = |eta: f64| -> Result<f64> { Ok(signed(eta)?[slot]) };
        for k in 0..grid.len() - 1 {
            let (a, b) = (values[k][slot], values[k + 1][slot]);
            if a == 0.0 {
                roots.push(grid[k]);
            } else if (a < 0.0) != (b < 0.0) && (a - b).abs() < PI {
                roots.push(bisect(&f, grid[k], grid[k + 1], a)?);
            }
        }
        if values[grid.len() - 1][slot] == 0.0 {
            roots.push(hi);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
    let checked: Vec<Option<f64>> = roots
        .par_iter()
        .map(|&eta| Ok(destructive_condition(&family(eta)?, tol)?.holds.then_some(eta)))
        .collect::<Result<Vec<_>>>()?;
    Ok(checked.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_residual;
    use crate::models::{build_lzsm, build_spin_boson};

    fn two_level(b: f64) -> LzsmModel {
        build_lzsm(1, 1.0, 10.0, vec![0.0], CMat::from_element(1, 1, Complex64::new(b, 0.0)), 4).unwrap()
    }

    #[test]
    fn zeta_values() {
        let m = two_level(0.1);
        assert_eq!(zeta(&m, 0, 1, 0).unwrap(), 0.0);
        // crossing at π with λ < 0
        let z = zeta(&m, 0, 1, 1).unwrap();
        assert!((z - 40.0).abs() < 1e-12, "{z}");
    }

    #[test]
    fn reference_time_shifts_a_pair_uniformly_for_fixed_slope_sign() {
        let m = build_spin_boson(0.1, 0.1, 0.2, 1.0, 10.0, 3, 4).unwrap();
        let shifted = m.clone().with_reference_time(0.37);
        for n in [0i64, 2, 4] {
            let d0 = zeta(&m, 0, 4, 0).unwrap() - zeta(&shifted, 0, 4, 0).unwrap();
            let dn = zeta(&m, 0, 4, n).unwrap() - zeta(&shifted, 0, 4, n).unwrap();
            assert!((d0 - dn).abs() < 1e-12);
        }
    }

    #[test]
    fn two_level_nonlocal_is_self_term() {
        let m = two_level(0.3);
        let kappa = 0.09 / 2.0;
        for n in 0..3 {
            let th = nonlocal_lzsm(&m, 0, 1, n).unwrap();
            assert!((th - 2.0 * kappa * 0.25f64.ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn closed_form_matches_truncated_product() {
        let m = build_spin_boson(0.1, 0.1, 0.2, 1.0, 10.0, 3, 4).unwrap();
        for (i, j) in m.coupled_pairs() {
            for n in 0..3 {
                let closed = nonlocal_lzsm(&m, i, j, n).unwrap();
                let prod = nonlocal_lzsm_product(&m, i, j, n, 2000).unwrap();
                assert!((closed - prod).abs() < 1e-4, "({i},{j},{n}): {closed} vs {prod}");
            }
        }
    }

    #[test]
    fn step_unitary_sign_convention() {
        let m = two_level(0.4);
        let up = crossing(&m, 0, 1, 0).unwrap();
        let mut down = up;
        down.lambda = -up.lambda;
        let (a, b) = (step_unitary(&up).block, step_unitary(&down).block);
        // sgn(λ) = −1 negates the off-diagonal pattern and conjugates the phase
        assert!((b[0][1] + a[0][1].conj()).norm() < 1e-15);
        assert!((b[1][0] + a[1][0].conj()).norm() < 1e-15);
        assert!(unitarity_residual(&step_unitary(&down).matrix(2)) < 1e-14);
    }

    #[test]
    fn uncoupled_gives_identity() {
        let m = build_spin_boson(0.0, 0.0, 0.3, 1.0, 10.0, 3, 6).unwrap();
        let (_, s) = propagate_lzsm(&m, &basis_state(6, 0), 6).unwrap();
        assert_eq!(s.into_matrix(), CMat::identity(6, 6));
    }

    #[test]
    fn zero_groups_keep_initial_state() {
        let m = build_spin_boson(0.1, 0.1, 0.2, 1.0, 10.0, 3, 0).unwrap();
        let (tr, s) = propagate_lzsm(&m, &basis_state(6, 0), 0).unwrap();
        assert_eq!(tr.probabilities, vec![vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]]);
        assert_eq!(s.into_matrix(), CMat::identity(6, 6));
    }

    #[test]
    fn norm_is_preserved() {
        let m = build_spin_boson(0.1, 0.1, 1.0, 1.0, 10.0, 5, 20).unwrap();
        let (tr, s) = propagate_lzsm(&m, &basis_state(10, 0), 20).unwrap();
        assert!(s.unitarity_residual() < 1e-12);
        for p in &tr.probabilities {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_phase_sums_give_unit_return() {
        // algebraic identity for vanishing θ-sums
        let (p1, p2) = (0.3, 0.8);
        let s = Complex64::new(1.0 - p1, 0.0) + Complex64::new(p1 * (1.0 - p2), 0.0) + Complex64::new(p1 * p2, 0.0);
        assert!((s - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn empty_range_gives_no_solution() {
        let fam = |eta: f64| build_spin_boson(0.1, 0.1, 0.2, 1.0, eta, 5, 2);
        let sols = solve_destructive(&fam, (10.0, 10.05), DESTRUCTIVE_TOL, 11).unwrap();
        assert!(sols.is_empty());
    }
}
