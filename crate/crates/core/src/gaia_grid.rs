//! GAIA S-matrix of the grid model: a time-ordered product of 2×2 unitary
//! factors, one per down/up anticrossing.

use crate::error::{GaiaError, Result};
use crate::linalg::{apply_block_left, embed_block, CMat, SMatrix};
use crate::models::{GridModel, TwoBand};
use crate::special::arg_gamma_one_minus_i;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, SQRT_2};

/// Margin below which crossings are not treated as independent.
pub const VALIDITY_THRESHOLD: f64 = 10.0;

/// Relative tolerance for treating two crossing times as simultaneous.
pub(crate) const SIMULTANEOUS_REL: f64 = 1e-12;

pub fn kappa_grid(model: &GridModel, i: usize, j: usize) -> Result<f64> {
    model.check_pair(i, j)?;
    Ok(model.coupling(i, j).norm_sqr() / (2.0 * model.v()))
}

/// Landau–Zener survival probability e^{−2πκ}.
pub fn lz_probability(kappa: f64) -> f64 {
    (-2.0 * std::f64::consts::PI * kappa).exp()
}

/// Additive pieces of a crossing phase; `total()` is the phase itself.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseBreakdown {
    pub quarter_pi: f64,
    pub arg_gamma: f64,
    pub arg_coupling: f64,
    pub dynamical: f64,
    pub log_scale: f64,
    /// Non-local contribution, already carrying its minus sign.
    pub nonlocal: f64,
}

impl PhaseBreakdown {
    pub fn total(&self) -> f64 {
        self.quarter_pi + self.arg_gamma + self.arg_coupling + self.dynamical + self.log_scale + self.nonlocal
    }
}

/// Σ_{k≠i} κ_kj log|a_k − a_i| + Σ_{l≠j} κ_il log|a_l − a_j|
pub(crate) fn nonlocal_grid(model: &GridModel, i: usize, j: usize) -> Result<f64> {
    let n = model.n();
    let mut sum = 0.0;
    for k in (0..n).filter(|&k| k != i) {
        let kap = kappa_grid(model, k, j)?;
        if kap == 0.0 {
            continue;
        }
        let d = (model.offset(k) - model.offset(i)).abs();
        if d == 0.0 {
            return Err(GaiaError::DegenerateOffset { i, j });
        }
        sum += kap * d.ln();
    }
    for l in (n..2 * n).filter(|&l| l != j) {
        let kap = kappa_grid(model, i, l)?;
        if kap == 0.0 {
            continue;
        }
        let d = (model.offset(l) - model.offset(j)).abs();
        if d == 0.0 {
            return Err(GaiaError::DegenerateOffset { i, j });
        }
        sum += kap * d.ln();
    }
    Ok(sum)
}

pub fn theta_grid(model: &GridModel, i: usize, j: usize) -> Result<(f64, PhaseBreakdown)> {
    let kappa = kappa_grid(model, i, j)?;
    let (v, eta) = (model.v(), model.eta());
    let da = model.offset(j) - model.offset(i);
    let parts = PhaseBreakdown {
        quarter_pi: FRAC_PI_4,
        arg_gamma: arg_gamma_one_minus_i(kappa),
        arg_coupling: model.coupling(i, j).arg(),
        dynamical: 0.5 * eta * da * da / (2.0 * v),
        log_scale: kappa * (2.0 * eta / (4.0 * v)).ln(),
        nonlocal: -nonlocal_grid(model, i, j)?,
    };
    Ok((parts.total(), parts))
}

/// [[√p, −√(1−p)e^{iθ}], [√(1−p)e^{−iθ}, √p]] on levels (i, j).
pub(crate) fn lz_block(p: f64, theta: f64) -> [[Complex64; 2]; 2] {
    let d = Complex64::new(p.sqrt(), 0.0);
    let q = (1.0 - p).max(0.0).sqrt();
    [
        [d, -Complex64::from_polar(q, theta)],
        [Complex64::from_polar(q, -theta), d],
    ]
}

fn factor_block(model: &GridModel, i: usize, j: usize) -> Result<Option<[[Complex64; 2]; 2]>> {
    let kappa = kappa_grid(model, i, j)?;
    if kappa == 0.0 {
        return Ok(None);
    }
    let (theta, _) = theta_grid(model, i, j)?;
    Ok(Some(lz_block(lz_probability(kappa), theta)))
}

pub fn unitary_factor(model: &GridModel, i: usize, j: usize) -> Result<CMat> {
    let dim = model.dim();
    Ok(match factor_block(model, i, j)? {
        Some(blk) => embed_block(dim, i, j, blk),
        None => CMat::identity(dim, dim),
    })
}

/// Groups a time-sorted list of (time, i, j) into simultaneous sets and
/// rejects simultaneous entries that share a level.
pub(crate) fn group_simultaneous(entries: &[(f64, usize, usize)], scale: f64) -> Result<Vec<Vec<(f64, usize, usize)>>> {
    let tol = SIMULTANEOUS_REL * scale.max(1e-300);
    let mut groups: Vec<Vec<(f64, usize, usize)>> = Vec::new();
    for &e in entries {
        match groups.last_mut() {
            Some(g) if (e.0 - g[0].0).abs() <= tol => {
                if let Some(&(t, i, j)) = g.iter().find(|x| x.1 == e.1 || x.2 == e.2 || x.1 == e.2 || x.2 == e.1) {
                    return Err(GaiaError::DegenerateCrossing { first: (i, j), second: (e.1, e.2), time: t });
                }
                g.push(e);
            }
            _ => groups.push(vec![e]),
        }
    }
    Ok(groups)
}

/// Coupled crossings of the grid model grouped by time, earliest first.
pub fn crossing_groups(model: &GridModel) -> Result<Vec<Vec<(f64, usize, usize)>>> {
    let entries: Vec<(f64, usize, usize)> = model
        .crossing_schedule()
        .into_iter()
        .filter(|c| model.coupling(c.i, c.j).norm_sqr() > 0.0)
        .map(|c| (c.time, c.i, c.j))
        .collect();
    let scale = entries.iter().fold(0.0f64, |m, e| m.max(e.0.abs()));
    group_simultaneous(&entries, scale.max(1.0 / model.v()))
}

/// S = Π U_{ij} in time order, the earliest crossing rightmost.
pub fn smatrix_grid(model: &GridModel) -> Result<SMatrix> {
    let dim = model.dim();
    let mut s = CMat::identity(dim, dim);
    for group in crossing_groups(model)? {
        for (_, i, j) in group {
            if let Some(blk) = factor_block(model, i, j)? {
                apply_block_left(&mut s, i, j, &blk);
            }
        }
    }
    Ok(SMatrix::from_matrix(s))
}

/// Smallest separation between distinct crossing instants, in the
/// dimensionless offset units √(η/v)·Δa, over √2·max(1, √κ_max).
///
/// Infinite when fewer than two distinct crossing instants exist.
pub fn gaia_validity_margin(model: &GridModel) -> f64 {
    let (v, eta) = (model.v(), model.eta());
    let mut times: Vec<f64> = model.crossing_schedule().iter().map(|c| c.time).collect();
    let scale = times.iter().fold(1.0 / v, |m, t| m.max(t.abs()));
    times.dedup_by(|a, b| (*a - *b).abs() <= SIMULTANEOUS_REL * scale);
    let gap = times.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if !gap.is_finite() {
        return f64::INFINITY;
    }
    let kmax = model
        .pairs()
        .into_iter()
        .map(|(i, j)| model.coupling(i, j).norm_sqr() / (2.0 * v))
        .fold(0.0f64, f64::max);
    // a crossing-time gap Δt corresponds to an offset gap Δa = 2vΔt
    (eta * v).sqrt() * 2.0 * gap / (SQRT_2 * kmax.sqrt().max(1.0))
}
