//! Connection-matrix form of the grid S-matrix: non-unitary factors M_{ij}
//! sandwiched between diagonal normalization ladders.

mod aia;

pub use aia::{smatrix_aia, AiaOutcome, AiaPath};

use crate::error::Result;
use crate::gaia_grid::{kappa_grid, lz_probability, nonlocal_grid, unitary_factor};
use crate::linalg::{embed_block, max_abs_diff, CMat, SMatrix};
use crate::models::{GridModel, TwoBand};
use crate::special::arg_gamma_one_minus_i;
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_4;

/// Below this LZ probability the p^{−1/2} ladder entries lose precision.
pub const CONDITIONING_THRESHOLD: f64 = 1e-6;

/// One M_{ij}: block [[p, −α⁺], [−α⁻, 1]] on levels (i, j).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionFactor {
    pub i: usize,
    pub j: usize,
    pub p: f64,
    pub alpha_plus: Complex64,
    pub alpha_minus: Complex64,
    pub beta: Complex64,
}

impl ConnectionFactor {
    pub fn block(&self) -> [[Complex64; 2]; 2] {
        [
            [Complex64::new(self.p, 0.0), -self.alpha_plus],
            [-self.alpha_minus, Complex64::new(1.0, 0.0)],
        ]
    }

    pub fn matrix(&self, dim: usize) -> CMat {
        embed_block(dim, self.i, self.j, self.block())
    }
}

fn pair_p(model: &GridModel, i: usize, j: usize) -> f64 {
    lz_probability(model.coupling(i, j).norm_sqr() / (2.0 * model.v()))
}

pub fn m_factor(model: &GridModel, i: usize, j: usize) -> Result<ConnectionFactor> {
    let kappa = kappa_grid(model, i, j)?;
    let p = lz_probability(kappa);
    let (v, eta, n) = (model.v(), model.eta(), model.n());
    let da = model.offset(j) - model.offset(i);
    let mut weight = 1.0;
    for k in 0..i {
        weight *= pair_p(model, k, j).sqrt();
    }
    for l in n..j {
        weight /= pair_p(model, i, l).sqrt();
    }
    let beta_phase = -kappa * (4.0 * v).ln() + 0.5 * eta * da * da / (2.0 * v) - nonlocal_grid(model, i, j)?;
    let beta = Complex64::from_polar(weight, beta_phase);
    let stokes = FRAC_PI_4 + arg_gamma_one_minus_i(kappa) + model.coupling(i, j).arg();
    let local = stokes + kappa * (2.0 * eta).ln();
    let q = (1.0 - p).sqrt();
    Ok(ConnectionFactor {
        i,
        j,
        p,
        alpha_plus: Complex64::from_polar(q, local) * beta,
        alpha_minus: -Complex64::from_polar(q, -local) / beta,
        beta,
    })
}

/// Diagonal normalizations: Ñ⁺, Ñ⁻ and the intermediate Ñ_k⁻, k = 0..2N−1.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationLadder {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    pub steps: Vec<Vec<f64>>,
}

impl NormalizationLadder {
    pub fn new(model: &GridModel) -> Self {
        let n = model.n();
        let p = |i: usize, j: usize| pair_p(model, i, j);
        let mut plus = vec![1.0; 2 * n];
        let mut minus = vec![1.0; 2 * n];
        for i in 0..n {
            for j in n..2 * n {
                plus[j] /= p(i, j).sqrt();
                minus[i] /= p(i, j).sqrt();
            }
        }
        let steps = (0..2 * n).map(|k| ladder_step(n, k, &p)).collect();
        NormalizationLadder { plus, minus, steps }
    }

    pub fn step(&self, k: usize) -> &[f64] {
        &self.steps[k]
    }
}

// Down level i keeps p_{il}^{−1/2} for the crossings with band distance ≤ k,
// up level j those with band distance > k.
fn ladder_step(n: usize, k: usize, p: &dyn Fn(usize, usize) -> f64) -> Vec<f64> {
    let mut d = vec![1.0; 2 * n];
    for (i, di) in d.iter_mut().enumerate().take(n) {
        for l in n..(k + i + 1).min(2 * n) {
            *di /= p(i, l).sqrt();
        }
    }
    for j in n..2 * n {
        let upto = j.saturating_sub(k).min(n);
        for l in 0..upto {
            d[j] /= p(l, j).sqrt();
        }
    }
    d
}

fn diag(entries: &[f64]) -> CMat {
    CMat::from_fn(entries.len(), entries.len(), |r, c| {
        if r == c {
            Complex64::new(entries[r], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// M̃_k = Π_{j−i=k} M_{ij} (the factors act on disjoint levels).
pub fn m_group(model: &GridModel, k: usize) -> Result<CMat> {
    let dim = model.dim();
    let mut out = CMat::identity(dim, dim);
    for (i, j) in model.pairs().into_iter().filter(|&(i, j)| j - i == k) {
        out = m_factor(model, i, j)?.matrix(dim) * out;
    }
    Ok(out)
}

/// Ũ_k = Π_{j−i=k} U_{ij}.
pub fn u_group(model: &GridModel, k: usize) -> Result<CMat> {
    let dim = model.dim();
    let mut out = CMat::identity(dim, dim);
    for (i, j) in model.pairs().into_iter().filter(|&(i, j)| j - i == k) {
        out = unitary_factor(model, i, j)? * out;
    }
    Ok(out)
}

/// Non-fatal notice that some p^{−1/2} is large.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditioningWarning {
    pub i: usize,
    pub j: usize,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LegacyOutcome {
    pub smatrix: SMatrix,
    /// Worst-conditioned pair when its p falls below `CONDITIONING_THRESHOLD`.
    pub warning: Option<ConditioningWarning>,
}

/// (Ñ⁺)^{−1}·M̃_1···M̃_{2N−1}·Ñ⁻.
///
/// The k-grouped product follows the crossing order only for strictly
/// increasing offsets; only then does it coincide with [`crate::gaia_grid::smatrix_grid`].
pub fn smatrix_legacy(model: &GridModel) -> Result<LegacyOutcome> {
    let n = model.n();
    let ladder = NormalizationLadder::new(model);
    let mut s = diag(&ladder.minus);
    for k in (1..2 * n).rev() {
        s = m_group(model, k)? * s;
    }
    let inv_plus: Vec<f64> = ladder.plus.iter().map(|x| 1.0 / x).collect();
    s = diag(&inv_plus) * s;
    let warning = model
        .pairs()
        .into_iter()
        .map(|(i, j)| ConditioningWarning { i, j, p: pair_p(model, i, j) })
        .filter(|w| w.p < CONDITIONING_THRESHOLD)
        .min_by(|a, b| a.p.total_cmp(&b.p));
    Ok(LegacyOutcome { smatrix: SMatrix::from_matrix(s), warning })
}

/// max |M̃_k Ñ_k − Ñ_{k−1} Ũ_k| for 1 ≤ k ≤ 2N−1.
pub fn verify_appendix_identity(model: &GridModel, k: usize) -> Result<f64> {
    let n = model.n();
    if k == 0 || k >= 2 * n {
        return Err(crate::GaiaError::InvalidConfig(format!("band distance k={k} outside 1..{}", 2 * n - 1)));
    }
    let ladder = NormalizationLadder::new(model);
    let lhs = m_group(model, k)? * diag(ladder.step(k));
    let rhs = diag(ladder.step(k - 1)) * u_group(model, k)?;
    Ok(max_abs_diff(&lhs, &rhs))
}
