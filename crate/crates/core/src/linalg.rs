//! Dense complex matrices and the unitary S-matrix wrapper.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Transition-amplitude matrix over the 2N diabatic levels.
///
/// Column `c` holds the final amplitudes for the system prepared in level `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct SMatrix {
    entries: CMat,
}

impl SMatrix {
    pub fn identity(dim: usize) -> Self {
        SMatrix { entries: CMat::identity(dim, dim) }
    }

    pub fn from_matrix(entries: CMat) -> Self {
        assert!(entries.is_square(), "S-matrix must be square");
        SMatrix { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    pub fn into_matrix(self) -> CMat {
        self.entries
    }

    /// |S_{row,col}|².
    pub fn probability(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)].norm_sqr()
    }

    pub fn probabilities(&self) -> DMatrix<f64> {
        self.entries.map(|z| z.norm_sqr())
    }

    /// Final-state probabilities for initial level `col`.
    pub fn column_probabilities(&self, col: usize) -> Vec<f64> {
        (0..self.dim()).map(|r| self.probability(r, col)).collect()
    }

    /// max |(S†S − I)_{kl}|
    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.entries)
    }

    /// Left-multiplies by a later factor.
    pub fn then(&mut self, factor: &CMat) {
        self.entries = factor * &self.entries;
    }
}

pub fn unitarity_residual(m: &CMat) -> f64 {
    let g = m.adjoint() * m;
    max_abs_diff(&g, &CMat::identity(m.nrows(), m.ncols()))
}

pub fn max_abs_diff(x: &CMat, y: &CMat) -> f64 {
    assert_eq!(x.shape(), y.shape());
    x.iter().zip(y.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

/// max |H − H†|
pub fn hermiticity_residual(h: &CMat) -> f64 {
    max_abs_diff(h, &h.adjoint())
}

/// exp(−i·dt·H) for Hermitian `h`, through its eigen-decomposition.
pub fn expm_hermitian(h: &CMat, dt: f64) -> CMat {
    let eig = h.clone().symmetric_eigen();
    let q = &eig.eigenvectors;
    let phases = eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -dt * e));
    let mut scaled = q.clone();
    for (mut col, ph) in scaled.column_iter_mut().zip(phases.iter()) {
        col *= *ph;
    }
    scaled * q.adjoint()
}

/// Identity matrix with the 2×2 block on levels (i, j) replaced.
pub fn embed_block(dim: usize, i: usize, j: usize, block: [[Complex64; 2]; 2]) -> CMat {
    let mut m = CMat::identity(dim, dim);
    m[(i, i)] = block[0][0];
    m[(i, j)] = block[0][1];
    m[(j, i)] = block[1][0];
    m[(j, j)] = block[1][1];
    m
}

/// Applies a 2×2 block acting on levels (i, j) from the left, in place.
pub fn apply_block_left(m: &mut CMat, i: usize, j: usize, block: &[[Complex64; 2]; 2]) {
    for c in 0..m.ncols() {
        let x = m[(i, c)];
        let y = m[(j, c)];
        m[(i, c)] = block[0][0] * x + block[0][1] * y;
        m[(j, c)] = block[1][0] * x + block[1][1] * y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_of_diagonal() {
        let h = CMat::from_diagonal(&CVec::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-2.0, 0.0),
        ]));
        let u = expm_hermitian(&h, 0.3);
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, -0.3)).norm() < 1e-15);
        assert!((u[(1, 1)] - Complex64::from_polar(1.0, 0.6)).norm() < 1e-15);
        assert!(u[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn exponential_of_pauli_x() {
        let mut h = CMat::zeros(2, 2);
        h[(0, 1)] = Complex64::new(1.0, 0.0);
        h[(1, 0)] = Complex64::new(1.0, 0.0);
        let u = expm_hermitian(&h, 0.7);
        assert!((u[(0, 0)] - Complex64::new(0.7f64.cos(), 0.0)).norm() < 1e-14);
        assert!((u[(0, 1)] - Complex64::new(0.0, -0.7f64.sin())).norm() < 1e-14);
        assert!(unitarity_residual(&u) < 1e-14);
    }

    #[test]
    fn block_application_matches_embedding() {
        let blk = [
            [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)],
            [Complex64::new(0.0, 0.8), Complex64::new(0.6, 0.0)],
        ];
        let mut m = CMat::from_fn(3, 3, |r, c| Complex64::new(r as f64, c as f64));
        let full = embed_block(3, 0, 2, blk) * &m;
        apply_block_left(&mut m, 0, 2, &blk);
        assert!(max_abs_diff(&m, &full) < 1e-15);
    }
}
