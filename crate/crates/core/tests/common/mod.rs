#![allow(dead_code)]

use gaia_core::{build_grid, build_lzsm, build_spin_boson, CMat, GridModel, LzsmModel};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, SQRT_2};

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex coupling block with every κ = |b|²/(2v) at most `kappa_max`.
pub fn random_couplings(rng: &mut TestRng, n: usize, scale: f64, kappa_max: f64) -> CMat {
    let bmax = (scale * kappa_max).sqrt();
    CMat::from_fn(n, n, |_, _| Complex64::from_polar(bmax * rng.gen::<f64>().sqrt(), rng.gen_range(-PI..PI)))
}

/// Grid model with strictly increasing offsets, gaps in [0.5, 4).
pub fn random_grid(rng: &mut TestRng, n: usize, kappa_max: f64) -> GridModel {
    let v = rng.gen_range(0.5..2.0);
    let eta = rng.gen_range(0.5..5.0);
    let mut x = rng.gen_range(-3.0..3.0);
    let a: Vec<f64> = (0..n)
        .map(|_| {
            let here = x;
            x += rng.gen_range(0.5..4.0);
            here
        })
        .collect();
    let b = random_couplings(rng, n, 2.0 * v, kappa_max);
    build_grid(n, v, eta, a, b).unwrap()
}

/// Driven model whose pairs all cross: offsets inside (−0.95, 0.95).
pub fn random_lzsm(rng: &mut TestRng, n: usize, kappa_max: f64, crossings: usize) -> LzsmModel {
    let v = rng.gen_range(0.5..2.0);
    let eta = rng.gen_range(1.0..20.0);
    let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.95..0.95)).collect();
    // the crossing slope is at least 2v·√(1 − 0.95²)
    let b = random_couplings(rng, n, 2.0 * v * (1.0f64 - 0.95 * 0.95).sqrt(), kappa_max);
    build_lzsm(n, v, eta, a, b, crossings).unwrap()
}

/// Δ/√v = 0.5, γ/√v = 1.0 four-level model at √(η/v)·a = x, η = v = 1.
pub fn four_level(x: f64) -> GridModel {
    let b = CMat::from_fn(2, 2, |r, c| Complex64::new(if r == c { 0.5 } else { 1.0 }, 0.0));
    build_grid(2, 1.0, 1.0, vec![0.0, x], b).unwrap()
}

/// Lower edge of the independent-crossing region of the four-level family.
pub const RED_BOUNDARY: f64 = 10.0 * SQRT_2;

/// Spin–boson model with five boson levels, v = 1, Δ = 0.1.
pub fn spin_boson(gamma: f64, omega: f64, eta: f64, crossings: usize) -> LzsmModel {
    build_spin_boson(0.1, gamma, omega, 1.0, eta, 5, crossings).unwrap()
}

pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect()
}
