//! Grid (linear ramp) and LZSM (sinusoidal drive) two-band Hamiltonians.
//!
//! Levels are 0-based: the down band is `0..N`, the up band `N..2N`, and the
//! coupling block entry `b[(i, m)]` connects down level `i` to up level `N + m`.

use crate::error::{GaiaError, Result};
use crate::linalg::{CMat, ZERO};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Anything the exact propagator can integrate.
pub trait Hamiltonian: Sync {
    fn dim(&self) -> usize;
    /// Writes H(t) into `out` (already sized `dim × dim`).
    fn fill(&self, t: f64, out: &mut CMat);

    fn at(&self, t: f64) -> CMat {
        let mut h = CMat::zeros(self.dim(), self.dim());
        self.fill(t, &mut h);
        h
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(GaiaError::NonPositiveParameter { name, value })
    }
}

fn check_shapes(n: usize, a: &[f64], b: &CMat) -> Result<()> {
    if n == 0 {
        return Err(GaiaError::NonPositiveParameter { name: "N", value: 0.0 });
    }
    if a.len() != n {
        return Err(GaiaError::ShapeMismatch {
            expected: format!("{n} offsets"),
            found: format!("{}", a.len()),
        });
    }
    if b.shape() != (n, n) {
        return Err(GaiaError::ShapeMismatch {
            expected: format!("{n}x{n} coupling block"),
            found: format!("{}x{}", b.nrows(), b.ncols()),
        });
    }
    if let Some(x) = a.iter().find(|x| !x.is_finite()) {
        return Err(GaiaError::ShapeMismatch { expected: "finite offsets".into(), found: x.to_string() });
    }
    if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(GaiaError::ShapeMismatch {
            expected: "finite couplings".into(),
            found: "non-finite entry".into(),
        });
    }
    Ok(())
}

fn fill_couplings(n: usize, eta: f64, b: &CMat, out: &mut CMat) {
    let s = eta.sqrt();
    for i in 0..n {
        for m in 0..n {
            let z = b[(i, m)] * s;
            out[(i, n + m)] = z;
            out[(n + m, i)] = z.conj();
        }
    }
}

/// Shared accessors for the two-band models.
pub trait TwoBand {
    fn n(&self) -> usize;
    fn offsets(&self) -> &[f64];
    fn couplings(&self) -> &CMat;

    fn dim(&self) -> usize {
        2 * self.n()
    }

    /// Offset of any level, with up level `N + m` mapped to `a[m]`.
    fn offset(&self, level: usize) -> f64 {
        let n = self.n();
        self.offsets()[if level < n { level } else { level - n }]
    }

    fn coupling(&self, i: usize, j: usize) -> Complex64 {
        self.couplings()[(i, j - self.n())]
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        let n = self.n();
        if i < n && j >= n && j < 2 * n {
            Ok(())
        } else {
            Err(GaiaError::InvalidPair { i, j })
        }
    }

    /// All down/up pairs in row-major order.
    fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n).flat_map(|i| (n..2 * n).map(move |j| (i, j))).collect()
    }

    fn coupled_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs().into_iter().filter(|&(i, j)| self.coupling(i, j) != ZERO).collect()
    }
}

/// H(t) = η·diag(−vt + a_i | vt + a_m) + √η·B.
#[derive(Debug, Clone, PartialEq)]
pub struct GridModel {
    n: usize,
    v: f64,
    eta: f64,
    a: Vec<f64>,
    b: CMat,
}

/// Time of one grid anticrossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCrossing {
    pub i: usize,
    pub j: usize,
    pub time: f64,
}

pub fn build_grid(n: usize, v: f64, eta: f64, a: Vec<f64>, b: CMat) -> Result<GridModel> {
    check_positive("v", v)?;
    check_positive("eta", eta)?;
    check_shapes(n, &a, &b)?;
    for x in 0..n {
        for y in x + 1..n {
            if a[x] == a[y] {
                return Err(GaiaError::DuplicateOffset { first: x, second: y, value: a[x] });
            }
        }
    }
    Ok(GridModel { n, v, eta, a, b })
}

impl TwoBand for GridModel {
    fn n(&self) -> usize {
        self.n
    }
    fn offsets(&self) -> &[f64] {
        &self.a
    }
    fn couplings(&self) -> &CMat {
        &self.b
    }
}

impl GridModel {
    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn crossing_time(&self, i: usize, j: usize) -> f64 {
        (self.offset(i) - self.offset(j)) / (2.0 * self.v)
    }

    /// Every pair's crossing, ascending in time; ties keep row-major pair order.
    pub fn crossing_schedule(&self) -> Vec<GridCrossing> {
        let mut out: Vec<GridCrossing> = self
            .pairs()
            .into_iter()
            .map(|(i, j)| GridCrossing { i, j, time: self.crossing_time(i, j) })
            .collect();
        out.sort_by(|x, y| x.time.total_cmp(&y.time));
        out
    }

    /// Copy with a different η.
    pub fn with_eta(&self, eta: f64) -> Result<GridModel> {
        build_grid(self.n, self.v, eta, self.a.clone(), self.b.clone())
    }

    /// True when a_n = a_1 + (n−1)·step for a common step, to relative precision `rel`.
    pub fn equidistant_step(&self, rel: f64) -> Option<f64> {
        if self.n < 2 {
            return None;
        }
        let step = self.a[1] - self.a[0];
        let scale = self.a.iter().fold(step.abs(), |m, x| m.max(x.abs()));
        let ok = (0..self.n).all(|k| (self.a[k] - self.a[0] - k as f64 * step).abs() <= rel * scale);
        ok.then_some(step)
    }
}

impl Hamiltonian for GridModel {
    fn dim(&self) -> usize {
        2 * self.n
    }

    fn fill(&self, t: f64, out: &mut CMat) {
        out.fill(ZERO);
        let n = self.n;
        for k in 0..n {
            out[(k, k)] = Complex64::new(self.eta * (-self.v * t + self.a[k]), 0.0);
            out[(n + k, n + k)] = Complex64::new(self.eta * (self.v * t + self.a[k]), 0.0);
        }
        fill_couplings(n, self.eta, &self.b, out);
    }
}

/// H(t) = η·diag(−sin(vt) + a_i | sin(vt) + a_m) + √η·B.
#[derive(Debug, Clone, PartialEq)]
pub struct LzsmModel {
    n: usize,
    v: f64,
    eta: f64,
    a: Vec<f64>,
    b: CMat,
    n_crossings: usize,
    reference_time: f64,
}

/// Periodic crossing lattice of one pair: sin(vt) = (a_i − a_m)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairLattice {
    /// Base crossing with positive gap slope, asin(s)/v.
    pub rising: f64,
    /// Base crossing with negative gap slope, (π − asin s)/v.
    pub falling: f64,
    /// |λ| = 2v·√(1 − s²), the same at every crossing of the pair.
    pub slope: f64,
    pub period: f64,
}

impl PairLattice {
    /// Base time of the lattice with the requested slope sign.
    pub fn base(&self, positive: bool) -> f64 {
        if positive {
            self.rising
        } else {
            self.falling
        }
    }

    /// Crossing `n` under the ordinal convention: n = 0 is the latest crossing
    /// at or before t = 0, n = 1 the next one. Returns (time, signed slope).
    pub fn ordinal(&self, n: i64) -> (f64, f64) {
        let p = self.period;
        let wrap = |t: f64| t - p * (t / p).ceil();
        let (r, f) = (wrap(self.rising), wrap(self.falling));
        // latest point ≤ 0 and the one before it
        let ((t0, s0), (tm, sm)) = if r >= f {
            ((r, self.slope), (f, -self.slope))
        } else {
            ((f, -self.slope), (r, self.slope))
        };
        let q = n.div_euclid(2);
        if n.rem_euclid(2) == 0 {
            (t0 + q as f64 * p, s0)
        } else {
            (tm + (q + 1) as f64 * p, sm)
        }
    }

    /// Smallest ordinal whose time is strictly greater than `t`.
    pub fn first_after(&self, t: f64) -> i64 {
        let mut n = 2 * (t / self.period).floor() as i64 - 2;
        while self.ordinal(n).0 <= t {
            n += 1;
        }
        while self.ordinal(n - 1).0 > t {
            n -= 1;
        }
        n
    }
}

/// One crossing of a pair: ordinal, time and signed gap slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingSite {
    pub i: usize,
    pub j: usize,
    pub n: i64,
    pub time: f64,
    pub lambda: f64,
}

pub fn build_lzsm(n: usize, v: f64, eta: f64, a: Vec<f64>, b: CMat, n_crossings: usize) -> Result<LzsmModel> {
    check_positive("v", v)?;
    check_positive("eta", eta)?;
    check_shapes(n, &a, &b)?;
    for i in 0..n {
        for m in 0..n {
            let gap = a[i] - a[m];
            if b[(i, m)] != ZERO && gap.abs() >= 2.0 {
                return Err(GaiaError::RealityViolation { i, j: n + m, gap });
            }
        }
    }
    // Equal offsets make two coupled pairs sharing a level cross simultaneously.
    for x in 0..n {
        for y in x + 1..n {
            if a[x] != a[y] {
                continue;
            }
            let shares_up = (0..n).any(|m| b[(x, m)] != ZERO && b[(y, m)] != ZERO);
            let shares_down = (0..n).any(|i| b[(i, x)] != ZERO && b[(i, y)] != ZERO);
            if shares_up || shares_down {
                return Err(GaiaError::DuplicateOffset { first: x, second: y, value: a[x] });
            }
        }
    }
    Ok(LzsmModel { n, v, eta, a, b, n_crossings, reference_time: 0.0 })
}

/// Spin coupled to one boson mode truncated at `n_boson` levels.
///
/// a_n = n·Ω (0-based), b[n][n] = Δ, b[n][n+1] = b[n+1][n] = γ·√(n+1).
pub fn build_spin_boson(
    delta: f64,
    gamma: f64,
    omega: f64,
    v: f64,
    eta: f64,
    n_boson: usize,
    n_crossings: usize,
) -> Result<LzsmModel> {
    if n_boson == 0 {
        return Err(GaiaError::NonPositiveParameter { name: "n_boson", value: 0.0 });
    }
    for (name, x) in [("Delta", delta), ("gamma", gamma), ("Omega", omega)] {
        if !x.is_finite() || x < 0.0 {
            return Err(GaiaError::NonPositiveParameter { name, value: x });
        }
    }
    let a: Vec<f64> = (0..n_boson).map(|k| k as f64 * omega).collect();
    let b = CMat::from_fn(n_boson, n_boson, |r, c| {
        if r == c {
            Complex64::new(delta, 0.0)
        } else if r + 1 == c || c + 1 == r {
            Complex64::new(gamma * (r.max(c) as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    });
    build_lzsm(n_boson, v, eta, a, b, n_crossings)
}

impl TwoBand for LzsmModel {
    fn n(&self) -> usize {
        self.n
    }
    fn offsets(&self) -> &[f64] {
        &self.a
    }
    fn couplings(&self) -> &CMat {
        &self.b
    }
}

impl LzsmModel {
    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn n_crossings(&self) -> usize {
        self.n_crossings
    }

    pub fn reference_time(&self) -> f64 {
        self.reference_time
    }

    pub fn with_reference_time(mut self, t_ref: f64) -> Self {
        self.reference_time = t_ref;
        self
    }

    pub fn with_crossings(mut self, n_crossings: usize) -> Self {
        self.n_crossings = n_crossings;
        self
    }

    pub fn with_eta(&self, eta: f64) -> Result<LzsmModel> {
        let m = build_lzsm(self.n, self.v, eta, self.a.clone(), self.b.clone(), self.n_crossings)?;
        Ok(m.with_reference_time(self.reference_time))
    }

    /// Crossing lattice of a pair, or `None` when |a_i − a_m| ≥ 2.
    pub fn lattice(&self, i: usize, j: usize) -> Option<PairLattice> {
        let s = (self.offset(i) - self.offset(j)) / 2.0;
        if s.abs() >= 1.0 {
            return None;
        }
        let base = s.asin();
        Some(PairLattice {
            rising: base / self.v,
            falling: (PI - base) / self.v,
            slope: 2.0 * self.v * (1.0 - s * s).sqrt(),
            period: 2.0 * PI / self.v,
        })
    }

    pub fn site(&self, i: usize, j: usize, n: i64) -> Option<CrossingSite> {
        self.lattice(i, j).map(|l| {
            let (time, lambda) = l.ordinal(n);
            CrossingSite { i, j, n, time, lambda }
        })
    }

    /// Start of propagation: the drive maximum where level 0 is the ground state,
    /// a quarter period before the first a_i = a_m crossing.
    pub fn start_time(&self) -> f64 {
        PI / (2.0 * self.v)
    }

    /// Boundaries of the crossing groups: drive extrema t_I + kπ/v, k = 0..=n.
    pub fn group_boundaries(&self, groups: usize) -> Vec<f64> {
        let t0 = self.start_time();
        (0..=groups).map(|k| t0 + k as f64 * PI / self.v).collect()
    }

    /// Crossings of coupled pairs in (t_lo, t_hi], ascending in time.
    pub fn sites_between(&self, t_lo: f64, t_hi: f64) -> Vec<CrossingSite> {
        let mut out = Vec::new();
        for (i, j) in self.coupled_pairs() {
            let Some(lat) = self.lattice(i, j) else { continue };
            let mut n = lat.first_after(t_lo);
            loop {
                let (time, lambda) = lat.ordinal(n);
                if time > t_hi {
                    break;
                }
                out.push(CrossingSite { i, j, n, time, lambda });
                n += 1;
            }
        }
        out.sort_by(|x, y| x.time.total_cmp(&y.time));
        out
    }
}

impl Hamiltonian for LzsmModel {
    fn dim(&self) -> usize {
        2 * self.n
    }

    fn fill(&self, t: f64, out: &mut CMat) {
        out.fill(ZERO);
        let n = self.n;
        let drive = (self.v * t).sin();
        for k in 0..n {
            out[(k, k)] = Complex64::new(self.eta * (-drive + self.a[k]), 0.0);
            out[(n + k, n + k)] = Complex64::new(self.eta * (drive + self.a[k]), 0.0);
        }
        fill_couplings(n, self.eta, &self.b, out);
    }
}

pub mod file;
