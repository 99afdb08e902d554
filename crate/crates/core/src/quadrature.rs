//! Adaptive Gauss–Kronrod (7–15) quadrature for vector-valued integrands.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: usize = 40;

/// ∫_lo^hi f(t) dt componentwise, with absolute error target `tol` in the max norm.
///
/// `f` may fail; its error is returned unchanged.
pub fn integrate<E>(
    f: &mut dyn FnMut(f64) -> Result<Vec<f64>, E>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<Vec<f64>, E> {
    let (est, err) = rule(f, lo, hi)?;
    refine(f, lo, hi, est, err, tol, 0)
}

fn refine<E>(
    f: &mut dyn FnMut(f64) -> Result<Vec<f64>, E>,
    lo: f64,
    hi: f64,
    est: Vec<f64>,
    err: f64,
    tol: f64,
    depth: usize,
) -> Result<Vec<f64>, E> {
    if err <= tol || depth >= MAX_DEPTH {
        return Ok(est);
    }
    let mid = 0.5 * (lo + hi);
    let (l, el) = rule(f, lo, mid)?;
    let (r, er) = rule(f, mid, hi)?;
    let mut left = refine(f, lo, mid, l, el, 0.5 * tol, depth + 1)?;
    let right = refine(f, mid, hi, r, er, 0.5 * tol, depth + 1)?;
    for (x, y) in left.iter_mut().zip(right) {
        *x += y;
    }
    Ok(left)
}

fn rule<E>(f: &mut dyn FnMut(f64) -> Result<Vec<f64>, E>, lo: f64, hi: f64) -> Result<(Vec<f64>, f64), E> {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let center = f(c)?;
    let mut kron: Vec<f64> = center.iter().map(|y| y * WGK[7]).collect();
    let mut gauss: Vec<f64> = center.iter().map(|y| y * WG[3]).collect();
    for k in 0..7 {
        let lo_v = f(c - h * XGK[k])?;
        let hi_v = f(c + h * XGK[k])?;
        for d in 0..kron.len() {
            let s = lo_v[d] + hi_v[d];
            kron[d] += WGK[k] * s;
            if k % 2 == 1 {
                gauss[d] += WG[k / 2] * s;
            }
        }
    }
    let mut err = 0.0f64;
    for d in 0..kron.len() {
        kron[d] *= h;
        gauss[d] *= h;
        err = err.max((kron[d] - gauss[d]).abs());
    }
    Ok((kron, err))
}
