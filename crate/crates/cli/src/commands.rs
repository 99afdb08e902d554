use crate::args::{CompareArgs, InterferenceArgs, Io, LzsmArgs, SelfcheckArgs};
use crate::error::{CliError, CliResult};
use crate::output::{header, num, smatrix_path, write_smatrix, writer};
use crate::sweep::{apply, current, parse_sweep, parse_window, Param, Sweep};
use gaia_core::analysis::{compare_grid, compare_lzsm, p34, p34_zeros, OracleSettings, ZERO_FLOOR};
use gaia_core::gaia_grid::smatrix_grid;
use gaia_core::gaia_lzsm::{basis_state, destructive_condition, propagate_lzsm, solve_destructive};
use gaia_core::legacy_wkb::smatrix_legacy;
use gaia_core::linalg::max_abs_diff;
use gaia_core::models::file::{parse_model, Model};
use gaia_core::{build_grid, build_spin_boson, CMat, GaiaError, GridModel, LzsmModel, Result as GaiaResult, TwoBand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::path::Path;

pub fn load(path: &Path) -> CliResult<Model> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })?;
    Ok(parse_model(&text)?)
}

fn grid_only(model: &Model) -> CliResult<&GridModel> {
    match model {
        Model::Grid(m) => Ok(m),
        _ => Err(GaiaError::UnsupportedModel("this command needs a grid model".into()).into()),
    }
}

fn driven_only(model: &Model) -> CliResult<&LzsmModel> {
    model.lzsm().ok_or_else(|| GaiaError::UnsupportedModel("this command needs an lzsm or spin_boson model".into()).into())
}

fn initial_level(initial: usize, dim: usize) -> CliResult<usize> {
    if initial == 0 || initial > dim {
        return Err(CliError::Usage(format!("--initial {initial} outside 1..={dim}")));
    }
    Ok(initial - 1)
}

fn with_crossings(model: &Model, crossings: Option<usize>) -> Model {
    match (model, crossings) {
        (Model::Lzsm(m), Some(k)) => Model::Lzsm(m.clone().with_crossings(k)),
        (Model::SpinBoson(sb, m), Some(k)) => {
            let mut sb = *sb;
            sb.crossings = k;
            Model::SpinBoson(sb, m.clone().with_crossings(k))
        }
        _ => model.clone(),
    }
}

fn probability_columns(first: &[&str], dim: usize) -> Vec<String> {
    let mut h = header(first);
    h.extend((1..=dim).map(|k| format!("P_{k}")));
    h
}

pub fn grid(io: &Io) -> CliResult<()> {
    let model = load(&io.model)?;
    let s = smatrix_grid(grid_only(&model)?)?;
    write_smatrix(&io.out, &s)
}

pub fn lzsm(args: &LzsmArgs) -> CliResult<()> {
    let model = with_crossings(&load(&args.io.model)?, args.crossings);
    let m = driven_only(&model)?;
    let initial = initial_level(args.initial, m.dim())?;
    let (trace, s) = propagate_lzsm(m, &basis_state(m.dim(), initial), m.n_crossings())?;
    let mut w = writer(&args.io.out, &probability_columns(&["time"], m.dim()))?;
    for (t, p) in trace.times.iter().zip(&trace.probabilities) {
        let mut rec = vec![num(*t)];
        rec.extend(p.iter().map(|x| num(*x)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    write_smatrix(&smatrix_path(&args.io.out), &s)
}

/// Models for every sweep value, or the file's model alone with its η as the parameter.
fn sweep_models(model: &Model, sweep: Option<&Sweep>) -> CliResult<Vec<(f64, Model)>> {
    match sweep {
        None => Ok(vec![(current(model, Param::Eta)?, model.clone())]),
        Some(s) => s.values().into_iter().map(|x| Ok((x, apply(model, s.param, x)?))).collect(),
    }
}

fn nan_row(n: usize) -> Vec<String> {
    vec![num(f64::NAN); n]
}

pub fn compare(args: &CompareArgs) -> CliResult<()> {
    let model = with_crossings(&load(&args.io.model)?, args.crossings);
    let sweep = args.sweep.as_deref().map(parse_sweep).transpose()?;
    let window = args.window.as_deref().map(parse_window).transpose()?;
    if !(args.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol {} must be positive", args.tol)));
    }
    let oracle = OracleSettings { tolerance: args.tol, window, max_steps: args.max_steps };
    let initial = initial_level(args.initial, model.dim())?;
    let models = sweep_models(&model, sweep.as_ref())?;
    let dim = model.dim();
    let observable = |level: usize| format!("P{}_{}", level + 1, initial + 1);

    let mut failures: Vec<GaiaError> = Vec::new();
    match &model {
        Model::Grid(_) => {
            let rows: Vec<_> = models
                .par_iter()
                .map(|(_, m)| compare_grid(grid_only(m).expect("sweeps keep the model kind"), initial, &oracle))
                .collect();
            let cols = ["parameter", "observable", "P_gaia", "P_exact", "diff", "margin", "red_region", "status"];
            let mut w = writer(&args.io.out, &header(&cols))?;
            for ((x, _), row) in models.iter().zip(rows) {
                for level in 0..dim {
                    let mut rec = vec![num(*x), observable(level)];
                    match &row {
                        Ok(r) => rec.extend([
                            num(r.p_gaia[level]),
                            num(r.p_exact[level]),
                            num((r.p_gaia[level] - r.p_exact[level]).abs()),
                            num(r.margin),
                            r.red_region.to_string(),
                            "OK".into(),
                        ]),
                        Err(_) => {
                            rec.extend(nan_row(4));
                            rec.extend(["".into(), "ERROR".into()]);
                        }
                    }
                    w.write_record(&rec)?;
                }
                if let Err(e) = row {
                    failures.push(e);
                }
            }
            w.flush()?;
        }
        Model::Lzsm(_) | Model::SpinBoson(..) => {
            let rows: Vec<_> = models
                .par_iter()
                .map(|(_, m)| compare_lzsm(m.lzsm().expect("sweeps keep the model kind"), initial, &oracle))
                .collect();
            let cols = ["parameter", "time", "observable", "P_gaia", "P_exact", "diff", "status"];
            let mut w = writer(&args.io.out, &header(&cols))?;
            for ((x, _), rows) in models.iter().zip(rows) {
                match rows {
                    Ok(trace) => {
                        for r in &trace {
                            for level in 0..dim {
                                w.write_record([
                                    num(*x),
                                    num(r.time),
                                    observable(level),
                                    num(r.p_gaia[level]),
                                    num(r.p_exact[level]),
                                    num((r.p_gaia[level] - r.p_exact[level]).abs()),
                                    "OK".into(),
                                ])?;
                            }
                        }
                    }
                    Err(e) => {
                        let mut rec = vec![num(*x), num(f64::NAN), "".into()];
                        rec.extend(nan_row(3));
                        rec.push("ERROR".into());
                        w.write_record(&rec)?;
                        failures.push(e);
                    }
                }
            }
            w.flush()?;
        }
    }
    let failed_count = failures.len();
    match failures.into_iter().next() {
        None => Ok(()),
        Some(first) if first.is_validation() => Err(first.into()),
        Some(first) => Err(CliError::PartialFailure { failed: failed_count, total: models.len(), first }),
    }
}

fn gaia_error(e: CliError) -> GaiaError {
    match e {
        CliError::Gaia(g) => g,
        other => GaiaError::InvalidConfig(other.to_string()),
    }
}

pub fn interference(args: &InterferenceArgs) -> CliResult<()> {
    let model = load(&args.io.model)?;
    let sweep = parse_sweep(&args.sweep)?;
    let values = sweep.values();
    if values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(CliError::Usage("interference sweeps must increase".into()));
    }
    // surfaces parameter/model mismatches as usage errors before the scan
    apply(&model, sweep.param, values[0])?;
    match &model {
        Model::Grid(_) => {
            let family = |x: f64| -> GaiaResult<GridModel> {
                match apply(&model, sweep.param, x).map_err(gaia_error)? {
                    Model::Grid(m) => Ok(m),
                    _ => unreachable!("sweeps keep the model kind"),
                }
            };
            let zeros = p34_zeros(&family, &values)?;
            let mut w = writer(&args.io.out, &header(&["parameter", "P34"]))?;
            for z in zeros {
                let p = p34(&family(z)?)?.p34;
                if p <= ZERO_FLOOR {
                    w.write_record([num(z), num(p)])?;
                }
            }
            w.flush()?;
        }
        Model::Lzsm(_) | Model::SpinBoson(..) => {
            let family = |x: f64| -> GaiaResult<LzsmModel> {
                let m = apply(&model, sweep.param, x).map_err(gaia_error)?;
                Ok(m.lzsm().expect("sweeps keep the model kind").clone())
            };
            let sols = solve_destructive(&family, (sweep.start, sweep.stop), args.tol, sweep.count.max(2))?;
            let cols = ["parameter", "residual_1", "residual_2", "S11_abs2"];
            let mut w = writer(&args.io.out, &header(&cols))?;
            for x in sols {
                let r = destructive_condition(&family(x)?, args.tol)?;
                if r.holds {
                    w.write_record([num(x), num(r.residuals[0]), num(r.residuals[1]), num(r.s11.norm_sqr())])?;
                }
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn random_grid(rng: &mut ChaCha8Rng, kappa_max: f64) -> GaiaResult<GridModel> {
    let n = rng.gen_range(1..=6);
    let v = rng.gen_range(0.5..2.0);
    let eta = rng.gen_range(0.5..5.0);
    let mut a = Vec::with_capacity(n);
    let mut x = rng.gen_range(-5.0..5.0);
    for _ in 0..n {
        a.push(x);
        x += rng.gen_range(0.5..5.0);
    }
    // |b|² ≤ 2vκ_max keeps every κ below κ_max
    let bmax = (2.0 * v * kappa_max).sqrt();
    let b = CMat::from_fn(n, n, |_, _| Complex64::from_polar(bmax * rng.gen::<f64>(), rng.gen_range(-PI..PI)));
    build_grid(n, v, eta, a, b)
}

struct Check {
    name: &'static str,
    dim: usize,
    residual: f64,
    bound: f64,
}

/// Seeded unitarity and legacy-equivalence checks; the output depends only on the seed and count.
pub fn selfcheck(args: &SelfcheckArgs) -> CliResult<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut checks = Vec::new();
    for _ in 0..args.count {
        let m = random_grid(&mut rng, 2.0)?;
        let s = smatrix_grid(&m)?;
        checks.push(Check { name: "grid_unitarity", dim: m.dim(), residual: s.unitarity_residual(), bound: 1e-12 });
    }
    for _ in 0..args.count {
        let m = random_grid(&mut rng, 1.0)?;
        let legacy = smatrix_legacy(&m)?.smatrix;
        let s = smatrix_grid(&m)?;
        let residual = max_abs_diff(legacy.matrix(), s.matrix());
        checks.push(Check { name: "legacy_equivalence", dim: m.dim(), residual, bound: 1e-10 });
    }
    for _ in 0..args.count {
        let n_boson = rng.gen_range(1..=5);
        let (delta, gamma) = (rng.gen_range(0.0..0.5), rng.gen_range(0.0..0.5));
        let omega = rng.gen_range(0.05..0.4);
        let m = build_spin_boson(delta, gamma, omega, 1.0, rng.gen_range(2.0..20.0), n_boson, 20)?;
        let (_, s) = propagate_lzsm(&m, &basis_state(m.dim(), 0), 20)?;
        checks.push(Check { name: "lzsm_unitarity", dim: m.dim(), residual: s.unitarity_residual(), bound: 1e-12 });
    }
    let mut w = writer(&args.out, &header(&["check", "index", "dim", "residual", "bound", "pass"]))?;
    let mut failed = 0;
    for (k, c) in checks.iter().enumerate() {
        let pass = c.residual <= c.bound;
        failed += usize::from(!pass);
        w.write_record([c.name.to_string(), k.to_string(), c.dim.to_string(), num(c.residual), num(c.bound), pass.to_string()])?;
    }
    w.flush()?;
    if failed > 0 {
        return Err(CliError::ChecksFailed { failed, total: checks.len() });
    }
    Ok(())
}
