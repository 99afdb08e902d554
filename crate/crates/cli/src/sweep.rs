use crate::error::{CliError, CliResult};
use gaia_core::models::file::{Model, SpinBoson};
use gaia_core::{build_grid, build_lzsm, GaiaError, TwoBand};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    Eta,
    V,
    /// Offset step: a_k = a_0 + k·value.
    A,
    /// √(η/v)·a.
    X,
    Delta,
    Gamma,
    Omega,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::Eta => "eta",
            Param::V => "v",
            Param::A => "a",
            Param::X => "x",
            Param::Delta => "Delta",
            Param::Gamma => "gamma",
            Param::Omega => "Omega",
        }
    }

    fn parse(s: &str) -> Option<Param> {
        [Param::Eta, Param::V, Param::A, Param::X, Param::Delta, Param::Gamma, Param::Omega]
            .into_iter()
            .find(|p| p.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: Param,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|k| if k + 1 == self.count { self.stop } else { self.start + k as f64 * step }).collect()
    }
}

fn number(s: &str, what: &str) -> CliResult<f64> {
    s.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| CliError::Usage(format!("{what}: `{s}` is not a finite number")))
}

/// Parses NAME=START:STOP:COUNT.
pub fn parse_sweep(s: &str) -> CliResult<Sweep> {
    let bad = || CliError::Usage(format!("sweep `{s}` is not NAME=START:STOP:COUNT"));
    let (name, range) = s.split_once('=').ok_or_else(bad)?;
    let param = Param::parse(name.trim())
        .ok_or_else(|| CliError::Usage(format!("unknown sweep parameter `{name}` (eta, v, a, x, Delta, gamma, Omega)")))?;
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count == 0 {
        return Err(CliError::Usage("sweep count must be at least 1".into()));
    }
    Ok(Sweep { param, start: number(parts[0], "sweep start")?, stop: number(parts[1], "sweep stop")?, count })
}

/// Parses START:STOP.
pub fn parse_window(s: &str) -> CliResult<(f64, f64)> {
    let (a, b) = s.split_once(':').ok_or_else(|| CliError::Usage(format!("window `{s}` is not START:STOP")))?;
    Ok((number(a, "window start")?, number(b, "window stop")?))
}

fn offsets_with_step(a: &[f64], step: f64) -> Vec<f64> {
    (0..a.len()).map(|k| a[0] + k as f64 * step).collect()
}

fn not_for(param: Param, kind: &str) -> CliError {
    CliError::Usage(format!("sweep parameter `{}` does not apply to {kind} models", param.name()))
}

/// Copy of `model` with `param` set to `value`.
pub fn apply(model: &Model, param: Param, value: f64) -> CliResult<Model> {
    match model {
        Model::Grid(m) => {
            let (mut v, mut eta, mut a) = (m.v(), m.eta(), m.offsets().to_vec());
            match param {
                Param::Eta => eta = value,
                Param::V => v = value,
                Param::A => a = offsets_with_step(&a, value),
                Param::X => a = offsets_with_step(&a, value * (v / eta).sqrt()),
                _ => return Err(not_for(param, "grid")),
            }
            Ok(Model::Grid(build_grid(m.n(), v, eta, a, m.couplings().clone())?))
        }
        Model::Lzsm(m) => {
            let (mut v, mut eta) = (m.v(), m.eta());
            match param {
                Param::Eta => eta = value,
                Param::V => v = value,
                _ => return Err(not_for(param, "lzsm")),
            }
            let built = build_lzsm(m.n(), v, eta, m.offsets().to_vec(), m.couplings().clone(), m.n_crossings())?;
            Ok(Model::Lzsm(built))
        }
        Model::SpinBoson(sb, _) => {
            let mut sb: SpinBoson = *sb;
            match param {
                Param::Eta => sb.eta = value,
                Param::V => sb.v = value,
                Param::Delta => sb.delta = value,
                Param::Gamma => sb.gamma = value,
                Param::Omega => sb.omega = value,
                Param::A | Param::X => return Err(not_for(param, "spin_boson")),
            }
            let built = sb.build()?;
            Ok(Model::SpinBoson(sb, built))
        }
    }
}

/// Current value of `param` in `model`.
pub fn current(model: &Model, param: Param) -> CliResult<f64> {
    let err = |kind: &str| not_for(param, kind);
    Ok(match (model, param) {
        (Model::Grid(m), Param::Eta) => m.eta(),
        (Model::Grid(m), Param::V) => m.v(),
        (Model::Grid(m), Param::A) => grid_step(m)?,
        (Model::Grid(m), Param::X) => grid_step(m)? * (m.eta() / m.v()).sqrt(),
        (Model::Grid(_), _) => return Err(err("grid")),
        (Model::Lzsm(m), Param::Eta) => m.eta(),
        (Model::Lzsm(m), Param::V) => m.v(),
        (Model::Lzsm(_), _) => return Err(err("lzsm")),
        (Model::SpinBoson(sb, _), p) => match p {
            Param::Eta => sb.eta,
            Param::V => sb.v,
            Param::Delta => sb.delta,
            Param::Gamma => sb.gamma,
            Param::Omega => sb.omega,
            _ => return Err(err("spin_boson")),
        },
    })
}

fn grid_step(m: &gaia_core::GridModel) -> CliResult<f64> {
    m.equidistant_step(1e-12)
        .ok_or_else(|| GaiaError::UnsupportedModel("offset sweeps need N ≥ 2 equidistant offsets".into()).into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sweeps() {
        let s = parse_sweep("x=10:40:4").unwrap();
        assert_eq!(s.param, Param::X);
        assert_eq!(s.values(), vec![10.0, 20.0, 30.0, 40.0]);
        assert_eq!(parse_sweep("eta=3:9:1").unwrap().values(), vec![3.0]);
        for bad in ["x=1:2", "q=1:2:3", "eta=1:2:0", "eta=a:2:3", "eta"] {
            assert!(matches!(parse_sweep(bad), Err(CliError::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn parses_windows() {
        assert_eq!(parse_window("-5:7.5").unwrap(), (-5.0, 7.5));
        assert!(parse_window("5").is_err());
    }
}
