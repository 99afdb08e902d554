//! JSON model files.
//!
//! ```json
//! {"type": "grid", "N": 2, "v": 1.0, "eta": 1.0, "a": [0.0, 20.0],
//!  "b": [[{"re": 0.5, "im": 0.0}, {"re": 1.0, "im": 0.0}],
//!        [{"re": 1.0, "im": 0.0}, {"re": 0.5, "im": 0.0}]]}
//! ```
//!
//! Unknown keys are rejected. Spin–boson files carry `n_boson`, `Delta`,
//! `gamma` and `Omega` instead of `N`, `a` and `b`.

use super::{build_grid, build_lzsm, build_spin_boson, GridModel, LzsmModel, TwoBand};
use crate::error::{GaiaError, Result};
use crate::linalg::CMat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Crossing groups propagated when a file does not say otherwise.
pub const DEFAULT_CROSSINGS: usize = 20;
/// Boson truncation used when a spin–boson file omits `n_boson`.
pub const DEFAULT_N_BOSON: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Grid,
    Lzsm,
    SpinBoson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(rename = "type")]
    pub kind: ModelKind,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_boson: Option<usize>,
    pub v: f64,
    pub eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<ComplexEntry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossings: Option<usize>,
    #[serde(rename = "Delta", default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(rename = "Omega", default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

/// Spin–boson parameters kept alongside the LZSM model they generate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinBoson {
    pub delta: f64,
    pub gamma: f64,
    pub omega: f64,
    pub v: f64,
    pub eta: f64,
    pub n_boson: usize,
    pub crossings: usize,
}

impl SpinBoson {
    pub fn build(&self) -> Result<LzsmModel> {
        build_spin_boson(self.delta, self.gamma, self.omega, self.v, self.eta, self.n_boson, self.crossings)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Grid(GridModel),
    Lzsm(LzsmModel),
    SpinBoson(SpinBoson, LzsmModel),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Grid(_) => ModelKind::Grid,
            Model::Lzsm(_) => ModelKind::Lzsm,
            Model::SpinBoson(..) => ModelKind::SpinBoson,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Model::Grid(m) => m.dim(),
            Model::Lzsm(m) | Model::SpinBoson(_, m) => m.dim(),
        }
    }

    /// The driven model, for LZSM and spin–boson files.
    pub fn lzsm(&self) -> Option<&LzsmModel> {
        match self {
            Model::Grid(_) => None,
            Model::Lzsm(m) | Model::SpinBoson(_, m) => Some(m),
        }
    }
}

fn invalid(msg: impl Into<String>) -> GaiaError {
    GaiaError::InvalidConfig(msg.into())
}

fn forbid<T>(field: &Option<T>, name: &str, kind: &str) -> Result<()> {
    if field.is_some() {
        Err(invalid(format!("key `{name}` is not allowed for type `{kind}`")))
    } else {
        Ok(())
    }
}

fn require<T: Clone>(field: &Option<T>, name: &str) -> Result<T> {
    field.clone().ok_or_else(|| invalid(format!("missing key `{name}`")))
}

fn block_from_rows(rows: &[Vec<ComplexEntry>], n: usize) -> Result<CMat> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(GaiaError::ShapeMismatch {
            expected: format!("{n}x{n} coupling block"),
            found: format!("{} rows of lengths {:?}", rows.len(), rows.iter().map(Vec::len).collect::<Vec<_>>()),
        });
    }
    Ok(CMat::from_fn(n, n, |r, c| Complex64::new(rows[r][c].re, rows[r][c].im)))
}

fn rows_from_block(b: &CMat) -> Vec<Vec<ComplexEntry>> {
    (0..b.nrows())
        .map(|r| (0..b.ncols()).map(|c| ComplexEntry { re: b[(r, c)].re, im: b[(r, c)].im }).collect())
        .collect()
}

impl ModelFile {
    pub fn into_model(self) -> Result<Model> {
        match self.kind {
            ModelKind::Grid | ModelKind::Lzsm => {
                let kind = if self.kind == ModelKind::Grid { "grid" } else { "lzsm" };
                forbid(&self.n_boson, "n_boson", kind)?;
                forbid(&self.delta, "Delta", kind)?;
                forbid(&self.gamma, "gamma", kind)?;
                forbid(&self.omega, "Omega", kind)?;
                let n = require(&self.n, "N")?;
                let a = require(&self.a, "a")?;
                let b = block_from_rows(&require(&self.b, "b")?, n)?;
                if self.kind == ModelKind::Grid {
                    forbid(&self.crossings, "crossings", kind)?;
                    Ok(Model::Grid(build_grid(n, self.v, self.eta, a, b)?))
                } else {
                    let k = self.crossings.unwrap_or(DEFAULT_CROSSINGS);
                    Ok(Model::Lzsm(build_lzsm(n, self.v, self.eta, a, b, k)?))
                }
            }
            ModelKind::SpinBoson => {
                forbid(&self.n, "N", "spin_boson")?;
                forbid(&self.a, "a", "spin_boson")?;
                forbid(&self.b, "b", "spin_boson")?;
                let sb = SpinBoson {
                    delta: require(&self.delta, "Delta")?,
                    gamma: require(&self.gamma, "gamma")?,
                    omega: require(&self.omega, "Omega")?,
                    v: self.v,
                    eta: self.eta,
                    n_boson: self.n_boson.unwrap_or(DEFAULT_N_BOSON),
                    crossings: self.crossings.unwrap_or(DEFAULT_CROSSINGS),
                };
                let m = sb.build()?;
                Ok(Model::SpinBoson(sb, m))
            }
        }
    }

    pub fn from_model(model: &Model) -> ModelFile {
        let empty = ModelFile {
            kind: model.kind(),
            n: None,
            n_boson: None,
            v: 0.0,
            eta: 0.0,
            a: None,
            b: None,
            crossings: None,
            delta: None,
            gamma: None,
            omega: None,
        };
        match model {
            Model::Grid(m) => ModelFile {
                n: Some(m.n()),
                v: m.v(),
                eta: m.eta(),
                a: Some(m.offsets().to_vec()),
                b: Some(rows_from_block(m.couplings())),
                ..empty
            },
            Model::Lzsm(m) => ModelFile {
                n: Some(m.n()),
                v: m.v(),
                eta: m.eta(),
                a: Some(m.offsets().to_vec()),
                b: Some(rows_from_block(m.couplings())),
                crossings: Some(m.n_crossings()),
                ..empty
            },
            Model::SpinBoson(sb, _) => ModelFile {
                n_boson: Some(sb.n_boson),
                v: sb.v,
                eta: sb.eta,
                crossings: Some(sb.crossings),
                delta: Some(sb.delta),
                gamma: Some(sb.gamma),
                omega: Some(sb.omega),
                ..empty
            },
        }
    }
}

/// Parses and validates a model file.
pub fn parse_model(json: &str) -> Result<Model> {
    let file: ModelFile = serde_json::from_str(json).map_err(|e| invalid(format!("model file: {e}")))?;
    file.into_model()
}

pub fn model_to_json(model: &Model) -> String {
    serde_json::to_string_pretty(&ModelFile::from_model(model)).expect("model files always serialize")
}
