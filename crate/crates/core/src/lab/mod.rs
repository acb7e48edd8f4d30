//! Random instances, model files and parameter sweeps.
//!
//! Instances come from ChaCha20 seeded with `seed_from_u64(seed)`. Each
//! coefficient takes one `u64` draw `x`, maps it to `u = (x >> 11) / (2^53 - 1)`
//! in the closed interval [0, 1], and returns `J (2u - 1)`. Draw order is
//! `h_1..h_N`, then `J_12, J_13, ..., J_(N-1)N`.

mod sweep;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::CodeError;
use crate::model::{LogicalModel, ModelError};

pub use sweep::{
    default_r_grid, run_sweep, summarise, write_records_csv, write_summary_csv, ExperimentConfig,
    SummaryRow, SweepMode, SweepOutput, SweepRecord, WORKERS_ENV,
};

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{what}: line {line}, column {column}: {message}")]
    Parse {
        what: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Uniform on the closed interval [-J, J].
fn draw(rng: &mut ChaCha20Rng, j: f64) -> f64 {
    let u = (rng.next_u64() >> 11) as f64 / ((1u64 << 53) - 1) as f64;
    j * (2.0 * u - 1.0)
}

/// Random model with every `h_i` and `J_ij` uniform in [-J, J].
pub fn generate_instance(n: usize, j: f64, seed: u64) -> Result<LogicalModel, LabError> {
    if !(j.is_finite() && j > 0.0) {
        return Err(LabError::InvalidConfig(format!(
            "J must be positive, got {j}"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut model = LogicalModel::new(n);
    for i in 1..=n {
        model.set_field(i, draw(&mut rng, j))?;
    }
    for i in 1..=n {
        for k in (i + 1)..=n {
            model.set_coupling(i, k, draw(&mut rng, j))?;
        }
    }
    Ok(model)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingEntry {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultibodyEntry {
    pub spins: Vec<usize>,
    pub value: f64,
}

/// On-disk model: `{"n", "h", "J": [{i, j, value}], "K": [{spins, value}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub n: usize,
    #[serde(default)]
    pub h: Vec<f64>,
    #[serde(rename = "J", default)]
    pub couplings: Vec<CouplingEntry>,
    #[serde(rename = "K", default)]
    pub multibody: Vec<MultibodyEntry>,
}

impl ModelFile {
    pub fn from_model(model: &LogicalModel) -> Self {
        Self {
            n: model.n(),
            h: model.fields().to_vec(),
            couplings: model
                .couplings()
                .iter()
                .map(|(&(i, j), &value)| CouplingEntry { i, j, value })
                .collect(),
            multibody: model
                .multibody()
                .iter()
                .map(|(spins, &value)| MultibodyEntry {
                    spins: spins.clone(),
                    value,
                })
                .collect(),
        }
    }

    pub fn to_model(&self) -> Result<LogicalModel, LabError> {
        let mut model = LogicalModel::new(self.n);
        if !self.h.is_empty() && self.h.len() != self.n {
            return Err(ModelError::FieldCount {
                expected: self.n,
                found: self.h.len(),
            }
            .into());
        }
        for (i, &v) in self.h.iter().enumerate() {
            model.set_field(i + 1, v)?;
        }
        for c in &self.couplings {
            model.set_coupling(c.i, c.j, c.value)?;
        }
        for k in &self.multibody {
            model.set_multibody(&k.spins, k.value)?;
        }
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model file serialises")
    }
}

pub(crate) fn json_error(what: &str, e: serde_json::Error) -> LabError {
    LabError::Parse {
        what: what.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn parse_model_file(text: &str) -> Result<LogicalModel, LabError> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| json_error("model file", e))?;
    file.to_model()
}

pub fn read_model_file(path: &std::path::Path) -> Result<LogicalModel, LabError> {
    parse_model_file(&std::fs::read_to_string(path)?)
}
