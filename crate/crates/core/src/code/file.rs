//! JSON code files.
//!
//! ```json
//! {
//!   "n_logical": 2,
//!   "spins": [[0,1], [0,2], [1,2]],
//!   "stabilisers": [{"spins": [[0,1],[0,2],[1,2]], "nu": -1, "face": "[0,2]"}],
//!   "logical_z": [[0,1], [0,2]]
//! }
//! ```
//!
//! Spin ids are either `[i, j]` coordinate pairs or strings.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CodeError, CodeLayout, ParityCode, SpinId, Stabiliser};
use crate::gf2::SupportVector;
use crate::sign::Sign;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabiliserEntry {
    pub spins: Vec<SpinId>,
    pub nu: Sign,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub face: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    pub n_logical: usize,
    pub spins: Vec<SpinId>,
    pub stabilisers: Vec<StabiliserEntry>,
    pub logical_z: Vec<SpinId>,
}

impl CodeFile {
    pub fn from_code(code: &ParityCode) -> Self {
        let layout = code.layout();
        CodeFile {
            n_logical: layout.n_logical,
            spins: layout.spins.clone(),
            stabilisers: layout
                .stabilisers
                .iter()
                .map(|s| StabiliserEntry {
                    spins: s
                        .support
                        .iter_ones()
                        .map(|i| layout.spins[i].clone())
                        .collect(),
                    nu: s.nu,
                    face: Some(s.face_id.clone()),
                })
                .collect(),
            logical_z: layout
                .logical_z
                .iter()
                .map(|&i| layout.spins[i].clone())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("code file serialises")
    }

    /// Resolves ids into a layout without checking code-level invariants.
    pub fn to_layout(&self) -> Result<CodeLayout, CodeError> {
        let mut seen = BTreeSet::new();
        for s in &self.spins {
            if !seen.insert(s) {
                return Err(CodeError::DuplicateSpin(s.to_string()));
            }
        }
        let n = self.spins.len();
        let lookup = |id: &SpinId, field: &str| -> Result<usize, CodeError> {
            self.spins
                .iter()
                .position(|s| s == id)
                .ok_or_else(|| CodeError::Schema {
                    field: field.to_string(),
                    message: format!("unknown spin id {id}"),
                })
        };
        let mut stabilisers = Vec::with_capacity(self.stabilisers.len());
        for (k, entry) in self.stabilisers.iter().enumerate() {
            let face_id = entry.face.clone().unwrap_or_else(|| format!("S{k}"));
            let field = format!("stabilisers[{k}].spins");
            let mut idx = Vec::with_capacity(entry.spins.len());
            for id in &entry.spins {
                let i = lookup(id, &field)?;
                if idx.contains(&i) {
                    return Err(CodeError::Schema {
                        field,
                        message: format!("spin {id} listed twice"),
                    });
                }
                idx.push(i);
            }
            if idx.is_empty() {
                return Err(CodeError::EmptyStabiliser(face_id));
            }
            stabilisers.push(Stabiliser {
                support: SupportVector::from_indices(n, &idx)?,
                nu: entry.nu,
                face_id,
            });
        }
        let logical_z = self
            .logical_z
            .iter()
            .enumerate()
            .map(|(k, id)| lookup(id, &format!("logical_z[{k}]")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CodeLayout {
            n_logical: self.n_logical,
            spins: self.spins.clone(),
            stabilisers,
            logical_z,
        })
    }
}

/// Parses a code file, mapping JSON errors to line/column diagnostics.
pub fn parse_code_file(text: &str) -> Result<CodeFile, CodeError> {
    serde_json::from_str(text).map_err(|e| CodeError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parses and validates a code, deriving logical X and labels.
pub fn load_custom_code(text: &str) -> Result<ParityCode, CodeError> {
    let file = parse_code_file(text)?;
    ParityCode::from_layout(file.to_layout()?)
}

pub fn read_code_file(path: &Path) -> Result<ParityCode, CodeError> {
    let text = std::fs::read_to_string(path).map_err(|e| CodeError::Parse {
        line: 0,
        column: 0,
        message: format!("{}: {e}", path.display()),
    })?;
    load_custom_code(&text)
}
