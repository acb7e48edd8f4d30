//! Exact diagonalisation over mixed qubit/qutrit sites.
//!
//! A [`SpinSystem`] is a z-diagonal Hamiltonian plus the set of sites the
//! transverse driver acts on. The anneal interpolates
//! `H(s) = (1 - s)·sign·Σ X + s·H_final`; at `s = 1` everything is diagonal
//! and solved exactly by sorting.

mod anneal;
mod conditions;
mod eigen;
mod metrics;
mod operator;


use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basis::{total_dimension, z_value};
use crate::gadgets::{GadgetError, PhysicalProgram, SiteRole};
use crate::model::LogicalModel;
use crate::sign::Sign;

pub use crate::gadgets::{gadget_groundspace_oracle, GroundSpace};
pub use anneal::{anneal_gap_profile, AnnealSchedule, GapProfile};
pub use conditions::{check_conditions, projector_commutator, ConditionsReport};
pub use eigen::{ground_state, lowest_eigs, SolverMethod, SpectrumResult};
pub use metrics::{
    brute_force_logical_ground, decode_logical, delta_e, metric_chi, metric_delta_e,
    program_ground_configuration, ChiResult, DeltaE, MAX_BRUTE_FORCE_LOGICALS,
};
pub use operator::{assemble, AssembledOperator};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("Hilbert space dimension {dim} exceeds the cap {cap}")]
    DimensionTooLarge { dim: u128, cap: usize },
    #[error("schedule point s = {0} outside [0, 1]")]
    InvalidSchedulePoint(f64),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("requested {k} eigenvalues of a {dim}-dimensional operator")]
    InvalidK { k: usize, dim: usize },
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("brute force supports at most {max} logicals, got {n}")]
    TooManyLogicals { n: usize, max: usize },
    #[error("conditions check needs a dense-sized system (dimension {dim} > {cap}); use N <= 3")]
    ConditionsTooLarge { dim: u128, cap: usize },
    #[error(transparent)]
    Gadget(#[from] GadgetError),
}

/// Solver knobs. Defaults: tolerance 1e-10, dense below 4096 states,
/// dimension cap 2^26, degeneracy threshold 1e-8.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub dense_max: usize,
    pub max_dim: usize,
    pub degeneracy_threshold: f64,
    pub krylov_dim: usize,
    pub max_restarts: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            dense_max: 4096,
            max_dim: 1 << 26,
            degeneracy_threshold: 1e-8,
            krylov_dim: 120,
            max_restarts: 200,
        }
    }
}

/// Transverse driver convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Driver {
    /// `Minus` gives `-Σ X` with the all-|+> ground state.
    pub sign: Sign,
    pub drive_ancillas: bool,
}

impl Default for Driver {
    fn default() -> Self {
        Self {
            sign: Sign::Minus,
            drive_ancillas: true,
        }
    }
}

impl Driver {
    /// Short tag recorded in output rows, e.g. `driver=-1;anc=1`.
    pub fn tag(&self) -> String {
        format!(
            "driver={:+};anc={}",
            self.sign.value(),
            u8::from(self.drive_ancillas)
        )
    }
}

/// Per-site dimensions; site 0 is least significant in the state index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertSpec {
    pub site_dims: Vec<usize>,
}

impl HilbertSpec {
    pub fn total_dim(&self) -> u128 {
        total_dimension(&self.site_dims)
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.site_dims.len());
        let mut acc = 1usize;
        for &d in &self.site_dims {
            out.push(acc);
            acc = acc.saturating_mul(d);
        }
        out
    }

    fn checked_dim(&self, cap: usize) -> Result<usize, SpectralError> {
        let dim = self.total_dim();
        if dim > cap as u128 {
            return Err(SpectralError::DimensionTooLarge { dim, cap });
        }
        Ok(dim as usize)
    }
}

/// One diagonal contribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DiagonalTerm {
    /// `coeff · Π z_site`.
    Product { sites: Vec<usize>, coeff: f64 },
    /// Value per local state of `sites` (mixed radix, first site least
    /// significant).
    Table { sites: Vec<usize>, values: Vec<f64> },
}

/// A z-diagonal Hamiltonian and the sites the driver acts on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinSystem {
    pub hilbert: HilbertSpec,
    pub terms: Vec<DiagonalTerm>,
    pub driven: Vec<bool>,
}

impl SpinSystem {
    /// Logical spins as qubits, site `k-1` for logical `k`, all driven.
    pub fn from_logical(model: &LogicalModel) -> Self {
        let terms = model
            .terms()
            .into_iter()
            .map(|(key, coeff)| DiagonalTerm::Product {
                sites: key.iter().map(|k| k - 1).collect(),
                coeff,
            })
            .collect();
        Self {
            hilbert: HilbertSpec {
                site_dims: vec![2; model.n()],
            },
            terms,
            driven: vec![true; model.n()],
        }
    }

    /// Program fields as single-site terms, each constraint group as an
    /// exact energy table scaled by Δ (ground energy 0).
    pub fn from_program(program: &PhysicalProgram, driver: &Driver) -> Self {
        let mut terms: Vec<DiagonalTerm> = program
            .logical_fields
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(p, &coeff)| DiagonalTerm::Product {
                sites: vec![p],
                coeff,
            })
            .collect();
        for g in &program.groups {
            let values = g
                .gadget
                .energy_table()
                .into_iter()
                .map(|e| program.delta * crate::gadgets::to_f64(e))
                .collect();
            terms.push(DiagonalTerm::Table {
                sites: g.sites.clone(),
                values,
            });
        }
        let driven = program
            .sites
            .iter()
            .map(|s| matches!(s.role, SiteRole::Physical { .. }) || driver.drive_ancillas)
            .collect();
        Self {
            hilbert: HilbertSpec {
                site_dims: program.site_dims(),
            },
            terms,
            driven,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.hilbert.site_dims.len()
    }

    /// Energy of every basis state.
    pub fn diagonal(&self, cap: usize) -> Result<Vec<f64>, SpectralError> {
        let dim = self.hilbert.checked_dim(cap)?;
        let dims = &self.hilbert.site_dims;
        let strides = self.hilbert.strides();
        let mut diag = vec![0.0; dim];
        for term in &self.terms {
            match term {
                DiagonalTerm::Product { sites, coeff } => {
                    for (idx, d) in diag.iter_mut().enumerate() {
                        let mut z = 1i64;
                        for &s in sites {
                            z *= z_value(dims[s], (idx / strides[s]) % dims[s]);
                        }
                        *d += coeff * z as f64;
                    }
                }
                DiagonalTerm::Table { sites, values } => {
                    for (idx, d) in diag.iter_mut().enumerate() {
                        let mut local = 0;
                        let mut mult = 1;
                        for &s in sites {
                            local += ((idx / strides[s]) % dims[s]) * mult;
                            mult *= dims[s];
                        }
                        *d += values[local];
                    }
                }
            }
        }
        Ok(diag)
    }

    /// The same system with site `k` moved to position `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n_sites();
        assert_eq!(perm.len(), n);
        let mut dims = vec![0; n];
        let mut driven = vec![false; n];
        for k in 0..n {
            dims[perm[k]] = self.hilbert.site_dims[k];
            driven[perm[k]] = self.driven[k];
        }
        let terms = self
            .terms
            .iter()
            .map(|t| match t {
                DiagonalTerm::Product { sites, coeff } => DiagonalTerm::Product {
                    sites: sites.iter().map(|&s| perm[s]).collect(),
                    coeff: *coeff,
                },
                DiagonalTerm::Table { sites, values } => DiagonalTerm::Table {
                    sites: sites.iter().map(|&s| perm[s]).collect(),
                    values: values.clone(),
                },
            })
            .collect();
        Self {
            hilbert: HilbertSpec { site_dims: dims },
            terms,
            driven,
        }
    }

    /// Builds the diagonal once for repeated assembly at many `s`.
    pub fn prepare(
        &self,
        driver: &Driver,
        opts: &SolverOptions,
    ) -> Result<PreparedSystem, SpectralError> {
        Ok(PreparedSystem {
            dims: self.hilbert.site_dims.clone(),
            diagonal: Arc::new(self.diagonal(opts.max_dim)?),
            driven: self.driven.clone(),
            driver_sign: driver.sign.as_f64(),
        })
    }
}

/// A spin system with its diagonal evaluated, ready to assemble at any `s`.
#[derive(Clone, Debug)]
pub struct PreparedSystem {
    pub dims: Vec<usize>,
    pub diagonal: Arc<Vec<f64>>,
    pub driven: Vec<bool>,
    pub driver_sign: f64,
}

impl PreparedSystem {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }
}
