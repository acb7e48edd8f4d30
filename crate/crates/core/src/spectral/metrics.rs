use serde::{Deserialize, Serialize};

use super::conditions::{constraint_ground_energy, ground_mask};
use super::{
    assemble, ground_state, lowest_eigs, Driver, GapProfile, SolverOptions, SpectralError,
    SpinSystem,
};
use crate::basis::z_value;
use crate::gadgets::PhysicalProgram;
use crate::model::LogicalModel;

pub const MAX_BRUTE_FORCE_LOGICALS: usize = 24;

/// Exhaustive minimum of the logical energy. Configurations are visited in
/// lexicographic order with +1 before -1 and `z_1` most significant; the
/// first minimum wins.
pub fn brute_force_logical_ground(model: &LogicalModel) -> Result<(Vec<i8>, f64), SpectralError> {
    let n = model.n();
    if n > MAX_BRUTE_FORCE_LOGICALS {
        return Err(SpectralError::TooManyLogicals {
            n,
            max: MAX_BRUTE_FORCE_LOGICALS,
        });
    }
    let mut best: Option<(Vec<i8>, f64)> = None;
    let mut z = vec![1i8; n];
    for c in 0..1u64 << n {
        for (k, zk) in z.iter_mut().enumerate() {
            *zk = if (c >> (n - 1 - k)) & 1 == 0 { 1 } else { -1 };
        }
        let e = model.energy(&z);
        if best.as_ref().is_none_or(|(_, b)| e < *b) {
            best = Some((z.clone(), e));
        }
    }
    Ok(best.expect("at least one configuration"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaE {
    pub e_logic: f64,
    pub e_phys: f64,
    pub delta_e: f64,
    /// `min{E'_g - (E0 + E_g), e_logic}` from the subspace analysis.
    pub predicted_e_phys: Option<f64>,
}

fn final_gap(system: &SpinSystem, opts: &SolverOptions) -> Result<f64, SpectralError> {
    let prepared = system.prepare(&Driver::default(), opts)?;
    let spec = lowest_eigs(&assemble(&prepared, 1.0)?, 2, opts)?;
    Ok(spec.eigenvalues[1] - spec.eigenvalues[0])
}

/// `|e_logic - e_phys|` with both gaps taken at `s = 1`.
pub fn delta_e(
    logical: &SpinSystem,
    physical: &SpinSystem,
    opts: &SolverOptions,
) -> Result<DeltaE, SpectralError> {
    let e_logic = final_gap(logical, opts)?;
    let e_phys = final_gap(physical, opts)?;
    Ok(DeltaE {
        e_logic,
        e_phys,
        delta_e: (e_logic - e_phys).abs(),
        predicted_e_phys: None,
    })
}

/// [`delta_e`] for a model and its compiled program, plus the predicted
/// physical gap.
pub fn metric_delta_e(
    model: &LogicalModel,
    program: &PhysicalProgram,
    opts: &SolverOptions,
) -> Result<DeltaE, SpectralError> {
    let logical = SpinSystem::from_logical(model);
    let physical = SpinSystem::from_program(program, &Driver::default());
    let mut out = delta_e(&logical, &physical, opts)?;

    let diag = physical.diagonal(opts.max_dim)?;
    let mask = ground_mask(program, opts.max_dim)?;
    let e_prime_g = diag
        .iter()
        .zip(&mask)
        .filter(|(_, &m)| !m)
        .map(|(&e, _)| e)
        .fold(f64::INFINITY, f64::min);
    let (_, e_g) = brute_force_logical_ground(model)?;
    let e0 = constraint_ground_energy(program);
    out.predicted_e_phys = Some((e_prime_g - (e0 + e_g)).min(out.e_logic));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiResult {
    pub min_gap_logic: f64,
    pub min_gap_phys: f64,
    /// `None` when the logical minimum gap is degenerate.
    pub chi: Option<f64>,
    pub flags: Vec<String>,
}

impl ChiResult {
    /// Usable in a reciprocal-mean average: present and nonzero.
    pub fn averageable(&self) -> bool {
        self.chi.is_some_and(|c| c > 0.0)
    }
}

/// `χ = MinGap_phys / MinGap_logic` from two profiles on the same schedule.
pub fn metric_chi(logical: &GapProfile, physical: &GapProfile) -> ChiResult {
    let mut flags = Vec::new();
    let chi = if logical.min_gap <= 0.0 {
        flags.push("logic_gap_degenerate".to_string());
        None
    } else {
        if physical.min_gap <= 0.0 {
            flags.push("phys_gap_closed".to_string());
        }
        Some(physical.min_gap / logical.min_gap)
    };
    ChiResult {
        min_gap_logic: logical.min_gap,
        min_gap_phys: physical.min_gap,
        chi,
        flags,
    }
}

/// Logical configuration read from a program state: the sign of `<Z>` on
/// each logical-Z spin.
pub fn decode_logical(program: &PhysicalProgram, state: &[f64]) -> Vec<i8> {
    let dims = program.site_dims();
    let mut strides = Vec::with_capacity(dims.len());
    let mut acc = 1;
    for &d in &dims {
        strides.push(acc);
        acc *= d;
    }
    program
        .code
        .logical_z()
        .iter()
        .map(|&q| {
            let expectation: f64 = state
                .iter()
                .enumerate()
                .map(|(i, a)| a * a * z_value(dims[q], (i / strides[q]) % dims[q]) as f64)
                .sum();
            if expectation >= 0.0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Decoded logical configuration of the program's ground state at `s = 1`.
pub fn program_ground_configuration(
    program: &PhysicalProgram,
    opts: &SolverOptions,
) -> Result<Vec<i8>, SpectralError> {
    let driver = Driver::default();
    let prepared = SpinSystem::from_program(program, &driver).prepare(&driver, opts)?;
    let (_, state) = ground_state(&assemble(&prepared, 1.0)?, opts)?;
    Ok(decode_logical(program, &state))
}
