use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{generate_instance, LabError};
use crate::code::{build_square_lattice, NuPolicy, ParityCode};
use crate::gadgets::{compile_program, Strength, Variant};
use crate::model::LogicalModel;
use crate::spectral::{
    anneal_gap_profile, assemble, lowest_eigs, metric_chi, AnnealSchedule, Driver, GapProfile,
    PreparedSystem, SolverOptions, SpinSystem,
};

/// Environment variable holding the worker count for sweeps.
pub const WORKERS_ENV: &str = "ANNEAL_LAB_WORKERS";

/// χ values below this are counted as near-zero in the summary.
pub const NEAR_ZERO_CHI: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Final gaps and full anneal profiles (δe and χ).
    Full,
    /// Final gaps only (δe); χ columns stay empty.
    FinalGapOnly,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub n_logical: usize,
    pub variants: Vec<Variant>,
    /// `None` picks all-even for `even_qutrit` and `formal`, all-odd otherwise.
    pub nu_policy: Option<NuPolicy>,
    /// Custom code used for every variant instead of the square lattice.
    pub code: Option<ParityCode>,
    /// Coefficients are drawn from [-J, J]; `J_av = J / 2`.
    pub j_scale: f64,
    /// Values of `R = Δ / J_av`.
    pub r_grid: Vec<f64>,
    pub instances: usize,
    pub base_seed: u64,
    pub schedule: AnnealSchedule,
    pub solver: SolverOptions,
    pub driver: Driver,
    pub ratio: Option<Strength>,
    pub mode: SweepMode,
    /// Overrides the worker count from the environment.
    pub workers: Option<usize>,
}

/// 25 points spaced geometrically from 1 to 1000.
pub fn default_r_grid() -> Vec<f64> {
    (0..25).map(|i| 10f64.powf(3.0 * i as f64 / 24.0)).collect()
}

impl ExperimentConfig {
    pub fn new(n_logical: usize, variants: Vec<Variant>) -> Self {
        Self {
            n_logical,
            variants,
            nu_policy: None,
            code: None,
            j_scale: 1.0,
            r_grid: default_r_grid(),
            instances: 1,
            base_seed: 0,
            schedule: AnnealSchedule::default(),
            solver: SolverOptions::default(),
            driver: Driver::default(),
            ratio: None,
            mode: SweepMode::Full,
            workers: None,
        }
    }

    pub fn j_av(&self) -> f64 {
        self.j_scale / 2.0
    }

    /// `Δ = R · J / 2`.
    pub fn delta_for(&self, r: f64) -> f64 {
        r * self.j_scale / 2.0
    }

    pub fn instance_seed(&self, instance_id: u64) -> u64 {
        self.base_seed ^ instance_id
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let bad = |m: &str| Err(LabError::InvalidConfig(m.to_string()));
        if !(self.j_scale.is_finite() && self.j_scale > 0.0) {
            return bad("J must be positive");
        }
        if self.instances == 0 {
            return bad("need at least one instance");
        }
        if self.variants.is_empty() {
            return bad("need at least one variant");
        }
        if self.r_grid.is_empty() || self.r_grid.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return bad("R values must be positive");
        }
        if self.n_logical < 2 && self.code.is_none() {
            return bad("square lattice needs N >= 2");
        }
        if let Some(code) = &self.code {
            if code.n_logical() != self.n_logical {
                return bad("custom code logical count differs from N");
            }
        }
        if self.workers == Some(0) {
            return bad("worker count must be positive");
        }
        self.schedule
            .validate()
            .map_err(|e| LabError::InvalidConfig(e.to_string()))
    }

    fn code_for(&self, variant: Variant) -> Result<ParityCode, LabError> {
        if let Some(code) = &self.code {
            return Ok(code.clone());
        }
        let nu = self.nu_policy.clone().unwrap_or(match variant {
            Variant::EvenQutrit | Variant::Formal => NuPolicy::AllEven,
            Variant::OddQubit | Variant::Mbody => NuPolicy::AllOdd,
        });
        Ok(build_square_lattice(self.n_logical, &nu)?)
    }

    fn worker_count(&self) -> Option<usize> {
        self.workers
            .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()))
            .filter(|&w| w > 0)
    }
}

/// One (variant, R, instance) result. Column order is the CSV schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub seed: u64,
    pub instance_id: u64,
    #[serde(rename = "N")]
    pub n: usize,
    pub variant: Variant,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    pub e_logic: Option<f64>,
    pub e_phys: Option<f64>,
    pub delta_e: Option<f64>,
    pub min_gap_logic: Option<f64>,
    pub min_gap_phys: Option<f64>,
    pub chi: Option<f64>,
    /// `;`-separated flags; always includes the driver tag.
    pub flags: String,
    pub solver_ms: f64,
}

impl SweepRecord {
    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags
            .split(';')
            .any(|f| f == flag || f.starts_with(&format!("{flag}:")))
    }

    /// χ usable in the reciprocal mean: present, positive, not flagged.
    pub fn chi_averageable(&self) -> bool {
        self.chi.is_some_and(|c| c > 0.0) && !self.has_flag("phys_gap_closed")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub variant: Variant,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    pub instances: usize,
    pub errors: usize,
    pub mean_delta_e: Option<f64>,
    pub median_delta_e: Option<f64>,
    /// `1 / mean(1/χ)` over non-flagged instances.
    pub chi_bar: Option<f64>,
    pub chi_used: usize,
    pub chi_excluded: usize,
    /// Instances with `χ < 0.01`, closures included.
    pub near_zero_chi: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    pub summary: Vec<SummaryRow>,
}

struct LogicalData {
    id: u64,
    seed: u64,
    model: LogicalModel,
    e_logic: Result<f64, String>,
    profile: Option<Result<GapProfile, String>>,
}

fn final_gap(
    system: &SpinSystem,
    config: &ExperimentConfig,
) -> Result<(f64, PreparedSystem), String> {
    let prepared = system
        .prepare(&config.driver, &config.solver)
        .map_err(|e| e.to_string())?;
    let op = assemble(&prepared, 1.0).map_err(|e| e.to_string())?;
    let spec = lowest_eigs(&op, 2, &config.solver).map_err(|e| e.to_string())?;
    Ok((spec.eigenvalues[1] - spec.eigenvalues[0], prepared))
}

fn logical_data(config: &ExperimentConfig, id: u64) -> Result<LogicalData, LabError> {
    let seed = config.instance_seed(id);
    let model = generate_instance(config.n_logical, config.j_scale, seed)?;
    let system = SpinSystem::from_logical(&model);
    let (e_logic, profile) = match final_gap(&system, config) {
        Ok((e, prepared)) => {
            let profile = (config.mode == SweepMode::Full).then(|| {
                anneal_gap_profile(&prepared, &config.schedule, &config.solver)
                    .map_err(|e| e.to_string())
            });
            (Ok(e), profile)
        }
        Err(e) => (Err(e), None),
    };
    Ok(LogicalData {
        id,
        seed,
        model,
        e_logic,
        profile,
    })
}

fn run_one(
    config: &ExperimentConfig,
    code: &ParityCode,
    variant: Variant,
    r: f64,
    data: &LogicalData,
) -> SweepRecord {
    let start = Instant::now();
    let delta = config.delta_for(r);
    let mut flags = vec![config.driver.tag()];
    let mut record = SweepRecord {
        seed: data.seed,
        instance_id: data.id,
        n: config.n_logical,
        variant,
        r,
        delta,
        e_logic: data.e_logic.as_ref().ok().copied(),
        e_phys: None,
        delta_e: None,
        min_gap_logic: None,
        min_gap_phys: None,
        chi: None,
        flags: String::new(),
        solver_ms: 0.0,
    };
    let result: Result<(), String> = (|| {
        let e_logic = data.e_logic.clone()?;
        let program = compile_program(&data.model, code, variant, delta, config.ratio)
            .map_err(|e| e.to_string())?;
        if !program.split_labels.is_empty() {
            flags.push("split_duplicate_labels".into());
        }
        let system = SpinSystem::from_program(&program, &config.driver);
        let (e_phys, prepared) = final_gap(&system, config)?;
        record.e_phys = Some(e_phys);
        record.delta_e = Some((e_logic - e_phys).abs());
        match &data.profile {
            None => flags.push("chi_skipped".into()),
            Some(logical) => {
                let logical = logical.clone()?;
                let physical = anneal_gap_profile(&prepared, &config.schedule, &config.solver)
                    .map_err(|e| e.to_string())?;
                let chi = metric_chi(&logical, &physical);
                record.min_gap_logic = Some(chi.min_gap_logic);
                record.min_gap_phys = Some(chi.min_gap_phys);
                record.chi = chi.chi;
                flags.extend(chi.flags);
            }
        }
        Ok(())
    })();
    if let Err(e) = result {
        flags.push(format!("error:{e}"));
    }
    record.flags = flags.join(";");
    record.solver_ms = (start.elapsed().as_secs_f64() * 1e6).round() / 1e3;
    record
}

/// Runs every (variant, R, instance) task on a bounded worker pool.
/// Records come back in (variant, R, instance) order whatever the
/// scheduling; per-task failures become `error:` flags.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepOutput, LabError> {
    config.validate()?;
    let codes: Vec<ParityCode> = config
        .variants
        .iter()
        .map(|&v| config.code_for(v))
        .collect::<Result<_, _>>()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.worker_count() {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| LabError::InvalidConfig(format!("worker pool: {e}")))?;

    let records = pool.install(|| -> Result<Vec<SweepRecord>, LabError> {
        let logical: Vec<LogicalData> = (0..config.instances as u64)
            .into_par_iter()
            .map(|id| logical_data(config, id))
            .collect::<Result<_, _>>()?;
        let tasks: Vec<(usize, usize, usize)> = (0..config.variants.len())
            .flat_map(|v| {
                (0..config.r_grid.len())
                    .flat_map(move |r| (0..config.instances).map(move |i| (v, r, i)))
            })
            .collect();
        let mut records: Vec<SweepRecord> = tasks
            .par_iter()
            .map(|&(v, r, i)| {
                run_one(
                    config,
                    &codes[v],
                    config.variants[v],
                    config.r_grid[r],
                    &logical[i],
                )
            })
            .collect();
        let variant_rank: BTreeMap<Variant, usize> = config
            .variants
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        records.sort_by(|a, b| {
            variant_rank[&a.variant]
                .cmp(&variant_rank[&b.variant])
                .then(a.r.total_cmp(&b.r))
                .then(a.instance_id.cmp(&b.instance_id))
        });
        Ok(records)
    })?;
    let summary = summarise(&records);
    Ok(SweepOutput { records, summary })
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    })
}

/// One row per (variant, R), in first-appearance order.
pub fn summarise(records: &[SweepRecord]) -> Vec<SummaryRow> {
    let mut order: Vec<(Variant, u64)> = Vec::new();
    let mut groups: BTreeMap<(Variant, u64), Vec<&SweepRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.variant, r.r.to_bits());
        if !groups.contains_key(&key) {
            order.push(key);
        }
        groups.entry(key).or_default().push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let rows = &groups[&key];
            let delta_es: Vec<f64> = rows.iter().filter_map(|r| r.delta_e).collect();
            let used: Vec<f64> = rows
                .iter()
                .filter(|r| r.chi_averageable())
                .filter_map(|r| r.chi)
                .collect();
            let with_profile = rows
                .iter()
                .filter(|r| !r.has_flag("chi_skipped") && !r.has_flag("error"))
                .count();
            SummaryRow {
                variant: key.0,
                r: rows[0].r,
                delta: rows[0].delta,
                instances: rows.len(),
                errors: rows.iter().filter(|r| r.has_flag("error")).count(),
                mean_delta_e: (!delta_es.is_empty())
                    .then(|| delta_es.iter().sum::<f64>() / delta_es.len() as f64),
                median_delta_e: median(delta_es),
                chi_bar: (!used.is_empty())
                    .then(|| used.len() as f64 / used.iter().map(|c| 1.0 / c).sum::<f64>()),
                chi_used: used.len(),
                chi_excluded: with_profile - used.len(),
                near_zero_chi: rows
                    .iter()
                    .filter(|r| r.chi.is_some_and(|c| c < NEAR_ZERO_CHI))
                    .count(),
            }
        })
        .collect()
}

pub fn write_records_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<(), LabError> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record([
            "seed",
            "instance_id",
            "N",
            "variant",
            "R",
            "Delta",
            "e_logic",
            "e_phys",
            "delta_e",
            "min_gap_logic",
            "min_gap_phys",
            "chi",
            "flags",
            "solver_ms",
        ])?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<(), LabError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
