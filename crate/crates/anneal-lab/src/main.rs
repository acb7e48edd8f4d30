use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use parity_anneal::code::{
    adjacency_from_edges, build_square_lattice, build_tree_code, build_triangular_lattice,
    parse_code_file, read_code_file, verify_code, CodeFile, NuPolicy, ParityCode,
};
use parity_anneal::gadgets::{
    audit_table, compile_program, ratio_from_f64, PhysicalProgram, Variant,
};
use parity_anneal::lab::{
    default_r_grid, generate_instance, read_model_file, run_sweep, write_records_csv,
    write_summary_csv, ExperimentConfig, ModelFile, SweepMode, WORKERS_ENV,
};
use parity_anneal::model::LogicalModel;
use parity_anneal::spectral::{
    anneal_gap_profile, assemble, check_conditions, lowest_eigs, metric_chi, AnnealSchedule,
    Driver, SolverOptions, SpectralError, SpinSystem,
};
use parity_anneal::Sign;

/// `println!` that ignores a closed stdout, e.g. when piped into `head`.
macro_rules! out {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(
    name = "anneal-lab",
    version,
    about = "Parity-constraint annealer design and spectra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code file from a built-in layout.
    Design(DesignArgs),
    /// Structural checks on a code file.
    Verify {
        #[arg(long)]
        code: PathBuf,
    },
    /// Draw a random model file.
    Instance(InstanceArgs),
    /// Compile a model onto a code and describe the program.
    Compile(CompileArgs),
    /// Lowest eigenvalues of a logical model or compiled program.
    Spectrum(SpectrumArgs),
    /// Gap profile along the anneal.
    Anneal(AnnealArgs),
    /// Random-instance sweep over variants and R.
    Sweep(SweepArgs),
    /// Check the subspace conditions on a compiled program.
    Conditions(CompileArgs),
    /// Ancilla counts of the M-body gadgets against the published ones.
    GadgetAudit {
        #[arg(long, default_value_t = 8)]
        max_m: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Nu {
    Even,
    Odd,
}

impl Nu {
    fn policy(self) -> NuPolicy {
        match self {
            Nu::Even => NuPolicy::AllEven,
            Nu::Odd => NuPolicy::AllOdd,
        }
    }
}

#[derive(Args)]
#[command(group(ArgGroup::new("layout").required(true).args(["square", "triangular", "tree"])))]
struct DesignArgs {
    /// Square-cell lattice on N logicals.
    #[arg(long, value_name = "N")]
    square: Option<usize>,
    /// Square lattice with each cell split into triangles.
    #[arg(long, value_name = "N")]
    triangular: Option<usize>,
    /// Tree given as 1-based edges, e.g. "1-2,2-3,2-4".
    #[arg(long, value_name = "EDGES")]
    tree: Option<String>,
    #[arg(long, value_enum, default_value = "even")]
    nu: Nu,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long)]
    n: usize,
    /// Coefficients are uniform in [-J, J].
    #[arg(long, default_value_t = 1.0)]
    j_scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DeltaArgs {
    /// Constraint strength in units of J_av = J/2.
    #[arg(long = "R", value_name = "R", conflicts_with = "delta")]
    r: Option<f64>,
    /// Constraint strength in energy units.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    j_scale: f64,
    /// Coupling ratio of the odd-parity gadget.
    #[arg(long)]
    ratio: Option<f64>,
}

impl DeltaArgs {
    fn delta(&self) -> Result<f64, Failure> {
        match (self.delta, self.r) {
            (Some(d), _) => Ok(d),
            (None, Some(r)) => Ok(r * self.j_scale / 2.0),
            (None, None) => Err(Failure::invalid(anyhow!(
                "one of --R or --delta is required"
            ))),
        }
    }
}

#[derive(Args)]
struct CompileArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    variant: Variant,
    #[command(flatten)]
    strength: DeltaArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolverArgs {
    /// Largest dimension solved densely.
    #[arg(long, default_value_t = SolverOptions::default().dense_max)]
    dense_max: usize,
    /// Largest dimension attempted at all.
    #[arg(long, default_value_t = SolverOptions::default().max_dim)]
    max_dim: usize,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            dense_max: self.dense_max,
            max_dim: self.max_dim,
            ..SolverOptions::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DriverSign {
    Minus,
    Plus,
}

#[derive(Args)]
struct DriverArgs {
    /// `minus` is -ΣX, `plus` is +ΣX.
    #[arg(long, value_enum, default_value = "minus")]
    driver_sign: DriverSign,
    /// Leave ancilla sites out of the driver.
    #[arg(long)]
    undriven_ancillas: bool,
}

impl DriverArgs {
    fn driver(&self) -> Driver {
        Driver {
            sign: match self.driver_sign {
                DriverSign::Minus => Sign::Minus,
                DriverSign::Plus => Sign::Plus,
            },
            drive_ancillas: !self.undriven_ancillas,
        }
    }
}

/// A logical model, optionally compiled onto a code.
#[derive(Args)]
struct SystemArgs {
    #[arg(long)]
    model: PathBuf,
    /// Without a code the logical model itself is solved.
    #[arg(long, requires = "variant")]
    code: Option<PathBuf>,
    #[arg(long)]
    variant: Option<Variant>,
    #[command(flatten)]
    strength: DeltaArgs,
    #[command(flatten)]
    driver: DriverArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Anneal parameter; 1 is the final Hamiltonian.
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    #[arg(long, default_value_t = 4)]
    k: usize,
}

#[derive(Args)]
struct AnnealArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long, default_value_t = 101)]
    points: usize,
    #[arg(long)]
    no_refine: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Full,
    FinalGap,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_value = "even_qutrit,odd_qubit")]
    variants: Vec<Variant>,
    /// Comma-separated R values; default is 25 geometric points in [1, 1000].
    #[arg(long, value_delimiter = ',')]
    r_grid: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    j_scale: f64,
    /// Stabiliser signs; default is even for even_qutrit/formal, odd otherwise.
    #[arg(long, value_enum)]
    nu: Option<Nu>,
    /// Use this code for every variant instead of the square lattice.
    #[arg(long)]
    code: Option<PathBuf>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long, default_value_t = 101)]
    points: usize,
    #[arg(long)]
    no_refine: bool,
    #[arg(long, value_enum, default_value = "full")]
    mode: Mode,
    #[command(flatten)]
    driver: DriverArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Per-instance CSV; the summary goes to `<stem>_summary.csv` next to it.
    #[arg(long)]
    out: PathBuf,
}

/// Exit code 1 for bad input or failed checks, 2 for solver failures.
enum Failure {
    Invalid(anyhow::Error),
    Solver(anyhow::Error),
}

impl Failure {
    fn invalid(e: impl Into<anyhow::Error>) -> Self {
        Failure::Invalid(e.into())
    }
}

impl From<SpectralError> for Failure {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::DimensionTooLarge { .. }
            | SpectralError::NonConvergence { .. }
            | SpectralError::ConditionsTooLarge { .. } => Failure::Solver(e.into()),
            _ => Failure::Invalid(e.into()),
        }
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Design(a) => design(a),
        Command::Verify { code } => verify(&code),
        Command::Instance(a) => instance(a),
        Command::Compile(a) => compile(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Anneal(a) => anneal(a),
        Command::Sweep(a) => sweep(a),
        Command::Conditions(a) => conditions(a),
        Command::GadgetAudit { max_m, json } => gadget_audit(max_m, json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("solver error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(path) => fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::invalid),
        None => {
            out!("{text}");
            Ok(())
        }
    }
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("output serialises")
}

fn load_code(path: &Path) -> Result<ParityCode, Failure> {
    read_code_file(path)
        .with_context(|| format!("code file {}", path.display()))
        .map_err(Failure::invalid)
}

fn load_model(path: &Path) -> Result<LogicalModel, Failure> {
    read_model_file(path)
        .with_context(|| format!("model file {}", path.display()))
        .map_err(Failure::invalid)
}

fn ratio(r: Option<f64>) -> Result<Option<parity_anneal::gadgets::Strength>, Failure> {
    r.map(ratio_from_f64).transpose().map_err(Failure::invalid)
}

fn parse_edges(text: &str) -> anyhow::Result<Vec<(usize, usize)>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|e| {
            let (a, b) = e
                .split_once('-')
                .ok_or_else(|| anyhow!("edge `{e}` is not of the form a-b"))?;
            Ok((a.trim().parse()?, b.trim().parse()?))
        })
        .collect()
}

fn design(a: DesignArgs) -> CliResult {
    let nu = a.nu.policy();
    let code = if let Some(n) = a.square {
        build_square_lattice(n, &nu)
    } else if let Some(n) = a.triangular {
        build_triangular_lattice(n, &nu)
    } else {
        let edges = parse_edges(a.tree.as_deref().unwrap_or_default()).map_err(Failure::invalid)?;
        let n = edges.iter().map(|&(x, y)| x.max(y)).max().unwrap_or(0);
        build_tree_code(&adjacency_from_edges(n, &edges), &nu)
    }
    .map_err(Failure::invalid)?;
    eprintln!(
        "{} logicals, {} spins, {} stabilisers",
        code.n_logical(),
        code.n_spins(),
        code.stabilisers().len()
    );
    emit(a.out.as_deref(), &CodeFile::from_code(&code).to_json())
}

fn verify(path: &Path) -> CliResult {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::invalid)?;
    let file = parse_code_file(&text)
        .with_context(|| format!("code file {}", path.display()))
        .map_err(Failure::invalid)?;
    let layout = file.to_layout().map_err(Failure::invalid)?;
    let report = verify_code(&layout);
    let labels = ParityCode::from_layout(layout).ok().map(|code| {
        code.labels()
            .iter()
            .zip(code.spins())
            .map(|(l, id)| json!({"spin": id.to_string(), "logicals": l.logicals, "mu": l.mu}))
            .collect::<Vec<_>>()
    });
    out!(
        "{}",
        pretty(&json!({"passed": report.passed(), "report": report, "labels": labels}))
    );
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::invalid(anyhow!("verification failed")))
    }
}

fn instance(a: InstanceArgs) -> CliResult {
    let model = generate_instance(a.n, a.j_scale, a.seed).map_err(Failure::invalid)?;
    emit(a.out.as_deref(), &ModelFile::from_model(&model).to_json())
}

fn compile_from(a: &CompileArgs) -> Result<PhysicalProgram, Failure> {
    let code = load_code(&a.code)?;
    let model = load_model(&a.model)?;
    compile_program(
        &model,
        &code,
        a.variant,
        a.strength.delta()?,
        ratio(a.strength.ratio)?,
    )
    .map_err(Failure::invalid)
}

fn compile(a: CompileArgs) -> CliResult {
    let p = compile_from(&a)?;
    let summary = json!({
        "variant": p.variant,
        "delta": p.delta,
        "ratio": p.ratio.map(|r| r.to_string()),
        "n_physical": p.n_physical(),
        "n_ancillas": p.sites.len() - p.n_physical(),
        "total_dimension": p.total_dimension().to_string(),
        "constant_shift": p.constant_shift(),
        "sites": p.sites,
        "logical_fields": p.logical_fields,
        "groups": p.groups,
        "split_labels": p.split_labels,
    });
    emit(a.out.as_deref(), &pretty(&summary))
}

fn system_from(a: &SystemArgs) -> Result<(LogicalModel, Option<PhysicalProgram>), Failure> {
    let model = load_model(&a.model)?;
    let program = match (&a.code, a.variant) {
        (Some(code), Some(variant)) => Some(
            compile_program(
                &model,
                &load_code(code)?,
                variant,
                a.strength.delta()?,
                ratio(a.strength.ratio)?,
            )
            .map_err(Failure::invalid)?,
        ),
        _ => None,
    };
    Ok((model, program))
}

fn spectrum(a: SpectrumArgs) -> CliResult {
    let (model, program) = system_from(&a.system)?;
    let driver = a.system.driver.driver();
    let opts = a.system.solver.options();
    let system = match &program {
        Some(p) => SpinSystem::from_program(p, &driver),
        None => SpinSystem::from_logical(&model),
    };
    let prepared = system.prepare(&driver, &opts)?;
    let op = assemble(&prepared, a.s)?;
    let k = a.k.min(op.dim());
    let spec = lowest_eigs(&op, k, &opts)?;
    let out = json!({
        "system": if program.is_some() { "physical" } else { "logical" },
        "dimension": op.dim(),
        "s": a.s,
        "driver": driver.tag(),
        "eigenvalues": spec.eigenvalues,
        "gap": spec.gap(),
        "method": spec.method,
        "residual": spec.residual,
    });
    emit(None, &pretty(&out))
}

fn anneal(a: AnnealArgs) -> CliResult {
    let (model, program) = system_from(&a.system)?;
    let driver = a.system.driver.driver();
    let opts = a.system.solver.options();
    let schedule = AnnealSchedule {
        refine: !a.no_refine,
        ..AnnealSchedule::uniform(a.points)
    };
    let logical = anneal_gap_profile(
        &SpinSystem::from_logical(&model).prepare(&driver, &opts)?,
        &schedule,
        &opts,
    )?;
    let physical = match &program {
        Some(p) => Some(anneal_gap_profile(
            &SpinSystem::from_program(p, &driver).prepare(&driver, &opts)?,
            &schedule,
            &opts,
        )?),
        None => None,
    };
    let chi = physical.as_ref().map(|ph| metric_chi(&logical, ph));
    let out = json!({
        "driver": driver.tag(),
        "logical": logical,
        "physical": physical,
        "chi": chi,
    });
    emit(a.out.as_deref(), &pretty(&out))
}

fn summary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sweep".into());
    out.with_file_name(format!("{stem}_summary.csv"))
}

fn sweep(a: SweepArgs) -> CliResult {
    let mut config = ExperimentConfig::new(a.n, a.variants.clone());
    config.nu_policy = a.nu.map(Nu::policy);
    config.code = a.code.as_deref().map(load_code).transpose()?;
    config.j_scale = a.j_scale;
    config.r_grid = if a.r_grid.is_empty() {
        default_r_grid()
    } else {
        a.r_grid.clone()
    };
    config.instances = a.instances;
    config.base_seed = a.seed;
    config.schedule = AnnealSchedule {
        refine: !a.no_refine,
        ..AnnealSchedule::uniform(a.points)
    };
    config.solver = a.solver.options();
    config.driver = a.driver.driver();
    config.ratio = ratio(a.ratio)?;
    config.mode = match a.mode {
        Mode::Full => SweepMode::Full,
        Mode::FinalGap => SweepMode::FinalGapOnly,
    };
    if let Ok(w) = std::env::var(WORKERS_ENV) {
        if !matches!(w.parse::<usize>(), Ok(n) if n > 0) {
            return Err(Failure::invalid(anyhow!(
                "{WORKERS_ENV} must be a positive integer, got `{w}`"
            )));
        }
    }
    let output = run_sweep(&config).map_err(Failure::invalid)?;

    let write =
        |path: &Path, f: &dyn Fn(BufWriter<File>) -> Result<(), parity_anneal::lab::LabError>| {
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            f(BufWriter::new(file)).with_context(|| format!("writing {}", path.display()))
        };
    let summary_file = summary_path(&a.out);
    write(&a.out, &|w| write_records_csv(&output.records, w)).map_err(Failure::invalid)?;
    write(&summary_file, &|w| write_summary_csv(&output.summary, w)).map_err(Failure::invalid)?;

    let errors: usize = output.summary.iter().map(|s| s.errors).sum();
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4e}"));
    out!(
        "{:<12} {:>10} {:>12} {:>12} {:>10} {:>6} {:>6} {:>6}",
        "variant",
        "R",
        "median_de",
        "mean_de",
        "chi_bar",
        "used",
        "excl",
        "~0"
    );
    for s in &output.summary {
        out!(
            "{:<12} {:>10.4} {:>12} {:>12} {:>10} {:>6} {:>6} {:>6}",
            s.variant.as_str(),
            s.r,
            fmt(s.median_delta_e),
            fmt(s.mean_delta_e),
            s.chi_bar.map_or("-".to_string(), |c| format!("{c:.4}")),
            s.chi_used,
            s.chi_excluded,
            s.near_zero_chi
        );
    }
    eprintln!(
        "{} rows ({} with errors) -> {}, summary -> {}",
        output.records.len(),
        errors,
        a.out.display(),
        summary_file.display()
    );
    Ok(())
}

fn conditions(a: CompileArgs) -> CliResult {
    let program = compile_from(&a)?;
    let report = check_conditions(&program, &a.solver.options())?;
    emit(
        a.out.as_deref(),
        &pretty(&json!({"passed": report.passed(), "report": report})),
    )?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::invalid(anyhow!("conditions not satisfied")))
    }
}

fn sign_str(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "+",
        Sign::Minus => "-",
    }
}

fn gadget_audit(max_m: usize, as_json: bool) -> CliResult {
    if max_m < 3 {
        return Err(Failure::invalid(anyhow!("--max-m must be at least 3")));
    }
    let rows = audit_table(max_m);
    if as_json {
        return emit(None, &pretty(&json!(rows)));
    }
    let opt = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
    out!(
        "{:>3} {:>6} {:>6} {:>14} {:>8} {:>12}  status",
        "M",
        "target",
        "paper",
        "paper_enforces",
        "minimal",
        "closed_form"
    );
    for r in &rows {
        let enforces = r.paper_count_enforces.map_or("none", sign_str);
        let status = if r.agrees_with_paper() {
            "agrees".to_string()
        } else {
            format!(
                "DISAGREES: published count enforces {enforces}, minimal is {}",
                opt(r.minimal_by_search)
            )
        };
        out!(
            "{:>3} {:>6} {:>6} {:>14} {:>8} {:>12}  {status}",
            r.m,
            sign_str(r.target),
            r.paper_count,
            enforces,
            opt(r.minimal_by_search),
            r.closed_form
        );
    }
    let disagreements = rows.iter().filter(|r| !r.agrees_with_paper()).count();
    eprintln!(
        "{disagreements} of {} rows disagree with the published counts",
        rows.len()
    );
    Ok(())
}
