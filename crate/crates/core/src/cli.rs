//! `qdsynth` command line: `analyze`, `simulate` and `synthesize`.
//!
//! Exit codes: 0 holds / success, 1 property fails or target not
//! stabilizable, 2 input error, 3 numerical failure at run time.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::document::{matrix_to_doc, parse_matrix, DocumentError, MatrixDoc, ModelDocument};
use crate::dynamics::{integrate_master_with, lyapunov_trace, simulate_sme, FeedbackDesign, LyapunovFunction, SmeScheme, StepOptions, TrajectoryRecord};
use crate::error::Error;
use crate::generator::LindbladModel;
use crate::linquant::{bloch_coordinates, diag_real, identity, pauli, r, ComplexMatrix, DensityOperator, SpaceDecomposition};
use crate::subsystems::{
    check_attractivity, check_dfs_gamma_robust, check_invariance, check_invariance_robust, check_ns, check_ns_initialization_free, check_ns_robust,
    NoiseModel, RobustMode, SubsystemReport, Verdict,
};
use crate::synthesis::{design_ladder_stabilizer, design_qubit_stabilizer, spectral_gap, synthesize_dfs, SpectralGap};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qdsynth", version, about = "Analyze, simulate and stabilize Markovian open quantum systems")]
struct Cli {
    /// Worker threads for trajectory ensembles (default: all cores).
    #[arg(long, env = "QDSYNTH_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check subsystem properties of a model file.
    Analyze(AnalyzeArgs),
    /// Integrate the master equation or sample stochastic trajectories.
    Simulate(SimulateArgs),
    /// Build a feedback design and certify it.
    Synthesize {
        #[command(subcommand)]
        target: SynthTarget,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PropertyArg {
    Invariant,
    InvariantGammaRobust,
    InvariantARobust,
    Ns,
    NsGammaRobust,
    NsARobust,
    NsInitializationFree,
    Dfs,
    Attractive,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    model: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "invariant")]
    properties: Vec<PropertyArg>,
    /// Decomposition document `{"n":..,"f":..,"r":..,"basis_change":..}` overriding the model's.
    #[arg(long)]
    decomposition: Option<PathBuf>,
    /// Override the algebraic tolerance (scaled by max(1, model scale)).
    #[arg(long)]
    tol_alg: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Euler,
    Kraus,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    model: PathBuf,
    /// `basis:K`, `mixed`, a JSON matrix, or `@file`.
    #[arg(long, default_value = "mixed")]
    rho0: String,
    #[arg(long, default_value_t = 10.0)]
    t_final: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 1)]
    record_every: usize,
    /// Sample the homodyne stochastic master equation of the model's design.
    #[arg(long)]
    sme: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trajectories: usize,
    #[arg(long)]
    eta: Option<f64>,
    /// Stochastic step: `euler` (Euler-Maruyama) or `kraus` (positivity preserving).
    #[arg(long, value_enum, default_value = "euler")]
    scheme: SchemeArg,
    /// CSV file (deterministic) or directory (stochastic).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum SynthTarget {
    /// Pure-state stabilizer for a two-level system.
    Qubit {
        /// Matrix: `[coef*]name` with name in sx, sy, sz, sp, sm, id, zero; a JSON matrix; or `@file`.
        #[arg(long)]
        measurement: String,
        #[arg(long, default_value = "zero")]
        hamiltonian: String,
        #[arg(long, default_value = "basis:0")]
        target: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Ground-state stabilizer for a d-level ladder.
    Ladder {
        #[arg(long, value_delimiter = ',', required = true)]
        couplings: Vec<f64>,
        /// Diagonal of the free Hamiltonian (default zero).
        #[arg(long, value_delimiter = ',')]
        energies: Option<Vec<f64>>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Decoherence-free subspace generated by feedback.
    Dfs {
        #[arg(long)]
        measurement: String,
        #[arg(long, default_value = "zero")]
        hamiltonian: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotStabilizable { .. } | Error::NotCompensable { .. } | Error::NotInvariant(_) => EXIT_FAILS,
            Error::StateInvariantViolation { .. } | Error::InternalInconsistency(_) | Error::NoStationaryState { .. } => EXIT_NUMERIC,
            _ => EXIT_INPUT,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        match e {
            DocumentError::Model(m) => {
                let mut f = Failure::from(m);
                f.code = EXIT_INPUT;
                f
            }
            other => Failure::input(other.to_string()),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // the global pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = match cli.command {
        Command::Analyze(a) => analyze(&a, out),
        Command::Simulate(a) => simulate(&a, out, err),
        Command::Synthesize { target } => synthesize(&target, out, err),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<ModelDocument, Failure> {
    let text = read_file(path)?;
    ModelDocument::parse(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure { code: EXIT_NUMERIC, message: format!("write failed: {e}") }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("reports always serialize");
    writeln!(out, "{text}").map_err(io_failure)
}

/// Named qubit matrices with an optional real prefactor, JSON matrices, or `@file`.
fn parse_matrix_arg(spec: &str, dim: Option<usize>) -> Result<ComplexMatrix, Failure> {
    let spec = spec.trim();
    let from_json = |text: &str| -> Result<ComplexMatrix, Failure> {
        let d = match dim {
            Some(d) => d,
            None => serde_json::from_str::<MatrixDoc>(text).map(|m| m.len()).map_err(|e| Failure::input(format!("matrix: {e}")))?,
        };
        parse_matrix(text, d).map_err(|e| Failure::input(format!("matrix: {e}")))
    };
    if let Some(path) = spec.strip_prefix('@') {
        return from_json(&read_file(Path::new(path))?);
    }
    if spec.starts_with('[') {
        return from_json(spec);
    }
    let (coef, name) = match spec.split_once('*') {
        Some((k, name)) => (k.trim().parse::<f64>().map_err(|_| Failure::input(format!("bad coefficient in '{spec}'")))?, name.trim()),
        None => (1.0, spec),
    };
    let d = dim.unwrap_or(2);
    let m = match name {
        "id" => identity(d),
        "zero" => ComplexMatrix::zeros(d, d),
        _ if d != 2 => return Err(Failure::input(format!("'{name}' is a two-level operator, dimension is {d}"))),
        "sx" => pauli::x(),
        "sy" => pauli::y(),
        "sz" => pauli::z(),
        "sp" => pauli::raising(),
        "sm" => pauli::lowering(),
        _ => return Err(Failure::input(format!("unknown matrix '{name}'"))),
    };
    Ok(m * r(coef))
}

fn parse_state(spec: &str, d: usize) -> Result<DensityOperator, Failure> {
    let spec = spec.trim();
    if spec == "mixed" {
        return Ok(DensityOperator::maximally_mixed(d));
    }
    if let Some(k) = spec.strip_prefix("basis:") {
        let k: usize = k.parse().map_err(|_| Failure::input(format!("bad basis index in '{spec}'")))?;
        return Ok(DensityOperator::basis_state(d, k)?);
    }
    let m = parse_matrix_arg(spec, Some(d))?;
    Ok(DensityOperator::new(m)?)
}

#[derive(Serialize)]
struct AnalyzeOutput {
    all_hold: bool,
    reports: Vec<SubsystemReport>,
}

fn analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> CmdResult {
    let doc = load_model(&args.model)?;
    let model = doc.lindblad()?;
    let decomp = match &args.decomposition {
        Some(path) => {
            let text = read_file(path)?;
            let dd = serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            ModelDocument { decomposition: Some(dd), ..doc.clone() }.space_decomposition()?
        }
        None => doc.space_decomposition()?,
    }
    .ok_or_else(|| Failure::input("no decomposition given"))?;
    let gks = if doc.is_pure_gks() { doc.gks_model()? } else { None };
    let noise = || -> NoiseModel<'_> { gks.as_ref().map_or(NoiseModel::Lindblad(&model), NoiseModel::Gks) };

    let mut reports = Vec::new();
    let mut all_hold = true;
    for &p in &args.properties {
        let mut report = match p {
            PropertyArg::Invariant => check_invariance(&model, &decomp)?,
            PropertyArg::InvariantGammaRobust => check_invariance_robust(noise(), &decomp, RobustMode::GammaRobust)?,
            PropertyArg::InvariantARobust => check_invariance_robust(noise(), &decomp, RobustMode::ARobust)?,
            PropertyArg::Ns => check_ns(&model, &decomp)?,
            PropertyArg::NsGammaRobust => check_ns_robust(noise(), &decomp, RobustMode::GammaRobust)?,
            PropertyArg::NsARobust => check_ns_robust(noise(), &decomp, RobustMode::ARobust)?,
            PropertyArg::NsInitializationFree => check_ns_initialization_free(&model, &decomp)?,
            PropertyArg::Dfs => {
                if decomp.f() != 1 {
                    return Err(Failure::input("dfs needs a decomposition with f = 1"));
                }
                let vectors: Vec<_> = (0..decomp.n()).map(|k| decomp.basis_change().column(k).into_owned()).collect();
                check_dfs_gamma_robust(&model, &vectors)?
            }
            PropertyArg::Attractive => check_attractivity(&model, &decomp)?,
        };
        if let (Some(tol), false) = (args.tol_alg, p == PropertyArg::Attractive) {
            rejudge(&mut report, tol * model.scale().max(1.0));
        }
        let holds = if p == PropertyArg::Attractive { report.attractive() == Some(true) } else { report.holds() };
        all_hold &= holds;
        reports.push(report);
    }
    if args.json {
        emit_json(out, &AnalyzeOutput { all_hold, reports })?;
    } else {
        for rep in &reports {
            write_report(out, rep).map_err(io_failure)?;
        }
    }
    Ok(if all_hold { EXIT_OK } else { EXIT_FAILS })
}

/// Re-decides a definite verdict against a user tolerance.
fn rejudge(report: &mut SubsystemReport, tolerance: f64) {
    if report.verdict == Verdict::Inconclusive {
        return;
    }
    report.tolerance = tolerance;
    report.verdict = if report.witnesses.iter().all(|w| w.residual <= tolerance) { Verdict::Holds } else { Verdict::Fails };
}

fn write_report(out: &mut dyn Write, rep: &SubsystemReport) -> std::io::Result<()> {
    let property = serde_json::to_value(rep.property).expect("serializable");
    let verdict = serde_json::to_value(rep.verdict).expect("serializable");
    writeln!(out, "{}: {} (tolerance {:.3e})", property.as_str().unwrap_or("?"), verdict.as_str().unwrap_or("?"), rep.tolerance)?;
    for w in &rep.witnesses {
        let channel = w.channel.map(|k| format!("[{k}]")).unwrap_or_default();
        // attractivity witnesses are quantities that should be large, not residuals
        let lower_bound = matches!(w.condition.as_str(), "l_p_nonzero" | "pumping_min_eigenvalue" | "factor_stationary_dimension");
        let mark = if lower_bound || w.residual <= rep.tolerance { "" } else { "  <- violated" };
        writeln!(out, "  {}{channel}: {:.3e}{mark}", w.condition, w.residual)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct LyapunovSummary {
    initial: f64,
    last: f64,
    monotone: bool,
}

#[derive(Serialize)]
struct SimulationSummary {
    mode: &'static str,
    trajectories: usize,
    final_state: MatrixDoc,
    final_bloch: Vec<f64>,
    trace_drift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    lyapunov: Option<LyapunovSummary>,
}

fn summarize(record: &TrajectoryRecord, mode: &'static str, trajectories: usize, decomp: Option<&SpaceDecomposition>) -> Result<SimulationSummary, Failure> {
    let lyapunov = match decomp {
        Some(d) if d.r() > 0 => {
            let series = lyapunov_trace(record, &LyapunovFunction::SubspacePopulation(d.clone()))?;
            Some(LyapunovSummary {
                initial: series.values[0],
                last: *series.values.last().expect("non-empty"),
                monotone: series.monotone,
            })
        }
        _ => None,
    };
    let fin = record.final_state().matrix();
    Ok(SimulationSummary {
        mode,
        trajectories,
        final_state: matrix_to_doc(fin),
        final_bloch: bloch_coordinates(fin),
        trace_drift: record.trace_drift(),
        lyapunov,
    })
}

fn write_csv_file(path: &Path, record: &TrajectoryRecord) -> Result<(), Failure> {
    let file = fs::File::create(path).map_err(io_failure)?;
    let mut w = std::io::BufWriter::new(file);
    record.write_csv(&mut w).and_then(|_| w.flush()).map_err(io_failure)
}

fn simulate(args: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let doc = load_model(&args.model)?;
    let model = doc.lindblad()?;
    let decomp = doc.space_decomposition()?;
    let rho0 = parse_state(&args.rho0, doc.dim)?;
    let scheme = match args.scheme {
        SchemeArg::Euler => SmeScheme::EulerMaruyama,
        SchemeArg::Kraus => SmeScheme::Kraus,
    };
    let opts = StepOptions::new(args.t_final, args.dt).every(args.record_every).with_scheme(scheme);

    if !args.sme {
        let record = integrate_master_with(&model, &rho0, &opts)?;
        let summary = summarize(&record, "master", 1, decomp.as_ref())?;
        match &args.output {
            Some(path) => {
                write_csv_file(path, &record)?;
                emit_json(out, &summary)?;
            }
            None => {
                record.write_csv(&mut *out).map_err(io_failure)?;
                emit_json(err, &summary)?;
            }
        }
        return Ok(EXIT_OK);
    }

    let mut design = doc.feedback_design()?.ok_or_else(|| Failure::input("--sme needs a model with a design"))?;
    if !doc.channels.is_empty() || doc.gks.is_some() {
        return Err(Failure::input("--sme supports designs without additional noise channels"));
    }
    if let Some(eta) = args.eta {
        design = design.with_eta(eta)?;
    }
    if args.trajectories == 0 {
        return Err(Failure::input("--trajectories must be positive"));
    }
    let dir = args.output.as_ref().ok_or_else(|| Failure::input("--sme needs --output DIR"))?;
    fs::create_dir_all(dir).map_err(io_failure)?;
    let mean = run_ensemble(&design, &rho0, &opts, args.seed, args.trajectories, dir)?;
    write_csv_file(&dir.join("mean.csv"), &mean)?;
    emit_json(out, &summarize(&mean, "sme", args.trajectories, decomp.as_ref())?)?;
    Ok(EXIT_OK)
}

/// Samples trajectories in ordered chunks, writing one CSV per trajectory and
/// returning the unconditional mean.
fn run_ensemble(design: &FeedbackDesign, rho0: &DensityOperator, opts: &StepOptions, seed: u64, count: usize, dir: &Path) -> Result<TrajectoryRecord, Failure> {
    const CHUNK: usize = 64;
    let width = count.saturating_sub(1).to_string().len();
    let mut sums: Vec<ComplexMatrix> = Vec::new();
    let mut times = Vec::new();
    for start in (0..count).step_by(CHUNK) {
        let end = (start + CHUNK).min(count);
        let records = (start..end).into_par_iter().map(|i| simulate_sme(design, rho0, opts, seed, i as u64)).collect::<crate::Result<Vec<_>>>()?;
        for (i, record) in (start..end).zip(&records) {
            write_csv_file(&dir.join(format!("trajectory_{i:0width$}.csv")), record)?;
            if sums.is_empty() {
                times = record.times.clone();
                sums = record.states.iter().map(|s| s.matrix().clone()).collect();
            } else {
                for (acc, s) in sums.iter_mut().zip(&record.states) {
                    *acc += s.matrix();
                }
            }
        }
    }
    let scale = r(1.0 / count as f64);
    Ok(TrajectoryRecord {
        times,
        states: sums.into_iter().map(|m| DensityOperator::from_unchecked(m * scale)).collect(),
        current_increments: None,
        seed: Some(seed),
    })
}

#[derive(Serialize)]
struct SynthesisOutput {
    certified: bool,
    design: ModelDocument,
    reports: Vec<SubsystemReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spectrum: Option<SpectralGap>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dfs_dimension: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c_prime: Option<f64>,
}

fn synthesize(target: &SynthTarget, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let (output, path) = match target {
        SynthTarget::Qubit { measurement, hamiltonian, target, output } => {
            let m = parse_matrix_arg(measurement, Some(2))?;
            let h = parse_matrix_arg(hamiltonian, Some(2))?;
            let rho_d = parse_state(target, 2)?;
            let design = match design_qubit_stabilizer(&m, &h, &rho_d) {
                Ok(d) => d,
                Err(Error::NotStabilizable { residual }) => {
                    writeln!(err, "not stabilizable: ||[rho_d, M + M^dagger]|| = {residual:.3e}").map_err(io_failure)?;
                    return Ok(EXIT_FAILS);
                }
                Err(e) => return Err(e.into()),
            };
            let decomp = SpaceDecomposition::from_subspace(&[dominant_vector(&rho_d)], 2)?;
            (certify_state_design(&design, &decomp)?, output)
        }
        SynthTarget::Ladder { couplings, energies, output } => {
            let d = couplings.len() + 1;
            let e = energies.clone().unwrap_or_else(|| vec![0.0; d]);
            if e.len() != d {
                return Err(Failure::input(format!("{} energies for {d} levels", e.len())));
            }
            let design = design_ladder_stabilizer(d, couplings, &diag_real(&e))?;
            let decomp = SpaceDecomposition::standard(1, 1, d - 1)?;
            (certify_state_design(&design, &decomp)?, output)
        }
        SynthTarget::Dfs { measurement, hamiltonian, output } => {
            let m = parse_matrix_arg(measurement, None)?;
            let h = parse_matrix_arg(hamiltonian, Some(m.nrows()))?;
            let synth = synthesize_dfs(&m, &h)?;
            let out = SynthesisOutput {
                certified: synth.report.holds(),
                design: ModelDocument::from_design(&synth.design).with_decomposition(&synth.decomposition),
                reports: vec![synth.report.clone()],
                spectrum: None,
                dfs_dimension: Some(synth.decomposition.n()),
                c_prime: Some(synth.c_prime),
            };
            (out, output)
        }
    };
    if let Some(path) = path {
        fs::write(path, output.design.to_json()).map_err(io_failure)?;
    }
    let code = if output.certified { EXIT_OK } else { EXIT_FAILS };
    emit_json(out, &output)?;
    Ok(code)
}

fn dominant_vector(rho: &DensityOperator) -> crate::linquant::ComplexVector {
    let (_, vectors) = crate::linquant::hermitian_eigen(rho.matrix());
    vectors.column(rho.dim() - 1).into_owned()
}

/// Invariance plus attractivity, falling back on the spectrum when the
/// algebraic attractivity test is inconclusive.
fn certify_state_design(design: &FeedbackDesign, decomp: &SpaceDecomposition) -> Result<SynthesisOutput, Failure> {
    let model: LindbladModel = crate::dynamics::build_fme(design)?;
    let invariance = check_invariance(&model, decomp)?;
    let attractivity = check_attractivity(&model, decomp)?;
    let spectrum = spectral_gap(&model);
    let attractive = match attractivity.attractive() {
        Some(a) => a,
        None => spectrum.relaxing(),
    };
    Ok(SynthesisOutput {
        certified: invariance.holds() && attractive,
        design: ModelDocument::from_design(design).with_decomposition(decomp),
        reports: vec![invariance, attractivity],
        spectrum: Some(spectrum),
        dfs_dimension: None,
        c_prime: None,
    })
}
