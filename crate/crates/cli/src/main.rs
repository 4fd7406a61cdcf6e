//! `l1pursuit` command-line front end.
//!
//! Exit codes: 0 success, 1 no certified answer, 2 usage error, 3 I/O or data error.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use l1pursuit::bench::{
    emit_profile_plot, performance_profile, read_records_csv, run_suite, write_records_csv,
    BenchError, SuiteOptions,
};
use l1pursuit::instances::mtx::{read_vector, write_vector};
use l1pursuit::instances::{
    check_erc, export_lp, generate, read_instance, write_instance, GenSpec, InstanceError,
};
use l1pursuit::kernels::SpdMode;
use l1pursuit::solvers::{hoc_check, save_trajectory_csv, HocOutcome, SolveError};
use l1pursuit::{BpInstance, SolverKind, SolverOptions};

const THREADS_ENV: &str = "L1PURSUIT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "l1pursuit",
    version,
    about = "Basis pursuit via alternating projections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a Gaussian instance with a planted sparse solution.
    Generate(GenerateArgs),
    /// Solve an instance directory.
    Solve(SolveArgs),
    /// Run the heuristic optimality check on a candidate solution.
    Check(CheckArgs),
    /// Write the split-variable LP of an instance as fixed-format MPS.
    ExportLp(ExportArgs),
    /// Run a benchmark manifest and emit records and a performance profile.
    Bench(BenchArgs),
    /// Build a performance profile from an existing records.csv.
    Profile(ProfileArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Planted magnitudes are 10^(d·U[0,1]).
    #[arg(long, default_value_t = 1.0)]
    dynrange: f64,
    /// Output directory (default: ./<label>).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpdArg {
    Auto,
    Cholesky,
    Cg,
}

/// Flags mirroring `SolverOptions`; defaults are the library defaults.
#[derive(Debug, Args)]
struct SolverArgs {
    /// Wall-clock limit per solve, seconds [default: 3600].
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    max_outer: usize,
    /// Iteration cap of each MAP run.
    #[arg(long, default_value_t = 1_000_000)]
    max_inner: usize,
    #[arg(long, default_value_t = 1e-6)]
    feas_tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    stall_tol: f64,
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    #[arg(long, default_value_t = 1e-6)]
    bin_tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    hoc_tol: f64,
    /// Disable HOC for isal1 (the bpmap variants take it from their name).
    #[arg(long)]
    no_hoc: bool,
    #[arg(long, value_enum, default_value_t = SpdArg::Auto)]
    spd: SpdArg,
}

impl SolverArgs {
    fn options(&self, fallback_limit: Option<f64>) -> Result<SolverOptions, Failure> {
        let mut o = SolverOptions::default();
        if let Some(t) = self.time_limit.or(fallback_limit) {
            o.time_limit = seconds(t)?;
        }
        o.max_outer = self.max_outer;
        o.map.max_iter = self.max_inner;
        o.map.feas_tol = self.feas_tol;
        o.map.stall_tol = self.stall_tol;
        o.alpha = self.alpha;
        o.bin_gap_tol = self.bin_tol;
        o.hoc_tol = self.hoc_tol;
        o.hoc = !self.no_hoc;
        o.spd_mode = match self.spd {
            SpdArg::Auto => None,
            SpdArg::Cholesky => Some(SpdMode::Cholesky),
            SpdArg::Cg => Some(SpdMode::ConjugateGradient),
        };
        o.validate().map_err(|e| Failure::usage(anyhow!(e)))?;
        Ok(o)
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Instance directory (A.mtx, b.mtx, optional xtrue.mtx, meta.json).
    instance: PathBuf,
    #[arg(long, default_value = "bpmap")]
    solver: String,
    #[command(flatten)]
    opts: SolverArgs,
    /// Directory for solution.mtx and trajectory.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Print the outer iteration log to stderr.
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Debug, Args)]
struct CheckArgs {
    instance: PathBuf,
    /// Candidate solution as a MatrixMarket array vector.
    solution: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    hoc_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    support_abs: f64,
    #[arg(long, default_value_t = 1e-10)]
    support_rel: f64,
}

#[derive(Debug, Args)]
struct ExportArgs {
    instance: PathBuf,
    /// Output MPS file.
    output: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// TOML manifest with `solvers`, `instances` and optional `time_limit`.
    manifest: PathBuf,
    #[command(flatten)]
    opts: SolverArgs,
    /// Worker cap; 0 uses all cores. L1PURSUIT_THREADS caps it further.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ProfileArgs {
    records: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    solvers: Vec<String>,
    /// Instance directories, relative to the manifest.
    instances: Vec<PathBuf>,
    time_limit: Option<f64>,
    workers: Option<usize>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl Failure {
    fn usage(err: anyhow::Error) -> Self {
        Failure { code: 2, err }
    }

    fn data(err: anyhow::Error) -> Self {
        Failure { code: 3, err }
    }
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        match e {
            InstanceError::InvalidSpec(_) => Failure::usage(e.into()),
            _ => Failure::data(e.into()),
        }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Empty(_) | BenchError::DuplicateLabel(_) => Failure::usage(e.into()),
            _ => Failure::data(e.into()),
        }
    }
}

/// Nine significant digits, fixed notation for moderate magnitudes.
struct Sig9(f64);

impl fmt::Display for Sig9 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.0;
        if !v.is_finite() || v == 0.0 {
            return write!(f, "{v}");
        }
        let e = v.abs().log10().floor() as i32;
        if (-4..9).contains(&e) {
            write!(f, "{v:.prec$}", prec = (8 - e) as usize)
        } else {
            write!(f, "{v:.8e}")
        }
    }
}

fn seconds(t: f64) -> Result<Duration, Failure> {
    Duration::try_from_secs_f64(t)
        .ok()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| {
            Failure::usage(anyhow!(
                "time limit must be a positive number of seconds, got {t}"
            ))
        })
}

fn parse_solver(name: &str) -> Result<SolverKind, Failure> {
    name.parse::<SolverKind>()
        .map_err(|e| Failure::usage(anyhow!(e)))
}

fn load_instance(dir: &Path) -> Result<BpInstance, Failure> {
    if !dir.is_dir() {
        return Err(Failure::data(anyhow!(
            "{}: not an instance directory",
            dir.display()
        )));
    }
    Ok(read_instance(dir)?)
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create {}", dir.display()))
        .map_err(Failure::data)
}

fn thread_cap() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&k| k > 0)
            .map(Some)
            .ok_or_else(|| {
                Failure::usage(anyhow!(
                    "{THREADS_ENV} must be a positive integer, got '{v}'"
                ))
            }),
        Err(_) => Ok(None),
    }
}

fn cmd_generate(a: GenerateArgs) -> Result<ExitCode, Failure> {
    let spec = GenSpec::new(a.m, a.n, a.s, a.seed).with_dynrange(a.dynrange);
    spec.validate()?;
    let mut inst = generate(&spec)?;
    let erc = match check_erc(&inst) {
        Ok(r) => Some(r),
        Err(InstanceError::RankDeficientSupport) => None,
        Err(e) => return Err(e.into()),
    };
    inst.meta.erc_value = erc.map(|r| r.value);
    let out = a.out.unwrap_or_else(|| PathBuf::from(&inst.meta.label));
    write_instance(&inst, &out)?;
    println!("instance {}", out.display());
    match erc {
        Some(r) => println!(
            "erc {} ({})",
            Sig9(r.value),
            if r.holds { "holds" } else { "fails" }
        ),
        None => println!("erc undefined (support columns rank deficient)"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(a: SolveArgs) -> Result<ExitCode, Failure> {
    let kind = parse_solver(&a.solver)?;
    let opts = a.opts.options(None)?;
    let inst = load_instance(&a.instance)?;
    ensure_dir(&a.out)?;
    let res = match kind.solve(&inst, &opts) {
        Ok(r) => r,
        Err(e @ SolveError::InvalidOptions(_)) => return Err(Failure::usage(e.into())),
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(1));
        }
    };
    if a.verbose {
        for t in &res.trajectory {
            eprintln!(
                "k {:>6}  r {}  |d| {}  inner {:>8}  t {}",
                t.k,
                Sig9(t.r),
                Sig9(t.norm_d),
                t.inner_iters,
                Sig9(t.elapsed_s)
            );
        }
    }
    write_vector(&a.out.join("solution.mtx"), &res.solution)?;
    let traj = a.out.join("trajectory.csv");
    save_trajectory_csv(&res.trajectory, &traj)
        .with_context(|| format!("cannot write {}", traj.display()))
        .map_err(Failure::data)?;

    println!("solver {}", kind);
    println!("status {}", res.status);
    println!("objective {}", Sig9(res.objective));
    println!("residual {}", Sig9(res.residual));
    println!("outer_iterations {}", res.outer_iterations);
    println!("inner_iterations {}", res.inner_iterations);
    println!("hoc_calls {}", res.hoc_calls);
    if let Some(g) = res.duality_gap {
        println!("duality_gap {}", Sig9(g));
    }
    if let Some((lo, hi)) = res.bracket {
        println!("bracket {} {}", Sig9(lo), Sig9(hi));
    }
    println!("time_s {}", Sig9(res.wall_time));
    Ok(if res.status.is_success() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_check(a: CheckArgs) -> Result<ExitCode, Failure> {
    let inst = load_instance(&a.instance)?;
    let x = read_vector(&a.solution)?;
    if x.len() != inst.cols() {
        return Err(Failure::data(anyhow!(
            "{}: solution has {} entries, instance has {} columns",
            a.solution.display(),
            x.len(),
            inst.cols()
        )));
    }
    let opts = SolverOptions {
        hoc_tol: a.hoc_tol,
        support_abs: a.support_abs,
        support_rel: a.support_rel,
        ..SolverOptions::default()
    };
    opts.validate().map_err(|e| Failure::usage(anyhow!(e)))?;
    match hoc_check(&inst, &x, &opts) {
        HocOutcome::Success { x, gap, .. } => {
            println!("Success gap {}", Sig9(gap));
            println!("objective {}", Sig9(x.iter().map(|v| v.abs()).sum()));
            Ok(ExitCode::SUCCESS)
        }
        HocOutcome::Failure { reason, .. } => {
            println!("Failure({reason})");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_export(a: ExportArgs) -> Result<ExitCode, Failure> {
    let inst = load_instance(&a.instance)?;
    export_lp(&inst, &a.output)?;
    println!(
        "wrote {} ({} rows, {} columns)",
        a.output.display(),
        inst.rows(),
        2 * inst.cols()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(a: BenchArgs) -> Result<ExitCode, Failure> {
    let text = fs::read_to_string(&a.manifest)
        .with_context(|| format!("cannot read {}", a.manifest.display()))
        .map_err(Failure::data)?;
    let manifest: Manifest = toml::from_str(&text)
        .with_context(|| format!("{}: invalid manifest", a.manifest.display()))
        .map_err(Failure::usage)?;
    if manifest.solvers.is_empty() || manifest.instances.is_empty() {
        return Err(Failure::usage(anyhow!(
            "{}: manifest needs at least one solver and one instance",
            a.manifest.display()
        )));
    }
    let solvers = manifest
        .solvers
        .iter()
        .map(|s| parse_solver(s))
        .collect::<Result<Vec<_>, _>>()?;
    let opts = a.opts.options(manifest.time_limit)?;

    let base = a.manifest.parent().unwrap_or(Path::new("."));
    let mut instances = Vec::new();
    let mut problems = Vec::new();
    for rel in &manifest.instances {
        let dir = base.join(rel);
        match read_instance(&dir) {
            Ok(inst) => instances.push(inst),
            Err(e) => problems.push(format!("  {}: {e}", dir.display())),
        }
    }
    if !problems.is_empty() {
        return Err(Failure::data(anyhow!(
            "unreadable instances:\n{}",
            problems.join("\n")
        )));
    }

    let mut workers = a.workers.or(manifest.workers).unwrap_or(0);
    if let Some(cap) = thread_cap()? {
        workers = if workers == 0 { cap } else { workers.min(cap) };
    }
    ensure_dir(&a.out)?;
    let records_path = a.out.join("records.csv");
    let suite = SuiteOptions {
        solver: opts,
        workers,
        stream: Some(records_path.clone()),
    };
    let records = run_suite(&instances, &solvers, &suite)?;
    write_records_csv(&records, &records_path)?;
    let profile = performance_profile(&records)?;
    emit_profile_plot(&profile, &a.out.join("profile.svg"))?;

    for s in &solvers {
        let solved = records
            .iter()
            .filter(|r| r.solver == s.name() && r.status.is_solved())
            .count();
        println!("{:<14} solved {solved}/{}", s.name(), instances.len());
    }
    println!("records {}", records_path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_profile(a: ProfileArgs) -> Result<ExitCode, Failure> {
    let records = read_records_csv(&a.records)?;
    let profile = performance_profile(&records)?;
    ensure_dir(&a.out)?;
    emit_profile_plot(&profile, &a.out.join("profile.svg"))?;
    for c in &profile.curves {
        println!("{:<14} rho(1) {}", c.solver, Sig9(c.rho(1.0)));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let out = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Check(a) => cmd_check(a),
        Command::ExportLp(a) => cmd_export(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Profile(a) => cmd_profile(a),
    };
    match out {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
