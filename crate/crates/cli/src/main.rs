//! `genent` command-line driver.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 bad input,
//! 3 a domain error such as an odd register or an invalid field range.

mod builtin;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use genent::ising::{field_grid, sweep, write_sweep_files};
use genent::suite::{random_scan, run_suite, Suite, SuiteConfig, SuiteReport};
use genent::{counting_identity, genuine_entanglement_with_tol, RngSeed, StateFile, DEFAULT_FACTOR_TOL};
use serde::Serialize;

#[derive(Debug)]
pub enum Failure {
    Property(String),
    Input(String),
    Domain(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Property(_) => 1,
            Failure::Input(_) => 2,
            Failure::Domain(_) => 3,
        }
    }
}

impl From<genent::Error> for Failure {
    fn from(e: genent::Error) -> Self {
        use genent::Error::*;
        match e {
            Parse(_) | LengthMismatch { .. } | NonFinite { .. } | ZeroVector { .. } => Failure::Input(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "genent", version, about = "Genuine multi-qubit entanglement from nonlocal information")]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the full measure report of one state as JSON.
    Measure(MeasureArgs),
    /// Scan Haar-random states for negative values of E.
    RandomScan(ScanArgs),
    /// Run property suites.
    Verify(VerifyArgs),
    /// Write E(h) curves of the periodic transverse-field Ising chain.
    IsingSweep(SweepArgs),
    /// Exhaustive check of the class I / class II cancellation.
    Counting {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "input")]
struct Source {
    /// ghz:N, w:N or gabcd:a,b,c,d with complex literals like 0.5+0.1i
    #[arg(long, group = "input")]
    builtin: Option<String>,
    /// State file {"n": .., "amplitudes": [[re, im], ...]}
    #[arg(long, group = "input")]
    file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[command(flatten)]
    source: Source,
    /// Purity tolerance of the product-factor scan.
    #[arg(long, default_value_t = DEFAULT_FACTOR_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    #[arg(long, env = "GENENT_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(required = true, value_parser = parse_suite)]
    suites: Vec<Suite>,
    /// Sample count for every randomized suite.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    covariance_samples: Option<usize>,
    #[arg(long)]
    monotonicity_samples: Option<usize>,
    #[arg(long)]
    normal_form_samples: Option<usize>,
    #[arg(long)]
    diagram_samples: Option<usize>,
    /// Register sizes for the counting suite.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Register size for the covariance and monotonicity suites.
    #[arg(long, default_value_t = 4)]
    qubits: usize,
    #[arg(long, env = "GENENT_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// start:stop:step, inclusive of stop
    #[arg(long, default_value = "0.2:2.0:0.05")]
    h: String,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: genent::Error| e.to_string())
}

fn print_json<T: Serialize>(value: &T) {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    // a closed pipe downstream is not an error of ours
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn measure(args: MeasureArgs) -> Result<(), Failure> {
    let state = match (&args.source.builtin, &args.source.file) {
        (Some(spec), _) => builtin::parse_builtin(spec)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
            StateFile::from_json(&text)?.into_state()?
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    if !state.was_normalized() {
        eprintln!("note: input renormalized (|norm^2 - 1| = {:e})", state.norm_deviation());
    }
    print_json(&genuine_entanglement_with_tol(&state, args.tol)?);
    Ok(())
}

fn scan(args: ScanArgs) -> Result<(), Failure> {
    let summary = random_scan(args.n, args.count, RngSeed(args.seed))?;
    print_json(&summary);
    if summary.negatives_below_tolerance > 0 {
        return Err(Failure::Property(format!(
            "{} of {} states have E below tolerance",
            summary.negatives_below_tolerance, summary.n_states
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifySummary {
    passed: bool,
    suites: Vec<SuiteReport>,
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let mut cfg = SuiteConfig { seed: RngSeed(args.seed), n_qubits: args.qubits, ..Default::default() };
    if let Some(s) = args.samples {
        cfg.covariance_samples = s;
        cfg.monotonicity_samples = s;
        cfg.normal_form_samples = s;
        cfg.diagram_samples = s;
    }
    let overrides = [
        (args.covariance_samples, &mut cfg.covariance_samples),
        (args.monotonicity_samples, &mut cfg.monotonicity_samples),
        (args.normal_form_samples, &mut cfg.normal_form_samples),
        (args.diagram_samples, &mut cfg.diagram_samples),
    ];
    for (value, slot) in overrides {
        if let Some(v) = value {
            *slot = v;
        }
    }
    if !args.n.is_empty() {
        cfg.counting_n = args.n;
    }
    if cfg.n_qubits < 2 || cfg.n_qubits % 2 == 1 {
        return Err(genent::Error::OddArity { n: cfg.n_qubits }.into());
    }

    let mut suites = args.suites;
    suites.dedup();
    let reports = suites.iter().map(|&s| run_suite(s, &cfg)).collect::<Result<Vec<_>, _>>()?;
    let passed = reports.iter().all(|r| r.passed);
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed).map(|r| r.suite.to_string()).collect();
    print_json(&VerifySummary { passed, suites: reports });
    if passed {
        Ok(())
    } else {
        Err(Failure::Property(format!("failing suites: {}", failed.join(", "))))
    }
}

fn parse_range(text: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(Failure::Input(format!("field range '{text}' is not start:stop:step")));
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Failure::Input(format!("bad number '{s}' in '{text}'")));
    let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
    if start <= 0.0 {
        return Err(Failure::Domain(format!("field range must start above 0, got {start}")));
    }
    Ok(field_grid(start, stop, step)?)
}

fn ising_sweep(args: SweepArgs) -> Result<(), Failure> {
    let grid = parse_range(&args.h)?;
    // validate every size before any work is done
    for &n in &args.n {
        genent::IsingParams::new(n, 1.0)?;
    }
    for &n in &args.n {
        let rows = sweep(n, &grid)?;
        let paths = write_sweep_files(&args.out, n, &rows)
            .map_err(|e| Failure::Input(format!("cannot write to {}: {e}", args.out.display())))?;
        for p in paths {
            let _ = writeln!(std::io::stdout(), "{}", p.display());
        }
    }
    Ok(())
}

fn counting(n: usize) -> Result<(), Failure> {
    let levels = counting_identity(n)?;
    print_json(&levels);
    if levels.iter().all(|l| l.holds()) {
        Ok(())
    } else {
        Err(Failure::Property(format!("cancellation identity fails for n = {n}")))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Input(format!("cannot start {jobs} workers: {e}")))?;
    }
    match cli.command {
        Command::Measure(a) => measure(a),
        Command::RandomScan(a) => scan(a),
        Command::Verify(a) => verify(a),
        Command::IsingSweep(a) => ising_sweep(a),
        Command::Counting { n } => counting(n),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Property(msg) | Failure::Input(msg) | Failure::Domain(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
