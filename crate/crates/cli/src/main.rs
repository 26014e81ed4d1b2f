//! `qmix`: coefficient synthesis, state combination, orbit emission,
//! entropy-inequality scans and flat-unitary search.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use qmix::experiments::{
    run_combine, run_epi_scan, run_flat_search, run_orbit, run_synth, CombineMode, CombineParams, OrbitRequest,
    ScanConfig, StatesFile, SynthConfig,
};
use qmix::io::{to_json_pretty, Tagged};
use qmix::{EntropyFunctional, Error, Result};

#[derive(Parser)]
#[command(
    name = "qmix",
    version,
    about = "Ternary combination of quantum states via unitary group-algebra elements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficients from per-irrep unitaries.
    Synth(SynthArgs),
    /// Combine two or three states.
    Combine(CombineArgs),
    /// Trace the configuration orbit for given weights as CSV.
    Orbit(OrbitArgs),
    /// Monte-Carlo scan of the entropy inequality.
    EpiScan(ScanArgs),
    /// Search for S3 coefficient vectors with flat moduli.
    FlatSearch(FlatArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CombineArgs {
    /// Combined document with `states` or `bloch`, and `params`.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    states: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    params: Option<PathBuf>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<CombineMode>,
    /// Cross-check every applicable evaluator.
    #[arg(long)]
    verify: bool,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OrbitArgs {
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Comma-separated weights `p1,p2,p3`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    weights: Option<Vec<f64>>,
    #[arg(long)]
    steps: Option<usize>,
    /// Append the Bloch vector of the combined axis-aligned qubit triple.
    #[arg(long)]
    mub: bool,
    /// CSV destination (stdout when absent).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Summary JSON destination (stderr when absent).
    #[arg(long, value_name = "FILE")]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    functional: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    commuting: bool,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Where to write the wall-clock timing record.
    #[arg(long, value_name = "FILE")]
    timing: Option<PathBuf>,
}

#[derive(Args)]
struct FlatArgs {
    #[arg(long, default_value_t = 200)]
    attempts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CombineDoc {
    #[serde(default)]
    format: Option<String>,
    #[serde(flatten)]
    states: StatesFile,
    params: CombineParams,
    #[serde(default)]
    mode: Option<CombineMode>,
    #[serde(default)]
    verify: bool,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanDoc {
    #[serde(default)]
    format: Option<String>,
    n: Option<usize>,
    functional: Option<EntropyFunctional>,
    samples: Option<usize>,
    d: Option<usize>,
    seed: Option<u64>,
    #[serde(default)]
    commuting: bool,
}

#[derive(Serialize)]
struct Timing {
    elapsed_seconds: f64,
}

fn parse_mode(s: &str) -> std::result::Result<CombineMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Format(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut w = open_out(out)?;
    writeln!(w, "{}", to_json_pretty(&Tagged::new(value)))
        .and_then(|_| w.flush())
        .map_err(|e| Error::Format(format!("write failed: {e}")))
}

fn synth(args: SynthArgs) -> Result<()> {
    let cfg: SynthConfig = read_json(&args.config)?;
    emit(&run_synth(&cfg)?, args.out.as_deref())
}

fn combine(args: CombineArgs) -> Result<()> {
    let (states, params, mode, verify) = match (&args.config, &args.states, &args.params) {
        (Some(c), None, None) => {
            let doc: CombineDoc = read_json(c)?;
            qmix::io::check_format(doc.format.as_deref())?;
            (doc.states, doc.params, doc.mode, doc.verify)
        }
        (None, Some(s), Some(p)) => (read_json(s)?, read_json(p)?, None, false),
        _ => return Err(Error::Format("give --config, or both --states and --params".into())),
    };
    let mode = args.mode.or(mode).unwrap_or(CombineMode::Closed);
    let report = run_combine(&states.load()?, &params, mode, verify || args.verify)?;
    emit(&report, args.out.as_deref())
}

fn orbit(args: OrbitArgs) -> Result<()> {
    let mut req: OrbitRequest = match &args.config {
        Some(c) => read_json(c)?,
        None => OrbitRequest {
            steps: 1200,
            ..Default::default()
        },
    };
    if let Some(w) = args.weights {
        let w: [f64; 3] = w
            .try_into()
            .map_err(|w: Vec<f64>| Error::Format(format!("--weights takes 3 values, got {}", w.len())))?;
        req.weights = Some(w);
        req.lengths = None;
    }
    if let Some(s) = args.steps {
        req.steps = s;
    }
    req.mub |= args.mub;
    let run = run_orbit(&req)?;
    run.write_csv(open_out(args.out.as_deref())?)?;
    match &args.summary {
        Some(p) => emit(&run.summary, Some(p)),
        None => {
            eprintln!("{}", to_json_pretty(&Tagged::new(&run.summary)));
            Ok(())
        }
    }
}

fn epi_scan(args: ScanArgs) -> Result<()> {
    let doc: ScanDoc = match &args.config {
        Some(c) => read_json(c)?,
        None => ScanDoc::default(),
    };
    let functional = match &args.functional {
        Some(s) => EntropyFunctional::parse(s)?,
        None => doc.functional.unwrap_or(EntropyFunctional::VonNeumann),
    };
    let cfg = ScanConfig {
        format: doc.format,
        n: args
            .n
            .or(doc.n)
            .ok_or_else(|| Error::Format("--n is required".into()))?,
        functional,
        samples: args.samples.or(doc.samples).unwrap_or(10_000),
        d: args.d.or(doc.d).unwrap_or(2),
        seed: args.seed.or(doc.seed).unwrap_or(0),
        commuting: args.commuting || doc.commuting,
    };
    let report = run_epi_scan(&cfg)?;
    if let Some(ce) = &report.counterexample {
        eprintln!("counterexample: gap {:.3e} at sample {}", ce.gap, report.argmin.sample);
    }
    let timing = Timing {
        elapsed_seconds: report.elapsed,
    };
    match &args.timing {
        Some(p) => emit(&timing, Some(p))?,
        None => eprintln!("elapsed: {:.3} s", timing.elapsed_seconds),
    }
    emit(&report, args.out.as_deref())
}

fn flat_search(args: FlatArgs) -> Result<()> {
    emit(&run_flat_search(args.attempts, args.seed)?, args.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => synth(a),
        Command::Combine(a) => combine(a),
        Command::Orbit(a) => orbit(a),
        Command::EpiScan(a) => epi_scan(a),
        Command::FlatSearch(a) => flat_search(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.class().exit_code())
        }
    }
}
