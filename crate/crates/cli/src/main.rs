//! `pdjc`: spectrum scans, time evolution and oracle validation for the
//! parity-deformed Jaynes–Cummings model.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use pdjc_core::scenario::{
    parse_observables, run_evolution, run_spectrum, run_validate, write_series_csv, write_spectrum_csv, RunConfig,
};

#[derive(Parser)]
#[command(name = "pdjc", version, about = "Parity-deformed Jaynes-Cummings simulator")]
struct Cli {
    /// Worker threads for parallel evaluation.
    #[arg(long, env = "PDJC_THREADS", global = true, hide = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Dressed energies over a detuning range, written to spectrum.csv.
    Spectrum(Common),
    /// Observable time series (evolution.csv) and summary.json.
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Comma-separated subset of inversion,fidelity,entropy,mandel_q,squeezing.
        #[arg(long)]
        observables: Option<String>,
        /// Also compare against the brute-force propagator.
        #[arg(long)]
        with_oracle: bool,
    },
    /// Closed form against the brute-force propagator, written to validation.json.
    Validate(Common),
}

fn load(common: &Common) -> Result<RunConfig> {
    let config = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    fs::create_dir_all(&common.out).with_context(|| format!("creating {}", common.out.display()))?;
    Ok(config)
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Spectrum(common) => {
            let config = load(&common)?;
            let mut buf = Vec::new();
            write_spectrum_csv(&run_spectrum(&config)?, &mut buf)?;
            write(&common.out, "spectrum.csv", &buf)?;
            Ok(true)
        }
        Command::Evolve { common, observables, with_oracle } => {
            let mut config = load(&common)?;
            if let Some(list) = observables {
                config.observables = parse_observables(&list)?;
            }
            config.with_oracle |= with_oracle;
            let out = run_evolution(&config)?;
            let mut buf = Vec::new();
            write_series_csv(&out.series, &mut buf)?;
            write(&common.out, "evolution.csv", &buf)?;
            write(&common.out, "summary.json", out.summary.to_json().as_bytes())?;
            Ok(true)
        }
        Command::Validate(common) => {
            let config = load(&common)?;
            let report = run_validate(&config)?;
            write(&common.out, "validation.json", report.to_json().as_bytes())?;
            for failure in &report.failures {
                eprintln!("validation failed: {failure}");
            }
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: configuring {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
