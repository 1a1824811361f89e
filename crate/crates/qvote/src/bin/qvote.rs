//! Thin command-line front end: run elections, sweep noise, replay
//! transcripts. All logic lives in the `qvote` library.
//!
//! Exit codes: 0 success, 1 malformed input, 2 security-property violation
//! detected during a run, 3 replay divergence.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qvote::cli::{self, ElectionFile, SweepSpec};

#[derive(Parser)]
#[command(name = "qvote", about = "Quantum approval-voting protocol simulator")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Override the config's RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the config's measurement shots.
    #[arg(long, global = true)]
    shots: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a full election from a JSON config; prints a summary.
    Run {
        config: PathBuf,
        /// Write the replayable transcript JSON here.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sweep gate or measurement error and emit CSV.
    Sweep {
        spec: PathBuf,
        /// Write CSV here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Re-execute a transcript and verify every count table and hash.
    Replay { transcript: PathBuf },
}

fn main() -> ExitCode {
    let args = Args::parse();
    match dispatch(args) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(args: Args) -> Result<ExitCode, String> {
    match args.command {
        Command::Run { config, output } => {
            let text =
                fs::read_to_string(&config).map_err(|e| format!("{}: {e}", config.display()))?;
            let mut file = ElectionFile::from_json(&text).map_err(|e| e.to_string())?;
            if let Some(seed) = args.seed {
                file.seed = seed;
            }
            if let Some(shots) = args.shots {
                file.shots = shots;
            }
            let report = cli::run_election(&file).map_err(|e| e.to_string())?;
            print!("{}", report.summary);
            if let Some(path) = output {
                fs::write(&path, report.transcript.to_json())
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                println!("transcript written to {}", path.display());
            }
            Ok(if report.violations.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Sweep { spec, output } => {
            let text = fs::read_to_string(&spec).map_err(|e| format!("{}: {e}", spec.display()))?;
            let mut sweep: SweepSpec = SweepSpec::from_json(&text).map_err(|e| e.to_string())?;
            if let Some(seed) = args.seed {
                sweep.seed = seed;
            }
            if let Some(shots) = args.shots {
                sweep.shots = shots;
            }
            let result = cli::run_sweep(&sweep).map_err(|e| e.to_string())?;
            match output {
                Some(path) => {
                    fs::write(&path, &result.csv)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    println!("sweep written to {}", path.display());
                }
                None => print!("{}", result.csv),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Replay { transcript } => {
            let text = fs::read_to_string(&transcript)
                .map_err(|e| format!("{}: {e}", transcript.display()))?;
            let report = cli::replay(&text).map_err(|e| e.to_string())?;
            println!("{report}");
            Ok(if report.is_identical() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
    }
}
