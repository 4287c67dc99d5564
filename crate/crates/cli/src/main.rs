//! `mrsim`: command-line front end.
//!
//! Exit codes: 0 success, 1 runtime or I/O error, 2 usage error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mrsim::sampler::Scheme;

#[derive(Debug, Parser)]
#[command(name = "mrsim", version, about = "Retrospective rigid-motion k-space simulator")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random rigid-motion trajectory and write it as CSV.
    Trajectory(TrajectoryArgs),
    /// Corrupt one image with random motion and write the simulation record.
    Simulate(SimulateArgs),
    /// Generate a labeled motion/clean dataset with a manifest.
    Batch(BatchArgs),
    /// Compare schemes across paired batch manifests.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    /// tx, ty and rz only
    InPlane,
    /// all six degrees of freedom
    Full6dof,
}

#[derive(Debug, Args)]
struct SeverityArgs {
    /// Target RMS displacement [mm]
    #[arg(long = "disp", value_name = "MM", default_value_t = 1.0)]
    disp_mm: f64,
    /// Target RMS rotation [deg]
    #[arg(long = "rot", value_name = "DEG", default_value_t = 0.6)]
    rot_deg: f64,
}

#[derive(Debug, Args)]
struct TrajectoryArgs {
    /// Number of shots (one pose per TR)
    #[arg(long, value_name = "N")]
    shots: usize,
    /// Repetition time [ms]
    #[arg(long = "tr-ms", value_name = "MS", default_value_t = 400.0)]
    tr_ms: f64,
    #[command(flatten)]
    severity: SeverityArgs,
    /// Which pose components move
    #[arg(long, value_enum, default_value = "full6dof")]
    model: ModelArg,
    /// Random seed [integer]
    #[arg(long, env = "MRSIM_SEED", default_value_t = 0)]
    seed: u64,
    /// Output CSV file
    #[arg(short, long, value_name = "FILE")]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct ScannerArgs {
    /// Repetition time [ms]
    #[arg(long = "tr-ms", value_name = "MS", default_value_t = 400.0)]
    tr_ms: f64,
    /// Number of excitations averaged [count]
    #[arg(long, value_name = "N", default_value_t = 1)]
    nex: usize,
    /// Square acquisition matrix [pixels]; inputs are resized to it
    #[arg(long, value_name = "PIXELS", default_value_t = 256)]
    matrix: usize,
    /// Acquire radial spokes in golden-angle order (radial only)
    #[arg(long)]
    golden_angle: bool,
    /// Spiral interleaves [count] (spiral only; default matrix/8)
    #[arg(long, value_name = "N")]
    spiral_interleaves: Option<usize>,
    /// Spiral turns per interleave [count] (spiral only)
    #[arg(long, value_name = "TURNS")]
    spiral_turns: Option<f64>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Input image (.pgm, or .raw/.f32 with a JSON sidecar)
    #[arg(short, long, value_name = "FILE")]
    input: PathBuf,
    /// Sampling scheme
    #[arg(long, value_name = "SCHEME")]
    scheme: Scheme,
    #[command(flatten)]
    scanner: ScannerArgs,
    #[command(flatten)]
    severity: SeverityArgs,
    /// Random seed [integer]
    #[arg(long, env = "MRSIM_SEED", default_value_t = 0)]
    seed: u64,
    /// Output directory
    #[arg(short, long, value_name = "DIR")]
    output: PathBuf,
    /// Also write the sampling plan as CSV
    #[arg(long)]
    emit_plan: bool,
    /// Also write 8-bit PGM previews of the clean and corrupted images
    #[arg(long)]
    emit_previews: bool,
}

#[derive(Debug, Args)]
struct BatchArgs {
    /// Directory of input images (.pgm, .raw, .f32)
    #[arg(short, long, value_name = "DIR")]
    input: PathBuf,
    /// Output dataset directory
    #[arg(short, long, value_name = "DIR")]
    output: PathBuf,
    /// Trials per image [count]
    #[arg(long, value_name = "N", default_value_t = 1)]
    trials: usize,
    /// Comma-separated schemes
    #[arg(long, value_name = "LIST", value_delimiter = ',', default_value = "cartesian,radial,spiral")]
    schemes: Vec<Scheme>,
    #[command(flatten)]
    scanner: ScannerArgs,
    /// Fixed RMS displacement [mm] instead of drawing N(1.0, 0.4) per trial
    #[arg(long = "disp", value_name = "MM", requires = "rot_deg")]
    disp_mm: Option<f64>,
    /// Fixed RMS rotation [deg] instead of drawing N(0.6, 0.4) per trial
    #[arg(long = "rot", value_name = "DEG", requires = "disp_mm")]
    rot_deg: Option<f64>,
    /// Skip the motion-free records
    #[arg(long)]
    no_clean: bool,
    /// Master seed [integer]
    #[arg(long, env = "MRSIM_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Batch manifest(s); together they must cover at least two schemes
    #[arg(short, long = "manifest", value_name = "FILE", required = true)]
    manifests: Vec<PathBuf>,
    /// Output directory for report.csv and report.txt
    #[arg(short, long, value_name = "DIR")]
    output: PathBuf,
    /// Train/test repetitions [count]
    #[arg(long, value_name = "N", default_value_t = 5)]
    repetitions: usize,
    /// Held-out fraction per repetition [0-1]
    #[arg(long, value_name = "FRACTION", default_value_t = 0.3)]
    test_fraction: f64,
    /// Seed for the splits and probe initialization [integer]
    #[arg(long, env = "MRSIM_SEED", default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Trajectory(args) => commands::trajectory(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Batch(args) => commands::batch(args),
        Command::Compare(args) => commands::compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(commands::Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(commands::Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
