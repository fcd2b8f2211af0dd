//! `gapsat`: lattice packings with a gap defect from the command line.
//!
//! Exit codes: 0 success or accepted, 1 rejected or infeasible, 2 usage or parse error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "gapsat", version, about = "Gap-defect lattice packings: widening, witnesses, checking, rendering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum LatticeArg {
    Honeycomb,
    Fcc,
}

/// Lattice and gap description shared by the generating subcommands.
#[derive(Args, Debug, Clone)]
pub struct GapArgs {
    #[arg(long, value_enum, default_value = "honeycomb")]
    pub lattice: LatticeArg,
    /// Gap normal as comma-separated components (normalized); defaults to the last axis.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gap_normal: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub gap_offset: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gap_width: f64,
    /// Recorded in outputs; every subcommand is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the centers of a window of the defective packing.
    Generate {
        #[command(flatten)]
        gap: GapArgs,
        /// Half-width of the square or cubic window centered at the origin.
        #[arg(long, default_value_t = 10.0)]
        window: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Optimize one widening iteration and write its schedule.
    Widen {
        #[command(flatten)]
        gap: GapArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a witness of non-complete-saturation and verify it.
    Witness {
        #[command(flatten)]
        gap: GapArgs,
        /// Block size used by the reductions.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a witness file.
    Check {
        path: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Tabulate the widening increment over a grid of gap widths as CSV.
    DeltaCurve {
        #[command(flatten)]
        gap: GapArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0.1)]
        d_min: f64,
        #[arg(long, default_value_t = 1.0)]
        d_max: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a witness or patch file: SVG in the plane, OBJ (with MTL) in space.
    Render {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { gap, window, out } => commands::generate(&gap, window, &out),
        Command::Widen { gap, n, out } => commands::widen(&gap, n, out.as_deref()),
        Command::Witness { gap, n, strict, out } => commands::witness(&gap, n, strict, out.as_deref()),
        Command::Check { path, strict } => commands::check(&path, strict),
        Command::DeltaCurve { gap, n, d_min, d_max, steps, out } => {
            commands::delta_curve(&gap, n, d_min, d_max, steps, out.as_deref())
        }
        Command::Render { input, out } => commands::render(&input, &out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
