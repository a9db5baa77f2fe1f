//! `affine-qe`: quasi-Einstein solution spaces of affine connections from the command line.
//!
//! Exit status: 0 on success, 1 when a checked property fails, 2 on input errors.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "affine-qe", version, about = "Affine quasi-Einstein solution spaces, deformations and extensions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report to this path; `-` prints JSON instead of the table.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Seed for every randomized choice (basepoints, sampled geodesics).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Curvature, Ricci tensor and its symmetric/alternating parts.
    Curvature { manifold: PathBuf },
    /// Dimension of the quasi-Einstein solution space at a point.
    QeDim {
        manifold: PathBuf,
        /// Eigenvalues `p/q`, comma-separated or repeated.
        #[arg(long, required = true, allow_hyphen_values = true)]
        mu: Vec<String>,
        /// Rational basepoint `a,b,...`; defaults to the origin, or a seeded random point if the origin is excluded.
        #[arg(long, allow_hyphen_values = true)]
        basepoint: Option<String>,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
    },
    /// Compare the predicted dimension of a catalog model with the solver.
    Classify {
        /// Family name, e.g. `typeA`, `exampleB2`, `tc2-2b+`, `tc3-1-`.
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        params: String,
        #[arg(long, required = true, allow_hyphen_values = true)]
        mu: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        basepoint: Option<String>,
    },
    /// Solve a family over random draws or explicit parameter cells and check global properties.
    Sweep {
        #[arg(long)]
        family: String,
        #[arg(long, required = true, allow_hyphen_values = true)]
        mu: Vec<String>,
        /// Number of random models (typeA and typeB only).
        #[arg(long)]
        n: Option<usize>,
        /// One parameter cell per occurrence.
        #[arg(long, allow_hyphen_values = true)]
        params: Vec<String>,
        /// Run cells on the current thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Projectively deform by a 1-form or by the differential of a potential.
    Deform {
        manifold: PathBuf,
        /// Components `w1,w2,...`.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "potential", required_unless_present = "potential")]
        omega: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        potential: Option<String>,
    },
    /// Test strong projective flatness and tabulate the flat chart on a grid.
    Flatten {
        manifold: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        basepoint: Option<String>,
        /// Grid points per axis.
        #[arg(long, default_value_t = 3)]
        grid: usize,
        /// Random geodesics to test for straightness in the chart.
        #[arg(long, default_value_t = 0)]
        geodesics: usize,
    },
    /// Build the deformed Riemannian extension and check its identities.
    Extend {
        manifold: PathBuf,
        /// Deformation entry `i,j=expr` (1-based), repeated.
        #[arg(long, allow_hyphen_values = true)]
        phi: Vec<String>,
        /// Base function whose lift is tested.
        #[arg(long, allow_hyphen_values = true)]
        f: Option<String>,
        /// Eigenvalue of `f`; enables the quasi-Einstein check on the extension.
        #[arg(long, allow_hyphen_values = true, requires = "f")]
        mu: Option<String>,
    },
    /// Check that a function solves the quasi-Einstein equation.
    Verify {
        manifold: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(commands::Outcome::Ok) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
