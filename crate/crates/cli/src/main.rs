use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use penrose_core::dispersion::KScan;
use penrose_core::equilibrium::ProfileSpec;
use penrose_core::{Error, Execution};

mod commands;

/// Penrose stability, Krein signatures and structural-instability
/// experiments for homogeneous Vlasov-Poisson equilibria.
///
/// Exit codes: 0 stable, 10 unstable, 20 critical state, 2 usage error,
/// 30 and above internal errors.
#[derive(Debug, Parser)]
#[command(name = "penrose", version)]
pub struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, env = "PENROSE_OUT_DIR", default_value = ".")]
    pub out: PathBuf,

    /// Run batch work on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Penrose test over a k scan: report.json plus one contour CSV per k.
    Analyze {
        /// `maxwellian:c,w`, `bimax:c,w`, `sum:a,c,w;...`, `tangency:w,u`, or a .csv/.toml path.
        #[arg(long)]
        profile: ProfileSpec,
        /// Log-spaced scan `min:max:count`.
        #[arg(long, default_value = "0.05:5:60")]
        k_scan: KScan,
    },
    /// One Penrose contour as CSV and SVG.
    Penrose {
        #[arg(long)]
        profile: ProfileSpec,
        #[arg(long)]
        k: f64,
        /// SVG path (default `<out>/contour.svg`).
        #[arg(long)]
        svg: Option<PathBuf>,
        /// CSV path (default `<out>/contour.csv`).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Continuum signature `u,sigma` on the grid.
    Signature {
        #[arg(long)]
        profile: ProfileSpec,
    },
    /// Unstable roots at one k, as JSON.
    Roots {
        #[arg(long)]
        profile: ProfileSpec,
        #[arg(long)]
        k: f64,
    },
    /// Destabilizing perturbation with before/after reports.
    Destabilize {
        #[arg(long)]
        profile: ProfileSpec,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Target zero of f0' (w11, rearrangement, k0) or bump centre
        /// (embedded; defaults to the embedded mode).
        #[arg(long)]
        u0: Option<f64>,
        /// Plateau height of chi.
        #[arg(long, default_value_t = 0.01)]
        h: f64,
        /// Bump amplitude (k0, embedded).
        #[arg(long, default_value_t = 0.02)]
        amplitude: f64,
        /// Bump radius (default 0.15 for k0, 0.5 for embedded).
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Time integration of one linearized mode.
    Simulate {
        #[arg(long)]
        profile: ProfileSpec,
        #[arg(long)]
        k: f64,
        /// Time step (default 0.1/(k v_max)).
        #[arg(long)]
        dt: Option<f64>,
        /// Final time (default 20/k).
        #[arg(long)]
        t_end: Option<f64>,
        /// Steps between recorded rows.
        #[arg(long, default_value_t = 10)]
        record_every: usize,
    },
    /// Bisection for the critical bi-Maxwellian separation.
    Sweep {
        /// Profile family; only `bimax` is supported.
        family: String,
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        /// Separation bracket `lo:hi` (default 0.75w:1.0w).
        #[arg(long)]
        bracket: Option<String>,
    },
    /// Little-big-man classification of a signed mode triplet such as `+-+`.
    Triplet {
        #[arg(allow_hyphen_values = true)]
        signs: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    W11,
    Rearrangement,
    K0,
    Embedded,
}

/// Process exit status for a finished analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Stable,
    Unstable,
    Critical,
}

impl Outcome {
    fn code(self) -> u8 {
        match self {
            Outcome::Stable => 0,
            Outcome::Unstable => 10,
            Outcome::Critical => 20,
        }
    }
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::CriticalState { .. } => 20,
        Error::Domain(_) => 31,
        Error::Parameter(_) | Error::Diffeomorphism(_) => 32,
        Error::Precondition(_) => 33,
        Error::Solver(_) | Error::Unresolved { .. } => 34,
        Error::Invariant(_) => 35,
        Error::Fixture(_) => 36,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => 37,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match commands::run(&cli, exec) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
