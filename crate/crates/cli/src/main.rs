//! `purity-limits`: command-line front end for purity-core.
//!
//! Exit codes: 0 success, 1 domain error (JSON on stderr), 2 forbidden-region
//! violation found by `verify`, 64 usage error.

mod commands;
mod inputs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use purity_core::{Error, Tolerances};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "purity-limits", version, about = "Limits on purifying quantum resources: monotones, bounds, falsification")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Hermiticity tolerance for inputs.
    #[arg(long, global = true)]
    tol_herm: Option<f64>,
    /// Allowed negative eigenvalue for states.
    #[arg(long, global = true)]
    tol_psd: Option<f64>,
    /// Allowed trace drift for states.
    #[arg(long, global = true)]
    tol_trace: Option<f64>,
    /// Polytope membership distance.
    #[arg(long, global = true)]
    tol_member: Option<f64>,
    /// Support/kernel eigenvalue threshold.
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
    /// Target width of robustness intervals.
    #[arg(long, global = true)]
    tol_rob: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Accept state files that fail PSD/trace validation.
    #[arg(long, global = true)]
    no_validate: bool,
}

impl Global {
    fn tolerances(&self) -> Tolerances {
        let mut t = Tolerances::default();
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut t.herm, self.tol_herm);
        set(&mut t.psd, self.tol_psd);
        set(&mut t.trace, self.tol_trace);
        set(&mut t.member, self.tol_member);
        set(&mut t.rank, self.tol_rank);
        set(&mut t.rob, self.tol_rob);
        t
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Free-state polytopes.
    #[command(subcommand)]
    Polytope(PolytopeCmd),
    /// Hypothesis-testing entropies, free overlap and robustness.
    #[command(subcommand)]
    Monotone(MonotoneCmd),
    /// Error, trade-off and overhead bounds. CSV for `region` has header `p,eps_star`.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Sample free instruments and check every outcome against the trade-off bound.
    Verify(VerifyArgs),
    /// Choi-level channel quantities.
    #[command(subcommand)]
    Channel(ChannelCmd),
    /// Data tables behind the two figures.
    #[command(subcommand)]
    Figdata(FigCmd),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TheoryName {
    Coherence,
    Stabilizer,
}

#[derive(Subcommand, Debug)]
enum PolytopeCmd {
    /// Write the vertex list of a free polytope as JSON.
    Gen {
        #[arg(long, value_enum)]
        theory: TheoryName,
        /// Dimension (coherence) or number of qubits (stabilizer).
        #[arg(long)]
        n: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RobustnessKind {
    Generalized,
    Standard,
}

#[derive(Subcommand, Debug)]
enum MonotoneCmd {
    /// D_H^eps(rho||sigma), or its minimum over the free set with --free.
    Dh {
        #[arg(long)]
        state: String,
        #[arg(long, conflicts_with = "sigma", required_unless_present = "sigma")]
        free: Option<String>,
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long)]
        eps: f64,
    },
    /// D_min(rho||sigma), or its minimum over the free set with --free.
    Dmin {
        #[arg(long)]
        state: String,
        #[arg(long, conflicts_with = "sigma", required_unless_present = "sigma")]
        free: Option<String>,
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Largest overlap of a pure target with the free set.
    Overlap {
        #[arg(long)]
        state: String,
        #[arg(long)]
        free: String,
    },
    /// Robustness interval with primal and dual certificates.
    Robustness {
        #[arg(long)]
        state: String,
        #[arg(long)]
        free: String,
        #[arg(long, value_enum, default_value_t = RobustnessKind::Generalized)]
        kind: RobustnessKind,
    },
}

#[derive(Args, Debug, Clone)]
struct BoundInputs {
    /// Primitive state (full rank).
    #[arg(long)]
    state: String,
    #[arg(long)]
    free: String,
    /// Pure target state.
    #[arg(long)]
    target: String,
}

#[derive(Subcommand, Debug)]
enum BoundCmd {
    /// eps >= lambda_min (1 - f).
    Deterministic {
        #[command(flatten)]
        inputs: BoundInputs,
    },
    /// eps/p >= lambda_min (1 - f) / (1 + R).
    Tradeoff {
        #[command(flatten)]
        inputs: BoundInputs,
        /// Theory with a resource-destroying map: drop the 1/(1+R) factor.
        #[arg(long)]
        rdc: bool,
    },
    /// Minimum number of copies.
    Overhead {
        #[command(flatten)]
        inputs: BoundInputs,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long)]
        rdc: bool,
    },
    /// Copies per output T state when distilling m T states.
    Magic {
        #[arg(long)]
        state: String,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long)]
        rdc: bool,
    },
    /// Boundary eps*(p) of the excluded region on a grid start:stop:count.
    Region {
        #[command(flatten)]
        inputs: BoundInputs,
        #[arg(long, default_value = "0.1:1.0:10")]
        grid: String,
        #[arg(long)]
        rdc: bool,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// coherence:D, stabilizer:N or a polytope file.
    #[arg(long)]
    theory: String,
    #[arg(long)]
    state: String,
    #[arg(long)]
    target: String,
    /// Number of sampled instruments.
    #[arg(short = 'N', long = "samples")]
    samples: usize,
    #[arg(long, action = ArgAction::Set, default_value_t = true)]
    structured: bool,
    /// Multiply the bound before checking (harness self-test).
    #[arg(long, default_value_t = 1.0)]
    bound_scale: f64,
    /// Also check the D_H monotone on this many leading samples.
    #[arg(long, default_value_t = 0)]
    monotone_checks: usize,
    #[arg(long)]
    rdc: bool,
    /// Write the Pareto frontier of (p, eps) as CSV.
    #[arg(long)]
    frontier: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum ChannelCmd {
    /// Normalized Choi state.
    Choi {
        #[arg(long)]
        channel: String,
    },
    /// Largest p with J_N - p J_E positive.
    Freefrac {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        against: String,
    },
    /// D_min of Choi states (lower bound on the channel quantity).
    Dmin {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        against: String,
    },
    /// Evidence that the channel cannot be made into a unitary by free processing.
    Nogo {
        #[arg(long)]
        channel: String,
        /// hadamard, x or t.
        #[arg(long)]
        unitary: String,
        #[arg(long)]
        theory: String,
        #[arg(short = 'N', long = "samples", default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug)]
enum FigCmd {
    /// Excluded region (p,eps_star) for the qubit coherence instance, plus a
    /// sampled frontier with --samples.
    Fig1 {
        #[arg(long, default_value = "0.0:1.0:21")]
        grid: String,
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long)]
        frontier: Option<PathBuf>,
    },
    /// Bound against targets on the x-z great circle (theta,f_psi,eps_lower).
    Fig2 {
        #[arg(long, default_value = "0.0:3.141592653589793:33")]
        grid: String,
    },
}

const EXIT_DOMAIN: u8 = 1;
const EXIT_VIOLATION: u8 = 2;
const EXIT_USAGE: u8 = 64;

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NonHermitian { .. } => "NonHermitian",
        Error::NotPsd { .. } => "NotPSD",
        Error::TraceNotOne { .. } => "TraceNotOne",
        Error::DimensionMismatch(_) => "DimensionMismatch",
        Error::NotPure { .. } => "NotPure",
        Error::UnsupportedSize(_) => "UnsupportedSize",
        Error::Parse(_) => "ParseError",
        Error::BadEpsilon(_) => "BadEpsilon",
        Error::InvalidParameter(_) => "InvalidParameter",
        Error::Infeasible => "Infeasible",
        Error::Unbounded => "Unbounded",
        Error::ConvergenceFailure { .. } => "ConvergenceFailure",
        Error::NotFullRank { .. } => "NotFullRank",
        Error::FreeTarget { .. } => "FreeTarget",
        Error::NotTracePreserving { .. } => "NotTracePreserving",
        Error::SamplingExhausted { .. } => "SamplingExhausted",
        Error::PreconditionFailed(_) => "PreconditionFailed",
        Error::ViolationFound { .. } => "ViolationFound",
        Error::Io(_) => "Io",
    }
}

fn report_error(e: &Error) -> ExitCode {
    let mut body = json!({ "error": error_kind(e), "message": e.to_string() });
    if let Error::ViolationFound { sample, report } = e {
        body["message"] = json!(format!("{} forbidden-region violations", report.violation_count));
        body["sample"] = serde_json::from_str(sample).unwrap_or_else(|_| json!(sample));
    }
    if let Error::ConvergenceFailure { lo, hi } = e {
        body["interval"] = json!([lo, hi]);
    }
    eprintln!("{body}");
    ExitCode::from(if matches!(e, Error::ViolationFound { .. }) {
        EXIT_VIOLATION
    } else {
        EXIT_DOMAIN
    })
}

fn configure_threads() {
    if let Some(n) = std::env::var("PURITY_LIMITS_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            if !matches!(e.kind(), ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                eprintln!();
                let _ = Cli::command().write_help(&mut std::io::stderr());
            }
            return ExitCode::from(EXIT_USAGE);
        }
    };
    configure_threads();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(&e),
    }
}
