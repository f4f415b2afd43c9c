//! Command-line front end: parses a run configuration, dispatches to the
//! library and writes one flat report per run.

mod commands;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cone_overlap::minkowski::SearchBudget;
use report::{emit_report, Format};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] cone_overlap::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Parser)]
#[command(name = "cone-overlap", version, about = "Overlap counts of Minkowski sums of cone slabs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Box budget of each certified membership search.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub max_boxes: usize,
    /// Smallest box width (scaled units); default 1e-4·δ.
    #[arg(long, global = true)]
    pub min_box_width: Option<f64>,
}

impl Common {
    pub fn budget(&self) -> SearchBudget {
        SearchBudget {
            max_boxes: self.max_boxes.max(1),
            min_box_width: self.min_box_width,
        }
    }
}

/// Intervals J_i = [j_i, j_i + width].
#[derive(Debug, Args, Clone)]
pub struct Intervals {
    #[arg(long, default_value_t = 1.3)]
    pub j1: f64,
    #[arg(long, default_value_t = 1.3)]
    pub j2: f64,
    /// Interval width; defaults to δ^(1/2).
    #[arg(long)]
    pub width: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Standard,
    Enlarged,
    Eps,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Overlap counts at witness-biased points.
    ///
    /// Columns: delta,point_id,xi1,xi2,eta,certified_in,unknown,pairs_tested
    Scan {
        #[arg(long)]
        delta: f64,
        #[command(flatten)]
        j: Intervals,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, value_enum, default_value = "standard")]
        variant: VariantArg,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Verdict of every non-prefiltered pair at one point.
    ///
    /// Columns: mu,nu,a,verdict
    Point {
        #[arg(long)]
        delta: f64,
        #[command(flatten)]
        j: Intervals,
        #[arg(long, allow_hyphen_values = true)]
        xi1: f64,
        #[arg(long, allow_hyphen_values = true)]
        xi2: f64,
        #[arg(long)]
        eta: f64,
        #[arg(long, value_enum, default_value = "standard")]
        variant: VariantArg,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Index pairs (μ, ν) with (μ+ν)/2 = a.
    ///
    /// Columns: a,mu,nu
    Fiber {
        #[arg(long)]
        delta: f64,
        /// Half-integer class index.
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
    },
    /// One lemma check; exit 1 when it fails.
    ///
    /// Names: cos, diam, quadratic, slice, 3.1, 3.2, 3.3, ball, 3.4, ledger.
    /// Columns depend on the check (see docs/formats.md).
    Lemma {
        name: String,
        #[command(flatten)]
        args: LemmaArgs,
    },
    /// Regrouping checks 4.3, 4.4, 4.5; exit 1 when one fails.
    ///
    /// Columns: check,delta,epsilon,n,delta_eps,mu,ell,samples,failures,pass
    Regroup {
        name: String,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        epsilon: f64,
        /// Sector μ for 4.4; all sampled μ when omitted.
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<i64>,
        #[arg(long, default_value_t = 1.3)]
        j1: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Maximum overlap down a δ ladder; exit 1 when it grows by over 20%.
    ///
    /// Columns: delta,points,max_certified,max_with_unknown,unknown_fraction
    Uniformity {
        #[arg(long, value_delimiter = ',', default_value = "1e-2,2.5e-3,6.25e-4")]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 1.3)]
        j1: f64,
        #[arg(long, default_value_t = 1.3)]
        j2: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// ε-neighborhood maxima scaled by δ^ε; exit 1 when max/min > 4.
    ///
    /// Columns: delta,epsilon,points,max_count,normalized,unknown_fraction
    EpsilonScan {
        #[arg(long, default_value_t = 0.3)]
        epsilon: f64,
        #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3,1e-4")]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 1.3)]
        j1: f64,
        #[arg(long, default_value_t = 1.3)]
        j2: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Antipodal pair counts for a sector bound a ∈ (π/2, π).
    ///
    /// Columns: tau,oracle_count,standard_count,checked,agree,unknown,contradictions,exponent
    Counterexample {
        #[arg(long, default_value_t = 3.0 * std::f64::consts::FRAC_PI_4)]
        a: f64,
        #[arg(long, default_value_t = 1.3)]
        b: f64,
        #[arg(long, value_delimiter = ',', default_value = "1e4,4e4,1.6e5")]
        taus: Vec<f64>,
        /// Oracle and non-oracle pairs checked per τ (each).
        #[arg(long, default_value_t = 100)]
        subsample: usize,
    },
}

#[derive(Debug, Args, Clone)]
pub struct LemmaArgs {
    #[arg(long, default_value_t = 1e-4)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.3)]
    pub j1: f64,
    #[arg(long, default_value_t = 1.7)]
    pub j2: f64,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    #[arg(long)]
    pub c3: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub b1: f64,
    #[arg(long)]
    pub ell: Option<f64>,
    #[arg(long)]
    pub m: Option<u64>,
    /// Rotation / class index a.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub a: f64,
    #[arg(long)]
    pub eta_p: Option<f64>,
    #[arg(long)]
    pub eta_pp: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, default_value_t = 5)]
    pub grid: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
}

fn init_threads() {
    let n = std::env::var("OVERLAP_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    if n > 0 {
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses `argv`, runs the command and returns the exit code: 0 on
/// success, 1 when a check fails, 2 on usage, parameter or I/O errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    init_threads();
    let result = commands::dispatch(&cli.command, &cli.common)
        .and_then(|rep| emit_report(&rep, cli.common.format, cli.common.out.as_deref()).map(|_| rep.pass));
    match result {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("check failed");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
