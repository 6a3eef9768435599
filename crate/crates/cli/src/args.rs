use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use friable::kernel::DEFAULT_PRIME_LIMIT;
use friable::special::DEFAULT_GRID_STEP;

/// Exact and asymptotic counts of friable integers and of integers with a
/// small squarefree kernel.
#[derive(Debug, Parser)]
#[command(name = "friable", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Output format. Defaults to json for `estimate`, csv for `sandwich` and
    /// `compare`, text otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Directory for cached tables. Nothing is cached when unset.
    #[arg(long, global = true, env = "FRIABLE_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Size of the factor tables; defaults to the largest x of the request.
    #[arg(long, global = true)]
    pub table_limit: Option<u64>,
    /// Re-sieve in windows instead of holding full tables in memory.
    #[arg(long, global = true)]
    pub low_memory: bool,
    /// Primes summed explicitly in the saddle-point function.
    #[arg(long, global = true, default_value_t = DEFAULT_PRIME_LIMIT)]
    pub prime_limit: u64,
    /// Grid step of the rho table.
    #[arg(long, global = true, default_value_t = DEFAULT_GRID_STEP)]
    pub grid_step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dickman rho, its derivative and r(v) = -rho'(v)/rho(v).
    #[command(allow_negative_numbers = true)]
    Rho {
        #[arg(long)]
        v: f64,
    },
    /// Root xi(v) of e^xi = 1 + v xi, and xi'(v).
    #[command(allow_negative_numbers = true)]
    Xi {
        #[arg(long)]
        v: f64,
    },
    /// Saddle point sigma_t and its asymptotic expansion.
    #[command(allow_negative_numbers = true)]
    Sigma {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(0..=2))]
        order: u32,
    },
    /// The kernel density F(t).
    #[command(allow_negative_numbers = true)]
    Bigf {
        #[arg(long)]
        t: f64,
    },
    /// zeta(s) and Z(s) = (s - 1) zeta(s) / s.
    #[command(allow_negative_numbers = true)]
    Zeta {
        #[arg(long)]
        s: f64,
    },
    /// Exact counts from factor tables.
    #[command(allow_negative_numbers = true)]
    Count {
        #[arg(long, value_enum, ignore_case = true)]
        kind: CountKind,
        #[command(flatten)]
        p: Params,
    },
    /// Closed-form estimates with their error scales.
    #[command(allow_negative_numbers = true)]
    Estimate {
        #[arg(long, value_enum, ignore_case = true)]
        kind: EstimateKind,
        #[command(flatten)]
        p: Params,
        /// Exponent c of the kernel window (log x)^-c <= theta <= 1 - (log x)^-c.
        #[arg(long, default_value_t = 0.25)]
        window_c: f64,
        /// Bound A of the kernel window |alpha| <= A.
        #[arg(long, default_value_t = 1.0)]
        window_a: f64,
    },
    /// Telescoping bounds for D(x, u) or S(x; theta, alpha), with the trace.
    #[command(allow_negative_numbers = true)]
    Sandwich {
        #[arg(long, value_enum, ignore_case = true)]
        kind: SandwichKind,
        #[command(flatten)]
        p: Params,
        #[arg(long, value_enum, default_value_t = Evaluator::Exact)]
        evaluator: Evaluator,
        /// Grid ratio; requires --steps.
        #[arg(long, requires = "steps")]
        epsilon: Option<f64>,
        /// Number of grid steps; requires --epsilon.
        #[arg(long, requires = "epsilon")]
        steps: Option<usize>,
    },
    /// Exact against estimated values over a parameter grid.
    #[command(allow_negative_numbers = true)]
    Compare {
        #[arg(long, value_enum, ignore_case = true)]
        kind: CompareKind,
        #[command(flatten)]
        grid: Grid,
    },
    /// Run the acceptance checks and report one line per criterion.
    Selftest {
        /// Cap the counting checks at x = 10^6.
        #[arg(long)]
        quick: bool,
        /// Run only these criteria (1 to 10).
        #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u8).range(1..=10))]
        criterion: Vec<u8>,
    },
}

/// Numeric parameters of a single query. Which ones are required depends on
/// the kind.
#[derive(Debug, Clone, Args)]
pub struct Params {
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long)]
    pub u: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Numerator of the Dickman-type sum.
    #[arg(long, value_enum)]
    pub numerator: Option<NumeratorArg>,
}

/// Comma-separated parameter lists; the grid is their Cartesian product.
#[derive(Debug, Clone, Args)]
pub struct Grid {
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub x: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub y: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub u: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountKind {
    Psi,
    D,
    N,
    S,
    DickmanSum,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimateKind {
    PsiSaddle,
    PsiSaias,
    D,
    DSaddle,
    DickmanSum,
    N,
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SandwichKind {
    D,
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompareKind {
    Psi,
    D,
    N,
    S,
    DickmanSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Evaluator {
    Exact,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NumeratorArg {
    LogN,
    LogX,
}
