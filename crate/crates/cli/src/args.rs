use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Experiments on Redheffer matrices, their Gram operator and the
/// divisor-sum candidate for the top singular vector.
#[derive(Debug, Parser)]
#[command(name = "redheffer", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: GlobalOpts,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalOpts {
    /// Write the artifact here instead of stdout.
    #[arg(short, long, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,

    /// Output format [default: csv for tables, json for reports].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Directory for cached sieve tables [default: <system temp>/redheffer-cache].
    #[arg(long, global = true, env = "REDHEFFER_CACHE_DIR")]
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,

    /// Always re-sieve and never touch the cache.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub no_cache: bool,

    /// Run past the size guards (determinant n > 300, double sums D > 20000).
    #[arg(long, global = true)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Exact det(A_n) against the Mertens function for every n up to N.
    VerifyDet {
        /// Largest dimension checked (guarded at 300).
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
    /// Top singular vector of A_n by power iteration on AᵀA, one CSV row per index.
    SingularVector {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Relative change of the Rayleigh quotient at which iteration stops.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
    },
    /// Cosine between v_n = (σ₁(k)/k) and AᵀA v_n.
    Similarity {
        #[arg(long, default_value_t = 50_000)]
        n: usize,
    },
    /// Extrapolated series and the limiting cosine α.
    Alpha {
        /// Upper cutoff of Σ c_d²/d².
        #[arg(long, default_value_t = 1_000_000)]
        cutoff: usize,
        /// Lower cutoff of Σ c_d²/d² for the tail fit.
        #[arg(long, default_value_t = 100_000)]
        cutoff_lo: usize,
        /// Upper cutoff of the weighted double gcd sum.
        #[arg(long, default_value_t = 10_000)]
        double_cutoff: usize,
        /// Lower cutoff of the weighted double gcd sum for the tail fit.
        #[arg(long, default_value_t = 5_000)]
        double_cutoff_lo: usize,
    },
    /// Record indices of σ₀ (highly composite) and σ₁(k)/k (superabundant) up to N.
    Records {
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },
    /// Unweighted double gcd sum against 5ζ(3)/2 and the convergence of ‖v_n‖²/n.
    Constants {
        /// Upper cutoff of the double sum.
        #[arg(long, default_value_t = 10_000)]
        cutoff: usize,
        /// Lower cutoff for the tail fit [default: cutoff / 2].
        #[arg(long)]
        cutoff_lo: Option<usize>,
        /// Largest n in the ‖v_n‖²/n table (powers of ten up to this).
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
    },
    /// Entry statistics on primes vs highly divisible indices for v_n and the singular vector.
    Profile {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyDet { .. } => "verify-det",
            Command::SingularVector { .. } => "singular-vector",
            Command::Similarity { .. } => "similarity",
            Command::Alpha { .. } => "alpha",
            Command::Records { .. } => "records",
            Command::Constants { .. } => "constants",
            Command::Profile { .. } => "profile",
        }
    }

    pub fn default_format(&self) -> Format {
        match self {
            Command::VerifyDet { .. }
            | Command::SingularVector { .. }
            | Command::Records { .. } => Format::Csv,
            _ => Format::Json,
        }
    }

    pub fn supports_csv(&self) -> bool {
        self.default_format() == Format::Csv
    }
}
