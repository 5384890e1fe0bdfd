//! Command-line laboratory for a phase-valued refinement of the Liouville
//! function: each integer n gets a unit weight e^{i theta(n)} whose angle
//! encodes both the parity of the prime-factor count and a convergent
//! prime-power correction. The subcommands tabulate the weights, compute the
//! underlying constants two independent ways, run the greedy angle
//! construction with its certified verifier, count sector densities, sum the
//! associated Dirichlet series against closed-form references, track
//! summatory growth, and scan for angle collisions with exact arithmetic.
//!
//! Every run writes machine-readable results plus a `manifest.json` capturing
//! the effective configuration (and its hash), so results can be reproduced
//! and compared bit for bit.
//!
//! Exit codes: 0 success; 2 invalid arguments or config; 3 run completed but
//! surfaced a finding (disagreeing constants, exhausted budget, angle
//! collision); 4 I/O or cache failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "wlab",
    version,
    about = "Laboratory for a phase-valued refinement of the Liouville function"
)]
pub struct Cli {
    /// JSON file supplying defaults for any long option
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Directory holding reusable factor-table caches
    /// (falls back to config, then $WLAB_CACHE_DIR)
    #[arg(long, global = true, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Directory for results and the run manifest [default: wlab-out]
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    /// Seed recorded in the manifest for randomized sweeps [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Compute the prime-square constant by two independent routes and compare
    Constants {
        /// Precision target for the log-zeta route [default: 1e-12]
        #[arg(long)]
        precision: Option<f64>,
        /// Precision target for the direct-tail route [default: 1e-7]
        #[arg(long)]
        direct_precision: Option<f64>,
    },

    /// Tabulate n, parities, angles, and unit weights to CSV
    Wvalues {
        /// Largest n to tabulate [default: 1000]
        #[arg(long)]
        n_max: Option<u64>,
        /// Level: a positive integer or "lambda" [default: 1]
        #[arg(long)]
        level: Option<String>,
    },

    /// Greedily build a prime set whose scaled tail sum hits a target angle
    Density {
        /// Target angle x in (0, pi)
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        /// Half-width of the acceptance window [default: 1e-3]
        #[arg(long)]
        epsilon: Option<f64>,
        /// Prime budget for the tail table [default: 1000000]
        #[arg(long)]
        budget: Option<u64>,
        /// Also build a witness with this factor-count parity (+1 or -1)
        #[arg(long, allow_hyphen_values = true)]
        witness_parity: Option<i8>,
        /// Exponent scale k of the witness (exponents 2k) [default: 1]
        #[arg(long, value_name = "K")]
        witness_scale: Option<u32>,
    },

    /// Count integers whose angle lands in a sector, for both parity copies
    Sector {
        /// Sector lower edge (angle offset from the parity base)
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        /// Sector upper edge
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        /// Count n from 1 to this limit [default: 100000]
        #[arg(long)]
        n_max: Option<u64>,
        /// Level: a positive integer [default: 1]
        #[arg(long)]
        level: Option<String>,
    },

    /// Partial Dirichlet sum, optional Euler product, closed-form reference
    Series {
        /// Real part of s
        #[arg(long, allow_hyphen_values = true)]
        sigma: f64,
        /// Imaginary part of s [default: 0]
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        /// Number of terms [default: 100000]
        #[arg(long)]
        n_max: Option<u64>,
        /// Level: a positive integer or "lambda" [default: lambda]
        #[arg(long)]
        level: Option<String>,
        /// Also evaluate the Euler product over primes up to this cutoff
        #[arg(long)]
        euler_cutoff: Option<u64>,
        /// Local-factor depth of the Euler product [default: 40]
        #[arg(long)]
        euler_depth: Option<u32>,
    },

    /// Summatory sums on a geometric checkpoint schedule, with a growth fit
    Growth {
        /// Sum up to this limit [default: 1000000]
        #[arg(long)]
        n_max: Option<u64>,
        /// Level: a positive integer or "lambda" [default: lambda]
        #[arg(long)]
        level: Option<String>,
    },

    /// Sort the first N^alpha x N^(1-alpha) angles and measure column sums
    Grid {
        /// Shape exponent alpha in (0, 1)
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// Number of angles [default: 100000]
        #[arg(long)]
        n_max: Option<u64>,
        /// Level: a positive integer or "lambda" [default: 1]
        #[arg(long)]
        level: Option<String>,
    },

    /// Scan for exact-angle collisions (the map should be injective)
    Inject {
        /// Scan n from 1 to this limit [default: 100000]
        #[arg(long)]
        n_max: Option<u64>,
    },

    /// Manage on-disk factor-table caches
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
pub enum CacheAction {
    /// Build (or load) the factor table up to a limit and store it
    Build {
        /// Table limit [default: 1000000]
        #[arg(long)]
        limit: Option<u64>,
    },
    /// List cached factor tables
    List,
    /// Delete all cached factor tables
    Clear,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
