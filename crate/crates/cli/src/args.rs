use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "qplex",
    version,
    about = "SIC construction and qplex geometry toolkit"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Hilbert-space dimension d.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Seed for every random draw; a fresh one is chosen and printed if absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Main tolerance of the command (see the command's help for its default).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Iteration cap for iterative solvers.
    #[arg(long = "max-iter", global = true)]
    pub max_iter: Option<usize>,
    /// Where to write the command's output document.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Run the full verification on loaded or constructed SICs.
    #[arg(long, global = true)]
    pub verify: bool,
    /// Print nothing but errors.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Also write the run report as a document.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// SIC construction and verification.
    #[command(subcommand)]
    Sic(SicCommand),
    /// Conversions between operators and probabilities.
    #[command(subcommand)]
    Rep(RepCommand),
    /// Germ, polarity, MMD and stem checks.
    #[command(subcommand)]
    Geom(GeomCommand),
    /// Stretched matrices and symmetry checks.
    #[command(subcommand)]
    Sym(SymCommand),
    /// Non-quantum germ growth and the eigenvalue lemma.
    #[command(subcommand)]
    Germ(GermCommand),
    /// Urgleichung constants for a dimension or for general (N, alpha).
    Params(ParamsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SicSource {
    /// Fiducial or SIC-system document; known fiducials (d = 2, 3) or a
    /// seeded search are used otherwise.
    #[arg(long)]
    pub sic: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SicCommand {
    /// Search for a Weyl-Heisenberg fiducial (--tol is the defect target, default 1e-20).
    Find {
        #[arg(long, default_value_t = 50)]
        max_restarts: usize,
    },
    /// Verify the SIC equations of a fiducial or SIC-system document (--tol default 1e-8).
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Build a quasi-SIC and check its defining equations (--tol default 1e-10).
    Quasi {
        /// Use (2/d) I - Π_j of a SIC instead of the Gell-Mann construction.
        #[arg(long)]
        complement: bool,
        #[command(flatten)]
        source: SicSource,
    },
}

#[derive(Debug, Subcommand)]
pub enum RepCommand {
    /// SIC representations of seeded random states.
    ToProb {
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Rank of the random states (1 = pure).
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[command(flatten)]
        source: SicSource,
    },
    /// Reconstruct operators from probability vectors and test them.
    ToOp {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        source: SicSource,
    },
    /// Apply the urgleichung to a probability vector.
    Urgleichung {
        #[arg(long = "in")]
        input: PathBuf,
        /// Measurement document; a seeded random orthonormal-basis measurement otherwise.
        #[arg(long)]
        measurement: Option<PathBuf>,
        #[command(flatten)]
        source: SicSource,
    },
    /// Evolve a probability vector by a seeded Haar unitary.
    Evolve {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        source: SicSource,
    },
}

#[derive(Debug, Subcommand)]
pub enum GeomCommand {
    /// Check the fundamental inequalities on a point set (--tol default 1e-12).
    CheckGerm {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Polar membership of a point with respect to a set (--tol default 1e-12).
    Polar {
        #[arg(long = "in")]
        input: PathBuf,
        /// Probability-vector document of the point to test.
        #[arg(long)]
        point: PathBuf,
    },
    /// Maximal mutually maximally distant subsets (--tol default 1e-8).
    Mmd {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Principal-stem membership (--tol default 1e-8, --max-iter default 10000).
    Stem {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum SymCommand {
    /// Stretch a measurement and verify it (--tol default 1e-9).
    Stretch {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Transfer matrix of a seeded Haar unitary (--tol default 1e-9).
    FromUnitary {
        /// Compose with complex conjugation.
        #[arg(long)]
        anti: bool,
        #[command(flatten)]
        source: SicSource,
    },
    /// Random products of stretched matrices against the stochastic conditions.
    Closure {
        /// Stretched-matrix documents; seeded Haar transfers otherwise.
        #[arg(long = "in")]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 100)]
        products: usize,
        #[command(flatten)]
        source: SicSource,
    },
}

#[derive(Debug, Subcommand)]
pub enum GermCommand {
    /// Grow a germ region by region from out-ball candidates (--tol default 1e-12).
    Grow {
        #[arg(long, default_value_t = 10_000)]
        candidates: usize,
        #[command(flatten)]
        source: SicSource,
    },
    /// Sample the eigenvalue lemma (--tol default 1e-12).
    Lemma {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    /// Outcome count N (with --alpha); --dim gives the quantum values.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
}
