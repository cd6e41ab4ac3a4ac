use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "drep", version, about = "Exact representation homology of free DG algebras")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Table)]
    pub format: Format,

    /// Directory for cached results (falls back to DREP_CACHE).
    #[arg(long, global = true, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Always recompute, ignoring any cache directory.
    #[arg(long, global = true)]
    pub no_cache: bool,

    /// Worker threads for cell computations.
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,

    /// Largest admissible basis of a single (hdeg, weight) cell.
    #[arg(long, global = true, value_name = "CELLS", default_value_t = drep_core::DEFAULT_CELL_BUDGET)]
    pub budget: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

/// A presentation file, or `builtin:<name>`.
#[derive(Debug, Clone, Args)]
pub struct InputArg {
    /// Presentation file path or `builtin:<name>`.
    #[arg(value_name = "INPUT")]
    pub input: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a presentation: d∘d = 0 on every generator.
    Check {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        max_weight: u32,
    },
    /// Emit the commutative DG algebra R_n in the presentation file format.
    Rep {
        #[command(flatten)]
        input: InputArg,
        #[arg(short)]
        n: usize,
        #[arg(long)]
        max_weight: u32,
    },
    /// Betti table of R_n, or of its GL_n-invariant subcomplex.
    Homology {
        #[command(flatten)]
        input: InputArg,
        #[arg(short)]
        n: usize,
        #[arg(long)]
        max_weight: u32,
        #[arg(long)]
        invariants: bool,
    },
    /// Betti table of the cyclic complex C(R).
    Cyclic {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        max_weight: u32,
    },
    /// Betti table of the stable complex Λ[C(R)].
    Stable {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        max_weight: u32,
    },
    /// Betti table of the obstruction complex K(A, n).
    Obstruction {
        #[command(flatten)]
        input: InputArg,
        #[arg(short)]
        n: usize,
        #[arg(long)]
        max_weight: u32,
    },
    /// Compare invariant homology for n = 1..M with the stable homology.
    Stabilize {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        max_weight: u32,
        #[arg(long)]
        max_n: usize,
    },
    /// ζ series from the generator census.
    Zeta {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        terms: u32,
        /// Cross-check against the train expansion (truncated algebras).
        #[arg(long)]
        trains: bool,
    },
    /// Euler characteristic of invariant homology by Molien–Weyl.
    Molien {
        #[command(flatten)]
        input: InputArg,
        #[arg(short)]
        n: usize,
        #[arg(long)]
        terms: u32,
    },
    /// Verify a combinatorial identity to a given order.
    Identities {
        /// cid1, cid2:m, cidd:d or cidd1:d.
        #[arg(long)]
        which: String,
        #[arg(long)]
        terms: u32,
    },
    /// Necklace and primitive necklace counts with brute-force checks.
    Necklace {
        #[arg(long)]
        alphabet: u32,
        #[arg(long)]
        max_len: u32,
    },
    /// Betti table of the invariant Chevalley–Eilenberg complex of gl_r(Ā).
    Ce {
        /// dual-numbers, square-zero:d or truncated:m.
        #[arg(long)]
        algebra: String,
        #[arg(short)]
        r: usize,
        #[arg(long)]
        max_wedge: u32,
        #[arg(long)]
        max_weight: u32,
    },
    /// Maurer–Cartan checks and the twisted tensor product.
    Twist {
        #[arg(long, value_enum)]
        example: TwistExample,
        #[arg(short)]
        n: usize,
        #[arg(short)]
        r: usize,
        #[arg(long)]
        max_degree: u32,
    },
    /// Karoubi–de Rham homology.
    Derham {
        #[command(flatten)]
        input: InputArg,
        /// Use the commutative de Rham algebra of R_n (of the input itself
        /// when it is already commutative).
        #[arg(long)]
        commutative: bool,
        #[arg(short, requires = "commutative")]
        n: Option<usize>,
        /// Homology of Λ[C(forms)] instead of C(forms).
        #[arg(long, conflicts_with = "commutative")]
        stable: bool,
        #[arg(long)]
        max_weight: u32,
    },
    /// Run the acceptance criteria or the randomized property suites.
    Reproduce {
        #[arg(long, value_enum, default_value_t = Suite::Paper)]
        suite: Suite,
        /// Restrict to these criteria.
        #[arg(long = "criterion", value_name = "ID")]
        criteria: Vec<u32>,
        /// Cases per property suite.
        #[arg(long, default_value_t = drep_core::reproduce::PROPERTY_CASES)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TwistExample {
    DualNumbers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Paper,
    Properties,
}
