//! Argument surface of the `euclid-orbits` binary.
//!
//! Selector flags (`--group`, `--n`, `--tol`, `--seed`, `--output`) are
//! global, so they may be written before or after the subcommand. `--n` may
//! be omitted whenever the input file fixes the dimension.

use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use euclid_orbits::checks::Suite;
use euclid_orbits::GroupSpec;

#[derive(Debug, Parser)]
#[command(
    name = "euclid-orbits",
    version,
    about = "Adjoint and coadjoint orbits of Euclidean-type semidirect products",
    after_help = "Points are JSON files: {\"omega\": [[rows]], \"v\": [..]} on the algebra side, \
{\"L\": [[rows]], \"p\": [..]} on the dual side; the vector part may be omitted. \
Pass `--input -` to read from stdin."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Group family acting on R^n.
    #[arg(
        long,
        global = true,
        value_enum,
        default_value = "En",
        ignore_case = true
    )]
    pub group: GroupName,

    /// Ambient dimension; inferred from the input file when omitted.
    #[arg(long, global = true)]
    pub n: Option<usize>,

    /// Absolute tolerance; the rank and eigenvalue-clustering cutoffs are
    /// rescaled by the same factor relative to their defaults.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Seed for the property suites; EUCLID_ORBITS_SEED overrides it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Compact or indented JSON on stdout.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub output: OutputMode,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the orbit through a point by its flag signature.
    Classify {
        /// Which orbit the point belongs to.
        #[arg(long, value_enum)]
        kind: Kind,
        /// JSON file with the point, or `-` for stdin.
        #[arg(long)]
        input: String,
    },
    /// Move a point onto the orbit cross-section by a translation.
    NormalForm {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        input: String,
    },
    /// Pair the adjoint orbit through a point with its coadjoint partner.
    Pair {
        /// JSON file with an adjoint point, or `-` for stdin.
        #[arg(long)]
        input: String,
    },
    /// Run the seeded property suites and report per-property residuals.
    Check {
        /// Which suite to run.
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: Suite,
        /// Sample count per property.
        #[arg(long, default_value_t = 64)]
        trials: usize,
    },
    /// Decompose a skew matrix into its kernel and rotation blocks.
    Spectrum {
        /// JSON file {"omega": [[rows]]}, or `-` for stdin.
        #[arg(long)]
        input: String,
    },
    /// Evaluate the orbit two-form at a dual point on two generators.
    Kks {
        /// JSON file {"m": {...}, "xi": {...}, "eta": {...}}, or `-` for stdin.
        #[arg(long)]
        input: String,
    },
    /// Read the oriented line carried by a coadjoint point.
    Line {
        /// JSON file with a dual point, or `-` for stdin.
        #[arg(long)]
        input: String,
    },
}

/// The four standard families; custom subgroups are a library-only feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupName {
    #[value(name = "On")]
    On,
    #[value(name = "SOn")]
    SOn,
    #[value(name = "En")]
    En,
    #[value(name = "SEn")]
    SEn,
}

impl GroupName {
    pub fn spec(self, n: usize) -> GroupSpec {
        match self {
            GroupName::On => GroupSpec::orthogonal(n),
            GroupName::SOn => GroupSpec::special_orthogonal(n),
            GroupName::En => GroupSpec::euclidean(n),
            GroupName::SEn => GroupSpec::special_euclidean(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Adjoint,
    Coadjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Json,
    Pretty,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    Suite::from_str(s).map_err(|e| e.to_string())
}
