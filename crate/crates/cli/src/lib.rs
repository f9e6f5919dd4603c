//! Command-line front end for `strichartz-core`.
//!
//! Every command produces one report, JSON by default, wrapped in an
//! [`formats::Envelope`] carrying the tool version, the seed and the resolved
//! configuration. Exit codes: `0` success, `1` a check failed, `2` usage or
//! input error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod formats;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_SEED: u64 = 20_261_015;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("cannot parse {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error("field `{0}`: {1}")]
    Field(String, String),

    #[error("{0}")]
    Usage(String),

    #[error("cannot write output: {0}")]
    Output(String),

    #[error(transparent)]
    Core(#[from] strichartz_core::Error),
}

impl CliError {
    /// Prefixes a field path with `parent`.
    pub fn within(self, parent: &str) -> Self {
        match self {
            CliError::Field(f, msg) => CliError::Field(format!("{parent}.{f}"), msg),
            other => other,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BlockArg {
    F0,
    F1,
}

#[derive(Debug, Parser)]
#[command(name = "strichartz", version, about = "Certify and measure the sharpened Strichartz inequality")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub shared: Shared,
}

#[derive(Debug, Args)]
pub struct Shared {
    /// Maximal degree.
    #[arg(long, global = true)]
    pub lmax: Option<u32>,

    /// Maximal first magnetic index.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mmax: Option<i64>,

    /// Last degree checked row by row before the symbolic tail.
    #[arg(long, global = true)]
    pub lcut: Option<u32>,

    /// Constant in the dominance test, as `p/q`.
    #[arg(long = "C", global = true, value_name = "P/Q")]
    pub constant: Option<String>,

    /// Time nodes of the quartic quadrature.
    #[arg(long = "nT", global = true)]
    pub n_t: Option<usize>,

    /// Zonal nodes of the quartic quadrature and the profile transform.
    #[arg(long = "nX", global = true)]
    pub n_x: Option<usize>,

    /// Output file, stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact dominance certificate for the reduced quadratic form.
    Certify {
        /// Restrict to one block.
        #[arg(long, value_enum)]
        block: Option<BlockArg>,
    },
    /// Smallest generalized eigenvalue of each truncated block.
    Gap,
    /// Deficit of a state, or its expansion along a direction.
    Deficit {
        /// Radial profile file, at most one per component.
        #[arg(long, num_args = 1)]
        profile: Vec<PathBuf>,

        /// Zonal sphere state file.
        #[arg(long, conflicts_with = "profile")]
        state: Option<PathBuf>,

        /// Expand along the given state, the default being the unit F0 mode at degree 2.
        #[arg(long)]
        taylor: bool,

        #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025,0.0125")]
        eps: Vec<f64>,
    },
    /// Numerical audit of the harmonic machinery.
    Audit {
        /// Random states in the dual-path suite.
        #[arg(long, default_value_t = 50)]
        samples: usize,

        #[arg(long, hide = true, default_value_t = 0.0)]
        perturb_norm: f64,
    },
}

/// Result of a command before it is written out.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub output: String,
    /// `0` or `1`.
    pub status: u8,
    /// Printed on stderr.
    pub message: Option<String>,
}

impl Shared {
    /// Rejects zero-valued knobs.
    pub fn validate(&self) -> Result<(), CliError> {
        let knobs = [
            ("--lmax", self.lmax.map(|v| v as usize)),
            ("--lcut", self.lcut.map(|v| v as usize)),
            ("--nT", self.n_t),
            ("--nX", self.n_x),
        ];
        match knobs.iter().find(|(_, v)| *v == Some(0)) {
            Some((flag, _)) => Err(CliError::Usage(format!("{flag} must be positive"))),
            None => Ok(()),
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    cli.shared.validate()?;
    match &cli.command {
        Command::Certify { block } => commands::certify(&cli.shared, *block),
        Command::Gap => commands::gap(&cli.shared),
        Command::Deficit { profile, state, taylor, eps } => {
            commands::deficit(&cli.shared, profile, state.as_deref(), *taylor, eps)
        }
        Command::Audit { samples, perturb_norm } => commands::audit(&cli.shared, *samples, *perturb_norm),
    }
}
