//! Command-line surface: feature extraction, training, identification,
//! evaluation, cross-validation, t-tests, synthetic data and kernel
//! benchmarks.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;

use crate::hmm::Topology;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

/// Invalid flags, configuration or command-line input.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

#[derive(Debug, Parser)]
#[command(name = "supra-hmm", version, about = "Higher-order HMM speaker identification with a suprasegmental layer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Model and run settings shared by several commands. Flags override the
/// configuration file, which overrides the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Model order (1, 2 or 3).
    #[arg(long)]
    pub order: Option<usize>,
    /// `ltr` or `circular`.
    #[arg(long)]
    pub topology: Option<Topology>,
    /// Conventional states per model.
    #[arg(long)]
    pub states: Option<usize>,
    /// Suprasegmental states per model.
    #[arg(long)]
    pub supra_states: Option<usize>,
    /// Fusion weight of the suprasegmental score.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Gaussian components per acoustic state.
    #[arg(long)]
    pub mixtures: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ModelArgs {
    pub fn resolve(&self) -> Result<RunConfig, UsageError> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.order {
            c.order = v;
        }
        if let Some(v) = &self.topology {
            c.topology = v.clone();
        }
        if let Some(v) = self.states {
            c.states = v;
        }
        if let Some(v) = self.supra_states {
            c.supra_states = v;
        }
        if let Some(v) = self.alpha {
            c.alpha = v;
        }
        if let Some(v) = self.mixtures {
            c.mixtures = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        c.pipeline()?;
        Ok(c)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract features from every WAV under a directory and write a manifest.
    Extract {
        audio_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Enroll every speaker from the training rows of a manifest.
    Train {
        manifest: PathBuf,
        /// Registry file to write.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Rank the enrolled speakers for one clip (WAV or feature file).
    Identify {
        registry: PathBuf,
        clip: PathBuf,
        /// Fusion weight; defaults to the registry's.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Accuracy tables for the test rows of a manifest, one per alpha.
    Evaluate {
        registry: PathBuf,
        manifest: PathBuf,
        /// Comma-separated fusion weights, e.g. `0,0.1,0.5,1`.
        #[arg(long, value_delimiter = ',')]
        alpha_sweep: Option<Vec<f64>>,
        #[arg(long, conflicts_with = "alpha_sweep")]
        alpha: Option<f64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Random-subset cross-validation over every row of a manifest.
    Crossval {
        manifest: PathBuf,
        #[arg(long)]
        folds: Option<usize>,
        /// Condition whose utterances may be used for enrollment.
        #[arg(long, default_value = crate::speaker_id::NEUTRAL)]
        enroll_condition: String,
        /// Optional JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Pooled-deviation t statistic of two equal-size samples.
    Ttest {
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<f64>,
    },
    /// Operation counts and timings of the forward recursion.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "3,9")]
        states: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        orders: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        frames: usize,
        #[arg(long, default_value = "circular")]
        topology: Topology,
        /// Optional CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic labeled population with ground-truth models.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        speakers: Option<usize>,
        /// Frames per clip.
        #[arg(long)]
        frames: Option<usize>,
        /// Identity stress transform (no shouted shift).
        #[arg(long)]
        no_stress: bool,
        #[command(flatten)]
        model: ModelArgs,
    },
}

/// Parses `args` and runs the command, printing errors to standard error.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Exit status for a failed command.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<crate::Error>() {
            return if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_DATA };
        }
    }
    EXIT_DATA
}
