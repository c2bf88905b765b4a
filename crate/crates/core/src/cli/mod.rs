//! The `ontomatch` command-line interface.
//!
//! Exit codes: 0 on success, 2 for unreadable or malformed input, 3 for an
//! invalid configuration.

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::config::ConfigOverrides;
use crate::ingest::ParseError;
use crate::matcher::{ConfigError, PipelineOrder};
use crate::reasoner::RuleError;
use crate::similarity::LabelCombine;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Rules { path: PathBuf, source: RuleError },
    #[error("{path}: not valid UTF-8")]
    Encoding { path: PathBuf },
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            _ => EXIT_INPUT,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ontomatch", version, about = "Ontology alignment, evaluation and OWL RL materialization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Align two ontologies and write an Alignment-format file.
    Align(AlignArgs),
    /// Score alignments against reference alignments.
    Evaluate(EvaluateArgs),
    /// Run the ablation configurations on one ontology pair.
    Ablate(AblateArgs),
    /// Evaluate one ontology pair at several confidence thresholds.
    Sweep(SweepArgs),
    /// Compute the OWL RL closure of a graph.
    Materialize(MaterializeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl From<Switch> for bool {
    fn from(s: Switch) -> bool {
        s == Switch::On
    }
}

/// Matching options shared by `align`, `ablate` and `sweep`. Flags override
/// the config file, which overrides the defaults.
#[derive(Debug, Clone, Args)]
struct MatchArgs {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Six comma-separated signal weights summing to 1.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_negative_numbers = true)]
    weights: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    min_confidence: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pre_filter: Option<f64>,
    /// Enable stable 1-to-1 matching.
    #[arg(long, overrides_with = "no_stable")]
    stable: bool,
    /// Disable stable matching.
    #[arg(long, overrides_with = "stable")]
    no_stable: bool,
    /// Read synonym annotations as labels.
    #[arg(long, value_enum)]
    synonyms: Option<Switch>,
    /// Use local names as labels for classes without rdfs:label.
    #[arg(long, value_enum)]
    local_name_labels: Option<Switch>,
    #[arg(long, value_parser = parse_from_str::<LabelCombine>)]
    label_combine: Option<LabelCombine>,
    #[arg(long, value_parser = parse_from_str::<PipelineOrder>)]
    order: Option<PipelineOrder>,
}

fn parse_from_str<T: std::str::FromStr<Err = String>>(s: &str) -> Result<T, String> {
    s.parse()
}

impl MatchArgs {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            weights: self.weights.clone(),
            pre_filter: self.pre_filter,
            min_confidence: self.min_confidence,
            stable_matching: match (self.stable, self.no_stable) {
                (true, _) => Some(true),
                (_, true) => Some(false),
                _ => None,
            },
            fallback_factor: None,
            label_combine: self.label_combine,
            order: self.order,
            synonyms: self.synonyms.map(bool::from),
            local_name_labels: self.local_name_labels.map(bool::from),
        }
    }
}

#[derive(Debug, Args)]
struct AlignArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    matching: MatchArgs,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// System alignment; repeat together with --reference for several pairs.
    #[arg(long, required = true)]
    alignment: Vec<PathBuf>,
    #[arg(long, required = true)]
    reference: Vec<PathBuf>,
    /// Also write the structured JSON report to this file.
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderChoice {
    MatchThenThreshold,
    ThresholdThenMatch,
    Both,
}

#[derive(Debug, Args)]
struct AblateArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    reference: PathBuf,
    /// `builtin` or a JSON file of `{name, weights, stable}` objects.
    #[arg(long, default_value = "builtin")]
    configs: String,
    /// Pipeline order(s) to report.
    #[arg(long = "orders", value_enum, default_value = "match-then-threshold")]
    orders: OrderChoice,
    /// Also write the structured JSON report to this file.
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    #[command(flatten)]
    matching: MatchArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    reference: PathBuf,
    #[arg(
        long,
        value_delimiter = ',',
        num_args = 1,
        allow_negative_numbers = true,
        default_value = "0.70,0.75,0.80,0.85"
    )]
    thresholds: Vec<f64>,
    /// Also write the structured JSON report to this file.
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    #[command(flatten)]
    matching: MatchArgs,
}

#[derive(Debug, Args)]
struct MaterializeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Turtle output file.
    #[arg(long)]
    output: PathBuf,
    /// Rule file; the built-in rule set is used when omitted.
    #[arg(long)]
    rules: Option<PathBuf>,
}

/// Parses `args` and runs the command. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Align(a) => commands::align(a, stdout),
        Command::Evaluate(a) => commands::evaluate(a, stdout),
        Command::Ablate(a) => commands::ablate(a, stdout),
        Command::Sweep(a) => commands::sweep(a, stdout),
        Command::Materialize(a) => commands::materialize(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn into_text(path: &Path, bytes: Vec<u8>) -> Result<String, CliError> {
    String::from_utf8(bytes).map_err(|_| CliError::Encoding {
        path: path.to_owned(),
    })
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}
