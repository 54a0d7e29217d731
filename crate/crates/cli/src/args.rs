use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hamrep::rate::{DEFAULT_ALPHA, MAX_SEGMENTS};
use hamrep::Grid;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "hamrep",
    version,
    about = "Unitary one-way quantum repeaters over lossy fibre"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
pub struct GlobalArgs {
    /// Output file; standard output if omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Validation tolerance override
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Seed for randomized verification batteries
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for grid scans
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

impl GlobalArgs {
    /// Command-line values take precedence over `base`.
    pub fn or(self, base: GlobalArgs) -> GlobalArgs {
        GlobalArgs {
            out: self.out.or(base.out),
            tol: self.tol.or(base.tol),
            seed: self.seed.or(base.seed),
            jobs: self.jobs.or(base.jobs),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pure-loss channel representations
    #[command(subcommand)]
    Channel(ChannelCommand),

    /// Bosonic codes and error-correction conditions
    #[command(subcommand)]
    Codes(CodesCommand),

    /// Repeater Hamiltonians and unitaries
    #[command(subcommand)]
    Repeater(RepeaterCommand),

    /// Parameter-region scans
    #[command(subcommand)]
    Scan(ScanCommand),

    /// Key rate versus distance
    #[command(subcommand)]
    Rate(RateCommand),

    /// Segment-by-segment chain simulation
    #[command(subcommand)]
    Chain(ChainCommand),

    /// Run a task described by a JSON config file
    Run {
        /// Path to the config file
        config: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum ChannelCommand {
    /// Compare Kraus, beamsplitter and master-equation loss
    Compare(ChannelCompare),
}

#[derive(Debug, Subcommand)]
pub enum CodesCommand {
    /// Check the Knill-Laflamme conditions for single-photon loss
    Validate(CodesValidate),
}

#[derive(Debug, Subcommand)]
pub enum RepeaterCommand {
    /// Build a repeater and verify its action
    Build(RepeaterBuild),
}

#[derive(Debug, Subcommand)]
pub enum ScanCommand {
    /// Beat flags over a coupling-efficiency / separation grid
    Region(ScanRegion),
}

#[derive(Debug, Subcommand)]
pub enum RateCommand {
    /// Per-mode key rate and repeaterless bound along the chain
    Curve(RateCurve),
}

#[derive(Debug, Subcommand)]
pub enum ChainCommand {
    /// Propagate an entangled pair through repeater segments
    Simulate(ChainSimulate),
}

/// A fully specified unit of work, from the command line or a config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Task {
    ChannelCompare(ChannelCompare),
    CodesValidate(CodesValidate),
    RepeaterBuild(RepeaterBuild),
    ScanRegion(ScanRegion),
    RateCurve(RateCurve),
    ChainSimulate(ChainSimulate),
}

impl Command {
    /// The task to run, or the config path for `run`.
    pub fn into_task(self) -> Result<Task, PathBuf> {
        Ok(match self {
            Command::Channel(ChannelCommand::Compare(a)) => Task::ChannelCompare(a),
            Command::Codes(CodesCommand::Validate(a)) => Task::CodesValidate(a),
            Command::Repeater(RepeaterCommand::Build(a)) => Task::RepeaterBuild(a),
            Command::Scan(ScanCommand::Region(a)) => Task::ScanRegion(a),
            Command::Rate(RateCommand::Curve(a)) => Task::RateCurve(a),
            Command::Chain(ChainCommand::Simulate(a)) => Task::ChainSimulate(a),
            Command::Run { config } => return Err(config),
        })
    }
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn default_modes() -> usize {
    1
}

fn default_cutoff() -> usize {
    3
}

fn default_states() -> usize {
    20
}

fn default_eta() -> f64 {
    0.5
}

fn default_ancilla_k() -> usize {
    1
}

fn default_trials() -> usize {
    100
}

fn default_max_segments() -> usize {
    MAX_SEGMENTS
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelCompare {
    /// Transmissivity
    #[arg(long)]
    pub eta: f64,

    /// Number of modes
    #[arg(long, default_value_t = 1)]
    #[serde(default = "default_modes")]
    pub modes: usize,

    /// Photon-number cutoff per mode
    #[arg(long, default_value_t = 3)]
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,

    /// Random input states
    #[arg(long, default_value_t = 20)]
    #[serde(default = "default_states")]
    pub states: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodesValidate {
    /// Built-in code name or path to a JSON code file
    #[arg(long)]
    pub code: String,

    /// Transmissivity of the error operators
    #[arg(long, default_value_t = 0.5)]
    #[serde(default = "default_eta")]
    pub eta: f64,

    /// Also require the no-loss operator to satisfy the conditions
    #[arg(long)]
    #[serde(default)]
    pub include_no_loss: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Direct,
    Swap,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepeaterBuild {
    /// Built-in code name or path to a JSON code file
    #[arg(long)]
    pub code: String,

    /// Repeater architecture
    #[arg(long, value_enum)]
    pub kind: Kind,

    /// Ancilla logical dimension of the direct architecture
    #[arg(long, default_value_t = 1)]
    #[serde(default = "default_ancilla_k")]
    pub ancilla_k: usize,

    /// Random trials per error index in the action check
    #[arg(long, default_value_t = 100)]
    #[serde(default = "default_trials")]
    pub trials: usize,

    /// Include H and U in the report
    #[arg(long)]
    #[serde(default)]
    pub dump: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanRegion {
    /// Built-in code name or path to a JSON code file
    #[arg(long)]
    pub code: String,

    /// Coupling-efficiency grid lo:hi:step
    #[arg(long)]
    #[serde(with = "grid_string")]
    pub eta_c: Grid,

    /// Repeater-separation grid in km, lo:hi:step
    #[arg(long)]
    #[serde(with = "grid_string")]
    pub sep: Grid,

    /// Fibre attenuation in dB/km
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    #[serde(default = "default_alpha")]
    pub alpha: f64,

    /// Segment ceiling of the finite-distance search
    #[arg(long, default_value_t = MAX_SEGMENTS)]
    #[serde(default = "default_max_segments")]
    pub max_segments: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateCurve {
    /// Built-in code name or path to a JSON code file
    #[arg(long)]
    pub code: String,

    /// Coupling efficiency
    #[arg(long)]
    pub eta_c: f64,

    /// Fixed repeater separation in km
    #[arg(
        long,
        conflicts_with = "optimize_sep",
        required_unless_present = "optimize_sep"
    )]
    #[serde(default)]
    pub sep: Option<f64>,

    /// Optimize the repeater separation
    #[arg(long)]
    #[serde(default)]
    pub optimize_sep: bool,

    /// Largest distance in km
    #[arg(long)]
    pub max_km: f64,

    /// Fibre attenuation in dB/km
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    #[serde(default = "default_alpha")]
    pub alpha: f64,

    /// Report the total rate instead of the rate per mode
    #[arg(long)]
    #[serde(default)]
    pub total_rate: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSimulate {
    /// Built-in code name or path to a JSON code file
    #[arg(long)]
    pub code: String,

    /// Coupling efficiency
    #[arg(long)]
    pub eta_c: f64,

    /// Repeater separation in km
    #[arg(long)]
    pub sep: f64,

    /// Number of segments
    #[arg(long)]
    pub segments: usize,

    /// Fibre attenuation in dB/km
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    #[serde(default = "default_alpha")]
    pub alpha: f64,

    /// Report the total rate instead of the rate per mode
    #[arg(long)]
    #[serde(default)]
    pub total_rate: bool,
}

mod grid_string {
    use hamrep::Grid;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(grid: &Grid, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(grid)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Grid, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(D::Error::custom)
    }
}
