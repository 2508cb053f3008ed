use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "stabkit", version, about = "Exact stability and hyperstability checks for the Cauchy and Jensen equations")]
pub struct Cli {
    /// Worker threads for pair scans (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exhaustive defect scan with a shell profile.
    Scan(ScanArgs),
    /// Stability certificate at one pair.
    Certify(CertifyArgs),
    /// Hyperstability certificate at one pair.
    Hyper(HyperArgs),
    /// Adversarial search for the largest defect under a shell constraint.
    Sharpness(SharpnessArgs),
    /// Re-check a certificate JSON file.
    Verify {
        file: PathBuf,
    },
    /// Canned demonstrations.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DemoName {
    BinseqCounterexample,
    ExtremalCauchy,
    ExtremalJensen,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    Csv,
    #[default]
    Json,
}

#[derive(Args, Debug)]
pub struct FunctionArgs {
    /// `int:N`, `dyadic:N` or `binseq`.
    #[arg(long, default_value = "int:1")]
    pub group: String,
    /// `name:key=val,...` or `@file.json`.
    #[arg(long, default_value = "zero")]
    pub function: String,
    /// Extra override `point=value`; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub perturb: Vec<String>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[arg(long, default_value = "cauchy")]
    pub equation: String,
    /// `lo..hi`, `lo..hi@1/2^e`, `subsets:n` or `explicit:p;q`.
    #[arg(long, allow_hyphen_values = true)]
    pub window: String,
    /// Comma-separated shell bounds.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    pub shells: Vec<String>,
    /// Weight for a weighted profile (`linear`, `quadratic`, `affine-floor:offset=a,slope=b`).
    #[arg(long, alias = "phi")]
    pub weight: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct PairArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// `cauchy` or `jensen`.
    #[arg(long, default_value = "cauchy")]
    pub equation: String,
    #[arg(long)]
    pub r: String,
    #[arg(long, default_value = "0")]
    pub eta: String,
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct HyperArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// `cauchy` or `jensen`.
    #[arg(long, default_value = "cauchy")]
    pub equation: String,
    #[arg(long)]
    pub r: String,
    #[arg(long)]
    pub k: String,
    #[arg(long, alias = "weight", default_value = "linear")]
    pub phi: String,
    #[arg(long)]
    pub eps: String,
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SharpnessArgs {
    #[arg(long, default_value = "int:1")]
    pub group: String,
    #[arg(long, default_value = "cauchy")]
    pub equation: String,
    #[arg(long, default_value = "1")]
    pub eps: String,
    #[arg(long, allow_hyphen_values = true, default_value = "-4..4")]
    pub window: String,
    /// Shell bound of the constraint.
    #[arg(long, default_value = "2")]
    pub r: String,
    /// Value grid step (default eps/2).
    #[arg(long)]
    pub step: Option<String>,
    /// Value grid half-width (default 3 eps).
    #[arg(long)]
    pub max_abs: Option<String>,
    /// Largest window size searched exhaustively.
    #[arg(long)]
    pub max_exhaustive: Option<usize>,
    #[arg(long, env = "STABKIT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}
