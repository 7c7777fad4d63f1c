use std::path::PathBuf;

use adaptive_alpha::calibration::{CalibrationStrategy, PbicInputs, StrategyKind};
use adaptive_alpha::simlab::{Adjustment, CountRule, PValueKind};
use adaptive_alpha::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "adaptive-alpha",
    version,
    about = "Adaptive significance levels for nested linear-model tests"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Adaptive alpha for a nested design given n, j, q and log b (or a balanced ANOVA with --anova).
    Alpha(AlphaArgs),
    /// Adaptive alpha for a balanced one-way ANOVA with k groups of r.
    AnovaAlpha(AnovaArgs),
    /// BIC-based adaptive alpha for i.i.d. models.
    BicAlpha(BicArgs),
    /// Nested regression test on a CSV dataset.
    Test(TestArgs),
    /// False-positive share among just-significant p-values (simulation).
    SimulateTable3(Table3Args),
    /// Regenerate the published alpha tables.
    Tables(TablesArgs),
    /// Monte Carlo check of the statistic's null law.
    McCheck(McArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyName {
    Simple,
    Minimal,
    Anchored,
    Pbic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct StrategyArgs {
    /// Initial significance level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha0: f64,
    #[arg(long, value_enum, default_value_t = StrategyName::Simple)]
    pub strategy: StrategyName,
    /// Total sample size at which the anchored alpha equals alpha0.
    #[arg(long)]
    pub anchor_n: Option<usize>,
    /// PBIC squared effect estimate.
    #[arg(long)]
    pub pbic_xi: Option<f64>,
    /// PBIC scale.
    #[arg(long)]
    pub pbic_d: Option<f64>,
    /// PBIC effective sample size.
    #[arg(long)]
    pub pbic_neff: Option<f64>,
}

impl StrategyArgs {
    pub fn strategy(&self) -> Result<CalibrationStrategy> {
        let kind = match self.strategy {
            StrategyName::Simple => StrategyKind::Simple,
            StrategyName::Minimal => StrategyKind::MinimalBalanced,
            StrategyName::Anchored => StrategyKind::Anchored {
                anchor_n: self.anchor_n.ok_or_else(|| {
                    Error::MissingInput("--strategy anchored needs --anchor-n".into())
                })?,
            },
            StrategyName::Pbic => match (self.pbic_xi, self.pbic_d, self.pbic_neff) {
                (Some(xi), Some(d), Some(neff)) => StrategyKind::Pbic {
                    inputs: PbicInputs::single(xi, d, neff)?,
                },
                _ => {
                    return Err(Error::MissingInput(
                        "--strategy pbic needs --pbic-xi, --pbic-d and --pbic-neff".into(),
                    ))
                }
            },
        };
        CalibrationStrategy::new(kind, self.alpha0)
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AlphaArgs {
    /// Treat the design as a balanced one-way ANOVA (needs -k and -r).
    #[arg(long)]
    pub anova: bool,
    #[arg(short = 'k', requires = "anova")]
    pub k: Option<usize>,
    #[arg(short = 'r', requires = "anova")]
    pub r: Option<usize>,
    #[arg(short = 'n', conflicts_with = "anova")]
    pub n: Option<usize>,
    #[arg(short = 'j', conflicts_with = "anova")]
    pub j: Option<usize>,
    #[arg(short = 'q', conflicts_with = "anova")]
    pub q: Option<usize>,
    /// Natural log of the design-information ratio b.
    #[arg(long, conflicts_with_all = ["anova", "b"], allow_hyphen_values = true)]
    pub log_b: Option<f64>,
    /// Design-information ratio b.
    #[arg(long, conflicts_with = "anova")]
    pub b: Option<f64>,
    #[command(flatten)]
    pub strategy: StrategyArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AnovaArgs {
    #[arg(short = 'k')]
    pub k: usize,
    #[arg(short = 'r')]
    pub r: usize,
    #[command(flatten)]
    pub strategy: StrategyArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BicArgs {
    #[arg(short = 'n')]
    pub n: usize,
    #[arg(short = 'q', default_value_t = 1)]
    pub q: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha0: f64,
    /// Anchor the BIC alpha to equal alpha0 at this sample size.
    #[arg(long)]
    pub anchor_n: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(
        long,
        required_unless_present = "fetch_url",
        conflicts_with = "fetch_url"
    )]
    pub csv: Option<PathBuf>,
    /// Download the CSV instead of reading a local file.
    #[arg(long)]
    pub fetch_url: Option<String>,
    #[arg(long)]
    pub response: String,
    /// Comma-separated predictors of the null model (may be empty).
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub null: Vec<String>,
    /// Comma-separated predictors of the alternative model.
    #[arg(long, value_delimiter = ',', required = true)]
    pub alt: Vec<String>,
    #[command(flatten)]
    pub strategy: StrategyArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AdjustName {
    None,
    Simple,
    Pbic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountRuleName {
    BelowAlpha,
    WindowAndAlpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PValueName {
    Exact,
    Gamma,
}

#[derive(Debug, Args)]
pub struct Table3Args {
    /// Per-group sizes to simulate.
    #[arg(short = 'r', value_delimiter = ',', default_values_t = [10, 50, 100, 500, 1000])]
    pub r: Vec<usize>,
    /// Samples per hypothesis state and outer replicate.
    #[arg(short = 'K', long = "replicates", default_value_t = 1000)]
    pub k: usize,
    #[arg(long, default_value_t = 20)]
    pub outer_reps: usize,
    /// Mean difference under the alternative, in units of sigma.
    #[arg(short = 'f', default_value_t = 0.25)]
    pub f: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.01)]
    pub window_lo: f64,
    #[arg(long, default_value_t = 0.05)]
    pub window_hi: f64,
    #[arg(long, value_enum, default_value_t = AdjustName::None)]
    pub adjust: AdjustName,
    #[arg(long, default_value_t = 0.05)]
    pub alpha0: f64,
    #[arg(long, value_enum, default_value_t = CountRuleName::BelowAlpha)]
    pub count_rule: CountRuleName,
    #[arg(long, value_enum, default_value_t = PValueName::Exact)]
    pub p_value: PValueName,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl Table3Args {
    pub fn adjustment(&self) -> Adjustment {
        match self.adjust {
            AdjustName::None => Adjustment::None,
            AdjustName::Simple => Adjustment::Simple {
                alpha0: self.alpha0,
            },
            AdjustName::Pbic => Adjustment::Pbic {
                alpha0: self.alpha0,
            },
        }
    }

    pub fn count_rule(&self) -> CountRule {
        match self.count_rule {
            CountRuleName::BelowAlpha => CountRule::BelowAlpha,
            CountRuleName::WindowAndAlpha => CountRule::WindowAndAlpha,
        }
    }

    pub fn p_value(&self) -> PValueKind {
        match self.p_value {
            PValueName::Exact => PValueKind::Exact,
            PValueName::Gamma => PValueKind::Gamma,
        }
    }
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// T1, T2, T5 or T6; all four when omitted.
    #[arg(long)]
    pub table: Option<String>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha0: f64,
    #[arg(long)]
    pub pbic_xi: Option<f64>,
    #[arg(long)]
    pub pbic_d: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(short = 'n', default_value_t = 100)]
    pub n: usize,
    #[arg(short = 'j', default_value_t = 2)]
    pub j: usize,
    #[arg(short = 'q', default_value_t = 1)]
    pub q: usize,
    #[arg(long, default_value_t = 100_000)]
    pub draws: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}
