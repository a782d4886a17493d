use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::algebra::Field;

#[derive(Debug, Clone, Parser)]
#[command(name = "evasion-lab", version, about = "Finite-scale laboratory for evasion and prediction combinatorics")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Seed for the SplitMix64 generator; required by randomized commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Word length for commands that build or scan words.
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    /// Step budget for the cached search behind the Luzin commands.
    #[arg(long, global = true)]
    pub budget_steps: Option<u64>,
    /// Directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Check predictors against words.
    #[command(subcommand)]
    Predict(PredictCmd),
    /// Build predictors by extension, reduction and slaloms.
    #[command(subcommand)]
    Transform(TransformCmd),
    /// Prime-power encodings and divisibility chains.
    #[command(subcommand)]
    Specker(SpeckerCmd),
    /// Generator families that avoid linear predictors.
    #[command(subcommand)]
    Luzin(LuzinCmd),
    /// Symmetric forms built from generator words.
    #[command(subcommand)]
    Gross(GrossCmd),
    /// Conditions made of finite predictor fragments.
    #[command(subcommand)]
    Poset(PosetCmd),
    /// The cited diagram of cardinal invariants.
    #[command(subcommand)]
    Diagram(DiagramCmd),
}

impl Command {
    pub fn is_randomized(&self) -> bool {
        matches!(
            self,
            Command::Transform(TransformCmd::Slalom { system: None, .. })
                | Command::Gross(GrossCmd::Scan { .. })
                | Command::Gross(GrossCmd::FromLuzin { style: StyleArg::Perturbed, .. })
                | Command::Poset(PosetCmd::Generic { chain: None, .. })
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StyleArg {
    Canonical,
    Perturbed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Dot,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictCmd {
    /// Check whether a predictor predicts a word from a grace index on.
    Check {
        #[arg(long)]
        predictor: PathBuf,
        #[arg(long)]
        word: PathBuf,
        #[arg(long, default_value_t = 0)]
        grace: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformCmd {
    /// Extend a predictor on a bounded space to the whole space by clamping.
    Extend {
        #[arg(long)]
        predictor: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        bounds: Vec<u64>,
    },
    /// Combine an indicator predictor with a predictor for the reduced word.
    Combine {
        #[arg(long)]
        indicator: PathBuf,
        #[arg(long)]
        reduced: PathBuf,
    },
    /// The linear predictor attached to an unsplit index set.
    SplitSet {
        #[arg(long, value_delimiter = ',', required = true)]
        set: Vec<usize>,
        #[arg(long, default_value = "gf:2")]
        field: Field,
    },
    /// Predictor from a slalom block system, read from a file or drawn at random.
    Slalom {
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        blocks: usize,
        #[arg(long, default_value_t = 2)]
        bound: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeckerCmd {
    /// Prime-power encoding of a word.
    Encode {
        #[arg(long, value_delimiter = ',', required = true)]
        word: Vec<u64>,
        #[arg(long)]
        n: usize,
    },
    /// The divisibility chain on one block.
    Chain {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        word: Vec<u64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        h: Vec<i64>,
    },
    /// Exhaustive collision search on one block.
    Refute {
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        beta: Vec<u64>,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        a_max: Option<u64>,
        #[arg(long, default_value_t = 1)]
        h_max: u64,
        #[arg(long, default_value_t = 1)]
        kn_weight: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LuzinCmd {
    /// Build generators from the default sources `f_i(n) = n + i` or from a file of words.
    Build {
        #[arg(long, default_value_t = 3)]
        generators: usize,
        #[arg(long)]
        sources: Option<PathBuf>,
        #[arg(long, default_value = "q")]
        field: Field,
    },
    /// Re-check the avoidance condition of every generator by brute force.
    Audit {
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        generators: usize,
        #[arg(long, default_value = "q")]
        field: Field,
    },
    /// Tabulate which combinations each small linear predictor predicts.
    Scan {
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        generators: usize,
        #[arg(long, default_value = "q")]
        field: Field,
        #[arg(long, default_value_t = 3)]
        coeff_bound: usize,
        #[arg(long, default_value_t = 1)]
        max_domain: usize,
        #[arg(long, default_value_t = 2)]
        coeff_count: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrossCmd {
    /// Symmetric form from Luzin generators and coherent injections.
    FromLuzin {
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value = "q")]
        field: Field,
        #[arg(long, value_enum, default_value_t = StyleArg::Canonical)]
        style: StyleArg,
        #[arg(long, default_value_t = 1)]
        split: usize,
    },
    /// Read the words `f_alpha(n) = Phi(e_n, e_alpha)` back out of a form.
    ToLuzin {
        #[arg(long)]
        fragment: PathBuf,
        #[arg(long)]
        split: usize,
    },
    /// Round-trip random words through many perturbed injection families.
    Scan {
        #[arg(long, default_value = "gf:3")]
        field: Field,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        split: usize,
        #[arg(long, default_value_t = 10)]
        families: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PosetCmd {
    /// Exhaustive order, height and softness checks on a bounded grid.
    CheckOrder {
        #[arg(long, default_value_t = 2)]
        bound: u64,
        #[arg(long, default_value_t = 2)]
        max_words: usize,
        #[arg(long, default_value_t = 3)]
        max_m: usize,
    },
    /// The softness witness set for a compatible pair.
    Witnesses {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Predictor from a decreasing chain, read from a file or drawn at random.
    Generic {
        #[arg(long)]
        chain: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        bound: u64,
        #[arg(long, default_value_t = 6)]
        length: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagramCmd {
    /// Compare two invariants.
    Query {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Write the builtin diagram.
    Export {
        #[arg(long, value_enum, default_value_t = ExportFormat::Dot)]
        format: ExportFormat,
    },
}
