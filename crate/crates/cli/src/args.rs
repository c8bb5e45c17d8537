use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sflab_core::tower::DEFAULT_CAPACITY;

pub const DEFAULT_SEED: u64 = 0x5EED;

/// Build and check finite-depth towers of clock/shift matrix algebras.
#[derive(Parser, Debug)]
#[command(name = "sflab", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Global {
    /// Largest ambient dimension d^K (and Gram size d^(2k)) a command may allocate.
    #[arg(long, global = true, env = "SFLAB_CAPACITY", default_value_t = DEFAULT_CAPACITY)]
    pub capacity: u128,
    /// Seed for every sampled check; accepts decimal or 0x-prefixed hex.
    #[arg(long, global = true, value_parser = parse_seed, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads for independent suites.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Number of sampled words per sampled check.
    #[arg(long, global = true, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a spec file and print the derived dimensions.
    Validate(ValidateArgs),
    /// Build a tower of the given depth and write it as JSON.
    Build(BuildArgs),
    /// Run check suites against a tower file.
    Check(CheckArgs),
    /// Temperley-Lieb block models, Markov trace and κ.
    Tl(TlArgs),
    /// Merge run reports.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    pub spec: PathBuf,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    pub spec: PathBuf,
    #[arg(long)]
    pub levels: usize,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Relations,
    Lemma1,
    Lemma2,
    Lemma3,
    Shift,
    Lemma5,
    Collapse,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Relations,
        Suite::Lemma1,
        Suite::Lemma2,
        Suite::Lemma3,
        Suite::Shift,
        Suite::Lemma5,
        Suite::Collapse,
    ];

    pub fn expand(self) -> Vec<Suite> {
        if self == Suite::All {
            Self::EACH.to_vec()
        } else {
            vec![self]
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Relations => "relations",
            Suite::Lemma1 => "lemma1",
            Suite::Lemma2 => "lemma2",
            Suite::Lemma3 => "lemma3",
            Suite::Shift => "shift",
            Suite::Lemma5 => "lemma5",
            Suite::Collapse => "collapse",
            Suite::All => "all",
        }
    }
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    pub tower: PathBuf,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Also print the human-readable table to stderr.
    #[arg(long)]
    pub table: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TlCheck {
    All,
}

#[derive(Args, Debug)]
pub struct TlArgs {
    /// λ as p/q with q/p > 4.
    #[arg(long)]
    pub lambda: String,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, value_enum, default_value_t = TlCheck::All)]
    pub check: TlCheck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub merge: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds() {
        assert_eq!(parse_seed("0x5EED").unwrap(), DEFAULT_SEED);
        assert_eq!(parse_seed("17").unwrap(), 17);
        assert!(parse_seed("0xZZ").is_err());
    }

    #[test]
    fn all_expands_in_order() {
        let names: Vec<_> = Suite::All.expand().into_iter().map(Suite::name).collect();
        assert_eq!(names, ["relations", "lemma1", "lemma2", "lemma3", "shift", "lemma5", "collapse"]);
        assert_eq!(Suite::Shift.expand(), vec![Suite::Shift]);
    }
}
