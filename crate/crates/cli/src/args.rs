use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "recapc", version, about = "Plan recommendations for anonymous users who leave after one dislike")]
pub struct Cli {
    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true, env = "RECAPC_OUT_DIR", value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance or write a named fixture.
    Gen(GenArgs),
    /// Solve an instance.
    Solve(SolveArgs),
    /// Trace the belief walk of a policy.
    Walk(WalkArgs),
    /// Time solvers over generated instances.
    Bench(BenchArgs),
    /// Monte-Carlo sessions for a policy.
    Simulate(SimulateArgs),
    /// Exact value of a policy.
    Eval(EvalArgs),
    /// Separation margins of an instance.
    Separator(SeparatorArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=100_000), required_unless_present = "fixture")]
    pub types: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=100_000), required_unless_present = "fixture")]
    pub categories: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// example1, prop1(D), appendix1..appendix4
    #[arg(long, conflicts_with_all = ["types", "categories"])]
    pub fixture: Option<String>,
    #[arg(long, default_value_t = 8)]
    pub latent_dim: usize,
    #[arg(long, default_value_t = 0.01)]
    pub clip_low: f64,
    #[arg(long, default_value_t = 0.99)]
    pub clip_high: f64,
    #[arg(long, default_value_t = 0.5)]
    pub prior_logit_std: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverName {
    Bb,
    DpMultiset,
    DpGrid,
    Brute,
}

impl SolverName {
    pub fn label(self) -> &'static str {
        match self {
            SolverName::Bb => "bb",
            SolverName::DpMultiset => "dp-multiset",
            SolverName::DpGrid => "dp-grid",
            SolverName::Brute => "brute",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Order {
    Fifo,
    BestFirst,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = SolverName::Bb)]
    pub solver: SolverName,
    /// Horizon for the finite-horizon solvers (default: the horizon that loses at most eps).
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Grid spacing for dp-grid (default: eps (1 - p_max)^2).
    #[arg(long)]
    pub resolution: Option<f64>,
    /// Queue order for bb.
    #[arg(long, value_enum, default_value_t = Order::Fifo)]
    pub order: Order,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WalkPolicy {
    Optimal,
    Myopic,
    Bfa,
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = WalkPolicy::Optimal)]
    pub policy: WalkPolicy,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long, default_value_t = 200)]
    pub max_steps: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a ternary plot (three types only).
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Type counts, `A..B` (inclusive) or a single number.
    #[arg(long, value_parser = parse_range)]
    pub types: (usize, usize),
    #[arg(long, value_parser = parse_range)]
    pub categories: (usize, usize),
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub runs: u64,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "bb")]
    pub solvers: Vec<SolverName>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Upper clip for generated preferences.
    #[arg(long, default_value_t = 0.99)]
    pub clip_high: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// `prefix|tail`, e.g. `k1,k2|k1` or `|k2`.
    #[arg(long)]
    pub policy: String,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub sessions: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Summary statistics file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Session-length histogram file.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub policy: String,
}

#[derive(Debug, Args)]
pub struct SeparatorArgs {
    #[arg(long)]
    pub instance: PathBuf,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|e| format!("`{t}`: {e}"))
            .and_then(|v| if v == 0 { Err("counts start at 1".to_string()) } else { Ok(v) })
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..5"), Ok((2, 5)));
        assert_eq!(parse_range("2..=5"), Ok((2, 5)));
        assert_eq!(parse_range("3"), Ok((3, 3)));
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("0..2").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn cli_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
