use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use minibatch_ot::solvers::InnerMetric;
use minibatch_ot::{OuterScheme, SchemeConfig};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "mbot",
    version,
    about = "Mini-batch optimal transport experiments"
)]
pub struct Cli {
    /// Worker threads (default: all cores). Outputs do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Directory for output files; created if missing.
    #[arg(long, global = true, default_value = "mbot-out")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Aggregated transport plan between two CSV point clouds.
    Plan(PlanArgs),
    /// Particle gradient flow towards a target cloud.
    Flow(FlowArgs),
    /// Palette-based color transfer between two PPM images.
    Color(ColorArgs),
    /// Rejection ABC for the variance of a Gaussian.
    Abc(AbcArgs),
    /// Wall-clock timings of the scheme over a grid of k and m.
    Bench(BenchArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Plan(_) => "plan",
            Command::Flow(_) => "flow",
            Command::Color(_) => "color",
            Command::Abc(_) => "abc",
            Command::Bench(_) => "bench",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OuterArg {
    /// Average over all batch pairs (m-OT).
    Avg,
    /// Optimal coupling between batches (BoMb-OT).
    Bomb,
    /// Entropic coupling between batches (eBoMb-OT); see --lambda.
    Ebomb,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SchemeArgs {
    /// Mini-batches per side.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Points per mini-batch.
    #[arg(long, default_value_t = 16)]
    pub m: usize,
    /// Inner distance: w<p> (exact), ew<p> (entropic), sw<p> (sliced), e.g. w2.
    #[arg(long, default_value = "w2", value_parser = parse_inner)]
    pub inner: String,
    /// Entropic regularization of the inner problems (ew<p>).
    #[arg(long, default_value_t = 0.1)]
    pub tau: f64,
    /// Random directions per sliced distance (sw<p>).
    #[arg(long, default_value_t = 50)]
    pub projections: usize,
    #[arg(long, value_enum, default_value_t = OuterArg::Bomb)]
    pub outer: OuterArg,
    /// Entropic regularization of the outer coupling (ebomb).
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_inner(s: &str) -> Result<String, String> {
    split_inner(s).map(|_| s.to_string())
}

fn split_inner(s: &str) -> Result<(&str, f64), String> {
    let (kind, p) = if let Some(p) = s.strip_prefix("ew") {
        ("ew", p)
    } else if let Some(p) = s.strip_prefix("sw") {
        ("sw", p)
    } else if let Some(p) = s.strip_prefix('w') {
        ("w", p)
    } else {
        return Err(format!(
            "unknown inner distance {s:?}; expected w<p>, ew<p> or sw<p>"
        ));
    };
    match p.parse::<f64>() {
        Ok(p) if p >= 1.0 && p.is_finite() => Ok((kind, p)),
        _ => Err(format!("bad exponent in {s:?}; need a number >= 1")),
    }
}

impl SchemeArgs {
    pub fn inner_metric(&self) -> InnerMetric {
        let (kind, p) = split_inner(&self.inner).expect("validated by clap");
        match kind {
            "ew" => InnerMetric::EntropicW { p, tau: self.tau },
            "sw" => InnerMetric::Sliced {
                p,
                projections: self.projections,
            },
            _ => InnerMetric::ExactW { p },
        }
    }

    pub fn outer_scheme(&self) -> OuterScheme {
        match self.outer {
            OuterArg::Avg => OuterScheme::Average,
            OuterArg::Bomb => OuterScheme::Exact,
            OuterArg::Ebomb => OuterScheme::Entropic {
                lambda: self.lambda,
            },
        }
    }

    pub fn scheme(&self) -> SchemeConfig {
        SchemeConfig::new(
            self.k,
            self.m,
            self.inner_metric(),
            self.outer_scheme(),
            self.seed,
        )
    }
}

#[derive(Debug, Args, Serialize)]
pub struct PlanArgs {
    /// Source point cloud (CSV, one point per row).
    #[arg(long)]
    pub source: PathBuf,
    /// Target point cloud (CSV).
    #[arg(long)]
    pub target: PathBuf,
    /// Also solve the full n×n problem exactly (equal sizes, n <= 2048).
    #[arg(long)]
    pub full_ot: bool,
    #[command(flatten)]
    pub scheme: SchemeArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Toy {
    /// Two Gaussian clusters flowing onto a noisy S curve.
    SShape,
}

#[derive(Debug, Args, Serialize)]
pub struct FlowArgs {
    /// Initial particles (CSV). Use with --target, or use --toy instead.
    #[arg(long, requires = "target", conflicts_with = "toy")]
    pub source: Option<PathBuf>,
    #[arg(long, requires = "source")]
    pub target: Option<PathBuf>,
    /// Built-in data set.
    #[arg(long, value_enum, required_unless_present = "source")]
    pub toy: Option<Toy>,
    /// Points per toy cloud.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Seed for the toy data.
    #[arg(long, default_value_t = 0)]
    pub data_seed: u64,
    #[arg(long, default_value_t = 500)]
    pub steps: usize,
    /// Step size.
    #[arg(long, default_value_t = minibatch_ot::flow::DEFAULT_STEP_SIZE)]
    pub eta: f64,
    /// Evaluate every this many steps (default: max(1, min(steps, 10))).
    #[arg(long)]
    pub eval_every: Option<usize>,
    /// Write the particles at every evaluation.
    #[arg(long)]
    pub snapshots: bool,
    /// Use the raw gradient instead of dividing by each particle's plan mass.
    #[arg(long)]
    pub no_normalize: bool,
    #[command(flatten)]
    pub scheme: SchemeArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ColorArgs {
    /// Image whose colors are replaced (binary PPM).
    #[arg(long)]
    pub source: PathBuf,
    /// Image providing the new colors (binary PPM).
    #[arg(long)]
    pub target: PathBuf,
    /// Palette size K for both images.
    #[arg(long, default_value_t = 64)]
    pub palette: usize,
    /// Transfer rounds T.
    #[arg(long, default_value_t = 10)]
    pub iterations: usize,
    #[arg(long, default_value_t = 50)]
    pub kmeans_iters: usize,
    /// Use the source batches on the target side too (equal palettes map to themselves).
    #[arg(long)]
    pub shared_batches: bool,
    #[command(flatten)]
    pub scheme: SchemeArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct AbcArgs {
    /// Observations (CSV). Needs --mu-star. Without it, data are simulated.
    #[arg(long, requires = "mu_star")]
    pub obs: Option<PathBuf>,
    /// Known mean, comma separated. Drawn from N(0, I) when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub mu_star: Option<Vec<f64>>,
    /// Observations to simulate (ignored with --obs).
    #[arg(long, default_value_t = 100)]
    pub n_obs: usize,
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    /// True variance of the simulated observations.
    #[arg(long, default_value_t = 4.0)]
    pub sigma2_star: f64,
    /// Inverse-gamma prior shape.
    #[arg(long, default_value_t = 1.0)]
    pub prior_shape: f64,
    /// Inverse-gamma prior scale.
    #[arg(long, default_value_t = 1.0)]
    pub prior_scale: f64,
    /// Accepted samples wanted.
    #[arg(long, default_value_t = 100)]
    pub n_posterior: usize,
    #[arg(long, default_value_t = 100_000)]
    pub max_proposals: usize,
    /// Prior-predictive draws used to set the tolerance.
    #[arg(long, default_value_t = 500)]
    pub pilot: usize,
    /// Tolerance as a percentile of the pilot distances.
    #[arg(long, default_value_t = 5.0)]
    pub eps_percentile: f64,
    /// Fixed tolerance; overrides --eps-percentile ("inf" accepts everything).
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub scheme: SchemeArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    /// Values of k, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
    pub k_grid: Vec<usize>,
    /// Values of m, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "32")]
    pub m_grid: Vec<usize>,
    /// Points per synthetic cloud (raised to the largest m if smaller).
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    /// Timed runs per cell; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[command(flatten)]
    pub scheme: SchemeArgs,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_names() {
        assert_eq!(split_inner("w2"), Ok(("w", 2.0)));
        assert_eq!(split_inner("ew1.5"), Ok(("ew", 1.5)));
        assert_eq!(split_inner("sw1"), Ok(("sw", 1.0)));
        assert!(split_inner("w0.5").is_err());
        assert!(split_inner("kl2").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
