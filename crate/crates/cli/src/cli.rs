//! Command-line surface: subcommands, flags, and the flat config file.
//!
//! Precedence for every setting is preset < config file < flag. The seed
//! and worker count also fall back to the `RDB_SEED` / `RDB_WORKERS`
//! environment variables when neither flag nor config provides them.

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(
    name = "rdb",
    version,
    about = "Randomly-directional beamforming experiments: sweeps, figure presets, validation suites, and closed-form tables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate one configuration and write a one-row CSV plus a JSON summary.
    Run(RunArgs),
    /// Run a grid of configurations and write the CSV table plus a JSON summary.
    Sweep(SweepArgs),
    /// Run a bundled figure preset (fig3a..fig6b), with overrides.
    Figure(FigureArgs),
    /// Run a validation suite and write a machine-readable report.
    Validate(ValidateArgs),
    /// Print closed-form values (rate orders, brackets, ratios, cone probabilities).
    Theory(TheoryArgs),
}

#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// Trials per grid point.
    #[arg(long)]
    pub trials: Option<u64>,

    /// Master seed for the splittable trial substreams.
    #[arg(long, env = "RDB_SEED")]
    pub seed: Option<u64>,

    /// Worker threads (must not affect results).
    #[arg(long, env = "RDB_WORKERS")]
    pub workers: Option<usize>,

    /// Output path prefix; writes <out>.csv and <out>.json.
    #[arg(long)]
    pub out: Option<String>,

    /// Report rates in bits instead of nats (ratio columns are base-invariant).
    #[arg(long)]
    pub bits: bool,

    /// Flat key-value TOML config file (overridden by flags).
    #[arg(long)]
    pub config: Option<String>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Scheme: single-beam | multi-beam-single-user | multi-beam-multi-user | rbf.
    #[arg(long)]
    pub scheme: Option<String>,

    /// Antenna count.
    #[arg(long = "M", visible_alias = "m")]
    pub m: Option<usize>,

    /// User-count exponent: K = round(c_u * M^q).
    #[arg(long)]
    pub q: Option<f64>,

    /// Explicit user count (instead of --q).
    #[arg(long = "K", visible_alias = "k")]
    pub k: Option<usize>,

    /// Beam-count exponent: S = round(c_b * M^l).
    #[arg(long)]
    pub ell: Option<f64>,

    /// Explicit beam count (instead of --ell); "match-m" ties S to M.
    #[arg(long = "S", visible_alias = "s")]
    pub s: Option<String>,

    /// Gain model: unit | cn.
    #[arg(long)]
    pub gain: Option<String>,

    /// Power convention: total:<P_t> or per-user:<rho>.
    #[arg(long)]
    pub power: Option<String>,

    /// Aggregated metric: sum-rate | per-user-rate.
    #[arg(long)]
    pub metric: Option<String>,

    /// Also estimate the ratio to the perfect-CSI rate.
    #[arg(long)]
    pub ratio: bool,

    /// User-count multiplier c_u.
    #[arg(long)]
    pub c_u: Option<f64>,

    /// Beam-count multiplier c_b.
    #[arg(long)]
    pub c_b: Option<f64>,

    /// Rayleigh per-entry variance (rbf scheme).
    #[arg(long)]
    pub sigma_h2: Option<f64>,

    /// Let one user win several beams in multi-user selection.
    #[arg(long)]
    pub allow_duplicate_winners: Option<bool>,

    /// Row label in the output table.
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Schemes, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub scheme: Vec<String>,

    /// Antenna counts, comma-separated.
    #[arg(long = "M", visible_alias = "m", value_delimiter = ',')]
    pub m: Vec<usize>,

    /// User-count exponents, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<f64>,

    /// Explicit user count (instead of --q).
    #[arg(long = "K", visible_alias = "k")]
    pub k: Option<usize>,

    /// Beam-count exponents, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub ell: Vec<f64>,

    /// Explicit beam count; "match-m" ties S to M.
    #[arg(long = "S", visible_alias = "s")]
    pub s: Option<String>,

    #[arg(long)]
    pub gain: Option<String>,

    #[arg(long)]
    pub power: Option<String>,

    #[arg(long)]
    pub metric: Option<String>,

    #[arg(long)]
    pub ratio: bool,

    #[arg(long)]
    pub c_u: Option<f64>,

    #[arg(long)]
    pub c_b: Option<f64>,

    #[arg(long)]
    pub sigma_h2: Option<f64>,

    #[arg(long)]
    pub allow_duplicate_winners: Option<bool>,

    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// Preset id: fig3a, fig3b, fig4a, fig4b, fig5a, fig5b, fig6a, fig6b.
    pub id: String,

    #[command(flatten)]
    pub common: CommonArgs,

    /// Drop grid points with M above this (smoke-test tier).
    #[arg(long)]
    pub max_m: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Suite: kernel | lemma1 | thm-brackets | appendixA | appendixC | rbf-trend.
    pub suite: String,

    /// Trial budget multiplier (1.0 = acceptance-scale counts).
    #[arg(long)]
    pub budget: Option<f64>,

    #[arg(long, env = "RDB_SEED")]
    pub seed: Option<u64>,

    #[arg(long, env = "RDB_WORKERS")]
    pub workers: Option<usize>,

    /// Write the JSON report here as well as to stdout.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[command(subcommand)]
    pub query: TheoryQuery,
}

#[derive(Debug, Subcommand)]
pub enum TheoryQuery {
    /// Fractional rate orders of the three schemes over a q list.
    Fro {
        #[arg(long, value_delimiter = ',')]
        q: Vec<f64>,
    },
    /// Beam-power exceedance probability bracket.
    Lemma1 {
        #[arg(long = "M", visible_alias = "m")]
        m: usize,
        #[arg(long)]
        p: f64,
    },
    /// Single-beam rate bracket.
    Thm1 {
        #[arg(long = "M", visible_alias = "m")]
        m: usize,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Multi-beam single-user rate bracket.
    Thm3 {
        #[arg(long = "M", visible_alias = "m")]
        m: usize,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        ell: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Per-user rate bracket, fixed total power.
    Thm4 {
        #[arg(long = "M", visible_alias = "m")]
        m: usize,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        ell: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Per-user rate bracket, fixed per-user power.
    Thm5 {
        #[arg(long = "M", visible_alias = "m")]
        m: usize,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        ell: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Limiting rate ratio to perfect CSI (single- or multi-beam).
    Ratio {
        #[arg(long, value_delimiter = ',')]
        q: Vec<f64>,
        #[arg(long)]
        ell: Option<f64>,
    },
    /// Coordinate-cone probabilities for Rayleigh vectors.
    Cone {
        #[arg(long = "M", visible_alias = "m")]
        m: usize,
        #[arg(long)]
        eta2: f64,
        #[arg(long = "K", visible_alias = "k")]
        k: Option<usize>,
    },
    /// Perfect-CSI rate asymptote log M + log log K.
    Csi {
        #[arg(long = "M", visible_alias = "m")]
        m: f64,
        #[arg(long = "K", visible_alias = "k")]
        k: f64,
    },
}

/// Flat key-value config file. Every key mirrors a flag; flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<String>,
    pub bits: Option<bool>,
    pub max_m: Option<usize>,
    pub label: Option<String>,
    pub scheme: Option<String>,
    pub m: Option<Vec<usize>>,
    pub q: Option<Vec<f64>>,
    pub k: Option<usize>,
    pub ell: Option<Vec<f64>>,
    pub s: Option<String>,
    pub gain: Option<String>,
    pub power: Option<String>,
    pub metric: Option<String>,
    pub ratio: Option<bool>,
    pub c_u: Option<f64>,
    pub c_b: Option<f64>,
    pub sigma_h2: Option<f64>,
    pub allow_duplicate_winners: Option<bool>,
}

impl FileConfig {
    pub fn load(path: Option<&str>) -> anyhow::Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| anyhow::anyhow!("cannot read config {p}: {e}"))?;
                toml::from_str(&text).map_err(|e| anyhow::anyhow!("bad config {p}: {e}"))
            }
        }
    }
}
