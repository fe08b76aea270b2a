//! Deterministic, parallel Monte Carlo estimation.
//!
//! Trials are independent substreams keyed by a label derived from the
//! channel configuration (never from the scheme), so schemes compared at
//! the same grid point consume identical channel draws and per-trial
//! dominance relations hold row-wise. Per-trial results are collected in
//! trial-index order and reduced sequentially, which makes every estimate
//! bit-identical across worker counts.

use crate::channel::{sample_rayleigh, sample_urlos, ChannelError, GainModel};
use crate::scheme::{
    perfect_csi_rate, rbf_rayleigh, rdb_multibeam_multi_user, rdb_multibeam_single_user,
    rdb_single_beam, PowerConvention, SchemeError, SchemeTag, TrialOutcome,
};
use crate::stats::{mean_and_stderr, proportion_and_stderr};
use crate::stream::{StreamFactory, TrialRng};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error("channel: {0}")]
    Channel(#[from] ChannelError),
    #[error("scheme: {0}")]
    Scheme(#[from] SchemeError),
    #[error("{0}")]
    InvalidConfig(String),
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the current
/// pool when `workers` is `None`. Results must not depend on the choice.
pub fn with_worker_pool<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match workers {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("worker pool")
            .install(f),
    }
}

/// How the user count scales with the antenna count.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UserRule {
    Explicit {
        k: usize,
    },
    /// `K = max(1, round(c_u * M^q))`.
    PowerLaw {
        c_u: f64,
        q: f64,
    },
}

/// How the beam count scales with the antenna count.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BeamRule {
    Explicit {
        s: usize,
    },
    /// `S = max(1, round(c_b * M^l))`.
    PowerLaw {
        c_b: f64,
        ell: f64,
    },
    /// `S = M`, the classical full-multiplexing baseline choice.
    MatchAntennas,
}

fn power_law_count(c: f64, m: usize, e: f64) -> usize {
    (c * (m as f64).powf(e)).round().max(1.0) as usize
}

/// Which per-trial scalar an estimate aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateMetric {
    /// Sum of per-beam rates (the whole-cell downlink rate).
    SumRate,
    /// Mean per-beam rate (the rate seen by one scheduled user).
    PerUserRate,
}

impl std::fmt::Display for RateMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RateMetric::SumRate => write!(f, "sum-rate"),
            RateMetric::PerUserRate => write!(f, "per-user-rate"),
        }
    }
}

/// Full description of one scheme evaluation point.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SchemeConfig {
    pub scheme: SchemeTag,
    pub m: usize,
    pub users: UserRule,
    pub beams: BeamRule,
    pub gain: GainModel,
    pub power: PowerConvention,
    pub metric: RateMetric,
    pub allow_duplicate_winners: bool,
    /// Per-entry variance of the Rayleigh matrix (baseline scheme only).
    pub sigma_h2: f64,
}

impl SchemeConfig {
    pub fn new(scheme: SchemeTag, m: usize) -> Self {
        Self {
            scheme,
            m,
            users: UserRule::Explicit { k: 1 },
            beams: BeamRule::Explicit { s: 1 },
            gain: GainModel::ComplexGaussian,
            power: PowerConvention::FixedTotal { p_t: 1.0 },
            metric: RateMetric::SumRate,
            allow_duplicate_winners: true,
            sigma_h2: 1.0,
        }
    }

    pub fn k(&self) -> usize {
        match self.users {
            UserRule::Explicit { k } => k,
            UserRule::PowerLaw { c_u, q } => power_law_count(c_u, self.m, q),
        }
    }

    pub fn s(&self) -> usize {
        match self.beams {
            BeamRule::Explicit { s } => s,
            BeamRule::PowerLaw { c_b, ell } => power_law_count(c_b, self.m, ell),
            BeamRule::MatchAntennas => self.m,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.m == 0 {
            return Err(EngineError::InvalidConfig("M must be at least 1".into()));
        }
        if self.k() == 0 {
            return Err(EngineError::InvalidConfig(
                "derived K must be at least 1".into(),
            ));
        }
        if self.s() == 0 {
            return Err(EngineError::InvalidConfig(
                "derived S must be at least 1".into(),
            ));
        }
        if let UserRule::PowerLaw { c_u, q } = self.users {
            if !(c_u.is_finite() && c_u > 0.0) {
                return Err(EngineError::InvalidConfig(format!(
                    "c_u must be positive, got {c_u}"
                )));
            }
            if !(q.is_finite() && q > 0.0 && q <= 1.0) {
                return Err(EngineError::InvalidConfig(format!(
                    "q must lie in (0, 1], got {q}"
                )));
            }
        }
        if let BeamRule::PowerLaw { c_b, ell } = self.beams {
            if !(c_b.is_finite() && c_b > 0.0) {
                return Err(EngineError::InvalidConfig(format!(
                    "c_b must be positive, got {c_b}"
                )));
            }
            if !(ell.is_finite() && ell > 0.0 && ell <= 1.0) {
                return Err(EngineError::InvalidConfig(format!(
                    "l must lie in (0, 1], got {ell}"
                )));
            }
        }
        self.power.validate().map_err(EngineError::Scheme)?;
        if self.scheme == SchemeTag::RbfRayleigh {
            if self.s() > self.m {
                return Err(EngineError::InvalidConfig(format!(
                    "RBF needs S <= M, got S = {} with M = {}",
                    self.s(),
                    self.m
                )));
            }
            if !(self.sigma_h2.is_finite() && self.sigma_h2 > 0.0) {
                return Err(EngineError::InvalidConfig(format!(
                    "sigma_h2 must be positive, got {}",
                    self.sigma_h2
                )));
            }
        }
        Ok(())
    }

    /// Non-fatal oddities worth surfacing to the user.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.scheme == SchemeTag::MultiBeamMultiUser && self.s() > self.k() {
            w.push(format!(
                "multi-user selection with S = {} beams but only K = {} users; some users will win several beams",
                self.s(),
                self.k()
            ));
        }
        w
    }

    /// Substream label for this point's channel draws. Deliberately
    /// excludes the scheme, beam count, power, and gain model so that
    /// coupled comparisons across those axes see identical channels.
    fn channel_label(&self) -> String {
        match self.scheme {
            SchemeTag::RbfRayleigh => {
                format!("rayleigh:K={}:M={}:var={}", self.k(), self.m, self.sigma_h2)
            }
            _ => format!("urlos:K={}", self.k()),
        }
    }

    /// Evaluates one realization. The draw order is fixed: channel first,
    /// then beam randomness, so outcomes stay coupled across schemes.
    pub fn evaluate_trial(&self, rng: &mut TrialRng) -> Result<TrialOutcome, EngineError> {
        Ok(match self.scheme {
            SchemeTag::SingleBeam => {
                let users = sample_urlos(self.k(), self.gain, rng)?;
                rdb_single_beam(&users, self.m, rng)?
            }
            SchemeTag::MultiBeamSingleUser => {
                let users = sample_urlos(self.k(), self.gain, rng)?;
                rdb_multibeam_single_user(&users, self.m, self.s(), rng)?
            }
            SchemeTag::MultiBeamMultiUser => {
                let users = sample_urlos(self.k(), self.gain, rng)?;
                rdb_multibeam_multi_user(
                    &users,
                    self.m,
                    self.s(),
                    self.power,
                    self.allow_duplicate_winners,
                    rng,
                )?
            }
            SchemeTag::RbfRayleigh => {
                let h = sample_rayleigh(self.k(), self.m, self.sigma_h2, rng)?;
                rbf_rayleigh(&h, self.s(), self.power.total_power(self.s()), rng)?
            }
        })
    }

    fn metric_value(&self, outcome: &TrialOutcome) -> f64 {
        match self.metric {
            RateMetric::SumRate => outcome.sum_rate,
            RateMetric::PerUserRate => outcome.per_user_rate(),
        }
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RateEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_trials: u64,
}

/// A Monte Carlo proportion with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ProbabilityEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub n: u64,
}

/// Mean and standard error of `f` over `n` trials on independent
/// substreams of `label`. Trials run in parallel; the reduction is in
/// trial order.
pub fn monte_carlo_mean<F>(
    factory: &StreamFactory,
    label: &str,
    n: u64,
    f: F,
) -> Result<RateEstimate, EngineError>
where
    F: Fn(u64, &mut TrialRng) -> Result<f64, EngineError> + Sync,
{
    assert!(n >= 1, "need at least one trial");
    let samples: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|t| {
            let mut rng = factory.substream(label, t);
            f(t, &mut rng)
        })
        .collect::<Result<_, _>>()?;
    let (mean, stderr) = mean_and_stderr(&samples);
    Ok(RateEstimate {
        mean,
        stderr,
        n_trials: n,
    })
}

/// Estimates the expected per-trial rate of `config` over `n_trials`
/// realizations. Bit-identical for identical `(config, n_trials, seed)`
/// regardless of the number of workers.
pub fn estimate_rate(
    config: &SchemeConfig,
    n_trials: u64,
    master_seed: u64,
) -> Result<RateEstimate, EngineError> {
    config.validate()?;
    if n_trials == 0 {
        return Err(EngineError::InvalidConfig(
            "n_trials must be at least 1".into(),
        ));
    }
    let factory = StreamFactory::new(master_seed);
    let label = config.channel_label();
    monte_carlo_mean(&factory, &label, n_trials, |_, rng| {
        Ok(config.metric_value(&config.evaluate_trial(rng)?))
    })
}

/// Estimates `E[scheme rate] / E[perfect-CSI rate]` from coupled
/// realizations: both expectations use the same channel substreams. Under
/// unit gains the denominator is exactly `log(1 + M)`. The standard error
/// is the delta-method error of the ratio of means.
pub fn estimate_ratio_to_perfect_csi(
    config: &SchemeConfig,
    n_trials: u64,
    master_seed: u64,
) -> Result<RateEstimate, EngineError> {
    config.validate()?;
    if config.scheme == SchemeTag::RbfRayleigh {
        return Err(EngineError::InvalidConfig(
            "perfect-CSI ratio is defined for the line-of-sight schemes".into(),
        ));
    }
    if n_trials == 0 {
        return Err(EngineError::InvalidConfig(
            "n_trials must be at least 1".into(),
        ));
    }
    let factory = StreamFactory::new(master_seed);
    let label = config.channel_label();
    let unit_gain = config.gain == GainModel::UnitGain;
    let log1pm = (config.m as f64).ln_1p();

    let pairs: Vec<(f64, f64)> = (0..n_trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, f64), EngineError> {
            let mut rng = factory.substream(&label, t);
            // re-draw users here exactly as evaluate_trial does, to keep
            // the denominator coupled to the numerator's channel
            let users = sample_urlos(config.k(), config.gain, &mut rng)?;
            let outcome = match config.scheme {
                SchemeTag::SingleBeam => rdb_single_beam(&users, config.m, &mut rng)?,
                SchemeTag::MultiBeamSingleUser => {
                    rdb_multibeam_single_user(&users, config.m, config.s(), &mut rng)?
                }
                SchemeTag::MultiBeamMultiUser => rdb_multibeam_multi_user(
                    &users,
                    config.m,
                    config.s(),
                    config.power,
                    config.allow_duplicate_winners,
                    &mut rng,
                )?,
                SchemeTag::RbfRayleigh => unreachable!("rejected above"),
            };
            let denom = if unit_gain {
                log1pm
            } else {
                perfect_csi_rate(&users, config.m)?
            };
            Ok((config.metric_value(&outcome), denom))
        })
        .collect::<Result<_, _>>()?;

    let nums: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let dens: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (mn, _) = mean_and_stderr(&nums);
    let (md, _) = mean_and_stderr(&dens);
    let ratio = mn / md;

    let n = n_trials as f64;
    let stderr = if n_trials == 1 {
        0.0
    } else {
        let mut s_nn = 0.0;
        let mut s_dd = 0.0;
        let mut s_nd = 0.0;
        for &(a, b) in &pairs {
            s_nn += (a - mn) * (a - mn);
            s_dd += (b - md) * (b - md);
            s_nd += (a - mn) * (b - md);
        }
        let c = 1.0 / (n - 1.0);
        let var = (c * s_nn / (md * md)) + (mn * mn * c * s_dd / md.powi(4))
            - (2.0 * mn * c * s_nd / md.powi(3));
        (var.max(0.0) / n).sqrt()
    };

    Ok(RateEstimate {
        mean: ratio,
        stderr,
        n_trials,
    })
}

/// Trials per substream for bulk scalar samplers, where per-draw
/// substreams would dominate the cost. Fixed, so results depend only on
/// `(seed, label, n)`.
const BULK_BLOCK: u64 = 8192;

fn count_in_blocks<F>(factory: &StreamFactory, label: &str, n: u64, hit: F) -> u64
where
    F: Fn(&mut TrialRng) -> bool + Sync,
{
    let blocks = n.div_ceil(BULK_BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = factory.substream(label, b);
            let in_block = BULK_BLOCK.min(n - b * BULK_BLOCK);
            let mut c = 0u64;
            for _ in 0..in_block {
                if hit(&mut rng) {
                    c += 1;
                }
            }
            c
        })
        .sum()
}

/// Empirical probability that a random beam delivers power above `M^p`
/// to a user at an independent uniform direction.
pub fn empirical_exceedance(
    m: usize,
    p: f64,
    n: u64,
    master_seed: u64,
) -> Result<ProbabilityEstimate, EngineError> {
    if m == 0 {
        return Err(EngineError::InvalidConfig("M must be at least 1".into()));
    }
    if !(p > -1.0 && p < 1.0) {
        return Err(EngineError::InvalidConfig(format!(
            "p must lie in (-1, 1), got {p}"
        )));
    }
    if n == 0 {
        return Err(EngineError::InvalidConfig("n must be at least 1".into()));
    }
    let factory = StreamFactory::new(master_seed);
    let threshold = (m as f64).powf(p);
    let label = format!("exceedance:M={m}");
    let hits = count_in_blocks(&factory, &label, n, |rng| {
        let tilde = crate::channel::uniform_direction(rng);
        let f = crate::angle::fejer_gain(m, tilde.value());
        (m as f64) * f * f > threshold
    });
    let (p_hat, stderr) = proportion_and_stderr(hits, n);
    Ok(ProbabilityEstimate { p_hat, stderr, n })
}

/// Empirical cone probabilities over `n` Rayleigh vector draws of
/// dimension `m`: the per-vector probability of landing in the coordinate
/// cone of parameter `eta`, and the probability that a group of `k`
/// consecutive draws contains at least one such vector (estimated over
/// the `floor(n / k)` disjoint groups).
pub fn empirical_cone(
    m: usize,
    k: usize,
    eta: f64,
    n: u64,
    master_seed: u64,
) -> Result<(ProbabilityEstimate, ProbabilityEstimate), EngineError> {
    if m == 0 || k == 0 {
        return Err(EngineError::InvalidConfig(
            "M and K must be at least 1".into(),
        ));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(EngineError::InvalidConfig(format!(
            "eta must lie in (0, 1), got {eta}"
        )));
    }
    let groups = n / k as u64;
    if groups == 0 {
        return Err(EngineError::InvalidConfig(format!(
            "n = {n} leaves no complete group of K = {k} draws"
        )));
    }
    let factory = StreamFactory::new(master_seed);
    let label = format!("cone:M={m}:eta={eta}");
    let eta2 = eta * eta;

    let (vector_hits, group_hits): (u64, u64) = (0..groups)
        .into_par_iter()
        .map(|g| {
            let mut rng = factory.substream(&label, g);
            let mut vh = 0u64;
            for _ in 0..k {
                let mut first = 0.0f64;
                let mut norm2 = 0.0f64;
                for j in 0..m {
                    // the cone condition is scale-invariant, so the
                    // unit-variance convention is immaterial here
                    let p = crate::channel::standard_complex_normal(&mut rng).norm_sqr();
                    if j == 0 {
                        first = p;
                    }
                    norm2 += p;
                }
                if first >= eta2 * norm2 {
                    vh += 1;
                }
            }
            (vh, u64::from(vh > 0))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let n_vectors = groups * k as u64;
    let (p1, s1) = proportion_and_stderr(vector_hits, n_vectors);
    let (p2, s2) = proportion_and_stderr(group_hits, groups);
    Ok((
        ProbabilityEstimate {
            p_hat: p1,
            stderr: s1,
            n: n_vectors,
        },
        ProbabilityEstimate {
            p_hat: p2,
            stderr: s2,
            n: groups,
        },
    ))
}

/// Draws `n` wrapped direction differences `(vartheta - theta) mod 2`
/// with both directions independently uniform on (-1, 1].
pub fn sample_wrapped_differences(n: u64, master_seed: u64) -> Vec<f64> {
    let factory = StreamFactory::new(master_seed);
    let blocks = n.div_ceil(BULK_BLOCK);
    (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = factory.substream("wrapped-diff", b);
            let in_block = BULK_BLOCK.min(n - b * BULK_BLOCK);
            (0..in_block)
                .map(|_| {
                    let theta = crate::channel::uniform_direction(&mut rng);
                    let vartheta = crate::channel::uniform_direction(&mut rng);
                    crate::angle::wrap_direction(vartheta.value() - theta.value())
                        .expect("finite")
                        .value()
                })
                .collect::<Vec<_>>()
        })
        .collect()
}
