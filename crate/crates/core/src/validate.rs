//! Self-contained validation suites behind the CLI's `validate`
//! subcommand: each suite runs a set of named checks and reports the
//! measured value against its bound.

use crate::angle::{beam_power, fejer_gain, inner_product, steering_vector, NormalizedDirection};
use crate::channel::GainModel;
use crate::engine::{
    empirical_cone, empirical_exceedance, estimate_rate, monte_carlo_mean,
    sample_wrapped_differences, BeamRule, SchemeConfig, UserRule,
};
use crate::scheme::SchemeTag;
use crate::stats::{ks_pvalue, ks_statistic, uniform_pm1_cdf};
use crate::stream::StreamFactory;
use crate::theory::{
    cone_probability, exceedance_bracket, per_user_rate_bracket_fixed_total,
    single_beam_rate_bracket,
};
use rand::Rng;
use serde::Serialize;

/// One named check: the measured value, a human-readable statement of the
/// bound it was held against, and the verdict.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub measured: f64,
    pub expected: String,
    pub passed: bool,
}

impl CheckResult {
    fn new(
        name: impl Into<String>,
        measured: f64,
        expected: impl Into<String>,
        passed: bool,
    ) -> Self {
        Self {
            name: name.into(),
            measured,
            expected: expected.into(),
            passed,
        }
    }
}

/// A suite report; `passed` is the conjunction of all checks.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub master_seed: u64,
    pub budget: f64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl SuiteReport {
    fn new(suite: &str, master_seed: u64, budget: f64, checks: Vec<CheckResult>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self {
            suite: suite.into(),
            master_seed,
            budget,
            checks,
            passed,
        }
    }
}

pub const SUITE_IDS: [&str; 6] = [
    "kernel",
    "lemma1",
    "thm-brackets",
    "appendixA",
    "appendixC",
    "rbf-trend",
];

/// Runs the named suite. `budget` scales the default trial counts
/// (1.0 = the counts used by the acceptance checks, smaller = faster).
pub fn run_suite(suite: &str, budget: f64, master_seed: u64) -> Option<SuiteReport> {
    let checks = match suite {
        "kernel" => kernel_checks(budget, master_seed),
        "lemma1" => exceedance_checks(budget, master_seed),
        "thm-brackets" => bracket_checks(budget, master_seed),
        "appendixA" => wrapped_uniformity_checks(budget, master_seed),
        "appendixC" => cone_checks(budget, master_seed),
        "rbf-trend" => rbf_trend_checks(budget, master_seed),
        _ => return None,
    };
    Some(SuiteReport::new(suite, master_seed, budget, checks))
}

fn scaled(n: u64, budget: f64) -> u64 {
    ((n as f64 * budget).round() as u64).max(16)
}

/// Closed-form kernel against the explicit steering-vector oracle, plus
/// the mean-power identity E[Z] = 1.
fn kernel_checks(budget: f64, master_seed: u64) -> Vec<CheckResult> {
    let mut checks = Vec::new();
    let factory = StreamFactory::new(master_seed);

    let n = scaled(10_000, budget);
    let mut rng = factory.substream("kernel-oracle", 0);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let m = rng.random_range(1usize..=1024);
        let theta = crate::channel::uniform_direction(&mut rng);
        let vartheta = crate::channel::uniform_direction(&mut rng);
        let z = beam_power(m, theta, vartheta);
        let a = steering_vector(m, theta).expect("m >= 1");
        let b = steering_vector(m, vartheta).expect("m >= 1");
        let z_oracle = m as f64 * inner_product(&a, &b).expect("equal lengths").norm_sqr();
        let denom = z.max(z_oracle).max(f64::MIN_POSITIVE);
        worst = worst.max((z - z_oracle).abs() / denom);
    }
    checks.push(CheckResult::new(
        format!("kernel-vs-oracle/n={n}"),
        worst,
        "max relative error <= 1e-9",
        worst <= 1e-9,
    ));

    for m in [10usize, 100, 1000] {
        let n = scaled(1_000_000, budget);
        let est = monte_carlo_mean(&factory, &format!("mean-power:M={m}"), n, |_, rng| {
            let tilde = crate::channel::uniform_direction(rng);
            let f = fejer_gain(m, tilde.value());
            Ok((m as f64) * f * f)
        })
        .expect("mean power estimate");
        let dev = (est.mean - 1.0).abs();
        checks.push(CheckResult::new(
            format!("mean-beam-power/M={m},n={n}"),
            est.mean,
            format!("within 3 stderr ({:.2e}) of 1", 3.0 * est.stderr),
            dev <= 3.0 * est.stderr,
        ));
    }

    let mut worst_envelope = f64::NEG_INFINITY;
    for m in [4usize, 64, 1024] {
        for i in 1..=2000 {
            let t = i as f64 / 2000.0;
            worst_envelope = worst_envelope.max(fejer_gain(m, t) - 1.0 / (m as f64 * t));
        }
    }
    checks.push(CheckResult::new(
        "kernel-envelope-bound",
        worst_envelope,
        "F_M(t) - 1/(M t) <= 0 on (0, 1]",
        worst_envelope <= 1e-15,
    ));

    let base = NormalizedDirection::new(0.1).expect("finite");
    let a = steering_vector(128, base).expect("m >= 1");
    let mut worst_orth = 0.0f64;
    for j in 1..8 {
        let b = steering_vector(128, base.offset(2.0 * j as f64 / 8.0)).expect("m >= 1");
        worst_orth = worst_orth.max(inner_product(&a, &b).expect("equal lengths").norm());
    }
    checks.push(CheckResult::new(
        "dividing-grid-orthogonality/M=128,S=8",
        worst_orth,
        "max |<a_i, a_j>| <= 1e-10",
        worst_orth <= 1e-10,
    ));

    checks
}

/// Empirical beam-power exceedance probabilities against the closed-form
/// bracket, on an (M, p) grid.
fn exceedance_checks(budget: f64, master_seed: u64) -> Vec<CheckResult> {
    let mut checks = Vec::new();
    let n = scaled(1_000_000, budget);
    for m in [1000usize, 10_000] {
        for p in [-0.5, 0.0, 0.5] {
            let est = empirical_exceedance(m, p, n, master_seed).expect("valid parameters");
            let b = exceedance_bracket(m, p).expect("valid parameters");
            checks.push(CheckResult::new(
                format!("exceedance/M={m},p={p},n={n}"),
                est.p_hat,
                format!("inside ({:.4e}, {:.4e})", b.lower, b.upper),
                b.contains(est.p_hat),
            ));
        }
    }
    checks
}

/// Monte Carlo rates against the asymptotic rate brackets.
fn bracket_checks(budget: f64, master_seed: u64) -> Vec<CheckResult> {
    let mut checks = Vec::new();
    let n = scaled(5000, budget);
    for m in [1000usize, 10_000] {
        for q in [0.7, 0.8, 0.9] {
            let mut cfg = SchemeConfig::new(SchemeTag::SingleBeam, m);
            cfg.users = UserRule::PowerLaw { c_u: 1.0, q };
            cfg.gain = GainModel::UnitGain;
            let est = estimate_rate(&cfg, n, master_seed).expect("valid config");
            let b = single_beam_rate_bracket(m, q, 0.15).expect("valid parameters");
            checks.push(CheckResult::new(
                format!("single-beam-bracket/M={m},q={q},eps=0.15"),
                est.mean,
                format!("inside ({:.4}, {:.4})", b.lower, b.upper),
                b.contains(est.mean),
            ));
        }
    }
    // per-user rate under fixed total power
    let (m, q, ell) = (10_000usize, 0.7, 0.3);
    let mut cfg = SchemeConfig::new(SchemeTag::MultiBeamMultiUser, m);
    cfg.users = UserRule::PowerLaw { c_u: 1.0, q };
    cfg.beams = BeamRule::PowerLaw { c_b: 1.0, ell };
    cfg.gain = GainModel::UnitGain;
    cfg.metric = crate::engine::RateMetric::PerUserRate;
    let est = estimate_rate(&cfg, n, master_seed).expect("valid config");
    let b = per_user_rate_bracket_fixed_total(m, q, ell, 0.15).expect("valid parameters");
    checks.push(CheckResult::new(
        format!("per-user-bracket/M={m},q={q},l={ell},eps=0.15"),
        est.mean,
        format!("inside ({:.4}, {:.4})", b.lower, b.upper),
        b.contains(est.mean),
    ));
    checks
}

/// Kolmogorov-Smirnov uniformity of the wrapped direction difference.
fn wrapped_uniformity_checks(budget: f64, master_seed: u64) -> Vec<CheckResult> {
    let n = scaled(100_000, budget);
    let xs = sample_wrapped_differences(n, master_seed);
    let d = ks_statistic(&xs, uniform_pm1_cdf);
    let p = ks_pvalue(d, xs.len());
    vec![CheckResult::new(
        format!("wrapped-difference-ks/n={n}"),
        p,
        "KS p-value > 0.01 against Unif(-1, 1]",
        p > 0.01,
    )]
}

/// Empirical coordinate-cone probabilities against the closed forms.
fn cone_checks(budget: f64, master_seed: u64) -> Vec<CheckResult> {
    let mut checks = Vec::new();
    let (m, k) = (30usize, 400usize);
    let eta = 0.2f64.sqrt();
    let n = scaled(1_000_000, budget);
    let (single, nonempty) = empirical_cone(m, k, eta, n, master_seed).expect("valid parameters");
    let theory_single = cone_probability(m, eta).expect("valid parameters");
    let ratio = single.p_hat / theory_single;
    checks.push(CheckResult::new(
        format!("cone-single/M={m},eta2=0.2,n={n}"),
        single.p_hat,
        format!("within factor 2 of {theory_single:.4e}"),
        ratio > 0.5 && ratio < 2.0,
    ));
    let predicted = 1.0 - (1.0 - single.p_hat).powi(k as i32);
    let dev = (nonempty.p_hat - predicted).abs();
    checks.push(CheckResult::new(
        format!("cone-nonempty/M={m},K={k}"),
        nonempty.p_hat,
        format!(
            "within 3 stderr ({:.3e}) of 1-(1-p_hat)^K = {predicted:.4}",
            3.0 * nonempty.stderr
        ),
        dev <= 3.0 * nonempty.stderr,
    ));
    checks
}

/// Per-antenna sum rate of the rich-scattering baseline must fall as the
/// array outgrows the user pool.
fn rbf_trend_checks(budget: f64, master_seed: u64) -> Vec<CheckResult> {
    let n = scaled(2000, budget);
    let mut normalized = Vec::new();
    for m in [8usize, 16, 32, 64] {
        let mut cfg = SchemeConfig::new(SchemeTag::RbfRayleigh, m);
        cfg.users = UserRule::Explicit { k: 256 };
        cfg.beams = BeamRule::MatchAntennas;
        let est = estimate_rate(&cfg, n, master_seed).expect("valid config");
        normalized.push((m, est.mean / m as f64));
    }
    let decreasing = normalized.windows(2).all(|w| w[1].1 < w[0].1);
    let spread = normalized[0].1 - normalized[3].1;
    vec![CheckResult::new(
        format!("rbf-per-antenna-rate/K=256,n={n}"),
        spread,
        format!(
            "sum rate / M strictly decreasing over M in {{8,16,32,64}} (got {:?})",
            normalized
                .iter()
                .map(|x| (x.1 * 1e4).round() / 1e4)
                .collect::<Vec<_>>()
        ),
        decreasing,
    )]
}
