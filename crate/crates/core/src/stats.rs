//! Small statistical helpers: sample moments, a one-sample
//! Kolmogorov-Smirnov test, and a log-log slope fit.

use crate::angle::CompensatedSum;

/// Sample mean and standard error, accumulated in index order so the
/// result does not depend on how the samples were produced in parallel.
pub fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    assert!(n >= 1, "need at least one sample");
    let mut acc = CompensatedSum::default();
    for &x in samples {
        acc.add(x);
    }
    let mean = acc.total() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let mut sq = CompensatedSum::default();
    for &x in samples {
        sq.add((x - mean) * (x - mean));
    }
    let var = sq.total() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Binomial proportion estimate with its standard error.
pub fn proportion_and_stderr(successes: u64, n: u64) -> (f64, f64) {
    assert!(n >= 1);
    let p = successes as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

/// One-sample Kolmogorov-Smirnov statistic of `samples` against the
/// distribution with CDF `cdf`. Sorts a copy of the input.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        let hi = (i as f64 + 1.0) / n - f;
        let lo = f - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    d
}

/// Asymptotic two-sided p-value for a KS statistic `d` at sample size `n`,
/// using the Kolmogorov series with the Stephens small-sample correction.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut p = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = sign * (-2.0 * (k as f64 * lambda).powi(2)).exp();
        p += term;
        sign = -sign;
        if term.abs() < 1e-12 {
            break;
        }
    }
    (2.0 * p).clamp(0.0, 1.0)
}

/// CDF of the uniform distribution on (-1, 1].
pub fn uniform_pm1_cdf(x: f64) -> f64 {
    ((x + 1.0) / 2.0).clamp(0.0, 1.0)
}

/// Least-squares slope of `y` against `x`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
