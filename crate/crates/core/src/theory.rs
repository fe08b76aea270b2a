//! Closed-form bounds, limit ratios, and rate orders used as overlays and
//! acceptance oracles for the Monte Carlo results.
//!
//! Every function validates its parameter ranges and returns flagged
//! values (rather than extrapolating) outside the regime where the
//! corresponding claim holds.

use crate::scheme::SchemeTag;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("{param} = {value} outside required range {required}")]
    OutOfRange {
        param: &'static str,
        value: f64,
        required: &'static str,
    },
}

fn require(
    ok: bool,
    param: &'static str,
    value: f64,
    required: &'static str,
) -> Result<(), TheoryError> {
    if ok {
        Ok(())
    } else {
        Err(TheoryError::OutOfRange {
            param,
            value,
            required,
        })
    }
}

/// A lower/upper pair bracketing a rate or probability, reported together
/// with the antenna-count exponents that generated the endpoints.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BoundBracket {
    pub lower: f64,
    pub upper: f64,
    pub exponent_lower: f64,
    pub exponent_upper: f64,
}

impl BoundBracket {
    pub fn contains(&self, x: f64) -> bool {
        self.lower < x && x < self.upper
    }
}

/// Probability bracket for a random beam delivering power above `M^p` to
/// a fixed user: `1/(2 pi M^{(1+p)/2}) < Pr{Z > M^p} < 4/(pi M^{(1+p)/2})`.
pub fn exceedance_bracket(m: usize, p: f64) -> Result<BoundBracket, TheoryError> {
    require(m >= 1, "M", m as f64, ">= 1")?;
    require(p > -1.0 && p < 1.0, "p", p, "(-1, 1)")?;
    let expo = -(1.0 + p) / 2.0;
    let scale = (m as f64).powf(expo);
    Ok(BoundBracket {
        lower: scale / (2.0 * std::f64::consts::PI),
        upper: scale * 4.0 / std::f64::consts::PI,
        exponent_lower: expo,
        exponent_upper: expo,
    })
}

fn log1p_power(m: usize, expo: f64) -> f64 {
    (m as f64).powf(expo).ln_1p()
}

/// Asymptotic bracket for the single-beam expected rate with unit gains
/// and `K = M^q` users: `log(1 + M^{2q-1 -/+ eps})`.
pub fn single_beam_rate_bracket(m: usize, q: f64, eps: f64) -> Result<BoundBracket, TheoryError> {
    require(m >= 1, "M", m as f64, ">= 1")?;
    require(q > 0.0 && q < 1.0, "q", q, "(0, 1)")?;
    require(eps > 0.0, "eps", eps, "> 0")?;
    let (lo, hi) = (2.0 * q - 1.0 - eps, 2.0 * q - 1.0 + eps);
    require(
        lo > -1.0 && hi < 1.0,
        "eps",
        eps,
        "2q-1 +/- eps within (-1, 1)",
    )?;
    Ok(BoundBracket {
        lower: log1p_power(m, lo),
        upper: log1p_power(m, hi),
        exponent_lower: lo,
        exponent_upper: hi,
    })
}

/// Limit of a rate ratio as the antenna count grows.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum AsymptoticRatio {
    /// The ratio converges to this fraction of the perfect-CSI rate.
    Fraction(f64),
    /// The scheme rate itself vanishes; no positive fraction is achieved.
    Vanishing,
}

impl AsymptoticRatio {
    /// The fraction, with the vanishing regime reported as 0 (its limit).
    pub fn value(&self) -> f64 {
        match *self {
            AsymptoticRatio::Fraction(v) => v,
            AsymptoticRatio::Vanishing => 0.0,
        }
    }

    pub fn is_vanishing(&self) -> bool {
        matches!(self, AsymptoticRatio::Vanishing)
    }
}

/// Limiting ratio of the single-beam rate to the perfect-CSI rate for
/// `K = M^q`: `2q - 1` above the transition point `q = 1/2`, zero at it,
/// and a vanishing rate below it.
pub fn single_beam_csi_ratio(q: f64) -> Result<AsymptoticRatio, TheoryError> {
    require(q > 0.0 && q < 1.0, "q", q, "(0, 1)")?;
    Ok(if q > 0.5 {
        AsymptoticRatio::Fraction(2.0 * q - 1.0)
    } else if q == 0.5 {
        AsymptoticRatio::Fraction(0.0)
    } else {
        AsymptoticRatio::Vanishing
    })
}

/// Asymptotic bracket for the multi-beam single-user rate with unit
/// gains, `K = M^q`, `S = M^l`: `log(1 + M^{2q+2l-1 -/+ eps})`.
pub fn multibeam_rate_bracket(
    m: usize,
    q: f64,
    ell: f64,
    eps: f64,
) -> Result<BoundBracket, TheoryError> {
    require(m >= 1, "M", m as f64, ">= 1")?;
    require(q > 0.0 && q < 1.0, "q", q, "(0, 1)")?;
    require(ell > 0.0 && ell < 1.0, "l", ell, "(0, 1)")?;
    require(q + ell < 1.0, "q+l", q + ell, "< 1")?;
    require(eps > 0.0, "eps", eps, "> 0")?;
    let base = 2.0 * (q + ell) - 1.0;
    let (lo, hi) = (base - eps, base + eps);
    require(
        lo > -1.0 && hi < 1.0,
        "eps",
        eps,
        "2(q+l)-1 +/- eps within (-1, 1)",
    )?;
    Ok(BoundBracket {
        lower: log1p_power(m, lo),
        upper: log1p_power(m, hi),
        exponent_lower: lo,
        exponent_upper: hi,
    })
}

/// Limiting ratio of the multi-beam single-user rate to the perfect-CSI
/// rate: `2(q+l) - 1` for `1/2 < q+l < 1`. `l = 0` reduces to the
/// single-beam ratio; `q+l <= 1/2` is the vanishing regime.
pub fn multibeam_csi_ratio(q: f64, ell: f64) -> Result<AsymptoticRatio, TheoryError> {
    require(q > 0.0 && q < 1.0, "q", q, "(0, 1)")?;
    require((0.0..1.0).contains(&ell), "l", ell, "[0, 1)")?;
    let sum = q + ell;
    require(sum < 1.0, "q+l", sum, "< 1")?;
    Ok(if sum > 0.5 {
        AsymptoticRatio::Fraction(2.0 * sum - 1.0)
    } else if sum == 0.5 {
        AsymptoticRatio::Fraction(0.0)
    } else {
        AsymptoticRatio::Vanishing
    })
}

/// Asymptotic per-user-rate bracket for multi-beam multi-user selection
/// under a fixed total power: `log(1 + M^{2q-1-l -/+ eps})`, valid for
/// `0 < l < q - eps/2`.
pub fn per_user_rate_bracket_fixed_total(
    m: usize,
    q: f64,
    ell: f64,
    eps: f64,
) -> Result<BoundBracket, TheoryError> {
    require(m >= 1, "M", m as f64, ">= 1")?;
    require(q > 0.0 && q < 1.0, "q", q, "(0, 1)")?;
    require(eps > 0.0, "eps", eps, "> 0")?;
    require(ell > 0.0 && ell < q - eps / 2.0, "l", ell, "(0, q - eps/2)")?;
    let base = 2.0 * q - 1.0 - ell;
    Ok(BoundBracket {
        lower: log1p_power(m, base - eps),
        upper: log1p_power(m, base + eps),
        exponent_lower: base - eps,
        exponent_upper: base + eps,
    })
}

/// Asymptotic per-user-rate bracket for multi-beam multi-user selection
/// under a fixed per-user power: `log(1 + M^{2q-1 -/+ eps})`,
/// independent of `l`, valid for `0 < l < min(q - eps/2, 1/2)`.
pub fn per_user_rate_bracket_fixed_per_user(
    m: usize,
    q: f64,
    ell: f64,
    eps: f64,
) -> Result<BoundBracket, TheoryError> {
    require(m >= 1, "M", m as f64, ">= 1")?;
    require(q > 0.0 && q < 1.0, "q", q, "(0, 1)")?;
    require(eps > 0.0, "eps", eps, "> 0")?;
    require(
        ell > 0.0 && ell < (q - eps / 2.0).min(0.5),
        "l",
        ell,
        "(0, min(q - eps/2, 1/2))",
    )?;
    let base = 2.0 * q - 1.0;
    Ok(BoundBracket {
        lower: log1p_power(m, base - eps),
        upper: log1p_power(m, base + eps),
        exponent_lower: base - eps,
        exponent_upper: base + eps,
    })
}

/// Theoretical fractional rate order: the limiting exponent of the
/// scheme's rate as a power of the antenna count, for `K = M^q` (and, for
/// the multi-beam entries, the best admissible number of beams).
pub fn theoretical_fro(scheme: SchemeTag, q: f64) -> Result<f64, TheoryError> {
    require(q > 0.0 && q < 1.0, "q", q, "(0, 1)")?;
    Ok(match scheme {
        SchemeTag::SingleBeam => {
            if q > 0.5 {
                0.0
            } else {
                2.0 * q - 1.0
            }
        }
        SchemeTag::MultiBeamSingleUser => 0.0,
        SchemeTag::MultiBeamMultiUser => 2.0 * q - 1.0,
        SchemeTag::RbfRayleigh => {
            return Err(TheoryError::OutOfRange {
                param: "scheme",
                value: f64::NAN,
                required: "an RDB scheme",
            })
        }
    })
}

/// Empirical fractional rate order: least-squares slope of `log(rate)`
/// against `log(M)`.
pub fn empirical_fro(points: &[(usize, f64)]) -> Result<f64, TheoryError> {
    require(
        points.len() >= 2,
        "points",
        points.len() as f64,
        ">= 2 points",
    )?;
    let mut logs = Vec::with_capacity(points.len());
    for &(m, rate) in points {
        require(m >= 1, "M", m as f64, ">= 1")?;
        require(rate > 0.0 && rate.is_finite(), "rate", rate, "> 0")?;
        logs.push(((m as f64).ln(), rate.ln()));
    }
    let spread = {
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / logs.len() as f64;
        logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<f64>()
    };
    require(spread > 0.0, "M", spread, "distinct M values")?;
    Ok(crate::stats::least_squares_slope(&logs))
}

/// Probability that an i.i.d. complex Gaussian vector of dimension `m`
/// lies in the double cone of half-angle `acos(eta)` around one
/// coordinate axis: approximately `exp(-eta^2 m)`.
pub fn cone_probability(m: usize, eta: f64) -> Result<f64, TheoryError> {
    require(m >= 1, "M", m as f64, ">= 1")?;
    require(eta > 0.0 && eta < 1.0, "eta", eta, "(0, 1)")?;
    Ok((-eta * eta * m as f64).exp())
}

/// Probability that at least one of `k` independent such vectors lies in
/// the cone: `1 - (1 - exp(-eta^2 m))^k`.
pub fn cone_nonempty_probability(m: usize, k: usize, eta: f64) -> Result<f64, TheoryError> {
    require(k >= 1, "K", k as f64, ">= 1")?;
    let p = cone_probability(m, eta)?;
    Ok(-((k as f64) * (-p).ln_1p()).exp_m1())
}

/// Large-system expected perfect-CSI rate with `k` complex Gaussian
/// gains: `log m + log log k`. Arguments below 3 are rejected since the
/// inner logarithm degenerates there.
pub fn perfect_csi_asymptote(m: f64, k: f64) -> Result<f64, TheoryError> {
    require(m >= 3.0, "M", m, ">= 3")?;
    require(k >= 3.0, "K", k, ">= 3")?;
    Ok(m.ln() + k.ln().ln())
}
