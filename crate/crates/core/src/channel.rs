//! Channel realizations: line-of-sight users with random directions and
//! gains, and i.i.d. Rayleigh matrices for the rich-scattering baseline.

use crate::angle::NormalizedDirection;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_1_SQRT_2;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("user count must be at least 1")]
    NoUsers,
    #[error("antenna count must be at least 1")]
    NoAntennas,
    #[error("per-entry variance must be positive, got {0}")]
    NonPositiveVariance(f64),
}

/// How the line-of-sight path gain is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GainModel {
    /// `alpha = 1` for every user.
    UnitGain,
    /// `alpha` standard complex normal: real and imaginary parts are
    /// independent normals of variance 1/2, so `E|alpha|^2 = 1`.
    ComplexGaussian,
}

impl std::fmt::Display for GainModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GainModel::UnitGain => write!(f, "unit"),
            GainModel::ComplexGaussian => write!(f, "cn"),
        }
    }
}

/// One user's line-of-sight channel: a direction on the normalized-angle
/// circle and a complex path gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UrLosUser {
    pub theta: NormalizedDirection,
    pub alpha: Complex64,
}

impl UrLosUser {
    pub fn gain_power(&self) -> f64 {
        self.alpha.norm_sqr()
    }
}

/// Draws one uniform direction on (-1, 1].
pub(crate) fn uniform_direction(rng: &mut impl Rng) -> NormalizedDirection {
    // rng.random::<f64>() is in [0, 1); 1 - 2u covers (-1, 1] exactly.
    NormalizedDirection::new(1.0 - 2.0 * rng.random::<f64>()).expect("uniform draw is finite")
}

/// One standard complex normal draw.
pub(crate) fn standard_complex_normal(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(FRAC_1_SQRT_2 * re, FRAC_1_SQRT_2 * im)
}

/// Samples `k` independent users with directions uniform on (-1, 1] and
/// gains per `gain`.
///
/// All directions are drawn before any gains, so the two gain models see
/// an identical direction stream for the same substream and comparisons
/// between them are coupled.
pub fn sample_urlos(
    k: usize,
    gain: GainModel,
    rng: &mut impl Rng,
) -> Result<Vec<UrLosUser>, ChannelError> {
    if k == 0 {
        return Err(ChannelError::NoUsers);
    }
    let thetas: Vec<NormalizedDirection> = (0..k).map(|_| uniform_direction(rng)).collect();
    let users = thetas
        .into_iter()
        .map(|theta| {
            let alpha = match gain {
                GainModel::UnitGain => Complex64::new(1.0, 0.0),
                GainModel::ComplexGaussian => standard_complex_normal(rng),
            };
            UrLosUser { theta, alpha }
        })
        .collect();
    Ok(users)
}

/// A K x M matrix of i.i.d. complex Gaussian entries with per-entry
/// variance `sigma_h2`, row `k` being user k's channel vector.
#[derive(Debug, Clone, PartialEq)]
pub struct RayleighMatrix {
    entries: Vec<Complex64>,
    users: usize,
    antennas: usize,
    sigma_h2: f64,
}

impl RayleighMatrix {
    pub fn users(&self) -> usize {
        self.users
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn sigma_h2(&self) -> f64 {
        self.sigma_h2
    }

    pub fn row(&self, k: usize) -> &[Complex64] {
        let m = self.antennas;
        &self.entries[k * m..(k + 1) * m]
    }
}

/// Samples a K x M Rayleigh fading matrix.
pub fn sample_rayleigh(
    k: usize,
    m: usize,
    sigma_h2: f64,
    rng: &mut impl Rng,
) -> Result<RayleighMatrix, ChannelError> {
    if k == 0 {
        return Err(ChannelError::NoUsers);
    }
    if m == 0 {
        return Err(ChannelError::NoAntennas);
    }
    if !(sigma_h2.is_finite() && sigma_h2 > 0.0) {
        return Err(ChannelError::NonPositiveVariance(sigma_h2));
    }
    let scale = sigma_h2.sqrt();
    let entries = (0..k * m)
        .map(|_| standard_complex_normal(rng) * scale)
        .collect();
    Ok(RayleighMatrix {
        entries,
        users: k,
        antennas: m,
        sigma_h2,
    })
}
