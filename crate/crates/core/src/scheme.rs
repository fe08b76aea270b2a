//! One-realization evaluation of the transmission and scheduling schemes:
//! single-beam RDB, multi-beam RDB with single-user or per-beam multi-user
//! selection, the perfect-CSI reference, and the random orthonormal
//! beamforming (RBF) baseline for rich scattering.
//!
//! Every function here is a pure map from (channel realization, beam
//! randomness, parameters) to a [`TrialOutcome`]; the `*_on` variants take
//! the beam randomness explicitly so tests can force alignments and couple
//! schemes on a shared draw. Ties in every argmax go to the lowest index.

use crate::angle::{beam_power, NormalizedDirection};
use crate::channel::{standard_complex_normal, uniform_direction, RayleighMatrix, UrLosUser};
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SchemeError {
    #[error("at least one user is required")]
    NoUsers,
    #[error("beam count must be at least 1")]
    NoBeams,
    #[error("beam count {s} exceeds antenna count {m}")]
    TooManyBeams { s: usize, m: usize },
    #[error("transmit power must be positive, got {0}")]
    NonPositivePower(f64),
}

/// Which scheme produced an outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeTag {
    SingleBeam,
    MultiBeamSingleUser,
    MultiBeamMultiUser,
    RbfRayleigh,
}

impl std::fmt::Display for SchemeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SchemeTag::SingleBeam => "single-beam",
            SchemeTag::MultiBeamSingleUser => "multi-beam-single-user",
            SchemeTag::MultiBeamMultiUser => "multi-beam-multi-user",
            SchemeTag::RbfRayleigh => "rbf",
        };
        write!(f, "{s}")
    }
}

/// How transmit power is split across the `S` scheduled beams.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerConvention {
    /// Total power `p_t` shared equally: per-user power `rho = p_t / S`.
    FixedTotal { p_t: f64 },
    /// Per-user power `rho` held fixed regardless of `S`.
    FixedPerUser { rho: f64 },
}

impl PowerConvention {
    pub fn per_user_power(&self, s: usize) -> f64 {
        match *self {
            PowerConvention::FixedTotal { p_t } => p_t / s as f64,
            PowerConvention::FixedPerUser { rho } => rho,
        }
    }

    pub fn total_power(&self, s: usize) -> f64 {
        match *self {
            PowerConvention::FixedTotal { p_t } => p_t,
            PowerConvention::FixedPerUser { rho } => rho * s as f64,
        }
    }

    pub fn validate(&self) -> Result<(), SchemeError> {
        let v = match *self {
            PowerConvention::FixedTotal { p_t } => p_t,
            PowerConvention::FixedPerUser { rho } => rho,
        };
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(SchemeError::NonPositivePower(v))
        }
    }
}

impl std::fmt::Display for PowerConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PowerConvention::FixedTotal { p_t } => write!(f, "total:{p_t}"),
            PowerConvention::FixedPerUser { rho } => write!(f, "per-user:{rho}"),
        }
    }
}

/// `S` beam directions equi-spaced by 2/S on the normalized-angle circle,
/// offset by a common random direction.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamGrid {
    offset: NormalizedDirection,
    directions: Vec<NormalizedDirection>,
}

impl BeamGrid {
    /// Builds the grid deterministically from a given offset.
    pub fn with_offset(s: usize, offset: NormalizedDirection) -> Result<Self, SchemeError> {
        if s == 0 {
            return Err(SchemeError::NoBeams);
        }
        let directions = (0..s)
            .map(|b| offset.offset(2.0 * b as f64 / s as f64))
            .collect();
        Ok(Self { offset, directions })
    }

    pub fn offset(&self) -> NormalizedDirection {
        self.offset
    }

    pub fn beams(&self) -> usize {
        self.directions.len()
    }

    pub fn directions(&self) -> &[NormalizedDirection] {
        &self.directions
    }
}

/// Draws the random offset and builds the equi-spaced grid.
pub fn make_beam_grid(s: usize, rng: &mut impl Rng) -> Result<BeamGrid, SchemeError> {
    if s == 0 {
        return Err(SchemeError::NoBeams);
    }
    BeamGrid::with_offset(s, uniform_direction(rng))
}

/// The result of evaluating one scheme on one channel realization.
///
/// Rates are in nats. `sum_rate` is by construction the exact sum of
/// `per_beam_rate`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub scheme: SchemeTag,
    /// Winning user per served beam (one entry for single-user schemes).
    pub selected_users: Vec<usize>,
    /// Served beam index for single-user schemes; `None` when every grid
    /// beam carries a stream.
    pub selected_beam: Option<usize>,
    /// Post-scheduling SINR (or SNR where there is no interference) per
    /// served beam, linear scale.
    pub per_beam_sinr: Vec<f64>,
    pub per_beam_rate: Vec<f64>,
    pub sum_rate: f64,
}

impl TrialOutcome {
    fn from_beams(
        scheme: SchemeTag,
        selected_users: Vec<usize>,
        selected_beam: Option<usize>,
        per_beam_sinr: Vec<f64>,
    ) -> Self {
        let per_beam_rate: Vec<f64> = per_beam_sinr.iter().map(|&s| s.ln_1p()).collect();
        let sum_rate = per_beam_rate.iter().sum();
        Self {
            scheme,
            selected_users,
            selected_beam,
            per_beam_sinr,
            per_beam_rate,
            sum_rate,
        }
    }

    /// Mean of the per-beam rates; equals `sum_rate` for single-beam
    /// outcomes.
    pub fn per_user_rate(&self) -> f64 {
        self.sum_rate / self.per_beam_rate.len() as f64
    }
}

fn argmax_strict(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// Single-beam RDB for a forced beam direction: received powers are
/// `|alpha_k|^2 Z_k`, the strongest user is served with full power, and
/// the instantaneous rate is `log(1 + max)`.
pub fn rdb_single_beam_at(
    users: &[UrLosUser],
    m: usize,
    vartheta: NormalizedDirection,
) -> Result<TrialOutcome, SchemeError> {
    if users.is_empty() {
        return Err(SchemeError::NoUsers);
    }
    let (k_star, power) = argmax_strict(
        users
            .iter()
            .map(|u| u.gain_power() * beam_power(m, u.theta, vartheta)),
    );
    Ok(TrialOutcome::from_beams(
        SchemeTag::SingleBeam,
        vec![k_star],
        Some(0),
        vec![power],
    ))
}

/// Single-beam RDB with the beam direction drawn uniformly on (-1, 1].
pub fn rdb_single_beam(
    users: &[UrLosUser],
    m: usize,
    rng: &mut impl Rng,
) -> Result<TrialOutcome, SchemeError> {
    if users.is_empty() {
        return Err(SchemeError::NoUsers);
    }
    let vartheta = uniform_direction(rng);
    rdb_single_beam_at(users, m, vartheta)
}

/// Multi-beam RDB, single-user selection, on a given grid: the (user,
/// beam) pair with the largest received power wins and is served with
/// full power on that beam.
pub fn rdb_multibeam_single_user_on(
    users: &[UrLosUser],
    m: usize,
    grid: &BeamGrid,
) -> Result<TrialOutcome, SchemeError> {
    if users.is_empty() {
        return Err(SchemeError::NoUsers);
    }
    let mut best = (0usize, 0usize, f64::NEG_INFINITY);
    for (k, u) in users.iter().enumerate() {
        let g = u.gain_power();
        for (b, dir) in grid.directions().iter().enumerate() {
            let p = g * beam_power(m, u.theta, *dir);
            if p > best.2 {
                best = (k, b, p);
            }
        }
    }
    Ok(TrialOutcome::from_beams(
        SchemeTag::MultiBeamSingleUser,
        vec![best.0],
        Some(best.1),
        vec![best.2],
    ))
}

/// Multi-beam single-user RDB with a random grid offset.
pub fn rdb_multibeam_single_user(
    users: &[UrLosUser],
    m: usize,
    s: usize,
    rng: &mut impl Rng,
) -> Result<TrialOutcome, SchemeError> {
    if users.is_empty() {
        return Err(SchemeError::NoUsers);
    }
    let grid = make_beam_grid(s, rng)?;
    rdb_multibeam_single_user_on(users, m, &grid)
}

/// Multi-beam RDB with per-beam max-SINR user selection on a given grid.
///
/// Every beam carries a stream with per-user power `rho` from the power
/// convention; user k's SINR on beam b puts `|alpha_k|^2` in both the
/// signal and the inter-beam interference terms. With
/// `allow_duplicate_winners` (the default elsewhere) each beam picks its
/// argmax independently, so one user may win several beams; otherwise
/// beams choose greedily in index order among still-unserved users.
pub fn rdb_multibeam_multi_user_on(
    users: &[UrLosUser],
    m: usize,
    grid: &BeamGrid,
    power: PowerConvention,
    allow_duplicate_winners: bool,
) -> Result<TrialOutcome, SchemeError> {
    if users.is_empty() {
        return Err(SchemeError::NoUsers);
    }
    power.validate()?;
    let s = grid.beams();
    let rho = power.per_user_power(s);

    if allow_duplicate_winners {
        let mut best_sinr = vec![f64::NEG_INFINITY; s];
        let mut best_user = vec![0usize; s];
        let mut row = vec![0.0f64; s];
        for (k, u) in users.iter().enumerate() {
            let g = u.gain_power();
            let mut total = 0.0;
            for (b, dir) in grid.directions().iter().enumerate() {
                let z = g * beam_power(m, u.theta, *dir);
                row[b] = z;
                total += z;
            }
            for (b, &z) in row.iter().enumerate() {
                let interference = (total - z).max(0.0);
                let sinr = rho * z / (1.0 + rho * interference);
                if sinr > best_sinr[b] {
                    best_sinr[b] = sinr;
                    best_user[b] = k;
                }
            }
        }
        return Ok(TrialOutcome::from_beams(
            SchemeTag::MultiBeamMultiUser,
            best_user,
            None,
            best_sinr,
        ));
    }

    // Greedy no-duplicate assignment needs the full SINR matrix.
    let k_users = users.len();
    let mut sinr = vec![0.0f64; k_users * s];
    for (k, u) in users.iter().enumerate() {
        let g = u.gain_power();
        let row = &mut sinr[k * s..(k + 1) * s];
        let mut total = 0.0;
        for (b, dir) in grid.directions().iter().enumerate() {
            row[b] = g * beam_power(m, u.theta, *dir);
            total += row[b];
        }
        for z in row.iter_mut() {
            let interference = (total - *z).max(0.0);
            *z = rho * *z / (1.0 + rho * interference);
        }
    }
    let mut taken = vec![false; k_users];
    let mut winners = Vec::with_capacity(s);
    let mut winner_sinr = Vec::with_capacity(s);
    for b in 0..s {
        let (k_best, v) = argmax_strict((0..k_users).map(|k| {
            if taken[k] {
                f64::NEG_INFINITY
            } else {
                sinr[k * s + b]
            }
        }));
        // more beams than users: fall back to the unconstrained argmax
        let (k_best, v) = if v.is_finite() {
            (k_best, v)
        } else {
            argmax_strict((0..k_users).map(|k| sinr[k * s + b]))
        };
        taken[k_best] = true;
        winners.push(k_best);
        winner_sinr.push(v);
    }
    Ok(TrialOutcome::from_beams(
        SchemeTag::MultiBeamMultiUser,
        winners,
        None,
        winner_sinr,
    ))
}

/// Multi-beam multi-user RDB with a random grid offset.
pub fn rdb_multibeam_multi_user(
    users: &[UrLosUser],
    m: usize,
    s: usize,
    power: PowerConvention,
    allow_duplicate_winners: bool,
    rng: &mut impl Rng,
) -> Result<TrialOutcome, SchemeError> {
    if users.is_empty() {
        return Err(SchemeError::NoUsers);
    }
    let grid = make_beam_grid(s, rng)?;
    rdb_multibeam_multi_user_on(users, m, &grid, power, allow_duplicate_winners)
}

/// Rate of exact maximum-ratio beamforming to the strongest user under
/// perfect channel knowledge: `log(1 + M max_k |alpha_k|^2)`.
pub fn perfect_csi_rate(users: &[UrLosUser], m: usize) -> Result<f64, SchemeError> {
    if users.is_empty() {
        return Err(SchemeError::NoUsers);
    }
    let best = users.iter().map(UrLosUser::gain_power).fold(0.0, f64::max);
    Ok((m as f64 * best).ln_1p())
}

/// Random orthonormal beamforming over a Rayleigh channel: `s` beams from
/// the orthonormalized columns of an i.i.d. Gaussian matrix, per-beam
/// max-SINR assignment (a user may win several beams), total power `p_t`.
pub fn rbf_rayleigh(
    h: &RayleighMatrix,
    s: usize,
    p_t: f64,
    rng: &mut impl Rng,
) -> Result<TrialOutcome, SchemeError> {
    if s == 0 {
        return Err(SchemeError::NoBeams);
    }
    let m = h.antennas();
    if s > m {
        return Err(SchemeError::TooManyBeams { s, m });
    }
    if !(p_t.is_finite() && p_t > 0.0) {
        return Err(SchemeError::NonPositivePower(p_t));
    }
    let beams = random_orthonormal_beams(m, s, rng);
    let rho = p_t / s as f64;

    let mut best_sinr = vec![f64::NEG_INFINITY; s];
    let mut best_user = vec![0usize; s];
    let mut gains = vec![0.0f64; s];
    for k in 0..h.users() {
        let row = h.row(k);
        let mut total = 0.0;
        for (i, u) in beams.iter().enumerate() {
            let dot: Complex64 = row.iter().zip(u).map(|(a, b)| a.conj() * b).sum();
            gains[i] = dot.norm_sqr();
            total += gains[i];
        }
        for i in 0..s {
            let interference = (total - gains[i]).max(0.0);
            let sinr = rho * gains[i] / (1.0 + rho * interference);
            if sinr > best_sinr[i] {
                best_sinr[i] = sinr;
                best_user[i] = k;
            }
        }
    }
    Ok(TrialOutcome::from_beams(
        SchemeTag::RbfRayleigh,
        best_user,
        None,
        best_sinr,
    ))
}

/// Orthonormalized columns of an M x S standard complex Gaussian matrix
/// (modified Gram-Schmidt with one re-orthogonalization pass).
pub fn random_orthonormal_beams(m: usize, s: usize, rng: &mut impl Rng) -> Vec<Vec<Complex64>> {
    let mut cols: Vec<Vec<Complex64>> = (0..s)
        .map(|_| (0..m).map(|_| standard_complex_normal(rng)).collect())
        .collect();
    for j in 0..s {
        for _pass in 0..2 {
            for i in 0..j {
                let (head, tail) = cols.split_at_mut(j);
                let q = &head[i];
                let v = &mut tail[0];
                let r: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (ve, qe) in v.iter_mut().zip(q) {
                    *ve -= r * qe;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut cols[j] {
            *z /= norm;
        }
    }
    cols
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_urlos, GainModel};
    use crate::stream::StreamFactory;
    use approx::assert_relative_eq;

    fn rng(trial: u64) -> crate::stream::TrialRng {
        StreamFactory::new(7177).substream("scheme-tests", trial)
    }

    fn dir(x: f64) -> NormalizedDirection {
        NormalizedDirection::new(x).unwrap()
    }

    fn unit_user(theta: f64) -> UrLosUser {
        UrLosUser {
            theta: dir(theta),
            alpha: Complex64::new(1.0, 0.0),
        }
    }

    #[test]
    fn aligned_single_beam_reaches_log_one_plus_m() {
        let users = vec![unit_user(0.37)];
        let out = rdb_single_beam_at(&users, 64, dir(0.37)).unwrap();
        assert_relative_eq!(out.sum_rate, 65f64.ln(), epsilon = 1e-12);
        assert_eq!(out.selected_users, vec![0]);
    }

    #[test]
    fn nulled_single_beam_has_zero_rate() {
        let users = vec![unit_user(0.25)];
        let m = 64;
        let out = rdb_single_beam_at(&users, m, dir(0.25).offset(2.0 / m as f64)).unwrap();
        assert_eq!(out.sum_rate, 0.0);
    }

    #[test]
    fn single_beam_rejects_empty_users() {
        assert!(rdb_single_beam(&[], 8, &mut rng(0)).is_err());
    }

    #[test]
    fn single_beam_tie_goes_to_lowest_index() {
        let users = vec![unit_user(0.5), unit_user(0.5)];
        let out = rdb_single_beam_at(&users, 16, dir(0.5)).unwrap();
        assert_eq!(out.selected_users, vec![0]);
    }

    #[test]
    fn selection_is_invariant_to_common_gain_scale() {
        let mut users = sample_urlos(12, GainModel::ComplexGaussian, &mut rng(1)).unwrap();
        let base = rdb_single_beam_at(&users, 128, dir(0.1)).unwrap();
        for u in &mut users {
            u.alpha *= 3.0;
        }
        let scaled = rdb_single_beam_at(&users, 128, dir(0.1)).unwrap();
        assert_eq!(base.selected_users, scaled.selected_users);
        assert!(scaled.sum_rate > base.sum_rate);
    }

    #[test]
    fn grid_spacing_and_degenerate_grid() {
        let g = BeamGrid::with_offset(1, dir(0.3)).unwrap();
        assert_eq!(g.directions(), &[dir(0.3)]);
        let g = BeamGrid::with_offset(4, dir(0.0)).unwrap();
        let vals: Vec<f64> = g.directions().iter().map(|d| d.value()).collect();
        assert_eq!(vals, vec![0.0, 0.5, 1.0, -0.5]);
    }

    #[test]
    fn grid_rejects_zero_beams() {
        assert!(make_beam_grid(0, &mut rng(0)).is_err());
    }

    #[test]
    fn grid_directions_are_pairwise_distinct() {
        for s in [2usize, 3, 7, 64] {
            let g = make_beam_grid(s, &mut rng(20 + s as u64)).unwrap();
            for i in 0..s {
                for j in i + 1..s {
                    assert_ne!(
                        g.directions()[i].value(),
                        g.directions()[j].value(),
                        "s={s} ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn multibeam_single_user_with_one_beam_matches_single_beam() {
        let users = sample_urlos(20, GainModel::ComplexGaussian, &mut rng(2)).unwrap();
        let mut r1 = rng(3);
        let mut r2 = rng(3);
        let a = rdb_single_beam(&users, 256, &mut r1).unwrap();
        let b = rdb_multibeam_single_user(&users, 256, 1, &mut r2).unwrap();
        assert_eq!(a.sum_rate, b.sum_rate);
        assert_eq!(a.selected_users, b.selected_users);
    }

    #[test]
    fn more_beams_with_shared_offset_never_hurt() {
        let users = sample_urlos(10, GainModel::UnitGain, &mut rng(4)).unwrap();
        let offset = dir(-0.613);
        let mut last = 0.0;
        for s in [1usize, 2, 4, 8, 16] {
            let grid = BeamGrid::with_offset(s, offset).unwrap();
            let out = rdb_multibeam_single_user_on(&users, 512, &grid).unwrap();
            assert!(out.sum_rate >= last - 1e-15, "s={s}");
            last = out.sum_rate;
        }
    }

    #[test]
    fn multi_user_single_beam_has_no_interference() {
        let users = sample_urlos(6, GainModel::UnitGain, &mut rng(5)).unwrap();
        let grid = BeamGrid::with_offset(1, dir(0.2)).unwrap();
        let out = rdb_multibeam_multi_user_on(
            &users,
            64,
            &grid,
            PowerConvention::FixedPerUser { rho: 1.0 },
            true,
        )
        .unwrap();
        let single = rdb_single_beam_at(&users, 64, dir(0.2)).unwrap();
        assert_eq!(out.selected_users[0], single.selected_users[0]);
        assert_relative_eq!(
            out.per_beam_sinr[0],
            single.per_beam_sinr[0],
            epsilon = 1e-12
        );
    }

    #[test]
    fn per_user_power_dominates_fixed_total_per_beam() {
        let users = sample_urlos(24, GainModel::ComplexGaussian, &mut rng(6)).unwrap();
        let grid = BeamGrid::with_offset(8, dir(0.05)).unwrap();
        let hi = rdb_multibeam_multi_user_on(
            &users,
            256,
            &grid,
            PowerConvention::FixedPerUser { rho: 1.0 },
            true,
        )
        .unwrap();
        let lo = rdb_multibeam_multi_user_on(
            &users,
            256,
            &grid,
            PowerConvention::FixedTotal { p_t: 1.0 },
            true,
        )
        .unwrap();
        for (a, b) in hi.per_beam_sinr.iter().zip(&lo.per_beam_sinr) {
            assert!(a >= b);
        }
    }

    #[test]
    fn max_sinr_winner_beats_max_signal_winner() {
        // virtual-selection bound: scheduling on SINR cannot do worse per
        // beam than scheduling on signal power
        let users = sample_urlos(32, GainModel::ComplexGaussian, &mut rng(7)).unwrap();
        let m = 128;
        let grid = BeamGrid::with_offset(4, dir(0.33)).unwrap();
        let rho = 0.25;
        let out = rdb_multibeam_multi_user_on(
            &users,
            m,
            &grid,
            PowerConvention::FixedTotal { p_t: 1.0 },
            true,
        )
        .unwrap();
        for (b, dirb) in grid.directions().iter().enumerate() {
            let (k_sig, _) = super::argmax_strict(
                users
                    .iter()
                    .map(|u| u.gain_power() * beam_power(m, u.theta, *dirb)),
            );
            let u = &users[k_sig];
            let z: Vec<f64> = grid
                .directions()
                .iter()
                .map(|d| u.gain_power() * beam_power(m, u.theta, *d))
                .collect();
            let total: f64 = z.iter().sum();
            let sinr_sig = rho * z[b] / (1.0 + rho * (total - z[b]).max(0.0));
            assert!(out.per_beam_sinr[b] >= sinr_sig - 1e-15);
        }
    }

    #[test]
    fn duplicate_winners_flag_forces_distinct_users() {
        // two users, four beams: without duplicates the greedy pass must
        // still serve every beam
        let users = vec![unit_user(0.1), unit_user(0.6)];
        let grid = BeamGrid::with_offset(4, dir(0.1)).unwrap();
        let out = rdb_multibeam_multi_user_on(
            &users,
            32,
            &grid,
            PowerConvention::FixedTotal { p_t: 1.0 },
            false,
        )
        .unwrap();
        assert_eq!(out.selected_users.len(), 4);
        let dup = rdb_multibeam_multi_user_on(
            &users,
            32,
            &grid,
            PowerConvention::FixedTotal { p_t: 1.0 },
            true,
        )
        .unwrap();
        assert_eq!(dup.selected_users.len(), 4);
    }

    #[test]
    fn sum_rate_is_sum_of_per_beam_rates() {
        let users = sample_urlos(40, GainModel::ComplexGaussian, &mut rng(8)).unwrap();
        let out = rdb_multibeam_multi_user(
            &users,
            512,
            8,
            PowerConvention::FixedTotal { p_t: 1.0 },
            true,
            &mut rng(9),
        )
        .unwrap();
        let direct: f64 = out.per_beam_rate.iter().sum();
        assert_eq!(out.sum_rate, direct);
        assert!(out.per_beam_sinr.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn perfect_csi_rate_matches_definitions() {
        let users = vec![unit_user(0.4), unit_user(-0.2)];
        assert_relative_eq!(
            perfect_csi_rate(&users, 100).unwrap(),
            101f64.ln(),
            epsilon = 1e-12
        );
        let users = vec![UrLosUser {
            theta: dir(0.0),
            alpha: Complex64::new(2f64.sqrt(), 0.0),
        }];
        assert_relative_eq!(
            perfect_csi_rate(&users, 10).unwrap(),
            21f64.ln(),
            epsilon = 1e-12
        );
        assert!(perfect_csi_rate(&[], 4).is_err());
    }

    #[test]
    fn rbf_beams_are_orthonormal() {
        let beams = random_orthonormal_beams(32, 8, &mut rng(10));
        for i in 0..8 {
            for j in 0..8 {
                let dot: Complex64 = beams[i]
                    .iter()
                    .zip(&beams[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot.norm() - expect).abs() < 1e-10, "({i},{j}) -> {dot}");
            }
        }
    }

    #[test]
    fn rbf_single_beam_single_user_has_no_interference() {
        let h = crate::channel::sample_rayleigh(1, 16, 1.0, &mut rng(11)).unwrap();
        let mut r = rng(12);
        let out = rbf_rayleigh(&h, 1, 2.0, &mut r).unwrap();
        // recompute P_t |h^H u|^2 directly
        let beams = random_orthonormal_beams(16, 1, &mut rng(12));
        let dot: Complex64 = h
            .row(0)
            .iter()
            .zip(&beams[0])
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert_relative_eq!(out.per_beam_sinr[0], 2.0 * dot.norm_sqr(), epsilon = 1e-12);
    }

    #[test]
    fn rbf_rejects_more_beams_than_antennas() {
        let h = crate::channel::sample_rayleigh(4, 8, 1.0, &mut rng(13)).unwrap();
        assert_eq!(
            rbf_rayleigh(&h, 9, 1.0, &mut rng(14)).unwrap_err(),
            SchemeError::TooManyBeams { s: 9, m: 8 }
        );
    }

    #[test]
    fn trial_evaluation_is_pure() {
        let users = sample_urlos(15, GainModel::ComplexGaussian, &mut rng(15)).unwrap();
        let grid = BeamGrid::with_offset(4, dir(0.9)).unwrap();
        let a = rdb_multibeam_multi_user_on(
            &users,
            64,
            &grid,
            PowerConvention::FixedTotal { p_t: 1.0 },
            true,
        )
        .unwrap();
        let b = rdb_multibeam_multi_user_on(
            &users,
            64,
            &grid,
            PowerConvention::FixedTotal { p_t: 1.0 },
            true,
        )
        .unwrap();
        assert_eq!(a, b);
    }
}
