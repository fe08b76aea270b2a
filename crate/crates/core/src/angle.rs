//! Wrapped-angle arithmetic, steering vectors, and the closed-form beam gain.
//!
//! Normalized directions live on a circle of period 2 and are kept in the
//! canonical range (-1, 1]. The beam gain between two directions is the
//! Fejér kernel of order `M`, evaluated in closed form so that a
//! (user, beam) pair costs O(1) regardless of the antenna count. Explicit
//! steering vectors are also provided; the schemes never touch them, they
//! exist so the closed form can be checked against an O(M) inner product.
//!
//! All trigonometric arguments are folded onto their period with an exact
//! FMA product split before the multiplication by pi. Without the folding,
//! the phase `pi*n*theta` picks up an absolute rounding error that grows
//! with `n*theta`, which is enough to ruin the kernel near its nulls where
//! the closed form and the explicit inner product must still agree.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AngleError {
    #[error("direction must be finite, got {0}")]
    NonFinite(f64),
    #[error("antenna count must be at least 1")]
    ZeroAntennas,
    #[error("steering vectors have mismatched lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

/// A direction in the normalized angle domain, wrapped to (-1, 1].
///
/// The value is dimensionless: for a critically spaced uniform linear
/// array it equals the sine of the physical departure angle, and all
/// array responses are periodic in it with period 2.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NormalizedDirection(f64);

impl NormalizedDirection {
    /// Wraps `value` modulo 2 onto (-1, 1]. Rejects non-finite input.
    pub fn new(value: f64) -> Result<Self, AngleError> {
        if !value.is_finite() {
            return Err(AngleError::NonFinite(value));
        }
        Ok(Self(wrap_raw(value)))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The direction `self + delta`, wrapped. `delta` must be finite.
    pub fn offset(self, delta: f64) -> Self {
        debug_assert!(delta.is_finite());
        Self(wrap_raw(self.0 + delta))
    }
}

/// Wraps any finite angle onto the canonical range (-1, 1].
pub fn wrap_direction(value: f64) -> Result<NormalizedDirection, AngleError> {
    NormalizedDirection::new(value)
}

/// Canonical wrap. Inputs already in (-1, 1] are returned bit-identical,
/// which makes wrapping idempotent.
fn wrap_raw(x: f64) -> f64 {
    if -1.0 < x && x <= 1.0 {
        return x;
    }
    // rem_euclid may round up to exactly 2.0 for tiny negative inputs;
    // the branch below folds that case to 0.
    let r = x.rem_euclid(2.0);
    if r > 1.0 {
        r - 2.0
    } else {
        r
    }
}

/// Exact product: returns `(p, e)` with `a * b = p + e` exactly.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Exact sum: returns `(s, e)` with `a + b = s + e` exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bv = s - a;
    let e = (a - (s - bv)) + (b - bv);
    (s, e)
}

/// Folds `hi + lo` (an exact two-double value) onto (-period/2, period/2].
/// `hi % period` is exact in IEEE arithmetic and the +/- period/2 shifts
/// are exact by Sterbenz, so the only rounding is the final `+ lo`.
#[inline]
fn fold_centered(hi: f64, lo: f64, period: f64) -> f64 {
    let half = 0.5 * period;
    let r = hi % period;
    let r = if r > half {
        r - period
    } else if r <= -half {
        r + period
    } else {
        r
    };
    let y = r + lo;
    if y > half {
        y - period
    } else if y <= -half {
        y + period
    } else {
        y
    }
}

/// |sin(pi * y / 2)| for `y` in (-2, 2], with the half-turn null exact.
#[inline]
fn abs_sin_half_pi(y: f64) -> f64 {
    if y == 2.0 {
        return 0.0;
    }
    (FRAC_PI_2 * y).sin().abs()
}

/// Fejér kernel gain of order `m` for a direction difference given as the
/// exact two-double value `d_hi + d_lo`, with `d_hi` in (-1, 1].
fn fejer_gain_folded(m: usize, d_hi: f64, d_lo: f64) -> f64 {
    debug_assert!(m >= 1);
    debug_assert!((-1.0..=1.0).contains(&d_hi));
    if d_hi == 0.0 && d_lo == 0.0 {
        return 1.0;
    }
    let mf = m as f64;
    let (p, e) = two_prod(d_hi, mf);
    let num = abs_sin_half_pi(fold_centered(p, e + d_lo * mf, 4.0));
    let den = mf * abs_sin_half_pi(d_hi + d_lo);
    (num / den).min(1.0)
}

/// Fejér kernel `F_M` of order `m`: the magnitude of the inner product of
/// two unit steering vectors whose directions differ by `delta`.
///
/// The result lies in [0, 1], is even and 2-periodic in `delta`, equals 1
/// exactly at a wrapped difference of zero and 0 exactly at the nulls
/// `delta = 2j/m` when they are representable. `delta` must be finite; it
/// is wrapped internally.
pub fn fejer_gain(m: usize, delta: f64) -> f64 {
    assert!(m >= 1, "antenna count must be at least 1");
    debug_assert!(delta.is_finite());
    fejer_gain_folded(m, wrap_raw(delta), 0.0)
}

/// Array power `Z = M * F_M(vartheta - theta)^2` delivered to a user at
/// `theta` by a beam pointed at `vartheta`.
///
/// Ranges over [0, M]; equals `M` exactly for an aligned beam. The
/// direction difference is carried as an exact two-double value so the
/// result stays faithful near the kernel nulls.
pub fn beam_power(m: usize, theta: NormalizedDirection, vartheta: NormalizedDirection) -> f64 {
    assert!(m >= 1, "antenna count must be at least 1");
    let (d, e) = two_sum(vartheta.value(), -theta.value());
    // d is in (-2, 2); the +/-2 shift is exact by Sterbenz.
    let d_hi = if d > 1.0 {
        d - 2.0
    } else if d <= -1.0 {
        d + 2.0
    } else {
        d
    };
    let f = fejer_gain_folded(m, d_hi, e);
    (m as f64) * f * f
}

/// A unit-norm array steering vector with entries
/// `(1/sqrt(M)) * exp(-i*pi*n*theta)` for `n = 0..M-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    entries: Vec<Complex64>,
}

impl SteeringVector {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }
}

/// Builds the length-`m` steering vector for direction `theta`.
pub fn steering_vector(m: usize, theta: NormalizedDirection) -> Result<SteeringVector, AngleError> {
    if m == 0 {
        return Err(AngleError::ZeroAntennas);
    }
    let norm = 1.0 / (m as f64).sqrt();
    let th = theta.value();
    let entries = (0..m)
        .map(|n| {
            let (p, e) = two_prod(n as f64, th);
            let y = fold_centered(p, e, 2.0);
            let (s, c) = (-PI * y).sin_cos();
            Complex64::new(norm * c, norm * s)
        })
        .collect();
    Ok(SteeringVector { entries })
}

/// Conjugate-linear inner product `u^H v`, accumulated with Neumaier
/// compensation so it can serve as a numerical oracle for the closed-form
/// kernel.
pub fn inner_product(u: &SteeringVector, v: &SteeringVector) -> Result<Complex64, AngleError> {
    if u.len() != v.len() {
        return Err(AngleError::LengthMismatch(u.len(), v.len()));
    }
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    for (a, b) in u.entries.iter().zip(&v.entries) {
        let t = a.conj() * b;
        re.add(t.re);
        im.add(t.im);
    }
    Ok(Complex64::new(re.total(), im.total()))
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn wrap_keeps_canonical_values() {
        assert_eq!(wrap_direction(0.3).unwrap().value(), 0.3);
        assert_eq!(wrap_direction(1.0).unwrap().value(), 1.0);
    }

    #[test]
    fn wrap_moves_out_of_range_values() {
        assert_relative_eq!(wrap_direction(1.7).unwrap().value(), -0.3, epsilon = 1e-15);
        assert_eq!(wrap_direction(-1.0).unwrap().value(), 1.0);
        assert_eq!(wrap_direction(2.0).unwrap().value(), 0.0);
        assert_eq!(wrap_direction(-3.0).unwrap().value(), 1.0);
    }

    #[test]
    fn wrap_rejects_non_finite() {
        assert!(wrap_direction(f64::NAN).is_err());
        assert!(wrap_direction(f64::INFINITY).is_err());
    }

    #[test]
    fn steering_vector_single_element() {
        let a = steering_vector(1, NormalizedDirection::new(0.5).unwrap()).unwrap();
        assert_eq!(a.entries(), &[Complex64::new(1.0, 0.0)]);
    }

    #[test]
    fn steering_vector_zero_direction_is_uniform() {
        let a = steering_vector(2, NormalizedDirection::new(0.0).unwrap()).unwrap();
        let w = 1.0 / 2f64.sqrt();
        for z in a.entries() {
            assert_relative_eq!(z.re, w, epsilon = 1e-15);
            assert_relative_eq!(z.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn steering_vector_entry_matches_direct_substitution() {
        // entry 1 of a(0.5) with M = 4 is (1/2) * exp(-i*pi/2) = -i/2
        let a = steering_vector(4, NormalizedDirection::new(0.5).unwrap()).unwrap();
        assert_relative_eq!(a.entries()[1].re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(a.entries()[1].im, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn steering_vector_rejects_zero_antennas() {
        assert_eq!(
            steering_vector(0, NormalizedDirection::new(0.0).unwrap()).unwrap_err(),
            AngleError::ZeroAntennas
        );
    }

    #[test]
    fn steering_vector_has_unit_norm() {
        for m in [1usize, 2, 7, 64, 513] {
            let a = steering_vector(m, NormalizedDirection::new(-0.377).unwrap()).unwrap();
            let n2: f64 = a.entries().iter().map(|z| z.norm_sqr()).sum();
            assert!((n2.sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fejer_peak_and_first_null() {
        assert_eq!(fejer_gain(100, 0.0), 1.0);
        // 2/128 is exactly representable, so the null is exact.
        assert_eq!(fejer_gain(128, 2.0 / 128.0), 0.0);
        // 2/100 is not; the value reflects the input's representation error.
        assert!(fejer_gain(100, 2.0 / 100.0) < 1e-12);
    }

    #[test]
    fn fejer_matches_inner_product_oracle_in_main_lobe() {
        let theta = NormalizedDirection::new(0.0).unwrap();
        let shifted = NormalizedDirection::new(0.01).unwrap();
        let a = steering_vector(16, theta).unwrap();
        let b = steering_vector(16, shifted).unwrap();
        let g = inner_product(&a, &b).unwrap().norm();
        let f = fejer_gain(16, 0.01);
        assert!((f - g).abs() / g < 1e-9);
    }

    #[test]
    fn beam_power_aligned_and_nulled() {
        let t = NormalizedDirection::new(0.25).unwrap();
        assert_eq!(beam_power(64, t, t), 64.0);
        let v = t.offset(2.0 / 64.0);
        assert_eq!(beam_power(64, t, v), 0.0);
    }

    #[test]
    fn inner_product_unit_and_periodic() {
        let a = steering_vector(32, NormalizedDirection::new(0.0).unwrap()).unwrap();
        let b = steering_vector(32, NormalizedDirection::new(2.0).unwrap()).unwrap();
        assert_relative_eq!(inner_product(&a, &a).unwrap().norm(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(inner_product(&a, &b).unwrap().norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn inner_product_rejects_mismatched_lengths() {
        let a = steering_vector(4, NormalizedDirection::new(0.1).unwrap()).unwrap();
        let b = steering_vector(5, NormalizedDirection::new(0.1).unwrap()).unwrap();
        assert!(inner_product(&a, &b).is_err());
    }

    #[test]
    fn grid_of_dividing_beams_is_orthogonal() {
        // sin(pi*j*M/S) = 0 when S divides M, so beams 2j/S apart are
        // exactly orthogonal; numerically we ask for 1e-10.
        let m = 128;
        let s = 8;
        let base = NormalizedDirection::new(0.1).unwrap();
        let a = steering_vector(m, base).unwrap();
        for j in 1..s {
            let b = steering_vector(m, base.offset(2.0 * j as f64 / s as f64)).unwrap();
            assert!(inner_product(&a, &b).unwrap().norm() < 1e-10);
        }
    }

    #[test]
    fn lemma_style_envelope_bound_holds_on_dense_grid() {
        // F_M(t) <= 1/(M t) on (0, 1], equality only at t = 1 for odd M.
        for m in [4usize, 64, 1024] {
            for i in 1..=4000 {
                let t = i as f64 / 4000.0;
                assert!(fejer_gain(m, t) <= 1.0 / (m as f64 * t) + 1e-15);
            }
        }
    }

    #[test]
    fn fejer_interior_nulls_vanish() {
        for m in [16usize, 100, 353] {
            for j in 1..m {
                let d = 2.0 * j as f64 / m as f64;
                if wrap_raw(d) == 0.0 {
                    continue;
                }
                assert!(fejer_gain(m, d) < 1e-12, "m={m} j={j}");
            }
        }
    }

    proptest! {
        #[test]
        fn wrap_is_idempotent_and_canonical(x in -1e6f64..1e6) {
            let w = wrap_raw(x);
            prop_assert!(-1.0 < w && w <= 1.0);
            prop_assert_eq!(wrap_raw(w), w);
        }

        #[test]
        fn wrap_preserves_value_mod_2(x in -100.0f64..100.0) {
            let w = wrap_raw(x);
            let k = (x - w) / 2.0;
            prop_assert!((k - k.round()).abs() < 1e-9);
        }

        #[test]
        fn fejer_is_even_bounded_and_periodic(
            m in 1usize..512,
            d in -1.0f64..1.0,
        ) {
            let f = fejer_gain(m, d);
            prop_assert!((0.0..=1.0).contains(&f));
            prop_assert_eq!(fejer_gain(m, -d), f);
            prop_assert!((fejer_gain(m, d + 2.0) - f).abs() < 1e-11);
        }

        #[test]
        fn beam_power_matches_explicit_inner_product(
            m in 1usize..=1024,
            t in -1.0f64..1.0,
            v in -1.0f64..1.0,
        ) {
            let theta = NormalizedDirection::new(t).unwrap();
            let vartheta = NormalizedDirection::new(v).unwrap();
            let z = beam_power(m, theta, vartheta);
            let a = steering_vector(m, theta).unwrap();
            let b = steering_vector(m, vartheta).unwrap();
            let z_oracle = m as f64 * inner_product(&a, &b).unwrap().norm_sqr();
            let denom = z.max(z_oracle);
            // below the floor both routes sit in the rounding noise of an
            // exact null and a relative comparison is meaningless
            if denom > 1e-15 * m as f64 {
                prop_assert!((z - z_oracle).abs() / denom < 1e-9);
            }
        }
    }
}
