//! Parameter sweeps over (M, q, l) grids, the figure presets, and the
//! CSV result table.
//!
//! A sweep expands its axes into one row per (grid point, scheme), runs
//! the estimator for each row, and attaches the matching closed-form
//! overlay values. Point failures are recorded in the row's status column
//! instead of aborting the sweep. The CSV rendering uses Rust's shortest
//! round-trip float formatting, so a table is byte-stable across worker
//! counts and platforms.

use crate::channel::GainModel;
use crate::engine::{
    estimate_rate, estimate_ratio_to_perfect_csi, BeamRule, RateMetric, SchemeConfig, UserRule,
};
use crate::scheme::{PowerConvention, SchemeTag};
use crate::theory;
use serde::{Deserialize, Serialize};

/// Rate unit for rendered output. Estimates are computed in nats;
/// ratio-type columns are base-invariant and never converted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateUnit {
    Nats,
    Bits,
}

impl RateUnit {
    fn convert(self, nats: f64) -> f64 {
        match self {
            RateUnit::Nats => nats,
            RateUnit::Bits => nats / std::f64::consts::LN_2,
        }
    }
}

impl std::fmt::Display for RateUnit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RateUnit::Nats => write!(f, "nats"),
            RateUnit::Bits => write!(f, "bits"),
        }
    }
}

/// A full sweep description: grid axes, scheme set, estimator settings,
/// and output options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub label: String,
    pub schemes: Vec<SchemeTag>,
    pub m_values: Vec<usize>,
    /// User-count exponents; empty means `explicit_k` is used instead.
    pub q_values: Vec<f64>,
    /// Beam-count exponents; empty means `explicit_s` (or one beam).
    pub ell_values: Vec<f64>,
    pub explicit_k: Option<usize>,
    pub explicit_s: Option<BeamRule>,
    pub c_u: f64,
    pub c_b: f64,
    pub gain: GainModel,
    pub power: PowerConvention,
    pub metric: RateMetric,
    /// Also estimate the ratio of the scheme rate to the perfect-CSI rate.
    pub ratio_to_csi: bool,
    pub n_trials: u64,
    pub master_seed: u64,
    pub allow_duplicate_winners: bool,
    pub sigma_h2: f64,
    /// Half-width of the overlay bracket exponents.
    pub overlay_epsilon: f64,
    pub rate_unit: RateUnit,
}

impl SweepSpec {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            schemes: vec![SchemeTag::SingleBeam],
            m_values: default_m_grid(),
            q_values: Vec::new(),
            ell_values: Vec::new(),
            explicit_k: None,
            explicit_s: None,
            c_u: 1.0,
            c_b: 1.0,
            gain: GainModel::ComplexGaussian,
            power: PowerConvention::FixedTotal { p_t: 1.0 },
            metric: RateMetric::SumRate,
            ratio_to_csi: false,
            n_trials: 5000,
            master_seed: 1,
            allow_duplicate_winners: true,
            sigma_h2: 1.0,
            overlay_epsilon: 0.1,
            rate_unit: RateUnit::Nats,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.schemes.is_empty() {
            return Err("scheme set must not be empty".into());
        }
        if self.m_values.is_empty() {
            return Err("M grid must not be empty".into());
        }
        if self.m_values.contains(&0) {
            return Err("M values must be at least 1".into());
        }
        if self.n_trials == 0 {
            return Err("n_trials must be at least 1".into());
        }
        if self.q_values.is_empty() && self.explicit_k.is_none() {
            return Err("either a q grid or an explicit K is required".into());
        }
        if !self.q_values.is_empty() && self.explicit_k.is_some() {
            return Err("q grid and explicit K are mutually exclusive".into());
        }
        for &q in &self.q_values {
            if !(q > 0.0 && q <= 1.0) {
                return Err(format!("q must lie in (0, 1], got {q}"));
            }
        }
        for &l in &self.ell_values {
            if !(l > 0.0 && l <= 1.0) {
                return Err(format!("l must lie in (0, 1], got {l}"));
            }
        }
        if !self.ell_values.is_empty() && self.explicit_s.is_some() {
            return Err("l grid and explicit S are mutually exclusive".into());
        }
        Ok(())
    }

    /// Truncates the antenna grid, used by the reduced-budget smoke tier.
    pub fn clamp_m(&mut self, max_m: usize) {
        self.m_values.retain(|&m| m <= max_m);
        if self.m_values.is_empty() {
            self.m_values.push(max_m);
        }
    }
}

/// Default logarithmic antenna grid: half-decade steps over 1e2..1e4.
pub fn default_m_grid() -> Vec<usize> {
    vec![100, 316, 1000, 3162, 10000]
}

/// Default user-exponent grid: 0.05 steps over (0, 1).
pub fn default_q_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 / 20.0).collect()
}

/// One output row of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub label: String,
    pub scheme: SchemeTag,
    pub gain: GainModel,
    pub power: PowerConvention,
    pub metric: RateMetric,
    pub m: usize,
    pub q: Option<f64>,
    pub ell: Option<f64>,
    pub k: usize,
    pub s: usize,
    pub n_trials: u64,
    pub rate_mean: Option<f64>,
    pub rate_stderr: Option<f64>,
    pub ratio_mean: Option<f64>,
    pub ratio_stderr: Option<f64>,
    /// Limiting rate fraction for ratio sweeps (clamped to [0, 1]).
    pub theory_ratio: Option<f64>,
    pub theory_lower: Option<f64>,
    pub theory_upper: Option<f64>,
    pub status: String,
}

/// A finished sweep: rows in deterministic grid order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub rate_unit: RateUnit,
}

pub const CSV_HEADER: &str = "label,scheme,gain,power,metric,m,q,ell,k,s,n_trials,rate_mean,rate_stderr,ratio_mean,ratio_stderr,theory_ratio,theory_lower,theory_upper,rate_unit,status";

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl SweepTable {
    /// Renders the table as CSV: UTF-8, comma separators, `\n` line
    /// endings, mandatory header, full round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(128 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let cols = [
                r.label.clone(),
                r.scheme.to_string(),
                r.gain.to_string(),
                r.power.to_string(),
                r.metric.to_string(),
                r.m.to_string(),
                fmt_opt(r.q),
                fmt_opt(r.ell),
                r.k.to_string(),
                r.s.to_string(),
                r.n_trials.to_string(),
                fmt_opt(r.rate_mean),
                fmt_opt(r.rate_stderr),
                fmt_opt(r.ratio_mean),
                fmt_opt(r.ratio_stderr),
                fmt_opt(r.theory_ratio),
                fmt_opt(r.theory_lower),
                fmt_opt(r.theory_upper),
                self.rate_unit.to_string(),
                r.status.clone(),
            ];
            out.push_str(&cols.join(","));
            out.push('\n');
        }
        out
    }
}

struct GridPoint {
    scheme: SchemeTag,
    m: usize,
    q: Option<f64>,
    ell: Option<f64>,
}

fn expand_grid(spec: &SweepSpec) -> Vec<GridPoint> {
    let q_axis: Vec<Option<f64>> = if spec.q_values.is_empty() {
        vec![None]
    } else {
        spec.q_values.iter().copied().map(Some).collect()
    };
    let mut points = Vec::new();
    for &scheme in &spec.schemes {
        let uses_beam_axis = matches!(
            scheme,
            SchemeTag::MultiBeamSingleUser | SchemeTag::MultiBeamMultiUser
        );
        let ell_axis: Vec<Option<f64>> = if uses_beam_axis && !spec.ell_values.is_empty() {
            spec.ell_values.iter().copied().map(Some).collect()
        } else {
            vec![None]
        };
        for &q in &q_axis {
            for &ell in &ell_axis {
                for &m in &spec.m_values {
                    points.push(GridPoint { scheme, m, q, ell });
                }
            }
        }
    }
    points
}

fn config_for(spec: &SweepSpec, pt: &GridPoint) -> SchemeConfig {
    let mut cfg = SchemeConfig::new(pt.scheme, pt.m);
    cfg.users = match (pt.q, spec.explicit_k) {
        (Some(q), _) => UserRule::PowerLaw { c_u: spec.c_u, q },
        (None, Some(k)) => UserRule::Explicit { k },
        (None, None) => UserRule::Explicit { k: 1 },
    };
    cfg.beams = match (pt.ell, &spec.explicit_s) {
        (Some(ell), _) => BeamRule::PowerLaw { c_b: spec.c_b, ell },
        (None, Some(rule)) => *rule,
        (None, None) => BeamRule::Explicit { s: 1 },
    };
    cfg.gain = spec.gain;
    cfg.power = spec.power;
    cfg.metric = spec.metric;
    cfg.allow_duplicate_winners = spec.allow_duplicate_winners;
    cfg.sigma_h2 = spec.sigma_h2;
    cfg
}

/// Limiting rate fraction used as the overlay line on ratio sweeps,
/// clamped to [0, 1] (the vanishing regime plots as 0 and the fraction
/// saturates at 1 outside the bracket's validity range).
fn overlay_ratio(scheme: SchemeTag, q: Option<f64>, ell: Option<f64>) -> Option<f64> {
    let q = q?;
    if !(q > 0.0 && q < 1.0) {
        return None;
    }
    let raw = match scheme {
        SchemeTag::SingleBeam => 2.0 * q - 1.0,
        SchemeTag::MultiBeamSingleUser | SchemeTag::MultiBeamMultiUser => {
            2.0 * (q + ell.unwrap_or(0.0)) - 1.0
        }
        SchemeTag::RbfRayleigh => return None,
    };
    Some(raw.clamp(0.0, 1.0))
}

fn overlay_bracket(spec: &SweepSpec, pt: &GridPoint) -> Option<theory::BoundBracket> {
    let q = pt.q?;
    let eps = spec.overlay_epsilon;
    match pt.scheme {
        SchemeTag::SingleBeam => theory::single_beam_rate_bracket(pt.m, q, eps).ok(),
        SchemeTag::MultiBeamSingleUser => {
            theory::multibeam_rate_bracket(pt.m, q, pt.ell?, eps).ok()
        }
        SchemeTag::MultiBeamMultiUser => {
            // the bracket covers the per-user rate, not the cell sum
            if spec.metric != RateMetric::PerUserRate {
                return None;
            }
            match spec.power {
                PowerConvention::FixedTotal { p_t: 1.0 } => {
                    theory::per_user_rate_bracket_fixed_total(pt.m, q, pt.ell?, eps).ok()
                }
                PowerConvention::FixedPerUser { rho: 1.0 } => {
                    theory::per_user_rate_bracket_fixed_per_user(pt.m, q, pt.ell?, eps).ok()
                }
                _ => None,
            }
        }
        SchemeTag::RbfRayleigh => None,
    }
}

/// Runs every grid point of `spec` and returns the result table. Rows
/// appear in deterministic grid order; a failed point carries its error
/// in the status column.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable, String> {
    spec.validate()?;
    let mut rows = Vec::new();
    for pt in expand_grid(spec) {
        let cfg = config_for(spec, &pt);
        let mut row = SweepRow {
            label: spec.label.clone(),
            scheme: pt.scheme,
            gain: spec.gain,
            power: spec.power,
            metric: spec.metric,
            m: pt.m,
            q: pt.q,
            ell: pt.ell,
            k: cfg.k(),
            s: cfg.s(),
            n_trials: spec.n_trials,
            rate_mean: None,
            rate_stderr: None,
            ratio_mean: None,
            ratio_stderr: None,
            theory_ratio: None,
            theory_lower: None,
            theory_upper: None,
            status: "ok".into(),
        };
        match estimate_rate(&cfg, spec.n_trials, spec.master_seed) {
            Ok(est) => {
                row.rate_mean = Some(spec.rate_unit.convert(est.mean));
                row.rate_stderr = Some(spec.rate_unit.convert(est.stderr));
            }
            Err(e) => {
                row.status = format!("error: {e}");
                rows.push(row);
                continue;
            }
        }
        if spec.ratio_to_csi {
            match estimate_ratio_to_perfect_csi(&cfg, spec.n_trials, spec.master_seed) {
                Ok(est) => {
                    row.ratio_mean = Some(est.mean);
                    row.ratio_stderr = Some(est.stderr);
                    row.theory_ratio = overlay_ratio(pt.scheme, pt.q, pt.ell);
                }
                Err(e) => {
                    row.status = format!("error: {e}");
                }
            }
        }
        if let Some(b) = overlay_bracket(spec, &pt) {
            row.theory_lower = Some(spec.rate_unit.convert(b.lower));
            row.theory_upper = Some(spec.rate_unit.convert(b.upper));
        }
        rows.push(row);
    }
    Ok(SweepTable {
        rows,
        rate_unit: spec.rate_unit,
    })
}

/// The identifiers of the bundled figure presets.
pub const PRESET_IDS: [&str; 8] = [
    "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b", "fig6a", "fig6b",
];

/// Builds the sweep behind one of the bundled figure presets:
///
/// * `fig3a`/`fig3b` — single-beam rate over perfect-CSI rate versus q,
///   M in {100, 500, 1000, 5000, 10000}, unit / complex Gaussian gains;
/// * `fig4a`/`fig4b` — single-beam rate versus M for small / large q,
///   complex Gaussian gains;
/// * `fig5a`/`fig5b` — multi-beam single-user ratio versus q per beam
///   exponent at M = 1000, unit / complex Gaussian gains;
/// * `fig6a` — multi-beam single-user rate versus M at q = 0.3 per beam
///   exponent;
/// * `fig6b` — multi-beam multi-user per-user rate versus M at q = 0.7
///   per beam exponent, fixed total power 1.
pub fn figure_preset(id: &str) -> Option<SweepSpec> {
    let mut spec = SweepSpec::new(id);
    match id {
        "fig3a" | "fig3b" => {
            spec.schemes = vec![SchemeTag::SingleBeam];
            spec.m_values = vec![100, 500, 1000, 5000, 10000];
            spec.q_values = default_q_grid();
            spec.gain = if id == "fig3a" {
                GainModel::UnitGain
            } else {
                GainModel::ComplexGaussian
            };
            spec.ratio_to_csi = true;
        }
        "fig4a" | "fig4b" => {
            spec.schemes = vec![SchemeTag::SingleBeam];
            spec.q_values = if id == "fig4a" {
                vec![0.1, 0.2, 0.3, 0.4, 0.5]
            } else {
                vec![0.6, 0.7, 0.8, 0.9, 1.0]
            };
            spec.gain = GainModel::ComplexGaussian;
        }
        "fig5a" | "fig5b" => {
            spec.schemes = vec![SchemeTag::MultiBeamSingleUser];
            spec.m_values = vec![1000];
            spec.q_values = default_q_grid();
            spec.ell_values = vec![0.1, 0.2, 0.3, 0.4];
            spec.gain = if id == "fig5a" {
                GainModel::UnitGain
            } else {
                GainModel::ComplexGaussian
            };
            spec.ratio_to_csi = true;
        }
        "fig6a" => {
            spec.schemes = vec![SchemeTag::MultiBeamSingleUser];
            spec.q_values = vec![0.3];
            spec.ell_values = vec![0.1, 0.2, 0.3, 0.4];
            spec.gain = GainModel::ComplexGaussian;
        }
        "fig6b" => {
            spec.schemes = vec![SchemeTag::MultiBeamMultiUser];
            spec.q_values = vec![0.7];
            spec.ell_values = vec![0.1, 0.2, 0.3, 0.4, 0.5];
            spec.gain = GainModel::ComplexGaussian;
            spec.metric = RateMetric::PerUserRate;
            spec.power = PowerConvention::FixedTotal { p_t: 1.0 };
        }
        _ => return None,
    }
    Some(spec)
}
