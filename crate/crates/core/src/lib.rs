//! Monte Carlo simulation of randomly-directional beamforming (RDB) for
//! multi-user massive MISO downlinks under a uniform-random line-of-sight
//! channel, together with the closed-form rate/probability brackets the
//! simulations are validated against.
//!
//! The crate is organised around the life of one experiment:
//!
//! * [`angle`] — wrapped directions, the Fejér-kernel beam gain, and
//!   explicit steering vectors kept as a numerical oracle;
//! * [`stream`] — deterministic, splittable random substreams so every
//!   trial is reproducible independent of scheduling;
//! * [`channel`] — line-of-sight and Rayleigh channel samplers;
//! * [`scheme`] — one-realization evaluation of each transmission scheme;
//! * [`theory`] — closed-form bounds, ratios, and rate orders;
//! * [`engine`] — parallel estimators for rates, ratios, and probabilities;
//! * [`sweep`] — parameter grids, figure presets, and the CSV result table;
//! * [`validate`] — self-contained validation suites with pass/fail checks.
//!
//! All scheme evaluations go through the closed-form kernel, so one
//! (user, beam) pair costs O(1) independent of the antenna count and the
//! bundled sweeps stay fast up to `M = 10^4`.

pub mod angle;
pub mod channel;
pub mod engine;
pub mod scheme;
pub mod stats;
pub mod stream;
pub mod sweep;
pub mod theory;
pub mod validate;

pub use angle::{
    beam_power, fejer_gain, inner_product, steering_vector, wrap_direction, AngleError,
    NormalizedDirection, SteeringVector,
};
pub use channel::{
    sample_rayleigh, sample_urlos, ChannelError, GainModel, RayleighMatrix, UrLosUser,
};
pub use engine::{
    estimate_rate, estimate_ratio_to_perfect_csi, with_worker_pool, BeamRule, EngineError,
    RateEstimate, RateMetric, SchemeConfig, UserRule,
};
pub use scheme::{
    make_beam_grid, perfect_csi_rate, rbf_rayleigh, rdb_multibeam_multi_user,
    rdb_multibeam_single_user, rdb_single_beam, BeamGrid, PowerConvention, SchemeError, SchemeTag,
    TrialOutcome,
};
pub use stream::{StreamFactory, TrialRng};
pub use sweep::{figure_preset, run_sweep, RateUnit, SweepSpec, SweepTable};
