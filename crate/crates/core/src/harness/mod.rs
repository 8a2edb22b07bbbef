//! Monte-Carlo harness: configuration, per-trial signal synthesis and the
//! three receiver cases, power sweeps and CSV output.

mod config;
mod link;
mod sweep;
mod trial;

pub use config::{Case, SimConfig};
pub use link::{synthesize_data_rx, synthesize_preamble_rx, LinkModel, Stream};
pub use sweep::{
    first_floor_crossing, parse_points, quantization_floor_m2, run_sweep, write_csv, FloorProbe,
    FloorSearch, SweepAxis, SweepPoint, SweepResult,
};
pub use trial::{run_trial, run_trial_with, trial_seed, TrialOptions, TrialResult};

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Reference temperature for the noise budget, K.
pub const NOISE_TEMPERATURE_K: f64 = 290.0;
/// Receiver noise factor (linear) implied by the default noise variance.
pub const NOISE_FACTOR: f64 = 10.0;

pub fn dbm_to_watts(p_dbm: f64) -> f64 {
    10f64.powf((p_dbm - 30.0) / 10.0)
}

/// Thermal noise power `k·F·T·B` in watts.
pub fn thermal_noise_w(bandwidth_hz: f64, noise_factor: f64, temperature_k: f64) -> f64 {
    BOLTZMANN * noise_factor * temperature_k * bandwidth_hz
}
