//! Link-level simulator for concurrent downlink and uplink (CDU) joint
//! communication and sensing.
//!
//! A base station transmits dedicated OFDM sensing symbols while it receives
//! uplink data from a user on a second, co-located array. The received grid is
//! the superposition of the uplink signal and the sensing echo. The receiver
//! demodulates the uplink first, reconstructs and subtracts it, then forms the
//! echo response and runs range-Doppler processing on what remains.
//!
//! Module map:
//!
//! - [`array`]: planar array steering vectors and least-squares beamformers.
//! - [`scene`]: geometry to propagation paths, and per-subcarrier channel grids.
//! - [`modem`]: QAM, preamble and sensing symbol generation, ML demapping.
//! - [`receiver`]: CSI estimation, MMSE combining, SIC and echo extraction.
//! - [`range_doppler`]: 2D transform, peak picking, range/velocity inversion.
//! - [`harness`]: configuration, trial assembly, Monte-Carlo sweeps, CSV.
//! - [`cli`]: the `cdu-sim` command line front end.

pub mod array;
pub mod cli;
pub mod error;
pub mod grid;
pub mod harness;
pub mod modem;
pub mod range_doppler;
pub mod receiver;
pub mod scene;

pub use error::{Error, Result};

/// Complex baseband sample type used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Propagation speed in m/s. The round figure keeps range bins at exact
/// multiples of `c / (2 N Δf)` for the default numerology.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;
