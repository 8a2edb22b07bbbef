use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::array::{ArrayFrame, ArrayGeometry, BeamConvention};
use crate::scene::{OfdmNumerology, Scatterer, Scene};
use crate::{Error, Result};

/// Receiver variant under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Case {
    /// Conventional downlink sensing: echo processing on the raw superimposed
    /// grid, uplink left in place.
    NoCancellation,
    /// Uplink demodulation, reconstruction and cancellation before echo
    /// processing.
    Sic,
    /// No uplink transmission during the sensing window; the lower bound.
    EchoOnly,
}

impl Case {
    pub fn id(self) -> u8 {
        match self {
            Case::NoCancellation => 1,
            Case::Sic => 2,
            Case::EchoOnly => 3,
        }
    }
}

impl TryFrom<u8> for Case {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Case::NoCancellation),
            2 => Ok(Case::Sic),
            3 => Ok(Case::EchoOnly),
            _ => Err(format!("case must be 1, 2 or 3, got {v}")),
        }
    }
}

impl From<Case> for u8 {
    fn from(c: Case) -> u8 {
        c.id()
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// Every simulation parameter. Serialized as flat TOML key/value pairs;
/// missing keys take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub carrier_hz: f64,
    pub subcarrier_spacing_hz: f64,
    pub num_subcarriers: usize,
    pub num_symbols: usize,

    pub bs_position_m: [f64; 3],
    pub user_position_m: [f64; 3],
    pub user_radial_velocity_mps: f64,
    pub target_positions_m: Vec<[f64; 3]>,
    pub target_radial_velocities_mps: Vec<f64>,
    pub reflection_variance_sensing: Vec<f64>,
    pub reflection_variance_comm: Vec<f64>,
    /// Index into `target_positions_m` the sensing beam points at; its range
    /// is the ground truth for the error metric.
    pub sensing_target: usize,
    pub nlos_paths: bool,

    pub bs_rows: usize,
    pub bs_cols: usize,
    pub user_rows: usize,
    pub user_cols: usize,
    pub element_spacing_wavelengths: f64,
    pub bs_row_axis: [f64; 3],
    pub bs_col_axis: [f64; 3],
    pub bs_boresight: [f64; 3],
    pub user_row_axis: [f64; 3],
    pub user_col_axis: [f64; 3],
    pub user_boresight: [f64; 3],
    pub beam_convention: BeamConvention,
    pub c0_phase_rad: f64,

    pub noise_var_w: f64,
    pub ul_power_dbm: f64,
    pub dl_power_dbm: f64,
    /// When false the base station transmits no sensing symbols: the
    /// uplink-only reference for BER comparisons.
    pub echo_enabled: bool,
    pub qam_order: usize,
    pub preamble_symbols: usize,

    pub case: Case,
    pub trials: usize,
    pub master_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        let frame = ArrayFrame::default();
        Self {
            carrier_hz: 63.0e9,
            subcarrier_spacing_hz: 240.0e3,
            num_subcarriers: 128,
            num_symbols: 64,
            bs_position_m: [50.0, 4.75, 7.0],
            user_position_m: [140.0, 0.0, 2.0],
            user_radial_velocity_mps: 0.0,
            target_positions_m: vec![[129.0, 10.0, 5.0]],
            target_radial_velocities_mps: vec![0.0],
            reflection_variance_sensing: vec![1.0],
            reflection_variance_comm: vec![1.0],
            sensing_target: 0,
            nlos_paths: false,
            bs_rows: 8,
            bs_cols: 8,
            user_rows: 1,
            user_cols: 1,
            element_spacing_wavelengths: 0.5,
            bs_row_axis: frame.row_axis,
            bs_col_axis: frame.col_axis,
            bs_boresight: frame.boresight,
            user_row_axis: frame.row_axis,
            user_col_axis: frame.col_axis,
            user_boresight: frame.boresight,
            beam_convention: BeamConvention::Matched,
            c0_phase_rad: 0.0,
            noise_var_w: 1.2294e-12,
            ul_power_dbm: 20.0,
            dl_power_dbm: 20.0,
            echo_enabled: true,
            qam_order: 4,
            preamble_symbols: 4,
            case: Case::Sic,
            trials: 200,
            master_seed: 1,
        }
    }
}

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        self.numerology()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        self.scene()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        let targets = self.target_positions_m.len();
        if self.target_radial_velocities_mps.len() != targets
            || self.reflection_variance_sensing.len() != targets
            || self.reflection_variance_comm.len() != targets
        {
            return bad("per-target lists must all have the same length".into());
        }
        if self.sensing_target >= targets {
            return bad(format!(
                "sensing_target {} out of range",
                self.sensing_target
            ));
        }
        for (name, v) in [
            ("noise_var_w", self.noise_var_w),
            ("ul_power_dbm", self.ul_power_dbm),
            ("dl_power_dbm", self.dl_power_dbm),
            ("c0_phase_rad", self.c0_phase_rad),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        if self.noise_var_w < 0.0 {
            return bad("noise_var_w must be >= 0".into());
        }
        if !matches!(self.qam_order, 4 | 16 | 64) {
            return bad(format!("qam_order {} unsupported", self.qam_order));
        }
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.preamble_symbols == 0 {
            return bad("preamble_symbols must be >= 1".into());
        }
        self.bs_array().map_err(|e| Error::Config(e.to_string()))?;
        self.user_array()
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn numerology(&self) -> OfdmNumerology {
        OfdmNumerology {
            carrier_hz: self.carrier_hz,
            subcarrier_spacing_hz: self.subcarrier_spacing_hz,
            num_subcarriers: self.num_subcarriers,
            num_symbols: self.num_symbols,
        }
    }

    pub fn scene(&self) -> Scene {
        let scatterers = self
            .target_positions_m
            .iter()
            .enumerate()
            .map(|(i, p)| Scatterer {
                position_m: *p,
                radial_velocity_mps: self
                    .target_radial_velocities_mps
                    .get(i)
                    .copied()
                    .unwrap_or(0.0),
                reflection_variance_sensing: self
                    .reflection_variance_sensing
                    .get(i)
                    .copied()
                    .unwrap_or(1.0),
                reflection_variance_comm: self
                    .reflection_variance_comm
                    .get(i)
                    .copied()
                    .unwrap_or(1.0),
            })
            .collect();
        Scene {
            bs_position_m: self.bs_position_m,
            user_position_m: self.user_position_m,
            user_radial_velocity_mps: self.user_radial_velocity_mps,
            scatterers,
            nlos_paths: self.nlos_paths,
            bs_frame: ArrayFrame {
                row_axis: self.bs_row_axis,
                col_axis: self.bs_col_axis,
                boresight: self.bs_boresight,
            },
            user_frame: ArrayFrame {
                row_axis: self.user_row_axis,
                col_axis: self.user_col_axis,
                boresight: self.user_boresight,
            },
        }
    }

    pub fn bs_array(&self) -> Result<ArrayGeometry> {
        let lambda = self.numerology().wavelength_m();
        ArrayGeometry::new(
            self.bs_rows,
            self.bs_cols,
            self.element_spacing_wavelengths * lambda,
            lambda,
        )
    }

    pub fn user_array(&self) -> Result<ArrayGeometry> {
        let lambda = self.numerology().wavelength_m();
        ArrayGeometry::new(
            self.user_rows,
            self.user_cols,
            self.element_spacing_wavelengths * lambda,
            lambda,
        )
    }

    /// Ground-truth range of the sensed target.
    pub fn true_range_m(&self) -> f64 {
        self.scene().target_range_m(self.sensing_target)
    }
}
