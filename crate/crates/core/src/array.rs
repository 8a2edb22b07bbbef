//! Uniform planar array (UPA) geometry, steering vectors and least-squares
//! beamformers.
//!
//! Element `(p, q)` sits at `(p·d, q·d)` in the array plane and its phase
//! relative to element `(0, 0)` toward direction `(φ, θ)` is
//! `exp(−j·2π/λ·d·(p·cosφ·sinθ + q·sinφ·sinθ))`. Vectors are stacked with `p`
//! as the outer index: element `(p, q)` lives at position `p·Q + q`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::grid::dot;
use crate::{Error, Result, C64};

/// 2D direction: azimuth `φ ∈ [−π, π)`, elevation `θ ∈ [0, π]` measured from
/// the array boresight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Angle2D {
    pub azimuth_rad: f64,
    pub elevation_rad: f64,
}

impl Angle2D {
    pub fn new(azimuth_rad: f64, elevation_rad: f64) -> Result<Self> {
        if !(azimuth_rad.is_finite() && elevation_rad.is_finite()) {
            return Err(Error::InvalidParameter("non-finite angle".into()));
        }
        if !(-PI..PI).contains(&azimuth_rad) {
            return Err(Error::InvalidParameter(format!(
                "azimuth {azimuth_rad} outside [-pi, pi)"
            )));
        }
        if !(0.0..=PI).contains(&elevation_rad) {
            return Err(Error::InvalidParameter(format!(
                "elevation {elevation_rad} outside [0, pi]"
            )));
        }
        Ok(Self {
            azimuth_rad,
            elevation_rad,
        })
    }

    /// Boresight, `θ = 0`.
    pub fn boresight() -> Self {
        Self {
            azimuth_rad: 0.0,
            elevation_rad: 0.0,
        }
    }

    /// Projections of the unit direction onto the row and column axes of the
    /// array: `(cosφ·sinθ, sinφ·sinθ)`.
    pub fn planar_components(&self) -> (f64, f64) {
        let s = self.elevation_rad.sin();
        (self.azimuth_rad.cos() * s, self.azimuth_rad.sin() * s)
    }
}

/// Orientation of an array in the global frame, given as three orthonormal
/// axes. Element rows (`p`) advance along `row_axis`, columns (`q`) along
/// `col_axis`; elevation is measured from `boresight`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayFrame {
    pub row_axis: [f64; 3],
    pub col_axis: [f64; 3],
    pub boresight: [f64; 3],
}

impl Default for ArrayFrame {
    /// Boresight along global +x, rows along +y, columns along +z.
    fn default() -> Self {
        Self {
            row_axis: [0.0, 1.0, 0.0],
            col_axis: [0.0, 0.0, 1.0],
            boresight: [1.0, 0.0, 0.0],
        }
    }
}

impl ArrayFrame {
    pub fn validate(&self) -> Result<()> {
        let axes = [self.row_axis, self.col_axis, self.boresight];
        for (i, a) in axes.iter().enumerate() {
            if (dot3(a, a) - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "array axis {i} is not unit length"
                )));
            }
            for b in &axes[i + 1..] {
                if dot3(a, b).abs() > 1e-9 {
                    return Err(Error::InvalidParameter(
                        "array axes are not orthogonal".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Direction of the global vector `v` seen from this array.
    pub fn angle_of(&self, v: [f64; 3]) -> Result<Angle2D> {
        let r = dot3(&v, &v).sqrt();
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::DegenerateGeometry("zero-length direction".into()));
        }
        let u = [v[0] / r, v[1] / r, v[2] / r];
        let x = dot3(&u, &self.row_axis);
        let y = dot3(&u, &self.col_axis);
        let z = dot3(&u, &self.boresight).clamp(-1.0, 1.0);
        let elevation = z.acos();
        let mut azimuth = if x == 0.0 && y == 0.0 {
            0.0
        } else {
            y.atan2(x)
        };
        if azimuth >= PI {
            azimuth -= 2.0 * PI;
        }
        Angle2D::new(azimuth, elevation)
    }
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub rows: usize,
    pub cols: usize,
    pub element_spacing_m: f64,
    pub wavelength_m: f64,
}

impl ArrayGeometry {
    pub fn new(
        rows: usize,
        cols: usize,
        element_spacing_m: f64,
        wavelength_m: f64,
    ) -> Result<Self> {
        let g = Self {
            rows,
            cols,
            element_spacing_m,
            wavelength_m,
        };
        g.validate()?;
        Ok(g)
    }

    /// Half-wavelength element spacing.
    pub fn half_wavelength(rows: usize, cols: usize, wavelength_m: f64) -> Result<Self> {
        Self::new(rows, cols, wavelength_m / 2.0, wavelength_m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::InvalidParameter(
                "array needs at least one row and column".into(),
            ));
        }
        if !(self.element_spacing_m > 0.0 && self.element_spacing_m.is_finite()) {
            return Err(Error::InvalidParameter(
                "element spacing must be positive".into(),
            ));
        }
        if !(self.wavelength_m > 0.0 && self.wavelength_m.is_finite()) {
            return Err(Error::InvalidParameter(
                "wavelength must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn num_elements(&self) -> usize {
        self.rows * self.cols
    }
}

/// Array response `a(p)`; unit-modulus entries in `(p, q)` row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    pub values: Vec<C64>,
}

impl SteeringVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.values
    }
}

pub fn steering_element(geom: &ArrayGeometry, angle: Angle2D, p: usize, q: usize) -> Result<C64> {
    if p >= geom.rows || q >= geom.cols {
        return Err(Error::IndexOutOfRange {
            p,
            q,
            rows: geom.rows,
            cols: geom.cols,
        });
    }
    let (u, v) = angle.planar_components();
    Ok(element_phase(geom, u, v, p, q))
}

#[inline]
fn element_phase(geom: &ArrayGeometry, u: f64, v: f64, p: usize, q: usize) -> C64 {
    let k = 2.0 * PI / geom.wavelength_m * geom.element_spacing_m;
    C64::from_polar(1.0, -k * (p as f64 * u + q as f64 * v))
}

pub fn steering_vector(geom: &ArrayGeometry, angle: Angle2D) -> SteeringVector {
    let (u, v) = angle.planar_components();
    let values = (0..geom.rows)
        .flat_map(|p| (0..geom.cols).map(move |q| (p, q)))
        .map(|(p, q)| element_phase(geom, u, v, p, q))
        .collect();
    SteeringVector { values }
}

/// How the least-squares transmit beamformer is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamConvention {
    /// `w = c0·a*(p)/(P·Q)`, so that `aᵀ(p)·w = c0` under the `a·aᵀ` channel
    /// convention.
    #[default]
    Matched,
    /// `w = c0·[aᴴ(p)]† = c0·a(p)/(P·Q)`. Gain at the pointed direction is
    /// `aᵀa/(P·Q)`, which is not unit magnitude off boresight.
    PseudoInverse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    pub weights: Vec<C64>,
    pub pointed_direction: Angle2D,
    pub phase_factor_c0: C64,
}

impl Beamformer {
    /// `aᵀ(direction)·w`, the gain this beamformer puts toward `direction`
    /// when used for transmission.
    pub fn transmit_gain(&self, geom: &ArrayGeometry, direction: Angle2D) -> C64 {
        dot(steering_vector(geom, direction).as_slice(), &self.weights)
    }

    /// `wᴴ·a(direction)`, the gain for reception.
    pub fn receive_gain(&self, geom: &ArrayGeometry, direction: Angle2D) -> C64 {
        crate::grid::inner(&self.weights, steering_vector(geom, direction).as_slice())
    }
}

pub fn ls_transmit_beamformer(
    geom: &ArrayGeometry,
    direction: Angle2D,
    c0: C64,
) -> Result<Beamformer> {
    ls_transmit_beamformer_with(geom, direction, c0, BeamConvention::Matched)
}

pub fn ls_transmit_beamformer_with(
    geom: &ArrayGeometry,
    direction: Angle2D,
    c0: C64,
    convention: BeamConvention,
) -> Result<Beamformer> {
    if (c0.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "|c0| = {} is not 1",
            c0.norm()
        )));
    }
    let a = steering_vector(geom, direction);
    let scale = c0 / geom.num_elements() as f64;
    let weights = match convention {
        BeamConvention::Matched => a.values.iter().map(|x| x.conj() * scale).collect(),
        BeamConvention::PseudoInverse => a.values.iter().map(|x| x * scale).collect(),
    };
    Ok(Beamformer {
        weights,
        pointed_direction: direction,
        phase_factor_c0: c0,
    })
}

/// Mono-static echo receive beamformer: `w_RX = (w_TX)*`.
pub fn sensing_receive_beamformer(tx: &Beamformer) -> Beamformer {
    Beamformer {
        weights: tx.weights.iter().map(|w| w.conj()).collect(),
        pointed_direction: tx.pointed_direction,
        phase_factor_c0: tx.phase_factor_c0,
    }
}
