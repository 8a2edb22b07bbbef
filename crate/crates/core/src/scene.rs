//! Scene geometry, propagation paths and frequency-domain channel grids.
//!
//! All channel grids are stored after transmit precoding: cell `(n, m)` holds
//! `H_{n,m}·w_TX`, a vector over the receive array.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::array::{steering_vector, Angle2D, ArrayFrame, ArrayGeometry, Beamformer};
use crate::grid::{dot, ChannelGrid, VectorGrid};
use crate::{Error, Result, C64, SPEED_OF_LIGHT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OfdmNumerology {
    pub carrier_hz: f64,
    pub subcarrier_spacing_hz: f64,
    pub num_subcarriers: usize,
    pub num_symbols: usize,
}

impl Default for OfdmNumerology {
    fn default() -> Self {
        Self {
            carrier_hz: 63.0e9,
            subcarrier_spacing_hz: 240.0e3,
            num_subcarriers: 128,
            num_symbols: 64,
        }
    }
}

impl OfdmNumerology {
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_hz > 0.0 && self.carrier_hz.is_finite()) {
            return Err(Error::InvalidParameter(
                "carrier frequency must be positive".into(),
            ));
        }
        if !(self.subcarrier_spacing_hz > 0.0 && self.subcarrier_spacing_hz.is_finite()) {
            return Err(Error::InvalidParameter(
                "subcarrier spacing must be positive".into(),
            ));
        }
        if !self.num_subcarriers.is_power_of_two() || !self.num_symbols.is_power_of_two() {
            return Err(Error::InvalidParameter(
                "subcarrier and symbol counts must be powers of two".into(),
            ));
        }
        Ok(())
    }

    /// `T_s = 1/Δf`; the repeated sensing symbol acts as the cyclic prefix, so
    /// no guard interval is added to the symbol clock.
    pub fn symbol_duration_s(&self) -> f64 {
        1.0 / self.subcarrier_spacing_hz
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.num_subcarriers as f64 * self.subcarrier_spacing_hz
    }

    /// Range bin width `c / (2 N Δf)`.
    pub fn range_resolution_m(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.bandwidth_hz())
    }

    /// Velocity bin width `λ / (2 M T_s)`.
    pub fn velocity_resolution_mps(&self) -> f64 {
        self.wavelength_m() / (2.0 * self.num_symbols as f64 * self.symbol_duration_s())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scatterer {
    pub position_m: [f64; 3],
    /// Positive when receding from the base station.
    #[serde(default)]
    pub radial_velocity_mps: f64,
    #[serde(default = "unit")]
    pub reflection_variance_sensing: f64,
    #[serde(default = "unit")]
    pub reflection_variance_comm: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub bs_position_m: [f64; 3],
    pub user_position_m: [f64; 3],
    #[serde(default)]
    pub user_radial_velocity_mps: f64,
    pub scatterers: Vec<Scatterer>,
    /// Add one uplink NLoS path per scatterer. Off by default: the link is
    /// LoS-dominated at mmWave.
    #[serde(default)]
    pub nlos_paths: bool,
    #[serde(default)]
    pub bs_frame: ArrayFrame,
    #[serde(default)]
    pub user_frame: ArrayFrame,
}

impl Default for Scene {
    fn default() -> Self {
        Self {
            bs_position_m: [50.0, 4.75, 7.0],
            user_position_m: [140.0, 0.0, 2.0],
            user_radial_velocity_mps: 0.0,
            scatterers: vec![Scatterer {
                position_m: [129.0, 10.0, 5.0],
                radial_velocity_mps: 0.0,
                reflection_variance_sensing: 1.0,
                reflection_variance_comm: 1.0,
            }],
            nlos_paths: false,
            bs_frame: ArrayFrame::default(),
            user_frame: ArrayFrame::default(),
        }
    }
}

impl Scene {
    pub fn validate(&self) -> Result<()> {
        let finite = |p: &[f64; 3]| p.iter().all(|x| x.is_finite());
        if !finite(&self.bs_position_m) || !finite(&self.user_position_m) {
            return Err(Error::InvalidParameter("non-finite position".into()));
        }
        if self.scatterers.is_empty() {
            return Err(Error::InvalidParameter(
                "scene needs at least one sensing scatterer".into(),
            ));
        }
        for s in &self.scatterers {
            if !finite(&s.position_m) || !s.radial_velocity_mps.is_finite() {
                return Err(Error::InvalidParameter("non-finite scatterer".into()));
            }
            if !(s.reflection_variance_sensing >= 0.0 && s.reflection_variance_comm >= 0.0) {
                return Err(Error::InvalidParameter(
                    "reflection variances must be >= 0".into(),
                ));
            }
        }
        self.bs_frame.validate()?;
        self.user_frame.validate()?;
        Ok(())
    }

    /// Distance from the base station to scatterer `i`.
    pub fn target_range_m(&self, i: usize) -> f64 {
        distance(&self.bs_position_m, &self.scatterers[i].position_m)
    }

    pub fn user_range_m(&self) -> f64 {
        distance(&self.bs_position_m, &self.user_position_m)
    }

    /// Direction of scatterer `i` seen from the base station array.
    pub fn target_direction(&self, i: usize) -> Result<Angle2D> {
        self.bs_frame
            .angle_of(sub(&self.scatterers[i].position_m, &self.bs_position_m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathKind {
    SensingEcho,
    CommLos,
    CommNlos,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationPath {
    pub kind: PathKind,
    pub angle_tx: Angle2D,
    pub angle_rx: Angle2D,
    pub delay_s: f64,
    pub doppler_hz: f64,
    pub amplitude: C64,
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = sub(a, b);
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

fn checked_distance(a: &[f64; 3], b: &[f64; 3], what: &str) -> Result<f64> {
    let d = distance(a, b);
    if d > 0.0 {
        Ok(d)
    } else {
        Err(Error::DegenerateGeometry(format!("{what} coincide")))
    }
}

/// One draw of `CN(0, variance)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

/// Derives propagation paths with reflection factors drawn from a generator
/// seeded by `rng_seed`.
pub fn derive_paths(
    scene: &Scene,
    numerology: &OfdmNumerology,
    rng_seed: u64,
) -> Result<Vec<PropagationPath>> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    derive_paths_with_rng(scene, numerology, &mut rng)
}

/// Sensing echoes (one per scatterer), then the uplink LoS path, then NLoS
/// paths if enabled. Two reflection factors are drawn per scatterer, sensing
/// first, whether or not NLoS paths are enabled.
pub fn derive_paths_with_rng<R: Rng + ?Sized>(
    scene: &Scene,
    numerology: &OfdmNumerology,
    rng: &mut R,
) -> Result<Vec<PropagationPath>> {
    scene.validate()?;
    numerology.validate()?;
    let lambda = numerology.wavelength_m();
    let four_pi = 4.0 * PI;
    let bs = &scene.bs_position_m;
    let ue = &scene.user_position_m;

    let draws: Vec<(C64, C64)> = scene
        .scatterers
        .iter()
        .map(|s| {
            let bs_ = complex_gaussian(rng, s.reflection_variance_sensing);
            let bc = complex_gaussian(rng, s.reflection_variance_comm);
            (bs_, bc)
        })
        .collect();

    let mut paths = Vec::with_capacity(2 * scene.scatterers.len() + 1);
    for (s, (beta_s, _)) in scene.scatterers.iter().zip(&draws) {
        let d = checked_distance(bs, &s.position_m, "base station and scatterer")?;
        let angle = scene.bs_frame.angle_of(sub(&s.position_m, bs))?;
        let gain = (lambda * lambda / (four_pi.powi(3) * d.powi(4))).sqrt();
        paths.push(PropagationPath {
            kind: PathKind::SensingEcho,
            angle_tx: angle,
            angle_rx: angle,
            delay_s: 2.0 * d / SPEED_OF_LIGHT,
            doppler_hz: 2.0 * s.radial_velocity_mps / lambda,
            amplitude: beta_s * gain,
        });
    }

    let d0 = checked_distance(bs, ue, "base station and user")?;
    paths.push(PropagationPath {
        kind: PathKind::CommLos,
        angle_tx: scene.user_frame.angle_of(sub(bs, ue))?,
        angle_rx: scene.bs_frame.angle_of(sub(ue, bs))?,
        delay_s: d0 / SPEED_OF_LIGHT,
        doppler_hz: scene.user_radial_velocity_mps / lambda,
        amplitude: C64::new(lambda / (four_pi * d0), 0.0),
    });

    if scene.nlos_paths {
        for (s, (_, beta_c)) in scene.scatterers.iter().zip(&draws) {
            let d1 = checked_distance(ue, &s.position_m, "user and scatterer")?;
            let d2 = checked_distance(&s.position_m, bs, "scatterer and base station")?;
            let gain = (lambda * lambda / (four_pi.powi(3) * d1 * d1 * d2 * d2)).sqrt();
            paths.push(PropagationPath {
                kind: PathKind::CommNlos,
                angle_tx: scene.user_frame.angle_of(sub(&s.position_m, ue))?,
                angle_rx: scene.bs_frame.angle_of(sub(&s.position_m, bs))?,
                delay_s: (d1 + d2) / SPEED_OF_LIGHT,
                // both hops see the scatterer's motion once, plus the user's own
                doppler_hz: (scene.user_radial_velocity_mps + s.radial_velocity_mps) / lambda,
                amplitude: beta_c * gain,
            });
        }
    }
    Ok(paths)
}

#[derive(Debug, Clone, PartialEq)]
struct PathTerm {
    /// `b·a(p_RX)·(aᵀ(p_TX)·w)`
    spatial: Vec<C64>,
    delay: Vec<C64>,
    doppler: Vec<C64>,
}

/// A channel kept as a sum of rank-one path terms,
/// `h[n,m] = Σ b·e^{j2π f m T}·e^{−j2π n Δf τ}·a(p_RX)·(aᵀ(p_TX)·w)`.
/// Cheaper to apply than a materialized [`ChannelGrid`] of the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredChannel {
    num_subcarriers: usize,
    num_symbols: usize,
    dim: usize,
    terms: Vec<PathTerm>,
}

impl FactoredChannel {
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.num_subcarriers, self.num_symbols, self.dim)
    }

    pub fn num_paths(&self) -> usize {
        self.terms.len()
    }

    /// Writes `h[n,m]` into `out`.
    pub fn response_into(&self, n: usize, m: usize, out: &mut [C64]) {
        out.fill(C64::new(0.0, 0.0));
        for t in &self.terms {
            let phase = t.delay[n] * t.doppler[m];
            for (o, s) in out.iter_mut().zip(&t.spatial) {
                *o += s * phase;
            }
        }
    }

    /// `grid[n,m] += h[n,m]·x[n,m]` with `x` given per cell.
    pub fn accumulate<F>(&self, grid: &mut VectorGrid, mut x: F) -> Result<()>
    where
        F: FnMut(usize, usize) -> C64,
    {
        if grid.shape() != self.shape() {
            return Err(Error::DimensionMismatch(format!(
                "grid {:?} vs channel {:?}",
                grid.shape(),
                self.shape()
            )));
        }
        for n in 0..self.num_subcarriers {
            for m in 0..self.num_symbols {
                let xm = x(n, m);
                let cell = grid.cell_mut(n, m);
                for t in &self.terms {
                    let phase = t.delay[n] * t.doppler[m] * xm;
                    for (c, s) in cell.iter_mut().zip(&t.spatial) {
                        *c += s * phase;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_grid(&self) -> ChannelGrid {
        let mut grid = VectorGrid::zeros(self.num_subcarriers, self.num_symbols, self.dim);
        self.accumulate(&mut grid, |_, _| C64::new(1.0, 0.0))
            .expect("grid built with the channel's own shape");
        grid
    }
}

fn factor(
    paths: &[&PropagationPath],
    rx_geom: &ArrayGeometry,
    tx_geom: &ArrayGeometry,
    tx_weights: &[C64],
    numerology: &OfdmNumerology,
    first_symbol: i64,
    num_symbols: usize,
) -> Result<FactoredChannel> {
    if tx_weights.len() != tx_geom.num_elements() {
        return Err(Error::DimensionMismatch(format!(
            "beamformer has {} weights for a {}-element array",
            tx_weights.len(),
            tx_geom.num_elements()
        )));
    }
    let nc = numerology.num_subcarriers;
    let df = numerology.subcarrier_spacing_hz;
    let ts = numerology.symbol_duration_s();
    let terms = paths
        .iter()
        .map(|p| {
            let precoded = dot(steering_vector(tx_geom, p.angle_tx).as_slice(), tx_weights);
            let coeff = p.amplitude * precoded;
            let spatial = steering_vector(rx_geom, p.angle_rx)
                .values
                .into_iter()
                .map(|a| a * coeff)
                .collect();
            let delay = (0..nc)
                .map(|n| C64::from_polar(1.0, -2.0 * PI * n as f64 * df * p.delay_s))
                .collect();
            let doppler = (0..num_symbols)
                .map(|m| {
                    let t = (first_symbol + m as i64) as f64 * ts;
                    C64::from_polar(1.0, 2.0 * PI * p.doppler_hz * t)
                })
                .collect();
            PathTerm {
                spatial,
                delay,
                doppler,
            }
        })
        .collect();
    Ok(FactoredChannel {
        num_subcarriers: nc,
        num_symbols,
        dim: rx_geom.num_elements(),
        terms,
    })
}

/// Echo channel after transmit beamforming, in factored form.
pub fn sensing_channel(
    paths: &[PropagationPath],
    tx_beamformer: &Beamformer,
    geom: &ArrayGeometry,
    numerology: &OfdmNumerology,
) -> Result<FactoredChannel> {
    if let Some(p) = paths.iter().find(|p| p.kind != PathKind::SensingEcho) {
        return Err(Error::InvalidParameter(format!(
            "sensing grid given a {:?} path",
            p.kind
        )));
    }
    let refs: Vec<&PropagationPath> = paths.iter().collect();
    factor(
        &refs,
        geom,
        geom,
        &tx_beamformer.weights,
        numerology,
        0,
        numerology.num_symbols,
    )
}

/// Echo channel after transmit beamforming, one receive-array vector per cell.
pub fn sensing_channel_grid(
    paths: &[PropagationPath],
    tx_beamformer: &Beamformer,
    geom: &ArrayGeometry,
    numerology: &OfdmNumerology,
) -> Result<ChannelGrid> {
    Ok(sensing_channel(paths, tx_beamformer, geom, numerology)?.to_grid())
}

/// Uplink channel after the user's transmit beamformer over the data phase.
pub fn comm_channel_grid(
    paths: &[PropagationPath],
    tx_beamformer: &Beamformer,
    geom_bs: &ArrayGeometry,
    geom_user: &ArrayGeometry,
    numerology: &OfdmNumerology,
) -> Result<ChannelGrid> {
    comm_channel_span(
        paths,
        tx_beamformer,
        geom_bs,
        geom_user,
        numerology,
        0,
        numerology.num_symbols,
    )
}

/// Uplink channel over an arbitrary symbol span, in factored form. The
/// preamble occupies negative symbol indices immediately before the data
/// phase.
pub fn comm_channel(
    paths: &[PropagationPath],
    tx_beamformer: &Beamformer,
    geom_bs: &ArrayGeometry,
    geom_user: &ArrayGeometry,
    numerology: &OfdmNumerology,
    first_symbol: i64,
    num_symbols: usize,
) -> Result<FactoredChannel> {
    if let Some(p) = paths.iter().find(|p| p.kind == PathKind::SensingEcho) {
        return Err(Error::InvalidParameter(format!(
            "uplink grid given a {:?} path",
            p.kind
        )));
    }
    if !paths.first().is_some_and(|p| p.kind == PathKind::CommLos) {
        return Err(Error::MissingLineOfSight);
    }
    let refs: Vec<&PropagationPath> = paths.iter().collect();
    factor(
        &refs,
        geom_bs,
        geom_user,
        &tx_beamformer.weights,
        numerology,
        first_symbol,
        num_symbols,
    )
}

/// Materialized form of [`comm_channel`].
pub fn comm_channel_span(
    paths: &[PropagationPath],
    tx_beamformer: &Beamformer,
    geom_bs: &ArrayGeometry,
    geom_user: &ArrayGeometry,
    numerology: &OfdmNumerology,
    first_symbol: i64,
    num_symbols: usize,
) -> Result<ChannelGrid> {
    Ok(comm_channel(
        paths,
        tx_beamformer,
        geom_bs,
        geom_user,
        numerology,
        first_symbol,
        num_symbols,
    )?
    .to_grid())
}

/// Splits a path list into (sensing, uplink) preserving order.
pub fn partition_paths(paths: &[PropagationPath]) -> (Vec<PropagationPath>, Vec<PropagationPath>) {
    paths.iter().partition(|p| p.kind == PathKind::SensingEcho)
}
