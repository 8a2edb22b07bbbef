use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::array::{
    ls_transmit_beamformer_with, sensing_receive_beamformer, ArrayGeometry, Beamformer,
};
use crate::grid::{ObservationGrid, VectorGrid};
use crate::modem::SymbolGrid;
use crate::scene::{
    comm_channel, complex_gaussian, derive_paths_with_rng, partition_paths, sensing_channel,
    FactoredChannel, OfdmNumerology, PathKind, PropagationPath,
};
use crate::{Error, Result, C64};

use super::SimConfig;

/// Independent random streams inside one trial. Every case draws every
/// stream identically, so cases compared at the same trial seed see the same
/// reflection factors, sensing symbols, uplink data and noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Reflection = 0,
    UplinkBits = 1,
    SensingSymbols = 2,
    PreambleNoise = 3,
    DataNoise = 4,
}

impl Stream {
    pub fn rng(self, trial_seed: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        rng.set_stream(self as u64);
        rng
    }
}

/// Everything about one trial's propagation that does not depend on the
/// transmitted symbols.
#[derive(Debug, Clone)]
pub struct LinkModel {
    pub numerology: OfdmNumerology,
    pub bs_array: ArrayGeometry,
    pub user_array: ArrayGeometry,
    pub paths: Vec<PropagationPath>,
    pub sensing_tx: Beamformer,
    pub sensing_rx: Beamformer,
    pub user_tx: Beamformer,
    /// Uplink response over the data phase.
    pub comm: FactoredChannel,
    /// Uplink response over the preamble, symbols `−M_p .. −1`.
    pub comm_preamble: FactoredChannel,
    pub sensing: FactoredChannel,
    pub true_range_m: f64,
}

impl LinkModel {
    pub fn build(config: &SimConfig, trial_seed: u64) -> Result<Self> {
        config.validate()?;
        let numerology = config.numerology();
        let scene = config.scene();
        let bs_array = config.bs_array()?;
        let user_array = config.user_array()?;
        let mut rng = Stream::Reflection.rng(trial_seed);
        let paths = derive_paths_with_rng(&scene, &numerology, &mut rng)?;
        let (sensing_paths, comm_paths) = partition_paths(&paths);

        let c0 = C64::from_polar(1.0, config.c0_phase_rad);
        let sensing_dir = scene.target_direction(config.sensing_target)?;
        let sensing_tx =
            ls_transmit_beamformer_with(&bs_array, sensing_dir, c0, config.beam_convention)?;
        let sensing_rx = sensing_receive_beamformer(&sensing_tx);
        let los = comm_paths
            .iter()
            .find(|p| p.kind == PathKind::CommLos)
            .ok_or(Error::MissingLineOfSight)?;
        let user_tx =
            ls_transmit_beamformer_with(&user_array, los.angle_tx, c0, config.beam_convention)?;

        let comm = comm_channel(
            &comm_paths,
            &user_tx,
            &bs_array,
            &user_array,
            &numerology,
            0,
            numerology.num_symbols,
        )?;
        let mp = config.preamble_symbols;
        let comm_preamble = comm_channel(
            &comm_paths,
            &user_tx,
            &bs_array,
            &user_array,
            &numerology,
            -(mp as i64),
            mp,
        )?;
        let sensing = sensing_channel(&sensing_paths, &sensing_tx, &bs_array, &numerology)?;

        Ok(Self {
            numerology,
            bs_array,
            user_array,
            paths,
            sensing_tx,
            sensing_rx,
            user_tx,
            comm,
            comm_preamble,
            sensing,
            true_range_m: scene.target_range_m(config.sensing_target),
        })
    }
}

fn add_noise(grid: &mut VectorGrid, noise_var_w: f64, rng: &mut ChaCha8Rng) {
    for v in grid.values_mut() {
        *v += complex_gaussian(rng, noise_var_w);
    }
}

/// `y = h·√P_U·d̄ + n` over the preamble symbols.
pub fn synthesize_preamble_rx(
    link: &LinkModel,
    ul_power_w: f64,
    noise_var_w: f64,
    preamble: &SymbolGrid,
    trial_seed: u64,
) -> Result<ObservationGrid> {
    let h = &link.comm_preamble;
    let (nc, mp, dim) = h.shape();
    if preamble.shape() != (nc, mp) {
        return Err(Error::DimensionMismatch(
            "preamble length vs link model".into(),
        ));
    }
    let mut y = VectorGrid::zeros(nc, mp, dim);
    add_noise(
        &mut y,
        noise_var_w,
        &mut Stream::PreambleNoise.rng(trial_seed),
    );
    let sqrt_p = ul_power_w.sqrt();
    h.accumulate(&mut y, |n, m| preamble.get(n, m) * sqrt_p)?;
    Ok(y)
}

/// `y = h_C·√P_U·d + h_S·√P_D·s + n` over the data phase.
pub fn synthesize_data_rx(
    link: &LinkModel,
    ul_power_w: f64,
    dl_power_w: f64,
    noise_var_w: f64,
    ul_symbols: &SymbolGrid,
    sensing_symbols: &SymbolGrid,
    trial_seed: u64,
) -> Result<ObservationGrid> {
    let (nc, ms, dim) = link.comm.shape();
    if ul_symbols.shape() != (nc, ms) || sensing_symbols.shape() != (nc, ms) {
        return Err(Error::DimensionMismatch(
            "symbol grids vs link model".into(),
        ));
    }
    let mut y = VectorGrid::zeros(nc, ms, dim);
    add_noise(&mut y, noise_var_w, &mut Stream::DataNoise.rng(trial_seed));
    // a silent transmitter adds exact zeros, so skipping it changes nothing
    if ul_power_w > 0.0 {
        let su = ul_power_w.sqrt();
        link.comm
            .accumulate(&mut y, |n, m| ul_symbols.get(n, m) * su)?;
    }
    if dl_power_w > 0.0 {
        let sd = dl_power_w.sqrt();
        link.sensing
            .accumulate(&mut y, |n, m| sensing_symbols.get(n, m) * sd)?;
    }
    Ok(y)
}
