use crate::grid::ObservationGrid;
use crate::modem::{
    build_constellation, gen_preamble, gen_sensing_symbols_with_rng, map_bits, random_bits,
    SymbolGrid,
};
use crate::range_doppler::{detect, DetectionResult};
use crate::receiver::{
    cancel_communication, equalize_and_demod, estimate_ul_csi, extract_echo, CombinerWeights,
};
use crate::Result;

use super::link::{synthesize_data_rx, synthesize_preamble_rx, LinkModel, Stream};
use super::{dbm_to_watts, Case, SimConfig};

/// Seed for trial `trial_index`. Sweep points reuse the same trial seeds, so
/// every point and every case of a sweep is evaluated on paired draws.
pub fn trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ trial_index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialOptions {
    /// Cancel the uplink with the true channel and the transmitted symbols,
    /// forcing the reconstruction error to zero.
    pub genie_cancellation: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub case: Case,
    pub seed: u64,
    pub true_range_m: f64,
    pub detection: Option<DetectionResult>,
    pub range_est_m: Option<f64>,
    pub range_sq_error_m2: Option<f64>,
    /// Absent when the case does not demodulate the uplink.
    pub bit_errors: Option<u64>,
    pub bits_total: Option<u64>,
}

impl TrialResult {
    pub fn missed(&self) -> bool {
        self.detection.is_none()
    }
}

pub fn run_trial(config: &SimConfig, seed: u64) -> Result<TrialResult> {
    run_trial_with(config, seed, TrialOptions::default())
}

pub fn run_trial_with(config: &SimConfig, seed: u64, options: TrialOptions) -> Result<TrialResult> {
    let link = LinkModel::build(config, seed)?;
    let nm = link.numerology;
    let constellation = build_constellation(config.qam_order)?;
    let noise = config.noise_var_w;
    let ul_w = match config.case {
        Case::EchoOnly => 0.0,
        _ => dbm_to_watts(config.ul_power_dbm),
    };
    let dl_w = if config.echo_enabled {
        dbm_to_watts(config.dl_power_dbm)
    } else {
        0.0
    };

    let bits = random_bits(
        &mut Stream::UplinkBits.rng(seed),
        nm.num_subcarriers * nm.num_symbols * constellation.bits_per_symbol(),
    );
    let ul_symbols = map_bits(&bits, &constellation, &nm)?;
    let sensing_symbols = gen_sensing_symbols_with_rng(&nm, &mut Stream::SensingSymbols.rng(seed));
    let rx = synthesize_data_rx(
        &link,
        ul_w,
        dl_w,
        noise,
        &ul_symbols,
        &sensing_symbols,
        seed,
    )?;

    let (cleaned, bit_errors) = match config.case {
        Case::NoCancellation | Case::EchoOnly => (rx, None),
        Case::Sic => {
            let preamble = gen_preamble(config.preamble_symbols, &nm)?;
            let preamble_rx = synthesize_preamble_rx(&link, ul_w, noise, &preamble, seed)?;
            let csi = estimate_ul_csi(&preamble_rx, &preamble, ul_w)?;
            let weights = CombinerWeights::from_csi(&csi, ul_w, noise)?;
            let demod = equalize_and_demod(&rx, &weights, &csi, ul_w, &constellation)?;
            let errors = demod
                .bits(&constellation)
                .zip(&bits)
                .filter(|(a, b)| a != *b)
                .count() as u64;
            let cleaned = if options.genie_cancellation {
                genie_cancel(rx, &link, &ul_symbols, ul_w)?
            } else {
                cancel_communication(&rx, &csi, &demod.symbols, ul_w)?
            };
            (cleaned, Some(errors))
        }
    };

    let echo = extract_echo(&cleaned, &link.sensing_rx, &sensing_symbols)?;
    let detection = detect(&echo, &nm);
    let range_est_m = detection.map(|d| d.range_m);
    Ok(TrialResult {
        case: config.case,
        seed,
        true_range_m: link.true_range_m,
        detection,
        range_est_m,
        range_sq_error_m2: range_est_m.map(|r| (r - link.true_range_m).powi(2)),
        bits_total: bit_errors.map(|_| bits.len() as u64),
        bit_errors,
    })
}

fn genie_cancel(
    mut rx: ObservationGrid,
    link: &LinkModel,
    symbols: &SymbolGrid,
    ul_power_w: f64,
) -> Result<ObservationGrid> {
    let sqrt_p = ul_power_w.sqrt();
    link.comm
        .accumulate(&mut rx, |n, m| -symbols.get(n, m) * sqrt_p)?;
    Ok(rx)
}
