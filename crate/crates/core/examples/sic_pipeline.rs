//! One trial of the successive-interference-cancellation receiver, step by
//! step: preamble CSI, MMSE combining, demodulation, cancellation, echo
//! extraction and range-Doppler detection.
//!
//! ```text
//! cargo run --release --example sic_pipeline -- [dl_dbm] [ul_dbm] [seed]
//! ```

use cdu_jcas::grid::norm_sqr;
use cdu_jcas::harness::{
    dbm_to_watts, synthesize_data_rx, synthesize_preamble_rx, LinkModel, SimConfig, Stream,
};
use cdu_jcas::modem::{
    build_constellation, gen_preamble, gen_sensing_symbols_with_rng, map_bits, random_bits,
};
use cdu_jcas::range_doppler::detect;
use cdu_jcas::receiver::{
    cancel_communication, equalize_and_demod, estimate_ul_csi, extract_echo, CombinerWeights,
};
use cdu_jcas::C64;

fn main() -> cdu_jcas::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("number"))
        .collect();
    let cfg = SimConfig {
        dl_power_dbm: args.first().copied().unwrap_or(45.0),
        ul_power_dbm: args.get(1).copied().unwrap_or(20.0),
        ..SimConfig::default()
    };
    let seed = args.get(2).map_or(1, |&s| s as u64);
    let (ul_w, dl_w, noise) = (
        dbm_to_watts(cfg.ul_power_dbm),
        dbm_to_watts(cfg.dl_power_dbm),
        cfg.noise_var_w,
    );

    let link = LinkModel::build(&cfg, seed)?;
    let nm = link.numerology;
    let qam = build_constellation(cfg.qam_order)?;
    println!(
        "P_D {} dBm, P_U {} dBm, true range {:.4} m",
        cfg.dl_power_dbm, cfg.ul_power_dbm, link.true_range_m
    );

    let preamble = gen_preamble(cfg.preamble_symbols, &nm)?;
    let preamble_rx = synthesize_preamble_rx(&link, ul_w, noise, &preamble, seed)?;
    let csi = estimate_ul_csi(&preamble_rx, &preamble, ul_w)?;
    let mut h = vec![C64::new(0.0, 0.0); link.bs_array.num_elements()];
    link.comm.response_into(0, 0, &mut h);
    let err: f64 = h
        .iter()
        .zip(csi.response(0))
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    println!(
        "CSI: |h|^2 {:.4e}, |h - h_hat|^2 {:.4e} on subcarrier 0",
        norm_sqr(&h),
        err
    );

    let bits = random_bits(
        &mut Stream::UplinkBits.rng(seed),
        nm.num_subcarriers * nm.num_symbols * qam.bits_per_symbol(),
    );
    let data = map_bits(&bits, &qam, &nm)?;
    let sensing = gen_sensing_symbols_with_rng(&nm, &mut Stream::SensingSymbols.rng(seed));
    let rx = synthesize_data_rx(&link, ul_w, dl_w, noise, &data, &sensing, seed)?;

    let weights = CombinerWeights::from_csi(&csi, ul_w, noise)?;
    let demod = equalize_and_demod(&rx, &weights, &csi, ul_w, &qam)?;
    let bit_errors = demod.bits(&qam).zip(&bits).filter(|(a, b)| a != *b).count();
    println!("uplink: {bit_errors} bit errors in {} bits", bits.len());

    let cleaned = cancel_communication(&rx, &csi, &demod.symbols, ul_w)?;
    let power = |g: &cdu_jcas::grid::VectorGrid| {
        g.values().iter().map(|z| z.norm_sqr()).sum::<f64>() / g.values().len() as f64
    };
    println!(
        "mean power per entry: received {:.4e}, after cancellation {:.4e}, noise {noise:.4e}",
        power(&rx),
        power(&cleaned)
    );

    for (label, grid) in [
        ("without cancellation", &rx),
        ("with cancellation", &cleaned),
    ] {
        let echo = extract_echo(grid, &link.sensing_rx, &sensing)?;
        match detect(&echo, &nm) {
            Some(d) => println!(
                "{label}: bin ({}, {}), range {:.3} m, velocity {:.3} m/s",
                d.range_bin, d.doppler_bin, d.range_m, d.radial_velocity_mps
            ),
            None => println!("{label}: no detection"),
        }
    }
    Ok(())
}
