//! Range-Doppler map of a synthetic on-grid echo, with the peak neighbourhood
//! printed and the estimates converted back to range and velocity.

use std::f64::consts::PI;

use cdu_jcas::range_doppler::{bins_to_estimates, compute_map, find_peak};
use cdu_jcas::receiver::EchoResponseGrid;
use cdu_jcas::scene::OfdmNumerology;
use cdu_jcas::C64;

fn main() -> cdu_jcas::Result<()> {
    let nm = OfdmNumerology::default();
    let (nc, ms) = (nm.num_subcarriers, nm.num_symbols);
    let (range_bin, doppler_bin) = (16usize, -5i64);
    let values = (0..nc)
        .flat_map(|n| (0..ms).map(move |m| (n, m)))
        .map(|(n, m)| {
            let phase = -2.0 * PI * (n * range_bin) as f64 / nc as f64
                + 2.0 * PI * (m as i64 * doppler_bin) as f64 / ms as f64;
            C64::from_polar(0.7, phase + 0.3)
        })
        .collect();
    let echo = EchoResponseGrid::from_vec(nc, ms, values)?;

    let map = compute_map(&echo);
    let peak = find_peak(&map).expect("non-empty map");
    println!(
        "peak at range bin {}, doppler bin {}, |.| {:.4}",
        peak.range_bin, peak.doppler_bin, peak.magnitude
    );
    for r in peak.range_bin - 2..=peak.range_bin + 2 {
        let row: Vec<String> = (0..5)
            .map(|k| (peak.doppler_bin + ms - 2 + k) % ms)
            .map(|d| format!("{:7.3}", map.get(r, d)))
            .collect();
        println!("  r{r:<3} {}", row.join(" "));
    }
    let est = bins_to_estimates(peak, &nm);
    println!(
        "range {:.4} m (resolution {:.4} m), velocity {:.4} m/s (resolution {:.4} m/s)",
        est.range_m,
        nm.range_resolution_m(),
        est.radial_velocity_mps,
        nm.velocity_resolution_mps()
    );
    Ok(())
}
