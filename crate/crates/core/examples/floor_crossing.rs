//! Finds the downlink power at which each receiver reaches the range
//! quantization floor, and the resulting power gaps between cases.
//!
//! ```text
//! cargo run --release --example floor_crossing -- [trials] [ul_dbm ...]
//! ```

use cdu_jcas::harness::{
    first_floor_crossing, parse_points, quantization_floor_m2, Case, SimConfig, SweepAxis,
};

fn main() -> cdu_jcas::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials: usize = args.next().map_or(200, |a| a.parse().expect("trials"));
    let mut ul: Vec<f64> = args.map(|a| a.parse().expect("ul power")).collect();
    if ul.is_empty() {
        ul = vec![20.0, 13.0];
    }

    let base = SimConfig::default();
    let floor = quantization_floor_m2(&base);
    let points = parse_points("-10:100:1")?;
    println!("floor {floor:.6} m^2, {trials} trials per point");

    let crossing = |case: Case, ul_dbm: f64| -> cdu_jcas::Result<Option<f64>> {
        let cfg = SimConfig {
            case,
            ul_power_dbm: ul_dbm,
            ..base.clone()
        };
        let t = std::time::Instant::now();
        let s = first_floor_crossing(&cfg, SweepAxis::DlPower, &points, trials, floor, 0.1)?;
        let run: usize = s.probes.iter().map(|p| p.point.trials).sum();
        println!(
            "  case {case} P_U {ul_dbm} dBm: crossing {:?} dBm ({run} trials, {:.1?})",
            s.crossing_dbm,
            t.elapsed()
        );
        Ok(s.crossing_dbm)
    };

    let c3 = crossing(Case::EchoOnly, 0.0)?;
    for &u in &ul {
        let c1 = crossing(Case::NoCancellation, u)?;
        let c2 = crossing(Case::Sic, u)?;
        if let (Some(c1), Some(c2), Some(c3)) = (c1, c2, c3) {
            println!(
                "P_U {u} dBm: case1-case2 {} dB, case2-case3 {} dB, case1-case3 {} dB",
                c1 - c2,
                c2 - c3,
                c1 - c3
            );
        }
    }
    Ok(())
}
