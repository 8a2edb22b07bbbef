//! Range MSE against downlink power for the three receivers, written as CSV
//! to stdout.
//!
//! ```text
//! cargo run --release --example mse_sweep -- [points] [trials] [ul_dbm]
//! ```

use cdu_jcas::harness::{
    parse_points, quantization_floor_m2, run_sweep, write_csv, Case, SimConfig, SweepAxis,
    SweepResult,
};

fn main() -> cdu_jcas::Result<()> {
    let mut args = std::env::args().skip(1);
    let points = parse_points(&args.next().unwrap_or_else(|| "20:60:5".into()))?;
    let trials: usize = args.next().map_or(50, |t| t.parse().expect("trials"));
    let ul_dbm: f64 = args.next().map_or(20.0, |u| u.parse().expect("ul power"));

    let base = SimConfig {
        ul_power_dbm: ul_dbm,
        ..SimConfig::default()
    };
    eprintln!("quantization floor {:.4} m^2", quantization_floor_m2(&base));
    let mut all = SweepResult {
        axis: SweepAxis::DlPower,
        points: Vec::new(),
    };
    for case in [Case::NoCancellation, Case::Sic, Case::EchoOnly] {
        let cfg = SimConfig {
            case,
            ..base.clone()
        };
        all.points
            .extend(run_sweep(&cfg, SweepAxis::DlPower, &points, trials)?.points);
    }
    write_csv(&all, std::io::stdout().lock())?;
    Ok(())
}
