//! Uplink BER of the SIC receiver against downlink power, next to the same
//! link with the echo switched off.

use cdu_jcas::harness::{parse_points, run_sweep, Case, SimConfig, SweepAxis};

fn main() -> cdu_jcas::Result<()> {
    let points = parse_points("-10:27:4")?;
    let trials = 8;
    println!("P_U dBm  P_D dBm        BER   no-echo BER");
    for ul in [13.0, 20.0] {
        let cfg = SimConfig {
            case: Case::Sic,
            ul_power_dbm: ul,
            ..SimConfig::default()
        };
        let with_echo = run_sweep(&cfg, SweepAxis::DlPower, &points, trials)?;
        let quiet = SimConfig {
            echo_enabled: false,
            ..cfg
        };
        let baseline = run_sweep(&quiet, SweepAxis::DlPower, &points[..1], trials)?;
        let b0 = baseline.points[0].ber.unwrap_or(f64::NAN);
        for p in &with_echo.points {
            println!(
                "{ul:>7.1}  {:>7.1}  {:>9.3e}   {b0:>9.3e}",
                p.axis_dbm,
                p.ber.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
