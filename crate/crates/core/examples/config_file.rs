//! Writes the default configuration as TOML, edits a few keys, loads it back
//! and runs a short sweep from it.

use cdu_jcas::harness::{run_sweep, Case, SimConfig, SweepAxis};

fn main() -> cdu_jcas::Result<()> {
    let text = SimConfig::default().to_toml_string();
    println!("--- default config ---\n{text}");

    let dir = std::env::temp_dir().join("cdu-jcas-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("scenario.toml");
    let edited = format!("{text}\n")
        .replace("case = 2", "case = 3")
        .replace("qam_order = 4", "qam_order = 16");
    std::fs::write(&path, edited)?;

    let cfg = SimConfig::load(&path)?;
    assert_eq!(cfg.case, Case::EchoOnly);
    println!(
        "loaded {} (case {}, {}-QAM)",
        path.display(),
        cfg.case,
        cfg.qam_order
    );
    let r = run_sweep(&cfg, SweepAxis::DlPower, &[40.0, 50.0], 10)?;
    for p in &r.points {
        println!("P_D {} dBm: mse {:?} m^2", p.axis_dbm, p.mse_m2);
    }
    Ok(())
}
