//! `cdu-sim`: run a power sweep and write the results as CSV.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::harness::{parse_points, run_sweep, write_csv, Case, SimConfig, SweepAxis};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AxisArg {
    #[value(name = "dl_power")]
    DlPower,
    #[value(name = "ul_power")]
    UlPower,
}

#[derive(Debug, Parser)]
#[command(
    name = "cdu-sim",
    about = "Monte-Carlo range MSE / BER sweeps for concurrent downlink-uplink sensing"
)]
struct Args {
    /// TOML config file, or `default` for the built-in scenario.
    #[arg(long, default_value = "default")]
    config: String,
    /// 1 = no cancellation, 2 = SIC receiver, 3 = echo only.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    case: Option<u8>,
    #[arg(long, value_enum, default_value = "dl_power")]
    sweep: AxisArg,
    /// Sweep values in dBm as `start:stop:step`.
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["4", "16", "64"])]
    qam: Option<String>,
}

/// Parses `args` (including the program name), runs the sweep and returns the
/// process exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };

    let config = match build_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("cdu-sim: {e}");
            return EXIT_CONFIG;
        }
    };
    let axis = match args.sweep {
        AxisArg::DlPower => SweepAxis::DlPower,
        AxisArg::UlPower => SweepAxis::UlPower,
    };
    let default_points = match axis {
        SweepAxis::DlPower => "-10:27:1",
        SweepAxis::UlPower => "13:20:7",
    };
    let points = match parse_points(args.points.as_deref().unwrap_or(default_points)) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cdu-sim: {e}");
            return EXIT_USAGE;
        }
    };

    let result = match run_sweep(&config, axis, &points, config.trials) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("cdu-sim: {e}");
            return EXIT_RUNTIME;
        }
    };
    let written = match &args.out {
        Some(path) => File::create(path)
            .map_err(Error::from)
            .and_then(|f| write_csv(&result, BufWriter::new(f))),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_csv(&result, &mut lock).and_then(|_| lock.flush().map_err(Error::from))
        }
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("cdu-sim: {e}");
            EXIT_RUNTIME
        }
    }
}

fn build_config(args: &Args) -> crate::Result<SimConfig> {
    let mut config = if args.config == "default" {
        SimConfig::default()
    } else {
        SimConfig::load(args.config.as_ref())?
    };
    if let Some(c) = args.case {
        config.case = Case::try_from(c).map_err(Error::Config)?;
    }
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(s) = args.seed {
        config.master_seed = s;
    }
    if let Some(q) = &args.qam {
        config.qam_order = q
            .parse()
            .map_err(|_| Error::Config(format!("bad qam order {q}")))?;
    }
    config.validate()?;
    Ok(config)
}
