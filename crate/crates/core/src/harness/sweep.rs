use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::{Error, Result};

use super::trial::{run_trial, trial_seed, TrialResult};
use super::{Case, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    DlPower,
    UlPower,
}

impl SweepAxis {
    pub fn apply(self, config: &SimConfig, value_dbm: f64) -> SimConfig {
        let mut c = config.clone();
        match self {
            SweepAxis::DlPower => c.dl_power_dbm = value_dbm,
            SweepAxis::UlPower => c.ul_power_dbm = value_dbm,
        }
        c
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dl_power" => Ok(SweepAxis::DlPower),
            "ul_power" => Ok(SweepAxis::UlPower),
            other => Err(format!(
                "unknown sweep axis {other:?} (dl_power | ul_power)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub axis_dbm: f64,
    pub case: Case,
    /// Mean squared range error over trials that produced a detection.
    pub mse_m2: Option<f64>,
    pub ber: Option<f64>,
    pub missed_rate: f64,
    pub trials: usize,
    pub bits: u64,
    pub bit_errors: u64,
}

impl SweepPoint {
    /// Aggregates trials in the order given; the sums are formed sequentially
    /// so the result does not depend on how trials were scheduled.
    pub fn aggregate(axis_dbm: f64, case: Case, trials: &[TrialResult]) -> Self {
        let errors: Vec<f64> = trials.iter().filter_map(|t| t.range_sq_error_m2).collect();
        let mse_m2 = (!errors.is_empty()).then(|| errors.iter().sum::<f64>() / errors.len() as f64);
        let bits: u64 = trials.iter().filter_map(|t| t.bits_total).sum();
        let bit_errors: u64 = trials.iter().filter_map(|t| t.bit_errors).sum();
        let ber = (bits > 0).then(|| bit_errors as f64 / bits as f64);
        let missed = trials.iter().filter(|t| t.missed()).count();
        Self {
            axis_dbm,
            case,
            mse_m2,
            ber,
            missed_rate: missed as f64 / trials.len().max(1) as f64,
            trials: trials.len(),
            bits,
            bit_errors,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub points: Vec<SweepPoint>,
}

fn run_point(config: &SimConfig, trials: usize) -> Result<Vec<TrialResult>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(config, trial_seed(config.master_seed, t)))
        .collect()
}

/// Runs `trials` trials at every point. Trial `t` uses the same seed at every
/// point, which pairs the points as well as the cases.
pub fn run_sweep(
    config: &SimConfig,
    axis: SweepAxis,
    points: &[f64],
    trials: usize,
) -> Result<SweepResult> {
    if points.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep needs at least one point".into(),
        ));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter(
            "sweep needs at least one trial".into(),
        ));
    }
    config.validate()?;
    let points = points
        .iter()
        .map(|&x| {
            let cfg = axis.apply(config, x);
            let results = run_point(&cfg, trials)?;
            Ok(SweepPoint::aggregate(x, cfg.case, &results))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { axis, points })
}

/// Squared error of the nearest range bin to the true target range: the MSE
/// left once every trial picks the right bin.
pub fn quantization_floor_m2(config: &SimConfig) -> f64 {
    let res = config.numerology().range_resolution_m();
    let d = config.true_range_m();
    ((d / res).round() * res - d).powi(2)
}

/// One sweep point visited by [`first_floor_crossing`].
#[derive(Debug, Clone, PartialEq)]
pub struct FloorProbe {
    /// Aggregate over the trials actually run.
    pub point: SweepPoint,
    /// Trials stopped once the point could no longer reach the bound.
    pub stopped_early: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloorSearch {
    /// First point whose MSE is within the tolerance of the floor.
    pub crossing_dbm: Option<f64>,
    pub probes: Vec<FloorProbe>,
}

/// Walks `points` in order until the MSE over `trials` trials falls to
/// `floor_m2·(1 + rel_tol)`.
///
/// A point stops as soon as its running sum of squared errors exceeds
/// `bound·trials`: the MSE divides that sum by at most `trials` detections,
/// so the point cannot reach the bound anymore. The crossing is the same one
/// a full sweep would report.
pub fn first_floor_crossing(
    config: &SimConfig,
    axis: SweepAxis,
    points: &[f64],
    trials: usize,
    floor_m2: f64,
    rel_tol: f64,
) -> Result<FloorSearch> {
    if trials == 0 {
        return Err(Error::InvalidParameter(
            "sweep needs at least one trial".into(),
        ));
    }
    config.validate()?;
    let bound = floor_m2 * (1.0 + rel_tol);
    let budget = bound * trials as f64;
    let chunk = rayon::current_num_threads().max(1) * 4;
    let mut probes = Vec::new();
    for &x in points {
        let cfg = axis.apply(config, x);
        let mut results: Vec<TrialResult> = Vec::with_capacity(trials);
        let mut sum = 0.0;
        let mut stopped_early = false;
        while results.len() < trials {
            let start = results.len() as u64;
            let end = (results.len() + chunk).min(trials) as u64;
            let batch: Vec<TrialResult> = (start..end)
                .into_par_iter()
                .map(|t| run_trial(&cfg, trial_seed(cfg.master_seed, t)))
                .collect::<Result<_>>()?;
            sum += batch
                .iter()
                .filter_map(|t| t.range_sq_error_m2)
                .sum::<f64>();
            results.extend(batch);
            if sum > budget {
                stopped_early = results.len() < trials;
                break;
            }
        }
        let point = SweepPoint::aggregate(x, cfg.case, &results);
        let reached = !stopped_early && point.mse_m2.is_some_and(|m| m <= bound);
        probes.push(FloorProbe {
            point,
            stopped_early,
        });
        if reached {
            return Ok(FloorSearch {
                crossing_dbm: Some(x),
                probes,
            });
        }
    }
    Ok(FloorSearch {
        crossing_dbm: None,
        probes,
    })
}

/// Parses `a:b:step` (inclusive of `b` when it lands on the grid) or a single
/// value.
pub fn parse_points(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParameter(format!("bad point range {text:?}, expected a:b:step"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    if parts.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    match parts[..] {
        [x] => Ok(vec![x]),
        [a, b, step] if step > 0.0 && b >= a => {
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| a + i as f64 * step).collect())
        }
        _ => Err(bad()),
    }
}

/// CSV with header `axis_dbm,case,mse_m2,ber,missed_rate,trials,bits`; empty
/// fields mark values that are undefined for the point.
pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record([
        "axis_dbm",
        "case",
        "mse_m2",
        "ber",
        "missed_rate",
        "trials",
        "bits",
    ])
    .map_err(io)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for p in &result.points {
        w.write_record([
            p.axis_dbm.to_string(),
            p.case.to_string(),
            opt(p.mse_m2),
            opt(p.ber),
            p.missed_rate.to_string(),
            p.trials.to_string(),
            p.bits.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_ranges() {
        assert_eq!(parse_points("-10:27:1").unwrap().len(), 38);
        assert_eq!(parse_points("13:20:7").unwrap(), vec![13.0, 20.0]);
        assert_eq!(
            parse_points("0:1:0.25").unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        assert_eq!(parse_points("5").unwrap(), vec![5.0]);
        for bad in ["", "a:b:c", "1:0:1", "0:1:0", "0:1", "0:1:1:1", "nan"] {
            assert!(parse_points(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn default_floor() {
        // (78.125 - sqrt(6272.5625))^2
        let f = quantization_floor_m2(&SimConfig::default());
        assert!((f - 1.154_573_3).abs() < 1e-6, "{f}");
    }

    #[test]
    fn aggregate_excludes_missed_detections() {
        let mk = |err: Option<f64>, bits: Option<u64>| TrialResult {
            case: Case::Sic,
            seed: 0,
            true_range_m: 0.0,
            detection: None,
            range_est_m: None,
            range_sq_error_m2: err,
            bit_errors: bits.map(|b| b / 4),
            bits_total: bits,
        };
        let p = SweepPoint::aggregate(
            3.0,
            Case::Sic,
            &[
                mk(Some(1.0), Some(8)),
                mk(Some(3.0), Some(8)),
                mk(None, None),
            ],
        );
        assert_eq!(p.mse_m2, Some(2.0));
        assert_eq!(p.ber, Some(0.25));
        assert_eq!(p.trials, 3);
        // `detection` is None for all three, so every trial counts as missed
        assert_eq!(p.missed_rate, 1.0);
    }

    #[test]
    fn csv_layout() {
        let r = SweepResult {
            axis: SweepAxis::DlPower,
            points: vec![SweepPoint {
                axis_dbm: -1.5,
                case: Case::EchoOnly,
                mse_m2: Some(1.25),
                ber: None,
                missed_rate: 0.0,
                trials: 4,
                bits: 0,
                bit_errors: 0,
            }],
        };
        let mut buf = Vec::new();
        write_csv(&r, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "axis_dbm,case,mse_m2,ber,missed_rate,trials,bits\n-1.5,3,1.25,,0,4,0\n"
        );
    }
}
