//! Reference computations written independently of the library.
#![allow(dead_code)]

use cdu_jcas::grid::VectorGrid;
use cdu_jcas::harness::LinkModel;
use cdu_jcas::receiver::CsiEstimate;
use cdu_jcas::C64;

pub const C: f64 = 3.0e8;

/// Minimizes a unimodal `f` on `[lo, hi]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    (lo + hi) / 2.0
}

/// Mean squared error of the combiner `w = B·h` for symbol `d` with unit
/// energy: `|B*‖h‖²√P − 1|² + σ²|B|²‖h‖²`.
pub fn mmse_objective(b: C64, h_norm_sqr: f64, p: f64, sigma2: f64) -> f64 {
    (b.conj() * h_norm_sqr * p.sqrt() - 1.0).norm_sqr() + sigma2 * b.norm_sqr() * h_norm_sqr
}

/// Minimizer of [`mmse_objective`] found numerically. The objective splits
/// into a function of `Re B` plus one of `Im B`, so two line searches cover
/// the whole plane.
pub fn numeric_mmse_scale(h_norm_sqr: f64, p: f64, sigma2: f64) -> C64 {
    let span = 2.0 / (h_norm_sqr * p.sqrt());
    let re = golden_section(
        |x| mmse_objective(C64::new(x, 0.0), h_norm_sqr, p, sigma2),
        -span,
        span,
        200,
    );
    let im = golden_section(
        |y| mmse_objective(C64::new(re, y), h_norm_sqr, p, sigma2),
        -span,
        span,
        200,
    );
    C64::new(re, im)
}

pub fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Two-way radar amplitude for a unit reflection factor.
pub fn echo_amplitude(wavelength: f64, d: f64) -> f64 {
    (wavelength.powi(2) / ((4.0 * std::f64::consts::PI).powi(3) * d.powi(4))).sqrt()
}

/// Free-space one-way amplitude.
pub fn los_amplitude(wavelength: f64, d: f64) -> f64 {
    wavelength / (4.0 * std::f64::consts::PI * d)
}

pub fn mean_power(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>() / v.len() as f64
}

pub fn rel_diff(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Per-subcarrier CSI taken straight from the true uplink channel.
pub fn perfect_csi(link: &LinkModel, ul_w: f64) -> CsiEstimate {
    let (nc, _, dim) = link.comm.shape();
    let mut grid = VectorGrid::zeros(nc, 1, dim);
    for n in 0..nc {
        link.comm.response_into(n, 0, grid.cell_mut(n, 0));
    }
    CsiEstimate::from_known(grid, ul_w).unwrap()
}
