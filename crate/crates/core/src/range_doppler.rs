//! Range-Doppler processing of an echo response grid.
//!
//! The echo grid has delay phasors `e^{−j2πnΔfτ}` down each column and
//! Doppler phasors `e^{j2πfmT}` along each row, so an inverse DFT over the
//! subcarrier axis followed by a forward DFT over the symbol axis concentrates
//! each path into one cell. Peak picking takes the integer argmax; there is no
//! interpolation, so estimates are quantized to `c/(2N_cΔf)` in range.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::receiver::EchoResponseGrid;
use crate::scene::OfdmNumerology;
use crate::{C64, SPEED_OF_LIGHT};

/// Scaling applied by [`compute_map`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformMeta {
    /// Multiplier on the inverse transform over subcarriers, `1/N_c`.
    pub inverse_scale: f64,
    /// Multiplier on the forward transform over symbols.
    pub forward_scale: f64,
    /// Zero-padding factor applied on both axes.
    pub zero_pad: usize,
}

impl TransformMeta {
    /// `Σ|map|² / Σ|Ĥ|²` for an unpadded map: `M_s / N_c`.
    pub fn parseval_factor(&self, num_subcarriers: usize, num_symbols: usize) -> f64 {
        let n = (num_subcarriers * self.zero_pad) as f64;
        let m = (num_symbols * self.zero_pad) as f64;
        self.inverse_scale.powi(2) * n * self.forward_scale.powi(2) * m
    }
}

/// Magnitudes indexed `[range_bin][doppler_bin]`, range-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeDopplerMap {
    pub num_range_bins: usize,
    pub num_doppler_bins: usize,
    pub magnitudes: Vec<f64>,
    pub transform_meta: TransformMeta,
}

impl RangeDopplerMap {
    #[inline]
    pub fn get(&self, range_bin: usize, doppler_bin: usize) -> f64 {
        self.magnitudes[range_bin * self.num_doppler_bins + doppler_bin]
    }
}

pub fn compute_map(echo: &EchoResponseGrid) -> RangeDopplerMap {
    compute_map_padded(echo, 1)
}

/// Same transform on a grid zero-padded by `zero_pad` along both axes. The
/// inverse-transform scale stays `1/N_c` so on-grid peak heights do not
/// depend on the padding.
pub fn compute_map_padded(echo: &EchoResponseGrid, zero_pad: usize) -> RangeDopplerMap {
    let zero_pad = zero_pad.max(1);
    let (nc, ms) = (echo.num_subcarriers, echo.num_symbols);
    let (rows, cols) = (nc * zero_pad, ms * zero_pad);
    let mut planner = FftPlanner::<f64>::new();
    let ifft: Arc<dyn Fft<f64>> = planner.plan_fft_inverse(rows);
    let fft: Arc<dyn Fft<f64>> = planner.plan_fft_forward(cols);
    let inverse_scale = 1.0 / nc as f64;

    // column transforms, stored column-major for contiguous FFT input
    let mut columns = vec![C64::new(0.0, 0.0); rows * cols];
    for m in 0..ms {
        let col = &mut columns[m * rows..(m + 1) * rows];
        for (n, c) in col.iter_mut().take(nc).enumerate() {
            *c = echo.get(n, m);
        }
        ifft.process(col);
    }

    let mut magnitudes = vec![0.0; rows * cols];
    let mut row = vec![C64::new(0.0, 0.0); cols];
    for r in 0..rows {
        for (m, v) in row.iter_mut().enumerate() {
            *v = columns[m * rows + r] * inverse_scale;
        }
        fft.process(&mut row);
        for (out, v) in magnitudes[r * cols..(r + 1) * cols].iter_mut().zip(&row) {
            *out = v.norm();
        }
    }

    RangeDopplerMap {
        num_range_bins: rows,
        num_doppler_bins: cols,
        magnitudes,
        transform_meta: TransformMeta {
            inverse_scale,
            forward_scale: 1.0,
            zero_pad,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakBins {
    pub range_bin: usize,
    pub doppler_bin: usize,
    pub magnitude: f64,
}

/// Global maximum; ties go to the smallest `(range_bin, doppler_bin)`.
/// `None` when the map has no positive entry.
pub fn find_peak(map: &RangeDopplerMap) -> Option<PeakBins> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in map.magnitudes.iter().enumerate() {
        if v > 0.0 && best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, v)| PeakBins {
        range_bin: i / map.num_doppler_bins,
        doppler_bin: i % map.num_doppler_bins,
        magnitude: v,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionResult {
    pub range_bin: usize,
    /// Signed, in `[−M/2, M/2)` for an `M`-bin Doppler axis.
    pub doppler_bin: i64,
    pub range_m: f64,
    pub radial_velocity_mps: f64,
    pub peak_magnitude: f64,
}

/// `d̂ = c·l_R/(2N_cΔf)`, `v̂ = λ·l_f/(2M_sT_s)`.
pub fn bins_to_estimates(bins: PeakBins, numerology: &OfdmNumerology) -> DetectionResult {
    bins_to_estimates_padded(bins, numerology, 1)
}

pub fn bins_to_estimates_padded(
    bins: PeakBins,
    numerology: &OfdmNumerology,
    zero_pad: usize,
) -> DetectionResult {
    let zero_pad = zero_pad.max(1);
    let nc = (numerology.num_subcarriers * zero_pad) as f64;
    let ms = numerology.num_symbols * zero_pad;
    let signed = if bins.doppler_bin >= ms / 2 {
        bins.doppler_bin as i64 - ms as i64
    } else {
        bins.doppler_bin as i64
    };
    DetectionResult {
        range_bin: bins.range_bin,
        doppler_bin: signed,
        range_m: SPEED_OF_LIGHT * bins.range_bin as f64
            / (2.0 * nc * numerology.subcarrier_spacing_hz),
        radial_velocity_mps: numerology.wavelength_m() * signed as f64
            / (2.0 * ms as f64 * numerology.symbol_duration_s()),
        peak_magnitude: bins.magnitude,
    }
}

/// Map, peak and estimates in one call.
pub fn detect(echo: &EchoResponseGrid, numerology: &OfdmNumerology) -> Option<DetectionResult> {
    find_peak(&compute_map(echo)).map(|b| bins_to_estimates(b, numerology))
}
