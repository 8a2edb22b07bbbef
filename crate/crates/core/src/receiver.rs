//! Base-station receive chain for the superimposed uplink + echo signal.
//!
//! 1. Per-subcarrier uplink CSI from the preamble.
//! 2. MMSE receive combiner restricted to the span of the estimated channel.
//! 3. Equalization and ML demapping of the uplink data.
//! 4. Reconstruction and subtraction of the uplink (SIC).
//! 5. Echo response extraction through the sensing receive beam.
//!
//! Both the combiner and the reconstruction use the preamble estimate, never
//! the true channel, so estimation and decision errors propagate into the
//! echo response.

use crate::array::Beamformer;
use crate::grid::{inner, norm_sqr, ObservationGrid, VectorGrid};
use crate::modem::{demap_ml, QamConstellation, SymbolGrid, SymbolKind};
use crate::{Error, Result, C64};

/// Below this combined-gain magnitude equalization is refused.
pub const EQUALIZATION_FLOOR: f64 = 1e-30;

/// Uplink channel estimate, one receive-array vector per subcarrier. The user
/// is static over a frame, so one estimate serves every data symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiEstimate {
    h_hat: VectorGrid,
    ul_power_w: f64,
    preamble_symbols: usize,
}

impl CsiEstimate {
    /// Wraps a known channel (genie CSI); `per_subcarrier` is `N_c x 1 x K`.
    pub fn from_known(per_subcarrier: VectorGrid, ul_power_w: f64) -> Result<Self> {
        if per_subcarrier.num_symbols() != 1 {
            return Err(Error::DimensionMismatch(
                "CSI grid must have one symbol column".into(),
            ));
        }
        Ok(Self {
            h_hat: per_subcarrier,
            ul_power_w,
            preamble_symbols: usize::MAX,
        })
    }

    pub fn response(&self, n: usize) -> &[C64] {
        self.h_hat.cell(n, 0)
    }

    pub fn num_subcarriers(&self) -> usize {
        self.h_hat.num_subcarriers()
    }

    pub fn dim(&self) -> usize {
        self.h_hat.dim()
    }

    pub fn grid(&self) -> &VectorGrid {
        &self.h_hat
    }

    /// Variance of each estimate entry around the truth: `σ²/(P·M_p)`.
    pub fn per_entry_noise_var(&self, noise_var_w: f64) -> f64 {
        if self.preamble_symbols == usize::MAX {
            0.0
        } else {
            noise_var_w / (self.ul_power_w * self.preamble_symbols as f64)
        }
    }
}

/// `ĥ_n = mean_m y_{n,m} / (√P·d̄_{n,m})`.
pub fn estimate_ul_csi(
    preamble_rx: &ObservationGrid,
    preamble: &SymbolGrid,
    ul_power_w: f64,
) -> Result<CsiEstimate> {
    if !(ul_power_w > 0.0 && ul_power_w.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "uplink power must be positive for CSI estimation, got {ul_power_w}"
        )));
    }
    let (nc, mp, dim) = preamble_rx.shape();
    if preamble.shape() != (nc, mp) {
        return Err(Error::DimensionMismatch(format!(
            "preamble {:?} vs received {:?}",
            preamble.shape(),
            (nc, mp)
        )));
    }
    let mut h_hat = VectorGrid::zeros(nc, 1, dim);
    let sqrt_p = ul_power_w.sqrt();
    for n in 0..nc {
        let acc = h_hat.cell_mut(n, 0);
        for m in 0..mp {
            let inv = (preamble.get(n, m) * sqrt_p * mp as f64).inv();
            for (a, y) in acc.iter_mut().zip(preamble_rx.cell(n, m)) {
                *a += y * inv;
            }
        }
    }
    Ok(CsiEstimate {
        h_hat,
        ul_power_w,
        preamble_symbols: mp,
    })
}

/// MMSE combiner for one channel vector.
///
/// Restricting `w = h·B` and minimizing `|wᴴh√P − 1|² + σ²‖w‖²` over the
/// scalar `B` gives `B = √P / (P‖h‖² + σ²)`, i.e.
/// `w = √P·h·(hᴴh)⁻¹·(P·hᴴh + σ²)⁻¹·(hᴴh)`.
pub fn mmse_combiner(h_hat: &[C64], ul_power_w: f64, noise_var_w: f64) -> Result<Vec<C64>> {
    if !(ul_power_w > 0.0 && ul_power_w.is_finite()) {
        return Err(Error::InvalidParameter(
            "uplink power must be positive".into(),
        ));
    }
    if !(noise_var_w >= 0.0 && noise_var_w.is_finite()) {
        return Err(Error::InvalidParameter(
            "noise variance must be >= 0".into(),
        ));
    }
    let gram = norm_sqr(h_hat);
    if gram.is_nan() || gram <= 0.0 {
        return Err(Error::SingularChannel);
    }
    let b = ul_power_w.sqrt() / (ul_power_w * gram + noise_var_w);
    Ok(h_hat.iter().map(|h| h * b).collect())
}

/// Per-subcarrier MMSE combiners, `N_c x 1 x K`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinerWeights {
    w: VectorGrid,
}

impl CombinerWeights {
    pub fn from_csi(csi: &CsiEstimate, ul_power_w: f64, noise_var_w: f64) -> Result<Self> {
        let mut w = VectorGrid::zeros(csi.num_subcarriers(), 1, csi.dim());
        for n in 0..csi.num_subcarriers() {
            let wn = mmse_combiner(csi.response(n), ul_power_w, noise_var_w)?;
            w.cell_mut(n, 0).copy_from_slice(&wn);
        }
        Ok(Self { w })
    }

    pub fn weights(&self, n: usize) -> &[C64] {
        self.w.cell(n, 0)
    }

    /// `wᴴ·ĥ·√P`, the equalizer's estimate of the combined uplink gain.
    pub fn combined_gain(&self, csi: &CsiEstimate, n: usize, ul_power_w: f64) -> C64 {
        inner(self.weights(n), csi.response(n)) * ul_power_w.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Demodulated {
    /// Hard decisions `d̂`.
    pub symbols: SymbolGrid,
    /// Equalized soft values `d̄ = wᴴy / (wᴴĥ√P)`.
    pub soft: SymbolGrid,
    /// Constellation label per cell, subcarrier-major.
    pub labels: Vec<usize>,
}

impl Demodulated {
    pub fn bits<'a>(
        &'a self,
        constellation: &'a QamConstellation,
    ) -> impl Iterator<Item = u8> + 'a {
        self.labels
            .iter()
            .flat_map(move |&l| constellation.bits_of(l))
    }
}

pub fn equalize_and_demod(
    rx: &ObservationGrid,
    weights: &CombinerWeights,
    csi: &CsiEstimate,
    ul_power_w: f64,
    constellation: &QamConstellation,
) -> Result<Demodulated> {
    let (nc, ms, dim) = rx.shape();
    if csi.num_subcarriers() != nc || csi.dim() != dim || weights.w.shape() != csi.h_hat.shape() {
        return Err(Error::DimensionMismatch(
            "observation, CSI and combiner disagree".into(),
        ));
    }
    let zero = C64::new(0.0, 0.0);
    let mut symbols = SymbolGrid::filled(nc, ms, SymbolKind::UplinkData, zero);
    let mut soft = SymbolGrid::filled(nc, ms, SymbolKind::Observation, zero);
    let mut labels = Vec::with_capacity(nc * ms);
    for n in 0..nc {
        let w = weights.weights(n);
        let gain = weights.combined_gain(csi, n, ul_power_w);
        if gain.is_nan() || gain.norm() < EQUALIZATION_FLOOR {
            return Err(Error::EqualizationSingularity(gain.norm()));
        }
        let inv_gain = gain.inv();
        for m in 0..ms {
            let d_bar = inner(w, rx.cell(n, m)) * inv_gain;
            let (label, point) = demap_ml(d_bar, constellation)?;
            soft.set(n, m, d_bar);
            symbols.set(n, m, point);
            labels.push(label);
        }
    }
    Ok(Demodulated {
        symbols,
        soft,
        labels,
    })
}

/// `ŷ = y − ĥ·√P·d̂`, leaving the echo, the reconstruction error and noise.
pub fn cancel_communication(
    rx: &ObservationGrid,
    csi: &CsiEstimate,
    symbols: &SymbolGrid,
    ul_power_w: f64,
) -> Result<ObservationGrid> {
    let (nc, ms, dim) = rx.shape();
    if symbols.shape() != (nc, ms) || csi.num_subcarriers() != nc || csi.dim() != dim {
        return Err(Error::DimensionMismatch(
            "cancellation inputs disagree".into(),
        ));
    }
    let sqrt_p = ul_power_w.sqrt();
    let mut out = rx.clone();
    for n in 0..nc {
        let h = csi.response(n);
        for m in 0..ms {
            let s = symbols.get(n, m) * sqrt_p;
            for (y, hk) in out.cell_mut(n, m).iter_mut().zip(h) {
                *y -= hk * s;
            }
        }
    }
    Ok(out)
}

/// Scalar echo response per cell, `Ĥ_{n,m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoResponseGrid {
    pub num_subcarriers: usize,
    pub num_symbols: usize,
    pub values: Vec<C64>,
}

impl EchoResponseGrid {
    pub fn from_vec(num_subcarriers: usize, num_symbols: usize, values: Vec<C64>) -> Result<Self> {
        if values.len() != num_subcarriers * num_symbols {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {num_subcarriers}x{num_symbols} echo grid",
                values.len()
            )));
        }
        Ok(Self {
            num_subcarriers,
            num_symbols,
            values,
        })
    }

    #[inline]
    pub fn get(&self, n: usize, m: usize) -> C64 {
        self.values[n * self.num_symbols + m]
    }
}

/// `Ĥ_{n,m} = w_RXᴴ·ŷ_{n,m} / d^{D,S}_{n,m}`.
pub fn extract_echo(
    cleaned: &ObservationGrid,
    w_rx_sensing: &Beamformer,
    sensing_symbols: &SymbolGrid,
) -> Result<EchoResponseGrid> {
    let (nc, ms, dim) = cleaned.shape();
    if sensing_symbols.shape() != (nc, ms) {
        return Err(Error::DimensionMismatch(
            "sensing symbols vs observation".into(),
        ));
    }
    if w_rx_sensing.weights.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "receive beamformer has {} weights for {dim} antennas",
            w_rx_sensing.weights.len()
        )));
    }
    let values = cleaned
        .cells()
        .map(|(n, m, y)| inner(&w_rx_sensing.weights, y) / sensing_symbols.get(n, m))
        .collect();
    EchoResponseGrid::from_vec(nc, ms, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{
        ls_transmit_beamformer, sensing_receive_beamformer, Angle2D, ArrayGeometry,
    };
    use crate::modem::{
        build_constellation, gen_preamble, gen_sensing_symbols, map_bits, random_bits,
    };
    use crate::scene::{complex_gaussian, OfdmNumerology};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use statrs::function::erf::erfc;

    const NOISE: f64 = 1.2294e-12;

    fn dbm(p: f64) -> f64 {
        10f64.powf((p - 30.0) / 10.0)
    }

    fn q_func(x: f64) -> f64 {
        0.5 * erfc(x / 2f64.sqrt())
    }

    fn random_vec(rng: &mut ChaCha8Rng, dim: usize, var: f64) -> Vec<C64> {
        (0..dim).map(|_| complex_gaussian(rng, var)).collect()
    }

    /// Preamble reception `y = h√P·d̄ + n` over an `nc x mp` grid with a
    /// per-subcarrier channel `h`.
    fn preamble_rx(
        h: &VectorGrid,
        pre: &SymbolGrid,
        p: f64,
        noise: f64,
        rng: &mut ChaCha8Rng,
    ) -> VectorGrid {
        let (nc, mp) = pre.shape();
        let dim = h.dim();
        let mut y = VectorGrid::zeros(nc, mp, dim);
        for n in 0..nc {
            for m in 0..mp {
                let s = pre.get(n, m) * p.sqrt();
                for (k, v) in y.cell_mut(n, m).iter_mut().enumerate() {
                    *v = h.cell(n, 0)[k] * s + complex_gaussian(rng, noise);
                }
            }
        }
        y
    }

    fn flat_channel(nc: usize, dim: usize, rng: &mut ChaCha8Rng) -> VectorGrid {
        let mut h = VectorGrid::zeros(nc, 1, dim);
        for v in h.values_mut() {
            *v = complex_gaussian(rng, 1e-11);
        }
        h
    }

    fn nmr(nc: usize, ms: usize) -> OfdmNumerology {
        OfdmNumerology {
            num_subcarriers: nc,
            num_symbols: ms,
            ..OfdmNumerology::default()
        }
    }

    #[test]
    fn noiseless_csi_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = flat_channel(32, 8, &mut rng);
        let pre = gen_preamble(4, &nmr(32, 4)).unwrap();
        let y = preamble_rx(&h, &pre, dbm(13.0), 0.0, &mut rng);
        let csi = estimate_ul_csi(&y, &pre, dbm(13.0)).unwrap();
        for (a, b) in csi.grid().values().iter().zip(h.values()) {
            assert!((a - b).norm() <= 1e-12 * b.norm());
        }
        assert!(estimate_ul_csi(&y, &pre, 0.0).is_err());
    }

    fn csi_error_variance(mp: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nc = 10_000;
        let h = flat_channel(nc, 1, &mut rng);
        let pre = gen_preamble(mp, &nmr(nc.next_power_of_two(), mp)).unwrap();
        let pre = SymbolGrid {
            num_subcarriers: nc,
            values: pre.values[..nc * mp].to_vec(),
            ..pre
        };
        let y = preamble_rx(&h, &pre, dbm(13.0), NOISE, &mut rng);
        let csi = estimate_ul_csi(&y, &pre, dbm(13.0)).unwrap();
        csi.grid()
            .values()
            .iter()
            .zip(h.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            / nc as f64
    }

    #[test]
    fn csi_error_variance_matches_noise_over_power() {
        let expected = NOISE / dbm(13.0);
        let v1 = csi_error_variance(1, 21);
        assert!((v1 / expected - 1.0).abs() < 0.05, "{v1} vs {expected}");
        let v4 = csi_error_variance(4, 22);
        assert!((v4 / v1 - 0.25).abs() < 0.025, "ratio {}", v4 / v1);
        let pre = gen_preamble(4, &nmr(4, 4)).unwrap();
        let csi = estimate_ul_csi(&VectorGrid::zeros(4, 4, 1), &pre, 2.0).unwrap();
        assert_eq!(csi.per_entry_noise_var(8.0), 1.0);
    }

    #[test]
    fn scalar_combiner_halves_at_unit_snr() {
        let h = [C64::from_polar(1.0, 0.4)];
        let w = mmse_combiner(&h, 1.0, 1.0).unwrap();
        assert!((w[0] - h[0] / 2.0).norm() < 1e-15);
        let gain = inner(&w, &h);
        assert!((gain - C64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn noiseless_combiner_is_zero_forcing() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = random_vec(&mut rng, 64, 1e-12);
        let p = 0.02;
        let w = mmse_combiner(&h, p, 0.0).unwrap();
        let g = inner(&w, &h) * p.sqrt();
        assert!((g - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(
            mmse_combiner(&[C64::new(0.0, 0.0); 4], 1.0, 1.0),
            Err(Error::SingularChannel)
        );
        assert!(mmse_combiner(&h, 0.0, 1.0).is_err());
    }

    #[test]
    fn combined_gain_is_real_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let var = rng.random_range(1e-14..1e-8);
            let h = random_vec(&mut rng, 64, var);
            let p = rng.random_range(1e-3..1.0);
            let w = mmse_combiner(&h, p, NOISE).unwrap();
            let g = inner(&w, &h) * p.sqrt();
            assert!(g.re > 0.0);
            assert!(g.im.abs() <= 1e-12 * g.norm());
        }
    }

    /// One cell with `K = 1` per observation, `nc x ms` cells.
    fn scalar_rx(h: C64, d: &SymbolGrid, p: f64, noise: f64, rng: &mut ChaCha8Rng) -> VectorGrid {
        let vals = d
            .values
            .iter()
            .map(|s| h * p.sqrt() * s + complex_gaussian(rng, noise))
            .collect();
        VectorGrid::from_vec(d.num_subcarriers, d.num_symbols, 1, vals).unwrap()
    }

    fn known_csi(h: &[C64], nc: usize, p: f64) -> CsiEstimate {
        let mut g = VectorGrid::zeros(nc, 1, h.len());
        for n in 0..nc {
            g.cell_mut(n, 0).copy_from_slice(h);
        }
        CsiEstimate::from_known(g, p).unwrap()
    }

    #[test]
    fn perfect_conditions_recover_every_symbol() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let c = build_constellation(16).unwrap();
        let nm = nmr(16, 8);
        let bits = random_bits(&mut rng, 16 * 8 * 4);
        let d = map_bits(&bits, &c, &nm).unwrap();
        let h = C64::new(3e-6, -1e-6);
        let rx = scalar_rx(h, &d, 0.1, 0.0, &mut rng);
        let csi = known_csi(&[h], 16, 0.1);
        let w = CombinerWeights::from_csi(&csi, 0.1, 0.0).unwrap();
        let out = equalize_and_demod(&rx, &w, &csi, 0.1, &c).unwrap();
        assert_eq!(out.bits(&c).collect::<Vec<_>>(), bits);
        for (a, b) in out.symbols.values.iter().zip(&d.values) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn echo_leaks_as_residual_interference() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = build_constellation(4).unwrap();
        let nm = nmr(8, 4);
        let d = map_bits(&random_bits(&mut rng, 8 * 4 * 2), &c, &nm).unwrap();
        let s = gen_sensing_symbols(&nm, 3);
        let (pu, pd) = (0.1f64, 0.5f64);
        let h = random_vec(&mut rng, 4, 1e-11);
        let hs = random_vec(&mut rng, 4, 1e-16);
        let mut rx = VectorGrid::zeros(8, 4, 4);
        for n in 0..8 {
            for m in 0..4 {
                for k in 0..4 {
                    rx.cell_mut(n, m)[k] =
                        h[k] * pu.sqrt() * d.get(n, m) + hs[k] * pd.sqrt() * s.get(n, m);
                }
            }
        }
        let csi = known_csi(&h, 8, pu);
        let w = CombinerWeights::from_csi(&csi, pu, 0.0).unwrap();
        let out = equalize_and_demod(&rx, &w, &csi, pu, &c).unwrap();
        for n in 0..8 {
            let wn = w.weights(n);
            let leak = inner(wn, &hs) * pd.sqrt() / (inner(wn, &h) * pu.sqrt());
            for m in 0..4 {
                let expected = d.get(n, m) + leak * s.get(n, m);
                assert!((out.soft.get(n, m) - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn qpsk_symbol_error_rate_at_10db() {
        // Es/N0 = 10 dB after combining; nearest-neighbour union bound 2·Q(√SNR)
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = build_constellation(4).unwrap();
        let (nc, ms) = (1024, 1024);
        let nm = nmr(nc, ms);
        let bits = random_bits(&mut rng, nc * ms * 2);
        let d = map_bits(&bits, &c, &nm).unwrap();
        let h = C64::new(1e-6, 0.0);
        let p = 0.01;
        let snr = 10.0;
        let noise = h.norm_sqr() * p / snr;
        let rx = scalar_rx(h, &d, p, noise, &mut rng);
        let csi = known_csi(&[h], nc, p);
        // zero-forcing keeps the soft values unbiased
        let w = CombinerWeights::from_csi(&csi, p, 0.0).unwrap();
        let out = equalize_and_demod(&rx, &w, &csi, p, &c).unwrap();
        let errors = out
            .symbols
            .values
            .iter()
            .zip(&d.values)
            .filter(|(a, b)| (*a - *b).norm() > 1e-9)
            .count();
        let ser = errors as f64 / (nc * ms) as f64;
        let bound = 2.0 * q_func(snr.sqrt());
        assert!((ser / bound - 1.0).abs() < 0.2, "ser {ser} bound {bound}");
    }

    #[test]
    fn equalization_refuses_vanishing_gain() {
        let c = build_constellation(4).unwrap();
        let csi = known_csi(&[C64::new(1e-100, 0.0)], 2, 1.0);
        let w = CombinerWeights::from_csi(&csi, 1.0, 1.0).unwrap();
        let rx = VectorGrid::zeros(2, 2, 1);
        assert!(matches!(
            equalize_and_demod(&rx, &w, &csi, 1.0, &c),
            Err(Error::EqualizationSingularity(_))
        ));
    }

    struct Sic {
        rx: VectorGrid,
        echo_part: VectorGrid,
        h: Vec<C64>,
        d: SymbolGrid,
        pu: f64,
    }

    fn sic_fixture(seed: u64) -> Sic {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = build_constellation(4).unwrap();
        let nm = nmr(16, 8);
        let d = map_bits(&random_bits(&mut rng, 16 * 8 * 2), &c, &nm).unwrap();
        let pu = 0.1f64;
        let h = random_vec(&mut rng, 8, 1e-11);
        let mut echo_part = VectorGrid::zeros(16, 8, 8);
        for v in echo_part.values_mut() {
            *v = complex_gaussian(&mut rng, 1e-14);
        }
        let mut rx = echo_part.clone();
        for n in 0..16 {
            for m in 0..8 {
                for (k, y) in rx.cell_mut(n, m).iter_mut().enumerate() {
                    *y += h[k] * pu.sqrt() * d.get(n, m);
                }
            }
        }
        Sic {
            rx,
            echo_part,
            h,
            d,
            pu,
        }
    }

    #[test]
    fn cancellation_with_correct_decisions_leaves_the_rest() {
        let f = sic_fixture(9);
        let csi = known_csi(&f.h, 16, f.pu);
        let out = cancel_communication(&f.rx, &csi, &f.d, f.pu).unwrap();
        for (a, b) in out.values().iter().zip(f.echo_part.values()) {
            assert!((a - b).norm() <= 1e-12 * b.norm().max(1e-7) + 1e-20);
        }
    }

    #[test]
    fn wrong_decision_leaves_reconstruction_error_at_that_cell_only() {
        let mut f = sic_fixture(10);
        f.echo_part = VectorGrid::zeros(16, 8, 8);
        let csi = known_csi(&f.h, 16, f.pu);
        let clean_rx = cancel_communication(&f.rx, &csi, &f.d, f.pu).unwrap();
        // strip echo+noise so the residual is only the decision error
        let mut rx = f.rx.clone();
        for (y, e) in rx.values_mut().iter_mut().zip(clean_rx.values()) {
            *y -= e;
        }
        let mut decided = f.d.clone();
        let truth = decided.get(3, 5);
        let wrong = -truth;
        decided.set(3, 5, wrong);
        let out = cancel_communication(&rx, &csi, &decided, f.pu).unwrap();
        for (n, m, v) in out.cells() {
            if (n, m) == (3, 5) {
                for (k, x) in v.iter().enumerate() {
                    let expected = f.h[k] * f.pu.sqrt() * (truth - wrong);
                    assert!((x - expected).norm() < 1e-12 * expected.norm());
                }
            } else {
                assert!(v.iter().all(|x| x.norm() < 1e-20));
            }
        }
    }

    #[test]
    fn on_grid_echo_is_recovered_through_the_beam() {
        let nm = nmr(32, 8);
        let lambda = nm.wavelength_m();
        let geom = ArrayGeometry::half_wavelength(8, 8, lambda).unwrap();
        let dir = Angle2D::new(0.5, 0.3).unwrap();
        let c0 = C64::from_polar(1.0, 1.1);
        let tx = ls_transmit_beamformer(&geom, dir, c0).unwrap();
        let rxbf = sensing_receive_beamformer(&tx);
        let a = crate::array::steering_vector(&geom, dir);
        let b = C64::new(1.2e-8, 0.5e-8);
        let pd = 0.5f64;
        let bin = 5.0;
        let tau = bin / (32.0 * nm.subcarrier_spacing_hz);
        let s = gen_sensing_symbols(&nm, 1);
        let mut y = VectorGrid::zeros(32, 8, 64);
        let chi = crate::grid::dot(a.as_slice(), &tx.weights);
        for n in 0..32 {
            let ph = C64::from_polar(
                1.0,
                -2.0 * std::f64::consts::PI * n as f64 * nm.subcarrier_spacing_hz * tau,
            );
            for m in 0..8 {
                for (k, v) in y.cell_mut(n, m).iter_mut().enumerate() {
                    *v = b * ph * a.values[k] * chi * pd.sqrt() * s.get(n, m);
                }
            }
        }
        let echo = extract_echo(&y, &rxbf, &s).unwrap();
        for n in 0..32 {
            let ph = C64::from_polar(1.0, -2.0 * std::f64::consts::PI * n as f64 * bin / 32.0);
            let expected = pd.sqrt() * b * c0 * c0 * ph;
            for m in 0..8 {
                assert!((echo.get(n, m) - expected).norm() < 1e-12 * expected.norm());
            }
        }
    }

    #[test]
    fn echo_extraction_noise_variance() {
        let nm = nmr(128, 128);
        let geom = ArrayGeometry::half_wavelength(8, 8, nm.wavelength_m()).unwrap();
        let tx = ls_transmit_beamformer(&geom, Angle2D::new(0.2, 0.4).unwrap(), C64::new(1.0, 0.0))
            .unwrap();
        let rxbf = sensing_receive_beamformer(&tx);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut y = VectorGrid::zeros(128, 128, 64);
        for v in y.values_mut() {
            *v = complex_gaussian(&mut rng, 1.0);
        }
        let s = gen_sensing_symbols(&nm, 2);
        let echo = extract_echo(&y, &rxbf, &s).unwrap();
        let var = echo.values.iter().map(|z| z.norm_sqr()).sum::<f64>() / echo.values.len() as f64;
        let expected = norm_sqr(&rxbf.weights);
        assert!((var / expected - 1.0).abs() < 0.05);

        let zero = extract_echo(&VectorGrid::zeros(128, 128, 64), &rxbf, &s).unwrap();
        assert!(zero.values.iter().all(|z| *z == C64::new(0.0, 0.0)));
    }
}
