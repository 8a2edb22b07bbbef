//! Square Gray-coded QAM, known preamble and constant-modulus sensing symbols,
//! and maximum-likelihood demapping.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scene::OfdmNumerology;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct QamConstellation {
    order: usize,
    bits_per_symbol: usize,
    /// `points[label]`; the label's bits, MSB first, are the transmitted bits.
    points: Vec<C64>,
}

/// Gray-coded square QAM with unit average energy.
///
/// The first half of a label's bits select the in-phase level and the second
/// half the quadrature level, each through a binary-reflected Gray code, so
/// horizontally or vertically adjacent points differ in exactly one bit.
pub fn build_constellation(order: usize) -> Result<QamConstellation> {
    if !matches!(order, 4 | 16 | 64) {
        return Err(Error::UnsupportedOrder(order));
    }
    let bits_per_symbol = order.trailing_zeros() as usize;
    let axis_bits = bits_per_symbol / 2;
    let levels = 1usize << axis_bits;
    let scale = (2.0 * (order as f64 - 1.0) / 3.0).sqrt().recip();
    let amplitude = |gray: usize| {
        let i = gray_decode(gray);
        (2.0 * i as f64 - (levels as f64 - 1.0)) * scale
    };
    let points = (0..order)
        .map(|label| {
            let i_bits = label >> axis_bits;
            let q_bits = label & (levels - 1);
            C64::new(amplitude(i_bits), amplitude(q_bits))
        })
        .collect();
    Ok(QamConstellation {
        order,
        bits_per_symbol,
        points,
    })
}

fn gray_decode(mut g: usize) -> usize {
    let mut b = g;
    while g > 0 {
        g >>= 1;
        b ^= g;
    }
    b
}

impl QamConstellation {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn average_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.order as f64
    }

    /// Bits of `label`, MSB first.
    pub fn bits_of(&self, label: usize) -> impl Iterator<Item = u8> + '_ {
        (0..self.bits_per_symbol)
            .rev()
            .map(move |k| ((label >> k) & 1) as u8)
    }

    pub fn label_of(&self, bits: &[u8]) -> usize {
        bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1) as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    UplinkData,
    Sensing,
    Preamble,
    Observation,
}

/// `num_subcarriers x num_symbols` complex scalars, subcarrier-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolGrid {
    pub num_subcarriers: usize,
    pub num_symbols: usize,
    pub kind: SymbolKind,
    pub values: Vec<C64>,
}

impl SymbolGrid {
    pub fn filled(
        num_subcarriers: usize,
        num_symbols: usize,
        kind: SymbolKind,
        value: C64,
    ) -> Self {
        Self {
            num_subcarriers,
            num_symbols,
            kind,
            values: vec![value; num_subcarriers * num_symbols],
        }
    }

    #[inline]
    pub fn get(&self, n: usize, m: usize) -> C64 {
        self.values[n * self.num_symbols + m]
    }

    #[inline]
    pub fn set(&mut self, n: usize, m: usize, v: C64) {
        self.values[n * self.num_symbols + m] = v;
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.num_subcarriers, self.num_symbols)
    }
}

/// Maps `N_c·M_s·log2(M)` bits onto an uplink data grid, one label per cell
/// in subcarrier-major order.
pub fn map_bits(
    bits: &[u8],
    constellation: &QamConstellation,
    numerology: &OfdmNumerology,
) -> Result<SymbolGrid> {
    let (nc, ms) = (numerology.num_subcarriers, numerology.num_symbols);
    let k = constellation.bits_per_symbol();
    if bits.len() != nc * ms * k {
        return Err(Error::DimensionMismatch(format!(
            "{} bits for a {nc}x{ms} grid at {k} bits/symbol",
            bits.len()
        )));
    }
    let values = bits
        .chunks_exact(k)
        .map(|c| constellation.points[constellation.label_of(c)])
        .collect();
    Ok(SymbolGrid {
        num_subcarriers: nc,
        num_symbols: ms,
        kind: SymbolKind::UplinkData,
        values,
    })
}

pub fn random_bits<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<u8> {
    (0..count).map(|_| rng.random::<bool>() as u8).collect()
}

/// Unit-modulus sensing symbols with i.i.d. uniform phases.
pub fn gen_sensing_symbols(numerology: &OfdmNumerology, seed: u64) -> SymbolGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gen_sensing_symbols_with_rng(numerology, &mut rng)
}

pub fn gen_sensing_symbols_with_rng<R: Rng + ?Sized>(
    numerology: &OfdmNumerology,
    rng: &mut R,
) -> SymbolGrid {
    let (nc, ms) = (numerology.num_subcarriers, numerology.num_symbols);
    let values = (0..nc * ms)
        .map(|_| C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)))
        .collect();
    SymbolGrid {
        num_subcarriers: nc,
        num_symbols: ms,
        kind: SymbolKind::Sensing,
        values,
    }
}

/// Known preamble: a Zadoff-Chu phase sequence across subcarriers, shifted by
/// one position per preamble symbol.
pub fn gen_preamble(
    num_preamble_symbols: usize,
    numerology: &OfdmNumerology,
) -> Result<SymbolGrid> {
    if num_preamble_symbols == 0 {
        return Err(Error::InvalidParameter(
            "need at least one preamble symbol".into(),
        ));
    }
    let nc = numerology.num_subcarriers;
    let len = nc as f64;
    let mut values = Vec::with_capacity(nc * num_preamble_symbols);
    for n in 0..nc {
        for m in 0..num_preamble_symbols {
            let k = ((n + m) % nc) as f64;
            values.push(C64::from_polar(1.0, -PI * k * k / len));
        }
    }
    Ok(SymbolGrid {
        num_subcarriers: nc,
        num_symbols: num_preamble_symbols,
        kind: SymbolKind::Preamble,
        values,
    })
}

/// Nearest constellation point to `observed`. Ties resolve to the lowest
/// label. Returns `(label, point)`.
pub fn demap_ml(observed: C64, constellation: &QamConstellation) -> Result<(usize, C64)> {
    if !(observed.re.is_finite() && observed.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (i, p) in constellation.points.iter().enumerate() {
        let d = (observed - p).norm_sqr();
        if d < best_dist {
            best = i;
            best_dist = d;
        }
    }
    Ok((best, constellation.points[best]))
}
