//! Dense storage for per-cell antenna vectors over the (subcarrier, symbol)
//! plane.

use crate::{Error, Result, C64};

/// `num_subcarriers x num_symbols` cells, each holding a complex vector of
/// length `dim`. Storage is subcarrier-major: cell `(n, m)` starts at
/// `(n * num_symbols + m) * dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorGrid {
    num_subcarriers: usize,
    num_symbols: usize,
    dim: usize,
    values: Vec<C64>,
}

/// Post-precoding channel responses `h_{n,m}`.
pub type ChannelGrid = VectorGrid;
/// Received antenna vectors `y_{n,m}`.
pub type ObservationGrid = VectorGrid;

impl VectorGrid {
    pub fn zeros(num_subcarriers: usize, num_symbols: usize, dim: usize) -> Self {
        Self {
            num_subcarriers,
            num_symbols,
            dim,
            values: vec![C64::new(0.0, 0.0); num_subcarriers * num_symbols * dim],
        }
    }

    pub fn from_vec(
        num_subcarriers: usize,
        num_symbols: usize,
        dim: usize,
        values: Vec<C64>,
    ) -> Result<Self> {
        if values.len() != num_subcarriers * num_symbols * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} values for a {}x{}x{} grid, got {}",
                num_subcarriers * num_symbols * dim,
                num_subcarriers,
                num_symbols,
                dim,
                values.len()
            )));
        }
        Ok(Self {
            num_subcarriers,
            num_symbols,
            dim,
            values,
        })
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }

    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.num_subcarriers, self.num_symbols, self.dim)
    }

    #[inline]
    pub fn cell(&self, n: usize, m: usize) -> &[C64] {
        let start = (n * self.num_symbols + m) * self.dim;
        &self.values[start..start + self.dim]
    }

    #[inline]
    pub fn cell_mut(&mut self, n: usize, m: usize) -> &mut [C64] {
        let start = (n * self.num_symbols + m) * self.dim;
        &mut self.values[start..start + self.dim]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    /// Iterates cells in storage order as `(n, m, vector)`.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, &[C64])> {
        let ms = self.num_symbols;
        self.values
            .chunks_exact(self.dim)
            .enumerate()
            .map(move |(i, v)| (i / ms, i % ms, v))
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// `wᴴ v`
#[inline]
pub fn inner(w: &[C64], v: &[C64]) -> C64 {
    w.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// `aᵀ v` (no conjugation)
#[inline]
pub fn dot(a: &[C64], v: &[C64]) -> C64 {
    a.iter().zip(v).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}
