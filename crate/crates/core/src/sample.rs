//! Immutable sample sets: input coordinates paired with output vectors.

use crate::error::{Error, Result};

/// A set of `n` samples with `dim`-dimensional inputs and `outputs`-dimensional values.
///
/// Storage is row-major: `coords[i * dim..(i + 1) * dim]` is sample `i`.
/// One-dimensional sets are kept sorted by `x` with no repeated coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    dim: usize,
    outputs: usize,
    coords: Vec<f64>,
    values: Vec<f64>,
}

impl SampleSet {
    pub fn new(dim: usize, outputs: usize, coords: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidSamples(format!(
                "input dimension must be 1 or 2, got {dim}"
            )));
        }
        if outputs == 0 {
            return Err(Error::InvalidSamples(
                "output dimension must be >= 1".into(),
            ));
        }
        if !coords.len().is_multiple_of(dim) || !values.len().is_multiple_of(outputs) {
            return Err(Error::InvalidSamples(
                "ragged coordinate or value buffer".into(),
            ));
        }
        let n = coords.len() / dim;
        if n == 0 {
            return Err(Error::InvalidSamples("sample set is empty".into()));
        }
        if values.len() / outputs != n {
            return Err(Error::InvalidSamples(format!(
                "{n} points but {} values",
                values.len() / outputs
            )));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidSamples(format!(
                "non-finite coordinate at sample {}",
                i / dim
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSamples(format!(
                "non-finite value at sample {}",
                i / outputs
            )));
        }
        if dim == 1 {
            if let Some(i) = coords.windows(2).position(|w| w[0] >= w[1]) {
                return Err(Error::InvalidSamples(format!(
                    "1D coordinates must be strictly increasing (sample {})",
                    i + 1
                )));
            }
        }
        Ok(Self {
            dim,
            outputs,
            coords,
            values,
        })
    }

    /// Scalar 1D data from parallel `x` and `y` slices.
    pub fn from_xy(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidSamples(format!(
                "{} x values but {} y values",
                xs.len(),
                ys.len()
            )));
        }
        Self::new(1, 1, xs.to_vec(), ys.to_vec())
    }

    /// 2D data from `(x, y)` points and row-major output vectors.
    pub fn from_points_2d(points: &[(f64, f64)], outputs: usize, values: Vec<f64>) -> Result<Self> {
        let coords = points.iter().flat_map(|&(x, y)| [x, y]).collect();
        Self::new(2, outputs, coords, values)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false: a `SampleSet` holds at least one sample.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn outputs(&self) -> usize {
        self.outputs
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn value(&self, i: usize) -> &[f64] {
        &self.values[i * self.outputs..(i + 1) * self.outputs]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn values(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.outputs)
    }

    pub fn coords_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn values_flat(&self) -> &[f64] {
        &self.values
    }

    /// The `x` coordinate of each sample.
    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.coords.iter().step_by(self.dim).copied()
    }

    /// Sum of squared values over every sample and output component.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Largest absolute output value; 0 for all-zero data.
    pub fn value_scale(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Copy of this set with its values replaced.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.dim, self.outputs, self.coords.clone(), values)
    }

    /// Samples at the given indices, in the given order.
    ///
    /// Returns `None` when `indices` is empty.
    pub fn subset(&self, indices: &[usize]) -> Option<Self> {
        if indices.is_empty() {
            return None;
        }
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        let mut values = Vec::with_capacity(indices.len() * self.outputs);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
            values.extend_from_slice(self.value(i));
        }
        Some(Self {
            dim: self.dim,
            outputs: self.outputs,
            coords,
            values,
        })
    }
}
