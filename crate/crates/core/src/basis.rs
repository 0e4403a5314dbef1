//! Monomial bases for 1D and 2D power series.
//!
//! Term order is fixed: ascending `k` for 1D, and `(k, j)` lexicographic for
//! 2D where the term is `x^k * y^j`. Every basis includes the constant term.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::SampleSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Basis {
    /// `1, x, ..., x^degree`
    Univariate { degree: u32 },
    /// `x^k * y^j` for `0 <= k <= degree_x`, `0 <= j <= degree_y`
    Bivariate { degree_x: u32, degree_y: u32 },
}

impl Basis {
    pub fn univariate(degree: u32) -> Self {
        Basis::Univariate { degree }
    }

    pub fn bivariate(degree_x: u32, degree_y: u32) -> Self {
        Basis::Bivariate { degree_x, degree_y }
    }

    /// Input dimension the basis expects.
    pub fn dim(&self) -> usize {
        match self {
            Basis::Univariate { .. } => 1,
            Basis::Bivariate { .. } => 2,
        }
    }

    pub fn term_count(&self) -> usize {
        match *self {
            Basis::Univariate { degree } => degree as usize + 1,
            Basis::Bivariate { degree_x, degree_y } => {
                (degree_x as usize + 1) * (degree_y as usize + 1)
            }
        }
    }

    /// Complexity used by the penalty: the degree cap in 1D, the larger cap in 2D.
    pub fn complexity(&self) -> u32 {
        match *self {
            Basis::Univariate { degree } => degree,
            Basis::Bivariate { degree_x, degree_y } => degree_x.max(degree_y),
        }
    }

    /// Degree caps, one per input axis.
    pub fn degrees(&self) -> Vec<u32> {
        match *self {
            Basis::Univariate { degree } => vec![degree],
            Basis::Bivariate { degree_x, degree_y } => vec![degree_x, degree_y],
        }
    }

    /// Exponent pairs `(k, j)` in term order (`j` is always 0 in 1D).
    pub fn exponents(&self) -> Vec<(u32, u32)> {
        match *self {
            Basis::Univariate { degree } => (0..=degree).map(|k| (k, 0)).collect(),
            Basis::Bivariate { degree_x, degree_y } => (0..=degree_x)
                .flat_map(|k| (0..=degree_y).map(move |j| (k, j)))
                .collect(),
        }
    }

    /// Human-readable term names such as `1`, `x^2`, `x*y^3`.
    pub fn term_names(&self) -> Vec<String> {
        fn power(var: &str, e: u32) -> Option<String> {
            match e {
                0 => None,
                1 => Some(var.to_string()),
                _ => Some(format!("{var}^{e}")),
            }
        }
        self.exponents()
            .into_iter()
            .map(|(k, j)| {
                let parts: Vec<String> = [power("x", k), power("y", j)]
                    .into_iter()
                    .flatten()
                    .collect();
                if parts.is_empty() {
                    "1".to_string()
                } else {
                    parts.join("*")
                }
            })
            .collect()
    }

    pub fn label(&self) -> String {
        match *self {
            Basis::Univariate { degree } => format!("1D degree {degree}"),
            Basis::Bivariate { degree_x, degree_y } => {
                format!("2D degree ({degree_x}, {degree_y})")
            }
        }
    }

    pub(crate) fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: point.len(),
            });
        }
        Ok(())
    }

    /// Writes the monomials of `point` into `row` in term order.
    ///
    /// `row` must hold exactly `term_count()` entries and `point` must have `dim()` coordinates.
    pub(crate) fn fill_row(&self, point: &[f64], row: &mut [f64]) {
        match *self {
            Basis::Univariate { .. } => {
                let x = point[0];
                let mut acc = 1.0;
                for slot in row.iter_mut() {
                    *slot = acc;
                    acc *= x;
                }
            }
            Basis::Bivariate { degree_y, .. } => {
                let (x, y) = (point[0], point[1]);
                let stride = degree_y as usize + 1;
                let mut xk = 1.0;
                for chunk in row.chunks_exact_mut(stride) {
                    let mut v = xk;
                    for slot in chunk.iter_mut() {
                        *slot = v;
                        v *= y;
                    }
                    xk *= x;
                }
            }
        }
    }

    /// Monomial row for a single point.
    pub fn row(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.check_point(point)?;
        let mut row = vec![0.0; self.term_count()];
        self.fill_row(point, &mut row);
        Ok(row)
    }
}

/// Design matrix with one row per sample and one column per basis term.
pub fn design_matrix(data: &SampleSet, basis: &Basis) -> Result<DMatrix<f64>> {
    if data.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            actual: data.dim(),
        });
    }
    let p = basis.term_count();
    let mut m = DMatrix::zeros(data.len(), p);
    let mut row = vec![0.0; p];
    for (i, point) in data.points().enumerate() {
        basis.fill_row(point, &mut row);
        for (t, v) in row.iter().enumerate() {
            m[(i, t)] = *v;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn univariate_row() {
        assert_eq!(
            Basis::univariate(2).row(&[2.0]).unwrap(),
            vec![1.0, 2.0, 4.0]
        );
        assert_eq!(Basis::univariate(0).row(&[7.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn bivariate_row_is_k_j_lexicographic() {
        assert_eq!(
            Basis::bivariate(1, 1).row(&[2.0, 3.0]).unwrap(),
            vec![1.0, 3.0, 2.0, 6.0]
        );
        assert_eq!(
            Basis::bivariate(3, 3).row(&[1.0, 1.0]).unwrap(),
            vec![1.0; 16]
        );
    }

    #[test]
    fn term_counts_and_names() {
        assert_eq!(Basis::univariate(2).term_count(), 3);
        assert_eq!(Basis::bivariate(3, 3).term_count(), 16);
        assert_eq!(Basis::bivariate(2, 1).term_count(), 6);
        assert_eq!(
            Basis::bivariate(1, 2).term_names(),
            vec!["1", "y", "y^2", "x", "x*y", "x*y^2"]
        );
        assert_eq!(Basis::univariate(2).term_names(), vec!["1", "x", "x^2"]);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            Basis::univariate(1).row(&[1.0, 2.0]),
            Err(Error::DimensionMismatch {
                expected: 1,
                actual: 2
            })
        ));
        let data = SampleSet::from_xy(&[0.0, 1.0], &[0.0, 1.0]).unwrap();
        assert!(design_matrix(&data, &Basis::bivariate(1, 1)).is_err());
    }

    #[test]
    fn design_matrix_constant_column() {
        let data = SampleSet::from_xy(&[-1.0, 0.5, 3.0], &[0.0; 3]).unwrap();
        let m = design_matrix(&data, &Basis::univariate(3)).unwrap();
        assert!(m.column(0).iter().all(|&v| v == 1.0));
        assert_eq!(m[(2, 3)], 27.0);
    }
}
