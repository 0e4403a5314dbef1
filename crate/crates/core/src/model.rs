//! Power-series models and their least-squares fit.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::basis::{design_matrix, Basis};
use crate::error::{Error, Result};
use crate::sample::SampleSet;

/// Relative tolerance on `|R_jj| / ||a_j||` below which column `j` is treated
/// as linearly dependent on the columns before it.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// A fitted power series: a `term_count x outputs` coefficient matrix over a basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSeriesModel {
    basis: Basis,
    outputs: usize,
    /// Row-major, one row per basis term.
    coefficients: Vec<f64>,
}

impl PowerSeriesModel {
    pub fn new(basis: Basis, outputs: usize, coefficients: Vec<f64>) -> Result<Self> {
        if outputs == 0 || coefficients.len() != basis.term_count() * outputs {
            return Err(Error::Config(format!(
                "{} coefficients do not fit {} with {outputs} outputs",
                coefficients.len(),
                basis.label()
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config("non-finite coefficient".into()));
        }
        Ok(Self {
            basis,
            outputs,
            coefficients,
        })
    }

    pub fn zeros(basis: Basis, outputs: usize) -> Self {
        Self {
            basis,
            outputs,
            coefficients: vec![0.0; basis.term_count() * outputs],
        }
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Coefficient of basis term `term` for output `output`.
    pub fn coefficient(&self, term: usize, output: usize) -> f64 {
        self.coefficients[term * self.outputs + output]
    }

    /// Coefficients as one row per term.
    pub fn coefficient_rows(&self) -> Vec<Vec<f64>> {
        self.coefficients
            .chunks_exact(self.outputs)
            .map(<[f64]>::to_vec)
            .collect()
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.basis.check_point(point)?;
        let mut row = vec![0.0; self.basis.term_count()];
        let mut out = vec![0.0; self.outputs];
        self.evaluate_into(point, &mut row, &mut out);
        Ok(out)
    }

    /// Unchecked evaluation into caller-provided scratch buffers.
    pub(crate) fn evaluate_into(&self, point: &[f64], row: &mut [f64], out: &mut [f64]) {
        self.basis.fill_row(point, row);
        out.fill(0.0);
        for (m, coeffs) in row.iter().zip(self.coefficients.chunks_exact(self.outputs)) {
            for (o, c) in out.iter_mut().zip(coeffs) {
                *o += m * c;
            }
        }
    }
}

/// Least-squares fit of every output column over `basis`, via Householder QR.
///
/// Fails when there are fewer samples than terms or when the design matrix is
/// numerically rank deficient.
pub fn fit(data: &SampleSet, basis: Basis) -> Result<PowerSeriesModel> {
    let design = design_matrix(data, &basis)?;
    let (n, p) = design.shape();
    if n < p {
        return Err(Error::Underdetermined {
            basis: basis.label(),
            rows: n,
            terms: p,
        });
    }
    if p == 1 {
        return fit_constant(data, basis);
    }
    let column_norms: Vec<f64> = design.column_iter().map(|c| c.norm()).collect();

    let qr = design.qr();
    let r = qr.r();
    for (j, &norm) in column_norms.iter().enumerate() {
        if norm == 0.0 || r[(j, j)].abs() <= RANK_TOLERANCE * norm {
            return Err(Error::RankDeficient {
                basis: basis.label(),
                rows: n,
                column: j,
            });
        }
    }

    let m = data.outputs();
    let mut rhs = DMatrix::from_row_slice(n, m, data.values_flat());
    qr.q_tr_mul(&mut rhs);
    let head = rhs.rows(0, p).into_owned();
    let solution = r
        .solve_upper_triangular(&head)
        .ok_or_else(|| Error::RankDeficient {
            basis: basis.label(),
            rows: n,
            column: p - 1,
        })?;

    let mut coefficients = Vec::with_capacity(p * m);
    for t in 0..p {
        for o in 0..m {
            coefficients.push(solution[(t, o)]);
        }
    }
    PowerSeriesModel::new(basis, m, coefficients).map_err(|_| Error::RankDeficient {
        basis: basis.label(),
        rows: n,
        column: p - 1,
    })
}

/// Single-term (constant) basis: the least-squares solution is the mean, taken
/// as an offset from the first sample so that constant data is reproduced exactly.
fn fit_constant(data: &SampleSet, basis: Basis) -> Result<PowerSeriesModel> {
    let m = data.outputs();
    let n = data.len() as f64;
    let first = data.value(0);
    let coefficients = (0..m)
        .map(|o| first[o] + data.values().map(|v| v[o] - first[o]).sum::<f64>() / n)
        .collect();
    PowerSeriesModel::new(basis, m, coefficients)
}
