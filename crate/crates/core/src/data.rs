use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dgp::TruthInfo;
use crate::error::{Error, Result};

/// Response vector plus predictor matrix for a stacked time-series regression.
///
/// Rows are time-ordered observations. Columns of `predictors` are the
/// candidate regressors; column indices are zero-based throughout the API.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesDataset {
    y: DVector<f64>,
    predictors: DMatrix<f64>,
    names: Vec<String>,
    truth: Option<TruthInfo>,
}

impl TimeSeriesDataset {
    /// Builds a dataset after checking shapes and finiteness.
    ///
    /// Requires at least `p + 2` rows so that a regression with intercept has
    /// a positive residual degree of freedom.
    pub fn new(y: DVector<f64>, predictors: DMatrix<f64>, names: Vec<String>) -> Result<Self> {
        let ds = Self::new_unchecked_rows(y, predictors, names)?;
        if ds.n() < ds.p() + 2 {
            return Err(Error::DimensionMismatch(format!(
                "need n >= p + 2, got n = {}, p = {}",
                ds.n(),
                ds.p()
            )));
        }
        Ok(ds)
    }

    /// Like [`TimeSeriesDataset::new`] without the `n >= p + 2` requirement.
    ///
    /// Used for held-out slices (a single forecast row, a CV block) that are
    /// only ever predicted on, never fitted.
    pub fn new_unchecked_rows(
        y: DVector<f64>,
        predictors: DMatrix<f64>,
        names: Vec<String>,
    ) -> Result<Self> {
        if y.len() != predictors.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "y has {} rows but predictors have {}",
                y.len(),
                predictors.nrows()
            )));
        }
        if names.len() != predictors.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{} names for {} columns",
                names.len(),
                predictors.ncols()
            )));
        }
        if let Some(row) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { column: "y".into(), row });
        }
        for (j, col) in predictors.column_iter().enumerate() {
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteValue { column: names[j].clone(), row });
            }
        }
        Ok(Self { y, predictors, names, truth: None })
    }

    /// Convenience constructor with generated names `x1..xp`.
    pub fn from_columns(y: Vec<f64>, columns: &[Vec<f64>]) -> Result<Self> {
        let n = y.len();
        let p = columns.len();
        if let Some(bad) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "column of length {} for {} responses",
                bad.len(),
                n
            )));
        }
        let w = DMatrix::from_fn(n, p, |i, j| columns[j][i]);
        let names = (1..=p).map(|j| format!("x{j}")).collect();
        Self::new(DVector::from_vec(y), w, names)
    }

    pub fn with_truth(mut self, truth: TruthInfo) -> Result<Self> {
        if truth.theta_star.len() != self.p() {
            return Err(Error::DimensionMismatch(format!(
                "truth has {} coefficients for {} columns",
                truth.theta_star.len(),
                self.p()
            )));
        }
        self.truth = Some(truth);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.predictors.ncols()
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn predictors(&self) -> &DMatrix<f64> {
        &self.predictors
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn truth(&self) -> Option<&TruthInfo> {
        self.truth.as_ref()
    }

    /// Copies the rows at `rows` (in the given order); truth is carried over.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let p = self.p();
        let y = DVector::from_iterator(rows.len(), rows.iter().map(|&i| self.y[i]));
        let w = DMatrix::from_fn(rows.len(), p, |r, j| self.predictors[(rows[r], j)]);
        Self { y, predictors: w, names: self.names.clone(), truth: self.truth.clone() }
    }

    /// Contiguous row range `[start, end)`.
    pub fn slice_rows(&self, start: usize, end: usize) -> Self {
        let rows: Vec<usize> = (start..end).collect();
        self.select_rows(&rows)
    }

    /// Returns a copy with column `j` multiplied by `c`.
    ///
    /// Truth coefficients, when present, are divided by `c` so that the
    /// model's conditional mean is unchanged.
    pub fn scale_column(&self, j: usize, c: f64) -> Self {
        let mut out = self.clone();
        out.predictors.column_mut(j).scale_mut(c);
        if let Some(t) = out.truth.as_mut() {
            t.theta_star[j] /= c;
        }
        out
    }

    /// Fitted values `intercept + W theta`.
    pub fn predict(&self, intercept: f64, theta: &[f64]) -> DVector<f64> {
        let theta = DVector::from_column_slice(theta);
        let mut out = &self.predictors * theta;
        out.add_scalar_mut(intercept);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_samples() {
        let err = TimeSeriesDataset::from_columns(vec![1.0, 2.0, 3.0], &vec![vec![1.0, 2.0, 3.0]; 2]);
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn rejects_non_finite() {
        let err = TimeSeriesDataset::from_columns(
            vec![1.0, 2.0, 3.0, 4.0],
            &[vec![1.0, f64::NAN, 3.0, 4.0]],
        );
        assert!(matches!(err, Err(Error::NonFiniteValue { row: 1, .. })));
    }

    #[test]
    fn select_rows_keeps_order() {
        let ds = TimeSeriesDataset::from_columns(
            vec![1.0, 2.0, 3.0, 4.0],
            &[vec![10.0, 20.0, 30.0, 40.0]],
        )
        .unwrap();
        let sub = ds.select_rows(&[3, 0]);
        assert_eq!(sub.y().as_slice(), &[4.0, 1.0]);
        assert_eq!(sub.predictors()[(0, 0)], 40.0);
    }
}
