//! Least-squares and weighted-L1 primitives shared by every estimator.
//!
//! The penalized objective is
//!
//! ```text
//! ||y - b0 - W theta||^2 + lambda * sum_j tau_j |theta_j|
//! ```
//!
//! with no `1/n` factor and an unpenalized intercept `b0`. Weights may be
//! `+inf`; such coordinates are dropped before the descent and come back as
//! exact zeros.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::TimeSeriesDataset;
use crate::error::{Error, Result};
use crate::estimators::Family;

/// Relative size of an R diagonal (on unit-norm columns) below which the
/// design counts as rank deficient.
const RANK_TOL: f64 = 1e-10;

/// Internal KKT tolerance applied before declaring convergence. Stricter than
/// the tolerance the acceptance checks use.
const INTERNAL_KKT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub family: Family,
    pub lambda: f64,
    /// Per-coefficient weights; `f64::INFINITY` forces the coefficient to zero.
    pub weights: Vec<f64>,
    pub gamma: f64,
}

impl PenaltySpec {
    pub fn new(family: Family, lambda: f64, weights: Vec<f64>) -> Self {
        Self { family, lambda, weights, gamma: 1.0 }
    }

    /// Unit weights over `p` coefficients.
    pub fn uniform(family: Family, lambda: f64, p: usize) -> Self {
        Self::new(family, lambda, vec![1.0; p])
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidInput(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        if self.weights.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "{} penalty weights for {} coefficients",
                self.weights.len(),
                p
            )));
        }
        if let Some(w) = self.weights.iter().find(|w| !(**w >= 0.0)) {
            return Err(Error::InvalidInput(format!("penalty weight {w} is negative or NaN")));
        }
        if !(self.gamma >= 1.0) {
            return Err(Error::InvalidInput(format!("gamma must be >= 1, got {}", self.gamma)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Sweep stops once the largest coordinate change is below
    /// `tol * max(1, ||theta||_inf)`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    /// Indices `j` with `coefficients[j] != 0`, ascending.
    pub active_set: Vec<usize>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Penalty actually imposed (absent for unpenalized fits).
    pub penalty: Option<PenaltySpec>,
    /// First-stage fit of a two-stage estimator.
    pub stage_detail: Option<Box<FitResult>>,
}

impl FitResult {
    pub(crate) fn from_parts(
        coefficients: Vec<f64>,
        intercept: f64,
        objective: f64,
        iterations: usize,
        converged: bool,
        penalty: Option<PenaltySpec>,
    ) -> Self {
        let active_set = active_indices(&coefficients);
        Self { coefficients, intercept, active_set, objective, iterations, converged, penalty, stage_detail: None }
    }

    /// Intercept-only (or empty) fit.
    pub(crate) fn zero(data: &TimeSeriesDataset, include_intercept: bool, penalty: Option<PenaltySpec>) -> Self {
        let p = data.p();
        let intercept = if include_intercept { data.y().mean() } else { 0.0 };
        let objective = data.y().iter().map(|v| (v - intercept).powi(2)).sum();
        Self::from_parts(vec![0.0; p], intercept, objective, 0, true, penalty)
    }

    /// Maps a non-converged fit to [`Error::NonConvergence`].
    pub fn ensure_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence { iterations: self.iterations, last_change: f64::NAN })
        }
    }

    /// One-row-at-a-time forecast `intercept + x' theta`.
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept + row.iter().zip(&self.coefficients).map(|(x, b)| x * b).sum::<f64>()
    }

    pub fn predict(&self, data: &TimeSeriesDataset) -> DVector<f64> {
        data.predict(self.intercept, &self.coefficients)
    }

    pub fn is_zero(&self, j: usize) -> bool {
        self.coefficients[j] == 0.0
    }
}

pub(crate) fn active_indices(theta: &[f64]) -> Vec<usize> {
    theta.iter().enumerate().filter(|(_, b)| **b != 0.0).map(|(j, _)| j).collect()
}

/// `sign(z) * max(|z| - t, 0)`.
pub fn soft_threshold(z: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Standard deviation with the `1/n` divisor. Returns 0 for constant input.
pub fn sample_std(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// `||y - b0 - W theta||^2 + lambda * sum tau_j |theta_j|`.
///
/// Zero coefficients contribute nothing even when their weight is infinite.
pub fn penalized_objective(
    data: &TimeSeriesDataset,
    intercept: f64,
    theta: &[f64],
    lambda: f64,
    weights: &[f64],
) -> f64 {
    let resid = data.y() - data.predict(intercept, theta);
    let rss = resid.norm_squared();
    let pen: f64 = theta
        .iter()
        .zip(weights)
        .filter(|(b, _)| **b != 0.0)
        .map(|(b, w)| w * b.abs())
        .sum();
    rss + lambda * pen
}

/// Least squares over the columns in `subset`.
///
/// Coefficients outside `subset` are zero. Uses Householder QR on
/// unit-norm-scaled columns, and reports [`Error::SingularDesign`] when an R
/// diagonal falls below `1e-10`.
pub fn ols_fit(data: &TimeSeriesDataset, subset: &[usize], include_intercept: bool) -> Result<FitResult> {
    let n = data.n();
    let p = data.p();
    if let Some(&j) = subset.iter().find(|&&j| j >= p) {
        return Err(Error::DimensionMismatch(format!("subset index {j} out of range for p = {p}")));
    }
    let mut cols: Vec<usize> = subset.to_vec();
    cols.sort_unstable();
    cols.dedup();

    let k = cols.len() + usize::from(include_intercept);
    if k == 0 {
        return Ok(FitResult::zero(data, false, None));
    }
    if n < k {
        return Err(Error::SingularDesign { columns: cols });
    }

    let w = data.predictors();
    let offset = usize::from(include_intercept);
    let mut a = DMatrix::<f64>::zeros(n, k);
    if include_intercept {
        a.column_mut(0).fill(1.0);
    }
    for (c, &j) in cols.iter().enumerate() {
        a.column_mut(c + offset).copy_from(&w.column(j));
    }
    let norms: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    for (c, &s) in norms.iter().enumerate() {
        if s == 0.0 {
            return Err(Error::SingularDesign { columns: cols });
        }
        a.column_mut(c).unscale_mut(s);
    }

    let qr = a.qr();
    let r = qr.r();
    if (0..k).any(|i| r[(i, i)].abs() < RANK_TOL) {
        return Err(Error::SingularDesign { columns: cols });
    }
    let mut qty = data.y().clone();
    qr.q_tr_mul(&mut qty);
    let head = qty.rows(0, k).into_owned();
    let sol = r
        .solve_upper_triangular(&head)
        .ok_or_else(|| Error::SingularDesign { columns: cols.clone() })?;

    let mut theta = vec![0.0; p];
    for (c, &j) in cols.iter().enumerate() {
        theta[j] = sol[c + offset] / norms[c + offset];
    }
    let intercept = if include_intercept { sol[0] / norms[0] } else { 0.0 };
    let objective = penalized_objective(data, intercept, &theta, 0.0, &vec![0.0; p]);

    let mut fit = FitResult::from_parts(theta, intercept, objective, 0, true, None);
    // Exact zeros can occur for subset columns; they still belong to the fit.
    fit.active_set = cols.into_iter().filter(|&j| fit.coefficients[j] != 0.0).collect();
    Ok(fit)
}

/// Minimizes the weighted-L1 objective from a cold start.
pub fn weighted_lasso_solve(
    data: &TimeSeriesDataset,
    penalty: &PenaltySpec,
    include_intercept: bool,
) -> Result<FitResult> {
    weighted_lasso_solve_with(data, penalty, include_intercept, &SolverOptions::default(), None)
}

/// Minimizes the weighted-L1 objective with explicit options and an optional
/// warm start (length `p`).
///
/// A run that exhausts `max_iter` is returned with `converged == false`; use
/// [`FitResult::ensure_converged`] to turn it into an error.
pub fn weighted_lasso_solve_with(
    data: &TimeSeriesDataset,
    penalty: &PenaltySpec,
    include_intercept: bool,
    opts: &SolverOptions,
    warm: Option<&[f64]>,
) -> Result<FitResult> {
    let p = data.p();
    penalty.validate(p)?;
    if let Some(w) = warm {
        if w.len() != p {
            return Err(Error::DimensionMismatch(format!("warm start of length {} for p = {p}", w.len())));
        }
    }

    let free: Vec<usize> = (0..p).filter(|&j| penalty.weights[j].is_finite()).collect();
    if free.is_empty() {
        return Ok(FitResult::zero(data, include_intercept, Some(penalty.clone())));
    }

    let problem = GramProblem::new(data, &free, include_intercept);
    let thresholds: Vec<f64> = free.iter().map(|&j| 0.5 * penalty.lambda * penalty.weights[j]).collect();
    let mut theta: Vec<f64> = match warm {
        Some(w) => free.iter().map(|&j| w[j]).collect(),
        None => vec![0.0; free.len()],
    };
    let scale = kkt_scale(data);
    let outcome = problem.descend(&thresholds, &mut theta, opts, scale);
    if outcome.converged {
        problem.polish(&thresholds, &mut theta, scale);
    }
    if !outcome.converged {
        log::warn!(
            "coordinate descent stopped after {} sweeps, last change {:e}",
            outcome.iterations,
            outcome.last_change
        );
    }

    let mut full = vec![0.0; p];
    for (c, &j) in free.iter().enumerate() {
        full[j] = theta[c];
    }
    let intercept = if include_intercept { problem.intercept(&theta) } else { 0.0 };
    let objective = penalized_objective(data, intercept, &full, penalty.lambda, &penalty.weights);
    Ok(FitResult::from_parts(
        full,
        intercept,
        objective,
        outcome.iterations,
        outcome.converged,
        Some(penalty.clone()),
    ))
}

/// `max(1, ||2 W'y||_inf)`, the scale the KKT tolerances are relative to.
pub fn kkt_scale(data: &TimeSeriesDataset) -> f64 {
    let g = data.predictors().tr_mul(data.y());
    g.iter().fold(1.0_f64, |m, v| m.max(2.0 * v.abs()))
}

/// Residual KKT diagnostics of a weighted-L1 solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktReport {
    /// Largest `|2 w_j'r - lambda tau_j sgn(theta_j)|` over active `j`.
    pub active_violation: f64,
    /// Largest excess `|2 w_j'r| - lambda tau_j` over inactive `j` (0 if none).
    pub inactive_violation: f64,
    /// `|2 * sum(r)|` when an intercept was fitted, else 0.
    pub intercept_violation: f64,
    pub scale: f64,
}

impl KktReport {
    pub fn max_violation(&self) -> f64 {
        self.active_violation.max(self.inactive_violation).max(self.intercept_violation)
    }

    pub fn satisfied(&self, tol: f64) -> bool {
        self.max_violation() <= tol * self.scale
    }
}

/// Evaluates the stationarity and subgradient conditions at `fit`.
pub fn kkt_check(
    data: &TimeSeriesDataset,
    fit: &FitResult,
    lambda: f64,
    weights: &[f64],
    include_intercept: bool,
) -> KktReport {
    let resid = data.y() - fit.predict(data);
    let grad = data.predictors().tr_mul(&resid) * 2.0;
    let mut active_violation = 0.0_f64;
    let mut inactive_violation = 0.0_f64;
    for (j, &b) in fit.coefficients.iter().enumerate() {
        let bound = lambda * weights[j];
        if b != 0.0 {
            active_violation = active_violation.max((grad[j] - bound * b.signum()).abs());
        } else if bound.is_finite() {
            inactive_violation = inactive_violation.max(grad[j].abs() - bound);
        }
    }
    let intercept_violation = if include_intercept { 2.0 * resid.sum().abs() } else { 0.0 };
    KktReport {
        active_violation,
        inactive_violation: inactive_violation.max(0.0),
        intercept_violation,
        scale: kkt_scale(data),
    }
}

struct DescentOutcome {
    iterations: usize,
    converged: bool,
    last_change: f64,
}

/// Centered Gram representation of a least-squares problem restricted to a
/// column subset. Centering profiles out the unpenalized intercept exactly.
struct GramProblem {
    gram: DMatrix<f64>,
    xty: DVector<f64>,
    x_mean: DVector<f64>,
    y_mean: f64,
}

impl GramProblem {
    fn new(data: &TimeSeriesDataset, cols: &[usize], include_intercept: bool) -> Self {
        let n = data.n();
        let w = data.predictors();
        let mut x = DMatrix::<f64>::zeros(n, cols.len());
        for (c, &j) in cols.iter().enumerate() {
            x.column_mut(c).copy_from(&w.column(j));
        }
        let mut y = data.y().clone();
        let (x_mean, y_mean) = if include_intercept {
            let means = DVector::from_iterator(cols.len(), x.column_iter().map(|c| c.mean()));
            for (c, m) in means.iter().enumerate() {
                x.column_mut(c).add_scalar_mut(-m);
            }
            let ym = y.mean();
            y.add_scalar_mut(-ym);
            (means, ym)
        } else {
            (DVector::zeros(cols.len()), 0.0)
        };
        Self { gram: x.tr_mul(&x), xty: x.tr_mul(&y), x_mean, y_mean }
    }

    fn intercept(&self, theta: &[f64]) -> f64 {
        self.y_mean - self.x_mean.iter().zip(theta).map(|(m, b)| m * b).sum::<f64>()
    }

    /// Cyclic coordinate descent on `theta' G theta - 2 c' theta + 2 sum t_j |theta_j|`.
    fn descend(&self, thresholds: &[f64], theta: &mut [f64], opts: &SolverOptions, scale: f64) -> DescentOutcome {
        let k = theta.len();
        let g = &self.gram;
        // resid_grad = c - G theta
        let mut resid_grad: Vec<f64> = (0..k)
            .map(|j| self.xty[j] - (0..k).map(|l| g[(j, l)] * theta[l]).sum::<f64>())
            .collect();

        let mut last_change = f64::INFINITY;
        for iter in 1..=opts.max_iter {
            let mut max_change = 0.0_f64;
            for j in 0..k {
                let gjj = g[(j, j)];
                let old = theta[j];
                let new = if gjj > 0.0 {
                    soft_threshold(resid_grad[j] + gjj * old, thresholds[j]) / gjj
                } else {
                    0.0
                };
                let delta = new - old;
                if delta != 0.0 {
                    theta[j] = new;
                    for (l, rg) in resid_grad.iter_mut().enumerate() {
                        *rg -= g[(l, j)] * delta;
                    }
                    max_change = max_change.max(delta.abs());
                }
            }
            last_change = max_change;
            let theta_max = theta.iter().fold(1.0_f64, |m, b| m.max(b.abs()));
            if max_change < opts.tol * theta_max && self.kkt_ok(thresholds, theta, &resid_grad, scale) {
                return DescentOutcome { iterations: iter, converged: true, last_change };
            }
        }
        DescentOutcome { iterations: opts.max_iter, converged: false, last_change }
    }

    /// Replaces a converged descent iterate by the exact solution of the
    /// stationarity equations on its support and signs, when that solution
    /// keeps the signs and still satisfies the KKT conditions.
    fn polish(&self, thresholds: &[f64], theta: &mut [f64], scale: f64) {
        let active: Vec<usize> = (0..theta.len()).filter(|&j| theta[j] != 0.0).collect();
        if active.is_empty() {
            return;
        }
        let a = active.len();
        let g_aa = DMatrix::from_fn(a, a, |r, c| self.gram[(active[r], active[c])]);
        let rhs = DVector::from_fn(a, |r, _| self.xty[active[r]] - thresholds[active[r]] * theta[active[r]].signum());
        let Some(chol) = g_aa.cholesky() else {
            return;
        };
        let exact = chol.solve(&rhs);
        if active.iter().zip(exact.iter()).any(|(&j, &b)| b == 0.0 || b.signum() != theta[j].signum()) {
            return;
        }
        let mut candidate = vec![0.0; theta.len()];
        for (r, &j) in active.iter().enumerate() {
            candidate[j] = exact[r];
        }
        let resid_grad: Vec<f64> = (0..theta.len())
            .map(|j| self.xty[j] - active.iter().zip(exact.iter()).map(|(&l, &b)| self.gram[(j, l)] * b).sum::<f64>())
            .collect();
        if self.kkt_ok(thresholds, &candidate, &resid_grad, scale) {
            theta.copy_from_slice(&candidate);
        }
    }

    fn kkt_ok(&self, thresholds: &[f64], theta: &[f64], resid_grad: &[f64], scale: f64) -> bool {
        let tol = INTERNAL_KKT_TOL * scale;
        theta.iter().zip(resid_grad).zip(thresholds).all(|((&b, &rg), &t)| {
            let grad = 2.0 * rg;
            let bound = 2.0 * t;
            if b != 0.0 {
                (grad - bound * b.signum()).abs() <= tol
            } else {
                grad.abs() <= bound + tol
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_dataset(n: usize, p: usize, seed: u64) -> TimeSeriesDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cols: Vec<Vec<f64>> = (0..p)
            .map(|_| (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let y = (0..n)
            .map(|i| 0.5 + cols.iter().enumerate().map(|(j, c)| c[i] * (j as f64 - 1.0)).sum::<f64>()
                + rng.sample::<f64, _>(StandardNormal))
            .collect();
        TimeSeriesDataset::from_columns(y, &cols).unwrap()
    }

    /// Normal-equations oracle: explicit inverse of `A'A` (with a leading ones
    /// column when `intercept`).
    fn normal_equations(data: &TimeSeriesDataset, intercept: bool) -> Vec<f64> {
        let n = data.n();
        let p = data.p();
        let k = p + usize::from(intercept);
        let a = DMatrix::from_fn(n, k, |i, j| {
            if intercept && j == 0 {
                1.0
            } else {
                data.predictors()[(i, j - usize::from(intercept))]
            }
        });
        let inv = (a.transpose() * &a).try_inverse().unwrap();
        (inv * a.transpose() * data.y()).iter().copied().collect()
    }

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
    }

    #[test]
    fn sample_std_cases() {
        assert_eq!(sample_std(&[1.0, 1.0, 1.0]), 0.0);
        assert_eq!(sample_std(&[0.0, 2.0]), 1.0);
        assert_abs_diff_eq!(sample_std(&[1.0, 2.0, 3.0, 4.0]), 1.25_f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(sample_std(&[1.0, 2.0, 3.0, 4.0]), 1.118034, epsilon = 1e-6);
    }

    #[test]
    fn ols_constant_fit() {
        let ds = TimeSeriesDataset::new_unchecked_rows(
            DVector::from_element(5, 2.0),
            DMatrix::from_element(5, 1, 1.0),
            vec!["one".into()],
        )
        .unwrap();
        let fit = ols_fit(&ds, &[0], false).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn ols_noiseless_recovery() {
        let x1 = vec![1.0, 2.0, 0.5, -1.0, 3.0, 0.0];
        let x2 = vec![0.3, -0.7, 1.1, 2.0, 0.1, -1.5];
        let y = x1.iter().zip(&x2).map(|(a, b)| a - 3.0 * b).collect();
        let ds = TimeSeriesDataset::from_columns(y, &[x1, x2]).unwrap();
        let fit = ols_fit(&ds, &[0, 1], false).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.coefficients[1], -3.0, epsilon = 1e-12);
    }

    #[test]
    fn ols_matches_normal_equations() {
        let ds = random_dataset(50, 4, 11);
        let fit = ols_fit(&ds, &[0, 1, 2, 3], false).unwrap();
        let oracle = normal_equations(&ds, false);
        for j in 0..4 {
            assert_abs_diff_eq!(fit.coefficients[j], oracle[j], epsilon = 1e-10);
        }
        let fit = ols_fit(&ds, &[0, 1, 2, 3], true).unwrap();
        let oracle = normal_equations(&ds, true);
        assert_abs_diff_eq!(fit.intercept, oracle[0], epsilon = 1e-10);
        for j in 0..4 {
            assert_abs_diff_eq!(fit.coefficients[j], oracle[j + 1], epsilon = 1e-10);
        }
    }

    #[test]
    fn ols_subset_zeroes_others() {
        let ds = random_dataset(40, 4, 3);
        let fit = ols_fit(&ds, &[1, 3], true).unwrap();
        assert_eq!(fit.coefficients[0], 0.0);
        assert_eq!(fit.coefficients[2], 0.0);
        assert_eq!(fit.active_set, vec![1, 3]);
    }

    #[test]
    fn ols_detects_collinearity() {
        let x1: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let x2: Vec<f64> = x1.iter().map(|v| 2.0 * v).collect();
        let y = (0..10).map(|i| (i * i) as f64).collect();
        let ds = TimeSeriesDataset::from_columns(y, &[x1, x2]).unwrap();
        assert!(matches!(ols_fit(&ds, &[0, 1], true), Err(Error::SingularDesign { .. })));
    }

    #[test]
    fn ols_rejects_out_of_range_subset() {
        let ds = random_dataset(20, 2, 1);
        assert!(matches!(ols_fit(&ds, &[5], true), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn lasso_at_zero_lambda_is_ols() {
        for seed in 0..10 {
            let ds = random_dataset(60, 5, seed);
            let ols = ols_fit(&ds, &[0, 1, 2, 3, 4], true).unwrap();
            let fit = weighted_lasso_solve(&ds, &PenaltySpec::uniform(Family::Plasso, 0.0, 5), true).unwrap();
            assert!(fit.converged);
            for j in 0..5 {
                assert_abs_diff_eq!(fit.coefficients[j], ols.coefficients[j], epsilon = 1e-8);
            }
            assert_abs_diff_eq!(fit.intercept, ols.intercept, epsilon = 1e-8);
        }
    }

    #[test]
    fn lasso_full_shrinkage() {
        let ds = random_dataset(60, 5, 4);
        let bound = (ds.predictors().tr_mul(ds.y()) * 2.0).amax();
        let fit = weighted_lasso_solve(&ds, &PenaltySpec::uniform(Family::Plasso, 10.0 * bound, 5), false).unwrap();
        assert!(fit.coefficients.iter().all(|b| *b == 0.0));
        assert!(fit.active_set.is_empty());
    }

    #[test]
    fn infinite_weights_are_exact_zeros() {
        let ds = random_dataset(60, 4, 5);
        let pen = PenaltySpec::new(Family::Alasso, 0.0, vec![1.0, f64::INFINITY, 1.0, f64::INFINITY]);
        let fit = weighted_lasso_solve(&ds, &pen, true).unwrap();
        assert_eq!(fit.coefficients[1], 0.0);
        assert_eq!(fit.coefficients[3], 0.0);
        // Equivalent to OLS on the remaining columns.
        let ols = ols_fit(&ds, &[0, 2], true).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0], ols.coefficients[0], epsilon = 1e-8);
        assert_abs_diff_eq!(fit.coefficients[2], ols.coefficients[2], epsilon = 1e-8);
        assert!(kkt_check(&ds, &fit, 0.0, &pen.weights, true).satisfied(1e-6));
    }

    #[test]
    fn all_infinite_weights_give_intercept_only() {
        let ds = random_dataset(30, 2, 6);
        let pen = PenaltySpec::new(Family::Alasso, 1.0, vec![f64::INFINITY; 2]);
        let fit = weighted_lasso_solve(&ds, &pen, true).unwrap();
        assert!(fit.active_set.is_empty());
        assert_abs_diff_eq!(fit.intercept, ds.y().mean(), epsilon = 1e-14);
    }

    #[test]
    fn rejects_bad_penalties() {
        let ds = random_dataset(30, 2, 7);
        let neg = PenaltySpec::new(Family::Plasso, -1.0, vec![1.0; 2]);
        assert!(matches!(weighted_lasso_solve(&ds, &neg, true), Err(Error::InvalidInput(_))));
        let short = PenaltySpec::new(Family::Plasso, 1.0, vec![1.0]);
        assert!(matches!(weighted_lasso_solve(&ds, &short, true), Err(Error::DimensionMismatch(_))));
        let nan_w = PenaltySpec::new(Family::Plasso, 1.0, vec![1.0, f64::NAN]);
        assert!(matches!(weighted_lasso_solve(&ds, &nan_w, true), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn non_convergence_is_flagged() {
        let ds = random_dataset(40, 4, 8);
        let pen = PenaltySpec::uniform(Family::Plasso, 1.0, 4);
        let opts = SolverOptions { tol: 1e-8, max_iter: 1 };
        let fit = weighted_lasso_solve_with(&ds, &pen, true, &opts, None).unwrap();
        assert!(!fit.converged);
        assert!(matches!(fit.ensure_converged(), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn warm_start_reaches_same_point() {
        let ds = random_dataset(50, 3, 9);
        let pen = PenaltySpec::uniform(Family::Plasso, 5.0, 3);
        let cold = weighted_lasso_solve(&ds, &pen, true).unwrap();
        let opts = SolverOptions::default();
        let warm = weighted_lasso_solve_with(&ds, &pen, true, &opts, Some(&[1.0, -1.0, 2.0])).unwrap();
        for j in 0..3 {
            assert_abs_diff_eq!(cold.coefficients[j], warm.coefficients[j], epsilon = 1e-7);
        }
    }

    #[test]
    fn solutions_are_bit_identical() {
        let ds = random_dataset(50, 4, 10);
        let pen = PenaltySpec::new(Family::Plasso, 3.0, vec![1.0, 0.5, 2.0, 1.0]);
        let a = weighted_lasso_solve(&ds, &pen, true).unwrap();
        let b = weighted_lasso_solve(&ds, &pen, true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn objective_not_worse_than_zero_or_ols() {
        let ds = random_dataset(50, 4, 12);
        let pen = PenaltySpec::new(Family::Plasso, 20.0, vec![1.0, 2.0, 0.5, 1.0]);
        let fit = weighted_lasso_solve(&ds, &pen, true).unwrap();
        let zero = penalized_objective(&ds, ds.y().mean(), &[0.0; 4], pen.lambda, &pen.weights);
        let ols = ols_fit(&ds, &[0, 1, 2, 3], true).unwrap();
        let at_ols = penalized_objective(&ds, ols.intercept, &ols.coefficients, pen.lambda, &pen.weights);
        assert!(fit.objective <= zero + 1e-9);
        assert!(fit.objective <= at_ols + 1e-9);
    }
}
