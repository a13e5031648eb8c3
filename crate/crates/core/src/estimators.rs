//! The fitting strategies: OLS, oracle OLS, plain / standardized / adaptive /
//! twin-adaptive LASSO, and the historical-mean benchmark.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::TimeSeriesDataset;
use crate::error::{Error, Result};
use crate::tuning::LossScale;
use crate::solver::{
    ols_fit, sample_std, weighted_lasso_solve_with, FitResult, PenaltySpec, SolverOptions,
};

/// OLS coefficients smaller than this in magnitude get an infinite adaptive weight.
pub const ZERO_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Oracle,
    Ols,
    Alasso,
    #[serde(rename = "talasso")]
    TAlasso,
    Plasso,
    Slasso,
}

impl Family {
    pub const ALL: [Family; 6] =
        [Family::Oracle, Family::Ols, Family::Alasso, Family::TAlasso, Family::Plasso, Family::Slasso];

    pub const PENALIZED: [Family; 4] = [Family::Alasso, Family::TAlasso, Family::Plasso, Family::Slasso];

    pub fn is_penalized(self) -> bool {
        !matches!(self, Family::Oracle | Family::Ols)
    }

    /// Adaptive families use the `sqrt(n) / log(log(n))` tuning rate.
    pub fn is_adaptive(self) -> bool {
        matches!(self, Family::Alasso | Family::TAlasso)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Oracle => "oracle",
            Family::Ols => "ols",
            Family::Alasso => "alasso",
            Family::TAlasso => "talasso",
            Family::Plasso => "plasso",
            Family::Slasso => "slasso",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidInput(format!("unknown estimator `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub gamma: f64,
    pub include_intercept: bool,
    /// Overrides the second-stage lambda of TAlasso (defaults to the first-stage value).
    pub stage2_lambda: Option<f64>,
    pub solver: SolverOptions,
    /// Loss normalization that tuning constants refer to; the solver itself
    /// always minimizes the summed loss.
    #[serde(default)]
    pub loss_scale: LossScale,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            include_intercept: true,
            stage2_lambda: None,
            solver: SolverOptions::default(),
            loss_scale: LossScale::Sum,
        }
    }
}

impl FitOptions {
    pub fn with_gamma(gamma: f64) -> Self {
        Self { gamma, ..Self::default() }
    }
}

fn all_columns(data: &TimeSeriesDataset) -> Vec<usize> {
    (0..data.p()).collect()
}

/// Full-set OLS with intercept.
pub fn ols_full(data: &TimeSeriesDataset) -> Result<FitResult> {
    ols_fit(data, &all_columns(data), true)
}

/// OLS on the true active set; requires simulated data.
pub fn oracle_fit(data: &TimeSeriesDataset) -> Result<FitResult> {
    let truth = data.truth().ok_or(Error::MissingTruth)?;
    ols_fit(data, &truth.active_set, true)
}

pub fn plasso_fit(data: &TimeSeriesDataset, lambda: f64) -> Result<FitResult> {
    plasso_fit_with(data, lambda, &FitOptions::default())
}

pub fn plasso_fit_with(data: &TimeSeriesDataset, lambda: f64, opts: &FitOptions) -> Result<FitResult> {
    let penalty = PenaltySpec::uniform(Family::Plasso, lambda, data.p());
    weighted_lasso_solve_with(data, &penalty, opts.include_intercept, &opts.solver, None)
}

/// Penalty weights are the `1/n` standard deviations of the columns. A
/// constant column gets weight 0 (unpenalized) and a logged warning.
pub fn slasso_fit(data: &TimeSeriesDataset, lambda: f64) -> Result<FitResult> {
    slasso_fit_with(data, lambda, &FitOptions::default())
}

pub fn slasso_fit_with(data: &TimeSeriesDataset, lambda: f64, opts: &FitOptions) -> Result<FitResult> {
    let weights: Vec<f64> = data
        .predictors()
        .column_iter()
        .map(|c| sample_std(c.as_slice()))
        .collect();
    for (j, w) in weights.iter().enumerate() {
        if *w == 0.0 {
            log::warn!("column `{}` is constant; its Slasso coefficient is unpenalized", data.names()[j]);
        }
    }
    let penalty = PenaltySpec::new(Family::Slasso, lambda, weights);
    weighted_lasso_solve_with(data, &penalty, opts.include_intercept, &opts.solver, None)
}

/// `|b|^{-gamma}`, or infinity when `|b| < ZERO_EPS`.
pub fn adaptive_weights(initial: &[f64], gamma: f64) -> Vec<f64> {
    initial
        .iter()
        .map(|b| if b.abs() < ZERO_EPS { f64::INFINITY } else { b.abs().powf(-gamma) })
        .collect()
}

pub fn alasso_fit(data: &TimeSeriesDataset, lambda: f64, gamma: f64) -> Result<FitResult> {
    alasso_fit_with(data, lambda, &FitOptions::with_gamma(gamma))
}

/// Adaptive LASSO with the full OLS fit as initial estimator.
pub fn alasso_fit_with(data: &TimeSeriesDataset, lambda: f64, opts: &FitOptions) -> Result<FitResult> {
    let init = ols_fit(data, &all_columns(data), opts.include_intercept)?;
    let mut penalty = PenaltySpec::new(Family::Alasso, lambda, adaptive_weights(&init.coefficients, opts.gamma));
    penalty.gamma = opts.gamma;
    weighted_lasso_solve_with(data, &penalty, opts.include_intercept, &opts.solver, None)
}

pub fn talasso_fit(data: &TimeSeriesDataset, lambda: f64, gamma: f64) -> Result<FitResult> {
    talasso_fit_with(data, lambda, &FitOptions::with_gamma(gamma))
}

/// Twin adaptive LASSO.
///
/// Stage one is [`alasso_fit_with`]. If it selects nothing the result is the
/// intercept-only fit. Otherwise OLS is refitted on the selected columns, the
/// refit supplies new adaptive weights, and a second weighted LASSO runs over
/// the selected columns only. The stage-one fit is kept in `stage_detail`.
pub fn talasso_fit_with(data: &TimeSeriesDataset, lambda: f64, opts: &FitOptions) -> Result<FitResult> {
    let stage1 = alasso_fit_with(data, lambda, opts)?;
    let lambda2 = opts.stage2_lambda.unwrap_or(lambda);

    let mut out = if stage1.active_set.is_empty() {
        let mut penalty = PenaltySpec::new(Family::TAlasso, lambda2, vec![f64::INFINITY; data.p()]);
        penalty.gamma = opts.gamma;
        FitResult::zero(data, opts.include_intercept, Some(penalty))
    } else {
        let post = ols_fit(data, &stage1.active_set, opts.include_intercept)?;
        let post_weights = adaptive_weights(&post.coefficients, opts.gamma);
        let mut weights = vec![f64::INFINITY; data.p()];
        for &j in &stage1.active_set {
            weights[j] = post_weights[j];
        }
        let mut penalty = PenaltySpec::new(Family::TAlasso, lambda2, weights);
        penalty.gamma = opts.gamma;
        weighted_lasso_solve_with(data, &penalty, opts.include_intercept, &opts.solver, None)?
    };
    out.converged &= stage1.converged;
    out.stage_detail = Some(Box::new(stage1));
    Ok(out)
}

/// Dispatches on `family`. `lambda` is ignored for the unpenalized families.
pub fn fit_family(family: Family, data: &TimeSeriesDataset, lambda: f64, opts: &FitOptions) -> Result<FitResult> {
    match family {
        Family::Ols => ols_fit(data, &all_columns(data), opts.include_intercept),
        Family::Oracle => {
            let truth = data.truth().ok_or(Error::MissingTruth)?;
            ols_fit(data, &truth.active_set, opts.include_intercept)
        }
        Family::Plasso => plasso_fit_with(data, lambda, opts),
        Family::Slasso => slasso_fit_with(data, lambda, opts),
        Family::Alasso => alasso_fit_with(data, lambda, opts),
        Family::TAlasso => talasso_fit_with(data, lambda, opts),
    }
}

/// Random walk with drift: the historical mean of the window.
pub fn rwwd_forecast(window: &[f64]) -> Result<f64> {
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    Ok(window.iter().sum::<f64>() / window.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{simulate_dgp1, simulate_dgp2};
    use crate::solver::kkt_check;
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_dataset(n: usize, p: usize, seed: u64) -> TimeSeriesDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cols: Vec<Vec<f64>> = (0..p)
            .map(|_| (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let y = (0..n)
            .map(|i| 1.0 + 0.8 * cols[0][i] - 0.5 * cols[1 % p][i] + rng.sample::<f64, _>(StandardNormal))
            .collect();
        TimeSeriesDataset::from_columns(y, &cols).unwrap()
    }

    /// Exhaustive grid over `[-5, 5]^2` for a two-column problem with the
    /// intercept profiled out in closed form.
    fn grid_oracle(data: &TimeSeriesDataset, lambda: f64, weights: [f64; 2], step: f64) -> [f64; 2] {
        let x = data.predictors();
        let y = data.y();
        let xm = [x.column(0).mean(), x.column(1).mean()];
        let ym = y.mean();
        let (mut a11, mut a12, mut a22, mut c1, mut c2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..data.n() {
            let u = x[(i, 0)] - xm[0];
            let v = x[(i, 1)] - xm[1];
            let r = y[i] - ym;
            a11 += u * u;
            a12 += u * v;
            a22 += v * v;
            c1 += u * r;
            c2 += v * r;
        }
        let steps = (10.0 / step).round() as i64;
        let mut best = (f64::INFINITY, [0.0, 0.0]);
        for s in 0..=steps {
            let b1 = -5.0 + s as f64 * step;
            let base = a11 * b1 * b1 - 2.0 * c1 * b1 + lambda * weights[0] * b1.abs();
            for t in 0..=steps {
                let b2 = -5.0 + t as f64 * step;
                let obj = base + 2.0 * a12 * b1 * b2 + a22 * b2 * b2 - 2.0 * c2 * b2
                    + lambda * weights[1] * b2.abs();
                if obj < best.0 {
                    best = (obj, [b1, b2]);
                }
            }
        }
        best.1
    }

    #[test]
    fn plasso_limits() {
        let ds = random_dataset(40, 4, 1);
        let ols = ols_full(&ds).unwrap();
        let fit = plasso_fit(&ds, 0.0).unwrap();
        for j in 0..4 {
            assert_abs_diff_eq!(fit.coefficients[j], ols.coefficients[j], epsilon = 1e-8);
        }
        let big = 10.0 * (ds.predictors().tr_mul(ds.y()) * 2.0).amax();
        assert!(plasso_fit(&ds, big).unwrap().active_set.is_empty());
    }

    #[test]
    fn plasso_dgp1_partial_grid_oracle() {
        let sim = simulate_dgp1(40, 2024);
        let ds = sim.slice_rows(0, 40);
        let lambda = 0.00563 * 40f64.sqrt();
        let fit = plasso_fit(&ds, lambda).unwrap();
        let ols = ols_full(&ds).unwrap();
        let mut order: Vec<usize> = (0..8).collect();
        order.sort_by(|&a, &b| ols.coefficients[b].abs().partial_cmp(&ols.coefficients[a].abs()).unwrap());
        let (j, k) = (order[0], order[1]);

        // Remove the contribution of the other six coordinates, then grid-search
        // the remaining two-dimensional problem.
        let mut y_partial = ds.y().clone();
        for l in (0..8).filter(|&l| l != j && l != k) {
            y_partial -= ds.predictors().column(l) * fit.coefficients[l];
        }
        let w2 = DMatrix::from_fn(40, 2, |i, c| ds.predictors()[(i, if c == 0 { j } else { k })]);
        let sub = TimeSeriesDataset::new(DVector::from(y_partial), w2, vec!["a".into(), "b".into()]).unwrap();
        let oracle = grid_oracle(&sub, lambda, [1.0, 1.0], 1e-3);
        assert_abs_diff_eq!(fit.coefficients[j], oracle[0], epsilon = 2e-3);
        assert_abs_diff_eq!(fit.coefficients[k], oracle[1], epsilon = 2e-3);
    }

    #[test]
    fn slasso_limits_and_scale_equivariance() {
        let ds = random_dataset(60, 3, 2);
        let ols = ols_full(&ds).unwrap();
        let fit0 = slasso_fit(&ds, 0.0).unwrap();
        for j in 0..3 {
            assert_abs_diff_eq!(fit0.coefficients[j], ols.coefficients[j], epsilon = 1e-8);
        }
        let fit = slasso_fit(&ds, 8.0).unwrap();
        let scaled = ds.scale_column(1, 100.0);
        let fit_s = slasso_fit(&scaled, 8.0).unwrap();
        let yhat = fit.predict(&ds);
        let yhat_s = fit_s.predict(&scaled);
        for i in 0..ds.n() {
            assert_abs_diff_eq!(yhat[i], yhat_s[i], epsilon = 1e-8);
        }
        assert_abs_diff_eq!(fit_s.coefficients[1], fit.coefficients[1] / 100.0, epsilon = 1e-10);
        assert_eq!(fit.active_set, fit_s.active_set);
    }

    #[test]
    fn slasso_grid_oracle() {
        let ds = random_dataset(60, 2, 3);
        let lambda = 30.0;
        let fit = slasso_fit(&ds, lambda).unwrap();
        let w = [
            sample_std(ds.predictors().column(0).as_slice()),
            sample_std(ds.predictors().column(1).as_slice()),
        ];
        let oracle = grid_oracle(&ds, lambda, w, 1e-3);
        assert_abs_diff_eq!(fit.coefficients[0], oracle[0], epsilon = 2e-3);
        assert_abs_diff_eq!(fit.coefficients[1], oracle[1], epsilon = 2e-3);
    }

    #[test]
    fn slasso_constant_column_is_unpenalized() {
        let mut ds = random_dataset(30, 2, 4);
        let w = DMatrix::from_fn(30, 2, |i, j| if j == 1 { 3.0 } else { ds.predictors()[(i, 0)] });
        ds = TimeSeriesDataset::new(ds.y().clone(), w, vec!["a".into(), "c".into()]).unwrap();
        let fit = slasso_fit(&ds, 1.0).unwrap();
        assert_eq!(fit.penalty.as_ref().unwrap().weights[1], 0.0);
        assert_eq!(fit.coefficients[1], 0.0);
    }

    #[test]
    fn alasso_limits_and_scale_invariance() {
        let ds = random_dataset(80, 4, 5);
        let ols = ols_full(&ds).unwrap();
        let fit0 = alasso_fit(&ds, 0.0, 1.0).unwrap();
        for j in 0..4 {
            assert_abs_diff_eq!(fit0.coefficients[j], ols.coefficients[j], epsilon = 1e-8);
        }
        let fit = alasso_fit(&ds, 4.0, 1.0).unwrap();
        for c in [1e-3, 1e3] {
            let scaled = ds.scale_column(2, c);
            let fit_s = alasso_fit(&scaled, 4.0, 1.0).unwrap();
            assert_eq!(fit.active_set, fit_s.active_set);
            let (a, b) = (fit.predict(&ds), fit_s.predict(&scaled));
            for i in 0..ds.n() {
                assert_abs_diff_eq!(a[i], b[i], epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn alasso_dgp1_satisfies_kkt() {
        let n = 200;
        let ds = simulate_dgp1(n, 99).slice_rows(0, n);
        let nf = n as f64;
        let lambda = 0.5 * nf.sqrt() / nf.ln().ln();
        let fit = alasso_fit(&ds, lambda, 1.0).unwrap();
        let pen = fit.penalty.clone().unwrap();
        assert!(kkt_check(&ds, &fit, pen.lambda, &pen.weights, true).satisfied(1e-6));
    }

    #[test]
    fn gamma_two_is_supported() {
        let ds = random_dataset(80, 4, 6);
        let fit = alasso_fit(&ds, 4.0, 2.0).unwrap();
        let pen = fit.penalty.clone().unwrap();
        assert_eq!(pen.gamma, 2.0);
        assert!(kkt_check(&ds, &fit, pen.lambda, &pen.weights, true).satisfied(1e-6));
        assert!(alasso_fit(&ds, 4.0, 0.5).is_err());
    }

    #[test]
    fn talasso_empty_selection_is_zero_fit() {
        let ds = random_dataset(40, 3, 7);
        let big = 1e12;
        let fit = talasso_fit(&ds, big, 1.0).unwrap();
        assert!(fit.active_set.is_empty());
        assert!(fit.coefficients.iter().all(|b| *b == 0.0));
        assert!(fit.stage_detail.as_ref().unwrap().active_set.is_empty());
    }

    #[test]
    fn talasso_nested_in_alasso() {
        for seed in 0..20 {
            let ds = simulate_dgp2(120, seed).slice_rows(0, 120);
            for c in [0.05, 0.2, 1.0] {
                let lambda = c * 120f64.sqrt() / 120f64.ln().ln();
                let a = alasso_fit(&ds, lambda, 1.0).unwrap();
                let t = talasso_fit(&ds, lambda, 1.0).unwrap();
                assert_eq!(t.stage_detail.as_ref().unwrap().active_set, a.active_set);
                assert!(t.active_set.iter().all(|j| a.active_set.contains(j)));
                let pen = t.penalty.clone().unwrap();
                assert!(kkt_check(&ds, &t, pen.lambda, &pen.weights, true).satisfied(1e-6));
            }
        }
    }

    #[test]
    fn talasso_stage2_lambda_override() {
        let ds = random_dataset(80, 4, 8);
        let opts = FitOptions { stage2_lambda: Some(0.0), ..FitOptions::default() };
        let fit = talasso_fit_with(&ds, 2.0, &opts).unwrap();
        let stage1 = fit.stage_detail.as_ref().unwrap();
        // A zero second-stage penalty reproduces post-selection OLS.
        let post = ols_fit(&ds, &stage1.active_set, true).unwrap();
        for j in 0..4 {
            assert_abs_diff_eq!(fit.coefficients[j], post.coefficients[j], epsilon = 1e-8);
        }
    }

    #[test]
    fn oracle_fit_cases() {
        let sim = simulate_dgp1(100, 3).slice_rows(0, 100);
        let oracle = oracle_fit(&sim).unwrap();
        let direct = ols_fit(&sim, &[0, 1, 2, 3], true).unwrap();
        assert_eq!(oracle, direct);

        let plain = random_dataset(30, 2, 9);
        assert!(matches!(oracle_fit(&plain), Err(Error::MissingTruth)));

        let mut truth = sim.truth().unwrap().clone();
        truth.active_set = (0..8).collect();
        let all = sim.clone().with_truth(truth.clone()).unwrap();
        assert_eq!(oracle_fit(&all).unwrap(), ols_full(&sim).unwrap());

        truth.active_set.clear();
        let none = sim.clone().with_truth(truth).unwrap();
        let fit = oracle_fit(&none).unwrap();
        assert!(fit.active_set.is_empty());
        assert_abs_diff_eq!(fit.intercept, sim.y().mean(), epsilon = 1e-12);
    }

    #[test]
    fn rwwd_cases() {
        assert_eq!(rwwd_forecast(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
        assert_eq!(rwwd_forecast(&[5.0]).unwrap(), 5.0);
        assert_eq!(rwwd_forecast(&[-1.0, 1.0, -1.0, 1.0]).unwrap(), 0.0);
        assert!(matches!(rwwd_forecast(&[]), Err(Error::EmptyWindow)));
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.as_str().parse::<Family>().unwrap(), f);
        }
        assert!("lasso".parse::<Family>().is_err());
    }
}
