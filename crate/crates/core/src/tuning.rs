//! Tuning-parameter rates, consecutive-block cross-validation, calibration of
//! the rate constant by simulation, and BIC selection.
//!
//! A shrinkage fit uses `lambda = c * rate(n)` where the rate is `sqrt(n)` for
//! the plain and standardized LASSO and `sqrt(n) / ln(ln(n))` for the adaptive
//! ones. Every selector in this module chooses the constant `c` from a grid;
//! ties go to the larger constant.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::TimeSeriesDataset;
use crate::dgp::{Design, DgpSpec};
use crate::error::{Error, Result};
use crate::estimators::{fit_family, Family, FitOptions};
use crate::evaluation::mpse;
use crate::rng::derive_seed;

pub const DEFAULT_FOLDS: usize = 10;
/// Default candidate grid: `10^(-5 + 0.2 k)`, `k = 0..=35`.
pub const DEFAULT_GRID_POINTS: usize = 36;
pub const DEFAULT_GRID_MIN: f64 = 1e-5;
pub const DEFAULT_GRID_MAX: f64 = 1e2;

const CALIBRATION_TAG: u64 = 0xCA11_B7A7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Schedule {
    SqrtN,
    SqrtNOverLogLog,
}

impl Schedule {
    pub fn for_family(family: Family) -> Self {
        if family.is_adaptive() {
            Schedule::SqrtNOverLogLog
        } else {
            Schedule::SqrtN
        }
    }

    pub fn rate(self, n: usize) -> Result<f64> {
        let nf = n as f64;
        match self {
            Schedule::SqrtN if n >= 1 => Ok(nf.sqrt()),
            Schedule::SqrtNOverLogLog if nf > std::f64::consts::E => Ok(nf.sqrt() / nf.ln().ln()),
            _ => Err(Error::Domain(format!("{self:?} rate undefined at n = {n}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selector {
    Cv,
    Bic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningConfig {
    pub c_lambda: f64,
    pub schedule: Schedule,
    pub grid: Vec<f64>,
    pub folds: usize,
    pub selector: Selector,
}

impl TuningConfig {
    pub fn for_family(family: Family) -> Self {
        Self {
            c_lambda: 1.0,
            schedule: Schedule::for_family(family),
            grid: default_grid(),
            folds: DEFAULT_FOLDS,
            selector: Selector::Cv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_grid(&self.grid)?;
        if self.folds < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 folds, got {}", self.folds)));
        }
        if !(self.c_lambda > 0.0) {
            return Err(Error::InvalidInput("c_lambda must be positive".into()));
        }
        Ok(())
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty tuning grid".into()));
    }
    if let Some(c) = grid.iter().find(|c| !(**c > 0.0) || !c.is_finite()) {
        return Err(Error::InvalidInput(format!("grid value {c} is not positive and finite")));
    }
    Ok(())
}

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect()
        }
    }
}

pub fn default_grid() -> Vec<f64> {
    log_grid(DEFAULT_GRID_MIN, DEFAULT_GRID_MAX, DEFAULT_GRID_POINTS)
}

/// Normalization of the squared loss that a rate constant refers to.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossScale {
    /// `||y - W theta||^2 + lambda * sum_j tau_j |theta_j|`.
    #[default]
    Sum,
    /// `||y - W theta||^2 / (2n) + lambda' * sum_j tau_j |theta_j|`, i.e. `lambda = 2 n lambda'`.
    Mean,
}

impl LossScale {
    pub fn factor(self, n: usize) -> f64 {
        match self {
            LossScale::Sum => 1.0,
            LossScale::Mean => 2.0 * n as f64,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LossScale::Sum => "sum",
            LossScale::Mean => "mean",
        }
    }
}

impl std::str::FromStr for LossScale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sum" => Ok(LossScale::Sum),
            "mean" => Ok(LossScale::Mean),
            other => Err(Error::InvalidInput(format!("loss scale must be `sum` or `mean`, got `{other}`"))),
        }
    }
}

/// Penalty level for the summed loss when `c_lambda` is quoted under `scale`.
pub fn scaled_lambda(c_lambda: f64, n: usize, family: Family, scale: LossScale) -> Result<f64> {
    Ok(lambda_schedule(c_lambda, n, family)? * scale.factor(n))
}

/// `c * sqrt(n)` for Plasso/Slasso, `c * sqrt(n) / ln(ln(n))` for Alasso/TAlasso.
pub fn lambda_schedule(c_lambda: f64, n: usize, family: Family) -> Result<f64> {
    if !(c_lambda > 0.0) {
        return Err(Error::Domain(format!("c_lambda must be positive, got {c_lambda}")));
    }
    if !family.is_penalized() {
        return Err(Error::Domain(format!("{family} takes no tuning parameter")));
    }
    Ok(c_lambda * Schedule::for_family(family).rate(n)?)
}

/// Splits `0..n` into `k` contiguous blocks whose sizes differ by at most one
/// (the first `n % k` blocks are one longer).
pub fn consecutive_folds(n: usize, k: usize) -> Vec<Range<usize>> {
    let base = n / k;
    let extra = n % k;
    let mut start = 0;
    (0..k)
        .map(|b| {
            let len = base + usize::from(b < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

/// Picks the grid value with the smallest score; exact ties go to the larger
/// value. `None` scores are skipped.
fn argmin_prefer_larger(grid: &[f64], scores: &[Option<f64>]) -> Option<f64> {
    let mut best: Option<(f64, f64)> = None;
    for (&c, s) in grid.iter().zip(scores) {
        let Some(s) = *s else { continue };
        best = match best {
            None => Some((c, s)),
            Some((bc, bs)) if s < bs || (s == bs && c > bc) => Some((c, s)),
            keep => keep,
        };
    }
    best.map(|(c, _)| c)
}

/// Per-candidate scores from a selection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionOutcome {
    pub c_lambda: f64,
    pub grid: Vec<f64>,
    /// `None` where every fold (CV) or the single fit (BIC) failed.
    pub scores: Vec<Option<f64>>,
}

/// Mean held-out MPSE of `family` at constant `c`, or `None` if any fold fails.
pub fn cv_score(
    data: &TimeSeriesDataset,
    family: Family,
    c: f64,
    folds: &[Range<usize>],
    opts: &FitOptions,
) -> Option<f64> {
    let n = data.n();
    let mut total = 0.0;
    for block in folds {
        let train: Vec<usize> = (0..n).filter(|i| !block.contains(i)).collect();
        let test: Vec<usize> = block.clone().collect();
        let train_ds = data.select_rows(&train);
        let test_ds = data.select_rows(&test);
        let lambda = match scaled_lambda(c, train.len(), family, opts.loss_scale) {
            Ok(l) => l,
            Err(_) => return None,
        };
        let fit = match fit_family(family, &train_ds, lambda, opts).and_then(|f| f.ensure_converged()) {
            Ok(f) => f,
            Err(e) => {
                log::debug!("cv fold {block:?} failed for {family} at c = {c}: {e}");
                return None;
            }
        };
        let pred = fit.predict(&test_ds);
        total += mpse(pred.as_slice(), test_ds.y().as_slice()).ok()?;
    }
    Some(total / folds.len() as f64)
}

/// K-fold cross-validation over consecutive time blocks.
///
/// Each candidate is fitted on all blocks but one (earlier and later) with
/// `lambda = lambda_schedule(c, n_train, family)` and scored by the MPSE on
/// the held-out block; the mean over blocks is minimized.
pub fn cv_select_detailed(
    data: &TimeSeriesDataset,
    family: Family,
    grid: &[f64],
    folds: usize,
    opts: &FitOptions,
) -> Result<SelectionOutcome> {
    validate_grid(grid)?;
    if folds < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 folds, got {folds}")));
    }
    if data.n() < 3 * folds {
        return Err(Error::InvalidInput(format!("{} rows are too few for {folds}-fold CV", data.n())));
    }
    let blocks = consecutive_folds(data.n(), folds);
    let scores: Vec<Option<f64>> = grid.iter().map(|&c| cv_score(data, family, c, &blocks, opts)).collect();
    let c_lambda = argmin_prefer_larger(grid, &scores).ok_or(Error::AllCandidatesFailed)?;
    Ok(SelectionOutcome { c_lambda, grid: grid.to_vec(), scores })
}

pub fn cv_select(data: &TimeSeriesDataset, family: Family, grid: &[f64], folds: usize) -> Result<f64> {
    Ok(cv_select_detailed(data, family, grid, folds, &FitOptions::default())?.c_lambda)
}

/// `n * ln(RSS / n) + |active| * ln(n)` of `family` at constant `c`.
pub fn bic_score(data: &TimeSeriesDataset, family: Family, c: f64, opts: &FitOptions) -> Option<f64> {
    let n = data.n();
    let lambda = scaled_lambda(c, n, family, opts.loss_scale).ok()?;
    let fit = fit_family(family, data, lambda, opts).and_then(|f| f.ensure_converged()).ok()?;
    let rss = (data.y() - fit.predict(data)).norm_squared();
    let nf = n as f64;
    Some(nf * (rss / nf).ln() + fit.active_set.len() as f64 * nf.ln())
}

pub fn bic_select_detailed(
    data: &TimeSeriesDataset,
    family: Family,
    grid: &[f64],
    opts: &FitOptions,
) -> Result<SelectionOutcome> {
    validate_grid(grid)?;
    let scores: Vec<Option<f64>> = grid.iter().map(|&c| bic_score(data, family, c, opts)).collect();
    let c_lambda = argmin_prefer_larger(grid, &scores).ok_or(Error::AllCandidatesFailed)?;
    Ok(SelectionOutcome { c_lambda, grid: grid.to_vec(), scores })
}

pub fn bic_select(data: &TimeSeriesDataset, family: Family, grid: &[f64]) -> Result<f64> {
    Ok(bic_select_detailed(data, family, grid, &FitOptions::default())?.c_lambda)
}

/// Lower median (the `(k-1)/2`-th order statistic).
pub fn lower_median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    Some(v[(v.len() - 1) / 2])
}

/// Result of calibrating the rate constant for one design and family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub design: Design,
    pub family: Family,
    pub c_lambda: f64,
    pub reps: usize,
    pub n: usize,
    pub master_seed: u64,
    /// Per-replication CV choices (failed replications omitted).
    pub choices: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSettings {
    pub reps: usize,
    pub n: usize,
    pub grid: Vec<f64>,
    pub folds: usize,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self { reps: 100, n: 200, grid: default_grid(), folds: DEFAULT_FOLDS }
    }
}

/// Seed of calibration replication `rep`. Shared across families so every
/// method is tuned on the same simulated samples.
pub fn calibration_seed(master_seed: u64, design: Design, n: usize, rep: usize) -> u64 {
    derive_seed(master_seed, &[CALIBRATION_TAG, design.tag(), n as u64, rep as u64])
}

/// Runs CV on `settings.reps` independent simulated samples of length
/// `settings.n` and returns the lower median of the chosen constants.
pub fn calibrate_clambda(
    design: Design,
    family: Family,
    settings: &CalibrationSettings,
    master_seed: u64,
    opts: &FitOptions,
) -> Result<Calibration> {
    if settings.reps == 0 {
        return Err(Error::InvalidInput("calibration needs at least one replication".into()));
    }
    let outcomes: Vec<Result<f64>> = (0..settings.reps)
        .into_par_iter()
        .map(|rep| {
            let seed = calibration_seed(master_seed, design, settings.n, rep);
            let sim = DgpSpec::new(design, settings.n, seed).simulate()?;
            let sample = sim.slice_rows(0, settings.n);
            Ok(cv_select_detailed(&sample, family, &settings.grid, settings.folds, opts)?.c_lambda)
        })
        .collect();
    let mut choices = Vec::with_capacity(outcomes.len());
    let mut last_err = None;
    for o in outcomes {
        match o {
            Ok(c) => choices.push(c),
            Err(e) => last_err = Some(e),
        }
    }
    let c_lambda = match lower_median(&choices) {
        Some(c) => c,
        None => return Err(last_err.unwrap_or(Error::AllCandidatesFailed)),
    };
    Ok(Calibration { design, family, c_lambda, reps: settings.reps, n: settings.n, master_seed, choices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{simulate_dgp1, simulate_dgp2};
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn schedule_values() {
        assert_abs_diff_eq!(lambda_schedule(0.00563, 200, Family::Plasso).unwrap(), 0.0796202, epsilon = 1e-6);
        assert_abs_diff_eq!(lambda_schedule(0.00119, 200, Family::Slasso).unwrap(), 0.016829, epsilon = 1e-6);
        assert_abs_diff_eq!(lambda_schedule(1.0, 200, Family::Alasso).unwrap(), 8.481604, epsilon = 1e-5);
        assert_eq!(
            lambda_schedule(1.0, 200, Family::Alasso).unwrap(),
            lambda_schedule(1.0, 200, Family::TAlasso).unwrap()
        );
    }

    #[test]
    fn schedule_domain_errors() {
        assert!(matches!(lambda_schedule(1.0, 2, Family::Alasso), Err(Error::Domain(_))));
        assert!(matches!(lambda_schedule(0.0, 200, Family::Plasso), Err(Error::Domain(_))));
        assert!(matches!(lambda_schedule(1.0, 200, Family::Ols), Err(Error::Domain(_))));
        assert!(lambda_schedule(1.0, 3, Family::Alasso).is_ok());
    }

    #[test]
    fn schedule_is_increasing() {
        for family in Family::PENALIZED {
            let mut prev = 0.0;
            for n in 16..2000 {
                let l = lambda_schedule(0.5, n, family).unwrap();
                assert!(l > prev);
                prev = l;
            }
            assert!(lambda_schedule(0.6, 300, family).unwrap() > lambda_schedule(0.5, 300, family).unwrap());
        }
    }

    #[test]
    fn folds_partition_sample() {
        for n in [30, 31, 39, 200, 201] {
            let folds = consecutive_folds(n, 10);
            assert_eq!(folds.len(), 10);
            assert_eq!(folds[0].start, 0);
            assert_eq!(folds.last().unwrap().end, n);
            for w in folds.windows(2) {
                assert_eq!(w[0].end, w[1].start);
            }
            let sizes: Vec<usize> = folds.iter().map(|r| r.len()).collect();
            assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
    }

    #[test]
    fn log_grid_endpoints() {
        let g = default_grid();
        assert_eq!(g.len(), 36);
        assert_abs_diff_eq!(g[0], 1e-5, epsilon = 1e-18);
        assert_abs_diff_eq!(g[25], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g[35], 100.0, epsilon = 1e-10);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn cv_single_candidate() {
        let ds = simulate_dgp1(120, 5).slice_rows(0, 120);
        assert_eq!(cv_select(&ds, Family::Plasso, &[0.01], 10).unwrap(), 0.01);
    }

    #[test]
    fn cv_tie_breaks_to_largest() {
        let n = 60;
        let cols: Vec<Vec<f64>> = (0..3).map(|j| (0..n).map(|i| ((i * (j + 2)) % 7) as f64).collect()).collect();
        let ds = TimeSeriesDataset::from_columns(vec![0.0; n], &cols).unwrap();
        let grid = [0.001, 0.1, 0.01];
        assert_eq!(cv_select(&ds, Family::Plasso, &grid, 10).unwrap(), 0.1);
        assert_eq!(bic_select(&ds, Family::Plasso, &grid).unwrap(), 0.1);
    }

    #[test]
    fn cv_rejects_bad_input() {
        let ds = simulate_dgp1(40, 5).slice_rows(0, 25);
        assert!(cv_select(&ds, Family::Plasso, &[0.1], 10).is_err());
        assert!(cv_select(&ds, Family::Plasso, &[], 2).is_err());
        assert!(cv_select(&ds, Family::Plasso, &[-1.0], 2).is_err());
        assert!(cv_select(&ds, Family::Plasso, &[0.1], 1).is_err());
    }

    #[test]
    fn cv_matches_exhaustive_reevaluation() {
        let n = 120;
        let ds = simulate_dgp1(n, 31).slice_rows(0, n);
        let grid = log_grid(1e-4, 1.0, 5);
        for family in Family::PENALIZED {
            let chosen = cv_select(&ds, family, &grid, 10).unwrap();
            // Independent re-evaluation: explicit fold loops and a separate fit call per cell.
            let mut best = (f64::INFINITY, 0.0);
            for &c in &grid {
                let mut sum = 0.0;
                for k in 0..10 {
                    let lo = k * n / 10;
                    let hi = (k + 1) * n / 10;
                    let train: Vec<usize> = (0..lo).chain(hi..n).collect();
                    let tr = ds.select_rows(&train);
                    let lambda = lambda_schedule(c, train.len(), family).unwrap();
                    let fit = fit_family(family, &tr, lambda, &FitOptions::default()).unwrap();
                    for i in lo..hi {
                        let row: Vec<f64> = ds.predictors().row(i).iter().copied().collect();
                        sum += (ds.y()[i] - fit.predict_row(&row)).powi(2) / (hi - lo) as f64;
                    }
                }
                let score = sum / 10.0;
                if score < best.0 || (score == best.0 && c > best.1) {
                    best = (score, c);
                }
            }
            assert_eq!(chosen, best.1, "{family}");
        }
    }

    #[test]
    fn bic_matches_exhaustive_reevaluation() {
        let n = 200;
        let ds = simulate_dgp2(n, 8).slice_rows(0, n);
        let grid = log_grid(1e-3, 1.0, 5);
        for family in Family::PENALIZED {
            let chosen = bic_select(&ds, family, &grid).unwrap();
            let nf = n as f64;
            let mut best = (f64::INFINITY, 0.0);
            for &c in &grid {
                let lambda = lambda_schedule(c, n, family).unwrap();
                let fit = fit_family(family, &ds, lambda, &FitOptions::default()).unwrap();
                let rss: f64 = (0..n)
                    .map(|i| {
                        let row: Vec<f64> = ds.predictors().row(i).iter().copied().collect();
                        (ds.y()[i] - fit.predict_row(&row)).powi(2)
                    })
                    .sum();
                let k = fit.coefficients.iter().filter(|b| **b != 0.0).count() as f64;
                let score = nf * (rss / nf).ln() + k * nf.ln();
                if score < best.0 || (score == best.0 && c > best.1) {
                    best = (score, c);
                }
            }
            assert_eq!(chosen, best.1, "{family}");
        }
    }

    #[test]
    fn bic_single_candidate() {
        let ds = simulate_dgp2(80, 1).slice_rows(0, 80);
        assert_eq!(bic_select(&ds, Family::Alasso, &[0.3]).unwrap(), 0.3);
    }

    #[test]
    fn selections_come_from_grid() {
        let ds = simulate_dgp2(100, 2).slice_rows(0, 100);
        let grid = log_grid(1e-4, 1.0, 7);
        for family in Family::PENALIZED {
            assert!(grid.contains(&cv_select(&ds, family, &grid, 5).unwrap()));
            assert!(grid.contains(&bic_select(&ds, family, &grid).unwrap()));
        }
    }

    #[test]
    fn all_failed_candidates() {
        // Two identical columns make every Alasso initial OLS singular.
        let n = 40;
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let w = DMatrix::from_fn(n, 2, |i, _| x[i]);
        let ds = TimeSeriesDataset::new(DVector::from_element(n, 1.0), w, vec!["a".into(), "b".into()]).unwrap();
        assert!(matches!(cv_select(&ds, Family::Alasso, &[0.1], 4), Err(Error::AllCandidatesFailed)));
        assert!(matches!(bic_select(&ds, Family::Alasso, &[0.1]), Err(Error::AllCandidatesFailed)));
    }

    #[test]
    fn median_rules() {
        assert_eq!(lower_median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(lower_median(&[4.0, 1.0, 3.0, 2.0]), Some(2.0));
        assert_eq!(lower_median(&[]), None);
    }

    #[test]
    fn calibration_single_rep_equals_cv() {
        let settings = CalibrationSettings { reps: 1, n: 120, grid: log_grid(1e-4, 1.0, 6), folds: 10 };
        let cal = calibrate_clambda(Design::Dgp1, Family::Plasso, &settings, 9, &FitOptions::default()).unwrap();
        let seed = calibration_seed(9, Design::Dgp1, 120, 0);
        let ds = crate::dgp::simulate(Design::Dgp1, 120, seed).slice_rows(0, 120);
        assert_eq!(cal.c_lambda, cv_select(&ds, Family::Plasso, &settings.grid, 10).unwrap());
        assert_eq!(cal.choices.len(), 1);
    }

    #[test]
    fn calibration_is_median_of_choices() {
        let settings = CalibrationSettings { reps: 5, n: 80, grid: log_grid(1e-4, 1.0, 6), folds: 10 };
        let cal = calibrate_clambda(Design::Dgp2, Family::Alasso, &settings, 3, &FitOptions::default()).unwrap();
        assert_eq!(Some(cal.c_lambda), lower_median(&cal.choices));
        let again = calibrate_clambda(Design::Dgp2, Family::Alasso, &settings, 3, &FitOptions::default()).unwrap();
        assert_eq!(cal, again);
    }

    #[test]
    fn dgp1_plasso_calibration_magnitude_in_mean_loss_units() {
        let settings = CalibrationSettings::default();
        let cal = calibrate_clambda(Design::Dgp1, Family::Plasso, &settings, 42, &FitOptions::default()).unwrap();
        assert!(cal.c_lambda > 0.0);
        let per_mean_loss = cal.c_lambda / LossScale::Mean.factor(settings.n);
        assert!(
            per_mean_loss > 0.00563 / 10.0 && per_mean_loss < 0.00563 * 10.0,
            "calibrated {} -> {} in mean-loss units",
            cal.c_lambda,
            per_mean_loss
        );
    }

    #[test]
    fn mean_loss_scale_multiplies_by_2n() {
        let base = lambda_schedule(0.01, 300, Family::Slasso).unwrap();
        assert_eq!(scaled_lambda(0.01, 300, Family::Slasso, LossScale::Sum).unwrap(), base);
        assert_abs_diff_eq!(scaled_lambda(0.01, 300, Family::Slasso, LossScale::Mean).unwrap(), 600.0 * base, epsilon = 1e-12);
        assert_eq!("mean".parse::<LossScale>().unwrap(), LossScale::Mean);
        assert!("avg".parse::<LossScale>().is_err());
    }
}
