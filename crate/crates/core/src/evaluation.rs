//! Forecast and screening metrics plus the Monte Carlo harness.
//!
//! Selection metrics are computed over the slope coefficients only; the
//! intercept is always fitted and never counted.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::TimeSeriesDataset;
use crate::dgp::{Design, DgpSpec};
use crate::error::{Error, Result};
use crate::estimators::{fit_family, Family, FitOptions};
use crate::rng::derive_seed;
use crate::solver::FitResult;
use crate::tuning::{calibrate_clambda, scaled_lambda, Calibration, CalibrationSettings, LossScale};

const REPLICATION_TAG: u64 = 0x5E1E_C7ED;

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(())
}

/// Mean squared forecast error.
pub fn mpse(forecasts: &[f64], realized: &[f64]) -> Result<f64> {
    check_lengths(forecasts, realized)?;
    Ok(forecasts.iter().zip(realized).map(|(f, r)| (r - f).powi(2)).sum::<f64>() / forecasts.len() as f64)
}

/// Mean absolute forecast error.
pub fn mpae(forecasts: &[f64], realized: &[f64]) -> Result<f64> {
    check_lengths(forecasts, realized)?;
    Ok(forecasts.iter().zip(realized).map(|(f, r)| (r - f).abs()).sum::<f64>() / forecasts.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionRates {
    /// Share of all `p` coefficients classified correctly as zero / nonzero.
    pub sr: f64,
    /// Share of truly active coefficients that were kept (1 if none are active).
    pub sr1: f64,
    /// Share of truly inactive coefficients that were removed (1 if none are inactive).
    pub sr2: f64,
}

/// Screening success rates for one fit. Indices are zero-based and must be `< p`.
pub fn selection_rates(truth_active: &[usize], estimated_active: &[usize], p: usize) -> SelectionRates {
    let mut truth = vec![false; p];
    let mut est = vec![false; p];
    for &j in truth_active {
        truth[j] = true;
    }
    for &j in estimated_active {
        est[j] = true;
    }
    let n_active = truth.iter().filter(|t| **t).count();
    let n_inactive = p - n_active;
    let hits = (0..p).filter(|&j| truth[j] && est[j]).count();
    let removals = (0..p).filter(|&j| !truth[j] && !est[j]).count();
    let sr1 = if n_active == 0 { 1.0 } else { hits as f64 / n_active as f64 };
    let sr2 = if n_inactive == 0 { 1.0 } else { removals as f64 / n_inactive as f64 };
    let sr = if p == 0 { 1.0 } else { (hits + removals) as f64 / p as f64 };
    SelectionRates { sr, sr1, sr2 }
}

/// How often a pair of coefficients was zeroed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CointGroupReport {
    pub frac_both_zero: f64,
    pub frac_exactly_one_zero: f64,
    pub frac_neither_zero: f64,
}

impl CointGroupReport {
    /// Tallies a sequence of `(first is zero, second is zero)` outcomes.
    pub fn from_outcomes(outcomes: &[(bool, bool)]) -> Option<Self> {
        if outcomes.is_empty() {
            return None;
        }
        let total = outcomes.len() as f64;
        let both = outcomes.iter().filter(|(a, b)| *a && *b).count() as f64;
        let neither = outcomes.iter().filter(|(a, b)| !*a && !*b).count() as f64;
        let one = total - both - neither;
        Some(Self { frac_both_zero: both / total, frac_exactly_one_zero: one / total, frac_neither_zero: neither / total })
    }
}

/// Aggregate metrics for one `(design, n, estimator)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub design: Design,
    pub n: usize,
    pub family: Family,
    pub c_lambda: Option<f64>,
    pub lambda: Option<f64>,
    pub mpse: f64,
    pub sr: f64,
    pub sr1: f64,
    pub sr2: f64,
    /// Replications that completed.
    pub reps: usize,
    pub failures: usize,
    pub coint: Option<CointGroupReport>,
}

/// Outcome of one estimator on one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationOutcome {
    pub squared_error: f64,
    pub rates: SelectionRates,
    pub pair_zero: Option<(bool, bool)>,
}

/// Simulates replication `rep` of `(design, n)`: `n + 1` rows under the
/// derived seed.
pub fn replication_dataset(design: Design, n: usize, rep: usize, master_seed: u64) -> Result<TimeSeriesDataset> {
    let seed = derive_seed(master_seed, &[REPLICATION_TAG, design.tag(), n as u64, rep as u64]);
    DgpSpec::new(design, n, seed).simulate()
}

/// Fits on the first `n` rows and scores the forecast of row `n + 1`.
pub fn evaluate_replication<F>(design: Design, sim: &TimeSeriesDataset, fit: F) -> Result<ReplicationOutcome>
where
    F: Fn(&TimeSeriesDataset) -> Result<FitResult>,
{
    let n = sim.n() - 1;
    let train = sim.slice_rows(0, n);
    let result = fit(&train)?;
    let row: Vec<f64> = sim.predictors().row(n).iter().copied().collect();
    let err = sim.y()[n] - result.predict_row(&row);
    let truth = sim.truth().ok_or(Error::MissingTruth)?;
    let rates = selection_rates(&truth.active_set, &result.active_set, sim.p());
    let pair_zero = design.inactive_coint_pair().map(|(a, b)| (result.is_zero(a), result.is_zero(b)));
    Ok(ReplicationOutcome { squared_error: err * err, rates, pair_zero })
}

/// Accumulates replication outcomes in order (sequential sums keep the
/// result independent of how replications were scheduled).
fn aggregate(
    design: Design,
    n: usize,
    family: Family,
    c_lambda: Option<f64>,
    scale: LossScale,
    outcomes: &[Result<ReplicationOutcome>],
) -> SelectionReport {
    let ok: Vec<&ReplicationOutcome> = outcomes.iter().filter_map(|o| o.as_ref().ok()).collect();
    let reps = ok.len();
    let failures = outcomes.len() - reps;
    let mean = |f: &dyn Fn(&ReplicationOutcome) -> f64| {
        if reps == 0 {
            f64::NAN
        } else {
            ok.iter().map(|o| f(o)).sum::<f64>() / reps as f64
        }
    };
    let pairs: Vec<(bool, bool)> = ok.iter().filter_map(|o| o.pair_zero).collect();
    SelectionReport {
        design,
        n,
        family,
        c_lambda,
        lambda: c_lambda.and_then(|c| scaled_lambda(c, n, family, scale).ok()),
        mpse: mean(&|o| o.squared_error),
        sr: mean(&|o| o.rates.sr),
        sr1: mean(&|o| o.rates.sr1),
        sr2: mean(&|o| o.rates.sr2),
        reps,
        failures,
        coint: CointGroupReport::from_outcomes(&pairs),
    }
}

/// How rate constants are obtained for the shrinkage estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TuningPlan {
    /// Calibrate each `(design, family)` by simulation + CV, once.
    Calibrate(CalibrationSettings),
    /// Use the given constants; missing entries are an error.
    Fixed(Vec<(Design, Family, f64)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub designs: Vec<Design>,
    pub n_list: Vec<usize>,
    pub reps: usize,
    pub estimators: Vec<Family>,
    pub tuning: TuningPlan,
    pub master_seed: u64,
    pub fit: FitOptions,
}

impl MonteCarloConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidInput("reps must be >= 1".into()));
        }
        if self.designs.is_empty() || self.n_list.is_empty() || self.estimators.is_empty() {
            return Err(Error::InvalidInput("designs, n values and estimators must be nonempty".into()));
        }
        if let Some(n) = self.n_list.iter().find(|&&n| n < crate::dgp::MIN_N) {
            return Err(Error::InvalidInput(format!("sample length {n} below {}", crate::dgp::MIN_N)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub master_seed: u64,
    pub reps: usize,
    pub calibrations: Vec<Calibration>,
    pub cells: Vec<SelectionReport>,
}

impl MonteCarloReport {
    pub fn cell(&self, design: Design, n: usize, family: Family) -> Option<&SelectionReport> {
        self.cells.iter().find(|c| c.design == design && c.n == n && c.family == family)
    }

    pub fn c_lambda(&self, design: Design, family: Family) -> Option<f64> {
        self.calibrations.iter().find(|c| c.design == design && c.family == family).map(|c| c.c_lambda)
    }
}

/// Resolves rate constants for every penalized `(design, family)` pair.
pub fn resolve_constants(config: &MonteCarloConfig) -> Result<Vec<Calibration>> {
    let mut out = Vec::new();
    for &design in &config.designs {
        for &family in config.estimators.iter().filter(|f| f.is_penalized()) {
            let cal = match &config.tuning {
                TuningPlan::Calibrate(settings) => {
                    log::info!("calibrating {family} on {design}");
                    calibrate_clambda(design, family, settings, config.master_seed, &config.fit)?
                }
                TuningPlan::Fixed(table) => {
                    let c = table
                        .iter()
                        .find(|(d, f, _)| *d == design && *f == family)
                        .map(|(_, _, c)| *c)
                        .ok_or_else(|| {
                            Error::InvalidInput(format!("no tuning constant given for {family} on {design}"))
                        })?;
                    Calibration { design, family, c_lambda: c, reps: 0, n: 0, master_seed: config.master_seed, choices: vec![] }
                }
            };
            out.push(cal);
        }
    }
    Ok(out)
}

/// Runs every `(design, n)` cell: each replication simulates `n + 1`
/// observations, every estimator is fitted on the first `n`, and the last
/// observation is forecast. All estimators see the same simulated samples.
pub fn run_montecarlo(config: &MonteCarloConfig) -> Result<MonteCarloReport> {
    config.validate()?;
    let calibrations = resolve_constants(config)?;
    let constant = |design: Design, family: Family| {
        calibrations.iter().find(|c| c.design == design && c.family == family).map(|c| c.c_lambda)
    };

    let mut cells = Vec::new();
    for &design in &config.designs {
        for &n in &config.n_list {
            log::info!("monte carlo {design} n = {n}");
            let per_rep: Vec<Vec<Result<ReplicationOutcome>>> = (0..config.reps)
                .into_par_iter()
                .map(|rep| {
                    let sim = match replication_dataset(design, n, rep, config.master_seed) {
                        Ok(s) => s,
                        Err(e) => {
                            let msg = e.to_string();
                            return config.estimators.iter().map(|_| Err(Error::InvalidInput(msg.clone()))).collect();
                        }
                    };
                    config
                        .estimators
                        .iter()
                        .map(|&family| {
                            let lambda = match constant(design, family) {
                                Some(c) => scaled_lambda(c, n, family, config.fit.loss_scale)?,
                                None => 0.0,
                            };
                            evaluate_replication(design, &sim, |train| {
                                fit_family(family, train, lambda, &config.fit)?.ensure_converged()
                            })
                        })
                        .collect()
                })
                .collect();

            for (k, &family) in config.estimators.iter().enumerate() {
                let column: Vec<Result<ReplicationOutcome>> = per_rep
                    .iter()
                    .map(|row| match &row[k] {
                        Ok(o) => Ok(o.clone()),
                        Err(e) => Err(Error::InvalidInput(e.to_string())),
                    })
                    .collect();
                cells.push(aggregate(design, n, family, constant(design, family), config.fit.loss_scale, &column));
            }
        }
    }
    Ok(MonteCarloReport { master_seed: config.master_seed, reps: config.reps, calibrations, cells })
}

/// Screening of the inactive cointegrated pair with an arbitrary fitting rule.
pub fn coint_group_screening_with<F>(
    design: Design,
    n: usize,
    reps: usize,
    master_seed: u64,
    fit: F,
) -> Result<CointGroupReport>
where
    F: Fn(&TimeSeriesDataset) -> Result<FitResult> + Sync,
{
    if design.inactive_coint_pair().is_none() {
        return Err(Error::InvalidInput(format!("{design} has no cointegrated block")));
    }
    if reps == 0 {
        return Err(Error::InvalidInput("reps must be >= 1".into()));
    }
    let outcomes: Vec<Result<ReplicationOutcome>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let sim = replication_dataset(design, n, rep, master_seed)?;
            evaluate_replication(design, &sim, &fit)
        })
        .collect();
    let pairs: Vec<(bool, bool)> = outcomes.iter().filter_map(|o| o.as_ref().ok()).filter_map(|o| o.pair_zero).collect();
    CointGroupReport::from_outcomes(&pairs).ok_or(Error::AllCandidatesFailed)
}

/// Screening of the inactive cointegrated pair by `family` at rate constant `c_lambda`.
pub fn coint_group_screening(
    design: Design,
    n: usize,
    family: Family,
    c_lambda: f64,
    reps: usize,
    master_seed: u64,
) -> Result<CointGroupReport> {
    let lambda = if family.is_penalized() { scaled_lambda(c_lambda, n, family, LossScale::Sum)? } else { 0.0 };
    let opts = FitOptions::default();
    coint_group_screening_with(design, n, reps, master_seed, |train| fit_family(family, train, lambda, &opts))
}

/// Groups cells by `(design, n)` in report order, for table output.
pub fn cells_by_row(report: &MonteCarloReport) -> BTreeMap<(Design, usize), Vec<&SelectionReport>> {
    let mut rows: BTreeMap<(Design, usize), Vec<&SelectionReport>> = BTreeMap::new();
    for c in &report.cells {
        rows.entry((c.design, c.n)).or_default().push(c);
    }
    rows
}
