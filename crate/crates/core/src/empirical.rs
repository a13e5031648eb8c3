//! Monthly return panel ingestion, long-horizon targets and rolling-window
//! out-of-sample forecasting.
//!
//! Alignment: the predictor row dated `t` is known at the end of month `t`
//! and is paired with the long-horizon return that starts in month `t + 1`.
//! A window ending at month `t` only contains pairs whose target has been
//! fully realized by `t`, and its forecast is for the return starting at
//! `t + 1`. No observation dated after `t` enters that window's fit or tuning.

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::TimeSeriesDataset;
use crate::error::{Error, Result};
use crate::estimators::{fit_family, rwwd_forecast, Family, FitOptions};
use crate::evaluation::{mpae, mpse};
use crate::solver::ols_fit;
use crate::tuning::{bic_select_detailed, cv_select_detailed, default_grid, scaled_lambda, Selector, DEFAULT_FOLDS};

/// Predictor columns every panel must carry, in canonical order.
pub const REQUIRED_PREDICTORS: [&str; 11] = ["dp", "dy", "ep", "tms", "dfy", "dfr", "bm", "tbl", "ltr", "svar", "infl"];

const DATE_COL: &str = "date";
const EX_RETURN_COL: &str = "ex_return";
const INDEX_RETURN_COL: &str = "index_return";
const RISK_FREE_COL: &str = "rfree";

/// Calendar month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidInput(format!("month {month} out of range")));
        }
        Ok(Self { year, month })
    }

    pub fn succ(self) -> Self {
        if self.month == 12 {
            Self { year: self.year + 1, month: 1 }
        } else {
            Self { year: self.year, month: self.month + 1 }
        }
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    /// Accepts `YYYY-MM`, `YYYY-MM-DD` and `YYYYMM`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("unrecognized date `{s}`"));
        let (y, m) = if s.len() == 6 && s.bytes().all(|b| b.is_ascii_digit()) {
            (&s[..4], &s[4..])
        } else {
            let mut parts = s.split('-');
            let y = parts.next().ok_or_else(bad)?;
            let m = parts.next().ok_or_else(bad)?;
            (y, m)
        };
        let year = y.parse::<i32>().map_err(|_| bad())?;
        let month = m.parse::<u32>().map_err(|_| bad())?;
        YearMonth::new(year, month)
    }
}

/// Validated monthly panel of excess returns and predictors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnPanel {
    pub dates: Vec<YearMonth>,
    pub ex_return: Vec<f64>,
    pub predictors: DMatrix<f64>,
    pub names: Vec<String>,
    pub source: String,
}

impl ReturnPanel {
    pub fn new(
        dates: Vec<YearMonth>,
        ex_return: Vec<f64>,
        predictors: DMatrix<f64>,
        names: Vec<String>,
        source: impl Into<String>,
    ) -> Result<Self> {
        let t = dates.len();
        if ex_return.len() != t || predictors.nrows() != t {
            return Err(Error::DimensionMismatch(format!(
                "{} dates, {} returns, {} predictor rows",
                t,
                ex_return.len(),
                predictors.nrows()
            )));
        }
        if names.len() != predictors.ncols() {
            return Err(Error::DimensionMismatch("predictor names do not match columns".into()));
        }
        for (row, w) in dates.windows(2).enumerate() {
            if w[1] != w[0].succ() {
                return Err(Error::NonMonotoneDates { row: row + 1, prev: w[0].to_string(), next: w[1].to_string() });
            }
        }
        if let Some(row) = ex_return.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { column: EX_RETURN_COL.into(), row });
        }
        for (j, col) in predictors.column_iter().enumerate() {
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteValue { column: names[j].clone(), row });
            }
        }
        Ok(Self { dates, ex_return, predictors, names, source: source.into() })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    /// Rows `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        let rows = end - start;
        let w = DMatrix::from_fn(rows, self.predictors.ncols(), |i, j| self.predictors[(start + i, j)]);
        Self::new(
            self.dates[start..end].to_vec(),
            self.ex_return[start..end].to_vec(),
            w,
            self.names.clone(),
            self.source.clone(),
        )
    }

    /// Restricts to the inclusive month range `[from, to]`.
    pub fn between(&self, from: YearMonth, to: YearMonth) -> Result<Self> {
        let start = self.dates.iter().position(|d| *d >= from).unwrap_or(self.len());
        let end = self.dates.iter().rposition(|d| *d <= to).map_or(start, |e| e + 1);
        self.slice(start, end.max(start))
    }
}

/// Reads a panel from a CSV file; see [`load_panel_from_reader`].
pub fn load_panel(path: impl AsRef<Path>) -> Result<ReturnPanel> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    load_panel_from_reader(file, path.display().to_string())
}

fn parse_cell(raw: &str, column: &str, row: usize) -> Result<f64> {
    match raw.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::NonFiniteValue { column: column.to_string(), row }),
    }
}

/// Parses a panel CSV.
///
/// The header must contain `date`, the eleven [`REQUIRED_PREDICTORS`], and
/// either `ex_return` or both `index_return` and `rfree` (the excess return is
/// then their difference). Every other column is taken as an additional
/// predictor, in file order, after the required ones.
pub fn load_panel_from_reader<R: Read>(reader: R, source: impl Into<String>) -> Result<ReturnPanel> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.to_string()).collect();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));

    let date_idx = find(DATE_COL).ok_or_else(|| Error::MissingColumn(DATE_COL.into()))?;
    let ret_source = match find(EX_RETURN_COL) {
        Some(i) => ReturnSource::Excess(i),
        None => match (find(INDEX_RETURN_COL), find(RISK_FREE_COL)) {
            (Some(r), Some(f)) => ReturnSource::Difference(r, f),
            (None, _) => return Err(Error::MissingColumn(EX_RETURN_COL.into())),
            (Some(_), None) => return Err(Error::MissingColumn(RISK_FREE_COL.into())),
        },
    };
    let mut pred_idx = Vec::new();
    let mut names = Vec::new();
    for name in REQUIRED_PREDICTORS {
        let i = find(name).ok_or_else(|| Error::MissingColumn(name.into()))?;
        pred_idx.push(i);
        names.push(name.to_string());
    }
    let reserved = [DATE_COL, EX_RETURN_COL, INDEX_RETURN_COL, RISK_FREE_COL];
    for (i, h) in headers.iter().enumerate() {
        if !pred_idx.contains(&i) && !reserved.iter().any(|r| r.eq_ignore_ascii_case(h)) {
            pred_idx.push(i);
            names.push(h.clone());
        }
    }
    if names.len() != 12 {
        log::warn!("panel has {} predictors; the kitchen-sink specification uses 12", names.len());
    }

    let mut dates = Vec::new();
    let mut ex = Vec::new();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let cell = |i: usize| rec.get(i).unwrap_or("");
        let date = cell(date_idx)
            .parse::<YearMonth>()
            .map_err(|e| Error::InvalidInput(format!("row {row}: {e}")))?;
        dates.push(date);
        ex.push(match ret_source {
            ReturnSource::Excess(i) => parse_cell(cell(i), EX_RETURN_COL, row)?,
            ReturnSource::Difference(r, f) => {
                parse_cell(cell(r), INDEX_RETURN_COL, row)? - parse_cell(cell(f), RISK_FREE_COL, row)?
            }
        });
        for (k, &i) in pred_idx.iter().enumerate() {
            values[k].push(parse_cell(cell(i), &names[k], row)?);
        }
    }
    let t = dates.len();
    let w = DMatrix::from_fn(t, names.len(), |i, j| values[j][i]);
    ReturnPanel::new(dates, ex, w, names, source)
}

#[derive(Clone, Copy)]
enum ReturnSource {
    Excess(usize),
    Difference(usize, usize),
}

/// Slope of the OLS regression of `x_t` on a constant and `x_{t-1}`.
pub fn ar1_coefficient(series: &[f64]) -> Result<f64> {
    if series.len() < 4 {
        return Err(Error::SeriesTooShort { len: series.len(), needed: 4 });
    }
    let lagged = series[..series.len() - 1].to_vec();
    let ds = TimeSeriesDataset::from_columns(series[1..].to_vec(), &[lagged])?;
    Ok(ols_fit(&ds, &[0], true)?.coefficients[0])
}

/// Forecast horizon in years plus the rolling-window length in months.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonSpec {
    pub h: f64,
    pub window_months: usize,
}

impl HorizonSpec {
    pub fn new(h: f64, window_months: usize) -> Result<Self> {
        let spec = Self { h, window_months };
        let m = spec.months()?;
        if window_months <= m + 1 {
            return Err(Error::InvalidInput(format!("window of {window_months} months leaves no training data at a {m}-month horizon")));
        }
        if window_months < 24 {
            return Err(Error::InvalidInput(format!("window of {window_months} months is shorter than 24")));
        }
        Ok(spec)
    }

    /// `12 h`, which must be a positive integer.
    pub fn months(&self) -> Result<usize> {
        horizon_months(self.h)
    }

    /// Horizon label such as `1/12`, `1/4`, `2`.
    pub fn label(&self) -> String {
        horizon_label(self.h)
    }
}

fn horizon_months(h: f64) -> Result<usize> {
    let m = 12.0 * h;
    if !(m >= 1.0) || (m - m.round()).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("12 * h must be a positive integer, got h = {h}")));
    }
    Ok(m.round() as usize)
}

pub fn horizon_label(h: f64) -> String {
    match horizon_months(h) {
        Ok(m) if m % 12 == 0 => (m / 12).to_string(),
        Ok(m) => {
            let g = gcd(m, 12);
            format!("{}/{}", m / g, 12 / g)
        }
        Err(_) => h.to_string(),
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Parses `1/12`, `0.25`, `3`.
pub fn parse_horizon(s: &str) -> Result<f64> {
    let s = s.trim();
    let h = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| Error::InvalidInput(format!("bad horizon `{s}`")))?;
            let b: f64 = b.trim().parse().map_err(|_| Error::InvalidInput(format!("bad horizon `{s}`")))?;
            a / b
        }
        None => s.parse().map_err(|_| Error::InvalidInput(format!("bad horizon `{s}`")))?,
    };
    horizon_months(h)?;
    Ok(h)
}

/// Forward `12 h`-month sums: element `i` is `ex[i] + ... + ex[i + 12h - 1]`.
pub fn long_horizon_return(ex_return: &[f64], h: f64) -> Result<Vec<f64>> {
    long_horizon_sums(ex_return, horizon_months(h)?)
}

pub fn long_horizon_sums(ex_return: &[f64], months: usize) -> Result<Vec<f64>> {
    if months == 0 || ex_return.len() < months {
        return Err(Error::SeriesTooShort { len: ex_return.len(), needed: months });
    }
    Ok(ex_return.windows(months).map(|w| w.iter().sum()).collect())
}

/// A forecasting rule applied in every window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Forecaster {
    Ols,
    Rwwd,
    Penalized { family: Family, selector: Selector },
}

impl Forecaster {
    pub fn label(&self) -> String {
        match self {
            Forecaster::Ols => "ols".into(),
            Forecaster::Rwwd => "rwwd".into(),
            Forecaster::Penalized { family, selector: Selector::Cv } => family.to_string(),
            Forecaster::Penalized { family, selector: Selector::Bic } => format!("{family}:bic"),
        }
    }

    /// Parses `ols`, `rwwd`, `<family>` (with `default_selector`) or `<family>:cv|bic`.
    pub fn parse(s: &str, default_selector: Selector) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (name, sel) = match s.split_once(':') {
            Some((n, "cv")) => (n.to_string(), Selector::Cv),
            Some((n, "bic")) => (n.to_string(), Selector::Bic),
            Some((_, other)) => return Err(Error::InvalidInput(format!("unknown tuning selector `{other}`"))),
            None => (s.clone(), default_selector),
        };
        match name.as_str() {
            "rwwd" => Ok(Forecaster::Rwwd),
            "ols" => Ok(Forecaster::Ols),
            other => {
                let family: Family = other.parse()?;
                if !family.is_penalized() {
                    return Err(Error::InvalidInput(format!("`{other}` is not available for forecasting")));
                }
                Ok(Forecaster::Penalized { family, selector: sel })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollingSettings {
    pub grid: Vec<f64>,
    pub folds: usize,
    pub fit: FitOptions,
}

impl Default for RollingSettings {
    fn default() -> Self {
        Self { grid: default_grid(), folds: DEFAULT_FOLDS, fit: FitOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRecord {
    /// Last month inside the estimation window.
    pub window_end: YearMonth,
    /// First month of the forecast target.
    pub target_start: YearMonth,
    pub realized: f64,
    pub forecast: f64,
    pub c_lambda: Option<f64>,
    /// Slope coefficients of the window's fit (empty for the benchmark).
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollingForecast {
    pub forecaster: String,
    pub horizon: HorizonSpec,
    pub predictor_names: Vec<String>,
    pub records: Vec<ForecastRecord>,
    /// Windows whose fit failed, with the error message; excluded from metrics.
    pub failed_windows: Vec<(YearMonth, String)>,
    pub mpse: f64,
    pub rmpse_x100: f64,
    pub mpae_x100: f64,
}

impl RollingForecast {
    pub fn forecasts(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.forecast).collect()
    }

    pub fn realized(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.realized).collect()
    }
}

/// Training pairs of the window ending at `t`: targets `long[i]` with
/// predictor row `i - 1`, for `t - W + 2 <= i <= t - m + 1`.
fn window_dataset(panel: &ReturnPanel, long: &[f64], t: usize, window: usize, months: usize) -> Result<TimeSeriesDataset> {
    let first = t + 2 - window;
    let last = t + 1 - months;
    let rows = last + 1 - first;
    let y = DVector::from_iterator(rows, (first..=last).map(|i| long[i]));
    let w = DMatrix::from_fn(rows, panel.predictors.ncols(), |r, j| panel.predictors[(first + r - 1, j)]);
    TimeSeriesDataset::new(y, w, panel.names.clone())
}

fn forecast_window(
    panel: &ReturnPanel,
    long: &[f64],
    t: usize,
    spec: &HorizonSpec,
    months: usize,
    forecaster: Forecaster,
    settings: &RollingSettings,
) -> Result<ForecastRecord> {
    let train = window_dataset(panel, long, t, spec.window_months, months)?;
    let row: Vec<f64> = panel.predictors.row(t).iter().copied().collect();
    let realized = long[t + 1];
    let base = ForecastRecord {
        window_end: panel.dates[t],
        target_start: panel.dates[t + 1],
        realized,
        forecast: f64::NAN,
        c_lambda: None,
        coefficients: Vec::new(),
    };
    match forecaster {
        Forecaster::Rwwd => Ok(ForecastRecord { forecast: rwwd_forecast(train.y().as_slice())?, ..base }),
        Forecaster::Ols => {
            let fit = fit_family(Family::Ols, &train, 0.0, &settings.fit)?;
            Ok(ForecastRecord { forecast: fit.predict_row(&row), coefficients: fit.coefficients, ..base })
        }
        Forecaster::Penalized { family, selector } => {
            let sel = match selector {
                Selector::Cv => cv_select_detailed(&train, family, &settings.grid, settings.folds, &settings.fit)?,
                Selector::Bic => bic_select_detailed(&train, family, &settings.grid, &settings.fit)?,
            };
            let lambda = scaled_lambda(sel.c_lambda, train.n(), family, settings.fit.loss_scale)?;
            let fit = fit_family(family, &train, lambda, &settings.fit)?.ensure_converged()?;
            Ok(ForecastRecord {
                forecast: fit.predict_row(&row),
                c_lambda: Some(sel.c_lambda),
                coefficients: fit.coefficients,
                ..base
            })
        }
    }
}

/// Rolling-window forecasts of the `12h`-month excess return.
///
/// Windows end at every month `t` from `W - 1` up to the last month whose
/// forecast target is fully observed. Tuning is redone inside each window.
/// Metrics are reported as `RMPSE x 100` and `MPAE x 100`.
pub fn rolling_forecast(
    panel: &ReturnPanel,
    spec: &HorizonSpec,
    forecaster: Forecaster,
    settings: &RollingSettings,
) -> Result<RollingForecast> {
    let months = spec.months()?;
    let window = spec.window_months;
    let t_len = panel.len();
    if window <= months + 1 || t_len < window + months {
        return Err(Error::SeriesTooShort { len: t_len, needed: window + months });
    }
    let long = long_horizon_sums(&panel.ex_return, months)?;
    let ends: Vec<usize> = (window - 1..=t_len - 1 - months).collect();

    let results: Vec<Result<ForecastRecord>> = ends
        .par_iter()
        .map(|&t| forecast_window(panel, &long, t, spec, months, forecaster, settings))
        .collect();

    let mut records = Vec::with_capacity(results.len());
    let mut failed_windows = Vec::new();
    for (&t, r) in ends.iter().zip(results) {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => failed_windows.push((panel.dates[t], e.to_string())),
        }
    }
    if records.is_empty() {
        return Err(Error::AllCandidatesFailed);
    }
    let f: Vec<f64> = records.iter().map(|r| r.forecast).collect();
    let y: Vec<f64> = records.iter().map(|r| r.realized).collect();
    let mse = mpse(&f, &y)?;
    Ok(RollingForecast {
        forecaster: forecaster.label(),
        horizon: *spec,
        predictor_names: panel.names.clone(),
        records,
        failed_windows,
        mpse: mse,
        rmpse_x100: 100.0 * mse.sqrt(),
        mpae_x100: 100.0 * mpae(&f, &y)?,
    })
}
