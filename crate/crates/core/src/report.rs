//! CSV and JSON writers for simulation, Monte Carlo and forecasting output.
//!
//! Every CSV starts with `#`-prefixed provenance lines; every JSON document
//! is an object with a `provenance` member next to the payload.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::dgp::Design;
use crate::empirical::{horizon_label, RollingForecast};
use crate::error::Result;
use crate::estimators::Family;
use crate::evaluation::{cells_by_row, MonteCarloReport};
use crate::tuning::Calibration;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seeds: Vec<(String, u64)>,
    pub settings: Vec<(String, String)>,
    pub tuning: Vec<(String, f64)>,
}

impl Provenance {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seeds: Vec::new(),
            settings: Vec::new(),
            tuning: Vec::new(),
        }
    }

    pub fn with_seed(mut self, name: impl Into<String>, seed: u64) -> Self {
        self.seeds.push((name.into(), seed));
        self
    }

    pub fn with_setting(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.settings.push((name.into(), value.into()));
        self
    }

    pub fn with_tuning(mut self, name: impl Into<String>, value: f64) -> Self {
        self.tuning.push((name.into(), value));
        self
    }

    /// Records every calibrated or fixed constant as `c_lambda.<design>.<family>`.
    pub fn with_calibrations(mut self, cals: &[Calibration]) -> Self {
        for c in cals {
            self.tuning.push((format!("c_lambda.{}.{}", c.design, c.family), c.c_lambda));
        }
        self
    }

    pub fn header_lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("# {} {}", self.tool, self.version),
            format!("# command: {}", self.command),
        ];
        for (k, v) in &self.seeds {
            out.push(format!("# seed {k}: {v}"));
        }
        for (k, v) in &self.settings {
            out.push(format!("# setting {k}: {v}"));
        }
        for (k, v) in &self.tuning {
            out.push(format!("# tuning {k}: {v}"));
        }
        out
    }
}

/// Writes provenance comment lines followed by a CSV body.
pub fn write_csv_table<W: Write>(mut out: W, prov: &Provenance, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    for line in prov.header_lines() {
        writeln!(out, "{line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(path: impl AsRef<Path>, prov: &Provenance, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let f = BufWriter::new(File::create(path)?);
    write_csv_table(f, prov, header, rows)
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    provenance: &'a Provenance,
    #[serde(flatten)]
    payload: &'a T,
}

pub fn write_json_file<T: Serialize>(path: impl AsRef<Path>, prov: &Provenance, payload: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, &Envelope { provenance: prov, payload })?;
    writeln!(f)?;
    f.flush()?;
    Ok(())
}

fn fmt6(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        "NA".into()
    }
}

fn families_in(report: &MonteCarloReport) -> Vec<Family> {
    let mut fams: Vec<Family> = Vec::new();
    for c in &report.cells {
        if !fams.contains(&c.family) {
            fams.push(c.family);
        }
    }
    fams
}

/// One row per `(design, n)`, one MPSE column per estimator.
pub fn mpse_table(report: &MonteCarloReport) -> (Vec<String>, Vec<Vec<String>>) {
    let fams = families_in(report);
    let mut header = vec!["design".to_string(), "n".to_string()];
    header.extend(fams.iter().map(|f| f.to_string()));
    let rows = cells_by_row(report)
        .into_iter()
        .map(|((d, n), cells)| {
            let mut row = vec![d.to_string(), n.to_string()];
            for f in &fams {
                row.push(cells.iter().find(|c| c.family == *f).map_or("NA".into(), |c| fmt6(c.mpse)));
            }
            row
        })
        .collect();
    (header, rows)
}

/// One row per `(design, n)`; `SR`, `SR1`, `SR2` columns for each shrinkage estimator.
pub fn selection_table(report: &MonteCarloReport) -> (Vec<String>, Vec<Vec<String>>) {
    let fams: Vec<Family> = families_in(report).into_iter().filter(|f| f.is_penalized()).collect();
    let mut header = vec!["design".to_string(), "n".to_string()];
    for f in &fams {
        header.extend(["sr", "sr1", "sr2"].iter().map(|m| format!("{f}_{m}")));
    }
    let rows = cells_by_row(report)
        .into_iter()
        .map(|((d, n), cells)| {
            let mut row = vec![d.to_string(), n.to_string()];
            for f in &fams {
                match cells.iter().find(|c| c.family == *f) {
                    Some(c) => row.extend([fmt6(c.sr), fmt6(c.sr1), fmt6(c.sr2)]),
                    None => row.extend(["NA".to_string(), "NA".to_string(), "NA".to_string()]),
                }
            }
            row
        })
        .collect();
    (header, rows)
}

/// Screening of the inactive cointegrated pair, for designs that have one.
pub fn coint_table(report: &MonteCarloReport) -> (Vec<String>, Vec<Vec<String>>) {
    let header = ["design", "n", "estimator", "both_zero", "exactly_one_zero", "neither_zero"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows = report
        .cells
        .iter()
        .filter(|c| c.family.is_penalized())
        .filter_map(|c| {
            c.coint.map(|g| {
                vec![
                    c.design.to_string(),
                    c.n.to_string(),
                    c.family.to_string(),
                    fmt6(g.frac_both_zero),
                    fmt6(g.frac_exactly_one_zero),
                    fmt6(g.frac_neither_zero),
                ]
            })
        })
        .collect();
    (header, rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationRecord {
    pub design: Design,
    pub family: Family,
    pub c_lambda: f64,
    pub reps: usize,
    pub n: usize,
    pub master_seed: u64,
}

impl From<&Calibration> for CalibrationRecord {
    fn from(c: &Calibration) -> Self {
        Self { design: c.design, family: c.family, c_lambda: c.c_lambda, reps: c.reps, n: c.n, master_seed: c.master_seed }
    }
}

#[derive(Serialize)]
struct CalibrationFile {
    calibrations: Vec<CalibrationRecord>,
}

#[derive(Serialize)]
struct MonteCarloFile<'a> {
    report: &'a MonteCarloReport,
}

/// Writes `mpse.csv`, `selection.csv`, `coint.csv`, `montecarlo.json` and
/// `calibration.json` into `dir`.
pub fn write_montecarlo_outputs(dir: impl AsRef<Path>, prov: &Provenance, report: &MonteCarloReport) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let (h, r) = mpse_table(report);
    write_csv_file(dir.join("mpse.csv"), prov, &h, &r)?;
    let (h, r) = selection_table(report);
    write_csv_file(dir.join("selection.csv"), prov, &h, &r)?;
    let (h, r) = coint_table(report);
    write_csv_file(dir.join("coint.csv"), prov, &h, &r)?;
    write_json_file(dir.join("montecarlo.json"), prov, &MonteCarloFile { report })?;
    let cal = CalibrationFile { calibrations: report.calibrations.iter().map(CalibrationRecord::from).collect() };
    write_json_file(dir.join("calibration.json"), prov, &cal)?;
    Ok(())
}

/// Rows are `(window, h)` pairs in input order; for each estimator there is
/// an `RMPSE x 100` and an `MPAE x 100` column.
pub fn forecast_metrics_table(results: &[RollingForecast]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut estimators: Vec<String> = Vec::new();
    let mut keys: Vec<(usize, String)> = Vec::new();
    for r in results {
        if !estimators.contains(&r.forecaster) {
            estimators.push(r.forecaster.clone());
        }
        let key = (r.horizon.window_months, r.horizon.label());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut header = vec!["window_years".to_string(), "h".to_string()];
    header.extend(estimators.iter().map(|e| format!("{e}_rmpse_x100")));
    header.extend(estimators.iter().map(|e| format!("{e}_mpae_x100")));
    let lookup = |key: &(usize, String), e: &str| {
        results.iter().find(|r| r.horizon.window_months == key.0 && r.horizon.label() == key.1 && r.forecaster == e)
    };
    let rows = keys
        .iter()
        .map(|key| {
            let years = key.0 as f64 / 12.0;
            let mut row = vec![format!("{years}"), key.1.clone()];
            row.extend(estimators.iter().map(|e| lookup(key, e).map_or("NA".into(), |r| fmt6(r.rmpse_x100))));
            row.extend(estimators.iter().map(|e| lookup(key, e).map_or("NA".into(), |r| fmt6(r.mpae_x100))));
            row
        })
        .collect();
    (header, rows)
}

pub fn forecast_records_table(results: &[RollingForecast]) -> (Vec<String>, Vec<Vec<String>>) {
    let header = ["date", "realized", "forecast", "estimator", "h", "window_months"].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for r in results {
        for rec in &r.records {
            rows.push(vec![
                rec.target_start.to_string(),
                format!("{}", rec.realized),
                format!("{}", rec.forecast),
                r.forecaster.clone(),
                r.horizon.label(),
                r.horizon.window_months.to_string(),
            ]);
        }
    }
    (header, rows)
}

/// Coefficient traces; one row per window for every fitted estimator.
pub fn coefficient_table(results: &[RollingForecast]) -> (Vec<String>, Vec<Vec<String>>) {
    let names = results.first().map(|r| r.predictor_names.clone()).unwrap_or_default();
    let mut header: Vec<String> =
        ["window_end", "estimator", "h", "window_months", "c_lambda"].iter().map(|s| s.to_string()).collect();
    header.extend(names.iter().cloned());
    let mut rows = Vec::new();
    for r in results {
        for rec in r.records.iter().filter(|rec| !rec.coefficients.is_empty()) {
            let mut row = vec![
                rec.window_end.to_string(),
                r.forecaster.clone(),
                r.horizon.label(),
                r.horizon.window_months.to_string(),
                rec.c_lambda.map_or("NA".into(), |c| format!("{c}")),
            ];
            row.extend(rec.coefficients.iter().map(|b| format!("{b}")));
            rows.push(row);
        }
    }
    (header, rows)
}

#[derive(Serialize)]
struct ForecastMetric<'a> {
    estimator: &'a str,
    h: String,
    window_months: usize,
    forecasts: usize,
    failed_windows: &'a [(crate::empirical::YearMonth, String)],
    mpse: f64,
    rmpse_x100: f64,
    mpae_x100: f64,
}

#[derive(Serialize)]
struct ForecastFile<'a> {
    metrics: Vec<ForecastMetric<'a>>,
}

/// Writes `metrics.csv`, `metrics.json`, `forecasts.csv` and `coefficients.csv`.
pub fn write_forecast_outputs(dir: impl AsRef<Path>, prov: &Provenance, results: &[RollingForecast]) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let (h, r) = forecast_metrics_table(results);
    write_csv_file(dir.join("metrics.csv"), prov, &h, &r)?;
    let metrics = results
        .iter()
        .map(|r| ForecastMetric {
            estimator: &r.forecaster,
            h: horizon_label(r.horizon.h),
            window_months: r.horizon.window_months,
            forecasts: r.records.len(),
            failed_windows: &r.failed_windows,
            mpse: r.mpse,
            rmpse_x100: r.rmpse_x100,
            mpae_x100: r.mpae_x100,
        })
        .collect();
    write_json_file(dir.join("metrics.json"), prov, &ForecastFile { metrics })?;
    let (h, r) = forecast_records_table(results);
    write_csv_file(dir.join("forecasts.csv"), prov, &h, &r)?;
    let (h, r) = coefficient_table(results);
    write_csv_file(dir.join("coefficients.csv"), prov, &h, &r)?;
    Ok(())
}
