//! Monte Carlo run configuration.
//!
//! Flat `key = value` text, one entry per line, `#` starts a comment:
//!
//! ```text
//! designs          = dgp1, dgp2        # dgp1 | dgp2 | dgp3
//! n                = 40, 80, 800
//! estimators       = oracle, ols, alasso, talasso, plasso, slasso
//! reps             = 500
//! master_seed      = 42
//! tuning           = calibrate         # calibrate | fixed
//! calibration_reps = 100
//! calibration_n    = 200
//! grid_min         = 1e-5
//! grid_max         = 100
//! grid_points      = 36
//! folds            = 10
//! gamma            = 1
//! loss_scale       = sum               # sum | mean: loss the constants refer to
//! c_lambda.dgp1.plasso = 0.00563       # required per pair when tuning = fixed
//! ```
//!
//! A JSON object with the same keys is accepted too; list values may be JSON
//! arrays and `c_lambda` may be a nested `{design: {family: value}}` object.

use std::collections::BTreeMap;
use std::path::Path;

use crate::dgp::Design;
use crate::error::{Error, Result};
use crate::estimators::{Family, FitOptions};
use crate::evaluation::{MonteCarloConfig, TuningPlan};
use crate::tuning::{log_grid, CalibrationSettings, DEFAULT_FOLDS, DEFAULT_GRID_MAX, DEFAULT_GRID_MIN, DEFAULT_GRID_POINTS};

const KNOWN_KEYS: [&str; 14] = [
    "designs",
    "n",
    "estimators",
    "reps",
    "master_seed",
    "tuning",
    "calibration_reps",
    "calibration_n",
    "grid_min",
    "grid_max",
    "grid_points",
    "folds",
    "gamma",
    "loss_scale",
];

/// A raw entry with the line it came from (0 for JSON input).
#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config { line, message: message.into() }
}

/// Reads a config file, choosing the JSON parser when the first
/// non-blank character is `{`.
pub fn load_montecarlo_config(path: impl AsRef<Path>) -> Result<MonteCarloConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_montecarlo_config(&text)
}

pub fn parse_montecarlo_config(text: &str) -> Result<MonteCarloConfig> {
    let entries = if text.trim_start().starts_with('{') { json_entries(text)? } else { kv_entries(text)? };
    build(&entries)
}

fn kv_entries(text: &str) -> Result<BTreeMap<String, Entry>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| err(line, format!("expected `key = value`, got `{content}`")))?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        if key.is_empty() {
            return Err(err(line, "empty key"));
        }
        if value.is_empty() {
            return Err(err(line, format!("`{key}` has no value")));
        }
        if out.insert(key.clone(), Entry { line, value: value.to_string() }).is_some() {
            return Err(err(line, format!("`{key}` given twice")));
        }
    }
    Ok(out)
}

fn json_scalar(key: &str, v: &serde_json::Value) -> Result<String> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        serde_json::Value::Array(items) => {
            let parts: Result<Vec<String>> = items.iter().map(|i| json_scalar(key, i)).collect();
            Ok(parts?.join(","))
        }
        _ => Err(err(0, format!("`{key}` must be a string, number or array"))),
    }
}

fn json_entries(text: &str) -> Result<BTreeMap<String, Entry>> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| err(e.line(), e.to_string()))?;
    let obj = value.as_object().ok_or_else(|| err(1, "top level must be an object"))?;
    let mut out = BTreeMap::new();
    for (key, v) in obj {
        let key = key.to_ascii_lowercase();
        if key == "c_lambda" {
            let designs = v.as_object().ok_or_else(|| err(0, "`c_lambda` must be an object"))?;
            for (d, fams) in designs {
                let fams = fams.as_object().ok_or_else(|| err(0, format!("`c_lambda.{d}` must be an object")))?;
                for (f, c) in fams {
                    let k = format!("c_lambda.{}.{}", d.to_ascii_lowercase(), f.to_ascii_lowercase());
                    out.insert(k.clone(), Entry { line: 0, value: json_scalar(&k, c)? });
                }
            }
        } else {
            out.insert(key.clone(), Entry { line: 0, value: json_scalar(&key, v)? });
        }
    }
    Ok(out)
}

fn parse_one<T: std::str::FromStr>(key: &str, e: &Entry) -> Result<T> {
    e.value.trim().parse::<T>().map_err(|_| err(e.line, format!("`{key}`: cannot parse `{}`", e.value)))
}

fn parse_list<T: std::str::FromStr>(key: &str, e: &Entry) -> Result<Vec<T>> {
    let items: Vec<&str> = e.value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(err(e.line, format!("`{key}` is empty")));
    }
    items
        .into_iter()
        .map(|s| s.parse::<T>().map_err(|_| err(e.line, format!("`{key}`: invalid entry `{s}`"))))
        .collect()
}

fn build(entries: &BTreeMap<String, Entry>) -> Result<MonteCarloConfig> {
    for (key, e) in entries {
        if !KNOWN_KEYS.contains(&key.as_str()) && !key.starts_with("c_lambda.") {
            return Err(err(e.line, format!("unknown key `{key}`")));
        }
    }
    let required = |key: &str| entries.get(key).ok_or_else(|| err(0, format!("missing required key `{key}`")));
    let optional = |key: &str| entries.get(key);

    let designs: Vec<Design> = parse_list("designs", required("designs")?)?;
    let n_list: Vec<usize> = parse_list("n", required("n")?)?;
    let estimators: Vec<Family> = parse_list("estimators", required("estimators")?)?;
    let reps: usize = parse_one("reps", required("reps")?)?;
    let master_seed: u64 = parse_one("master_seed", required("master_seed")?)?;

    let grid_min = optional("grid_min").map(|e| parse_one::<f64>("grid_min", e)).transpose()?.unwrap_or(DEFAULT_GRID_MIN);
    let grid_max = optional("grid_max").map(|e| parse_one::<f64>("grid_max", e)).transpose()?.unwrap_or(DEFAULT_GRID_MAX);
    let grid_points =
        optional("grid_points").map(|e| parse_one::<usize>("grid_points", e)).transpose()?.unwrap_or(DEFAULT_GRID_POINTS);
    if !(grid_min > 0.0 && grid_max >= grid_min && grid_points >= 1) {
        let line = optional("grid_min").or(optional("grid_max")).or(optional("grid_points")).map_or(0, |e| e.line);
        return Err(err(line, "grid needs 0 < grid_min <= grid_max and grid_points >= 1"));
    }
    let folds = optional("folds").map(|e| parse_one::<usize>("folds", e)).transpose()?.unwrap_or(DEFAULT_FOLDS);
    if folds < 2 {
        return Err(err(optional("folds").map_or(0, |e| e.line), "folds must be >= 2"));
    }
    let mut fit = FitOptions::default();
    if let Some(e) = optional("gamma") {
        let g: f64 = parse_one("gamma", e)?;
        if !(g > 0.0 && g.is_finite()) {
            return Err(err(e.line, "gamma must be positive"));
        }
        fit = FitOptions::with_gamma(g);
    }
    if let Some(e) = optional("loss_scale") {
        fit.loss_scale = parse_one("loss_scale", e)?;
    }

    let mut fixed = Vec::new();
    for (key, e) in entries.iter().filter(|(k, _)| k.starts_with("c_lambda.")) {
        let mut parts = key.splitn(3, '.').skip(1);
        let (d, f) = match (parts.next(), parts.next()) {
            (Some(d), Some(f)) => (d, f),
            _ => return Err(err(e.line, format!("`{key}` should be c_lambda.<design>.<family>"))),
        };
        let design: Design = d.parse().map_err(|_| err(e.line, format!("unknown design `{d}`")))?;
        let family: Family = f.parse().map_err(|_| err(e.line, format!("unknown estimator `{f}`")))?;
        let c: f64 = parse_one(key, e)?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(err(e.line, format!("`{key}` must be positive")));
        }
        fixed.push((design, family, c));
    }

    let tuning_entry = required("tuning")?;
    let tuning = match tuning_entry.value.trim().to_ascii_lowercase().as_str() {
        "calibrate" => {
            let reps = optional("calibration_reps")
                .map(|e| parse_one::<usize>("calibration_reps", e))
                .transpose()?
                .unwrap_or(CalibrationSettings::default().reps);
            let n = optional("calibration_n")
                .map(|e| parse_one::<usize>("calibration_n", e))
                .transpose()?
                .unwrap_or(CalibrationSettings::default().n);
            if reps == 0 {
                return Err(err(optional("calibration_reps").map_or(0, |e| e.line), "calibration_reps must be >= 1"));
            }
            TuningPlan::Calibrate(CalibrationSettings { reps, n, grid: log_grid(grid_min, grid_max, grid_points), folds })
        }
        "fixed" => TuningPlan::Fixed(fixed),
        other => return Err(err(tuning_entry.line, format!("tuning must be `calibrate` or `fixed`, got `{other}`"))),
    };

    let config = MonteCarloConfig { designs, n_list, reps, estimators, tuning, master_seed, fit };
    config.validate().map_err(|e| err(0, e.to_string()))?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = "\
# comment line
designs = dgp1, dgp2
n = 40, 80   # trailing comment
estimators = ols, talasso
reps = 3
master_seed = 42
tuning = fixed
c_lambda.dgp1.talasso = 0.01
c_lambda.dgp2.talasso = 0.02
";

    #[test]
    fn parses_flat_text() {
        let c = parse_montecarlo_config(BASIC).unwrap();
        assert_eq!(c.designs, vec![Design::Dgp1, Design::Dgp2]);
        assert_eq!(c.n_list, vec![40, 80]);
        assert_eq!(c.estimators, vec![Family::Ols, Family::TAlasso]);
        assert_eq!(c.reps, 3);
        match c.tuning {
            TuningPlan::Fixed(t) => {
                assert_eq!(t.len(), 2);
                assert!(t.contains(&(Design::Dgp2, Family::TAlasso, 0.02)));
            }
            _ => panic!("expected fixed tuning"),
        }
    }

    #[test]
    fn json_matches_text() {
        let json = r#"{"designs": ["dgp1", "dgp2"], "n": [40, 80], "estimators": "ols,talasso",
            "reps": 3, "master_seed": 42, "tuning": "fixed",
            "c_lambda": {"dgp1": {"talasso": 0.01}, "dgp2": {"talasso": 0.02}}}"#;
        assert_eq!(parse_montecarlo_config(json).unwrap(), parse_montecarlo_config(BASIC).unwrap());
    }

    #[test]
    fn calibrate_defaults() {
        let text = "designs=dgp3\nn=40\nestimators=alasso\nreps=1\nmaster_seed=1\ntuning=calibrate\ngrid_points=5\n";
        match parse_montecarlo_config(text).unwrap().tuning {
            TuningPlan::Calibrate(s) => {
                assert_eq!((s.reps, s.n, s.folds, s.grid.len()), (100, 200, 10, 5));
            }
            _ => panic!("expected calibration"),
        }
    }

    fn line_of(text: &str) -> usize {
        match parse_montecarlo_config(text) {
            Err(Error::Config { line, .. }) => line,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_inputs_report_line() {
        assert_eq!(line_of(&BASIC.replace("reps = 3", "reps = three")), 5);
        assert_eq!(line_of(&BASIC.replace("designs = dgp1, dgp2", "designs = dgp9")), 2);
        assert_eq!(line_of(&BASIC.replace("tuning = fixed", "tuning fixed")), 7);
        assert_eq!(line_of(&format!("{BASIC}bogus = 1\n")), 10);
        assert_eq!(line_of(&format!("{BASIC}reps = 4\n")), 10);
        assert_eq!(line_of(&BASIC.replace("c_lambda.dgp2.talasso = 0.02", "c_lambda.dgp2.talasso = -1")), 9);
        assert_eq!(line_of(&BASIC.replace("master_seed = 42\n", "")), 0);
        assert!(matches!(parse_montecarlo_config("{\"designs\": [}"), Err(Error::Config { .. })));
    }
}
