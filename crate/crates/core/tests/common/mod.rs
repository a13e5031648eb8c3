#![allow(dead_code)]

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;
use twinlasso::empirical::{ReturnPanel, YearMonth, REQUIRED_PREDICTORS};
use twinlasso::rng::{rng_from_seed, standard_normal, SimRng};
use twinlasso::TimeSeriesDataset;

/// Mix of iid, AR(1) and random-walk columns with a sparse signal.
pub fn random_dataset(rng: &mut SimRng, n: usize, p: usize) -> TimeSeriesDataset {
    let cols: Vec<Vec<f64>> = (0..p)
        .map(|j| {
            let mut x = vec![0.0; n];
            let rho = match j % 3 {
                0 => 0.0,
                1 => 0.6,
                _ => 1.0,
            };
            let mut prev = 0.0;
            for v in x.iter_mut() {
                prev = rho * prev + standard_normal(rng);
                *v = prev;
            }
            x
        })
        .collect();
    let beta: Vec<f64> = (0..p).map(|_| if rng.random_bool(0.5) { rng.random_range(-1.0..1.0) } else { 0.0 }).collect();
    let y: Vec<f64> = (0..n)
        .map(|t| 0.3 + (0..p).map(|j| beta[j] * cols[j][t] / (1.0 + (j % 3 == 2) as u8 as f64 * 4.0)).sum::<f64>() + standard_normal(rng))
        .collect();
    TimeSeriesDataset::from_columns(y, &cols).unwrap()
}

pub fn month_sequence(start: YearMonth, len: usize) -> Vec<YearMonth> {
    let mut out = Vec::with_capacity(len);
    let mut d = start;
    for _ in 0..len {
        out.push(d);
        d = d.succ();
    }
    out
}

/// Twelve predictors (four persistent), returns loading on the lagged first predictor.
pub fn synthetic_panel(months: usize, seed: u64) -> ReturnPanel {
    let mut rng = rng_from_seed(seed);
    let p = 12;
    let mut x = DMatrix::zeros(months, p);
    for j in 0..p {
        let rho = if j % 3 == 0 { 0.98 } else { 0.4 };
        let mut prev = 0.0;
        for t in 0..months {
            prev = rho * prev + standard_normal(&mut rng);
            x[(t, j)] = prev;
        }
    }
    let ex: Vec<f64> = (0..months)
        .map(|t| 0.004 + if t > 0 { 0.003 * x[(t - 1, 0)] } else { 0.0 } + 0.04 * standard_normal(&mut rng))
        .collect();
    let mut names: Vec<String> = REQUIRED_PREDICTORS.iter().map(|s| s.to_string()).collect();
    names.push("ntis".into());
    ReturnPanel::new(month_sequence(YearMonth::new(1950, 1).unwrap(), months), ex, x, names, "synthetic").unwrap()
}

pub fn write_panel_csv(panel: &ReturnPanel, path: &Path) {
    let mut f = std::fs::File::create(path).unwrap();
    let mut header = vec!["date".to_string(), "ex_return".to_string()];
    header.extend(panel.names.iter().cloned());
    writeln!(f, "{}", header.join(",")).unwrap();
    for t in 0..panel.len() {
        let mut row = vec![panel.dates[t].to_string(), format!("{}", panel.ex_return[t])];
        row.extend((0..panel.names.len()).map(|j| format!("{}", panel.predictors[(t, j)])));
        writeln!(f, "{}", row.join(",")).unwrap();
    }
}
