//! Select the rate constant by blocked cross-validation and by BIC on one
//! sample, then calibrate it over repeated simulations.
//!
//!     cargo run --release --example tune_lambda -- [family] [design] [calibration_reps]

use twinlasso::dgp::{simulate, Design};
use twinlasso::estimators::{Family, FitOptions};
use twinlasso::tuning::{bic_select_detailed, calibrate_clambda, cv_select_detailed, default_grid, CalibrationSettings, DEFAULT_FOLDS};

fn main() -> twinlasso::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let family: Family = args.get(1).map_or(Ok(Family::TAlasso), |s| s.parse())?;
    let design: Design = args.get(2).map_or(Ok(Design::Dgp1), |s| s.parse())?;
    let reps: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(20);

    let grid = default_grid();
    let opts = FitOptions::default();
    let sample = simulate(design, 200, 11).slice_rows(0, 200);

    let cv = cv_select_detailed(&sample, family, &grid, DEFAULT_FOLDS, &opts)?;
    let bic = bic_select_detailed(&sample, family, &grid, &opts)?;
    println!("{:>12} {:>14} {:>14}", "c_lambda", "CV MSE", "BIC");
    for (k, c) in grid.iter().enumerate() {
        let show = |s: Option<f64>| s.map_or("failed".to_string(), |v| format!("{v:.6}"));
        println!("{c:>12.3e} {:>14} {:>14}", show(cv.scores[k]), show(bic.scores[k]));
    }
    println!("CV choice {:.4e}, BIC choice {:.4e}", cv.c_lambda, bic.c_lambda);

    let settings = CalibrationSettings { reps, ..CalibrationSettings::default() };
    let cal = calibrate_clambda(design, family, &settings, 42, &opts)?;
    let lo = cal.choices.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = cal.choices.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    println!(
        "calibrated {family} on {design}: median {:.4e} over {} samples (range {lo:.3e} .. {hi:.3e})",
        cal.c_lambda, cal.reps
    );
    Ok(())
}
