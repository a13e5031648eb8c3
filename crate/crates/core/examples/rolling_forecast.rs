//! Rolling-window return forecasts on a monthly panel. Without an argument
//! a synthetic panel with a persistent predictor is generated.
//!
//!     cargo run --release --example rolling_forecast -- [panel.csv]

use nalgebra::DMatrix;
use twinlasso::empirical::{
    ar1_coefficient, load_panel, rolling_forecast, Forecaster, HorizonSpec, ReturnPanel, RollingSettings, YearMonth,
    REQUIRED_PREDICTORS,
};
use twinlasso::rng::{rng_from_seed, standard_normal};
use twinlasso::tuning::Selector;
use twinlasso::Family;

fn synthetic_panel(months: usize) -> twinlasso::Result<ReturnPanel> {
    let mut rng = rng_from_seed(5);
    let p = REQUIRED_PREDICTORS.len() + 1;
    let mut x = DMatrix::zeros(months, p);
    for j in 0..p {
        let rho = if j % 3 == 0 { 0.99 } else { 0.3 };
        for t in 1..months {
            x[(t, j)] = rho * x[(t - 1, j)] + standard_normal(&mut rng);
        }
    }
    let ex: Vec<f64> = (0..months)
        .map(|t| {
            let signal = if t > 0 { 0.004 * x[(t - 1, 0)] } else { 0.0 };
            0.005 + signal + 0.04 * standard_normal(&mut rng)
        })
        .collect();
    let mut dates = vec![YearMonth::new(1950, 1)?];
    while dates.len() < months {
        let next = dates.last().unwrap().succ();
        dates.push(next);
    }
    let mut names: Vec<String> = REQUIRED_PREDICTORS.iter().map(|s| s.to_string()).collect();
    names.push("ntis".into());
    ReturnPanel::new(dates, ex, x, names, "synthetic")
}

fn main() -> twinlasso::Result<()> {
    let panel = match std::env::args().nth(1) {
        Some(path) => load_panel(path)?,
        None => synthetic_panel(480)?,
    };
    println!("{} months from {} to {}", panel.len(), panel.dates[0], panel.dates[panel.len() - 1]);
    println!("AR(1) of excess return: {:.3}", ar1_coefficient(&panel.ex_return)?);

    let forecasters = [
        Forecaster::Rwwd,
        Forecaster::Ols,
        Forecaster::Penalized { family: Family::Plasso, selector: Selector::Cv },
        Forecaster::Penalized { family: Family::TAlasso, selector: Selector::Bic },
    ];
    let settings = RollingSettings::default();
    println!("{:>7} {:>5} {:>14} {:>12} {:>12} {:>8}", "window", "h", "method", "RMPSEx100", "MPAEx100", "failed");
    for window in [120, 180] {
        for h in [1.0 / 12.0, 1.0, 3.0] {
            let spec = HorizonSpec::new(h, window)?;
            for f in forecasters {
                let r = rolling_forecast(&panel, &spec, f, &settings)?;
                println!(
                    "{window:>7} {:>5} {:>14} {:>12.3} {:>12.3} {:>8}",
                    spec.label(),
                    r.forecaster,
                    r.rmpse_x100,
                    r.mpae_x100,
                    r.failed_windows.len()
                );
            }
        }
    }
    Ok(())
}
