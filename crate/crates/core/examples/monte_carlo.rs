//! Calibrate the rate constants and run the forecasting and selection study
//! across designs and sample sizes.
//!
//!     cargo run --release --example monte_carlo -- [reps] [designs] [sizes]
//!
//! e.g. `-- 200 dgp1,dgp2 40,200,800`.

use twinlasso::dgp::Design;
use twinlasso::estimators::{Family, FitOptions};
use twinlasso::evaluation::{run_montecarlo, MonteCarloConfig, TuningPlan};
use twinlasso::report::{coint_table, mpse_table, selection_table};
use twinlasso::tuning::CalibrationSettings;

fn print_table((header, rows): (Vec<String>, Vec<Vec<String>>)) {
    println!("{}", header.iter().map(|h| format!("{h:>13}")).collect::<String>());
    for r in rows {
        println!("{}", r.iter().map(|c| format!("{c:>13}")).collect::<String>());
    }
    println!();
}

fn main() -> twinlasso::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let reps: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let designs: Vec<Design> =
        args.get(2).map_or("dgp1,dgp2,dgp3", |s| s.as_str()).split(',').map(str::parse).collect::<Result<_, _>>()?;
    let n_list: Vec<usize> =
        args.get(3).map_or("40,80,120,200,400,800", |s| s.as_str()).split(',').filter_map(|s| s.parse().ok()).collect();

    let config = MonteCarloConfig {
        designs,
        n_list,
        reps,
        estimators: Family::ALL.to_vec(),
        tuning: TuningPlan::Calibrate(CalibrationSettings::default()),
        master_seed: 42,
        fit: FitOptions::default(),
    };
    let started = std::time::Instant::now();
    let report = run_montecarlo(&config)?;

    for cal in &report.calibrations {
        let mut sorted = cal.choices.clone();
        sorted.sort_by(f64::total_cmp);
        let q = |f: f64| sorted[((sorted.len() - 1) as f64 * f) as usize];
        println!(
            "c_lambda {:<5} {:<8} = {:.4e}   (quartiles {:.2e} / {:.2e}, max {:.2e})",
            cal.design.as_str(),
            cal.family.as_str(),
            cal.c_lambda,
            q(0.25),
            q(0.75),
            q(1.0)
        );
    }
    println!("\nMPSE");
    print_table(mpse_table(&report));
    println!("Selection rates");
    print_table(selection_table(&report));
    println!("Inactive cointegrated pair");
    print_table(coint_table(&report));
    println!("elapsed {:.1}s", started.elapsed().as_secs_f64());
    Ok(())
}
