//! Fit every estimator family to one simulated sample and compare the
//! estimated coefficients with the truth.
//!
//!     cargo run --release --example fit_estimators -- [dgp1|dgp2|dgp3] [n] [seed]

use twinlasso::dgp::{simulate, Design};
use twinlasso::estimators::{fit_family, Family, FitOptions};
use twinlasso::tuning::lambda_schedule;

// Rate constants of a typical calibration run; see the tune_lambda example.
fn constant(family: Family) -> f64 {
    match family {
        Family::Plasso => 0.005,
        Family::Slasso => 0.002,
        _ => 0.2,
    }
}

fn main() -> twinlasso::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let design: Design = args.get(1).map_or(Ok(Design::Dgp2), |s| s.parse())?;
    let n: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(400);
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1);

    let data = simulate(design, n, seed).slice_rows(0, n);
    let truth = data.truth().expect("simulated data carry truth");
    let opts = FitOptions::default();

    print!("{:<8}", "");
    for name in data.names() {
        print!("{name:>9}");
    }
    println!();
    print!("{:<8}", "truth");
    for b in &truth.theta_star {
        print!("{b:>9.4}");
    }
    println!();

    for family in Family::ALL {
        let lambda = if family.is_penalized() { lambda_schedule(constant(family), n, family)? } else { 0.0 };
        let fit = fit_family(family, &data, lambda, &opts)?;
        print!("{:<8}", family.as_str());
        for b in &fit.coefficients {
            if *b == 0.0 {
                print!("{:>9}", ".");
            } else {
                print!("{b:>9.4}");
            }
        }
        println!("   lambda={lambda:.4} iters={}", fit.iterations);
    }
    Ok(())
}
