//! Solve random weighted-L1 problems, some with infinite weights, and print
//! the optimality residuals of each solution.
//!
//!     cargo run --release --example kkt_diagnostics -- [instances] [seed]

use rand::Rng;
use twinlasso::rng::{rng_from_seed, standard_normal};
use twinlasso::solver::{kkt_check, weighted_lasso_solve, PenaltySpec};
use twinlasso::{Family, TimeSeriesDataset};

fn main() -> twinlasso::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let instances: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);
    let mut rng = rng_from_seed(seed);

    println!("{:>4} {:>4} {:>3} {:>10} {:>6} {:>7} {:>12}", "id", "n", "p", "lambda", "active", "iters", "max KKT");
    for id in 0..instances {
        let n = rng.random_range(20..=100);
        let p = rng.random_range(1..=8);
        let cols: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| standard_normal(&mut rng)).collect()).collect();
        let y: Vec<f64> = (0..n).map(|t| cols[0][t] + 0.5 * standard_normal(&mut rng)).collect();
        let data = TimeSeriesDataset::from_columns(y, &cols)?;
        let weights: Vec<f64> =
            (0..p).map(|_| if rng.random_bool(0.15) { f64::INFINITY } else { rng.random_range(0.1..3.0) }).collect();
        let lambda = rng.random_range(0.0..2.0 * n as f64);
        let pen = PenaltySpec::new(Family::Plasso, lambda, weights.clone());
        let fit = weighted_lasso_solve(&data, &pen, true)?;
        let kkt = kkt_check(&data, &fit, lambda, &weights, true);
        println!(
            "{id:>4} {n:>4} {p:>3} {lambda:>10.3} {:>6} {:>7} {:>12.3e}",
            fit.active_set.len(),
            fit.iterations,
            kkt.max_violation()
        );
    }
    Ok(())
}
