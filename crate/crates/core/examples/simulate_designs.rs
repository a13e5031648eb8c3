//! Simulate the three mixed-persistence designs, summarize each regressor
//! and dump the samples to CSV.
//!
//!     cargo run --release --example simulate_designs -- [n] [seed] [out_dir]

use std::fs::File;

use twinlasso::dgp::{simulate, write_csv, Design};

fn main() -> twinlasso::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(7);
    let out_dir = args.get(3).cloned().unwrap_or_else(|| std::env::temp_dir().display().to_string());

    for design in Design::ALL {
        let data = simulate(design, n, seed);
        let truth = data.truth().expect("truth");
        println!("{design}: {} rows (last one held out), p = {}", data.n(), data.p());
        println!("  {:<8} {:>6} {:>10} {:>10} {:>10}", "name", "class", "theta*", "mean", "sd");
        for (j, name) in data.names().iter().enumerate() {
            let col = data.predictors().column(j);
            let mean = col.mean();
            let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / col.len() as f64).sqrt();
            println!(
                "  {name:<8} {:>6} {:>10.4} {mean:>10.3} {sd:>10.3}",
                format!("{:?}", truth.persistence[j]),
                truth.theta_star[j]
            );
        }
        if let Some(rows) = &truth.coint_matrix {
            for r in rows {
                let resid: Vec<f64> = (0..data.n()).map(|t| (0..data.p()).map(|j| r[j] * data.predictors()[(t, j)]).sum()).collect();
                let var = resid.iter().map(|v| v * v).sum::<f64>() / resid.len() as f64;
                println!("  cointegrating combination second moment: {var:.3}");
            }
        }
        let path = format!("{out_dir}/{design}_n{n}_seed{seed}.csv");
        write_csv(&data, File::create(&path)?)?;
        println!("  written to {path}\n");
    }
    Ok(())
}
