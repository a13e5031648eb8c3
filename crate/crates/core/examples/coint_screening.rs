//! How often the adaptive and twin-adaptive fits drop both members of the
//! inactive cointegrated pair, by sample size.
//!
//!     cargo run --release --example coint_screening -- [design] [c_lambda] [reps]

use twinlasso::dgp::Design;
use twinlasso::estimators::Family;
use twinlasso::evaluation::coint_group_screening;

fn main() -> twinlasso::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let design: Design = args.get(1).map_or(Ok(Design::Dgp2), |s| s.parse())?;
    let c: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.2);
    let reps: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(200);

    println!("{:>5} {:>8} {:>10} {:>10} {:>10}", "n", "method", "both", "one", "neither");
    for n in [40, 80, 200, 400, 800] {
        for family in [Family::Alasso, Family::TAlasso] {
            let g = coint_group_screening(design, n, family, c, reps, 42)?;
            println!(
                "{n:>5} {:>8} {:>10.3} {:>10.3} {:>10.3}",
                family.as_str(),
                g.frac_both_zero,
                g.frac_exactly_one_zero,
                g.frac_neither_zero
            );
        }
    }
    Ok(())
}
