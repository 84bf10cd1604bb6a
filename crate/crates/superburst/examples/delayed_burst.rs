//! Collective decay with a local-noise imperfection: just below the critical
//! noise level a faint, delayed burst survives — the rate first drops, then
//! climbs a hair above its initial value before collapsing.
//!
//! Run with: cargo run --release --example delayed_burst

use superburst::{detect_burst, dicke_local_evolve};

fn main() -> Result<(), superburst::Error> {
    for n in [20, 10] {
        let gamma = (1.0 - 1e-4) / ((n - 1) as f64).sqrt();
        let mut times = vec![0.0];
        let mut t = 1e-4;
        while t < 8.0 {
            times.push(t);
            t *= 1.12;
        }
        times.push(8.0);
        eprintln!("running {n} emitters at gamma = {gamma:.6} ...");
        let trace = dicke_local_evolve(n, gamma, &times)?;
        let report = detect_burst(&trace, 1e-8)?;
        println!("N = {n:<3} burst = {:<5} delayed = {:<5}", report.has_burst, report.is_delayed);
        if report.has_burst {
            println!(
                "      peak at t = {:.3}, fractional increase = {:.2e}",
                report.peak_time, report.fractional_increase
            );
        }
    }
    Ok(())
}
