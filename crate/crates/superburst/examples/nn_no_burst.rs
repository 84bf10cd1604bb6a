//! Nearest-neighbor arrays below gamma = 1/(2D) cannot superradiate: the
//! exact rate-operator maximum equals N and the emission is monotone.
//!
//! Run with: cargo run --release --example nn_no_burst

use superburst::{
    applicable_bounds, build_decoherence, burst_time_grid, detect_burst, lindblad_evolve,
    InitialState, InteractionModel, LatticeSpec,
};

fn main() -> Result<(), superburst::Error> {
    println!("lattice       gamma    brute/N   peak_rate/N   burst");
    for (lattice, d) in [
        (LatticeSpec::chain(10)?, 1),
        (LatticeSpec::hyperrectangle(vec![3, 3])?, 2),
        (LatticeSpec::hyperrectangle(vec![2, 2, 2])?, 3),
    ] {
        let gamma = 0.9 / (2.0 * d as f64);
        let model = InteractionModel::NearestNeighbor { gamma };
        let n = lattice.n_sites() as f64;

        let matrix = build_decoherence(&model, &lattice)?;
        let bounds = applicable_bounds(&model, &lattice, Some(&matrix))?;
        let brute = bounds.last().expect("brute force requested").bound_value;

        eprintln!("integrating {lattice} ...");
        let grid = burst_time_grid(4.0);
        let trace = lindblad_evolve(&matrix, None, InitialState::FullyExcited, &grid)?;
        let report = detect_burst(&trace, 1e-8)?;
        let peak = trace.rates.iter().cloned().fold(f64::MIN, f64::max);

        println!(
            "{lattice:<13} {gamma:<8.4} {:<9.6} {:<13.6} {}",
            brute / n,
            peak / n,
            report.has_burst
        );
        assert!(!report.has_burst);
        assert!((brute - n).abs() < 1e-9 * n);
    }
    println!("all arrays decay monotonically from the fully excited state");
    Ok(())
}
