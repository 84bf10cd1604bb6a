//! Decomposing the decoherence matrix into independent decay channels:
//! eigenvalues are channel rates, eigenvectors the collective modes.
//! A unidirectional waveguide concentrates all decay into two channels.
//!
//! Run with: cargo run --release --example jump_channels

use superburst::{build_decoherence, jump_operators, InteractionModel, LatticeSpec};

fn main() -> Result<(), superburst::Error> {
    let lattice = LatticeSpec::chain(8)?;

    let exp = build_decoherence(&InteractionModel::Exponential { gamma: 0.6 }, &lattice)?;
    let (rates, _) = jump_operators(&exp)?;
    println!("exponential chain, 8 sites: channel rates");
    for (k, rate) in rates.iter().enumerate() {
        println!("  mode {k}: {rate:.6}");
    }
    println!("  sum = {:.6} (equals N)", rates.iter().sum::<f64>());

    let chiral = build_decoherence(
        &InteractionModel::ChiralInfiniteRange { kd: 1.1, chi: 0.7 },
        &lattice,
    )?;
    let (rates, modes) = jump_operators(&chiral)?;
    let active = rates.iter().filter(|r| **r > 1e-9).count();
    println!("chiral chain, 8 sites: {active} active channels out of {}", rates.len());
    for (k, rate) in rates.iter().enumerate().take(active) {
        let weight: f64 = (0..8).map(|s| modes[(s, k)].norm_sqr()).sum();
        println!("  mode {k}: rate {rate:.6}, norm {weight:.3}");
    }
    Ok(())
}
