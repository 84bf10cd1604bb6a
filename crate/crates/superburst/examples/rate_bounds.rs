//! Certified ceilings on the emission rate: cheap closed-form bounds next to
//! the exact sector-wise maximum on arrays small enough to diagonalize.
//!
//! Run with: cargo run --release --example rate_bounds

use superburst::{applicable_bounds, build_decoherence, InteractionModel, LatticeSpec};

fn main() -> Result<(), superburst::Error> {
    let cases = [
        (InteractionModel::NearestNeighbor { gamma: 0.25 }, LatticeSpec::hyperrectangle(vec![3, 3])?),
        (InteractionModel::NearestNeighbor { gamma: 0.45 }, LatticeSpec::chain(12)?),
        (InteractionModel::Exponential { gamma: 0.5 }, LatticeSpec::ring(11)?),
        (InteractionModel::PowerLaw { gamma: 0.4 }, LatticeSpec::chain(10)?),
    ];
    for (model, lattice) in cases {
        let gamma = build_decoherence(&model, &lattice)?;
        println!("{} on {lattice}:", model.descriptor());
        for bound in applicable_bounds(&model, &lattice, Some(&gamma))? {
            println!(
                "  {:<17} bound = {:<10.6} certifies_no_burst = {}",
                bound.method.to_string(),
                bound.bound_value,
                bound.certifies_no_burst
            );
        }
    }
    Ok(())
}
