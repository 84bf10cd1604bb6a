//! How the superradiance threshold scales with system size and dimension
//! for exponentially decaying and inverse-distance couplings.
//!
//! Run with: cargo run --release --example threshold_scaling

use superburst::{gamma_s, gamma_s_bulk, gamma_s_numeric, InteractionModel, LatticeSpec};

fn main() -> Result<(), superburst::Error> {
    let exp = InteractionModel::Exponential { gamma: 0.0 };
    let power = InteractionModel::PowerLaw { gamma: 0.0 };

    println!("exponential chain: threshold vs size (limit 1/sqrt(3) = {:.6})", 1f64 / 3f64.sqrt());
    for n in [1_000, 10_000, 100_000] {
        let gs = gamma_s_numeric(&exp, &LatticeSpec::chain(n)?)?.unwrap();
        println!("  N = {n:<7} gamma_s = {gs:.6}");
    }

    println!("exponential bulk: threshold vs dimension");
    let mut pts = Vec::new();
    for d in 1..=6 {
        let gs = gamma_s_bulk(&exp, d)?;
        pts.push(((d as f64).ln(), gs.ln()));
        println!("  D = {d}       gamma_s = {gs:.6}");
    }
    let n = pts.len() as f64;
    let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (sxx, sxy): (f64, f64) =
        pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 * p.0, a.1 + p.0 * p.1));
    println!("  log-log slope = {:.3}", (n * sxy - sx * sy) / (n * sxx - sx * sx));

    println!("inverse-distance chain: size-independent (limit sqrt(3)/pi = {:.6})", 3f64.sqrt() / std::f64::consts::PI);
    for n in [100, 10_000] {
        let gs = gamma_s(&power, &LatticeSpec::chain(n)?)?.unwrap();
        println!("  N = {n:<7} gamma_s = {gs:.6}");
    }

    println!("inverse-distance cube: threshold decays like N^(-1/6)");
    for extent in [10, 22, 46] {
        let lat = LatticeSpec::hypercube(3, extent)?;
        let n = lat.n_sites();
        let gs = gamma_s_numeric(&power, &lat)?.unwrap();
        println!(
            "  N = {n:<7} gamma_s = {gs:.6}   gamma_s * N^(1/6) = {:.4}",
            gs * (n as f64).powf(1.0 / 6.0)
        );
    }
    Ok(())
}
