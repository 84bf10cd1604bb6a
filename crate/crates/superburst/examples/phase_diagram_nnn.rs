//! Phase map of the two-shell ring: where the couplings stay physical and
//! where the emission bursts. Prints the region census and the smallest
//! next-shell coupling that supports a burst.
//!
//! Run with: cargo run --release --example phase_diagram_nnn

use superburst::{nnn_min_gamma2, nnn_region, nnn_region_finite, RegionVerdict};

fn main() -> Result<(), superburst::Error> {
    let res = 2e-3;
    let steps1 = (1.0 / res) as usize;
    let steps2 = (0.5 / res) as usize;

    let mut counts = [0usize; 3];
    let mut min_g2: Option<f64> = None;
    let mut finite_mismatch = 0usize;
    for i1 in 0..=steps1 {
        let g1 = i1 as f64 * res;
        for i2 in 0..=steps2 {
            let g2 = i2 as f64 * res;
            let verdict = nnn_region(g1, g2);
            counts[verdict as usize] += 1;
            if verdict == RegionVerdict::Superradiant && min_g2.map_or(true, |m| g2 < m) {
                min_g2 = Some(g2);
            }
            if verdict != nnn_region_finite(101, g1, g2)? {
                finite_mismatch += 1;
            }
        }
    }

    let cells = (steps1 + 1) * (steps2 + 1);
    println!("grid: {cells} cells at resolution {res}");
    println!("unphysical:        {}", counts[0]);
    println!("physical_no_burst: {}", counts[1]);
    println!("superradiant:      {}", counts[2]);
    println!("cells reclassified on a 101-site ring: {finite_mismatch}");
    println!(
        "min gamma2 with a burst: {:.4} (closed form {:.6})",
        min_g2.unwrap(),
        nnn_min_gamma2()
    );
    Ok(())
}
