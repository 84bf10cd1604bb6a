//! Upper bounds on the instantaneous emission rate, valid at all times and
//! for every state. A bound at or below N (the fully excited rate) certifies
//! that no burst can ever occur; the brute-force variant computes the exact
//! sector-wise operator maximum for small arrays.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Boundary, LatticeSpec};
use crate::models::{DecoherenceMatrix, InteractionModel};
use crate::sectors::{sector_block_complex, sector_block_real, SectorBasis};

/// Largest array size accepted by the brute-force sector diagonalization.
pub const BRUTE_FORCE_MAX_SITES: usize = 14;

/// Euler-Mascheroni constant, for harmonic-sum bounds.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// How a rate bound was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    /// Row-sum bound on the sector blocks of the rate operator.
    Gershgorin,
    /// Row sums relaxed to a geometric series tail.
    GeometricSeries,
    /// Row sums relaxed to a harmonic sum.
    HarmonicSum,
    /// Exact sector-wise largest eigenvalue.
    BruteForce,
}

impl std::fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundMethod::Gershgorin => "gershgorin",
            BoundMethod::GeometricSeries => "geometric_series",
            BoundMethod::HarmonicSum => "harmonic_sum",
            BoundMethod::BruteForce => "brute_force",
        })
    }
}

/// A certified upper bound on the emission rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RateBound {
    pub model_tag: String,
    pub n: usize,
    /// Upper bound on the rate, in units of the single-emitter rate.
    pub bound_value: f64,
    pub method: BoundMethod,
    /// True when the bound does not exceed N: emission can never beat
    /// independent decay at full excitation, so no burst is possible.
    pub certifies_no_burst: bool,
}

fn certify(n: usize, bound: f64) -> bool {
    bound <= n as f64 * (1.0 + 1e-9)
}

/// Gershgorin bound for uniform nearest-neighbor coupling: in the sector
/// with m de-excitations the diagonal is N - m and each row holds at most
/// 2 D m gamma of off-diagonal weight, giving
/// max_m (N - m + 2 D m gamma) = max(N, 2 D gamma N).
pub fn gershgorin_nn_bound(
    model: &InteractionModel,
    lattice: &LatticeSpec,
) -> Result<RateBound> {
    let gamma = match model {
        InteractionModel::NearestNeighbor { gamma } => *gamma,
        _ => {
            return Err(Error::Unsupported(format!(
                "row-sum bound is derived for uniform nearest-neighbor coupling, not {}",
                model.descriptor()
            )))
        }
    };
    model.validate()?;
    model.check_lattice(lattice)?;
    let n = lattice.n_sites();
    let degree = 2.0 * lattice.dimension as f64;
    let bound = (0..=n)
        .map(|jumps| (n - jumps) as f64 + degree * gamma * jumps as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(RateBound {
        model_tag: model.descriptor(),
        n,
        bound_value: bound,
        method: BoundMethod::Gershgorin,
        certifies_no_burst: certify(n, bound),
    })
}

/// Rate bound for the exponential-decay ring of odd size: ground-site row
/// sums are relaxed to the full geometric tail 2 gamma / (1 - gamma).
///
/// Piecewise in gamma: below 1/3 the fully excited sector dominates and the
/// bound is exactly N.
pub fn exponential_1d_bound(n: usize, gamma: f64) -> Result<RateBound> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::InvalidLattice(format!(
            "exponential ring bound needs odd n >= 3, got {n}"
        )));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidModel(format!(
            "exponential gamma must lie in [0, 1], got {gamma}"
        )));
    }
    let nf = n as f64;
    let half = (nf - 1.0) / 2.0;
    let bound = if gamma <= 1.0 / 3.0 {
        nf
    } else if gamma < 1.0 {
        nf + half * (3.0 * gamma - 1.0) / (1.0 - gamma)
    } else {
        nf + (nf - 1.0) * (nf - 2.0) / 2.0
    };
    Ok(RateBound {
        model_tag: InteractionModel::Exponential { gamma }.descriptor(),
        n,
        bound_value: bound,
        method: BoundMethod::GeometricSeries,
        certifies_no_burst: certify(n, bound),
    })
}

/// Rate bound for the inverse-distance chain: ground-site row sums are
/// relaxed to the harmonic sum 2 gamma (ln N + Euler's constant).
pub fn powerlaw_1d_bound(n: usize, gamma: f64) -> Result<RateBound> {
    if n < 2 {
        return Err(Error::InvalidLattice(format!(
            "inverse-distance bound needs n >= 2, got {n}"
        )));
    }
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::InvalidModel(format!("bad coupling {gamma}")));
    }
    let nf = n as f64;
    let excess = (2.0 * gamma * (nf.ln() + EULER_GAMMA) - 1.0).max(0.0);
    let bound = nf + 0.5 * (nf - 1.0) * excess;
    Ok(RateBound {
        model_tag: InteractionModel::PowerLaw { gamma }.descriptor(),
        n,
        bound_value: bound,
        method: BoundMethod::HarmonicSum,
        certifies_no_burst: certify(n, bound),
    })
}

/// Exact largest eigenvalue of the rate operator over all excitation
/// sectors. Complementary sectors are isospectral up to their diagonals, so
/// only the lower half is diagonalized: the maximum over m <= N/2 of
/// (N - m) + max_eig(block_m).
pub fn brute_force_hgamma_max(gamma: &DecoherenceMatrix) -> Result<f64> {
    let n = gamma.n;
    if n > BRUTE_FORCE_MAX_SITES {
        return Err(Error::TooLarge(format!(
            "brute-force sector diagonalization is capped at {BRUTE_FORCE_MAX_SITES} sites, got {n}"
        )));
    }
    let real = gamma.real_entries();
    let mut best = f64::NEG_INFINITY;
    for m in 0..=n / 2 {
        let basis = SectorBasis::new(n, m);
        let top = if m == 0 {
            0.0
        } else {
            let vals = match &real {
                Some(re) => sector_block_real(re, &basis).to_dense().symmetric_eigenvalues(),
                None => sector_block_complex(&gamma.entries, &basis).symmetric_eigenvalues(),
            };
            vals.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        };
        best = best.max((n - m) as f64 + top);
    }
    Ok(best)
}

/// All closed-form bounds applicable to the model/lattice pair. Passing the
/// built decoherence matrix additionally requests the brute-force sector
/// value (only available for small arrays).
pub fn applicable_bounds(
    model: &InteractionModel,
    lattice: &LatticeSpec,
    gamma: Option<&DecoherenceMatrix>,
) -> Result<Vec<RateBound>> {
    let n = lattice.n_sites();
    let mut out = Vec::new();
    match model {
        InteractionModel::NearestNeighbor { .. } => {
            out.push(gershgorin_nn_bound(model, lattice)?);
        }
        InteractionModel::Exponential { gamma } => {
            if lattice.is_ring() && n % 2 == 1 {
                out.push(exponential_1d_bound(n, *gamma)?);
            }
        }
        InteractionModel::PowerLaw { gamma } => {
            if lattice.dimension == 1 && lattice.boundary == Boundary::Open && n >= 2 {
                out.push(powerlaw_1d_bound(n, *gamma)?);
            }
        }
        _ => {}
    }
    if let Some(gamma) = gamma {
        let value = brute_force_hgamma_max(gamma)?;
        out.push(RateBound {
            model_tag: model.descriptor(),
            n,
            bound_value: value,
            method: BoundMethod::BruteForce,
            certifies_no_burst: certify(n, value),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::build_decoherence;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    #[test]
    fn nearest_neighbor_row_sum_bound() {
        let lat = LatticeSpec::chain(5).unwrap();
        let b = gershgorin_nn_bound(&InteractionModel::NearestNeighbor { gamma: 0.3 }, &lat)
            .unwrap();
        assert_relative_eq!(b.bound_value, 5.0);
        assert!(b.certifies_no_burst);
        let b = gershgorin_nn_bound(&InteractionModel::NearestNeighbor { gamma: 0.8 }, &lat)
            .unwrap();
        assert_relative_eq!(b.bound_value, 8.0);
        assert!(!b.certifies_no_burst);
        // 2D: certification holds exactly up to 1/(2D).
        let grid = LatticeSpec::hyperrectangle(vec![3, 3]).unwrap();
        for (g, want) in [(0.24, true), (0.26, false)] {
            let b = gershgorin_nn_bound(&InteractionModel::NearestNeighbor { gamma: g }, &grid)
                .unwrap();
            assert_eq!(b.certifies_no_burst, want, "gamma = {g}");
        }
    }

    #[test]
    fn exponential_ring_bound_values() {
        assert_relative_eq!(exponential_1d_bound(5, 0.2).unwrap().bound_value, 5.0);
        // (3 * 0.5 - 1) / (1 - 0.5) = 1 per relaxed site, two sites.
        assert_relative_eq!(exponential_1d_bound(5, 0.5).unwrap().bound_value, 7.0);
        assert_relative_eq!(exponential_1d_bound(5, 1.0).unwrap().bound_value, 11.0);
        assert!(exponential_1d_bound(6, 0.5).is_err());
        assert!(exponential_1d_bound(5, 1.2).is_err());
    }

    #[test]
    fn powerlaw_bound_clamps_at_n() {
        let weak = powerlaw_1d_bound(100, 0.05).unwrap();
        assert_relative_eq!(weak.bound_value, 100.0);
        assert!(weak.certifies_no_burst);
        let strong = powerlaw_1d_bound(100, 0.8).unwrap();
        let expect = 100.0 + 49.5 * (1.6 * (100f64.ln() + EULER_GAMMA) - 1.0);
        assert_relative_eq!(strong.bound_value, expect, epsilon = 1e-12);
        assert!(!strong.certifies_no_burst);
    }

    /// Oracle: diagonalize every sector without the complement shortcut.
    fn all_sector_max(gamma: &DecoherenceMatrix) -> f64 {
        let n = gamma.n;
        let mut best = f64::NEG_INFINITY;
        for m in 0..=n {
            let basis = SectorBasis::new(n, m);
            let block = sector_block_complex(&gamma.entries, &basis);
            let top = if m == 0 || m == n {
                0.0
            } else {
                block
                    .symmetric_eigenvalues()
                    .iter()
                    .copied()
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            best = best.max(m as f64 + top);
        }
        best
    }

    #[test]
    fn brute_force_matches_all_sector_oracle() {
        let lat = LatticeSpec::chain(7).unwrap();
        for model in [
            InteractionModel::NearestNeighbor { gamma: 0.7 },
            InteractionModel::Exponential { gamma: 0.8 },
            InteractionModel::PowerLaw { gamma: 0.9 },
            InteractionModel::ChiralInfiniteRange { kd: 1.1, chi: 0.6 },
        ] {
            let gamma = build_decoherence(&model, &lat).unwrap();
            let fast = brute_force_hgamma_max(&gamma).unwrap();
            let slow = all_sector_max(&gamma);
            assert!(
                (fast - slow).abs() < 1e-9,
                "{}: {fast} vs {slow}",
                model.descriptor()
            );
            // The fully excited state always realizes rate N.
            assert!(fast >= 7.0 - 1e-9);
        }
    }

    #[test]
    fn closed_form_bounds_dominate_brute_force() {
        for n in [5usize, 7, 9] {
            let ring = LatticeSpec::ring(n).unwrap();
            for g in [0.2, 0.45, 0.7, 0.95] {
                let model = InteractionModel::Exponential { gamma: g };
                let exact =
                    brute_force_hgamma_max(&build_decoherence(&model, &ring).unwrap()).unwrap();
                let bound = exponential_1d_bound(n, g).unwrap().bound_value;
                assert!(
                    exact <= bound + 1e-9,
                    "ring {n} gamma {g}: exact {exact} > bound {bound}"
                );
            }
            let chain = LatticeSpec::chain(n).unwrap();
            for g in [0.3, 0.6, 0.9] {
                let model = InteractionModel::PowerLaw { gamma: g };
                let exact =
                    brute_force_hgamma_max(&build_decoherence(&model, &chain).unwrap()).unwrap();
                let bound = powerlaw_1d_bound(n, g).unwrap().bound_value;
                assert!(exact <= bound + 1e-9, "chain {n} gamma {g}");
            }
            for g in [0.2, 0.4, 0.9] {
                let model = InteractionModel::NearestNeighbor { gamma: g };
                let exact =
                    brute_force_hgamma_max(&build_decoherence(&model, &chain).unwrap()).unwrap();
                let bound = gershgorin_nn_bound(&model, &chain).unwrap().bound_value;
                assert!(exact <= bound + 1e-9, "chain {n} gamma {g}");
            }
        }
    }

    #[test]
    fn certification_is_sharp_for_nearest_neighbor() {
        // Exactly at gamma = 1/(2D) the operator maximum is N itself.
        let lat = LatticeSpec::chain(8).unwrap();
        let gamma =
            build_decoherence(&InteractionModel::NearestNeighbor { gamma: 0.5 }, &lat).unwrap();
        let exact = brute_force_hgamma_max(&gamma).unwrap();
        assert!(exact <= 8.0 + 1e-9, "max {exact}");
    }

    #[test]
    fn size_cap() {
        let entries = nalgebra::DMatrix::from_diagonal_element(
            16,
            16,
            Complex64::new(1.0, 0.0),
        );
        let gamma = DecoherenceMatrix::from_entries(entries, "identity".into()).unwrap();
        assert!(matches!(
            brute_force_hgamma_max(&gamma),
            Err(Error::TooLarge(_))
        ));
    }
}
