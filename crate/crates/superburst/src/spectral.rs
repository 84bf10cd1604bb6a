//! Spectral analysis of decoherence matrices: eigenvalues, trace powers, and
//! the positive-semidefiniteness test that decides whether a model is
//! physically realizable.
//!
//! Analytic spectra are provided for the model/lattice combinations that
//! admit them and are cross-checked against dense solves in the tests.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{Boundary, LatticeSpec};
use crate::models::{build_decoherence, DecoherenceMatrix, InteractionModel};

/// A matrix counts as positive semidefinite when its lowest eigenvalue is
/// above `-PSD_RELATIVE_TOLERANCE * N`.
pub const PSD_RELATIVE_TOLERANCE: f64 = 1e-10;

/// Minimum modulus for the entry used to fix an eigenvector's global phase.
const PHASE_PIVOT_THRESHOLD: f64 = 1e-8;

/// Eigenvalues and trace powers of a decoherence matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectralSummary {
    pub n: usize,
    /// Eigenvalues sorted in descending order.
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    /// Trace (equals N for a unit-diagonal matrix).
    pub trace_gamma: f64,
    /// Trace of the square: the squared Frobenius norm.
    pub trace_gamma2: f64,
    /// Trace of the cube.
    pub trace_gamma3: f64,
    /// Whether the matrix is positive semidefinite within `tolerance`.
    pub is_physical: bool,
    /// Absolute eigenvalue tolerance used for the test.
    pub tolerance: f64,
}

fn eigenvalues_desc(gamma: &DecoherenceMatrix) -> Vec<f64> {
    let vals: DVector<f64> = match gamma.real_entries() {
        Some(re) => re.symmetric_eigenvalues(),
        None => gamma.entries.clone().symmetric_eigenvalues(),
    };
    let mut v: Vec<f64> = vals.iter().copied().collect();
    v.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    v
}

/// Full spectral summary via a dense Hermitian eigensolve.
///
/// The cube trace is computed twice — from matrix entries and from the
/// eigenvalues — and the two must agree to a relative 1e-6 or the
/// decomposition is reported as inconsistent.
pub fn analyze(gamma: &DecoherenceMatrix) -> Result<SpectralSummary> {
    let n = gamma.n;
    let eigenvalues = eigenvalues_desc(gamma);
    let min_eigenvalue = *eigenvalues.last().expect("nonempty spectrum");
    let tolerance = PSD_RELATIVE_TOLERANCE * n as f64;

    let trace_gamma: f64 = gamma.entries.diagonal().iter().map(|z| z.re).sum();
    let trace_gamma2: f64 = gamma.entries.iter().map(|z| z.norm_sqr()).sum();
    let squared = &gamma.entries * &gamma.entries;
    let trace_gamma3: f64 = (0..n)
        .map(|i| (0..n).map(|j| (squared[(i, j)] * gamma.entries[(j, i)]).re).sum::<f64>())
        .sum();

    let eig_cube: f64 = eigenvalues.iter().map(|l| l * l * l).sum();
    let scale = trace_gamma3.abs().max(eig_cube.abs()).max(n as f64);
    if (trace_gamma3 - eig_cube).abs() > 1e-6 * scale {
        return Err(Error::Inconsistency(format!(
            "cube trace from entries ({trace_gamma3}) and from eigenvalues ({eig_cube}) disagree"
        )));
    }

    Ok(SpectralSummary {
        n,
        eigenvalues,
        min_eigenvalue,
        trace_gamma,
        trace_gamma2,
        trace_gamma3,
        is_physical: min_eigenvalue >= -tolerance,
        tolerance,
    })
}

/// Hermitian eigendecomposition with eigenvalues in descending order and a
/// fixed phase convention: in each eigenvector, the first component of
/// modulus above 1e-8 is made real and positive.
pub fn eigen_decompose(gamma: &DecoherenceMatrix) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let n = gamma.n;
    let eig = gamma.entries.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalues")
    });
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (col, &k) in order.iter().enumerate() {
        let source = eig.eigenvectors.column(k);
        let pivot = source
            .iter()
            .find(|z| z.norm() > PHASE_PIVOT_THRESHOLD)
            .copied()
            .unwrap_or(Complex64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        for row in 0..n {
            vectors[(row, col)] = source[row] * phase;
        }
    }
    Ok((values, vectors))
}

/// Positive-semidefiniteness certificate: attempts a Cholesky factorization
/// of `gamma + shift * I` and reports whether it exists. Cheaper than an
/// eigensolve and numerically strict.
pub fn psd_certificate(gamma: &DecoherenceMatrix, shift: f64) -> bool {
    if let Some(mut re) = gamma.real_entries() {
        for i in 0..gamma.n {
            re[(i, i)] += shift;
        }
        return Cholesky::new(re).is_some();
    }
    let mut m = gamma.entries.clone();
    for i in 0..gamma.n {
        m[(i, i)] += Complex64::new(shift, 0.0);
    }
    Cholesky::new(m).is_some()
}

/// Analytic eigenvalues (descending) for model/lattice combinations that
/// admit them; `Ok(None)` when no closed form is available.
pub fn closed_form_spectrum(
    model: &InteractionModel,
    lattice: &LatticeSpec,
) -> Result<Option<Vec<f64>>> {
    model.validate()?;
    model.check_lattice(lattice)?;
    let n = lattice.n_sites();
    let nf = n as f64;

    let mut eigs: Vec<f64> = match model {
        InteractionModel::NearestNeighbor { gamma } => match lattice.boundary {
            Boundary::Periodic => (0..n)
                .map(|nu| 1.0 + 2.0 * gamma * (2.0 * PI * nu as f64 / nf).cos())
                .collect(),
            Boundary::Open => open_standing_wave_spectrum(&lattice.extents, *gamma),
        },
        InteractionModel::NextNearestRing { gamma1, gamma2 } => (0..n)
            .map(|nu| {
                let theta = 2.0 * PI * nu as f64 / nf;
                1.0 + 2.0 * gamma1 * theta.cos() + 2.0 * gamma2 * (2.0 * theta).cos()
            })
            .collect(),
        InteractionModel::Exponential { gamma } => {
            if !lattice.is_ring() || n % 2 == 0 {
                return Ok(None);
            }
            if *gamma == 1.0 {
                let mut v = vec![0.0; n];
                v[0] = nf;
                v
            } else {
                // Closed-form circulant eigenvalues of the odd ring with
                // couplings gamma^min(k, N-k); the alternating cosine factor
                // carries the wrap-around truncation of the geometric tail.
                let half_pow = gamma.powi(((n + 1) / 2) as i32);
                (0..n)
                    .map(|j| {
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        let num = (1.0 - gamma)
                            * (1.0 + gamma
                                - 2.0 * half_pow * sign * (j as f64 * PI / nf).cos());
                        let den = 1.0 + gamma * gamma
                            - 2.0 * gamma * (2.0 * PI * j as f64 / nf).cos();
                        num / den
                    })
                    .collect()
            }
        }
        InteractionModel::AllToAll { gamma } => {
            let mut v = vec![1.0 - gamma; n];
            v[0] = 1.0 + gamma * (nf - 1.0);
            v
        }
        InteractionModel::ChiralInfiniteRange { kd, chi } => {
            let s2 = if kd.sin().abs() < 1e-12 {
                nf * nf
            } else {
                let s = (nf * kd).sin() / kd.sin();
                s * s
            };
            let disc = (nf * nf * chi * chi + (1.0 - chi * chi) * s2).sqrt();
            let mut v = vec![0.0; n];
            v[0] = 0.5 * (nf + disc);
            v[1] = 0.5 * (nf - disc);
            v
        }
        InteractionModel::PowerLaw { .. } | InteractionModel::NearestNeighborNonuniform { .. } => {
            return Ok(None)
        }
    };
    eigs.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    Ok(Some(eigs))
}

fn open_standing_wave_spectrum(extents: &[usize], gamma: f64) -> Vec<f64> {
    let n: usize = extents.iter().product();
    let mut eigs = Vec::with_capacity(n);
    let mut j = vec![1usize; extents.len()];
    loop {
        let sum: f64 = j
            .iter()
            .zip(extents)
            .map(|(&jj, &ext)| (jj as f64 * PI / (ext as f64 + 1.0)).cos())
            .sum();
        eigs.push(1.0 + 2.0 * gamma * sum);
        let mut axis = extents.len();
        loop {
            if axis == 0 {
                return eigs;
            }
            axis -= 1;
            j[axis] += 1;
            if j[axis] <= extents[axis] {
                break;
            }
            j[axis] = 1;
        }
    }
}

/// Largest coupling strength at which the model family stays positive
/// semidefinite on the given lattice, capped at 1.
///
/// The coupling value stored in `model` is ignored: the boundary is a
/// property of the model shape. Closed forms are used where available;
/// otherwise the boundary is bisected to 60 iterations, exploiting that all
/// single-parameter families here are affine in the coupling.
pub fn gamma_p(model: &InteractionModel, lattice: &LatticeSpec) -> Result<f64> {
    model.check_lattice(lattice)?;
    let n = lattice.n_sites();
    match model {
        InteractionModel::NearestNeighbor { .. } => Ok(match lattice.boundary {
            Boundary::Periodic => {
                if n % 2 == 0 {
                    0.5
                } else {
                    0.5 / (PI / n as f64).cos()
                }
            }
            Boundary::Open => {
                let sum: f64 = lattice
                    .extents
                    .iter()
                    .map(|&ext| (PI / (ext as f64 + 1.0)).cos())
                    .sum();
                (0.5 / sum).min(1.0)
            }
        }),
        InteractionModel::Exponential { .. } | InteractionModel::AllToAll { .. } => Ok(1.0),
        InteractionModel::PowerLaw { .. } => Ok(bisect_affine_boundary(
            unit_coupling_min_eigenvalue(model, lattice)?,
            n,
        )),
        InteractionModel::NextNearestRing { .. }
        | InteractionModel::ChiralInfiniteRange { .. }
        | InteractionModel::NearestNeighborNonuniform { .. } => Err(Error::Unsupported(format!(
            "{} has no single coupling-strength physicality boundary",
            model.descriptor()
        ))),
    }
}

/// Lowest eigenvalue of the coupling pattern at unit strength (the matrix
/// minus the identity), via circulant momenta on rings and a dense solve on
/// open lattices.
fn unit_coupling_min_eigenvalue(
    model: &InteractionModel,
    lattice: &LatticeSpec,
) -> Result<f64> {
    let n = lattice.n_sites();
    let unit = match model {
        InteractionModel::PowerLaw { .. } => InteractionModel::PowerLaw { gamma: 1.0 },
        InteractionModel::NearestNeighbor { .. } => InteractionModel::NearestNeighbor { gamma: 1.0 },
        InteractionModel::AllToAll { .. } => InteractionModel::AllToAll { gamma: 1.0 },
        _ => {
            return Err(Error::Unsupported(format!(
                "{} is not an affine single-coupling family",
                model.descriptor()
            )))
        }
    };
    if lattice.is_ring() {
        let couplings: Vec<f64> = (1..=n / 2)
            .map(|k| unit.radial_coupling(k as f64))
            .collect::<Result<_>>()?;
        let min = (0..n)
            .map(|nu| {
                let theta = 2.0 * PI * nu as f64 / n as f64;
                couplings
                    .iter()
                    .enumerate()
                    .map(|(idx, &c)| {
                        let k = idx + 1;
                        let weight = if 2 * k == n { 1.0 } else { 2.0 };
                        weight * c * (theta * k as f64).cos()
                    })
                    .sum()
            })
            .fold(f64::INFINITY, f64::min);
        return Ok(min);
    }
    let built = build_decoherence(&unit, lattice)?;
    let summary_min = *eigenvalues_desc(&built).last().expect("nonempty spectrum");
    Ok(summary_min - 1.0)
}

/// Bisects the boundary of `1 + g * min_eig >= -tol` over g in [0, 1].
fn bisect_affine_boundary(unit_min_eigenvalue: f64, n: usize) -> f64 {
    let tol = PSD_RELATIVE_TOLERANCE * n as f64;
    let physical = |g: f64| 1.0 + g * unit_min_eigenvalue >= -tol;
    if physical(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if physical(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Infinite-lattice limit of the physicality boundary, from the momentum-
/// space minimum of the coupling profile.
pub fn gamma_p_thermodynamic(model: &InteractionModel, dimension: usize) -> Result<f64> {
    if dimension == 0 {
        return Err(Error::InvalidLattice("dimension must be >= 1".into()));
    }
    match model {
        InteractionModel::NearestNeighbor { .. } => Ok(0.5 / dimension as f64),
        InteractionModel::Exponential { .. } | InteractionModel::AllToAll { .. } => Ok(1.0),
        // Alternating harmonic sum: the band edge sits at 1 - 2 g ln 2.
        InteractionModel::PowerLaw { .. } if dimension == 1 => Ok(0.5 / 2f64.ln()),
        _ => Err(Error::Unsupported(format!(
            "no thermodynamic boundary implemented for {} in {dimension}D",
            model.descriptor()
        ))),
    }
}
