//! Catalog of dissipative interaction models and construction of the
//! collective decoherence matrix they induce on a given array.
//!
//! Every model produces an N x N Hermitian matrix with unit diagonal: entry
//! (j, l) is the cross-damping rate between emitters j and l in units of the
//! single-emitter decay rate.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Boundary, LatticeSpec};

/// Dissipative coupling profile between emitters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InteractionModel {
    /// Uniform coupling `gamma` between adjacent sites only.
    NearestNeighbor { gamma: f64 },
    /// Per-bond couplings on an open chain; `gammas[i]` joins sites i, i+1.
    NearestNeighborNonuniform { gammas: Vec<f64> },
    /// Ring with distinct couplings at hop distance 1 and 2.
    NextNearestRing { gamma1: f64, gamma2: f64 },
    /// Exponential decay: coupling `gamma^(r/d)` at separation r, so the
    /// nearest-neighbor value is `gamma`.
    Exponential { gamma: f64 },
    /// Inverse-distance decay: coupling `gamma * d / r`.
    PowerLaw { gamma: f64 },
    /// Infinite-range waveguide-mediated coupling with directionality `chi`
    /// and phase `kd` per lattice constant. Complex unless `chi = 0`.
    ChiralInfiniteRange { kd: f64, chi: f64 },
    /// Distance-independent coupling `gamma` between every pair.
    AllToAll { gamma: f64 },
}

impl InteractionModel {
    /// Checks parameter ranges. Deliberately permissive about couplings that
    /// turn out unphysical: deciding physicality is the library's job, not
    /// the constructor's.
    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!(
                    "{name} must be finite and >= 0, got {v}"
                )))
            }
        };
        match self {
            Self::NearestNeighbor { gamma } => finite_nonneg("gamma", *gamma),
            Self::NearestNeighborNonuniform { gammas } => {
                if gammas.is_empty() {
                    return Err(Error::InvalidModel("gammas must be nonempty".into()));
                }
                if let Some(bad) = gammas.iter().find(|g| !g.is_finite()) {
                    return Err(Error::InvalidModel(format!("non-finite coupling {bad}")));
                }
                Ok(())
            }
            Self::NextNearestRing { gamma1, gamma2 } => {
                finite_nonneg("g1", *gamma1)?;
                finite_nonneg("g2", *gamma2)
            }
            Self::Exponential { gamma } => {
                if gamma.is_finite() && (0.0..=1.0).contains(gamma) {
                    Ok(())
                } else {
                    Err(Error::InvalidModel(format!(
                        "exponential gamma must lie in [0, 1], got {gamma}"
                    )))
                }
            }
            Self::PowerLaw { gamma } => finite_nonneg("gamma", *gamma),
            Self::ChiralInfiniteRange { kd, chi } => {
                if !kd.is_finite() {
                    return Err(Error::InvalidModel(format!("kd must be finite, got {kd}")));
                }
                if chi.is_finite() && chi.abs() <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidModel(format!(
                        "chi must lie in [-1, 1], got {chi}"
                    )))
                }
            }
            Self::AllToAll { gamma } => finite_nonneg("gamma", *gamma),
        }
    }

    /// True when the induced matrix can have an imaginary part.
    pub fn is_complex(&self) -> bool {
        matches!(self, Self::ChiralInfiniteRange { chi, .. } if *chi != 0.0)
    }

    /// Coupling as a function of separation alone (in units of the lattice
    /// constant), for models where that is well defined. Enables O(N) pair
    /// sums through `LatticeSpec::separation_histogram`.
    pub fn radial_coupling(&self, r: f64) -> Result<f64> {
        debug_assert!(r > 0.0);
        match self {
            Self::NearestNeighbor { gamma } => Ok(if r == 1.0 { *gamma } else { 0.0 }),
            Self::NextNearestRing { gamma1, gamma2 } => Ok(if r == 1.0 {
                *gamma1
            } else if r == 2.0 {
                *gamma2
            } else {
                0.0
            }),
            Self::Exponential { gamma } => Ok(gamma.powf(r)),
            Self::PowerLaw { gamma } => Ok(gamma / r),
            Self::AllToAll { gamma } => Ok(*gamma),
            Self::NearestNeighborNonuniform { .. } | Self::ChiralInfiniteRange { .. } => {
                Err(Error::Unsupported(format!(
                    "{} has no distance-only coupling profile",
                    self.descriptor()
                )))
            }
        }
    }

    /// Rejects model/lattice combinations the model is not defined on.
    pub fn check_lattice(&self, lattice: &LatticeSpec) -> Result<()> {
        match self {
            Self::NearestNeighborNonuniform { gammas } => {
                let n = lattice.n_sites();
                if lattice.dimension != 1 || lattice.boundary != Boundary::Open {
                    return Err(Error::Incompatible(
                        "per-bond couplings require an open chain".into(),
                    ));
                }
                if gammas.len() + 1 != n {
                    return Err(Error::Incompatible(format!(
                        "{} bond couplings cannot fit a chain of {n} sites (need {})",
                        gammas.len(),
                        n - 1
                    )));
                }
                Ok(())
            }
            Self::NextNearestRing { .. } => {
                let n = lattice.n_sites();
                if !lattice.is_ring() || n < 5 || n % 2 == 0 {
                    return Err(Error::Incompatible(
                        "next-nearest-neighbor model requires an odd ring of at least 5 sites"
                            .into(),
                    ));
                }
                Ok(())
            }
            Self::ChiralInfiniteRange { .. } => {
                if lattice.dimension != 1 || lattice.is_ring() {
                    return Err(Error::Incompatible(
                        "chiral waveguide coupling requires an open chain".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Canonical parseable descriptor, e.g. `nn:gamma=0.4`.
    pub fn descriptor(&self) -> String {
        match self {
            Self::NearestNeighbor { gamma } => format!("nn:gamma={gamma}"),
            Self::NearestNeighborNonuniform { gammas } => {
                let joined: Vec<String> = gammas.iter().map(f64::to_string).collect();
                format!("nn-nonuniform:gammas={}", joined.join(";"))
            }
            Self::NextNearestRing { gamma1, gamma2 } => format!("nnn:g1={gamma1},g2={gamma2}"),
            Self::Exponential { gamma } => format!("exp:gamma={gamma}"),
            Self::PowerLaw { gamma } => format!("power:gamma={gamma}"),
            Self::ChiralInfiniteRange { kd, chi } => format!("chiral:kd={kd},chi={chi}"),
            Self::AllToAll { gamma } => format!("dicke:gamma={gamma}"),
        }
    }
}

impl fmt::Display for InteractionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

fn parse_kv<'a>(s: &str, args: &'a str, keys: &[&str]) -> Result<Vec<&'a str>> {
    let mut values = vec![None; keys.len()];
    for tok in args.split(',') {
        let (key, value) = tok.split_once('=').ok_or_else(|| {
            Error::Parse(format!("model descriptor '{s}': expected key=value, got '{tok}'"))
        })?;
        let slot = keys.iter().position(|&k| k == key).ok_or_else(|| {
            Error::Parse(format!("model descriptor '{s}': unknown parameter '{key}'"))
        })?;
        if values[slot].replace(value).is_some() {
            return Err(Error::Parse(format!(
                "model descriptor '{s}': duplicate parameter '{key}'"
            )));
        }
    }
    keys.iter()
        .zip(values)
        .map(|(key, v)| {
            v.ok_or_else(|| Error::Parse(format!("model descriptor '{s}': missing '{key}='")))
        })
        .collect()
}

fn parse_f64(s: &str, tok: &str) -> Result<f64> {
    tok.parse()
        .map_err(|_| Error::Parse(format!("model descriptor '{s}': bad number '{tok}'")))
}

impl FromStr for InteractionModel {
    type Err = Error;

    /// Parses the descriptors produced by [`InteractionModel::descriptor`]:
    /// `nn:gamma=G`, `nn-nonuniform:gammas=G1;G2;...`, `nnn:g1=A,g2=B`,
    /// `exp:gamma=G`, `power:gamma=G`, `chiral:kd=K,chi=X`, `dicke:gamma=G`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("model descriptor '{s}': missing ':'")))?;
        let model = match kind {
            "nn" => {
                let v = parse_kv(s, args, &["gamma"])?;
                Self::NearestNeighbor { gamma: parse_f64(s, v[0])? }
            }
            "nn-nonuniform" => {
                let v = parse_kv(s, args, &["gammas"])?;
                let gammas = v[0].split(';').map(|t| parse_f64(s, t)).collect::<Result<_>>()?;
                Self::NearestNeighborNonuniform { gammas }
            }
            "nnn" => {
                let v = parse_kv(s, args, &["g1", "g2"])?;
                Self::NextNearestRing {
                    gamma1: parse_f64(s, v[0])?,
                    gamma2: parse_f64(s, v[1])?,
                }
            }
            "exp" => {
                let v = parse_kv(s, args, &["gamma"])?;
                Self::Exponential { gamma: parse_f64(s, v[0])? }
            }
            "power" => {
                let v = parse_kv(s, args, &["gamma"])?;
                Self::PowerLaw { gamma: parse_f64(s, v[0])? }
            }
            "chiral" => {
                let v = parse_kv(s, args, &["kd", "chi"])?;
                Self::ChiralInfiniteRange {
                    kd: parse_f64(s, v[0])?,
                    chi: parse_f64(s, v[1])?,
                }
            }
            "dicke" => {
                let v = parse_kv(s, args, &["gamma"])?;
                Self::AllToAll { gamma: parse_f64(s, v[0])? }
            }
            other => {
                return Err(Error::Parse(format!(
                    "model descriptor '{s}': unknown model '{other}'"
                )))
            }
        };
        model.validate()?;
        Ok(model)
    }
}

/// Collective decoherence matrix of an emitter array: Hermitian, unit
/// diagonal, trace N. Positive semidefiniteness is what decides whether the
/// model is physically realizable.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceMatrix {
    pub n: usize,
    pub entries: DMatrix<Complex64>,
    /// Descriptor of the model that produced this matrix.
    pub model_tag: String,
    /// True when every entry is real (all models except chiral with chi != 0).
    pub is_real: bool,
}

impl DecoherenceMatrix {
    /// Wraps an externally built matrix, enforcing hermiticity and unit
    /// diagonal exactly.
    pub fn from_entries(entries: DMatrix<Complex64>, model_tag: String) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n || n == 0 {
            return Err(Error::Incompatible(format!(
                "decoherence matrix must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        for i in 0..n {
            if (entries[(i, i)] - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
                return Err(Error::Incompatible(format!(
                    "diagonal entry ({i}, {i}) = {} is not 1",
                    entries[(i, i)]
                )));
            }
            for j in (i + 1)..n {
                if (entries[(i, j)] - entries[(j, i)].conj()).norm() > 1e-12 {
                    return Err(Error::Incompatible(format!(
                        "entries ({i}, {j}) and ({j}, {i}) are not conjugate"
                    )));
                }
            }
        }
        let is_real = entries.iter().all(|z| z.im == 0.0);
        Ok(DecoherenceMatrix { n, entries, model_tag, is_real })
    }

    /// Real part view as an owned matrix; `None` if any entry is complex.
    pub fn real_entries(&self) -> Option<DMatrix<f64>> {
        if self.is_real {
            Some(self.entries.map(|z| z.re))
        } else {
            None
        }
    }
}

/// Builds the decoherence matrix of `model` on `lattice`.
pub fn build_decoherence(
    model: &InteractionModel,
    lattice: &LatticeSpec,
) -> Result<DecoherenceMatrix> {
    model.validate()?;
    model.check_lattice(lattice)?;
    let n = lattice.n_sites();
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));

    match model {
        InteractionModel::NearestNeighborNonuniform { gammas } => {
            for (i, &g) in gammas.iter().enumerate() {
                m[(i, i + 1)] = Complex64::new(g, 0.0);
                m[(i + 1, i)] = Complex64::new(g, 0.0);
            }
        }
        InteractionModel::ChiralInfiniteRange { kd, chi } => {
            for j in 0..n {
                for l in 0..n {
                    if j == l {
                        continue;
                    }
                    let phase = kd * (j as f64 - l as f64);
                    m[(j, l)] = Complex64::new(phase.cos(), -chi * phase.sin());
                }
            }
        }
        _ => {
            for i in 0..n {
                for j in (i + 1)..n {
                    let r = lattice.pair_separation(i, j)? / lattice.spacing;
                    let g = model.radial_coupling(r)?;
                    m[(i, j)] = Complex64::new(g, 0.0);
                    m[(j, i)] = Complex64::new(g, 0.0);
                }
            }
        }
    }
    for i in 0..n {
        m[(i, i)] = Complex64::new(1.0, 0.0);
    }
    let is_real = !model.is_complex();
    Ok(DecoherenceMatrix {
        n,
        entries: m,
        model_tag: model.descriptor(),
        is_real,
    })
}

/// Coherent (Hamiltonian) exchange couplings accompanying the dissipative
/// ones. Off by default: photon statistics at the fully excited state do not
/// depend on them, but time evolution does.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum CoherentCoupling {
    #[default]
    None,
    /// Uniform exchange amplitude `j` between every pair.
    AllToAll { j: f64 },
    /// Explicit Hermitian matrix with zero diagonal.
    Custom(DMatrix<Complex64>),
}

/// Materializes the coherent coupling matrix for an N-site array, verifying
/// shape and hermiticity. `None` means no Hamiltonian part.
pub fn build_coherent_coupling(
    coupling: &CoherentCoupling,
    n: usize,
) -> Result<Option<DMatrix<Complex64>>> {
    match coupling {
        CoherentCoupling::None => Ok(None),
        CoherentCoupling::AllToAll { j } => {
            if !j.is_finite() {
                return Err(Error::InvalidModel(format!("exchange amplitude {j}")));
            }
            let mut m = DMatrix::from_element(n, n, Complex64::new(*j, 0.0));
            for i in 0..n {
                m[(i, i)] = Complex64::new(0.0, 0.0);
            }
            Ok(Some(m))
        }
        CoherentCoupling::Custom(m) => {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Incompatible(format!(
                    "coherent coupling is {}x{}, array has {n} sites",
                    m.nrows(),
                    m.ncols()
                )));
            }
            for i in 0..n {
                if m[(i, i)] != Complex64::new(0.0, 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "coherent coupling has nonzero diagonal at ({i}, {i})"
                    )));
                }
                for j in (i + 1)..n {
                    if m[(i, j)] != m[(j, i)].conj() {
                        return Err(Error::InvalidModel(format!(
                            "coherent coupling not Hermitian at ({i}, {j})"
                        )));
                    }
                }
            }
            Ok(Some(m.clone()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn re(m: &DecoherenceMatrix, i: usize, j: usize) -> f64 {
        assert_eq!(m.entries[(i, j)].im, 0.0);
        m.entries[(i, j)].re
    }

    #[test]
    fn nearest_neighbor_chain_is_tridiagonal() {
        let lat = LatticeSpec::chain(4).unwrap();
        let model = InteractionModel::NearestNeighbor { gamma: 0.4 };
        let m = build_decoherence(&model, &lat).unwrap();
        assert!(m.is_real);
        for i in 0usize..4 {
            for j in 0usize..4 {
                let want = match i.abs_diff(j) {
                    0 => 1.0,
                    1 => 0.4,
                    _ => 0.0,
                };
                assert_eq!(re(&m, i, j), want, "entry ({i}, {j})");
            }
        }
    }

    #[test]
    fn ring_models_are_circulant() {
        let lat = LatticeSpec::ring(5).unwrap();
        let model = InteractionModel::NextNearestRing { gamma1: 0.3, gamma2: 0.2 };
        let m = build_decoherence(&model, &lat).unwrap();
        let first: Vec<f64> = (0..5).map(|j| re(&m, 0, j)).collect();
        assert_eq!(first, vec![1.0, 0.3, 0.2, 0.2, 0.3]);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(re(&m, i, j), first[(5 + j - i) % 5], "circulant ({i}, {j})");
            }
        }
    }

    #[test]
    fn distance_kernels() {
        let lat = LatticeSpec::chain(3).unwrap();
        let m = build_decoherence(&InteractionModel::Exponential { gamma: 0.5 }, &lat).unwrap();
        assert_relative_eq!(re(&m, 0, 1), 0.5);
        assert_relative_eq!(re(&m, 0, 2), 0.25);

        let m = build_decoherence(&InteractionModel::PowerLaw { gamma: 0.4 }, &lat).unwrap();
        assert_relative_eq!(re(&m, 0, 1), 0.4);
        assert_relative_eq!(re(&m, 0, 2), 0.2);

        let m = build_decoherence(&InteractionModel::AllToAll { gamma: 0.9 }, &lat).unwrap();
        assert_relative_eq!(re(&m, 0, 2), 0.9);

        // Spacing rescales separations but not couplings at matching hops.
        let wide = LatticeSpec::new(vec![3], Boundary::Open, 2.5).unwrap();
        let m = build_decoherence(&InteractionModel::Exponential { gamma: 0.5 }, &wide).unwrap();
        assert_relative_eq!(re(&m, 0, 1), 0.5);
    }

    #[test]
    fn chiral_entries_and_hermiticity() {
        let lat = LatticeSpec::chain(3).unwrap();
        let kd = std::f64::consts::FRAC_PI_3;
        let model = InteractionModel::ChiralInfiniteRange { kd, chi: 0.5 };
        let m = build_decoherence(&model, &lat).unwrap();
        assert!(!m.is_real);
        let z = m.entries[(1, 0)];
        assert_relative_eq!(z.re, kd.cos(), epsilon = 1e-15);
        assert_relative_eq!(z.im, -0.5 * kd.sin(), epsilon = 1e-15);
        assert_relative_eq!((m.entries.adjoint() - &m.entries).norm(), 0.0);

        let sym = InteractionModel::ChiralInfiniteRange { kd, chi: 0.0 };
        assert!(build_decoherence(&sym, &lat).unwrap().is_real);
    }

    #[test]
    fn nonuniform_bonds() {
        let lat = LatticeSpec::chain(3).unwrap();
        let model = InteractionModel::NearestNeighborNonuniform { gammas: vec![0.1, 0.7] };
        let m = build_decoherence(&model, &lat).unwrap();
        assert_eq!(re(&m, 0, 1), 0.1);
        assert_eq!(re(&m, 1, 2), 0.7);
        assert_eq!(re(&m, 0, 2), 0.0);

        let wrong = InteractionModel::NearestNeighborNonuniform { gammas: vec![0.1] };
        assert!(build_decoherence(&wrong, &lat).is_err());
    }

    #[test]
    fn lattice_compatibility() {
        let ring = LatticeSpec::ring(6).unwrap();
        let chain = LatticeSpec::chain(6).unwrap();
        let nnn = InteractionModel::NextNearestRing { gamma1: 0.2, gamma2: 0.1 };
        assert!(build_decoherence(&nnn, &ring).is_err()); // even ring
        assert!(build_decoherence(&nnn, &chain).is_err());
        assert!(build_decoherence(&nnn, &LatticeSpec::ring(5).unwrap()).is_ok());

        let chiral = InteractionModel::ChiralInfiniteRange { kd: 1.0, chi: 0.3 };
        assert!(build_decoherence(&chiral, &ring).is_err());
        assert!(build_decoherence(&chiral, &chain).is_ok());
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(InteractionModel::NearestNeighbor { gamma: -0.1 }.validate().is_err());
        assert!(InteractionModel::Exponential { gamma: 1.5 }.validate().is_err());
        assert!(InteractionModel::ChiralInfiniteRange { kd: 1.0, chi: 1.2 }
            .validate()
            .is_err());
        assert!(InteractionModel::AllToAll { gamma: f64::NAN }.validate().is_err());
    }

    #[test]
    fn descriptor_parse_examples() {
        let m: InteractionModel = "nnn:g1=0.3,g2=0.2".parse().unwrap();
        assert_eq!(m, InteractionModel::NextNearestRing { gamma1: 0.3, gamma2: 0.2 });
        let m: InteractionModel = "chiral:kd=1.5,chi=-0.5".parse().unwrap();
        assert_eq!(m, InteractionModel::ChiralInfiniteRange { kd: 1.5, chi: -0.5 });
        assert!("nn:0.3".parse::<InteractionModel>().is_err());
        assert!("nn:gamma=0.3,gamma=0.4".parse::<InteractionModel>().is_err());
        assert!("foo:gamma=0.3".parse::<InteractionModel>().is_err());
        assert!("nnn:g1=0.3".parse::<InteractionModel>().is_err());
        assert!("exp:gamma=2.0".parse::<InteractionModel>().is_err());
    }

    #[test]
    fn radial_coupling_matches_built_entries() {
        let lat = LatticeSpec::hyperrectangle(vec![3, 3]).unwrap();
        for model in [
            InteractionModel::NearestNeighbor { gamma: 0.35 },
            InteractionModel::Exponential { gamma: 0.6 },
            InteractionModel::PowerLaw { gamma: 0.45 },
            InteractionModel::AllToAll { gamma: 0.2 },
        ] {
            let m = build_decoherence(&model, &lat).unwrap();
            for i in 0..9 {
                for j in 0..9 {
                    if i == j {
                        continue;
                    }
                    let r = lat.pair_separation(i, j).unwrap();
                    assert_eq!(re(&m, i, j), model.radial_coupling(r).unwrap());
                }
            }
        }
    }

    proptest! {
        #[test]
        fn descriptor_roundtrip(
            kind in 0usize..7,
            a in 0.0f64..1.0,
            b in 0.0f64..1.0,
        ) {
            let model = match kind {
                0 => InteractionModel::NearestNeighbor { gamma: a },
                1 => InteractionModel::NextNearestRing { gamma1: a, gamma2: b },
                2 => InteractionModel::Exponential { gamma: a },
                3 => InteractionModel::PowerLaw { gamma: a },
                4 => InteractionModel::ChiralInfiniteRange { kd: 3.0 * a, chi: 2.0 * b - 1.0 },
                5 => InteractionModel::NearestNeighborNonuniform { gammas: vec![a, b] },
                _ => InteractionModel::AllToAll { gamma: a },
            };
            let parsed: InteractionModel = model.descriptor().parse().unwrap();
            prop_assert_eq!(parsed, model);
        }

        #[test]
        fn built_matrices_are_hermitian_unit_diagonal(
            g in 0.0f64..1.0,
            n in 2usize..8,
        ) {
            let lat = LatticeSpec::chain(n).unwrap();
            for model in [
                InteractionModel::NearestNeighbor { gamma: g },
                InteractionModel::Exponential { gamma: g },
                InteractionModel::PowerLaw { gamma: g },
                InteractionModel::ChiralInfiniteRange { kd: 2.0, chi: g },
                InteractionModel::AllToAll { gamma: g },
            ] {
                let m = build_decoherence(&model, &lat).unwrap();
                prop_assert!((m.entries.adjoint() - &m.entries).norm() == 0.0);
                let trace: Complex64 = (0..n).map(|i| m.entries[(i, i)]).sum();
                prop_assert_eq!(trace, Complex64::new(n as f64, 0.0));
            }
        }
    }
}
