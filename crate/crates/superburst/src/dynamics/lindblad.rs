//! Exact open-system evolution, block-decomposed over excitation sectors.
//!
//! The master equation conserves the coherence structure between excitation
//! sectors, and the emission rate only reads the sector-diagonal blocks, so
//! the density matrix is evolved as one block per excitation number. Real
//! couplings without a Hamiltonian run on a flat real state with sparse
//! sector blocks; complex couplings or a coherent Hamiltonian fall back to
//! dense complex blocks at smaller sizes.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::{EmissionTrace, InitialState};
use crate::error::{Error, Result};
use crate::models::DecoherenceMatrix;
use crate::ode::{integrate_observed, OdeOptions};
use crate::sectors::{lift_table, sector_block_complex, sector_block_real, SectorBasis, SparseSym};
use crate::spectral::{psd_certificate, PSD_RELATIVE_TOLERANCE};

/// Site cap for real couplings (largest sector 924x924, state ~2.7M reals).
pub const LINDBLAD_MAX_SITES: usize = 12;

/// Site cap once complex couplings or a Hamiltonian force dense blocks.
pub const LINDBLAD_MAX_SITES_COMPLEX: usize = 8;

/// Total population may drift by at most this much before the run aborts.
const TRACE_TOLERANCE: f64 = 1e-8;

/// Evolves the array under the master equation with decoherence matrix
/// `gamma` and optional coherent coupling, returning the photon emission
/// rate on `times` (the state holds at `times[0]`).
///
/// The emission rate from any product initial state is independent of the
/// product phase, so `phi` never enters the numerics. Unphysical couplings
/// (negative jump rates) are rejected.
pub fn lindblad_evolve(
    gamma: &DecoherenceMatrix,
    coherent: Option<&DMatrix<Complex64>>,
    initial: InitialState,
    times: &[f64],
) -> Result<EmissionTrace> {
    let n = gamma.n;
    if times.len() < 2 {
        return Err(Error::Incompatible(format!(
            "need at least 2 time points, got {}",
            times.len()
        )));
    }
    if let InitialState::Product { theta, phi } = initial {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::Incompatible(format!(
                "product state angles must be finite, got theta={theta}, phi={phi}"
            )));
        }
    }
    if !psd_certificate(gamma, PSD_RELATIVE_TOLERANCE * n as f64) {
        return Err(Error::NotPhysical(
            "decoherence matrix has a negative jump rate; dynamics undefined".into(),
        ));
    }
    if let Some(h) = coherent {
        if h.nrows() != n || h.ncols() != n {
            return Err(Error::Incompatible(format!(
                "coherent coupling is {}x{}, expected {n}x{n}",
                h.nrows(),
                h.ncols()
            )));
        }
        for i in 0..n {
            if h[(i, i)].norm() > 1e-12 {
                return Err(Error::Incompatible(
                    "coherent coupling must have zero diagonal".into(),
                ));
            }
            for j in 0..i {
                if (h[(i, j)] - h[(j, i)].conj()).norm() > 1e-12 {
                    return Err(Error::Incompatible(
                        "coherent coupling must be Hermitian".into(),
                    ));
                }
            }
        }
    }
    if gamma.is_real && coherent.is_none() {
        if n > LINDBLAD_MAX_SITES {
            return Err(Error::TooLarge(format!(
                "{n} sites exceeds the {LINDBLAD_MAX_SITES}-site cap"
            )));
        }
        evolve_real(gamma, initial, times)
    } else {
        if n > LINDBLAD_MAX_SITES_COMPLEX {
            return Err(Error::TooLarge(format!(
                "{n} sites exceeds the {LINDBLAD_MAX_SITES_COMPLEX}-site cap for \
                 complex couplings or coherent dynamics"
            )));
        }
        evolve_complex(gamma, coherent, initial, times)
    }
}

/// Sector weight of each excitation number in the initial state: the
/// sector-m block is that weight times the all-ones matrix.
fn sector_weights(n: usize, initial: InitialState) -> Vec<f64> {
    match initial {
        InitialState::FullyExcited => {
            let mut w = vec![0.0; n + 1];
            w[n] = 1.0;
            w
        }
        InitialState::Product { theta, .. } => {
            let s2 = (theta / 2.0).sin().powi(2);
            let c2 = (theta / 2.0).cos().powi(2);
            (0..=n).map(|m| s2.powi(m as i32) * c2.powi((n - m) as i32)).collect()
        }
    }
}

/// Free-site table per sector: for each basis state, the (site, lifted rank)
/// pairs over its unexcited sites.
fn free_sites(basis: &SectorBasis, lift: &[u32]) -> Vec<(u32, u32)> {
    let n = basis.n;
    let nfree = n - basis.m;
    let mut out = Vec::with_capacity(basis.dim() * nfree);
    for a in 0..basis.dim() {
        for j in 0..n {
            let l = lift[a * n + j];
            if l != u32::MAX {
                out.push((j as u32, l));
            }
        }
    }
    out
}

struct RealTables {
    n: usize,
    dims: Vec<usize>,
    offsets: Vec<usize>,
    ks: Vec<SparseSym>,
    free: Vec<Vec<(u32, u32)>>,
    g: Vec<f64>,
}

impl RealTables {
    fn build(gamma: &DecoherenceMatrix) -> Self {
        let n = gamma.n;
        let real = gamma.real_entries().expect("real path requires real entries");
        let bases: Vec<SectorBasis> = (0..=n).map(|m| SectorBasis::new(n, m)).collect();
        let dims: Vec<usize> = bases.iter().map(|b| b.dim()).collect();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut total = 0;
        for &d in &dims {
            offsets.push(total);
            total += d * d;
        }
        let ks = bases.iter().map(|b| sector_block_real(&real, b)).collect();
        let free = (0..n)
            .map(|m| free_sites(&bases[m], &lift_table(&bases[m], &bases[m + 1])))
            .collect();
        let mut g = vec![0.0; n * n];
        for k in 0..n {
            for j in 0..n {
                g[k * n + j] = real[(j, k)];
            }
        }
        RealTables { n, dims, offsets, ks, free, g }
    }

    fn state_len(&self) -> usize {
        self.offsets[self.n] + self.dims[self.n] * self.dims[self.n]
    }

    fn initial(&self, weights: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.state_len()];
        for m in 0..=self.n {
            let d = self.dims[m];
            y[self.offsets[m]..self.offsets[m] + d * d].fill(weights[m]);
        }
        y
    }

    fn rhs(&self, y: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        let n = self.n;
        for m in 0..=n {
            let d = self.dims[m];
            let off = self.offsets[m];
            let rho = &y[off..off + d * d];
            let sc = &mut scratch[..d * d];
            sc.fill(0.0);
            self.ks[m].accumulate_mul(rho, d, sc);
            let mf = m as f64;
            for c in 0..d {
                for r in 0..d {
                    out[off + c * d + r] =
                        -mf * rho[c * d + r] - 0.5 * (sc[c * d + r] + sc[r * d + c]);
                }
            }
            if m < n {
                let dup = self.dims[m + 1];
                let up = &y[self.offsets[m + 1]..self.offsets[m + 1] + dup * dup];
                let nfree = n - m;
                let free = &self.free[m];
                for b in 0..d {
                    let fb = &free[b * nfree..(b + 1) * nfree];
                    for a in b..d {
                        let fa = &free[a * nfree..(a + 1) * nfree];
                        let mut s = 0.0;
                        for &(k_site, lb) in fb {
                            let ucol = &up[lb as usize * dup..(lb as usize + 1) * dup];
                            let gcol = &self.g[k_site as usize * n..(k_site as usize + 1) * n];
                            for &(j_site, la) in fa {
                                s += gcol[j_site as usize] * ucol[la as usize];
                            }
                        }
                        out[off + b * d + a] += s;
                        if a != b {
                            out[off + a * d + b] += s;
                        }
                    }
                }
            }
        }
    }

    /// (emission rate, population drift from 1).
    fn probe(&self, y: &[f64]) -> (f64, f64) {
        let mut rate = 0.0;
        let mut trace = 0.0;
        for m in 0..=self.n {
            let d = self.dims[m];
            let rho = &y[self.offsets[m]..self.offsets[m] + d * d];
            let mut tr = 0.0;
            for i in 0..d {
                tr += rho[i * d + i];
            }
            trace += tr;
            rate += m as f64 * tr + self.ks[m].dot_transposed(rho);
        }
        (rate, (trace - 1.0).abs())
    }
}

fn evolve_real(
    gamma: &DecoherenceMatrix,
    initial: InitialState,
    times: &[f64],
) -> Result<EmissionTrace> {
    let tables = RealTables::build(gamma);
    let y0 = tables.initial(&sector_weights(tables.n, initial));
    let maxd = *tables.dims.iter().max().unwrap();
    let mut scratch = vec![0.0; maxd * maxd];
    let mut rates = vec![0.0; times.len()];
    integrate_observed(
        |_t, y, out| tables.rhs(y, out, &mut scratch),
        y0,
        times,
        &OdeOptions::default(),
        |idx, t, y| {
            let (rate, drift) = tables.probe(y);
            if drift > TRACE_TOLERANCE {
                return Err(Error::Integration(format!(
                    "population drifted by {drift} at t={t}"
                )));
            }
            rates[idx] = rate;
            Ok(())
        },
    )?;
    EmissionTrace::new(times.to_vec(), rates)
}

struct ComplexTables {
    n: usize,
    dims: Vec<usize>,
    offsets: Vec<usize>,
    gs: Vec<DMatrix<Complex64>>,
    ghs: Vec<DMatrix<Complex64>>,
    ks: Vec<DMatrix<Complex64>>,
    free: Vec<Vec<(u32, u32)>>,
    g: Vec<Complex64>,
}

impl ComplexTables {
    fn build(gamma: &DecoherenceMatrix, coherent: Option<&DMatrix<Complex64>>) -> Self {
        let n = gamma.n;
        let bases: Vec<SectorBasis> = (0..=n).map(|m| SectorBasis::new(n, m)).collect();
        let dims: Vec<usize> = bases.iter().map(|b| b.dim()).collect();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut total = 0;
        for &d in &dims {
            offsets.push(total);
            total += d * d;
        }
        let ks: Vec<DMatrix<Complex64>> =
            bases.iter().map(|b| sector_block_complex(&gamma.entries, b)).collect();
        let hs: Option<Vec<DMatrix<Complex64>>> =
            coherent.map(|h| bases.iter().map(|b| sector_block_complex(h, b)).collect());
        let mut gs = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let d = dims[m];
            let mut gm = &ks[m] * Complex64::new(-0.5, 0.0);
            for i in 0..d {
                gm[(i, i)] += Complex64::new(-0.5 * m as f64, 0.0);
            }
            if let Some(hs) = &hs {
                gm += &hs[m] * Complex64::new(0.0, -1.0);
            }
            gs.push(gm);
        }
        let ghs = gs.iter().map(|g| g.adjoint()).collect();
        let free = (0..n)
            .map(|m| free_sites(&bases[m], &lift_table(&bases[m], &bases[m + 1])))
            .collect();
        let mut g = vec![Complex64::new(0.0, 0.0); n * n];
        for k in 0..n {
            for j in 0..n {
                g[k * n + j] = gamma.entries[(j, k)];
            }
        }
        ComplexTables { n, dims, offsets, gs, ghs, ks, free, g }
    }

    fn state_len(&self) -> usize {
        2 * (self.offsets[self.n] + self.dims[self.n] * self.dims[self.n])
    }

    fn initial(&self, weights: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.state_len()];
        for m in 0..=self.n {
            let d = self.dims[m];
            for i in 0..d * d {
                y[2 * (self.offsets[m] + i)] = weights[m];
            }
        }
        y
    }

    fn load(&self, y: &[f64], rho: &mut [DMatrix<Complex64>]) {
        for m in 0..=self.n {
            let d = self.dims[m];
            let base = 2 * self.offsets[m];
            for i in 0..d * d {
                rho[m].as_mut_slice()[i] = Complex64::new(y[base + 2 * i], y[base + 2 * i + 1]);
            }
        }
    }

    fn rhs(&self, out: &mut [f64], rho: &[DMatrix<Complex64>], acc: &mut [DMatrix<Complex64>]) {
        let n = self.n;
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        for m in 0..=n {
            let d = self.dims[m];
            acc[m].gemm(one, &self.gs[m], &rho[m], zero);
            acc[m].gemm(one, &rho[m], &self.ghs[m], one);
            if m < n {
                let up = &rho[m + 1];
                let nfree = n - m;
                let free = &self.free[m];
                for b in 0..d {
                    let fb = &free[b * nfree..(b + 1) * nfree];
                    for a in b..d {
                        let fa = &free[a * nfree..(a + 1) * nfree];
                        let mut s = zero;
                        for &(k_site, lb) in fb {
                            let gcol = &self.g[k_site as usize * n..(k_site as usize + 1) * n];
                            for &(j_site, la) in fa {
                                s += gcol[j_site as usize] * up[(la as usize, lb as usize)];
                            }
                        }
                        acc[m][(a, b)] += s;
                        if a != b {
                            acc[m][(b, a)] += s.conj();
                        }
                    }
                }
            }
            let base = 2 * self.offsets[m];
            for (i, v) in acc[m].as_slice().iter().enumerate() {
                out[base + 2 * i] = v.re;
                out[base + 2 * i + 1] = v.im;
            }
        }
    }

    fn probe(&self, rho: &[DMatrix<Complex64>]) -> (f64, f64) {
        let mut rate = 0.0;
        let mut trace = Complex64::new(0.0, 0.0);
        for m in 0..=self.n {
            let d = self.dims[m];
            let mut tr = Complex64::new(0.0, 0.0);
            for i in 0..d {
                tr += rho[m][(i, i)];
            }
            trace += tr;
            let mut cross = Complex64::new(0.0, 0.0);
            for c in 0..d {
                for r in 0..d {
                    cross += self.ks[m][(r, c)] * rho[m][(c, r)];
                }
            }
            rate += m as f64 * tr.re + cross.re;
        }
        (rate, (trace - Complex64::new(1.0, 0.0)).norm())
    }
}

fn evolve_complex(
    gamma: &DecoherenceMatrix,
    coherent: Option<&DMatrix<Complex64>>,
    initial: InitialState,
    times: &[f64],
) -> Result<EmissionTrace> {
    let tables = ComplexTables::build(gamma, coherent);
    let y0 = tables.initial(&sector_weights(tables.n, initial));
    let blank = || -> Vec<DMatrix<Complex64>> {
        tables
            .dims
            .iter()
            .map(|&d| DMatrix::from_element(d, d, Complex64::new(0.0, 0.0)))
            .collect()
    };
    let mut rho = blank();
    let mut acc = blank();
    let mut rho_probe = blank();
    let mut rates = vec![0.0; times.len()];
    integrate_observed(
        |_t, y, out| {
            tables.load(y, &mut rho);
            tables.rhs(out, &rho, &mut acc);
        },
        y0,
        times,
        &OdeOptions::default(),
        |idx, t, y| {
            tables.load(y, &mut rho_probe);
            let (rate, drift) = tables.probe(&rho_probe);
            if drift > TRACE_TOLERANCE {
                return Err(Error::Integration(format!(
                    "population drifted by {drift} at t={t}"
                )));
            }
            rates[idx] = rate;
            Ok(())
        },
    )?;
    EmissionTrace::new(times.to_vec(), rates)
}
