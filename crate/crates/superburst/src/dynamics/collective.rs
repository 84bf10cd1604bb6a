//! Emission dynamics for the uniform mixture of collective and independent
//! decay. Permutation symmetry reduces the problem to classical populations
//! of the total-spin multiplets (j, m), so system sizes far beyond the
//! sector solver become cheap.

use std::collections::HashMap;

use crate::dynamics::EmissionTrace;
use crate::error::{Error, Result};
use crate::ode::{integrate_observed, OdeOptions};

/// Site cap for the multiplet solver; the state space grows as n^2/4.
pub const DICKE_LOCAL_MAX_SITES: usize = 50;

fn binom(n: i64, k: i64) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc as f64
}

/// Number of spin-j multiplets of n spin-1/2 sites (j doubled to stay
/// integral).
fn multiplicity(n: i64, j2: i64) -> f64 {
    let k = (n - j2) / 2;
    binom(n, k) - binom(n, k - 1)
}

struct Multiplets {
    /// (2j, 2m) per state.
    states: Vec<(i64, i64)>,
    /// (from, to, rate) with every transition emitting one photon.
    transitions: Vec<(usize, usize, f64)>,
    /// Total out-rate per state; doubles as the emission weight.
    emit: Vec<f64>,
}

fn build_multiplets(n: usize, gamma: f64) -> Multiplets {
    let ni = n as i64;
    let jmin = ni % 2;
    let mut states = Vec::new();
    let mut index = HashMap::new();
    for j2 in (jmin..=ni).step_by(2) {
        let mut m2 = -j2;
        while m2 <= j2 {
            index.insert((j2, m2), states.len());
            states.push((j2, m2));
            m2 += 2;
        }
    }
    let mut transitions = Vec::new();
    let mut push = |from: usize, j2: i64, m2: i64, rate: f64| {
        if rate > 0.0 {
            transitions.push((from, index[&(j2, m2)], rate));
        }
    };
    for (s, &(j2, m2)) in states.iter().enumerate() {
        let j = j2 as f64 / 2.0;
        let m = m2 as f64 / 2.0;
        push(s, j2, m2 - 2, gamma * (j + m) * (j - m + 1.0));
        if gamma >= 1.0 {
            continue;
        }
        let pre = (1.0 - gamma) * ni as f64 / multiplicity(ni, j2);
        if j2 >= 1 {
            let w = pre * multiplicity(ni - 1, j2 - 1) / (j2 as f64 * j2 as f64);
            push(s, j2, m2 - 2, w * (j + m) * (j - m + 1.0));
            push(s, j2 - 2, m2 - 2, w * (j + m) * (j + m - 1.0));
        }
        let up = multiplicity(ni - 1, j2 + 1);
        if up > 0.0 {
            let w = pre * up / ((j2 + 2) as f64 * (j2 + 2) as f64);
            push(s, j2, m2 - 2, w * (j + m) * (j - m + 1.0));
            push(s, j2 + 2, m2 - 2, w * (j - m + 1.0) * (j - m + 2.0));
        }
    }
    let mut emit = vec![0.0; states.len()];
    for &(from, _, rate) in &transitions {
        emit[from] += rate;
    }
    Multiplets { states, transitions, emit }
}

/// Emission rate of `n` fully excited emitters whose coupling matrix mixes
/// uniform all-to-all weight `gamma` with independent decay weight
/// `1 - gamma`.
pub fn dicke_local_evolve(n: usize, gamma: f64, times: &[f64]) -> Result<EmissionTrace> {
    if n == 0 || n > DICKE_LOCAL_MAX_SITES {
        return Err(Error::TooLarge(format!(
            "multiplet solver handles 1..={DICKE_LOCAL_MAX_SITES} sites, got {n}"
        )));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidModel(format!(
            "mixture weight must lie in [0, 1], got {gamma}"
        )));
    }
    if times.len() < 2 {
        return Err(Error::Incompatible(format!(
            "need at least 2 time points, got {}",
            times.len()
        )));
    }
    let sys = build_multiplets(n, gamma);
    let mut p0 = vec![0.0; sys.states.len()];
    let top = sys
        .states
        .iter()
        .position(|&(j2, m2)| j2 == n as i64 && m2 == n as i64)
        .expect("stretched state present");
    p0[top] = 1.0;
    let mut rates = vec![0.0; times.len()];
    let opts = OdeOptions { rtol: 1e-10, atol: 1e-12, initial_step: None };
    integrate_observed(
        |_t, p, out| {
            out.fill(0.0);
            for &(from, to, rate) in &sys.transitions {
                let flux = rate * p[from];
                out[from] -= flux;
                out[to] += flux;
            }
        },
        p0,
        times,
        &opts,
        |idx, t, p| {
            let total: f64 = p.iter().sum();
            if (total - 1.0).abs() > 1e-8 {
                return Err(Error::Integration(format!(
                    "population drifted to {total} at t={t}"
                )));
            }
            rates[idx] = p.iter().zip(&sys.emit).map(|(a, b)| a * b).sum();
            Ok(())
        },
    )?;
    EmissionTrace::new(times.to_vec(), rates)
}
