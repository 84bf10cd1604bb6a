//! Second-order cumulant dynamics on rings: population plus two-point
//! correlators per separation class, closing the hierarchy where exact
//! sector evolution is out of reach.

use serde::{Deserialize, Serialize};

use crate::dynamics::{EmissionTrace, InitialState};
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::models::InteractionModel;
use crate::ode::{integrate_observed, OdeOptions};

/// Translation-invariant cumulant state: excited population `p`, coherence
/// correlators `c` and joint-excitation correlators `z`, one entry per
/// separation class 1..=floor(n/2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantState {
    pub p: f64,
    pub c: Vec<f64>,
    pub z: Vec<f64>,
}

/// Cumulant evolution output: the rate trace plus the state at each grid
/// point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantTrajectory {
    pub trace: EmissionTrace,
    pub states: Vec<CumulantState>,
}

struct RingCumulant {
    n: usize,
    classes: usize,
    /// Coupling per class, index delta - 1.
    g: Vec<f64>,
    /// Coupling per raw separation u = 1..n-1, index u - 1.
    gu: Vec<f64>,
}

impl RingCumulant {
    fn build(model: &InteractionModel, lattice: &LatticeSpec) -> Result<Self> {
        model.validate()?;
        model.check_lattice(lattice)?;
        if !lattice.is_ring() {
            return Err(Error::Unsupported(
                "cumulant dynamics needs a translation-invariant ring".into(),
            ));
        }
        let n = lattice.n_sites();
        let classes = n / 2;
        if classes == 0 {
            return Err(Error::TooLarge(format!("ring of {n} sites has no pairs")));
        }
        let g: Vec<f64> = (1..=classes)
            .map(|d| model.radial_coupling(d as f64))
            .collect::<Result<_>>()?;
        let gu = (1..n).map(|u| g[u.min(n - u) - 1]).collect();
        Ok(RingCumulant { n, classes, g, gu })
    }

    fn class(&self, u: usize) -> usize {
        u.min(self.n - u) - 1
    }

    fn weighted_sum(&self, c: &[f64]) -> f64 {
        (1..self.n).map(|u| self.gu[u - 1] * c[self.class(u)]).sum()
    }

    /// State layout: [p, c[0..classes], z[0..classes]].
    fn rhs(&self, y: &[f64], out: &mut [f64]) {
        let m = self.classes;
        let p = y[0];
        let c = &y[1..1 + m];
        let z = &y[1 + m..1 + 2 * m];
        let s = self.weighted_sum(c);
        out[0] = -p - s;
        for delta in 1..=m {
            let mut conv = 0.0;
            for u in 1..self.n {
                if u == delta {
                    continue;
                }
                conv += self.gu[u - 1] * c[self.class((delta + self.n - u) % self.n)];
            }
            let gd = self.g[delta - 1];
            out[delta] = -c[delta - 1] + gd * (2.0 * z[delta - 1] - p) + (2.0 * p - 1.0) * conv;
            out[m + delta] =
                -2.0 * z[delta - 1] - 2.0 * p * (s - gd * c[delta - 1]);
        }
    }

    fn rate(&self, y: &[f64]) -> f64 {
        self.n as f64 * (y[0] + self.weighted_sum(&y[1..1 + self.classes]))
    }

    fn initial(&self, initial: InitialState) -> Vec<f64> {
        let (p, c, z) = match initial {
            InitialState::FullyExcited => (1.0, 0.0, 1.0),
            InitialState::Product { theta, .. } => {
                let p = (theta / 2.0).sin().powi(2);
                (p, p * (1.0 - p), p * p)
            }
        };
        let mut y = vec![c; 1 + 2 * self.classes];
        y[0] = p;
        for v in &mut y[1 + self.classes..] {
            *v = z;
        }
        y
    }

    fn unpack(&self, y: &[f64]) -> CumulantState {
        CumulantState {
            p: y[0],
            c: y[1..1 + self.classes].to_vec(),
            z: y[1 + self.classes..1 + 2 * self.classes].to_vec(),
        }
    }
}

/// Integrates the cumulant equations for a radial model on a ring, from a
/// permutation-symmetric initial state. Coherent couplings that are real
/// cancel identically at this order, so none are taken.
pub fn cumulant_evolve(
    model: &InteractionModel,
    lattice: &LatticeSpec,
    initial: InitialState,
    times: &[f64],
) -> Result<CumulantTrajectory> {
    if times.len() < 2 {
        return Err(Error::Incompatible(format!(
            "need at least 2 time points, got {}",
            times.len()
        )));
    }
    let sys = RingCumulant::build(model, lattice)?;
    let y0 = sys.initial(initial);
    let mut rates = vec![0.0; times.len()];
    let mut states = Vec::with_capacity(times.len());
    integrate_observed(
        |_t, y, out| sys.rhs(y, out),
        y0,
        times,
        &OdeOptions::default(),
        |idx, t, y| {
            let state = sys.unpack(y);
            if !state.p.is_finite() {
                return Err(Error::Integration(format!(
                    "cumulant state diverged at t={t}"
                )));
            }
            for &cv in &state.c {
                if cv > state.p + 1e-6 {
                    return Err(Error::Integration(format!(
                        "cumulant closure broke down at t={t}: correlator {cv} \
                         exceeds population {}",
                        state.p
                    )));
                }
            }
            rates[idx] = sys.rate(y);
            states.push(state);
            Ok(())
        },
    )?;
    Ok(CumulantTrajectory { trace: EmissionTrace::new(times.to_vec(), rates)?, states })
}

/// Instantaneous time derivative of the emission rate at the given cumulant
/// state.
pub fn cumulant_rate_derivative(
    model: &InteractionModel,
    lattice: &LatticeSpec,
    state: &CumulantState,
) -> Result<f64> {
    let sys = RingCumulant::build(model, lattice)?;
    if state.c.len() != sys.classes || state.z.len() != sys.classes {
        return Err(Error::Incompatible(format!(
            "state has {} classes, ring needs {}",
            state.c.len(),
            sys.classes
        )));
    }
    let mut y = vec![state.p];
    y.extend_from_slice(&state.c);
    y.extend_from_slice(&state.z);
    let mut dy = vec![0.0; y.len()];
    sys.rhs(&y, &mut dy);
    let mut rate_dot = dy[0];
    for u in 1..sys.n {
        rate_dot += sys.gu[u - 1] * dy[1 + sys.class(u)];
    }
    Ok(sys.n as f64 * rate_dot)
}

/// Upper bound on the cumulant rate derivative for nearest-neighbor coupling
/// at the physicality edge of a D-dimensional torus, valid whenever the
/// correlators are ordered 0 <= c2 <= c1 <= p <= 1. Nonpositive everywhere
/// in that region: no rate growth, hence no burst, at this order.
pub fn nn_meanfield_bound(dimension: usize, n: usize, p: f64, c1: f64, c2: f64) -> f64 {
    let d = dimension as f64;
    -(n as f64) * ((1.0 - 1.0 / (2.0 * d)) * p + c1 - (2.0 * d - 1.0) * c2 / (2.0 * d))
}
