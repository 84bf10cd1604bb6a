//! Exact emission dynamics for small arrays and the analysis of the
//! resulting rate traces: burst detection, peak refinement, and the
//! collective jump channels of the decoherence matrix.

mod collective;
mod lindblad;

pub use collective::dicke_local_evolve;
pub use lindblad::{lindblad_evolve, LINDBLAD_MAX_SITES, LINDBLAD_MAX_SITES_COMPLEX};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::DecoherenceMatrix;
use crate::spectral::{eigen_decompose, PSD_RELATIVE_TOLERANCE};

/// Default relative excess over the initial rate that counts as a burst.
pub const BURST_RELATIVE_THRESHOLD: f64 = 1e-8;

/// Largest first grid interval accepted by burst detection: early-time
/// behavior is where delayed bursts hide.
pub const MAX_FIRST_INTERVAL: f64 = 1e-3;

/// State the array starts in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InitialState {
    /// Every emitter excited.
    FullyExcited,
    /// Every emitter in cos(theta/2)|g> + e^{i phi} sin(theta/2)|e>.
    Product { theta: f64, phi: f64 },
}

/// Photon emission rate sampled on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EmissionTrace {
    pub times: Vec<f64>,
    pub rates: Vec<f64>,
    pub initial_rate: f64,
}

impl EmissionTrace {
    pub fn new(times: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != rates.len() {
            return Err(Error::Incompatible(format!(
                "trace needs matching nonempty grids, got {} times and {} rates",
                times.len(),
                rates.len()
            )));
        }
        let initial_rate = rates[0];
        Ok(EmissionTrace { times, rates, initial_rate })
    }
}

/// Verdict on a rate trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BurstReport {
    /// Rate exceeded the initial rate somewhere on the grid.
    pub has_burst: bool,
    /// The rate first dips below the initial value before peaking.
    pub is_delayed: bool,
    /// Location of the (refined) maximum.
    pub peak_time: f64,
    /// Height of the (refined) maximum.
    pub peak_rate: f64,
    /// (peak - initial) / initial.
    pub fractional_increase: f64,
}

/// Scans a rate trace for a superradiant burst.
///
/// The discrete maximum is refined by the parabola through it and its two
/// neighbors (handling uneven spacing); a maximum on the grid boundary is
/// reported as-is. Grids with fewer than three points, or whose first
/// interval exceeds [`MAX_FIRST_INTERVAL`], are rejected as too coarse.
pub fn detect_burst(trace: &EmissionTrace, relative_threshold: f64) -> Result<BurstReport> {
    let n = trace.times.len();
    if n < 3 {
        return Err(Error::GridTooCoarse(format!(
            "burst detection needs at least 3 samples, got {n}"
        )));
    }
    let first_dt = trace.times[1] - trace.times[0];
    if first_dt > MAX_FIRST_INTERVAL {
        return Err(Error::GridTooCoarse(format!(
            "first interval {first_dt} exceeds {MAX_FIRST_INTERVAL}; early dynamics unresolved"
        )));
    }
    let r0 = trace.initial_rate;
    let mut imax = 0;
    for (i, &r) in trace.rates.iter().enumerate() {
        if r > trace.rates[imax] {
            imax = i;
        }
    }
    let (mut peak_time, mut peak_rate) = (trace.times[imax], trace.rates[imax]);
    if imax > 0 && imax < n - 1 {
        let (tl, tc, tr) = (trace.times[imax - 1], trace.times[imax], trace.times[imax + 1]);
        let (rl, rc, rr) = (trace.rates[imax - 1], trace.rates[imax], trace.rates[imax + 1]);
        let (dl, dr) = (tl - tc, tr - tc);
        let det = dl * dl * dr - dr * dr * dl;
        if det != 0.0 {
            let a = ((rl - rc) * dr - (rr - rc) * dl) / det;
            let b = ((rr - rc) * dl * dl - (rl - rc) * dr * dr) / det;
            if a < 0.0 {
                let shift = -b / (2.0 * a);
                if shift > dl && shift < dr {
                    peak_time = tc + shift;
                    peak_rate = rc + b * shift + a * shift * shift;
                }
            }
        }
    }
    let has_burst = peak_rate > r0 * (1.0 + relative_threshold);
    let early_slope = (trace.rates[1] - r0) / first_dt;
    Ok(BurstReport {
        has_burst,
        is_delayed: has_burst && early_slope < 0.0,
        peak_time,
        peak_rate,
        fractional_increase: (peak_rate - r0) / r0,
    })
}

/// Time grid tailored to burst hunting: t = 0, a geometric ramp through the
/// early decades (resolving delayed onsets), then uniform coverage to
/// `t_max`.
pub fn burst_time_grid(t_max: f64) -> Vec<f64> {
    assert!(t_max > 1e-4, "grid end {t_max} too small");
    let mut grid = vec![0.0];
    let geo_end = t_max.min(0.1);
    let geo_points = 30;
    let ratio = (geo_end / 1e-4).powf(1.0 / (geo_points - 1) as f64);
    let mut t = 1e-4;
    for _ in 0..geo_points {
        grid.push(t);
        t *= ratio;
    }
    let last = *grid.last().unwrap();
    if t_max > last {
        let steps = ((t_max - last) / 0.05).ceil().max(1.0) as usize;
        let dt = (t_max - last) / steps as f64;
        for i in 1..=steps {
            grid.push(last + i as f64 * dt);
        }
    }
    grid
}

/// Collective jump channels: decay rates and site-amplitude columns such
/// that the coupling matrix is sum_nu rate_nu v_nu v_nu^dagger. Rates within
/// tolerance of zero are clamped; genuinely negative ones mean the matrix is
/// not a physical dissipator.
pub fn jump_operators(gamma: &DecoherenceMatrix) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let (values, vectors) = eigen_decompose(gamma)?;
    let tol = PSD_RELATIVE_TOLERANCE * gamma.n as f64;
    let mut rates = Vec::with_capacity(values.len());
    for v in values {
        if v < -tol {
            return Err(Error::NotPhysical(format!(
                "coupling matrix has negative jump rate {v}"
            )));
        }
        rates.push(v.max(0.0));
    }
    Ok((rates, vectors))
}
