//! Adaptive Dormand-Prince 5(4) integrator on flat state vectors, with an
//! observer invoked exactly at the requested grid times. States are never
//! stored per grid point; the observer sees each one in place.

use crate::error::{Error, Result};

pub(crate) struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-8, atol: 1e-10, initial_step: None }
    }
}

const STAGE_TIMES: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [&[f64]; 6] = [
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    ],
    &[
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// Difference between the 5th- and 4th-order weights, applied to the seven
/// stages to estimate the local error.
const ERROR_WEIGHTS: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 20_000_000;

/// Integrates dy/dt = rhs(t, y) across `grid`, calling `observe` at every
/// grid time (including the first). The grid must be strictly increasing.
pub(crate) fn integrate_observed<F, O>(
    mut rhs: F,
    mut y: Vec<f64>,
    grid: &[f64],
    opts: &OdeOptions,
    mut observe: O,
) -> Result<()>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(usize, f64, &[f64]) -> Result<()>,
{
    if grid.len() < 2 {
        return Err(Error::Integration("time grid needs at least two points".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Integration("time grid must be strictly increasing".into()));
    }
    let dim = y.len();
    let span = grid[grid.len() - 1] - grid[0];
    let mut t = grid[0];
    observe(0, t, &y)?;

    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; dim]).collect();
    let mut y_stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    rhs(t, &y, &mut k[0]);

    let mut h = opts.initial_step.unwrap_or(span * 1e-4).min(span);
    let h_floor = span * 1e-14;
    let mut steps = 0usize;

    for (target_idx, &target) in grid.iter().enumerate().skip(1) {
        while t < target {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::Integration(format!(
                    "exceeded {MAX_STEPS} steps at t = {t}"
                )));
            }
            let clamped = h.min(target - t);
            // Stages 2..7; stage 7 is the FSAL evaluation at t + h.
            for s in 0..6 {
                for i in 0..dim {
                    let mut acc = 0.0;
                    for (j, &a) in A[s].iter().enumerate() {
                        acc += a * k[j][i];
                    }
                    y_stage[i] = y[i] + clamped * acc;
                }
                rhs(t + STAGE_TIMES[s] * clamped, &y_stage, &mut k[s + 1]);
            }
            // The 6th stage combination is already the 5th-order solution.
            y_new.copy_from_slice(&y_stage);

            let mut err_sq = 0.0;
            for i in 0..dim {
                let mut e = 0.0;
                for (j, &w) in ERROR_WEIGHTS.iter().enumerate() {
                    e += w * k[j][i];
                }
                e *= clamped;
                let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                err_sq += (e / scale) * (e / scale);
            }
            let err = (err_sq / dim as f64).sqrt();

            if err <= 1.0 {
                t += clamped;
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h = (clamped * grow).max(h_floor);
            } else {
                h = (clamped * (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)).max(h_floor);
                if h <= h_floor && clamped <= h_floor * (1.0 + 1e-12) {
                    return Err(Error::Integration(format!(
                        "step size underflow at t = {t} (error {err:.3e})"
                    )));
                }
            }
        }
        observe(target_idx, t, &y)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let grid: Vec<f64> = (0..=50).map(|i| i as f64 * 0.1).collect();
        let mut seen = 0;
        integrate_observed(
            |_t, y, dy| dy[0] = -y[0],
            vec![1.0],
            &grid,
            &OdeOptions::default(),
            |idx, t, y| {
                assert!((y[0] - (-t).exp()).abs() < 1e-8 * (-t).exp().max(1e-3));
                assert_eq!(idx, seen);
                seen += 1;
                Ok(())
            },
        )
        .unwrap();
        assert_eq!(seen, 51);
    }

    #[test]
    fn driven_quadrature() {
        let grid = [0.0, 0.7, 1.9, 3.2];
        integrate_observed(
            |t, _y, dy| dy[0] = t.cos(),
            vec![0.0],
            &grid,
            &OdeOptions::default(),
            |_idx, t, y| {
                assert!((y[0] - t.sin()).abs() < 1e-7);
                Ok(())
            },
        )
        .unwrap();
    }

    #[test]
    fn oscillator_energy() {
        let grid: Vec<f64> = (0..=20).map(|i| i as f64).collect();
        integrate_observed(
            |_t, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            vec![1.0, 0.0],
            &grid,
            &OdeOptions { rtol: 1e-10, atol: 1e-12, initial_step: None },
            |_idx, _t, y| {
                let energy = y[0] * y[0] + y[1] * y[1];
                assert!((energy - 1.0).abs() < 1e-7);
                Ok(())
            },
        )
        .unwrap();
    }

    #[test]
    fn rejects_bad_grids() {
        let rhs = |_t: f64, _y: &[f64], dy: &mut [f64]| dy[0] = 0.0;
        let obs = |_i: usize, _t: f64, _y: &[f64]| Ok(());
        assert!(integrate_observed(rhs, vec![0.0], &[0.0], &OdeOptions::default(), obs).is_err());
        let obs = |_i: usize, _t: f64, _y: &[f64]| Ok(());
        assert!(
            integrate_observed(rhs, vec![0.0], &[0.0, 1.0, 0.5], &OdeOptions::default(), obs)
                .is_err()
        );
    }

    #[test]
    fn observer_errors_propagate() {
        let out = integrate_observed(
            |_t, y, dy| dy[0] = -y[0],
            vec![1.0],
            &[0.0, 1.0, 2.0],
            &OdeOptions::default(),
            |idx, _t, _y| {
                if idx == 1 {
                    Err(Error::Integration("stop".into()))
                } else {
                    Ok(())
                }
            },
        );
        assert!(matches!(out, Err(Error::Integration(_))));
    }
}
