//! Adaptive Runge-Kutta integration (Dormand-Prince 5(4)).
//!
//! Steps are clipped to land exactly on every requested output time, so
//! trajectories can be sampled on arbitrary grids without interpolation.

use crate::problems::LorenzProblem;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 10_000_000,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `y' = rhs(t, y)` from `t0`, returning the state at each of the
/// (ascending) `eval_times`.
pub fn integrate_rk45<F>(
    rhs: F,
    t0: f64,
    y0: &[f64],
    eval_times: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let dim = y0.len();
    let mut out = Vec::with_capacity(eval_times.len());
    let mut t = t0;
    let mut y = y0.to_vec();
    let t_last = match eval_times.last() {
        Some(&t) => t,
        None => return Ok(out),
    };
    if eval_times.windows(2).any(|w| w[1] < w[0]) || eval_times[0] < t0 {
        return Err(Error::invalid("eval_times must ascend and start at or after t0"));
    }

    let mut h = ((t_last - t0) / 100.0).max(1e-12);
    let mut k = vec![vec![0.0; dim]; 7];
    let mut y_stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let mut steps = 0usize;

    for &target in eval_times {
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::Integrator(format!(
                    "step budget exhausted at t = {t}"
                )));
            }
            steps += 1;
            let h_step = h.min(target - t);
            rhs(t, &y, &mut k[0]);
            for s in 0..6 {
                for i in 0..dim {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().enumerate().take(s + 1) {
                        acc += A[s][j] * kj[i];
                    }
                    y_stage[i] = y[i] + h_step * acc;
                }
                let ts = t + C[s] * h_step;
                rhs(ts, &y_stage, &mut k[s + 1]);
            }
            let mut err_norm_sq = 0.0;
            for i in 0..dim {
                let mut acc5 = 0.0;
                let mut err = 0.0;
                for s in 0..7 {
                    acc5 += B5[s] * k[s][i];
                    err += (B5[s] - B4[s]) * k[s][i];
                }
                y_new[i] = y[i] + h_step * acc5;
                let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                let e = h_step * err / sc;
                err_norm_sq += e * e;
            }
            let err_norm = (err_norm_sq / dim as f64).sqrt();
            if !err_norm.is_finite() {
                return Err(Error::Integrator(format!("non-finite error norm at t = {t}")));
            }
            if err_norm <= 1.0 {
                t += h_step;
                y.copy_from_slice(&y_new);
                let grow = if err_norm == 0.0 {
                    5.0
                } else {
                    (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
                };
                h = (h_step * grow).max(1e-14);
            } else {
                h = (h_step * (0.9 * err_norm.powf(-0.2)).clamp(0.2, 1.0)).max(1e-14);
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// Reference Lorenz trajectory at the requested times (tight tolerances).
pub fn solve_lorenz_reference(
    problem: &LorenzProblem,
    eval_times: &[f64],
) -> Result<Vec<[f64; 3]>> {
    solve_lorenz_with_options(problem, eval_times, &OdeOptions::default())
}

pub fn solve_lorenz_with_options(
    problem: &LorenzProblem,
    eval_times: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<[f64; 3]>> {
    let p = problem.clone();
    let states = integrate_rk45(
        move |_t, y, dy| {
            let r = p.rhs([y[0], y[1], y[2]]);
            dy.copy_from_slice(&r);
        },
        0.0,
        &problem.initial_state,
        eval_times,
        opts,
    )?;
    Ok(states.into_iter().map(|s| [s[0], s[1], s[2]]).collect())
}
