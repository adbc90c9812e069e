//! Closed-form Burgers solution as a ratio of Gaussian-weighted integrals.
//!
//! For u0(x) = -sin(pi x) the Cole-Hopf transform gives
//!   u(t,x) = ∫ u0(x-η) ζ(x-η) e^{-η²/(4νt)} dη
//!          / ∫ ζ(x-η) e^{-η²/(4νt)} dη,
//! with ζ(y) = e^{-cos(pi y)/(2 pi ν)}. After the change of variables
//! η = η'·sqrt(4νt) both integrals are Gauss-Hermite quadratures. The
//! ζ exponent spans e^{±1/(2πν)}, so the maximum log term is factored out
//! of numerator and denominator before exponentiation.

use super::gauss_hermite::QuadratureRule;
use crate::network::InitialCondition;
use crate::problems::BurgersProblem;
use crate::{Error, Result};

use std::f64::consts::PI;

/// Threshold below which the first-order Taylor expansion in t is used.
const TAYLOR_T: f64 = 1e-10;

/// Analytic Burgers solution at one point.
pub fn burgers_analytic(
    problem: &BurgersProblem,
    t: f64,
    x: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    if problem.ic != InitialCondition::NegSinPi {
        return Err(Error::Unsupported(
            "the analytic solution is specific to u0(x) = -sin(pi x)".into(),
        ));
    }
    if t < 0.0 {
        return Err(Error::invalid(format!("negative time {t}")));
    }
    let nu = problem.nu;
    if t < TAYLOR_T {
        // u0 + t (nu u0'' - u0 u0') from the equation itself.
        let u0 = -(PI * x).sin();
        let u0p = -PI * (PI * x).cos();
        let u0pp = PI * PI * (PI * x).sin();
        return Ok(u0 + t * (nu * u0pp - u0 * u0p));
    }

    let s = (4.0 * nu * t).sqrt();
    let c = 1.0 / (2.0 * PI * nu);
    let nodes = rule.nodes();
    let weights = rule.weights();
    // log of ζ at each transformed node, shifted by its maximum.
    let mut log_zeta = Vec::with_capacity(nodes.len());
    let mut max_log = f64::NEG_INFINITY;
    for &eta in nodes {
        let y = x - s * eta;
        let l = -c * (PI * y).cos();
        max_log = max_log.max(l);
        log_zeta.push(l);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&eta, &w), &l) in nodes.iter().zip(weights).zip(&log_zeta) {
        let y = x - s * eta;
        let zeta = (l - max_log).exp();
        num += w * (-(PI * y).sin()) * zeta;
        den += w * zeta;
    }
    if !num.is_finite() || !den.is_finite() || den == 0.0 {
        return Err(Error::non_finite(
            format!("Cole-Hopf quadrature at t={t}, x={x}"),
            num / den,
        ));
    }
    Ok(num / den)
}

/// Maximum absolute difference between the finite-difference field and the
/// analytic formula over a uniform probe of [0, T] x [-1, 1].
pub fn fd_analytic_max_abs_diff(
    problem: &BurgersProblem,
    fd: &super::burgers_fd::FdSolution,
    rule: &QuadratureRule,
    n_t_probe: usize,
    n_x_probe: usize,
) -> Result<f64> {
    let mut max_diff = 0.0f64;
    for k in 0..n_t_probe {
        let t = problem.t_final * k as f64 / (n_t_probe - 1) as f64;
        for j in 0..n_x_probe {
            let x = -1.0 + 2.0 * j as f64 / (n_x_probe - 1) as f64;
            let ua = burgers_analytic(problem, t, x, rule)?;
            let uf = fd.interpolate(t, x);
            max_diff = max_diff.max((ua - uf).abs());
        }
    }
    Ok(max_diff)
}
