//! Time-weighting schemes for the residual loss.
//!
//! Four interchangeable weight families over the same uniform time grid:
//! uniform, fixed exponential decay, causal (cumulative residual), and the
//! adaptive scheme that sets ρ(t) ∝ exp(-∫₀ᵗ λ(s) ds) from an online
//! Rayleigh-quotient estimate λ of the local Lyapunov exponent. The
//! `worst_case_error` functional is the discrete Cauchy-Schwarz bound that
//! makes the adaptive profile optimal.

use crate::grid::TimeGrid;
use crate::network::ShiftedAnsatz;
use crate::problems::Dynamics;
use crate::{Error, Result};

/// Declared scaling of a weight profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Mean of the weights is one; switching schemes keeps the effective
    /// learning rate.
    MeanOne,
    /// Trapezoid integral over the grid is one; the density of the
    /// optimality statement.
    IntegralOne,
    /// Largest weight is one; the causal baseline's convention.
    MaxOne,
}

/// Nonnegative loss weights, one per grid point, with a declared
/// normalization that holds to 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    grid: TimeGrid,
    rho: Vec<f64>,
    normalization: Normalization,
}

impl WeightProfile {
    /// Normalize raw nonnegative values into a profile.
    pub fn new(grid: TimeGrid, raw: Vec<f64>, normalization: Normalization) -> Result<Self> {
        if raw.len() != grid.len() {
            return Err(Error::invalid("weight count must match grid size"));
        }
        if raw.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::invalid("weights must be finite and nonnegative"));
        }
        if raw.iter().all(|&r| r == 0.0) {
            return Err(Error::invalid("at least one weight must be positive"));
        }
        let scale = match normalization {
            Normalization::MeanOne => raw.iter().sum::<f64>() / raw.len() as f64,
            Normalization::IntegralOne => grid.trapezoid(&raw),
            Normalization::MaxOne => raw.iter().cloned().fold(0.0, f64::max),
        };
        if scale <= 0.0 || !scale.is_finite() {
            return Err(Error::invalid(format!(
                "degenerate normalization scale {scale}"
            )));
        }
        let rho = raw.into_iter().map(|r| r / scale).collect();
        Ok(WeightProfile {
            grid,
            rho,
            normalization,
        })
    }

    /// Build from log-weights: the maximum is subtracted before
    /// exponentiation so extreme exponents cannot overflow.
    pub fn from_log_weights(
        grid: TimeGrid,
        log_weights: &[f64],
        normalization: Normalization,
    ) -> Result<Self> {
        if log_weights.iter().any(|l| !l.is_finite()) {
            return Err(Error::invalid("log-weights must be finite"));
        }
        let max = log_weights
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let raw = log_weights.iter().map(|l| (l - max).exp()).collect();
        WeightProfile::new(grid, raw, normalization)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn renormalized(&self, normalization: Normalization) -> Result<Self> {
        WeightProfile::new(self.grid.clone(), self.rho.clone(), normalization)
    }

    /// Distance of the declared normalization from one (testing hook).
    pub fn normalization_defect(&self) -> f64 {
        let v = match self.normalization {
            Normalization::MeanOne => self.rho.iter().sum::<f64>() / self.rho.len() as f64,
            Normalization::IntegralOne => self.grid.trapezoid(&self.rho),
            Normalization::MaxOne => self.rho.iter().cloned().fold(0.0, f64::max),
        };
        (v - 1.0).abs()
    }
}

/// Per-grid-point Lyapunov estimates with their running trapezoid integral.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovTrace {
    grid: TimeGrid,
    lambda: Vec<f64>,
    cumulative: Vec<f64>,
}

impl LyapunovTrace {
    pub fn from_lambda(grid: TimeGrid, lambda: Vec<f64>) -> Result<Self> {
        if lambda.len() != grid.len() {
            return Err(Error::invalid("lambda count must match grid size"));
        }
        let cumulative = grid.trapezoid_cumsum(&lambda);
        Ok(LyapunovTrace {
            grid,
            lambda,
            cumulative,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// ∫₀^{tᵢ} λ by the trapezoid rule; entry 0 is exactly zero.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Integrating factor Λᵢ = exp(-cumulative[i]).
    pub fn integrating_factor(&self) -> Vec<f64> {
        self.cumulative.iter().map(|c| (-c).exp()).collect()
    }
}

/// G(u) = A u + ξ + α u with antisymmetric A: the operator family on which
/// the online estimator is exact (λ = α for any candidate).
#[derive(Debug, Clone)]
pub struct LinearTestOperator {
    antisym: Vec<Vec<f64>>,
    drift: Vec<f64>,
    alpha: f64,
}

impl LinearTestOperator {
    pub fn new(antisym: Vec<Vec<f64>>, drift: Vec<f64>, alpha: f64) -> Result<Self> {
        let d = antisym.len();
        if d == 0 || antisym.iter().any(|row| row.len() != d) || drift.len() != d {
            return Err(Error::invalid(
                "operator blocks must be square and consistent",
            ));
        }
        for i in 0..d {
            for j in 0..d {
                if (antisym[i][j] + antisym[j][i]).abs() > 1e-12 {
                    return Err(Error::invalid("matrix is not antisymmetric"));
                }
            }
        }
        Ok(LinearTestOperator {
            antisym,
            drift,
            alpha,
        })
    }

    pub fn dim(&self) -> usize {
        self.drift.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|i| {
                let mut acc = self.drift[i] + self.alpha * u[i];
                for j in 0..d {
                    acc += self.antisym[i][j] * u[j];
                }
                acc
            })
            .collect()
    }
}

impl Dynamics for LinearTestOperator {
    fn rayleigh(
        &self,
        ansatz: &ShiftedAnsatz,
        t: f64,
        reference: Option<&[f64]>,
    ) -> Result<(f64, f64)> {
        let jets = ansatz.shifted_eval(t, None)?;
        if jets.len() != self.dim() {
            return Err(Error::invalid(format!(
                "ansatz output width {} does not match operator dimension {}",
                jets.len(),
                self.dim()
            )));
        }
        let u: Vec<f64> = jets.iter().map(|j| j.value).collect();
        for v in &u {
            if !v.is_finite() {
                return Err(Error::non_finite(format!("candidate at t={t}"), *v));
            }
        }
        let zero = vec![0.0; self.dim()];
        let r = reference.unwrap_or(&zero);
        let gu = self.apply(&u);
        let gr = self.apply(r);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.dim() {
            let d = u[i] - r[i];
            num += (gu[i] - gr[i]) * d;
            den += d * d;
        }
        Ok((num, den))
    }
}

/// Squared-candidate-norm floor below which the estimate is set to zero
/// (the quotient is undefined at a vanishing candidate; zero yields locally
/// uniform weighting, the least committal choice).
pub const LAMBDA_DENOMINATOR_FLOOR: f64 = 1e-8;

/// Constant weights. Mean-one normalization makes them all exactly one.
pub fn uniform_weights(grid: &TimeGrid) -> Result<WeightProfile> {
    WeightProfile::new(grid.clone(), vec![1.0; grid.len()], Normalization::MeanOne)
}

/// ρᵢ ∝ exp(-λ tᵢ), mean-one.
///
/// Routed through the constant-λ cumulative integral so that it coincides
/// bit for bit with `lyapunov_weights` of a constant trace.
pub fn exponential_weights(grid: &TimeGrid, lambda: f64) -> Result<WeightProfile> {
    if !lambda.is_finite() {
        return Err(Error::invalid("decay rate must be finite"));
    }
    let trace = LyapunovTrace::from_lambda(grid.clone(), vec![lambda; grid.len()])?;
    lyapunov_weights(&trace)
}

/// Causal weights: ρᵢ = exp(-ε · cumulative residual mass up to tᵢ),
/// max-one normalized (ρ₀ = 1), monotone nonincreasing.
///
/// `residual_sq_norms` holds ‖w(tᵢ,·)‖² per grid point.
pub fn causal_weights(
    grid: &TimeGrid,
    residual_sq_norms: &[f64],
    epsilon: f64,
) -> Result<WeightProfile> {
    if epsilon < 0.0 || !epsilon.is_finite() {
        return Err(Error::invalid(format!(
            "epsilon must be nonnegative, got {epsilon}"
        )));
    }
    if residual_sq_norms.len() != grid.len() {
        return Err(Error::invalid("residual norm count must match grid size"));
    }
    if residual_sq_norms.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::invalid(
            "residual norms must be finite and nonnegative",
        ));
    }
    let cumulative = grid.trapezoid_cumsum(residual_sq_norms);
    let logw: Vec<f64> = cumulative.iter().map(|c| -epsilon * c).collect();
    WeightProfile::from_log_weights(grid.clone(), &logw, Normalization::MaxOne)
}

/// Online Lyapunov estimate at every grid point: the Rayleigh quotient
/// ⟨G(U) - G(0), U⟩ / ‖U‖² in the problem's inner product, with a floored
/// denominator.
pub fn estimate_lambda<D: Dynamics>(
    dynamics: &D,
    ansatz: &ShiftedAnsatz,
    grid: &TimeGrid,
) -> Result<LyapunovTrace> {
    let mut lambda = Vec::with_capacity(grid.len());
    for (i, t) in grid.points().into_iter().enumerate() {
        let (num, den) = dynamics.rayleigh(ansatz, t, None).map_err(|e| match e {
            Error::NonFinite { context, value } => {
                Error::non_finite(format!("{context} (grid index {i})"), value)
            }
            other => other,
        })?;
        lambda.push(if den < LAMBDA_DENOMINATOR_FLOOR {
            0.0
        } else {
            num / den
        });
    }
    LyapunovTrace::from_lambda(grid.clone(), lambda)
}

/// The estimator of [`estimate_lambda`] with the exact solution substituted
/// for zero: ⟨G(U) - G(u), U - u⟩ / ‖U - u‖². Needs per-grid-point
/// reference states, so it is available for ODE problems only; used to
/// compare the online estimate against its unknowable ideal.
pub fn ideal_lambda<D: Dynamics>(
    dynamics: &D,
    ansatz: &ShiftedAnsatz,
    grid: &TimeGrid,
    reference_states: &[Vec<f64>],
) -> Result<Vec<f64>> {
    if reference_states.len() != grid.len() {
        return Err(Error::invalid(
            "reference state count must match grid size",
        ));
    }
    let mut lambda = Vec::with_capacity(grid.len());
    for (t, r) in grid.points().into_iter().zip(reference_states) {
        let (num, den) = dynamics.rayleigh(ansatz, t, Some(r))?;
        lambda.push(if den < LAMBDA_DENOMINATOR_FLOOR {
            0.0
        } else {
            num / den
        });
    }
    Ok(lambda)
}

/// Adaptive weights ρᵢ ∝ exp(-∫₀^{tᵢ} λ), mean-one for training.
pub fn lyapunov_weights(trace: &LyapunovTrace) -> Result<WeightProfile> {
    lyapunov_weights_normalized(trace, Normalization::MeanOne)
}

/// Same profile under any normalization (integral-one reports the optimal
/// density of the minimax statement).
pub fn lyapunov_weights_normalized(
    trace: &LyapunovTrace,
    normalization: Normalization,
) -> Result<WeightProfile> {
    let logw: Vec<f64> = trace.cumulative().iter().map(|c| -c).collect();
    WeightProfile::from_log_weights(trace.grid().clone(), &logw, normalization)
}

/// Discrete worst-case final-error factor: the trapezoid sum of Λᵢ²/ρᵢ,
/// with Λ the integrating factor of the trace. Budget-independent (the
/// constant involving the error budget and Λ(T) is dropped). Used to verify
/// optimality, not for training.
pub fn worst_case_error(profile: &WeightProfile, trace: &LyapunovTrace) -> Result<f64> {
    if profile.grid() != trace.grid() {
        return Err(Error::invalid("profile and trace must share a grid"));
    }
    let qw = profile.grid().quad_weights();
    let factor = trace.integrating_factor();
    let mut total = 0.0;
    for (i, ((c, rho), lam)) in qw.iter().zip(profile.rho()).zip(&factor).enumerate() {
        if !lam.is_finite() {
            return Err(Error::non_finite(
                format!("integrating factor at index {i}"),
                *lam,
            ));
        }
        if *lam == 0.0 {
            continue;
        }
        if *rho == 0.0 {
            return Err(Error::ZeroWeight { index: i });
        }
        total += c * lam * lam / rho;
    }
    Ok(total)
}
