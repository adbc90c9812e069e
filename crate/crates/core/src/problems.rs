//! Benchmark problem definitions: residual operators, norms, grids and
//! initial data for the Lorenz system and the viscous Burgers equation.

use crate::autodiff::Jet2;
use crate::grid::{MidpointGrid, TimeGrid};
use crate::network::{init_network, InitialCondition, ShiftMode, ShiftedAnsatz};
use crate::{Error, Result};

/// Lorenz system with the classical parameter set.
///
/// State dimension 3, time-only network input; the state-space inner
/// product is Euclidean.
#[derive(Debug, Clone, PartialEq)]
pub struct LorenzProblem {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
    pub t_final: f64,
    pub n_t: usize,
    pub initial_state: [f64; 3],
}

impl Default for LorenzProblem {
    fn default() -> Self {
        LorenzProblem {
            sigma: 10.0,
            rho: 28.0,
            beta: 8.0 / 3.0,
            t_final: 0.5,
            n_t: 256,
            initial_state: [1.0, 1.0, 1.0],
        }
    }
}

impl LorenzProblem {
    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(0.0, self.t_final, self.n_t)
    }

    pub fn default_layer_sizes(&self) -> Vec<usize> {
        vec![1, 20, 20, 20, 20, 20, 3]
    }

    /// Right-hand side of the system.
    pub fn rhs(&self, s: [f64; 3]) -> [f64; 3] {
        [
            self.sigma * (s[1] - s[0]),
            s[0] * (self.rho - s[2]) - s[1],
            s[0] * s[1] - self.beta * s[2],
        ]
    }

    /// Jacobian of the right-hand side, used by the gradient backward pass.
    pub fn rhs_jacobian(&self, s: [f64; 3]) -> [[f64; 3]; 3] {
        [
            [-self.sigma, self.sigma, 0.0],
            [self.rho - s[2], -1.0, -s[0]],
            [s[1], s[0], -self.beta],
        ]
    }
}

/// Viscous Burgers equation on [-1, 1] with homogeneous Dirichlet
/// boundaries.
///
/// The space collocation grid holds interior points only; the boundary
/// condition enters through its own loss term.
#[derive(Debug, Clone, PartialEq)]
pub struct BurgersProblem {
    pub nu: f64,
    pub t_final: f64,
    pub n_t: usize,
    pub n_x: usize,
    pub ic: InitialCondition,
}

impl Default for BurgersProblem {
    fn default() -> Self {
        BurgersProblem {
            nu: 0.01 / std::f64::consts::PI,
            t_final: 1.0,
            n_t: 50,
            n_x: 25,
            ic: InitialCondition::NegSinPi,
        }
    }
}

impl BurgersProblem {
    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(0.0, self.t_final, self.n_t)
    }

    /// Interior collocation points: cell midpoints of [-1, 1].
    pub fn x_grid(&self) -> Result<MidpointGrid> {
        MidpointGrid::new(-1.0, 1.0, self.n_x)
    }

    pub fn default_layer_sizes(&self) -> Vec<usize> {
        vec![2, 20, 20, 20, 20, 20, 20, 20, 20, 1]
    }
}

/// One of the built-in benchmark problems.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Lorenz(LorenzProblem),
    Burgers(BurgersProblem),
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::Lorenz(_) => "lorenz",
            Problem::Burgers(_) => "burgers",
        }
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        match self {
            Problem::Lorenz(p) => p.time_grid(),
            Problem::Burgers(p) => p.time_grid(),
        }
    }

    pub fn default_layer_sizes(&self) -> Vec<usize> {
        match self {
            Problem::Lorenz(p) => p.default_layer_sizes(),
            Problem::Burgers(p) => p.default_layer_sizes(),
        }
    }

    pub fn initial_condition(&self) -> InitialCondition {
        match self {
            Problem::Lorenz(p) => InitialCondition::Constant(p.initial_state.to_vec()),
            Problem::Burgers(p) => p.ic.clone(),
        }
    }

    /// Freshly initialized ansatz for this problem.
    pub fn ansatz(
        &self,
        seed: u64,
        mode: ShiftMode,
        layer_sizes: Option<&[usize]>,
    ) -> Result<ShiftedAnsatz> {
        let sizes = match layer_sizes {
            Some(s) => s.to_vec(),
            None => self.default_layer_sizes(),
        };
        let net = init_network(&sizes, seed)?;
        ShiftedAnsatz::new(net, self.initial_condition(), mode)
    }
}

/// Equation error of the candidate at one time: w(t) = ∂t U - rhs(U).
pub fn lorenz_residual(
    problem: &LorenzProblem,
    ansatz: &ShiftedAnsatz,
    t: f64,
) -> Result<[f64; 3]> {
    let jets = ansatz.shifted_eval(t, None)?;
    Ok(lorenz_residual_from_jets(problem, &jets))
}

pub(crate) fn lorenz_residual_from_jets(problem: &LorenzProblem, jets: &[Jet2]) -> [f64; 3] {
    let state = [jets[0].value, jets[1].value, jets[2].value];
    let rhs = problem.rhs(state);
    [
        jets[0].d_t - rhs[0],
        jets[1].d_t - rhs[1],
        jets[2].d_t - rhs[2],
    ]
}

/// Equation error at one collocation point: w = u_t + u u_x - nu u_xx.
pub fn burgers_residual(
    problem: &BurgersProblem,
    ansatz: &ShiftedAnsatz,
    t: f64,
    x: f64,
) -> Result<f64> {
    let jet = ansatz.shifted_eval(t, Some(x))?[0];
    Ok(burgers_residual_from_jet(problem, jet))
}

pub(crate) fn burgers_residual_from_jet(problem: &BurgersProblem, jet: Jet2) -> f64 {
    jet.d_t + jet.value * jet.d_x - problem.nu * jet.d_xx
}

pub(crate) fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Norm of the residual at one time slice: Euclidean for the Lorenz system,
/// discrete L2 over the space grid for Burgers.
pub fn residual_norm(problem: &Problem, ansatz: &ShiftedAnsatz, t: f64) -> Result<f64> {
    match problem {
        Problem::Lorenz(p) => Ok(euclidean_norm(&lorenz_residual(p, ansatz, t)?)),
        Problem::Burgers(p) => {
            let grid = p.x_grid()?;
            let sq: Vec<f64> = grid
                .points()
                .iter()
                .map(|&x| burgers_residual(p, ansatz, t, x).map(|w| w * w))
                .collect::<Result<_>>()?;
            Ok(grid.integrate(&sq).sqrt())
        }
    }
}

/// Per-time-slice quantities behind the Rayleigh-quotient estimate:
/// the pairing ⟨G(U) - G(r), U - r⟩ and the squared norm ‖U - r‖², with the
/// reference candidate r taken as zero when none is supplied.
pub trait Dynamics {
    fn rayleigh(
        &self,
        ansatz: &ShiftedAnsatz,
        t: f64,
        reference: Option<&[f64]>,
    ) -> Result<(f64, f64)>;
}

impl Dynamics for LorenzProblem {
    fn rayleigh(
        &self,
        ansatz: &ShiftedAnsatz,
        t: f64,
        reference: Option<&[f64]>,
    ) -> Result<(f64, f64)> {
        let jets = ansatz.shifted_eval(t, None)?;
        let u = [jets[0].value, jets[1].value, jets[2].value];
        for (k, v) in u.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::non_finite(format!("candidate component {k} at t={t}"), *v));
            }
        }
        let r = match reference {
            Some(r) => [r[0], r[1], r[2]],
            None => [0.0; 3],
        };
        let gu = self.rhs(u);
        let gr = self.rhs(r);
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..3 {
            let d = u[k] - r[k];
            num += (gu[k] - gr[k]) * d;
            den += d * d;
        }
        Ok((num, den))
    }
}

impl Dynamics for BurgersProblem {
    fn rayleigh(
        &self,
        ansatz: &ShiftedAnsatz,
        t: f64,
        reference: Option<&[f64]>,
    ) -> Result<(f64, f64)> {
        if reference.is_some() {
            return Err(Error::Unsupported(
                "reference-based Rayleigh quotient needs spatial derivatives of the \
                 reference solution and is only available for ODE problems"
                    .into(),
            ));
        }
        let grid = self.x_grid()?;
        let h = grid.h();
        let mut num = 0.0;
        let mut den = 0.0;
        for x in grid.points() {
            let jet = ansatz.shifted_eval(t, Some(x))?[0];
            if !jet.value.is_finite() {
                return Err(Error::non_finite(format!("candidate at t={t}, x={x}"), jet.value));
            }
            // G(u) = nu u_xx - u u_x and G(0) = 0.
            let g = self.nu * jet.d_xx - jet.value * jet.d_x;
            num += h * g * jet.value;
            den += h * jet.value * jet.value;
        }
        Ok((num, den))
    }
}

impl Dynamics for Problem {
    fn rayleigh(
        &self,
        ansatz: &ShiftedAnsatz,
        t: f64,
        reference: Option<&[f64]>,
    ) -> Result<(f64, f64)> {
        match self {
            Problem::Lorenz(p) => p.rayleigh(ansatz, t, reference),
            Problem::Burgers(p) => p.rayleigh(ansatz, t, reference),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{param_count, NetworkParams};

    fn zero_net_ansatz(sizes: &[usize], ic: InitialCondition) -> ShiftedAnsatz {
        let net =
            NetworkParams::from_values(sizes.to_vec(), vec![0.0; param_count(sizes)], 0).unwrap();
        ShiftedAnsatz::new(net, ic, ShiftMode::Additive).unwrap()
    }

    #[test]
    fn lorenz_rhs_hand_values() {
        let p = LorenzProblem::default();
        let r = p.rhs([1.0, 1.0, 1.0]);
        assert_eq!(r[0], 0.0);
        assert_eq!(r[1], 26.0);
        assert!((r[2] - (1.0 - 8.0 / 3.0)).abs() < 1e-15);

        assert_eq!(p.rhs([0.0, 0.0, 0.0]), [0.0, 0.0, 0.0]);

        let r = p.rhs([1.0, 2.0, 3.0]);
        assert_eq!(r[0], 10.0);
        assert_eq!(r[1], 23.0);
        assert!((r[2] - (-6.0)).abs() < 1e-15);
    }

    #[test]
    fn lorenz_rhs_jacobian_matches_finite_differences() {
        let p = LorenzProblem::default();
        let s = [0.7, -1.2, 2.4];
        let jac = p.rhs_jacobian(s);
        let h = 1e-6;
        for m in 0..3 {
            let mut up = s;
            let mut dn = s;
            up[m] += h;
            dn[m] -= h;
            let (ru, rd) = (p.rhs(up), p.rhs(dn));
            for k in 0..3 {
                let fd = (ru[k] - rd[k]) / (2.0 * h);
                assert!((jac[k][m] - fd).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn constant_candidate_residual_is_minus_rhs() {
        // The zero network with the additive shift is identically (1,1,1).
        let p = LorenzProblem::default();
        let ansatz = zero_net_ansatz(&[1, 5, 3], InitialCondition::Constant(vec![1.0; 3]));
        let w = lorenz_residual(&p, &ansatz, 0.3).unwrap();
        assert!((w[0] - 0.0).abs() < 1e-14);
        assert!((w[1] + 26.0).abs() < 1e-14);
        assert!((w[2] - 5.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn residual_finite_at_t_zero_with_shift() {
        let p = LorenzProblem::default();
        let ansatz = Problem::Lorenz(p.clone())
            .ansatz(3, ShiftMode::Additive, None)
            .unwrap();
        let w = lorenz_residual(&p, &ansatz, 0.0).unwrap();
        assert!(w.iter().all(|v| v.is_finite()));
        // The shift fixes the value, not the slope: U(0) = (1,1,1) exactly,
        // so w(0) = dU/dt(0) - (0, 26, -5/3).
        let jets = ansatz.shifted_eval(0.0, None).unwrap();
        assert!((w[1] - (jets[1].d_t - 26.0)).abs() < 1e-14);
    }

    #[test]
    fn burgers_zero_network_residual_closed_form() {
        // Zero network with shift: u(t,x) = -sin(pi x) for all t, hence
        // w = pi sin(pi x) cos(pi x) - nu pi^2 sin(pi x).
        let p = BurgersProblem::default();
        let ansatz = zero_net_ansatz(&[2, 4, 1], InitialCondition::NegSinPi);
        let pi = std::f64::consts::PI;
        for &x in &[-0.8, -0.3, 0.1, 0.5, 0.9] {
            let w = burgers_residual(&p, &ansatz, 0.7, x).unwrap();
            let expect = pi * (pi * x).sin() * (pi * x).cos() - p.nu * pi * pi * (pi * x).sin();
            assert!((w - expect).abs() < 1e-12, "x={x}: {w} vs {expect}");
        }
        // At x = 0.5 the transport part vanishes: w = -0.01 pi.
        let w = burgers_residual(&p, &ansatz, 0.2, 0.5).unwrap();
        assert!((w - (-0.01 * pi)).abs() < 1e-12);
    }

    #[test]
    fn zero_ic_zero_network_residual_vanishes() {
        let p = BurgersProblem {
            ic: InitialCondition::Constant(vec![0.0]),
            ..BurgersProblem::default()
        };
        let ansatz = zero_net_ansatz(&[2, 4, 1], InitialCondition::Constant(vec![0.0]));
        for &(t, x) in &[(0.0, 0.3), (0.5, -0.9), (1.0, 0.0)] {
            assert_eq!(burgers_residual(&p, &ansatz, t, x).unwrap(), 0.0);
        }
    }

    #[test]
    fn residual_norm_hand_values() {
        let lorenz = Problem::Lorenz(LorenzProblem::default());
        let ansatz = zero_net_ansatz(&[1, 5, 3], InitialCondition::Constant(vec![1.0; 3]));
        let n = residual_norm(&lorenz, &ansatz, 0.1).unwrap();
        let expect = (26.0f64 * 26.0 + (5.0 / 3.0) * (5.0 / 3.0)).sqrt();
        assert!((n - expect).abs() < 1e-12);
    }

    #[test]
    fn residual_norm_is_homogeneous() {
        // Scaling a residual field by c scales the norm by |c|; check the
        // underlying norms directly.
        let v = [3.0, -4.0, 12.0];
        let scaled: Vec<f64> = v.iter().map(|a| -2.5 * a).collect();
        assert!((euclidean_norm(&scaled) - 2.5 * euclidean_norm(&v)).abs() < 1e-12);

        let grid = MidpointGrid::new(-1.0, 1.0, 25).unwrap();
        let w: Vec<f64> = grid.points().iter().map(|x| (2.0 * x).cos()).collect();
        let wsq: Vec<f64> = w.iter().map(|a| a * a).collect();
        let wsq_scaled: Vec<f64> = w.iter().map(|a| (3.0 * a) * (3.0 * a)).collect();
        let n = grid.integrate(&wsq).sqrt();
        let ns = grid.integrate(&wsq_scaled).sqrt();
        assert!((ns - 3.0 * n).abs() < 1e-12);
    }

    #[test]
    fn burgers_constant_unit_residual_norm_is_sqrt_two() {
        // A synthetic constant residual field integrates to 2 over [-1, 1].
        let grid = MidpointGrid::new(-1.0, 1.0, 25).unwrap();
        let wsq = vec![1.0; 25];
        assert!((grid.integrate(&wsq).sqrt() - 2.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn lorenz_rayleigh_at_unit_candidate() {
        // U = (1,1,1): G(U) = (0, 26, -5/3), G(0) = 0, so the quotient is
        // (0 + 26 - 5/3) / 3 = 73/9.
        let p = LorenzProblem::default();
        let ansatz = zero_net_ansatz(&[1, 5, 3], InitialCondition::Constant(vec![1.0; 3]));
        let (num, den) = p.rayleigh(&ansatz, 0.2, None).unwrap();
        assert!((num / den - 73.0 / 9.0).abs() < 1e-13);
    }
}
