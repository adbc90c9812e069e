//! Ground-truth solvers: adaptive ODE integration for the Lorenz system,
//! split-step finite differences and the Cole-Hopf quadrature formula for
//! the Burgers equation.

mod burgers_fd;
mod cole_hopf;
mod gauss_hermite;
mod ode;

pub use burgers_fd::{
    cn_half_step, lax_friedrichs_step, solve_burgers_fd, solve_burgers_fd_sized, FdSolution,
    DEFAULT_NT, DEFAULT_NX,
};
pub use cole_hopf::{burgers_analytic, fd_analytic_max_abs_diff};
pub use ode::{integrate_rk45, solve_lorenz_reference, solve_lorenz_with_options, OdeOptions};
pub use gauss_hermite::QuadratureRule;
