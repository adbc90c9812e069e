//! Physics-informed neural network training with pluggable time weighting.
//!
//! The residual loss `∫ ρ(t) |w(t,·)|² dt` is minimized over the parameters of
//! a tanh MLP, with the weight `ρ` chosen per scheme: uniform, exponential
//! decay, causal (cumulative residual), or adaptive weights driven by an
//! online Lyapunov-exponent estimate. Two benchmark problems are built in
//! (the Lorenz system and the viscous Burgers equation) together with
//! reference solvers used to measure the final-time error.

pub mod autodiff;
pub mod grid;
pub mod network;
pub mod problems;
pub mod reference;
pub mod rng;
pub mod trainer;
pub mod weighting;

mod error;

pub use error::{Error, Result};
