//! Differentiation engine.
//!
//! Two composable pieces:
//!
//! * [`Jet2`] — forward-mode jets carrying the network output together with
//!   its input derivatives (∂t, ∂x, ∂xx), exact to machine precision.
//! * [`Tape`]/[`loss_gradient`] — reverse-mode gradients of a scalar loss
//!   with respect to all parameters, composable with jets so the loss may
//!   contain input derivatives of the network.
//!
//! The training loop itself uses a specialized layer-wise backward pass (see
//! [`crate::network::backprop`]) that computes the same parameter gradients
//! much faster for the fixed MLP shape; the tape is the general engine and
//! the cross-check.

mod jet;
mod tape;

pub use jet::{Jet2, Scalar};
pub use tape::{loss_gradient, Tape, Var};
