//! Reverse-mode differentiation on a recording tape.
//!
//! The tape stores one node per primitive operation with the local partial
//! derivatives computed at forward time. A single backward sweep in reverse
//! push order accumulates the gradient of a scalar with respect to every
//! leaf. Accumulation order is fixed by construction, so two evaluations of
//! the same expression at the same parameters produce bitwise-identical
//! gradients.

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::jet::Scalar;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct Node {
    lhs: u32,
    rhs: u32,
    dl: f64,
    dr: f64,
    val: f64,
}

const NO_PARENT: u32 = u32::MAX;

/// Growable record of a forward computation.
#[derive(Debug, Default)]
pub struct Tape {
    nodes: RefCell<Vec<Node>>,
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.borrow().is_empty()
    }

    fn push(&self, node: Node) -> Var<'_> {
        let mut nodes = self.nodes.borrow_mut();
        let idx = nodes.len();
        assert!(idx < NO_PARENT as usize, "tape overflow");
        nodes.push(node);
        Var {
            tape: self,
            idx: idx as u32,
        }
    }

    /// New leaf whose adjoint is part of the gradient.
    pub fn var(&self, value: f64) -> Var<'_> {
        self.push(Node {
            lhs: NO_PARENT,
            rhs: NO_PARENT,
            dl: 0.0,
            dr: 0.0,
            val: value,
        })
    }

    /// New constant leaf; recorded like a var but its adjoint is discarded.
    pub fn constant(&self, value: f64) -> Var<'_> {
        self.var(value)
    }

    /// Adjoints of the first `n_leading` nodes with respect to `output`.
    ///
    /// The reverse sweep visits nodes in strictly decreasing index order.
    pub fn gradient(&self, output: Var<'_>, n_leading: usize) -> Vec<f64> {
        let nodes = self.nodes.borrow();
        let mut adj = vec![0.0; nodes.len()];
        adj[output.idx as usize] = 1.0;
        for i in (0..nodes.len()).rev() {
            let a = adj[i];
            if a == 0.0 {
                continue;
            }
            let node = nodes[i];
            if node.lhs != NO_PARENT {
                adj[node.lhs as usize] += node.dl * a;
            }
            if node.rhs != NO_PARENT {
                adj[node.rhs as usize] += node.dr * a;
            }
        }
        adj.truncate(n_leading);
        adj
    }
}

/// Handle to one tape node.
#[derive(Clone, Copy)]
pub struct Var<'t> {
    tape: &'t Tape,
    idx: u32,
}

impl fmt::Debug for Var<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Var(#{}, {})", self.idx, self.value())
    }
}

impl<'t> Var<'t> {
    pub fn value(self) -> f64 {
        self.tape.nodes.borrow()[self.idx as usize].val
    }

    fn unary(self, dl: f64, val: f64) -> Var<'t> {
        self.tape.push(Node {
            lhs: self.idx,
            rhs: NO_PARENT,
            dl,
            dr: 0.0,
            val,
        })
    }

    fn binary(self, rhs: Var<'t>, dl: f64, dr: f64, val: f64) -> Var<'t> {
        debug_assert!(
            std::ptr::eq(self.tape, rhs.tape),
            "operands recorded on different tapes"
        );
        self.tape.push(Node {
            lhs: self.idx,
            rhs: rhs.idx,
            dl,
            dr,
            val,
        })
    }
}

impl<'t> Add for Var<'t> {
    type Output = Var<'t>;
    fn add(self, rhs: Var<'t>) -> Var<'t> {
        let val = self.value() + rhs.value();
        self.binary(rhs, 1.0, 1.0, val)
    }
}

impl<'t> Sub for Var<'t> {
    type Output = Var<'t>;
    fn sub(self, rhs: Var<'t>) -> Var<'t> {
        let val = self.value() - rhs.value();
        self.binary(rhs, 1.0, -1.0, val)
    }
}

impl<'t> Mul for Var<'t> {
    type Output = Var<'t>;
    fn mul(self, rhs: Var<'t>) -> Var<'t> {
        let (a, b) = (self.value(), rhs.value());
        self.binary(rhs, b, a, a * b)
    }
}

impl<'t> Neg for Var<'t> {
    type Output = Var<'t>;
    fn neg(self) -> Var<'t> {
        let val = -self.value();
        self.unary(-1.0, val)
    }
}

impl<'t> Scalar for Var<'t> {
    fn tanh(self) -> Self {
        let y = self.value().tanh();
        self.unary(1.0 - y * y, y)
    }
    fn scale(self, c: f64) -> Self {
        let val = self.value() * c;
        self.unary(c, val)
    }
    fn add_const(self, c: f64) -> Self {
        let val = self.value() + c;
        self.unary(1.0, val)
    }
    fn value(self) -> f64 {
        Var::value(self)
    }
    fn lift(self, c: f64) -> Self {
        self.tape.constant(c)
    }
}

/// Gradient of a scalar loss with respect to `params`.
///
/// The closure receives the tape and one [`Var`] per parameter and must
/// build the loss from the supported primitives. Weighting coefficients and
/// other plain constants enter through [`Tape::constant`], `scale` or
/// `add_const` and receive no gradient.
pub fn loss_gradient<F>(loss_eval: F, params: &[f64]) -> Result<Vec<f64>>
where
    F: for<'t> FnOnce(&'t Tape, &[Var<'t>]) -> Var<'t>,
{
    let tape = Tape::new();
    let vars: Vec<Var<'_>> = params.iter().map(|&p| tape.var(p)).collect();
    let out = loss_eval(&tape, &vars);
    let loss = out.value();
    if !loss.is_finite() {
        return Err(Error::non_finite("loss value", loss));
    }
    Ok(tape.gradient(out, params.len()))
}
