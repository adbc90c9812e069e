//! Second-order forward jets.
//!
//! A [`Jet2`] carries a value together with its derivatives with respect to
//! the scalar network inputs: first derivative in time, first and second in
//! space. Arithmetic propagates the exact chain and product rules, so any
//! expression built from jets has machine-precision input derivatives, never
//! finite differences.
//!
//! The component type is generic: `Jet2<f64>` is ordinary evaluation, while
//! `Jet2<Var>` records the same computation on a gradient tape so the loss
//! may contain input derivatives of the network and still be differentiated
//! with respect to the parameters.

use std::ops::{Add, Mul, Neg, Sub};

/// Scalar values a jet can be built from.
///
/// `scale`/`add_const` fold plain constants into the computation;
/// `lift` creates a constant in the same computation context as `self`
/// (for a tape variable this records a constant node on the same tape).
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn tanh(self) -> Self;
    fn scale(self, c: f64) -> Self;
    fn add_const(self, c: f64) -> Self;
    fn value(self) -> f64;
    fn lift(self, c: f64) -> Self;
}

impl Scalar for f64 {
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn add_const(self, c: f64) -> Self {
        self + c
    }
    fn value(self) -> f64 {
        self
    }
    fn lift(self, c: f64) -> Self {
        c
    }
}

/// Value plus input derivatives (∂t, ∂x, ∂xx) at one collocation point.
///
/// For time-only problems the space components are identically zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2<S = f64> {
    pub value: S,
    pub d_t: S,
    pub d_x: S,
    pub d_xx: S,
}

impl<S: Scalar> Jet2<S> {
    pub fn new(value: S, d_t: S, d_x: S, d_xx: S) -> Self {
        Jet2 {
            value,
            d_t,
            d_x,
            d_xx,
        }
    }

    /// A constant in the same context as `ctx` (no input dependence).
    pub fn constant_like(ctx: S, c: f64) -> Self {
        let zero = ctx.lift(0.0);
        Jet2 {
            value: ctx.lift(c),
            d_t: zero,
            d_x: zero,
            d_xx: zero,
        }
    }

    /// Multiply by a scalar of the computation (e.g. a network parameter).
    /// The scalar has no input dependence, so every component scales.
    pub fn mul_scalar(self, w: S) -> Self {
        Jet2 {
            value: self.value * w,
            d_t: self.d_t * w,
            d_x: self.d_x * w,
            d_xx: self.d_xx * w,
        }
    }

    /// Multiply by a plain constant.
    pub fn scale(self, c: f64) -> Self {
        Jet2 {
            value: self.value.scale(c),
            d_t: self.d_t.scale(c),
            d_x: self.d_x.scale(c),
            d_xx: self.d_xx.scale(c),
        }
    }

    pub fn add_const(self, c: f64) -> Self {
        Jet2 {
            value: self.value.add_const(c),
            ..self
        }
    }

    /// tanh with exact first- and second-order propagation:
    /// with y = tanh(v) and s = 1 - y², the output derivatives are
    /// s·d_t, s·d_x and s·d_xx - 2·y·s·d_x².
    pub fn tanh(self) -> Self {
        let y = self.value.tanh();
        let s = (y * y).scale(-1.0).add_const(1.0);
        let dx = self.d_x;
        Jet2 {
            value: y,
            d_t: s * self.d_t,
            d_x: s * dx,
            d_xx: s * self.d_xx - (y * s * dx * dx).scale(2.0),
        }
    }
}

impl Jet2<f64> {
    /// Seed for the time input: value t, ∂t = 1.
    pub fn time_seed(t: f64) -> Self {
        Jet2::new(t, 1.0, 0.0, 0.0)
    }

    /// Seed for the space input: value x, ∂x = 1.
    pub fn space_seed(x: f64) -> Self {
        Jet2::new(x, 0.0, 1.0, 0.0)
    }

    /// Time input with the derivative seed removed (time pinned).
    pub fn pinned_time(t: f64) -> Self {
        Jet2::new(t, 0.0, 0.0, 0.0)
    }

    pub fn constant(c: f64) -> Self {
        Jet2::new(c, 0.0, 0.0, 0.0)
    }
}

impl<S: Scalar> Add for Jet2<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Jet2 {
            value: self.value + rhs.value,
            d_t: self.d_t + rhs.d_t,
            d_x: self.d_x + rhs.d_x,
            d_xx: self.d_xx + rhs.d_xx,
        }
    }
}

impl<S: Scalar> Sub for Jet2<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Jet2 {
            value: self.value - rhs.value,
            d_t: self.d_t - rhs.d_t,
            d_x: self.d_x - rhs.d_x,
            d_xx: self.d_xx - rhs.d_xx,
        }
    }
}

impl<S: Scalar> Neg for Jet2<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet2 {
            value: -self.value,
            d_t: -self.d_t,
            d_x: -self.d_x,
            d_xx: -self.d_xx,
        }
    }
}

impl<S: Scalar> Mul for Jet2<S> {
    type Output = Self;
    /// Product rule up to second order:
    /// (a·b)'' = a''·b + 2·a'·b' + a·b'' in the space direction.
    fn mul(self, rhs: Self) -> Self {
        Jet2 {
            value: self.value * rhs.value,
            d_t: self.d_t * rhs.value + self.value * rhs.d_t,
            d_x: self.d_x * rhs.value + self.value * rhs.d_x,
            d_xx: self.d_xx * rhs.value
                + (self.d_x * rhs.d_x).scale(2.0)
                + self.value * rhs.d_xx,
        }
    }
}
