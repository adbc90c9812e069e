//! Uniform grids and the trapezoid quadrature used throughout.
//!
//! Every time integral in the loss, the weight normalizations and the
//! cumulative Lyapunov integral use the composite trapezoid rule on the same
//! uniform grid, so the discrete identities the weighting schemes rely on
//! hold exactly.

use crate::{Error, Result};

/// Uniform time grid including both endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    n: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGrid);
        }
        if !(t_end > t_start) && n > 1 {
            return Err(Error::invalid(format!(
                "degenerate time interval [{t_start}, {t_end}]"
            )));
        }
        Ok(TimeGrid { t_start, t_end, n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Nominal spacing; zero for a single-point grid.
    pub fn h(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.t_end - self.t_start) / (self.n - 1) as f64
        }
    }

    /// Grid points with both endpoints exact.
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.t_start];
        }
        let span = self.t_end - self.t_start;
        let denom = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                if i == self.n - 1 {
                    self.t_end
                } else {
                    self.t_start + span * (i as f64 / denom)
                }
            })
            .collect()
    }

    /// Trapezoid quadrature weights: h/2 at the endpoints, h inside.
    /// A single-point grid gets weight 1 so that sums degenerate to the value.
    pub fn quad_weights(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![1.0];
        }
        let h = self.h();
        (0..self.n)
            .map(|i| {
                if i == 0 || i == self.n - 1 {
                    0.5 * h
                } else {
                    h
                }
            })
            .collect()
    }

    /// Trapezoid integral of per-point values.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.n, "value count must match grid size");
        self.quad_weights()
            .iter()
            .zip(values)
            .map(|(w, v)| w * v)
            .sum()
    }

    /// Running trapezoid integral; entry 0 is exactly zero.
    pub fn trapezoid_cumsum(&self, values: &[f64]) -> Vec<f64> {
        assert_eq!(values.len(), self.n, "value count must match grid size");
        let h = self.h();
        let mut out = Vec::with_capacity(self.n);
        let mut acc = 0.0;
        out.push(0.0);
        for i in 1..self.n {
            acc += 0.5 * h * (values[i - 1] + values[i]);
            out.push(acc);
        }
        out
    }
}

/// Uniform cell-midpoint grid on an interval, excluding both endpoints.
///
/// Used for the interior space collocation points. The matching quadrature
/// is the composite midpoint rule, whose weights sum to the full interval
/// length even though the endpoints are not sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct MidpointGrid {
    x_start: f64,
    x_end: f64,
    n: usize,
}

impl MidpointGrid {
    pub fn new(x_start: f64, x_end: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGrid);
        }
        if !(x_end > x_start) {
            return Err(Error::invalid(format!(
                "degenerate interval [{x_start}, {x_end}]"
            )));
        }
        Ok(MidpointGrid { x_start, x_end, n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell width, also the quadrature weight of every point.
    pub fn h(&self) -> f64 {
        (self.x_end - self.x_start) / self.n as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.h();
        (0..self.n)
            .map(|j| self.x_start + (j as f64 + 0.5) * h)
            .collect()
    }

    /// Midpoint-rule integral of per-point values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.n, "value count must match grid size");
        let h = self.h();
        values.iter().map(|v| h * v).sum()
    }
}
