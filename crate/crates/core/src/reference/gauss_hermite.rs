//! Gauss-Hermite quadrature: nodes and weights for ∫ f(x) e^{-x²} dx.
//!
//! Roots are found by Newton iteration on the orthonormal Hermite
//! recurrence, walking inward from asymptotic first guesses; the weight at a
//! root z is 2 / p'_n(z)² with p_n orthonormal. Symmetric pairs are assigned
//! explicitly, so nodes are symmetric about zero to the last bit.

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// n-point Gauss-Hermite rule, exact for polynomials of degree 2n-1
    /// against the weight e^{-x²}.
    pub fn gauss_hermite(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("quadrature order must be positive"));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        let mut z = 0.0f64;
        for i in 0..m {
            // First guesses per root index (largest root first).
            z = match i {
                0 => {
                    let an = (2 * n + 1) as f64;
                    an.sqrt() - 1.85575 * an.powf(-1.0 / 6.0)
                }
                1 => z - 1.14 * (n as f64).powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[n - 1],
                3 => 1.91 * z - 0.91 * nodes[n - 2],
                _ => 2.0 * z - nodes[n - i + 1],
            };
            let mut pp = 0.0;
            let mut converged = false;
            for _ in 0..100 {
                // Orthonormal recurrence: p_0 = pi^{-1/4},
                // p_{k+1} = z sqrt(2/(k+1)) p_k - sqrt(k/(k+1)) p_{k-1}.
                let mut p1 = std::f64::consts::PI.powf(-0.25);
                let mut p2 = 0.0;
                for k in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = z * (2.0 / (k + 1) as f64).sqrt() * p2
                        - ((k as f64) / (k + 1) as f64).sqrt() * p3;
                }
                // p'_n(z) = sqrt(2n) p_{n-1}(z).
                pp = (2.0 * n as f64).sqrt() * p2;
                let dz = p1 / pp;
                z -= dz;
                if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::invalid(format!(
                    "Gauss-Hermite Newton iteration failed for order {n}"
                )));
            }
            nodes[n - 1 - i] = z;
            nodes[i] = -z;
            let w = 2.0 / (pp * pp);
            weights[n - 1 - i] = w;
            weights[i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(QuadratureRule { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// ∫ f(x) e^{-x²} dx.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}
