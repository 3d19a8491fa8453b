//! Gauss-Legendre quadrature on finite intervals.
//!
//! Every integral in this crate (the one-dimensional tails, the tensor-product
//! forms and the Nystrom discretization) runs through [`QuadratureRule`].

use crate::error::{Error, Result};

/// Nodes and weights of a quadrature rule on [a, b], nodes strictly interior
/// and ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    a: f64,
    b: f64,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Σ w_i f(x_i); summation runs in node order.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(0.0, |acc, (&x, &w)| acc + w * f(x))
    }
}

/// Gauss-Legendre rule with `n` points mapped to [a, b].
///
/// Nodes are the roots of the n-th Legendre polynomial, found by Newton
/// iteration from the Chebyshev-like initial guess; exact for polynomials of
/// degree 2n−1.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::invalid("quadrature rule needs at least one node"));
    }
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::invalid(format!(
            "quadrature interval must be finite with a < b, got [{a}, {b}]"
        )));
    }

    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = (n + 1) / 2;
    for i in 0..half {
        // Root i (counting from the +1 end) of P_n on [-1, 1].
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-15 * x.abs().max(1.0) {
                let (p2, d2) = legendre_with_derivative(n, x);
                dp = d2;
                x -= p2 / d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Mirror the root; the rule is symmetric on [-1, 1].
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }

    let mid = 0.5 * (a + b);
    let scale = 0.5 * (b - a);
    for i in 0..n {
        nodes[i] = mid + scale * nodes[i];
        weights[i] *= scale;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        a,
        b,
    })
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    if n == 1 {
        return (x, 1.0);
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}
