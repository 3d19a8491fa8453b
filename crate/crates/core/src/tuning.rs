//! Numerical resolution knobs shared by the quadrature-backed operations.

/// Resolution parameters for every quadrature-backed computation.
///
/// The unbounded domain (−∞, h) is truncated to [−trunc, h]; probability mass
/// below −trunc is ≲ Φ(−8) ≈ 6e−16 at the default.
#[derive(Debug, Clone, PartialEq)]
pub struct Tuning {
    /// Lower cutoff c: integrals over (−∞, h) run on [−c, h].
    pub trunc: f64,
    /// Gauss-Legendre nodes per tensor axis for n ≤ 3.
    pub tensor_nodes_low: usize,
    /// Nodes per axis for n = 4.
    pub tensor_nodes_n4: usize,
    /// Nodes per axis for n = 5 (only used by the expensive F₅ path).
    pub tensor_nodes_n5: usize,
    /// Nodes for the mapped semi-infinite one-dimensional integrals.
    pub tail_nodes: usize,
    /// Length of the mapped tail interval [0, tail_len].
    pub tail_len: f64,
    /// Nystrom discretization size for the operator eigenproblem.
    pub eigen_nodes: usize,
    /// Pointwise guard below h for the two-step kernel's vanishing denominator.
    pub eps_guard: f64,
    /// Opt-in for the n = 5 computations (Λ⁽⁸⁾).
    pub allow_expensive: bool,
}

impl Default for Tuning {
    fn default() -> Self {
        Self {
            trunc: 8.0,
            tensor_nodes_low: 48,
            tensor_nodes_n4: 32,
            tensor_nodes_n5: 16,
            tail_nodes: 200,
            tail_len: 12.0,
            eigen_nodes: 300,
            eps_guard: 1e-8,
            allow_expensive: false,
        }
    }
}

impl Tuning {
    /// Nodes per axis for an n-step tensor integral.
    pub fn tensor_nodes(&self, n: usize) -> usize {
        match n {
            0..=3 => self.tensor_nodes_low,
            4 => self.tensor_nodes_n4,
            _ => self.tensor_nodes_n5,
        }
    }

    /// Uniform override of every tensor axis resolution.
    pub fn with_tensor_nodes(mut self, nodes: usize) -> Self {
        self.tensor_nodes_low = nodes;
        self.tensor_nodes_n4 = nodes;
        self.tensor_nodes_n5 = nodes;
        self
    }
}
