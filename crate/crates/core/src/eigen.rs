//! Nystrom discretization of the transition kernels and dominant-eigenvalue
//! extraction for λ₁(h), λ₂(h), plus the closed-form λ̂₁(h).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact;
use crate::normal;
use crate::quadrature::QuadratureRule;

const RAYLEIGH_TOL: f64 = 1e-13;
const MAX_ITERATIONS: usize = 10_000;

/// Which transition kernel the integral operator is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelId {
    /// p⁽¹⁾_h(x→z), the one-step transition below h.
    OneStep,
    /// q_h(x→z), the two-step conditional transition below h.
    TwoStepConditional,
}

/// A kernel sampled on a quadrature rule: A[i][j] = K(x_i → x_j).
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    kernel_matrix: Vec<f64>,
    rule: QuadratureRule,
}

impl DiscretizedOperator {
    /// Sample an arbitrary kernel on the rule's node grid.
    pub fn from_kernel_fn(
        rule: QuadratureRule,
        kernel: impl Fn(f64, f64) -> Result<f64> + Sync,
    ) -> Result<Self> {
        let nodes = rule.nodes();
        let n = nodes.len();
        let rows: Vec<Vec<f64>> = nodes
            .par_iter()
            .map(|&x| nodes.iter().map(|&z| kernel(x, z)).collect::<Result<Vec<f64>>>())
            .collect::<Result<_>>()?;
        let mut kernel_matrix = Vec::with_capacity(n * n);
        for row in rows {
            kernel_matrix.extend(row);
        }
        Ok(Self {
            kernel_matrix,
            rule,
        })
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn len(&self) -> usize {
        self.rule.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rule.is_empty()
    }

    /// The raw kernel samples A.
    pub fn kernel_matrix(&self) -> &[f64] {
        &self.kernel_matrix
    }

    /// The similarity-transformed matrix M = D^{1/2} A D^{1/2}, D = diag(w).
    pub fn symmetrized(&self) -> Vec<f64> {
        let n = self.len();
        let sqrt_w: Vec<f64> = self.rule.weights().iter().map(|w| w.sqrt()).collect();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = sqrt_w[i] * self.kernel_matrix[i * n + j] * sqrt_w[j];
            }
        }
        m
    }

    /// A·D, sharing the spectrum of M (used by the similarity check).
    pub fn weighted(&self) -> Vec<f64> {
        let n = self.len();
        let w = self.rule.weights();
        let mut ad = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                ad[i * n + j] = self.kernel_matrix[i * n + j] * w[j];
            }
        }
        ad
    }
}

/// Dominant eigenvalue with the recovered eigen-density at the rule's nodes.
#[derive(Debug, Clone)]
pub struct DominantEigen {
    /// Largest (Perron) eigenvalue.
    pub value: f64,
    /// Eigenfunction values at the nodes, normalized to unit integral.
    pub density: Vec<f64>,
    /// Power-iteration steps used.
    pub iterations: usize,
}

/// Discretize the requested transition kernel on `rule` (which must cover
/// [−c, h−ε]).
pub fn discretize(
    kernel: KernelId,
    h: f64,
    rule: &QuadratureRule,
    eps_guard: f64,
) -> Result<DiscretizedOperator> {
    match kernel {
        KernelId::OneStep => {
            DiscretizedOperator::from_kernel_fn(rule.clone(), |x, z| Ok(exact::kernel_p1(h, x, z)))
        }
        KernelId::TwoStepConditional => {
            DiscretizedOperator::from_kernel_fn(rule.clone(), |x, z| exact::kernel_q(h, x, z, eps_guard))
        }
    }
}

/// Largest eigenvalue of the integral operator with the given kernel, by
/// power iteration on the Nystrom matrix.
pub fn dominant_eigen(
    kernel: KernelId,
    h: f64,
    rule: &QuadratureRule,
    eps_guard: f64,
) -> Result<DominantEigen> {
    dominant_eigen_of(&discretize(kernel, h, rule, eps_guard)?)
}

/// Dominant eigenvalue of an already-discretized operator.
///
/// The iteration runs on Mᵀ: the stationary density is the left eigenfunction
/// of the kernel (q = ∫ q(x) K(x→z) dx), and the eigenvalue of Mᵀ equals that
/// of M. Node values are recovered as uᵢ/√wᵢ and normalized to unit integral.
pub fn dominant_eigen_of(op: &DiscretizedOperator) -> Result<DominantEigen> {
    let n = op.len();
    let m = op.symmetrized();
    let mut mt = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            mt[j * n + i] = m[i * n + j];
        }
    }
    let (value, vector, iterations) = power_iteration(&mt, n)?;

    let flip = if vector.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let mut density: Vec<f64> = vector
        .iter()
        .zip(op.rule.weights())
        .map(|(&u, &w)| flip * u / w.sqrt())
        .collect();
    let total: f64 = density
        .iter()
        .zip(op.rule.weights())
        .map(|(&p, &w)| p * w)
        .sum();
    for p in &mut density {
        *p /= total;
    }
    Ok(DominantEigen {
        value,
        density,
        iterations,
    })
}

/// Power iteration with the all-ones start vector; converges when successive
/// Rayleigh quotients differ by less than 1e−13.
pub fn power_iteration(matrix: &[f64], n: usize) -> Result<(f64, Vec<f64>, usize)> {
    assert_eq!(matrix.len(), n * n, "matrix must be n x n row-major");
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut product = vec![0.0; n];
    let mut rayleigh_prev = f64::NAN;
    let mut last_delta = f64::NAN;
    for iteration in 1..=MAX_ITERATIONS {
        for (i, out) in product.iter_mut().enumerate() {
            let row = &matrix[i * n..(i + 1) * n];
            *out = row.iter().zip(&v).map(|(&a, &x)| a * x).sum();
        }
        let rayleigh: f64 = v.iter().zip(&product).map(|(&x, &y)| x * y).sum();
        let norm = product.iter().map(|&x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::invalid("power iteration hit the zero vector"));
        }
        for (x, &y) in v.iter_mut().zip(&product) {
            *x = y / norm;
        }
        last_delta = (rayleigh - rayleigh_prev).abs();
        if last_delta < RAYLEIGH_TOL {
            return Ok((rayleigh, v, iteration));
        }
        rayleigh_prev = rayleigh;
    }
    Err(Error::PowerIterationDiverged {
        iterations: MAX_ITERATIONS,
        last_delta,
        last_value: rayleigh_prev,
    })
}

/// Closed-form approximation λ̂₁(h) of the one-step eigenvalue, h > 0:
/// Φ(h) + φ(h)/h − φ(h)[φ(h) + hΦ(h)] / [Φ(h) − e^{−h²/2}/2].
pub fn lambda1_closed(h: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::invalid(format!(
            "closed-form lambda1 requires h > 0 (it contains phi(h)/h), got {h}"
        )));
    }
    let phi = normal::pdf(h);
    let cap = normal::cdf(h);
    Ok(cap + phi / h - phi * (phi + h * cap) / (cap - 0.5 * (-0.5 * h * h).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn rank_one_kernel_has_eigenvalue_equal_to_mass() {
        // K(x→z) = g(z) constant in x: the operator is rank one with
        // eigenvalue ∫ g over the interval.
        let rule = gauss_legendre(80, -3.0, 1.0).unwrap();
        let op = DiscretizedOperator::from_kernel_fn(rule.clone(), |_x, z| Ok(normal::pdf(z)))
            .unwrap();
        let eig = dominant_eigen_of(&op).unwrap();
        let mass = rule.integrate(normal::pdf);
        assert_relative_eq!(eig.value, mass, max_relative = 1e-12);
    }

    #[test]
    fn two_step_eigenvalue_matches_printed_table() {
        let rule = gauss_legendre(300, -8.0, 1.0).unwrap();
        let eig = dominant_eigen(KernelId::TwoStepConditional, 1.0, &rule, 1e-8).unwrap();
        assert_abs_diff_eq!(eig.value, 0.563246, epsilon = 1e-5);

        let rule = gauss_legendre(300, -8.0, 2.0).unwrap();
        let eig = dominant_eigen(KernelId::TwoStepConditional, 2.0, &rule, 1e-8).unwrap();
        assert_abs_diff_eq!(eig.value, 0.879719, epsilon = 1e-5);
    }

    #[test]
    fn eigen_density_is_normalized_and_nonnegative() {
        let rule = gauss_legendre(200, -8.0, 0.5).unwrap();
        let eig = dominant_eigen(KernelId::TwoStepConditional, 0.5, &rule, 1e-8).unwrap();
        let mass: f64 = eig
            .density
            .iter()
            .zip(rule.weights())
            .map(|(&p, &w)| p * w)
            .sum();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-12);
        assert!(eig.density.iter().all(|&p| p >= -1e-10));
    }

    #[test]
    fn eigenvalue_invariant_under_similarity() {
        let rule = gauss_legendre(150, -8.0, 1.0).unwrap();
        let op = discretize(KernelId::TwoStepConditional, 1.0, &rule, 1e-8).unwrap();
        let n = op.len();
        let (from_m, _, _) = power_iteration(&op.symmetrized(), n).unwrap();
        let (from_ad, _, _) = power_iteration(&op.weighted(), n).unwrap();
        assert_abs_diff_eq!(from_m, from_ad, epsilon = 1e-12);
    }

    #[test]
    fn eigen_residual_is_small_at_convergence() {
        let rule = gauss_legendre(200, -8.0, 1.5).unwrap();
        let op = discretize(KernelId::TwoStepConditional, 1.5, &rule, 1e-8).unwrap();
        let n = op.len();
        let m = op.symmetrized();
        let mut mt = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                mt[j * n + i] = m[i * n + j];
            }
        }
        let (value, v, _) = power_iteration(&mt, n).unwrap();
        let mut residual: f64 = 0.0;
        let mut vmax: f64 = 0.0;
        for i in 0..n {
            let mv: f64 = mt[i * n..(i + 1) * n]
                .iter()
                .zip(&v)
                .map(|(&a, &x)| a * x)
                .sum();
            residual = residual.max((mv - value * v[i]).abs());
            vmax = vmax.max(v[i].abs());
        }
        assert!(residual / vmax < 1e-10, "residual {residual}, vmax {vmax}");
    }

    #[test]
    fn one_step_eigenvalue_is_near_closed_form() {
        for h in [0.5, 1.0, 2.0, 4.0] {
            let rule = gauss_legendre(300, -8.0, h).unwrap();
            let nystrom = dominant_eigen(KernelId::OneStep, h, &rule, 1e-8).unwrap().value;
            let closed = lambda1_closed(h).unwrap();
            assert!(
                (nystrom - closed).abs() < 5e-3,
                "h={h}: nystrom {nystrom} vs closed {closed}"
            );
        }
    }

    #[test]
    fn lambda1_closed_matches_printed_table() {
        assert_abs_diff_eq!(lambda1_closed(1.0).unwrap(), 0.596156, epsilon = 1e-5);
        assert_abs_diff_eq!(lambda1_closed(2.0).unwrap(), 0.885025, epsilon = 1e-5);
        assert_abs_diff_eq!(lambda1_closed(4.0).unwrap(), 0.999466, epsilon = 1e-5);
    }

    #[test]
    fn lambda1_closed_rejects_nonpositive_h() {
        assert!(lambda1_closed(0.0).is_err());
        assert!(lambda1_closed(-1.0).is_err());
        assert!(lambda1_closed(f64::NAN).is_err());
    }

    #[test]
    fn nystrom_is_stable_under_refinement() {
        let h = 1.0;
        let coarse = dominant_eigen(
            KernelId::TwoStepConditional,
            h,
            &gauss_legendre(200, -8.0, h).unwrap(),
            1e-8,
        )
        .unwrap()
        .value;
        let fine = dominant_eigen(
            KernelId::TwoStepConditional,
            h,
            &gauss_legendre(400, -8.0, h).unwrap(),
            1e-8,
        )
        .unwrap()
        .value;
        assert!((coarse - fine).abs() < 1e-9, "{coarse} vs {fine}");
        let wider = dominant_eigen(
            KernelId::TwoStepConditional,
            h,
            &gauss_legendre(300, -10.0, h).unwrap(),
            1e-8,
        )
        .unwrap()
        .value;
        let base = dominant_eigen(
            KernelId::TwoStepConditional,
            h,
            &gauss_legendre(300, -8.0, h).unwrap(),
            1e-8,
        )
        .unwrap()
        .value;
        assert!((wider - base).abs() < 1e-9, "{wider} vs {base}");
    }
}
