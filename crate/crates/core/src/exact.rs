//! Boundary non-crossing probabilities of the Slepian process over integer
//! horizons: the closed forms for T = 1, the one-dimensional-integral form of
//! F₂, the determinant representation of Fₙ with its tensor-product
//! quadrature, and the one- and two-step transition kernels.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::normal::{self, KuvArgs};
use crate::quadrature::{gauss_legendre, QuadratureRule};
use crate::tuning::Tuning;

/// Largest supported number of unit steps (cost guard).
pub const MAX_STEPS: usize = 5;

// Determinant matrices are (n+1) x (n+1) with n <= MAX_STEPS.
const MAX_DIM: usize = MAX_STEPS + 1;

/// Context of the determinant integrand: T = n unit steps, level h, start
/// value x = S(0) with x < h.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetContext {
    n: usize,
    h: f64,
    x: f64,
}

impl DetContext {
    pub fn new(n: usize, h: f64, x: f64) -> Result<Self> {
        if n == 0 || n > MAX_STEPS {
            return Err(Error::invalid(format!(
                "step count must be in 1..={MAX_STEPS}, got {n}"
            )));
        }
        if !(x < h) {
            return Err(Error::invalid(format!(
                "start value must satisfy x < h, got x={x}, h={h}"
            )));
        }
        Ok(Self { n, h, x })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn x(&self) -> f64 {
        self.x
    }
}

/// F₁(h|x) = Φ(h) − [φ(h)/φ(x)] Φ(x); 0 when the start is at or above h.
pub fn f1_given_x(h: f64, x: f64) -> f64 {
    if x >= h {
        return 0.0;
    }
    normal::cdf(h) - normal::pdf(h) / normal::pdf(x) * normal::cdf(x)
}

/// F₁(h) = Φ²(h) − φ(h)[hΦ(h) + φ(h)].
pub fn f1(h: f64) -> f64 {
    let phi = normal::pdf(h);
    let cap = normal::cdf(h);
    cap * cap - phi * (h * cap + phi)
}

/// F₂(h) through the one-dimensional-integral representation.
pub fn f2(h: f64, tuning: &Tuning) -> f64 {
    let rule = tail_rule(tuning);
    let phi = normal::pdf(h);
    let cap = normal::cdf(h);

    let int_sq = rule.integrate(|y| {
        let c = normal::cdf(h - y);
        c * c * normal::pdf(h + y)
    });
    // phi(sqrt(2) h) is constant in y and is kept outside the integral.
    let int_mix = rule.integrate(|y| {
        normal::cdf(h - y) * (normal::cdf(std::f64::consts::SQRT_2 * y) - 0.5)
    });

    cap.powi(3)
        + phi * phi * cap
        + 0.5 * phi * phi * ((h * h - 1.0) * cap + h * phi)
        + int_sq
        - 2.0 * phi * cap * (h * cap + phi)
        - normal::pdf(std::f64::consts::SQRT_2 * h) * int_mix / std::f64::consts::SQRT_2
}

/// Closed-form approximation of F₂(h) built from Lin's Φ and the K/U/J/V
/// integrals, with b = 2h − 0.717.
pub fn f2_hat(h: f64) -> f64 {
    let phi = normal::pdf(h);
    let cap = normal::cdf(h);
    let b = 2.0 * h - 0.717;
    let b1 = b - 0.717;
    let b2 = 2.0 * h;
    let b3 = b + 2.151;
    let b4 = b + 1.434;
    let inv_sqrt_2pi = normal::INV_SQRT_2PI;

    let args = |x: f64, y: f64, z: f64| KuvArgs::new(x, y, z).expect("static coefficients");
    let bracket = 2.0 * normal::j_integral(args(0.916, b, h))
        - 0.5 * normal::j_integral(args(1.332, b1, h))
        - inv_sqrt_2pi * normal::v_integral(args(1.416, b, h))
        + 2.0 * inv_sqrt_2pi * normal::v_integral(args(1.0, b2, h))
        + normal::k_integral(args(1.5, b2, h)) / std::f64::consts::PI
        - 0.5
            * (normal::k_integral(args(1.332, b3, 0.0))
                - 2.0 * inv_sqrt_2pi * normal::u_integral(args(1.416, b4, 0.0)));

    cap.powi(3)
        + phi * phi * cap
        + 0.5 * phi * phi * ((h * h - 1.0) * cap + h * phi)
        - 2.0 * phi * cap * (h * cap + phi)
        + normal::cdf(2.0 * h)
        - cap
        - 0.5 * inv_sqrt_2pi * (-2.0 * h * h).exp() * bracket
}

/// Exact F₂(h|x₀) for x₀ ≤ 0 through two semi-infinite integrals.
pub fn f2_given_x(h: f64, x0: f64, tuning: &Tuning) -> Result<f64> {
    if x0 > 0.0 {
        return Err(Error::invalid(format!(
            "the F2(h|x0) expression is stated for x0 <= 0, got {x0}"
        )));
    }
    let rule = tail_rule(tuning);
    let phi_h = normal::pdf(h);
    let cap_h = normal::cdf(h);
    let phi_x0 = normal::pdf(x0);
    let cap_x0 = normal::cdf(x0);

    // y = h + u maps both integrals over (h, inf) onto the tail rule.
    let int_a = rule.integrate(|u| {
        normal::pdf(h + u) * normal::cdf(h - u) * normal::pdf(x0 - u)
    });
    let int_b = rule.integrate(|u| {
        normal::cdf(x0 - u) * normal::pdf(h - u) * normal::pdf(h + u)
    });

    Ok(cap_h * cap_h + (phi_h * phi_h * x0 * cap_x0 - phi_h * cap_h * cap_x0 + int_a - int_b)
        / phi_x0
        - h * phi_h * cap_h)
}

/// Closed-form approximation of F₂(h|x₀) for x₀ ≤ 0.
pub fn f2_given_x_hat(h: f64, x0: f64) -> Result<f64> {
    if x0 > 0.0 {
        return Err(Error::invalid(format!(
            "the F2(h|x0) approximation is stated for x0 <= 0, got {x0}"
        )));
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    let phi_h = normal::pdf(h);
    let cap_h = normal::cdf(h);
    let phi_x0 = normal::pdf(x0);
    let cap_x0 = normal::cdf(x0);
    let s = h + x0;

    let args = |y: f64, z: f64| KuvArgs::new(1.416, y, z).expect("static coefficients");
    let head = cap_h * cap_h + phi_h * phi_h * x0 * cap_x0 / phi_x0
        - phi_h * cap_h * cap_x0 / phi_x0
        - h * phi_h * cap_h;

    let middle = normal::pdf(s / sqrt2) / (sqrt2 * phi_x0)
        * (normal::cdf(2.0 * h * sqrt2 - s / sqrt2) - normal::cdf(h * sqrt2 - s / sqrt2));

    let y_plus = 2.664 * h + x0 + 0.717;
    let y_minus = 2.664 * h + x0 - 0.717;
    let curly = (-1.434 * h).exp()
        * (normal::k_integral(args(y_plus, 2.0 * h)) - normal::k_integral(args(y_plus, h)))
        - (1.434 * h).exp()
            * (normal::k_integral(args(y_minus, f64::INFINITY))
                - normal::k_integral(args(y_minus, 2.0 * h)));
    let tail_a = normal::pdf(s) / (2.0 * (2.0 * std::f64::consts::PI).sqrt() * phi_x0)
        * (-1.664 * h * h).exp()
        * curly;

    let y_last = 2.0 * h + 0.832 * s - 0.717;
    let tail_b = (0.717 * s - 2.0 * h * h - 0.416 * s * s).exp()
        / (2.0 * phi_x0 * 2.0 * std::f64::consts::PI)
        * (normal::k_integral(args(y_last, f64::INFINITY)) - normal::k_integral(args(y_last, h)));

    Ok(head + middle - tail_a - tail_b)
}

/// One-step transition kernel p⁽¹⁾_h(x→z) = φ(z)[1 − e^{−(h−z)(h−x)}].
pub fn kernel_p1(h: f64, x: f64, z: f64) -> f64 {
    normal::pdf(z) * (1.0 - (-(h - z) * (h - x)).exp())
}

/// Non-normalized density of S(1) below h: p₁(z) = Φ(h)φ(z) − Φ(z)φ(h).
pub fn p1_density(h: f64, z: f64) -> f64 {
    normal::cdf(h) * normal::pdf(z) - normal::cdf(z) * normal::pdf(h)
}

/// Two-step conditional transition density q_h(x→z), a 3x3 determinant over
/// p₁(x). The denominator vanishes as x → h⁻, so x must stay at least
/// `eps_guard` below h.
pub fn kernel_q(h: f64, x: f64, z: f64, eps_guard: f64) -> Result<f64> {
    if x >= h - eps_guard {
        return Err(Error::invalid(format!(
            "two-step kernel needs x < h - {eps_guard:e}, got x={x}, h={h}"
        )));
    }
    let m = [
        [normal::cdf(h), normal::cdf(x), normal::cdf(x + z - h)],
        [normal::pdf(h), normal::pdf(x), normal::pdf(x + z - h)],
        [normal::pdf(2.0 * h - x), normal::pdf(h), normal::pdf(z)],
    ];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    Ok(det / p1_density(h, x))
}

/// Determinant integrand of the n-step representation: det|φ(sᵢ + aᵢⱼ)| of
/// the (n+1)x(n+1) shift matrix, with s₀ = ctx.x.
pub fn det_integrand(ctx: &DetContext, s: &[f64]) -> f64 {
    assert_eq!(s.len(), ctx.n, "expected {} inner variables", ctx.n);
    let n = ctx.n;
    let h = ctx.h;
    // y_k = k h − (s_0 + … + s_{k−1}); entry (i,j) is φ(y_i − y_{j+1} + h).
    let mut y = [0.0; MAX_DIM + 1];
    y[1] = h - ctx.x;
    for k in 1..=n {
        y[k + 1] = y[k] + h - s[k - 1];
    }
    let mut m = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..=n {
        for j in 0..=n {
            m[i][j] = normal::pdf(y[i] - y[j + 1] + h);
        }
    }
    det_in_place(&mut m, n + 1)
}

/// Fₙ(h|x) by tensor-product Gauss-Legendre quadrature of the determinant
/// integrand over [−c, h]ⁿ, divided by φ(x). The rule supplies the per-axis
/// nodes; raw quadrature value, no clamping.
pub fn f_n_given_x(n: usize, h: f64, x: f64, rule: &QuadratureRule) -> Result<f64> {
    check_steps(n)?;
    if x >= h {
        return Ok(0.0);
    }
    let mut y = [0.0; MAX_DIM + 1];
    y[1] = h - x;
    Ok(tensor_levels_parallel(1, n, h, rule, y) / normal::pdf(x))
}

/// Fₙ(h) = ∫ Fₙ(h|x) φ(x) dx; the outer axis uses the same rule, and φ(x)
/// cancels against the 1/φ(x) of Fₙ(h|x), leaving an (n+1)-fold tensor
/// integral of the determinant.
pub fn f_n(n: usize, h: f64, rule: &QuadratureRule) -> Result<f64> {
    check_steps(n)?;
    let y = [0.0; MAX_DIM + 1];
    Ok(tensor_levels_parallel(0, n, h, rule, y))
}

/// Per-axis rule on [−c, h] for an n-step integral at the tuning's resolution.
pub fn tensor_rule(n: usize, h: f64, tuning: &Tuning) -> Result<QuadratureRule> {
    gauss_legendre(tuning.tensor_nodes(n), -tuning.trunc, h)
}

fn check_steps(n: usize) -> Result<()> {
    if n == 0 || n > MAX_STEPS {
        return Err(Error::invalid(format!(
            "step count must be in 1..={MAX_STEPS}, got {n}"
        )));
    }
    Ok(())
}

fn tail_rule(tuning: &Tuning) -> QuadratureRule {
    gauss_legendre(tuning.tail_nodes, 0.0, tuning.tail_len).expect("static tail interval")
}

/// Integrate levels `level..=n` of the tensor product, parallelized over the
/// first axis. Partial sums are collected per node index and reduced in node
/// order, so the result does not depend on the worker count.
fn tensor_levels_parallel(
    level: usize,
    n: usize,
    h: f64,
    rule: &QuadratureRule,
    y: [f64; MAX_DIM + 1],
) -> f64 {
    if level == n {
        return last_level_sum(n, h, rule, &y);
    }
    let partials: Vec<f64> = rule
        .nodes()
        .par_iter()
        .map(|&s| {
            let mut y_next = y;
            y_next[level + 1] = y[level] + h - s;
            tensor_levels(level + 1, n, h, rule, y_next)
        })
        .collect();
    partials
        .iter()
        .zip(rule.weights())
        .fold(0.0, |acc, (&p, &w)| acc + w * p)
}

fn tensor_levels(level: usize, n: usize, h: f64, rule: &QuadratureRule, y: [f64; MAX_DIM + 1]) -> f64 {
    if level == n {
        return last_level_sum(n, h, rule, &y);
    }
    let mut acc = 0.0;
    for (&s, &w) in rule.nodes().iter().zip(rule.weights()) {
        let mut y_next = y;
        y_next[level + 1] = y[level] + h - s;
        acc += w * tensor_levels(level + 1, n, h, rule, y_next);
    }
    acc
}

/// Innermost axis: only the last matrix column depends on s_n, so the
/// determinant is expanded along it with the n+1 minors precomputed once.
fn last_level_sum(n: usize, h: f64, rule: &QuadratureRule, y: &[f64; MAX_DIM + 1]) -> f64 {
    let dim = n + 1;
    // Row offsets u_i and the fixed columns v_j, j < n.
    let mut u = [0.0; MAX_DIM];
    for (i, ui) in u.iter_mut().enumerate().take(dim) {
        *ui = y[i] + h;
    }
    let mut fixed = [[0.0; MAX_DIM]; MAX_DIM]; // fixed[i][j] = φ(u_i − v_j)
    for i in 0..dim {
        for j in 0..n {
            fixed[i][j] = normal::pdf(u[i] - y[j + 1]);
        }
    }

    // Cofactors along the last column: det = Σ_i (−1)^{i+n} φ(u_i − v_n) M_i.
    let mut cofactor = [0.0; MAX_DIM];
    let mut sub = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..dim {
        let mut r = 0;
        for row in 0..dim {
            if row == i {
                continue;
            }
            sub[r][..n].copy_from_slice(&fixed[row][..n]);
            r += 1;
        }
        let minor = det_in_place(&mut sub, n);
        cofactor[i] = if (i + n) % 2 == 0 { minor } else { -minor };
    }

    let mut acc = 0.0;
    for (&s, &w) in rule.nodes().iter().zip(rule.weights()) {
        let v_last = y[n] + h - s;
        let mut det = 0.0;
        for i in 0..dim {
            det += cofactor[i] * normal::pdf(u[i] - v_last);
        }
        acc += w * det;
    }
    acc
}

/// Determinant by LU with partial pivoting; `m` is clobbered.
fn det_in_place(m: &mut [[f64; MAX_DIM]; MAX_DIM], dim: usize) -> f64 {
    if dim == 0 {
        return 1.0;
    }
    let mut det = 1.0;
    for col in 0..dim {
        let mut pivot = col;
        for row in col + 1..dim {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..dim {
            let factor = m[row][col] / m[col][col];
            for k in col + 1..dim {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    det
}
