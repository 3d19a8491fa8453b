//! The approximation family A0-A8 for λ(h), Λ(h) and F_T(h), the rigorous
//! bounds derived from Fₙ, the relative-error table and the large-h
//! expansions.

use std::fmt;
use std::str::FromStr;

use crate::eigen::{self, KernelId};
use crate::error::{Error, Result};
use crate::exact;
use crate::normal;
use crate::quadrature::gauss_legendre;
use crate::tuning::Tuning;

/// Identifier of one approximation of Shepp's constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ApproximationId {
    A0,
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
}

impl ApproximationId {
    pub const ALL: [ApproximationId; 9] = [
        Self::A0,
        Self::A1,
        Self::A2,
        Self::A3,
        Self::A4,
        Self::A5,
        Self::A6,
        Self::A7,
        Self::A8,
    ];

    pub fn index(self) -> usize {
        match self {
            Self::A0 => 0,
            Self::A1 => 1,
            Self::A2 => 2,
            Self::A3 => 3,
            Self::A4 => 4,
            Self::A5 => 5,
            Self::A6 => 6,
            Self::A7 => 7,
            Self::A8 => 8,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Horizon the prefix probability is anchored at: F_T ≈ F_k · λ^{T−k}.
    pub fn anchor(self) -> u32 {
        match self {
            Self::A0 => 0,
            Self::A1 => 1,
            Self::A2 | Self::A3 | Self::A4 | Self::A5 => 2,
            Self::A6 => 3,
            Self::A7 => 4,
            Self::A8 => 5,
        }
    }
}

impl fmt::Display for ApproximationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}", self.index())
    }
}

impl FromStr for ApproximationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let digit = trimmed
            .strip_prefix(['A', 'a'])
            .unwrap_or(trimmed)
            .parse::<usize>()
            .map_err(|_| Error::invalid(format!("unknown approximation id {s:?}")))?;
        Self::from_index(digit).ok_or_else(|| Error::invalid(format!("unknown approximation id {s:?}")))
    }
}

/// One evaluated approximation: λ in (0,1], Λ = −log λ, and the resolution it
/// was computed at.
#[derive(Debug, Clone, PartialEq)]
pub struct SheppResult {
    pub h: f64,
    pub id: ApproximationId,
    pub lambda: f64,
    pub big_lambda: f64,
    pub meta: EvalMeta,
}

/// Resolution parameters recorded with each result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalMeta {
    pub tensor_nodes: Option<usize>,
    pub eigen_nodes: Option<usize>,
    pub trunc: f64,
}

/// Rigorous bracket on Λ(h) from one Fₙ value:
/// −log Fₙ/(n+1) ≤ Λ(h) ≤ −log Fₙ/n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsResult {
    pub n: usize,
    pub h: f64,
    pub lower: f64,
    pub upper: f64,
}

/// λ⁽ⁱ⁾(h) for the requested approximation.
pub fn lambda_approx(id: ApproximationId, h: f64, tuning: &Tuning) -> Result<SheppResult> {
    let lambda = lambda_value(id, h, tuning).map_err(|e| e.tag(id, h))?;
    Ok(SheppResult {
        h,
        id,
        lambda,
        big_lambda: -lambda.ln(),
        meta: meta_for(id, tuning),
    })
}

/// Λ⁽ⁱ⁾(h) = −log λ⁽ⁱ⁾(h).
pub fn big_lambda_approx(id: ApproximationId, h: f64, tuning: &Tuning) -> Result<f64> {
    Ok(lambda_approx(id, h, tuning)?.big_lambda)
}

/// F_T(h) ≈ F_k(h) · λ⁽ⁱ⁾(h)^{T−k} with k the id's anchor; T ≥ k, T real.
pub fn f_t_approx(id: ApproximationId, t: f64, h: f64, tuning: &Tuning) -> Result<f64> {
    let anchor = f64::from(id.anchor());
    if t < anchor {
        return Err(Error::invalid(format!(
            "approximation {id} anchors at T={anchor}; got T={t}"
        ))
        .tag(id, h));
    }
    let result = lambda_approx(id, h, tuning)?;
    let prefix = prefix_probability(id, h, tuning).map_err(|e| e.tag(id, h))?;
    Ok(prefix * result.lambda.powf(t - anchor))
}

/// Lower/upper bracket on Λ(h) from Fₙ(h), 1 ≤ n ≤ 4.
pub fn bounds(n: usize, h: f64, tuning: &Tuning) -> Result<BoundsResult> {
    if n == 0 || n > 4 {
        return Err(Error::invalid(format!("bounds need 1 <= n <= 4, got {n}")));
    }
    let rule = exact::tensor_rule(n, h, tuning)?;
    let log_fn = exact::f_n(n, h, &rule)?.ln();
    Ok(BoundsResult {
        n,
        h,
        lower: -log_fn / (n as f64 + 1.0),
        upper: -log_fn / n as f64,
    })
}

/// Relative errors λ⁽ⁱ⁾(h)/λ⁽⁷⁾(h) − 1 for i = 0..6 over a grid of h values.
pub fn relative_errors(h_grid: &[f64], tuning: &Tuning) -> Result<Vec<(ApproximationId, Vec<f64>)>> {
    let reference: Vec<f64> = h_grid
        .iter()
        .map(|&h| Ok(lambda_approx(ApproximationId::A7, h, tuning)?.lambda))
        .collect::<Result<_>>()?;
    let mut table = Vec::new();
    for id in &ApproximationId::ALL[..7] {
        let mut row = Vec::with_capacity(h_grid.len());
        for (&h, &lambda7) in h_grid.iter().zip(&reference) {
            let lambda = lambda_approx(*id, h, tuning)?.lambda;
            row.push(lambda / lambda7 - 1.0);
        }
        table.push((*id, row));
    }
    Ok(table)
}

/// Large-h expansion F₁(h) ≈ 1 − (h + 2/h) φ(h).
pub fn asympt_f1(h: f64) -> f64 {
    1.0 - (h + 2.0 / h) * normal::pdf(h)
}

/// Large-h expansion F₂(h) ≈ 1 − (2h − 4 − 2/h) φ(h).
pub fn asympt_f2(h: f64) -> f64 {
    1.0 - (2.0 * h - 4.0 - 2.0 / h) * normal::pdf(h)
}

/// Large-h expansion Λ⁽⁴⁾(h) ≈ (h − 4 − 4/h) φ(h).
pub fn asympt_big_lambda4(h: f64) -> f64 {
    (h - 4.0 - 4.0 / h) * normal::pdf(h)
}

fn lambda_value(id: ApproximationId, h: f64, tuning: &Tuning) -> Result<f64> {
    match id {
        ApproximationId::A0 => Ok((-h * normal::pdf(h)).exp()),
        ApproximationId::A1 => eigen::lambda1_closed(h),
        ApproximationId::A2 => {
            let rule = gauss_legendre(tuning.eigen_nodes, -tuning.trunc, h)?;
            Ok(eigen::dominant_eigen(KernelId::TwoStepConditional, h, &rule, tuning.eps_guard)?.value)
        }
        ApproximationId::A3 => {
            let x = normal::truncated_mean(h);
            Ok(exact::f2_given_x(h, x, tuning)? / exact::f1_given_x(h, x))
        }
        ApproximationId::A4 => Ok(exact::f2(h, tuning) / exact::f1(h)),
        ApproximationId::A5 => conditional_ratio(3, h, tuning),
        ApproximationId::A6 => conditional_ratio(4, h, tuning),
        ApproximationId::A7 => marginal_ratio(4, h, tuning),
        ApproximationId::A8 => {
            if !tuning.allow_expensive {
                return Err(Error::ExpensiveGated("approximation A8 (F5/F4)"));
            }
            marginal_ratio(5, h, tuning)
        }
    }
}

/// Fₙ(h|x_h) / Fₙ₋₁(h|x_h), both at the resolution of the n-step rule.
fn conditional_ratio(n: usize, h: f64, tuning: &Tuning) -> Result<f64> {
    let x = normal::truncated_mean(h);
    let rule = exact::tensor_rule(n, h, tuning)?;
    let numer = exact::f_n_given_x(n, h, x, &rule)?;
    let denom = exact::f_n_given_x(n - 1, h, x, &rule)?;
    Ok(numer / denom)
}

/// Fₙ(h) / Fₙ₋₁(h), the denominator at its own (cheaper) resolution.
fn marginal_ratio(n: usize, h: f64, tuning: &Tuning) -> Result<f64> {
    let rule_n = exact::tensor_rule(n, h, tuning)?;
    let rule_prev = exact::tensor_rule(n - 1, h, tuning)?;
    Ok(exact::f_n(n, h, &rule_n)? / exact::f_n(n - 1, h, &rule_prev)?)
}

fn prefix_probability(id: ApproximationId, h: f64, tuning: &Tuning) -> Result<f64> {
    match id.anchor() {
        0 => Ok(1.0),
        1 => Ok(exact::f1(h)),
        2 => Ok(exact::f2(h, tuning)),
        k => {
            let n = k as usize;
            let rule = exact::tensor_rule(n, h, tuning)?;
            exact::f_n(n, h, &rule)
        }
    }
}

fn meta_for(id: ApproximationId, tuning: &Tuning) -> EvalMeta {
    let tensor_nodes = match id {
        ApproximationId::A5 | ApproximationId::A6 => Some(tuning.tensor_nodes(id.anchor() as usize + 1)),
        ApproximationId::A7 => Some(tuning.tensor_nodes(4)),
        ApproximationId::A8 => Some(tuning.tensor_nodes(5)),
        _ => None,
    };
    let eigen_nodes = matches!(id, ApproximationId::A2).then_some(tuning.eigen_nodes);
    EvalMeta {
        tensor_nodes,
        eigen_nodes,
        trunc: tuning.trunc,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn id_parsing_and_display() {
        assert_eq!("A4".parse::<ApproximationId>().unwrap(), ApproximationId::A4);
        assert_eq!("a7".parse::<ApproximationId>().unwrap(), ApproximationId::A7);
        assert_eq!("3".parse::<ApproximationId>().unwrap(), ApproximationId::A3);
        assert!("A9".parse::<ApproximationId>().is_err());
        assert!("".parse::<ApproximationId>().is_err());
        assert_eq!(ApproximationId::A5.to_string(), "A5");
    }

    #[test]
    fn a0_is_exactly_one_at_zero() {
        let tn = Tuning::default();
        let r = lambda_approx(ApproximationId::A0, 0.0, &tn).unwrap();
        assert_eq!(r.lambda, 1.0);
        assert_eq!(r.big_lambda, 0.0);
    }

    #[test]
    fn a4_matches_table_value_at_zero() {
        let tn = Tuning::default();
        let r = lambda_approx(ApproximationId::A4, 0.0, &tn).unwrap();
        assert_abs_diff_eq!(r.lambda, 0.200045, epsilon = 1e-6);
    }

    #[test]
    fn a4_is_exactly_the_ratio_of_exact_module_values() {
        let tn = Tuning::default();
        for h in [0.0, 1.3, 2.8] {
            let r = lambda_approx(ApproximationId::A4, h, &tn).unwrap();
            let direct = exact::f2(h, &tn) / exact::f1(h);
            assert_abs_diff_eq!(r.lambda, direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn lambda_and_big_lambda_are_consistent() {
        let tn = Tuning::default();
        for id in [ApproximationId::A0, ApproximationId::A1, ApproximationId::A3, ApproximationId::A4] {
            for h in [0.5, 1.5, 3.0] {
                let r = lambda_approx(id, h, &tn).unwrap();
                assert_abs_diff_eq!((-r.big_lambda).exp(), r.lambda, epsilon = 1e-14);
                assert!(r.lambda > 0.0 && r.lambda <= 1.0);
            }
        }
    }

    #[test]
    fn a8_is_gated() {
        let tn = Tuning::default();
        let err = lambda_approx(ApproximationId::A8, 0.0, &tn).unwrap_err();
        assert!(matches!(
            err,
            Error::Approximation { id: ApproximationId::A8, .. }
        ));
    }

    #[test]
    fn f_t_anchor_is_enforced() {
        let tn = Tuning::default();
        assert!(f_t_approx(ApproximationId::A4, 1.5, 1.0, &tn).is_err());
        // T equal to the anchor reproduces the prefix probability exactly.
        let f2 = f_t_approx(ApproximationId::A4, 2.0, 1.0, &tn).unwrap();
        assert_abs_diff_eq!(f2, exact::f2(1.0, &tn), epsilon = 1e-15);
    }

    #[test]
    fn f_t_product_form_at_h2() {
        // F₄... uses Table-derived product: F₂(2)·λ⁽⁴⁾(2) for T = 3.
        let tn = Tuning::default();
        let got = f_t_approx(ApproximationId::A4, 3.0, 2.0, &tn).unwrap();
        assert_abs_diff_eq!(got, 0.744845 * 0.879831, epsilon = 1e-5);
    }

    #[test]
    fn bounds_shape_and_printed_remark() {
        let tn = Tuning::default();
        assert!(bounds(0, 1.0, &tn).is_err());
        assert!(bounds(5, 1.0, &tn).is_err());
        let b = bounds(2, 0.0, &tn).unwrap();
        assert_abs_diff_eq!(b.lower, 1.336, epsilon = 1e-3);
        assert_abs_diff_eq!(b.upper, 2.004, epsilon = 1e-3);
        // The two bounds come from one Fₙ value.
        assert_abs_diff_eq!(b.upper / b.lower, 1.5, epsilon = 1e-12);
    }

    #[test]
    fn asymptotics_tend_to_limits() {
        assert_abs_diff_eq!(asympt_f1(40.0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(asympt_f2(40.0), 1.0, epsilon = 1e-12);
        assert!(asympt_big_lambda4(40.0).abs() < 1e-12);
        // Error bound from the remainder order at h = 4.
        let err = (asympt_f1(4.0) - exact::f1(4.0)).abs();
        assert!(err < normal::pdf(4.0) / 64.0 * 3.0, "remainder too large: {err}");
    }
}
