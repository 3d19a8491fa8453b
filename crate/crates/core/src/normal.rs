//! Standard-normal primitives and the Gaussian-type integrals used by the
//! closed-form probability expressions.
//!
//! `cdf` is the exact Φ (via the complementary error function); `cdf_lin` is
//! Lin's two-branch exponential approximation and is used only where the
//! closed-form approximations are defined through it.

use crate::error::{Error, Result};

/// 1/√(2π)
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_68;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Standard normal density φ(x) = (2π)^{−1/2} e^{−x²/2}.
#[inline]
pub fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF Φ(x), accurate to ≤1 ulp via erfc.
#[inline]
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// log Φ(x), finite for all finite x (no underflow in the far left tail).
pub fn ln_cdf(x: f64) -> f64 {
    if x >= -1.0 {
        cdf(x).ln()
    } else if x > -37.0 {
        // erfc is still normal here; take the log of the exact value.
        (0.5 * libm::erfc(-x / SQRT_2)).ln()
    } else {
        // Asymptotic expansion of the Mills ratio.
        let t = -x;
        let t2 = t * t;
        let correction = 1.0 - 1.0 / t2 + 3.0 / (t2 * t2) - 15.0 / (t2 * t2 * t2);
        -0.5 * t2 - (t * (2.0 * std::f64::consts::PI).sqrt()).ln() + correction.ln()
    }
}

/// Lin's exponential approximation of Φ, exactly as printed (branch at t ≤ 0).
#[inline]
pub fn cdf_lin(t: f64) -> f64 {
    if t <= 0.0 {
        0.5 * (0.717 * t - 0.416 * t * t).exp()
    } else {
        1.0 - 0.5 * (-0.717 * t - 0.416 * t * t).exp()
    }
}

/// Mean x_h = −φ(h)/Φ(h) of a standard normal truncated to (−∞, h).
#[inline]
pub fn truncated_mean(h: f64) -> f64 {
    -pdf(h) / cdf(h)
}

/// Arguments of the Gaussian-type integrals below: quadratic coefficient
/// `x > 0`, linear coefficient `y`, upper limit `z` (may be +∞).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KuvArgs {
    x: f64,
    y: f64,
    z: f64,
}

impl KuvArgs {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::invalid(format!(
                "quadratic coefficient must be finite and positive, got {x}"
            )));
        }
        if !y.is_finite() {
            return Err(Error::invalid(format!("linear coefficient must be finite, got {y}")));
        }
        if z.is_nan() || z == f64::NEG_INFINITY {
            return Err(Error::invalid(format!("upper limit must be real or +inf, got {z}")));
        }
        Ok(Self { x, y, z })
    }

    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }
}

/// K(x,y,z) = ∫_{−∞}^{z} e^{−xt²+yt} dt
///          = √π e^{y²/(4x)}/√x · Φ((2xz−y)/√(2x)).
///
/// The exponential factor is recombined with the Gaussian tail in log space
/// once y²/(4x) exceeds 700, where the direct product would overflow.
pub fn k_integral(args: KuvArgs) -> f64 {
    let KuvArgs { x, y, z } = args;
    let growth = y * y / (4.0 * x);
    if z == f64::INFINITY {
        if growth > 700.0 {
            return (growth - 0.5 * x.ln()).exp() * SQRT_PI;
        }
        return SQRT_PI * growth.exp() / x.sqrt();
    }
    let arg = (2.0 * x * z - y) / (2.0 * x).sqrt();
    if growth > 700.0 {
        (growth + ln_cdf(arg) - 0.5 * x.ln()).exp() * SQRT_PI
    } else {
        SQRT_PI * growth.exp() / x.sqrt() * cdf(arg)
    }
}

/// U(x,y,z) = ∫_{−∞}^{z} t e^{−xt²+yt} dt = [y K(x,y,z) − e^{z(y−xz)}] / (2x).
pub fn u_integral(args: KuvArgs) -> f64 {
    let KuvArgs { x, y, z } = args;
    let boundary = if z == f64::INFINITY {
        0.0
    } else {
        (z * (y - x * z)).exp()
    };
    (y * k_integral(args) - boundary) / (2.0 * x)
}

/// J(x,y,z) = K(x,y,z) − K(x,y,0).
pub fn j_integral(args: KuvArgs) -> f64 {
    let at_zero = KuvArgs { z: 0.0, ..args };
    k_integral(args) - k_integral(at_zero)
}

/// V(x,y,z) = U(x,y,z) − U(x,y,0).
pub fn v_integral(args: KuvArgs) -> f64 {
    let at_zero = KuvArgs { z: 0.0, ..args };
    u_integral(args) - u_integral(at_zero)
}
