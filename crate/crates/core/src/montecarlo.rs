//! Grid-based path simulation of the Slepian process and the three comparison
//! stationary Gaussian processes, with boundary non-crossing estimation.
//!
//! Replications draw from independent counter-based RNG streams keyed by
//! (seed, replication index), so estimates are reproducible for a fixed seed
//! regardless of how the replications are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Which stationary Gaussian process to simulate.
///
/// All four have mean 0, variance 1 and correlation slope −1 at 0⁺.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessSpec {
    /// S(t) = W(t) − W(t+1); triangular correlation max{0, 1−|t|}.
    Slepian,
    /// Ornstein-Uhlenbeck with correlation e^{−|t|}.
    OrnsteinUhlenbeck,
    /// ξ₂(t) = [(1+a)W(t+2α) − aW(t+α) − W(t)] / √(1+a+a²), a > 0,
    /// α = (1+a+a²)/(2+2a+a²); correlation supported on [−2α, 2α].
    BrokenA { a: f64 },
    /// ξ₃(t) = [W(t+1) + cW(t+(c+1)β) − cW(t+β) − W(t)] / √(1+c²), c ≥ 1,
    /// β = 1/(c+2); correlation supported on [−1, 1].
    BrokenC { c: f64 },
}

impl ProcessSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ProcessSpec::BrokenA { a } if !(a.is_finite() && a > 0.0) => Err(Error::invalid(
                format!("broken-line parameter a must be positive, got {a}"),
            )),
            ProcessSpec::BrokenC { c } if !(c.is_finite() && c >= 1.0) => Err(Error::invalid(
                format!("broken-line parameter c must be >= 1, got {c}"),
            )),
            _ => Ok(()),
        }
    }

    /// α = (1+a+a²)/(2+2a+a²), recomputed from a.
    pub fn alpha(a: f64) -> f64 {
        (1.0 + a + a * a) / (2.0 + 2.0 * a + a * a)
    }

    /// β = 1/(c+2), recomputed from c.
    pub fn beta(c: f64) -> f64 {
        1.0 / (c + 2.0)
    }

    /// Length of Wiener history needed beyond the horizon.
    pub fn span(&self) -> f64 {
        match *self {
            ProcessSpec::Slepian | ProcessSpec::BrokenC { .. } => 1.0,
            ProcessSpec::OrnsteinUhlenbeck => 0.0,
            ProcessSpec::BrokenA { a } => 2.0 * Self::alpha(a),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ProcessSpec::Slepian => "slepian",
            ProcessSpec::OrnsteinUhlenbeck => "ou",
            ProcessSpec::BrokenA { .. } => "broken-a",
            ProcessSpec::BrokenC { .. } => "broken-c",
        }
    }
}

/// Correlation function ρ(t) of the process.
pub fn rho(spec: ProcessSpec, t: f64) -> f64 {
    let t = t.abs();
    match spec {
        ProcessSpec::Slepian => (1.0 - t).max(0.0),
        ProcessSpec::OrnsteinUhlenbeck => (-t).exp(),
        ProcessSpec::BrokenA { a } => {
            let alpha = ProcessSpec::alpha(a);
            if t <= alpha {
                1.0 - t
            } else if t <= 2.0 * alpha {
                (1.0 + a) * (2.0 * alpha - t) / (1.0 + a + a * a)
            } else {
                0.0
            }
        }
        ProcessSpec::BrokenC { c } => {
            let beta = ProcessSpec::beta(c);
            let denom = 1.0 + c * c;
            if t <= beta {
                1.0 - t
            } else if t <= c * beta {
                (1.0 + c) * (1.0 + c * c * beta - t * (1.0 + c)) / denom
            } else if t <= (c + 1.0) * beta {
                (1.0 + c + c * c * beta - t * (1.0 + 2.0 * c)) / denom
            } else if t <= 1.0 {
                (1.0 - t) / denom
            } else {
                0.0
            }
        }
    }
}

/// Simulation parameters: horizon T, level h, grid spacing δ, replication
/// count and the RNG seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub horizon: f64,
    pub level: f64,
    pub step: f64,
    pub reps: u64,
    pub seed: u64,
}

impl McConfig {
    pub fn new(horizon: f64, level: f64, step: f64, reps: u64, seed: u64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::invalid(format!("grid step must be positive, got {step}")));
        }
        if reps == 0 {
            return Err(Error::invalid("replication count must be at least 1"));
        }
        if !(horizon.is_finite() && horizon >= step) {
            return Err(Error::invalid(format!(
                "horizon must be at least one step, got T={horizon}, step={step}"
            )));
        }
        Ok(Self {
            horizon,
            level,
            step,
            reps,
            seed,
        })
    }
}

/// A proportion estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub reps: u64,
}

impl McEstimate {
    fn from_counts(successes: u64, reps: u64) -> Self {
        let p_hat = successes as f64 / reps as f64;
        McEstimate {
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / reps as f64).sqrt(),
            reps,
        }
    }
}

/// Ratio estimate λ̂ = F̂_j / F̂_{j−1} with the paired (conditional-binomial)
/// standard error, and Λ̂ = −log λ̂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaEstimate {
    pub lambda_hat: f64,
    pub big_lambda_hat: f64,
    pub stderr_lambda: f64,
    pub stderr_big_lambda: f64,
    /// Paths below h on [0, j−1].
    pub surviving_prev: u64,
    /// Paths below h on [0, j].
    pub surviving_full: u64,
    pub reps: u64,
}

/// Reusable per-worker path storage.
#[derive(Default)]
struct Scratch {
    w: Vec<f64>,
}

/// Index offsets of the Wiener combination forming the process on the grid.
#[derive(Clone, Copy)]
enum GridProcess {
    Slepian { unit: usize },
    Ou { rho: f64, noise: f64 },
    BrokenA { i1: usize, i2: usize, a: f64, norm: f64 },
    BrokenC { unit: usize, j1: usize, j2: usize, c: f64, norm: f64 },
}

impl GridProcess {
    fn plan(spec: ProcessSpec, step: f64) -> Self {
        let idx = |t: f64| (t / step).round() as usize;
        match spec {
            ProcessSpec::Slepian => GridProcess::Slepian { unit: idx(1.0) },
            ProcessSpec::OrnsteinUhlenbeck => GridProcess::Ou {
                rho: (-step).exp(),
                noise: (1.0 - (-2.0 * step).exp()).sqrt(),
            },
            ProcessSpec::BrokenA { a } => {
                let alpha = ProcessSpec::alpha(a);
                GridProcess::BrokenA {
                    i1: idx(alpha),
                    i2: idx(2.0 * alpha),
                    a,
                    norm: (1.0 + a + a * a).sqrt().recip(),
                }
            }
            ProcessSpec::BrokenC { c } => {
                let beta = ProcessSpec::beta(c);
                GridProcess::BrokenC {
                    unit: idx(1.0),
                    j1: idx(beta),
                    j2: idx((c + 1.0) * beta),
                    c,
                    norm: (1.0 + c * c).sqrt().recip(),
                }
            }
        }
    }

    fn span_steps(&self) -> usize {
        match *self {
            GridProcess::Slepian { unit } => unit,
            GridProcess::Ou { .. } => 0,
            GridProcess::BrokenA { i2, .. } => i2,
            GridProcess::BrokenC { unit, .. } => unit,
        }
    }

    fn value(&self, w: &[f64], k: usize) -> f64 {
        match *self {
            GridProcess::Slepian { unit } => w[k] - w[k + unit],
            GridProcess::Ou { .. } => unreachable!("OU paths bypass the Wiener grid"),
            GridProcess::BrokenA { i1, i2, a, norm } => {
                ((1.0 + a) * w[k + i2] - a * w[k + i1] - w[k]) * norm
            }
            GridProcess::BrokenC { unit, j1, j2, c, norm } => {
                (w[k + unit] + c * w[k + j2] - c * w[k + j1] - w[k]) * norm
            }
        }
    }
}

/// First grid index k with process value ≥ h, or None if the path stays below
/// h on all of 0..=n_steps. Wiener increments are generated lazily so a
/// crossing stops the replication early.
fn first_crossing(
    plan: &GridProcess,
    h: f64,
    n_steps: usize,
    step: f64,
    rng: &mut impl Rng,
    scratch: &mut Scratch,
) -> Option<usize> {
    if let GridProcess::Ou { rho, noise } = *plan {
        let mut x: f64 = rng.sample(StandardNormal);
        if x >= h {
            return Some(0);
        }
        for k in 1..=n_steps {
            let z: f64 = rng.sample(StandardNormal);
            x = rho * x + noise * z;
            if x >= h {
                return Some(k);
            }
        }
        return None;
    }

    let span = plan.span_steps();
    let total = n_steps + span;
    let sqrt_step = step.sqrt();
    let w = &mut scratch.w;
    w.clear();
    w.resize(total + 1, 0.0);
    let mut current = 0.0;
    for m in 0..=total {
        if m > 0 {
            let z: f64 = rng.sample(StandardNormal);
            current += sqrt_step * z;
        }
        w[m] = current;
        if m >= span {
            let k = m - span;
            if plan.value(w, k) >= h {
                return Some(k);
            }
        }
    }
    None
}

/// True iff the simulated path stays strictly below cfg.level on the whole
/// grid over [0, cfg.horizon].
pub fn simulate_max_indicator(
    spec: ProcessSpec,
    cfg: &McConfig,
    rng: &mut impl Rng,
) -> bool {
    let plan = GridProcess::plan(spec, cfg.step);
    let n_steps = (cfg.horizon / cfg.step).round() as usize;
    let mut scratch = Scratch::default();
    first_crossing(&plan, cfg.level, n_steps, cfg.step, rng, &mut scratch).is_none()
}

/// Process values on the grid 0, δ, …, T (no early exit).
pub fn sample_path(spec: ProcessSpec, cfg: &McConfig, rng: &mut impl Rng) -> Vec<f64> {
    let plan = GridProcess::plan(spec, cfg.step);
    let n_steps = (cfg.horizon / cfg.step).round() as usize;
    if let GridProcess::Ou { rho, noise } = plan {
        let mut out = Vec::with_capacity(n_steps + 1);
        let mut x: f64 = rng.sample(StandardNormal);
        out.push(x);
        for _ in 1..=n_steps {
            let z: f64 = rng.sample(StandardNormal);
            x = rho * x + noise * z;
            out.push(x);
        }
        return out;
    }
    let span = plan.span_steps();
    let total = n_steps + span;
    let sqrt_step = cfg.step.sqrt();
    let mut w = Vec::with_capacity(total + 1);
    let mut current = 0.0;
    w.push(current);
    for _ in 1..=total {
        let z: f64 = rng.sample(StandardNormal);
        current += sqrt_step * z;
        w.push(current);
    }
    (0..=n_steps).map(|k| plan.value(&w, k)).collect()
}

fn stream(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// Monte Carlo estimate of F_T(h): the proportion of replications whose path
/// stays below h on [0, T].
pub fn estimate_f(spec: ProcessSpec, cfg: &McConfig) -> Result<McEstimate> {
    spec.validate()?;
    let plan = GridProcess::plan(spec, cfg.step);
    let n_steps = (cfg.horizon / cfg.step).round() as usize;
    let successes = (0..cfg.reps)
        .into_par_iter()
        .map_init(Scratch::default, |scratch, rep| {
            let mut rng = stream(cfg.seed, rep);
            u64::from(
                first_crossing(&plan, cfg.level, n_steps, cfg.step, &mut rng, scratch).is_none(),
            )
        })
        .sum();
    Ok(McEstimate::from_counts(successes, cfg.reps))
}

/// Ratio estimator of Λ(h) from paired horizons: Λ̂ = −log(F̂_j / F̂_{j−1}),
/// with both indicators read off the same replication path so the ratio is a
/// conditional proportion. `cfg.horizon` is ignored; j sets it.
pub fn estimate_lambda(
    spec: ProcessSpec,
    h: f64,
    j: u32,
    cfg: &McConfig,
) -> Result<LambdaEstimate> {
    spec.validate()?;
    if j < 2 {
        return Err(Error::invalid(format!("ratio estimator needs j >= 2, got {j}")));
    }
    let plan = GridProcess::plan(spec, cfg.step);
    let full_steps = (f64::from(j) / cfg.step).round() as usize;
    let prev_steps = (f64::from(j - 1) / cfg.step).round() as usize;
    let (surviving_prev, surviving_full) = (0..cfg.reps)
        .into_par_iter()
        .map_init(Scratch::default, |scratch, rep| {
            let mut rng = stream(cfg.seed, rep);
            match first_crossing(&plan, h, full_steps, cfg.step, &mut rng, scratch) {
                None => (1u64, 1u64),
                Some(k) if k > prev_steps => (1, 0),
                Some(_) => (0, 0),
            }
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));

    if surviving_prev == 0 || surviving_full == 0 {
        let horizon = if surviving_prev == 0 { j - 1 } else { j };
        return Err(Error::DegenerateRatio {
            horizon: f64::from(horizon),
            reps: cfg.reps,
        });
    }
    let lambda_hat = surviving_full as f64 / surviving_prev as f64;
    let stderr_lambda = (lambda_hat * (1.0 - lambda_hat) / surviving_prev as f64).sqrt();
    Ok(LambdaEstimate {
        lambda_hat,
        big_lambda_hat: -lambda_hat.ln(),
        stderr_lambda,
        stderr_big_lambda: stderr_lambda / lambda_hat,
        surviving_prev,
        surviving_full,
        reps: cfg.reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const SPECS: [ProcessSpec; 4] = [
        ProcessSpec::Slepian,
        ProcessSpec::OrnsteinUhlenbeck,
        ProcessSpec::BrokenA { a: 1.0 },
        ProcessSpec::BrokenC { c: 1.0 },
    ];

    #[test]
    fn spec_validation() {
        assert!(ProcessSpec::BrokenA { a: 0.0 }.validate().is_err());
        assert!(ProcessSpec::BrokenC { c: 0.5 }.validate().is_err());
        assert!(ProcessSpec::BrokenA { a: 2.5 }.validate().is_ok());
        assert!(ProcessSpec::BrokenC { c: 1.0 }.validate().is_ok());
    }

    #[test]
    fn mc_config_validation() {
        assert!(McConfig::new(2.0, 1.0, 0.0, 10, 1).is_err());
        assert!(McConfig::new(2.0, 1.0, 0.01, 0, 1).is_err());
        assert!(McConfig::new(0.001, 1.0, 0.01, 10, 1).is_err());
        assert!(McConfig::new(2.0, 1.0, 0.01, 10, 1).is_ok());
    }

    #[test]
    fn rho_is_one_at_zero_and_supported_as_printed() {
        for spec in SPECS {
            assert_eq!(rho(spec, 0.0), 1.0);
        }
        assert_eq!(rho(ProcessSpec::Slepian, 1.0), 0.0);
        assert_eq!(rho(ProcessSpec::BrokenC { c: 1.0 }, 1.0), 0.0);
        let alpha = ProcessSpec::alpha(1.0);
        assert_eq!(rho(ProcessSpec::BrokenA { a: 1.0 }, 2.0 * alpha), 0.0);
        assert!(rho(ProcessSpec::OrnsteinUhlenbeck, 30.0) > 0.0);
    }

    #[test]
    fn rho_slope_at_origin_is_minus_one() {
        let delta = 1e-6;
        for spec in SPECS {
            let slope = (rho(spec, delta) - rho(spec, 0.0)) / delta;
            assert_abs_diff_eq!(slope, -1.0, epsilon = 1e-4);
        }
    }

    #[test]
    fn rho_is_continuous_across_breakpoints() {
        for spec in [ProcessSpec::BrokenA { a: 0.7 }, ProcessSpec::BrokenC { c: 2.3 }] {
            let mut t = 0.0;
            let mut prev = rho(spec, 0.0);
            while t < 1.3 {
                t += 1e-4;
                let next = rho(spec, t);
                assert!((next - prev).abs() < 1e-3, "jump at t={t} for {spec:?}");
                prev = next;
            }
        }
    }

    #[test]
    fn huge_level_never_crosses() {
        let cfg = McConfig::new(2.0, 100.0, 0.05, 200, 7).unwrap();
        for spec in SPECS {
            let est = estimate_f(spec, &cfg).unwrap();
            assert_eq!(est.p_hat, 1.0);
        }
    }

    #[test]
    fn estimates_are_deterministic_for_fixed_seed() {
        let cfg = McConfig::new(1.0, 0.5, 0.02, 5_000, 123).unwrap();
        for spec in SPECS {
            let a = estimate_f(spec, &cfg).unwrap();
            let b = estimate_f(spec, &cfg).unwrap();
            assert_eq!(a, b);
        }
        let l1 = estimate_lambda(ProcessSpec::Slepian, 1.0, 3, &cfg).unwrap();
        let l2 = estimate_lambda(ProcessSpec::Slepian, 1.0, 3, &cfg).unwrap();
        assert_eq!(l1, l2);
    }

    #[test]
    fn stationary_variance_is_unit() {
        // Terminal path value over many replications has variance ~1.
        let cfg = McConfig::new(1.0, f64::INFINITY, 0.05, 1, 42).unwrap();
        for spec in SPECS {
            let n = 100_000u64;
            let (sum, sum_sq) = (0..n)
                .into_par_iter()
                .map(|rep| {
                    let mut rng = stream(42, rep);
                    let path = sample_path(spec, &cfg, &mut rng);
                    let v = *path.last().unwrap();
                    (v, v * v)
                })
                .reduce(|| (0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
            let mean = sum / n as f64;
            let var = sum_sq / n as f64 - mean * mean;
            assert_abs_diff_eq!(var, 1.0, epsilon = 0.02);
        }
    }

    #[test]
    fn slepian_values_one_apart_are_uncorrelated() {
        let cfg = McConfig::new(1.0, f64::INFINITY, 0.05, 1, 99).unwrap();
        let n = 100_000u64;
        let (s_xy, s_x, s_y) = (0..n)
            .into_par_iter()
            .map(|rep| {
                let mut rng = stream(99, rep);
                let path = sample_path(ProcessSpec::Slepian, &cfg, &mut rng);
                let (x, y) = (path[0], *path.last().unwrap());
                (x * y, x, y)
            })
            .reduce(|| (0.0, 0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
        let corr = (s_xy / n as f64) - (s_x / n as f64) * (s_y / n as f64);
        assert_abs_diff_eq!(corr, 0.0, epsilon = 0.02);
    }

    #[test]
    fn slepian_short_horizon_matches_closed_form() {
        // F₁(1) = 0.445730 with a discretization bias that can only inflate
        // the estimate.
        let cfg = McConfig::new(1.0, 1.0, 0.005, 200_000, 2024).unwrap();
        let est = estimate_f(ProcessSpec::Slepian, &cfg).unwrap();
        let expect = 0.445730;
        assert!(
            est.p_hat > expect - 3.0 * est.stderr && est.p_hat < expect + 3.0 * est.stderr + 0.01,
            "p_hat {} vs F1(1) {}",
            est.p_hat,
            expect
        );
    }

    #[test]
    fn coarser_grids_are_biased_upward() {
        let fine = McConfig::new(2.0, 0.8, 0.001, 40_000, 5).unwrap();
        let coarse = McConfig::new(2.0, 0.8, 0.01, 40_000, 5).unwrap();
        let f = estimate_f(ProcessSpec::Slepian, &fine).unwrap();
        let c = estimate_f(ProcessSpec::Slepian, &coarse).unwrap();
        let combined = (f.stderr * f.stderr + c.stderr * c.stderr).sqrt();
        assert!(
            c.p_hat >= f.p_hat - 3.0 * combined,
            "coarse {} fine {}",
            c.p_hat,
            f.p_hat
        );
    }

    #[test]
    fn lambda_estimator_requires_j_at_least_two() {
        let cfg = McConfig::new(3.0, 1.0, 0.05, 100, 1).unwrap();
        assert!(estimate_lambda(ProcessSpec::Slepian, 1.0, 1, &cfg).is_err());
    }

    #[test]
    fn lambda_estimator_degenerates_explicitly() {
        // A level so low that nothing survives produces an explicit error.
        let cfg = McConfig::new(3.0, -6.0, 0.05, 50, 1).unwrap();
        let err = estimate_lambda(ProcessSpec::Slepian, -6.0, 3, &cfg).unwrap_err();
        assert!(matches!(err, Error::DegenerateRatio { .. }));
    }

    #[test]
    fn ou_lambda_near_one_for_small_levels() {
        // Λ₁(h) → 1 as h → 0⁺.
        let cfg = McConfig::new(3.0, 0.1, 0.01, 200_000, 31).unwrap();
        let est = estimate_lambda(ProcessSpec::OrnsteinUhlenbeck, 0.1, 3, &cfg).unwrap();
        assert!(est.big_lambda_hat > 0.8, "Lambda_1(0.1) estimate {}", est.big_lambda_hat);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rho_stays_in_unit_interval(t in -3.0f64..3.0, a in 0.1f64..4.0, c in 1.0f64..4.0) {
            for spec in [
                ProcessSpec::Slepian,
                ProcessSpec::OrnsteinUhlenbeck,
                ProcessSpec::BrokenA { a },
                ProcessSpec::BrokenC { c },
            ] {
                let r = rho(spec, t);
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&r));
                prop_assert!((rho(spec, t) - rho(spec, -t)).abs() < 1e-15);
            }
        }
    }
}
