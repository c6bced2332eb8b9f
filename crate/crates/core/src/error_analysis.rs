//! Error: overlap of the actual outgoing state with the fixed-wall
//! idealization `Γ(X)Φ(-x)`.
//!
//! With `λ = Σ²/σ²` the overlap magnitude is
//!
//! `A⁻² = [γ² + δ² + γ²λ + δ²/λ] exp(4(kσ)²λ / (1 + λ))`.
//!
//! Because `γ + δ = 1` the bracket equals `1 + (γλ - δ)²/λ`, which is the form
//! evaluated here; it keeps `1 - A` accurate when the error is tiny.

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::kinematics::CollisionParams;
use crate::optimize::golden_section_min;

/// Overlap between actual and idealized outgoing states at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub lambda: f64,
    pub k_sigma: f64,
    pub delta: f64,
    pub a: f64,
    pub one_minus_a: f64,
}

/// Which asymptotic law describes the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    SmallKSigma,
    Crossover,
    LargeKSigma,
}

impl Regime {
    /// `kσ ≤ 0.1` is small, `kσ ≥ 10` is large.
    pub fn classify(k_sigma: f64) -> Self {
        if k_sigma <= 0.1 {
            Regime::SmallKSigma
        } else if k_sigma >= 10.0 {
            Regime::LargeKSigma
        } else {
            Regime::Crossover
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::SmallKSigma => "small",
            Regime::Crossover => "crossover",
            Regime::LargeKSigma => "large",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The two asymptotic rows of the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Asymptote {
    SmallKSigma,
    LargeKSigma,
}

/// Spread ratio maximizing `A` at fixed `kσ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub lambda_max: f64,
    pub a_max: f64,
    pub one_minus_a: f64,
    pub regime: Regime,
    pub iterations: usize,
}

/// Bracket tolerance in `ln λ`.
pub const LN_LAMBDA_TOL: f64 = 1e-10;
const MAX_ITER: usize = 500;

fn check_inputs(lambda: f64, k_sigma: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(domain(format!("spread ratio lambda must be positive, got {lambda}")));
    }
    if !(k_sigma >= 0.0) || !k_sigma.is_finite() {
        return Err(domain(format!("k*sigma must be non-negative, got {k_sigma}")));
    }
    Ok(())
}

/// `ln(A⁻²)`, non-negative.
pub fn log_inverse_sq_overlap(lambda: f64, k_sigma: f64, params: &CollisionParams) -> Result<f64> {
    check_inputs(lambda, k_sigma)?;
    Ok(log_inverse_sq_unchecked(lambda, k_sigma, params))
}

fn log_inverse_sq_unchecked(lambda: f64, k_sigma: f64, params: &CollisionParams) -> f64 {
    let (d, g) = (params.particle_fraction(), params.wall_fraction());
    let mismatch = g * lambda - d;
    (mismatch * mismatch / lambda).ln_1p() + 4.0 * k_sigma * k_sigma * lambda / (1.0 + lambda)
}

/// Overlap magnitude `A ∈ (0, 1]`.
pub fn overlap_amplitude(lambda: f64, k_sigma: f64, params: &CollisionParams) -> Result<f64> {
    Ok(error_report(lambda, k_sigma, params)?.a)
}

pub fn error_report(lambda: f64, k_sigma: f64, params: &CollisionParams) -> Result<ErrorReport> {
    let log_inv = log_inverse_sq_overlap(lambda, k_sigma, params)?;
    Ok(ErrorReport {
        lambda,
        k_sigma,
        delta: params.particle_fraction(),
        a: (-0.5 * log_inv).exp(),
        one_minus_a: -(-0.5 * log_inv).exp_m1(),
    })
}

/// Maximizes `A` over `λ` by golden-section search on `ln λ`.
///
/// The bracket is `[δ²·10⁻³, max(10³, 10³·δ/γ)]`. At `kσ = 0` the optimum
/// `λ = δ/γ` is returned exactly.
pub fn optimal_lambda(k_sigma: f64, params: &CollisionParams) -> Result<Optimum> {
    check_inputs(1.0, k_sigma)?;
    let regime = Regime::classify(k_sigma);
    if k_sigma == 0.0 {
        let lambda_max = params.matched_ratio();
        let r = error_report(lambda_max, 0.0, params)?;
        return Ok(Optimum {
            lambda_max,
            a_max: r.a,
            one_minus_a: r.one_minus_a,
            regime,
            iterations: 0,
        });
    }
    let d = params.particle_fraction();
    // for large kσ the optimum can drop to about 1/(4k²σ²), below δ²
    let lo = (d * d * 1e-3 / (1.0 + k_sigma * k_sigma)).ln();
    let hi = 1e3f64.max(1e3 * params.matched_ratio()).ln();
    let min = golden_section_min(
        |ln_lambda| log_inverse_sq_unchecked(ln_lambda.exp(), k_sigma, params),
        lo,
        hi,
        LN_LAMBDA_TOL,
        MAX_ITER,
    )?;
    if min.x - lo < 10.0 * LN_LAMBDA_TOL || hi - min.x < 10.0 * LN_LAMBDA_TOL {
        return Err(Error::Numeric {
            message: "optimum of A lies on the search bracket boundary".into(),
            diagnostics: format!("ln lambda = {:.6} in [{lo:.6}, {hi:.6}], k*sigma = {k_sigma}", min.x),
        });
    }
    let lambda_max = min.x.exp();
    let r = error_report(lambda_max, k_sigma, params)?;
    Ok(Optimum {
        lambda_max,
        a_max: r.a,
        one_minus_a: r.one_minus_a,
        regime,
        iterations: min.iterations,
    })
}

/// Asymptotic `(λ_max, 1 - A)`: `(δ/γ, 2δ(kσ)²)` for small `kσ` and
/// `(δ/2kσ, 2δkσ)` for large `kσ`.
pub fn error_asymptotic(k_sigma: f64, delta: f64, asymptote: Asymptote) -> Result<(f64, f64)> {
    check_inputs(1.0, k_sigma)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    match asymptote {
        Asymptote::SmallKSigma => Ok((delta / (1.0 - delta), 2.0 * delta * k_sigma * k_sigma)),
        Asymptote::LargeKSigma if k_sigma == 0.0 => {
            Err(domain("large-k*sigma asymptote is undefined at k*sigma = 0"))
        }
        Asymptote::LargeKSigma => Ok((delta / (2.0 * k_sigma), 2.0 * delta * k_sigma)),
    }
}

/// Leading-order error `(1 - A)/δ` for a mismatched spread ratio
/// `Σ²/σ² = δ e^y`: `cosh y - 1 + 2(kσ)² e^y`.
///
/// Valid while `penalty · δ` is small; see [`mismatch_error`].
pub fn mismatch_penalty(y: f64, k_sigma: f64) -> f64 {
    // cosh y - 1 = 2 sinh²(y/2) without cancellation near y = 0
    2.0 * (0.5 * y).sinh().powi(2) + 2.0 * k_sigma * k_sigma * y.exp()
}

/// Largest `penalty · δ` for which the leading-order form is used.
pub const MISMATCH_VALIDITY: f64 = 0.1;

/// `1 - A` at `λ = δ e^y`: the leading-order penalty where it is valid, the
/// exact overlap otherwise.
pub fn mismatch_error(y: f64, k_sigma: f64, params: &CollisionParams) -> Result<f64> {
    let estimate = mismatch_penalty(y, k_sigma) * params.particle_fraction();
    if estimate < MISMATCH_VALIDITY {
        Ok(estimate)
    } else {
        Ok(error_report(params.particle_fraction() * y.exp(), k_sigma, params)?.one_minus_a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// The overlap exactly as written, without the `γ + δ = 1` rewrite.
    fn literal_overlap(lambda: f64, k_sigma: f64, p: &CollisionParams) -> f64 {
        let (d, g) = (p.particle_fraction(), p.wall_fraction());
        let bracket = g * g + d * d + g * g * lambda + d * d / lambda;
        let inv_sq = bracket * (4.0 * k_sigma * k_sigma * lambda / (1.0 + lambda)).exp();
        inv_sq.powf(-0.5)
    }

    fn delta(d: f64) -> CollisionParams {
        CollisionParams::from_particle_fraction(d).unwrap()
    }

    #[test]
    fn unity_at_matched_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let p = CollisionParams::new(10f64.powf(rng.gen_range(-4.0..2.0)), 10f64.powf(rng.gen_range(-2.0..3.0))).unwrap();
            let a = overlap_amplitude(p.matched_ratio(), 0.0, &p).unwrap();
            assert!((a - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn stable_form_agrees_with_literal_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let p = delta(rng.gen_range(0.001..0.999));
            let lambda = 10f64.powf(rng.gen_range(-3.0..2.0));
            let ks = rng.gen_range(0.0..3.0);
            assert_relative_eq!(
                overlap_amplitude(lambda, ks, &p).unwrap(),
                literal_overlap(lambda, ks, &p),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn unit_ratio_example() {
        let a = overlap_amplitude(1.0, 0.0, &delta(0.01)).unwrap();
        assert_relative_eq!(a, 1.9604f64.powf(-0.5), max_relative = 1e-13);
        assert!((a - 0.714_212_8).abs() < 1e-7);
    }

    #[test]
    fn matched_ratio_with_momentum() {
        let p = delta(1e-4);
        let r = error_report(p.matched_ratio(), 1.0, &p).unwrap();
        assert_relative_eq!(r.one_minus_a, 2e-4, max_relative = 1e-3);
    }

    #[test]
    fn rejects_bad_lambda() {
        let p = delta(0.1);
        assert!(overlap_amplitude(0.0, 1.0, &p).is_err());
        assert!(overlap_amplitude(-1.0, 1.0, &p).is_err());
        assert!(overlap_amplitude(1.0, -1.0, &p).is_err());
    }

    #[test]
    fn optimum_at_zero_momentum_is_exact() {
        for d in [1e-6, 0.01, 0.3, 0.5, 0.8] {
            let p = delta(d);
            let opt = optimal_lambda(0.0, &p).unwrap();
            assert_eq!(opt.lambda_max, p.matched_ratio());
            assert!((opt.a_max - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn optimum_follows_asymptotes() {
        let p = delta(1e-6);
        let opt = optimal_lambda(100.0, &p).unwrap();
        assert_relative_eq!(opt.lambda_max, 5e-9, max_relative = 0.05);
        assert_relative_eq!(opt.one_minus_a, 2e-4, max_relative = 0.05);
        assert_eq!(opt.regime, Regime::LargeKSigma);

        let p = delta(1e-3);
        let opt = optimal_lambda(0.01, &p).unwrap();
        assert_relative_eq!(opt.one_minus_a, 2e-7, max_relative = 0.05);
        assert_eq!(opt.regime, Regime::SmallKSigma);
    }

    #[test]
    fn asymptote_examples() {
        assert_eq!(error_asymptotic(0.0, 0.2, Asymptote::SmallKSigma).unwrap(), (0.25, 0.0));
        let (l, e) = error_asymptotic(10.0, 1e-3, Asymptote::LargeKSigma).unwrap();
        assert_relative_eq!(l, 5e-5, max_relative = 1e-15);
        assert_relative_eq!(e, 0.02, max_relative = 1e-15);
        assert!(error_asymptotic(0.0, 1e-3, Asymptote::LargeKSigma).is_err());
    }

    #[test]
    fn asymptotes_mesh_at_unit_k_sigma() {
        let d = 1e-4;
        let (_, small) = error_asymptotic(1.0, d, Asymptote::SmallKSigma).unwrap();
        let (_, large) = error_asymptotic(1.0, d, Asymptote::LargeKSigma).unwrap();
        let opt = optimal_lambda(1.0, &delta(d)).unwrap().one_minus_a;
        for (a, b) in [(small, large), (small, opt), (large, opt)] {
            assert!(a.max(b) / a.min(b) <= 2.0, "{a} vs {b}");
        }
    }

    #[test]
    fn mismatch_penalty_values() {
        assert_eq!(mismatch_penalty(0.0, 0.0), 0.0);
        assert_relative_eq!(mismatch_penalty(0.0, 1.0), 2.0, max_relative = 1e-15);
        assert_relative_eq!(mismatch_penalty(1.0, 0.0), 1f64.cosh() - 1.0, max_relative = 1e-14);

        let p = delta(1e-5);
        let exact = error_report(1e-5 * 2f64.exp(), 0.5, &p).unwrap().one_minus_a;
        assert_relative_eq!(mismatch_penalty(2.0, 0.5) * 1e-5, exact, max_relative = 0.05);
    }

    #[test]
    fn mismatch_error_switches_to_exact_outside_validity() {
        let p = delta(0.05);
        let y: f64 = 4.0;
        let exact = error_report(0.05 * y.exp(), 0.0, &p).unwrap().one_minus_a;
        assert!(mismatch_penalty(y, 0.0) * 0.05 > MISMATCH_VALIDITY);
        assert_eq!(mismatch_error(y, 0.0, &p).unwrap(), exact);
        assert_eq!(mismatch_error(0.1, 0.0, &p).unwrap(), mismatch_penalty(0.1, 0.0) * 0.05);
    }

    #[test]
    fn depends_only_on_scale_free_combinations() {
        use crate::kinematics::GaussianProductState;
        let p = CollisionParams::new(1.0, 37.0).unwrap();
        let s1 = GaussianProductState::new(0.3, 1.1, 0.8).unwrap();
        let s2 = GaussianProductState::new(0.6, 2.2, 0.4).unwrap();
        let a1 = overlap_amplitude(s1.spread_ratio(), s1.k_sigma(), &p).unwrap();
        let a2 = overlap_amplitude(s2.spread_ratio(), s2.k_sigma(), &p).unwrap();
        assert!((a1 - a2).abs() < 1e-12);
    }

    #[test]
    fn optimum_is_non_decreasing_in_k_sigma() {
        for d in [1e-5, 1e-3, 0.1, 0.4] {
            let p = delta(d);
            let mut last = 0.0;
            for i in 0..40 {
                let ks = 10f64.powf(-3.0 + 0.15 * i as f64);
                let e = optimal_lambda(ks, &p).unwrap().one_minus_a;
                assert!(e >= last, "delta {d} k_sigma {ks}: {e} < {last}");
                last = e;
            }
        }
    }

    /// Nested grid scans as an independent locator of the optimum.
    fn grid_argmin(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let mut best = lo;
        for _ in 0..12 {
            let n = 400;
            let step = (hi - lo) / n as f64;
            let mut best_val = f64::INFINITY;
            for i in 0..=n {
                let x = lo + step * i as f64;
                let v = f(x);
                if v < best_val {
                    best_val = v;
                    best = x;
                }
            }
            lo = best - 2.0 * step;
            hi = best + 2.0 * step;
        }
        best
    }

    #[test]
    fn golden_section_matches_grid_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..25 {
            let p = delta(10f64.powf(rng.gen_range(-6.0..-0.4)));
            let ks = 10f64.powf(rng.gen_range(-2.0..2.0));
            let opt = optimal_lambda(ks, &p).unwrap();
            let scan = grid_argmin(
                |l| log_inverse_sq_overlap(l.exp(), ks, &p).unwrap(),
                (1e-12f64).ln(),
                (1e4f64).ln(),
            )
            .exp();
            assert_relative_eq!(opt.lambda_max, scan, max_relative = 1e-6);
        }
    }
}
