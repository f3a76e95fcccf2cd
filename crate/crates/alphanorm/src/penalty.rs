//! Scalar machinery for the alpha-norm penalty `λ·|β|^α` with `0 < α ≤ 1`.
//!
//! The central object is the proximal map of the penalty,
//! `argmin_β ½(z−β)² + λ|β|^α`, which has a closed-form case analysis: it is
//! zero below a jump threshold `h`, jumps to magnitude `b` at the threshold,
//! and above it equals the larger root of a scalar stationarity equation.
//! `α = 1` degenerates to soft thresholding, so the lasso shares this code
//! path; `α → 0` approaches hard thresholding with threshold `√(2λ)`.

use crate::error::{Error, Result};

/// A penalty configuration: exponent `alpha` in `(0, 1]` and weight
/// `lambda ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltySpec {
    alpha: f64,
    lambda: f64,
}

impl PenaltySpec {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 || alpha > 1.0 {
            return Err(Error::InvalidInput(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidInput(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        Ok(Self { alpha, lambda })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// The two thresholds of the proximal map: `b` is the magnitude the solution
/// jumps to, `h` is the `|z|` location of the jump. Always `b <= h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdPair {
    pub b: f64,
    pub h: f64,
}

/// Computes `b = [2λ(1−α)]^{1/(2−α)}` and `h = b + λαb^{α−1}`.
///
/// For `α = 1` this degenerates to `(0, λ)` (soft-threshold limit); for
/// `λ = 0` both thresholds vanish.
pub fn thresholds(p: PenaltySpec) -> ThresholdPair {
    let (alpha, lambda) = (p.alpha(), p.lambda());
    if lambda == 0.0 {
        return ThresholdPair { b: 0.0, h: 0.0 };
    }
    if alpha == 1.0 {
        return ThresholdPair { b: 0.0, h: lambda };
    }
    let b = (2.0 * lambda * (1.0 - alpha)).powf(1.0 / (2.0 - alpha));
    let h = b + lambda * alpha * b.powf(alpha - 1.0);
    ThresholdPair { b, h }
}

/// The scalar objective `½(z−β)² + λ|β|^α`, with the convention `|0|^α = 0`.
pub fn scalar_objective(beta: f64, z: f64, p: PenaltySpec) -> f64 {
    let penalty = if beta == 0.0 {
        0.0
    } else {
        p.lambda() * beta.abs().powf(p.alpha())
    };
    0.5 * (z - beta) * (z - beta) + penalty
}

fn soft_threshold(z: f64, lambda: f64) -> f64 {
    z.signum() * (z.abs() - lambda).max(0.0)
}

/// Larger root of `β + λαβ^{α−1} = az` on `(b, az)`, for `az > h`.
///
/// The left-hand side is strictly increasing on `[b, ∞)` (its derivative at
/// `b` is `1 − α/2 > 0` and grows from there), so the root is bracketed by
/// `[b, az]` and bisection cannot fail; Newton steps are taken when they stay
/// inside the bracket. Absolute tolerance 1e-12, capped at 200 iterations.
fn larger_root(az: f64, p: PenaltySpec, b: f64) -> f64 {
    let (alpha, lambda) = (p.alpha(), p.lambda());
    let g = |x: f64| x + lambda * alpha * x.powf(alpha - 1.0) - az;
    let g_prime = |x: f64| 1.0 + lambda * alpha * (alpha - 1.0) * x.powf(alpha - 2.0);

    let mut lo = b;
    let mut hi = az;
    let mut x = az;
    for _ in 0..200 {
        let gx = g(x);
        if gx > 0.0 {
            hi = x;
        } else if gx < 0.0 {
            lo = x;
        } else {
            return x;
        }
        let gp = g_prime(x);
        let newton = x - gx / gp;
        let next = if gp > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-12 || (hi - lo) <= 1e-12 {
            return next;
        }
        x = next;
    }
    x
}

/// The proximal map `argmin_β ½(z−β)² + λ|β|^α`.
///
/// Returns 0 for `|z| < h`, `sgn(z)·β̄` for `|z| > h` with `β̄ ∈ (b, |z|)` the
/// larger stationary point, and 0 at the tie `|z| = h` (the set-valued case;
/// [`prox_map`] resolves the tie from the current iterate instead). `α = 1`
/// is plain soft thresholding. Comparison of `|z|` with `h` is exact, with no
/// fuzz: callers that need tolerance apply it themselves.
pub fn prox(z: f64, p: PenaltySpec) -> f64 {
    if p.alpha() == 1.0 {
        return soft_threshold(z, p.lambda());
    }
    if p.lambda() == 0.0 {
        return z;
    }
    let t = thresholds(p);
    let az = z.abs();
    if az <= t.h {
        return 0.0;
    }
    z.signum() * larger_root(az, p, t.b)
}

/// The coordinate-update map: identical to [`prox`] away from the tie, and at
/// `|z| = h` keeps magnitude `b` when the current coefficient is nonzero,
/// returning 0 otherwise.
pub fn prox_map(z: f64, beta_current: f64, p: PenaltySpec) -> f64 {
    if p.alpha() == 1.0 {
        return soft_threshold(z, p.lambda());
    }
    if p.lambda() == 0.0 {
        return z;
    }
    let t = thresholds(p);
    if z.abs() == t.h {
        return if beta_current != 0.0 {
            z.signum() * t.b
        } else {
            0.0
        };
    }
    prox(z, p)
}

/// Smallest `λ` whose jump threshold reaches `z_max`, so that a fit with
/// `λ ≥ lambda_max` keeps every coefficient at exactly zero.
///
/// Inverts `h(λ) = z_max` in closed form: `b* = z_max·2(1−α)/(2−α)`, then
/// `λ = (b*)^{2−α} / (2(1−α))`. For `α = 1` the answer is `z_max` itself.
/// The closed form can land one ulp short of the exact threshold, so the
/// result is nudged up until `h(λ) ≥ z_max` holds in floating point.
pub fn lambda_max(z_max: f64, alpha: f64) -> Result<f64> {
    if !z_max.is_finite() || z_max <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "z_max must be positive and finite, got {z_max}"
        )));
    }
    if !alpha.is_finite() || alpha <= 0.0 || alpha > 1.0 {
        return Err(Error::InvalidInput(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    if alpha == 1.0 {
        return Ok(z_max);
    }
    let b_star = z_max * 2.0 * (1.0 - alpha) / (2.0 - alpha);
    let mut lambda = b_star.powf(2.0 - alpha) / (2.0 * (1.0 - alpha));
    while thresholds(PenaltySpec::new(alpha, lambda)?).h < z_max {
        lambda *= 1.0 + 4.0 * f64::EPSILON;
    }
    Ok(lambda)
}
