//! Reference linear estimators: OLS, lasso, ridge, and elastic net.
//!
//! These share the [`FitResult`] shape with the alpha-norm solver so they can
//! be compared side by side. Penalty conventions, fixed to stay consistent
//! with the `½‖y − Xβ‖²` data term used everywhere in this crate:
//!
//! - lasso minimizes `½‖y − Xβ‖² + λ‖β‖₁`
//! - ridge minimizes `½‖y − Xβ‖² + λ‖β‖₂²`, solved from
//!   `(XᵀX + 2λI)β = Xᵀy`
//! - elastic net minimizes `½‖y − Xβ‖² + λ(½‖β‖₁ + ¼‖β‖₂²)`
//!
//! The lasso here is an independent soft-threshold coordinate-descent
//! implementation, deliberately not routed through the alpha-norm prox, so
//! the two can cross-check each other at `α = 1`.

use nalgebra::DVector;

use crate::design::{destandardize, StandardizedDesign};
use crate::error::{Error, Result};
use crate::solver::{FitResult, Init, SolverConfig};

/// Which reference estimator to run, with its penalty weight where one
/// exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Baseline {
    Ols,
    Lasso(f64),
    Ridge(f64),
    ElasticNet(f64),
}

/// Dispatches to the matching `fit_*` function.
pub fn fit_baseline(
    d: &StandardizedDesign,
    spec: Baseline,
    cfg: &SolverConfig,
) -> Result<FitResult> {
    match spec {
        Baseline::Ols => fit_ols(d),
        Baseline::Lasso(lambda) => fit_lasso(d, lambda, cfg),
        Baseline::Ridge(lambda) => fit_ridge(d, lambda),
        Baseline::ElasticNet(lambda) => fit_elastic_net(d, lambda, cfg),
    }
}

fn build_result(
    d: &StandardizedDesign,
    beta: DVector<f64>,
    objective: f64,
    trace: Vec<f64>,
    sweeps_used: usize,
    converged: bool,
    warning: Option<String>,
) -> Result<FitResult> {
    let (beta_orig, intercept) = destandardize(&beta, d)?;
    let n_nonzero = beta.iter().filter(|&&b| b != 0.0).count();
    Ok(FitResult {
        beta_std: beta,
        beta_orig,
        intercept,
        objective,
        objective_trace: trace,
        n_nonzero,
        sweeps_used,
        converged,
        feature_names: d.feature_names().to_vec(),
        warning,
    })
}

/// Ordinary least squares via singular value decomposition.
///
/// A rank-deficient design (including `p ≥ N`) yields the minimum-norm
/// least-squares solution, flagged through `FitResult::warning`.
pub fn fit_ols(d: &StandardizedDesign) -> Result<FitResult> {
    let x = d.x().clone();
    let svd = x.svd(true, true);
    let eps = svd.singular_values.max() * d.n().max(d.p()) as f64 * f64::EPSILON;
    let rank = svd.rank(eps);
    let solution = svd
        .solve(d.y_centered(), eps)
        .map_err(|e| Error::LinAlg(e.to_string()))?;
    let beta = DVector::from_column_slice(solution.as_slice());
    let warning = if rank < d.p() {
        Some(format!(
            "rank-deficient design (rank {rank} of {}); minimum-norm solution",
            d.p()
        ))
    } else {
        None
    };
    let r = d.y_centered() - d.x() * &beta;
    let objective = 0.5 * r.norm_squared();
    build_result(d, beta, objective, vec![objective], 0, true, warning)
}

fn soft(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Shared cyclic coordinate-descent loop for the two soft-threshold
/// baselines. `update` maps the adjusted gradient to the new coefficient;
/// `pen` evaluates the penalty for the trace.
fn descend(
    d: &StandardizedDesign,
    cfg: &SolverConfig,
    update: impl Fn(f64) -> f64,
    pen: impl Fn(&DVector<f64>) -> f64,
) -> Result<(DVector<f64>, Vec<f64>, usize, bool)> {
    if !cfg.tol.is_finite() || cfg.tol <= 0.0 || cfg.max_sweeps == 0 {
        return Err(Error::InvalidInput("bad solver configuration".into()));
    }
    let p = d.p();
    let mut beta = match &cfg.init {
        Init::Zeros => DVector::zeros(p),
        Init::Warm(w) => {
            if w.len() != p {
                return Err(Error::DimensionMismatch(format!(
                    "warm start has {} coefficients for {p} columns",
                    w.len()
                )));
            }
            w.clone()
        }
    };
    let mut residual = d.y_centered() - d.x() * &beta;
    let mut trace = vec![0.5 * residual.norm_squared() + pen(&beta)];
    let mut converged = false;
    let mut sweeps_used = 0;
    for sweep in 1..=cfg.max_sweeps {
        sweeps_used = sweep;
        let mut max_delta = 0.0f64;
        for i in 0..p {
            let xi = d.x().column(i);
            let z = xi.dot(&residual) + beta[i];
            let updated = update(z);
            if updated != beta[i] {
                let delta = updated - beta[i];
                residual.axpy(-delta, &xi, 1.0);
                beta[i] = updated;
                max_delta = max_delta.max(delta.abs());
            }
        }
        trace.push(0.5 * residual.norm_squared() + pen(&beta));
        if max_delta < cfg.tol {
            converged = true;
            break;
        }
    }
    Ok((beta, trace, sweeps_used, converged))
}

/// Lasso by coordinate descent with the soft-threshold update
/// `β_i ← sgn(z_i)·max(|z_i| − λ, 0)`.
pub fn fit_lasso(d: &StandardizedDesign, lambda: f64, cfg: &SolverConfig) -> Result<FitResult> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidInput(format!("lambda must be >= 0, got {lambda}")));
    }
    let pen = move |b: &DVector<f64>| lambda * b.iter().map(|v| v.abs()).sum::<f64>();
    let (beta, trace, sweeps, converged) = descend(d, cfg, |z| soft(z, lambda), pen)?;
    let r = d.y_centered() - d.x() * &beta;
    let objective = 0.5 * r.norm_squared() + pen(&beta);
    build_result(d, beta, objective, trace, sweeps, converged, None)
}

/// Ridge regression from the closed-form normal system `(XᵀX + 2λI)β = Xᵀy`
/// (the factor 2 comes from the `½` on the data term).
pub fn fit_ridge(d: &StandardizedDesign, lambda: f64) -> Result<FitResult> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidInput(format!("lambda must be >= 0, got {lambda}")));
    }
    if lambda == 0.0 {
        return fit_ols(d);
    }
    let xt = d.x().transpose();
    let mut gram = &xt * d.x();
    for i in 0..d.p() {
        gram[(i, i)] += 2.0 * lambda;
    }
    let rhs = &xt * d.y_centered();
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::LinAlg("ridge system not positive definite".into()))?;
    let beta = chol.solve(&rhs);
    let r = d.y_centered() - d.x() * &beta;
    let objective = 0.5 * r.norm_squared() + lambda * beta.norm_squared();
    build_result(d, beta, objective, vec![objective], 0, true, None)
}

/// Elastic net with the fixed mixing `λ(½‖β‖₁ + ¼‖β‖₂²)`, solved by
/// coordinate descent: `β_i ← sgn(z_i)·max(|z_i| − λ/2, 0)/(1 + λ/2)`.
pub fn fit_elastic_net(
    d: &StandardizedDesign,
    lambda: f64,
    cfg: &SolverConfig,
) -> Result<FitResult> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidInput(format!("lambda must be >= 0, got {lambda}")));
    }
    let pen = move |b: &DVector<f64>| {
        lambda
            * b.iter()
                .map(|v| 0.5 * v.abs() + 0.25 * v * v)
                .sum::<f64>()
    };
    let (beta, trace, sweeps, converged) = descend(
        d,
        cfg,
        |z| soft(z, 0.5 * lambda) / (1.0 + 0.5 * lambda),
        pen,
    )?;
    let r = d.y_centered() - d.x() * &beta;
    let objective = 0.5 * r.norm_squared() + pen(&beta);
    build_result(d, beta, objective, trace, sweeps, converged, None)
}

/// Lasso as a warm-startable path family; the grid anchor is
/// `max_i |x_iᵀy|`, above which soft thresholding zeroes every coordinate.
#[derive(Debug, Clone)]
pub struct LassoFitter {
    pub cfg: SolverConfig,
}

impl crate::select::PathFitter for LassoFitter {
    fn anchor(&self, d: &StandardizedDesign) -> Result<f64> {
        let z = d.max_abs_gradient();
        if z <= 0.0 {
            return Err(Error::DegenerateData("response is zero after centering".into()));
        }
        Ok(z)
    }

    fn fit_at(
        &self,
        d: &StandardizedDesign,
        lambda: f64,
        warm: Option<&DVector<f64>>,
    ) -> Result<FitResult> {
        let cfg = match warm {
            Some(w) => self.cfg.with_warm_start(w.clone()),
            None => self.cfg.clone(),
        };
        fit_lasso(d, lambda, &cfg)
    }

    fn label(&self) -> &str {
        "lasso"
    }
}

/// Elastic net as a path family; null above `2·max_i |x_iᵀy|` under the
/// fixed mixing used here. The ℓ2 component makes its useful `λ` partly an
/// absolute quantity, so the grid spans twice as many decades as the pure
/// ℓ1 families.
#[derive(Debug, Clone)]
pub struct ElasticNetFitter {
    pub cfg: SolverConfig,
}

impl crate::select::PathFitter for ElasticNetFitter {
    fn anchor(&self, d: &StandardizedDesign) -> Result<f64> {
        let z = d.max_abs_gradient();
        if z <= 0.0 {
            return Err(Error::DegenerateData("response is zero after centering".into()));
        }
        Ok(2.0 * z)
    }

    fn grid(
        &self,
        d: &StandardizedDesign,
        n_points: usize,
        ratio_min: f64,
    ) -> Result<crate::select::LambdaGrid> {
        crate::select::geometric_grid(
            crate::select::PathFitter::anchor(self, d)?,
            n_points,
            (ratio_min * ratio_min).max(1e-12),
        )
    }

    fn fit_at(
        &self,
        d: &StandardizedDesign,
        lambda: f64,
        warm: Option<&DVector<f64>>,
    ) -> Result<FitResult> {
        let cfg = match warm {
            Some(w) => self.cfg.with_warm_start(w.clone()),
            None => self.cfg.clone(),
        };
        fit_elastic_net(d, lambda, &cfg)
    }

    fn label(&self) -> &str {
        "elastic_net"
    }
}

/// Ridge as a path family. Ridge has no finite null threshold, so the grid
/// anchor is a heavy-shrinkage point at 100 times the lasso anchor, and the
/// grid spans twice as many decades as the scale-free families (the useful
/// ridge `λ` is an absolute quantity on unit-norm columns, not a fraction of
/// the gradient bound).
#[derive(Debug, Clone, Default)]
pub struct RidgeFitter;

impl crate::select::PathFitter for RidgeFitter {
    fn anchor(&self, d: &StandardizedDesign) -> Result<f64> {
        let z = d.max_abs_gradient();
        if z <= 0.0 {
            return Err(Error::DegenerateData("response is zero after centering".into()));
        }
        Ok(100.0 * z)
    }

    fn grid(
        &self,
        d: &StandardizedDesign,
        n_points: usize,
        ratio_min: f64,
    ) -> Result<crate::select::LambdaGrid> {
        crate::select::geometric_grid(
            crate::select::PathFitter::anchor(self, d)?,
            n_points,
            (ratio_min * ratio_min).max(1e-12),
        )
    }

    fn fit_at(
        &self,
        d: &StandardizedDesign,
        lambda: f64,
        _warm: Option<&DVector<f64>>,
    ) -> Result<FitResult> {
        fit_ridge(d, lambda)
    }

    fn label(&self) -> &str {
        "ridge"
    }
}
