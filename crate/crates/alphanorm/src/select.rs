//! Regularization paths with warm starts, k-fold cross-validation over
//! `(λ, α)`, and the error metrics used for model comparison.
//!
//! A path fits a decreasing geometric grid of `λ` values, warm-starting each
//! solve from the previous solution. The grid is anchored at the smallest
//! `λ` that yields an exactly null model, so the first path point always has
//! zero nonzero coefficients.
//!
//! Cross-validation builds each training fold's grid on that fold's own
//! standardization; fold errors are aligned by grid index, and the reported
//! (and refit) `λ` for the winning index is taken from the full-data grid.
//! Standardization statistics never leak from validation rows: predictions
//! on held-out rows go through original-scale coefficients.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::design::{standardize, StandardizedDesign};
use crate::error::{Error, Result};
use crate::penalty::{lambda_max, PenaltySpec};
use crate::solver::{fit, FitResult, SolverConfig};

/// A strictly decreasing, log-spaced grid of penalty weights.
#[derive(Debug, Clone)]
pub struct LambdaGrid {
    values: Vec<f64>,
    pub ratio_min: f64,
}

impl LambdaGrid {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_points(&self) -> usize {
        self.values.len()
    }
}

/// Log-spaced grid from `top` down to `top·ratio_min`.
pub fn geometric_grid(top: f64, n_points: usize, ratio_min: f64) -> Result<LambdaGrid> {
    if n_points < 2 {
        return Err(Error::InvalidInput(format!(
            "grid needs at least 2 points, got {n_points}"
        )));
    }
    if !top.is_finite() || top <= 0.0 {
        return Err(Error::InvalidInput(format!("grid top must be positive, got {top}")));
    }
    if ratio_min.is_nan() || ratio_min <= 0.0 || ratio_min >= 1.0 {
        return Err(Error::InvalidInput(format!(
            "ratio_min must lie in (0, 1), got {ratio_min}"
        )));
    }
    let values = (0..n_points)
        .map(|k| top * ratio_min.powf(k as f64 / (n_points - 1) as f64))
        .collect();
    Ok(LambdaGrid { values, ratio_min })
}

/// Grid anchored at the null-model threshold of the design:
/// `values[0] = lambda_max(max_i |x_iᵀy|, alpha)`.
pub fn make_lambda_grid(
    d: &StandardizedDesign,
    alpha: f64,
    n_points: usize,
    ratio_min: f64,
) -> Result<LambdaGrid> {
    let z_max = d.max_abs_gradient();
    if z_max <= 0.0 {
        return Err(Error::DegenerateData(
            "response is zero after centering; no grid anchor".into(),
        ));
    }
    geometric_grid(lambda_max(z_max, alpha)?, n_points, ratio_min)
}

/// One family of penalized fits indexed by `λ`, warm-startable along a path.
pub trait PathFitter: Sync {
    /// The top of this family's grid: a `λ` at which the fit is null (or, for
    /// families with no exact null, heavily shrunk).
    fn anchor(&self, d: &StandardizedDesign) -> Result<f64>;

    fn fit_at(
        &self,
        d: &StandardizedDesign,
        lambda: f64,
        warm: Option<&DVector<f64>>,
    ) -> Result<FitResult>;

    fn label(&self) -> &str;

    /// The family's cross-validation grid. Families whose `λ` is not
    /// scale-free (ridge) override this to span more decades.
    fn grid(&self, d: &StandardizedDesign, n_points: usize, ratio_min: f64) -> Result<LambdaGrid> {
        geometric_grid(self.anchor(d)?, n_points, ratio_min)
    }
}

/// The alpha-norm solver as a path-fittable family at fixed `alpha`.
#[derive(Debug, Clone)]
pub struct AlphaNormFitter {
    pub alpha: f64,
    pub cfg: SolverConfig,
}

impl PathFitter for AlphaNormFitter {
    fn anchor(&self, d: &StandardizedDesign) -> Result<f64> {
        let z_max = d.max_abs_gradient();
        if z_max <= 0.0 {
            return Err(Error::DegenerateData("response is zero after centering".into()));
        }
        lambda_max(z_max, self.alpha)
    }

    fn fit_at(
        &self,
        d: &StandardizedDesign,
        lambda: f64,
        warm: Option<&DVector<f64>>,
    ) -> Result<FitResult> {
        let pen = PenaltySpec::new(self.alpha, lambda)?;
        let cfg = match warm {
            Some(w) => self.cfg.with_warm_start(w.clone()),
            None => self.cfg.clone(),
        };
        fit(d, pen, &cfg)
    }

    fn label(&self) -> &str {
        "alpha"
    }
}

/// Per-`λ` fits along a grid, in grid order.
#[derive(Debug, Clone)]
pub struct PathResult {
    pub lambdas: Vec<f64>,
    pub fits: Vec<FitResult>,
}

impl PathResult {
    pub fn n_nonzero(&self) -> Vec<usize> {
        self.fits.iter().map(|f| f.n_nonzero).collect()
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.fits.iter().map(|f| f.objective).collect()
    }
}

/// Fits `lambdas` from first (largest) to last, warm-starting each solve from
/// the previous solution.
pub fn fit_path_with(
    fitter: &dyn PathFitter,
    d: &StandardizedDesign,
    lambdas: &[f64],
) -> Result<PathResult> {
    let mut fits = Vec::with_capacity(lambdas.len());
    let mut warm: Option<DVector<f64>> = None;
    for &lambda in lambdas {
        let fit = fitter.fit_at(d, lambda, warm.as_ref())?;
        warm = Some(fit.beta_std.clone());
        fits.push(fit);
    }
    Ok(PathResult {
        lambdas: lambdas.to_vec(),
        fits,
    })
}

/// Alpha-norm regularization path over `grid`.
pub fn fit_path(
    d: &StandardizedDesign,
    alpha: f64,
    grid: &LambdaGrid,
    cfg: &SolverConfig,
) -> Result<PathResult> {
    let fitter = AlphaNormFitter {
        alpha,
        cfg: cfg.clone(),
    };
    fit_path_with(&fitter, d, grid.values())
}

/// Deterministic-under-seed partition of `0..n` into `k` folds whose sizes
/// differ by at most one. Returns the fold id of each observation.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 folds, got {k}")));
    }
    if k > n {
        return Err(Error::InvalidInput(format!(
            "cannot split {n} observations into {k} folds"
        )));
    }
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut assignment = vec![0usize; n];
    for (j, &idx) in order.iter().enumerate() {
        assignment[idx] = j % k;
    }
    Ok(assignment)
}

/// Rows of `x` at `rows`, in that order.
pub fn subset_rows(x: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), x.ncols(), |i, j| x[(rows[i], j)])
}

/// Entries of `y` at `rows`, in that order.
pub fn subset_vec(y: &DVector<f64>, rows: &[usize]) -> DVector<f64> {
    DVector::from_fn(rows.len(), |i, _| y[rows[i]])
}

/// Columns of `x` at `cols`, in that order.
pub fn select_columns(x: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), cols.len(), |i, j| x[(i, cols[j])])
}

/// Seeded half/half split of `0..n`; the first part receives the extra
/// element when `n` is odd.
pub fn train_test_split(n: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let cut = n.div_ceil(2);
    let train = order[..cut].to_vec();
    let test = order[cut..].to_vec();
    (train, test)
}

/// Root mean squared error.
pub fn rmse(y: &[f64], yhat: &[f64]) -> Result<f64> {
    if y.is_empty() {
        return Err(Error::InvalidInput("rmse of empty input".into()));
    }
    if y.len() != yhat.len() {
        return Err(Error::DimensionMismatch(format!(
            "rmse over {} vs {} values",
            y.len(),
            yhat.len()
        )));
    }
    let mse = y
        .iter()
        .zip(yhat)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / y.len() as f64;
    Ok(mse.sqrt())
}

/// Out-of-sample R²: `1 − Σ(ŷ−y)² / Σ(y−ȳ)²`, with `ȳ` the mean of the
/// evaluation-set observations.
pub fn r2_oos(y: &[f64], yhat: &[f64]) -> Result<f64> {
    if y.len() < 2 {
        return Err(Error::InvalidInput("r2_oos needs at least 2 observations".into()));
    }
    if y.len() != yhat.len() {
        return Err(Error::DimensionMismatch(format!(
            "r2_oos over {} vs {} values",
            y.len(),
            yhat.len()
        )));
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    if ss_tot == 0.0 {
        return Err(Error::DegenerateData("constant evaluation response".into()));
    }
    let ss_res: f64 = y.iter().zip(yhat).map(|(a, b)| (b - a) * (b - a)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Held-out error along one fitter's path: `fold_errors[f][j]` is the RMSE of
/// fold `f`'s validation rows at grid index `j`. `lambdas` carries the
/// full-data grid for reporting.
#[derive(Debug, Clone)]
pub struct CvCurve {
    pub lambdas: Vec<f64>,
    pub fold_errors: Vec<Vec<f64>>,
    pub mean_rmse: Vec<f64>,
    pub se_rmse: Vec<f64>,
}

/// Cross-validates one fitter over its `λ` grid. Each fold builds its own
/// grid on the training rows' standardization; validation predictions use
/// original-scale coefficients, so no validation statistic enters the fit.
pub fn cv_curve(
    fitter: &dyn PathFitter,
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    folds: &[usize],
    n_points: usize,
    ratio_min: f64,
) -> Result<CvCurve> {
    let n = x.nrows();
    if folds.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} fold labels for {n} rows",
            folds.len()
        )));
    }
    let k = folds.iter().max().map_or(0, |m| m + 1);
    if k < 2 {
        return Err(Error::InvalidInput("need at least 2 folds".into()));
    }

    let d_full = standardize(x, y)?;
    let full_grid = fitter.grid(&d_full, n_points, ratio_min)?;

    let fold_errors: Vec<Vec<f64>> = (0..k)
        .into_par_iter()
        .map(|f| -> Result<Vec<f64>> {
            let train_rows: Vec<usize> = (0..n).filter(|&i| folds[i] != f).collect();
            let val_rows: Vec<usize> = (0..n).filter(|&i| folds[i] == f).collect();
            if train_rows.is_empty() || val_rows.is_empty() {
                return Err(Error::InvalidInput(format!("fold {f} is degenerate")));
            }
            let xt = subset_rows(x, &train_rows);
            let yt = subset_vec(y, &train_rows);
            let dt = standardize(&xt, &yt)?;
            let grid = fitter.grid(&dt, n_points, ratio_min)?;
            let xv = select_columns(&subset_rows(x, &val_rows), dt.kept_indices());
            let yv = subset_vec(y, &val_rows);

            let mut warm: Option<DVector<f64>> = None;
            let mut errors = Vec::with_capacity(n_points);
            for &lambda in grid.values() {
                let fit = fitter.fit_at(&dt, lambda, warm.as_ref())?;
                warm = Some(fit.beta_std.clone());
                let pred = fit.predict(&xv);
                errors.push(rmse(yv.as_slice(), pred.as_slice())?);
            }
            Ok(errors)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut mean_rmse = Vec::with_capacity(n_points);
    let mut se_rmse = Vec::with_capacity(n_points);
    for j in 0..n_points {
        let vals: Vec<f64> = fold_errors.iter().map(|row| row[j]).collect();
        let mean = vals.iter().sum::<f64>() / k as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1) as f64;
        mean_rmse.push(mean);
        se_rmse.push((var / k as f64).sqrt());
    }

    Ok(CvCurve {
        lambdas: full_grid.values().to_vec(),
        fold_errors,
        mean_rmse,
        se_rmse,
    })
}

/// One `(α, λ)` grid point of a cross-validation table.
#[derive(Debug, Clone, Copy)]
pub struct CvPoint {
    pub alpha: f64,
    pub lambda: f64,
    pub mean_rmse: f64,
    pub se_rmse: f64,
}

/// Cross-validation table over `(α, λ)`, the winning pair, and the model
/// refit on all data at that pair.
#[derive(Debug, Clone)]
pub struct CvResult {
    pub points: Vec<CvPoint>,
    /// `fold_errors[f][j]` matches `points[j]`.
    pub fold_errors: Vec<Vec<f64>>,
    pub selected_alpha: f64,
    pub selected_lambda: f64,
    pub selected_index: usize,
    pub refit: FitResult,
}

/// Five-fold-style cross-validation of the alpha-norm family over `alphas`,
/// with the default grid (100 points down to `1e-4` of the anchor).
pub fn cross_validate(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    alphas: &[f64],
    k: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<CvResult> {
    let folds = kfold_split(x.nrows(), k, seed)?;
    cross_validate_with_folds(x, y, alphas, &folds, cfg, 100, 1e-4)
}

/// [`cross_validate`] with an explicit fold assignment and grid shape.
pub fn cross_validate_with_folds(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    alphas: &[f64],
    folds: &[usize],
    cfg: &SolverConfig,
    n_points: usize,
    ratio_min: f64,
) -> Result<CvResult> {
    let names: Vec<String> = (1..=x.ncols()).map(|j| format!("x{j}")).collect();
    cross_validate_named(x, y, &names, alphas, folds, cfg, n_points, ratio_min)
}

/// [`cross_validate_with_folds`] with caller-supplied column names, carried
/// through to the refit's feature names.
#[allow(clippy::too_many_arguments)]
pub fn cross_validate_named(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    names: &[String],
    alphas: &[f64],
    folds: &[usize],
    cfg: &SolverConfig,
    n_points: usize,
    ratio_min: f64,
) -> Result<CvResult> {
    if alphas.is_empty() {
        return Err(Error::InvalidInput("no alpha values to cross-validate".into()));
    }
    let k = folds.iter().max().map_or(0, |m| m + 1);

    let mut points: Vec<CvPoint> = Vec::with_capacity(alphas.len() * n_points);
    let mut fold_errors: Vec<Vec<f64>> = vec![Vec::new(); k];
    let mut block_of: Vec<(f64, usize)> = Vec::new();

    for &alpha in alphas {
        let fitter = AlphaNormFitter {
            alpha,
            cfg: cfg.clone(),
        };
        let curve = cv_curve(&fitter, x, y, folds, n_points, ratio_min)?;
        for j in 0..n_points {
            points.push(CvPoint {
                alpha,
                lambda: curve.lambdas[j],
                mean_rmse: curve.mean_rmse[j],
                se_rmse: curve.se_rmse[j],
            });
            block_of.push((alpha, j));
        }
        for (f, row) in curve.fold_errors.iter().enumerate() {
            fold_errors[f].extend_from_slice(row);
        }
    }

    let selected_index = points
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.mean_rmse.total_cmp(&b.mean_rmse))
        .map(|(i, _)| i)
        .expect("nonempty grid");
    let (selected_alpha, grid_idx) = block_of[selected_index];
    let selected_lambda = points[selected_index].lambda;

    // Refit on all data by walking the full-data path down to the winner, so
    // the refit benefits from the same warm-start lineage as the fold fits.
    let d_full = crate::design::standardize_named(x, y, names)?;
    let full_grid = make_lambda_grid(&d_full, selected_alpha, n_points, ratio_min)?;
    let fitter = AlphaNormFitter {
        alpha: selected_alpha,
        cfg: cfg.clone(),
    };
    let path = fit_path_with(&fitter, &d_full, &full_grid.values()[..=grid_idx])?;
    let refit = path.fits.into_iter().next_back().expect("nonempty path");

    Ok(CvResult {
        points,
        fold_errors,
        selected_alpha,
        selected_lambda,
        selected_index,
        refit,
    })
}
