//! Column standardization and the back-transform to original-scale
//! coefficients.
//!
//! All solvers in this crate operate on a centered response and unit-ℓ2-norm
//! columns; the coordinate updates rely on that normalization. Constant
//! columns carry no signal after centering and are dropped up front, with
//! their names recorded so callers can report them.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Threshold below which a centered column is treated as constant.
const CONSTANT_COL_TOL: f64 = 1e-10;

/// A design matrix prepared for coordinate descent: response centered to mean
/// zero, every retained column centered and scaled to unit ℓ2 norm, plus the
/// statistics needed to map solutions back to the original scale.
#[derive(Debug, Clone)]
pub struct StandardizedDesign {
    x: DMatrix<f64>,
    y: DVector<f64>,
    col_norms: Vec<f64>,
    col_means: Vec<f64>,
    y_mean: f64,
    feature_names: Vec<String>,
    dropped: Vec<String>,
    kept_indices: Vec<usize>,
}

impl StandardizedDesign {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// The standardized matrix (unit-norm centered columns).
    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    /// The centered response.
    pub fn y_centered(&self) -> &DVector<f64> {
        &self.y
    }

    /// ℓ2 norms of the centered columns before scaling, one per retained
    /// column.
    pub fn col_norms(&self) -> &[f64] {
        &self.col_norms
    }

    /// Means of the retained columns in the original data.
    pub fn col_means(&self) -> &[f64] {
        &self.col_means
    }

    pub fn y_mean(&self) -> f64 {
        self.y_mean
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Names of columns dropped for having zero variance.
    pub fn dropped_columns(&self) -> &[String] {
        &self.dropped
    }

    /// Positions of the retained columns in the original matrix, in order.
    pub fn kept_indices(&self) -> &[usize] {
        &self.kept_indices
    }

    /// `max_i |x_iᵀ y_centered|` over the standardized columns, the anchor
    /// for regularization grids.
    pub fn max_abs_gradient(&self) -> f64 {
        (0..self.p())
            .map(|i| self.x.column(i).dot(&self.y).abs())
            .fold(0.0, f64::max)
    }
}

/// Standardizes with default feature names `x1..xp`.
pub fn standardize(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<StandardizedDesign> {
    let names: Vec<String> = (1..=x.ncols()).map(|j| format!("x{j}")).collect();
    standardize_named(x, y, &names)
}

/// Centers `y`, then centers and unit-norm-scales each nonconstant column of
/// `x`. Constant columns are dropped and recorded by name.
pub fn standardize_named(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    names: &[String],
) -> Result<StandardizedDesign> {
    let (n, p) = (x.nrows(), x.ncols());
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 observations, got {n}"
        )));
    }
    if p < 1 {
        return Err(Error::InvalidInput("need at least one column".into()));
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "y has {} entries but x has {n} rows",
            y.len()
        )));
    }
    if names.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "{} names for {p} columns",
            names.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("design matrix".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("response".into()));
    }

    let y_mean = y.mean();
    let y_centered = y.map(|v| v - y_mean);

    let mut kept_cols: Vec<DVector<f64>> = Vec::with_capacity(p);
    let mut col_norms = Vec::with_capacity(p);
    let mut col_means = Vec::with_capacity(p);
    let mut feature_names = Vec::with_capacity(p);
    let mut dropped = Vec::new();
    let mut kept_indices = Vec::with_capacity(p);

    for (j, name) in names.iter().enumerate() {
        let col = x.column(j);
        let mean = col.mean();
        let centered = DVector::from_fn(n, |i, _| col[i] - mean);
        let norm = centered.norm();
        if norm <= CONSTANT_COL_TOL * (1.0 + mean.abs()) {
            dropped.push(name.clone());
            continue;
        }
        kept_cols.push(centered / norm);
        col_norms.push(norm);
        col_means.push(mean);
        feature_names.push(name.clone());
        kept_indices.push(j);
    }

    if kept_cols.is_empty() {
        return Err(Error::DegenerateData(
            "every column is constant; nothing to fit".into(),
        ));
    }

    let x_std = DMatrix::from_columns(&kept_cols);
    Ok(StandardizedDesign {
        x: x_std,
        y: y_centered,
        col_norms,
        col_means,
        y_mean,
        feature_names,
        dropped,
        kept_indices,
    })
}

/// Maps standardized-scale coefficients back to the original scale:
/// `β_orig[i] = β_std[i] / ‖col_i‖` and
/// `intercept = ȳ − Σ mean_i·β_orig[i]`, so that predictions
/// `Xβ_orig + intercept` reproduce `X_std·β_std + ȳ` on the training data.
pub fn destandardize(
    beta_std: &DVector<f64>,
    d: &StandardizedDesign,
) -> Result<(DVector<f64>, f64)> {
    if beta_std.len() != d.p() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for {} columns",
            beta_std.len(),
            d.p()
        )));
    }
    let beta_orig = DVector::from_fn(d.p(), |i, _| beta_std[i] / d.col_norms[i]);
    let offset: f64 = (0..d.p()).map(|i| d.col_means[i] * beta_orig[i]).sum();
    Ok((beta_orig, d.y_mean - offset))
}
