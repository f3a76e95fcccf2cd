//! Sparse linear regression with nonconvex alpha-norm penalties.
//!
//! The penalty `λΣ|β_i|^α` with `0 < α < 1` drives coefficients to exact
//! zero through a proximal map that jumps discontinuously at a threshold,
//! selecting sparser models than the lasso at small `λ` while shrinking
//! retained coefficients less at large `λ`. This crate provides:
//!
//! - the scalar proximal machinery ([`penalty`]),
//! - a cyclic coordinate-descent solver on standardized designs
//!   ([`design`], [`solver`]),
//! - regularization paths with warm starts and k-fold cross-validation
//!   ([`select`]),
//! - reference linear estimators: OLS, lasso, ridge, elastic net
//!   ([`baselines`]),
//! - seeded data generators for a correlated linear benchmark and a
//!   single-product discrete-choice market model ([`sim`]),
//! - a promotion-lift analysis pipeline with an OLS half-sample bootstrap
//!   ([`lift`]).

pub mod baselines;
pub mod design;
pub mod error;
pub mod lift;
pub mod penalty;
pub mod select;
pub mod sim;
pub mod solver;

pub use baselines::{
    fit_baseline, fit_elastic_net, fit_lasso, fit_ols, fit_ridge, Baseline, ElasticNetFitter,
    LassoFitter, RidgeFitter,
};
pub use design::{destandardize, standardize, standardize_named, StandardizedDesign};
pub use error::{Error, Result};
pub use lift::{
    bootstrap_beta_prom, lift_factors, simulate_promo_world, split_by_promotion, BootstrapResult,
    LiftResult, Predictor, PriceColumn, PromoData, PromoWorldConfig, PromotionSplit,
};
pub use penalty::{
    lambda_max, prox, prox_map, scalar_objective, thresholds, PenaltySpec, ThresholdPair,
};
pub use select::{
    cross_validate, cross_validate_named, cross_validate_with_folds, cv_curve, fit_path,
    fit_path_with, kfold_split, make_lambda_grid, r2_oos, rmse, AlphaNormFitter, CvCurve, CvPoint,
    CvResult, LambdaGrid, PathFitter, PathResult,
};
pub use sim::{
    choice_probability, corr_matrix, make_comparison_datasets, simulate_linear, simulate_market,
    LinearSimConfig, LinearSimData, MarketSimConfig, MarketSimData,
};
pub use solver::{adjusted_gradient, fit, objective, FitResult, Init, SolverConfig};
