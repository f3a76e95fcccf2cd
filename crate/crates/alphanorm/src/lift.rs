//! Promotion-lift pipeline: split records on the promotion flag, train a
//! baseline-sales model on the non-promoted records, and measure
//! `lift = actual / baseline` on the promoted ones, together with an OLS
//! half-sample bootstrap for the promotion coefficient.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::solver::FitResult;

/// Anything that predicts a log-quantity from a named feature row.
pub trait Predictor {
    fn feature_names(&self) -> &[String];
    /// Prediction from a row aligned with `feature_names`.
    fn predict_features(&self, row: &[f64]) -> f64;
}

impl Predictor for FitResult {
    fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    fn predict_features(&self, row: &[f64]) -> f64 {
        self.predict_row(row)
    }
}

/// Observations for the lift pipeline: a log-quantity response, a feature
/// matrix containing a 0/1 promotion column, and the column names.
#[derive(Debug, Clone)]
pub struct PromoData {
    pub x: DMatrix<f64>,
    pub y_log: DVector<f64>,
    pub names: Vec<String>,
    pub promo_col: usize,
}

impl PromoData {
    pub fn new(
        x: DMatrix<f64>,
        y_log: DVector<f64>,
        names: Vec<String>,
        promo_col: usize,
    ) -> Result<Self> {
        if x.nrows() != y_log.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows vs {} responses",
                x.nrows(),
                y_log.len()
            )));
        }
        if names.len() != x.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{} names for {} columns",
                names.len(),
                x.ncols()
            )));
        }
        if promo_col >= x.ncols() {
            return Err(Error::InvalidInput(format!(
                "promotion column {promo_col} out of range"
            )));
        }
        if x.iter().any(|v| !v.is_finite()) || y_log.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("promotion dataset".into()));
        }
        if (0..x.nrows()).any(|i| {
            let v = x[(i, promo_col)];
            v != 0.0 && v != 1.0
        }) {
            return Err(Error::InvalidInput(
                "promotion column must contain only 0 or 1".into(),
            ));
        }
        Ok(Self {
            x,
            y_log,
            names,
            promo_col,
        })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    fn take_rows(&self, rows: &[usize]) -> PromoData {
        PromoData {
            x: crate::select::subset_rows(&self.x, rows),
            y_log: crate::select::subset_vec(&self.y_log, rows),
            names: self.names.clone(),
            promo_col: self.promo_col,
        }
    }
}

/// Exact partition of the records on the promotion flag.
#[derive(Debug, Clone)]
pub struct PromotionSplit {
    /// Records with no promotion; the training side.
    pub baseline: PromoData,
    /// Promoted records; the evaluation side.
    pub promoted: PromoData,
    /// Fraction of records with no promotion.
    pub non_promotion_share: f64,
}

pub fn split_by_promotion(data: &PromoData) -> Result<PromotionSplit> {
    let mut base_rows = Vec::new();
    let mut promo_rows = Vec::new();
    for i in 0..data.n() {
        if data.x[(i, data.promo_col)] != 0.0 {
            promo_rows.push(i);
        } else {
            base_rows.push(i);
        }
    }
    if base_rows.is_empty() {
        return Err(Error::DegenerateData("no non-promoted records to train on".into()));
    }
    if promo_rows.is_empty() {
        return Err(Error::DegenerateData("no promoted records to evaluate".into()));
    }
    let share = base_rows.len() as f64 / data.n() as f64;
    Ok(PromotionSplit {
        baseline: data.take_rows(&base_rows),
        promoted: data.take_rows(&promo_rows),
        non_promotion_share: share,
    })
}

/// Per-promoted-record lift quantities. Rows where the model produced a
/// non-finite prediction are excluded and counted.
#[derive(Debug, Clone)]
pub struct LiftResult {
    pub lift_factors: Vec<f64>,
    pub log_lifts: Vec<f64>,
    pub delta_q: Vec<f64>,
    pub baselines: Vec<f64>,
    pub actuals: Vec<f64>,
    pub mean_log_lift: f64,
    pub mean_lift_factor: f64,
    pub n_excluded: usize,
}

/// Evaluates a baseline-sales model (trained on non-promoted records only)
/// against the promoted records: `baseline = exp(predicted log Q)`,
/// `lift = actual / baseline`, `ΔQ = (lift − 1)·baseline`.
///
/// The model's features are matched to the promoted data's columns by name,
/// so a model that dropped the (constant-zero) promotion column during
/// training aligns correctly.
pub fn lift_factors(model: &dyn Predictor, promoted: &PromoData) -> Result<LiftResult> {
    let cols: Vec<usize> = model
        .feature_names()
        .iter()
        .map(|name| {
            promoted
                .names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| {
                    Error::InvalidInput(format!("model feature '{name}' missing from data"))
                })
        })
        .collect::<Result<_>>()?;

    let mut lift_factors = Vec::new();
    let mut log_lifts = Vec::new();
    let mut delta_q = Vec::new();
    let mut baselines = Vec::new();
    let mut actuals = Vec::new();
    let mut n_excluded = 0usize;
    let mut row = vec![0.0; cols.len()];

    for i in 0..promoted.n() {
        for (slot, &c) in row.iter_mut().zip(&cols) {
            *slot = promoted.x[(i, c)];
        }
        let pred = model.predict_features(&row);
        if !pred.is_finite() {
            n_excluded += 1;
            continue;
        }
        let log_lift = promoted.y_log[i] - pred;
        let lift = log_lift.exp();
        let baseline = pred.exp();
        log_lifts.push(log_lift);
        lift_factors.push(lift);
        baselines.push(baseline);
        actuals.push(promoted.y_log[i].exp());
        delta_q.push((lift - 1.0) * baseline);
    }

    if log_lifts.is_empty() {
        return Err(Error::DegenerateData(
            "every promoted record produced a non-finite prediction".into(),
        ));
    }
    let mean_log_lift = log_lifts.iter().sum::<f64>() / log_lifts.len() as f64;
    let mean_lift_factor = lift_factors.iter().sum::<f64>() / lift_factors.len() as f64;
    Ok(LiftResult {
        lift_factors,
        log_lifts,
        delta_q,
        baselines,
        actuals,
        mean_log_lift,
        mean_lift_factor,
        n_excluded,
    })
}

/// Distribution of the promotion coefficient across half-sample OLS refits.
#[derive(Debug, Clone)]
pub struct BootstrapResult {
    pub draws: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
    pub b: usize,
    pub n_skipped: usize,
}

const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

fn ols_promo_coefficient(
    data: &PromoData,
    rows: &[usize],
) -> Option<f64> {
    let p = data.x.ncols();
    // Intercept column plus every feature, promotion dummy included.
    let design = DMatrix::from_fn(rows.len(), p + 1, |i, j| {
        if j == 0 {
            1.0
        } else {
            data.x[(rows[i], j - 1)]
        }
    });
    let rhs = crate::select::subset_vec(&data.y_log, rows);
    let svd = design.svd(true, true);
    let eps = svd.singular_values.max() * rows.len().max(p + 1) as f64 * f64::EPSILON;
    if svd.rank(eps) < p + 1 {
        return None;
    }
    let solution = svd.solve(&rhs, eps).ok()?;
    Some(solution[(1 + data.promo_col, 0)])
}

/// Half-sample bootstrap of the promotion coefficient: each replicate draws
/// `⌊n/2⌋` rows without replacement, fits OLS of the log response on all
/// features (promotion dummy included, intercept added), and records the
/// promotion coefficient.
///
/// Replicate `r` uses a ChaCha stream seeded with the `r`-th `u64` drawn from
/// a master stream seeded by `seed`; a singular replicate retries with the
/// sub-seed advanced by a fixed stride, up to 10 times, then is skipped and
/// counted.
pub fn bootstrap_beta_prom(data: &PromoData, b: usize, seed: u64) -> Result<BootstrapResult> {
    if b == 0 {
        return Err(Error::InvalidInput("need at least one replicate".into()));
    }
    let n = data.n();
    let half = n / 2;
    if half < data.x.ncols() + 1 {
        return Err(Error::InvalidInput(format!(
            "half-sample of {half} rows cannot fit {} coefficients",
            data.x.ncols() + 1
        )));
    }

    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let sub_seeds: Vec<u64> = (0..b).map(|_| master.random()).collect();

    let draws_opt: Vec<Option<f64>> = sub_seeds
        .par_iter()
        .map(|&sub_seed| {
            for attempt in 0u64..10 {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(sub_seed.wrapping_add(attempt * SEED_STRIDE));
                let rows = rand::seq::index::sample(&mut rng, n, half).into_vec();
                if let Some(coef) = ols_promo_coefficient(data, &rows) {
                    return Some(coef);
                }
            }
            None
        })
        .collect();

    let draws: Vec<f64> = draws_opt.iter().flatten().copied().collect();
    let n_skipped = b - draws.len();
    if draws.is_empty() {
        return Err(Error::DegenerateData("every bootstrap replicate was singular".into()));
    }
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    let sd = if draws.len() > 1 {
        (draws.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (draws.len() - 1) as f64)
            .sqrt()
    } else {
        0.0
    };
    Ok(BootstrapResult {
        draws,
        mean,
        sd,
        b,
        n_skipped,
    })
}

/// Which price the synthetic world records in its `log_price` column.
///
/// Promoted transactions happen at a discounted price. Recording the
/// undiscounted shelf price makes a baseline model predict the
/// no-promotion counterfactual, so the mean log lift decomposes into
/// `−η·log(1−γ) + β_prom`; recording the transacted price makes the
/// promotion dummy's regression coefficient identify `β_prom` alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriceColumn {
    Shelf,
    Transacted,
}

/// Synthetic scanner-like world: `log Q = c − η·log(price) + Σ w_j x_j +
/// β_prom·Prom + σε`, where promoted rows pay `(1−γ)` times the shelf price.
#[derive(Debug, Clone)]
pub struct PromoWorldConfig {
    pub n: usize,
    /// Number of extra numeric features besides price and the promotion flag.
    pub n_extra: usize,
    pub eta: f64,
    pub gamma: f64,
    pub beta_prom: f64,
    pub promo_rate: f64,
    pub sigma: f64,
    pub intercept: f64,
    pub price_column: PriceColumn,
    pub seed: u64,
}

impl Default for PromoWorldConfig {
    fn default() -> Self {
        Self {
            n: 10_000,
            n_extra: 4,
            eta: 2.0,
            gamma: 0.1,
            beta_prom: 0.3,
            promo_rate: 0.26,
            sigma: 0.5,
            intercept: 3.0,
            price_column: PriceColumn::Shelf,
            seed: 0,
        }
    }
}

/// Generates the synthetic promotion world. Columns: `log_price`, the extra
/// features `x1..`, then the `promotion` flag.
pub fn simulate_promo_world(cfg: &PromoWorldConfig) -> Result<PromoData> {
    if cfg.n < 4 {
        return Err(Error::InvalidInput("need at least 4 records".into()));
    }
    if cfg.gamma.is_nan() || cfg.gamma <= 0.0 || cfg.gamma >= 1.0 {
        return Err(Error::InvalidInput(format!(
            "gamma must lie in (0, 1), got {}",
            cfg.gamma
        )));
    }
    if cfg.promo_rate.is_nan() || cfg.promo_rate <= 0.0 || cfg.promo_rate >= 1.0 {
        return Err(Error::InvalidInput(format!(
            "promo_rate must lie in (0, 1), got {}",
            cfg.promo_rate
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let weights: Vec<f64> = (0..cfg.n_extra)
        .map(|_| 0.5 * rng.sample::<f64, _>(StandardNormal))
        .collect();

    let p = cfg.n_extra + 2;
    let mut x = DMatrix::zeros(cfg.n, p);
    let mut y = DVector::zeros(cfg.n);
    for i in 0..cfg.n {
        let promoted = rng.random::<f64>() < cfg.promo_rate;
        let shelf_log_price = 0.3 * rng.sample::<f64, _>(StandardNormal);
        let transacted_log_price = if promoted {
            shelf_log_price + (1.0 - cfg.gamma).ln()
        } else {
            shelf_log_price
        };
        let mut signal = cfg.intercept - cfg.eta * transacted_log_price;
        for (j, w) in weights.iter().enumerate() {
            let v = rng.sample::<f64, _>(StandardNormal);
            x[(i, 1 + j)] = v;
            signal += w * v;
        }
        if promoted {
            signal += cfg.beta_prom;
        }
        x[(i, 0)] = match cfg.price_column {
            PriceColumn::Shelf => shelf_log_price,
            PriceColumn::Transacted => transacted_log_price,
        };
        x[(i, p - 1)] = if promoted { 1.0 } else { 0.0 };
        y[i] = signal + cfg.sigma * rng.sample::<f64, _>(StandardNormal);
    }

    let names = std::iter::once("log_price".to_string())
        .chain((1..=cfg.n_extra).map(|j| format!("x{j}")))
        .chain(std::iter::once("promotion".to_string()))
        .collect();
    PromoData::new(x, y, names, p - 1)
}
