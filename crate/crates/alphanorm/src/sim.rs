//! Seeded data generators: a correlated linear benchmark and a
//! single-product discrete-choice market model.
//!
//! Both generators are bit-reproducible given their config (the seed is part
//! of the config) because every draw comes from one ChaCha stream consumed in
//! a fixed, documented order.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Correlation matrix with entries `ρ^{|i−j|/3}`: unit diagonal, symmetric,
/// positive definite for `ρ ∈ (0, 1)` (verified by attempting a Cholesky
/// factorization).
pub fn corr_matrix(dim: usize, rho: f64) -> Result<DMatrix<f64>> {
    if dim == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    if rho.is_nan() || rho <= 0.0 || rho >= 1.0 {
        return Err(Error::InvalidInput(format!("rho must lie in (0, 1), got {rho}")));
    }
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        rho.powf((i as f64 - j as f64).abs() / 3.0)
    });
    if m.clone().cholesky().is_none() {
        return Err(Error::LinAlg(format!(
            "correlation matrix (dim {dim}, rho {rho}) failed to factorize"
        )));
    }
    Ok(m)
}

/// Configuration for the linear benchmark: rows of `X` are multivariate
/// normal with per-coordinate standard deviation `x_sd` and correlation
/// `ρ^{|i−j|/3}`; the true coefficient vector has `n_true` leading entries
/// equal to `beta_value` and zeros elsewhere; `y = Xβ + ε` with
/// `ε ~ N(0, σ²)`.
#[derive(Debug, Clone)]
pub struct LinearSimConfig {
    pub n_train: usize,
    pub n_test: usize,
    pub p: usize,
    pub rho: f64,
    pub n_true: usize,
    pub beta_value: f64,
    pub sigma: f64,
    pub x_sd: f64,
    pub seed: u64,
}

impl Default for LinearSimConfig {
    fn default() -> Self {
        Self {
            n_train: 600,
            n_test: 600,
            p: 50,
            rho: 0.1,
            n_true: 5,
            beta_value: 5.0,
            sigma: 1.0,
            x_sd: 10.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinearSimData {
    pub x_train: DMatrix<f64>,
    pub y_train: DVector<f64>,
    pub x_test: DMatrix<f64>,
    pub y_test: DVector<f64>,
    pub beta_true: DVector<f64>,
}

/// Draws the linear benchmark. Draw order: all `X` rows (train rows first,
/// then test), then the train noise, then the test noise.
pub fn simulate_linear(cfg: &LinearSimConfig) -> Result<LinearSimData> {
    if cfg.p == 0 || cfg.n_train == 0 || cfg.n_test == 0 {
        return Err(Error::InvalidInput("sizes must be positive".into()));
    }
    if cfg.n_true > cfg.p {
        return Err(Error::InvalidInput(format!(
            "n_true {} exceeds p {}",
            cfg.n_true, cfg.p
        )));
    }
    if !cfg.sigma.is_finite() || cfg.sigma < 0.0 || !cfg.x_sd.is_finite() || cfg.x_sd <= 0.0 {
        return Err(Error::InvalidInput("sigma must be >= 0 and x_sd > 0".into()));
    }
    let corr = corr_matrix(cfg.p, cfg.rho)?;
    let chol = corr.cholesky().expect("checked by corr_matrix").l();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let total = cfg.n_train + cfg.n_test;
    let mut x = DMatrix::zeros(total, cfg.p);
    let mut z = DVector::zeros(cfg.p);
    for r in 0..total {
        for j in 0..cfg.p {
            z[j] = rng.sample::<f64, _>(StandardNormal);
        }
        let row = &chol * &z;
        for j in 0..cfg.p {
            x[(r, j)] = cfg.x_sd * row[j];
        }
    }

    let beta_true = DVector::from_fn(cfg.p, |i, _| {
        if i < cfg.n_true {
            cfg.beta_value
        } else {
            0.0
        }
    });
    let signal = &x * &beta_true;
    let mut y = DVector::zeros(total);
    for r in 0..total {
        y[r] = signal[r] + cfg.sigma * rng.sample::<f64, _>(StandardNormal);
    }

    let train_rows: Vec<usize> = (0..cfg.n_train).collect();
    let test_rows: Vec<usize> = (cfg.n_train..total).collect();
    Ok(LinearSimData {
        x_train: crate::select::subset_rows(&x, &train_rows),
        y_train: crate::select::subset_vec(&y, &train_rows),
        x_test: crate::select::subset_rows(&x, &test_rows),
        y_test: crate::select::subset_vec(&y, &test_rows),
        beta_true,
    })
}

/// Logistic purchase probability `exp(v)/(1 + exp(v))`, evaluated stably for
/// large `|v|`.
pub fn choice_probability(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

/// Configuration for the single-product market model.
///
/// `k_true` characteristics carry utility weights; `k_conf` confounders are
/// correlated with them but carry none. All characteristics start as
/// exponentials of a joint normal whose correlation is `ρ^{|i−j|/3}` and
/// whose latent variances are fresh `Unif(0.5, 1.5)` draws; within each block
/// the trailing `round(frac_binary·block)` columns are then binarized by the
/// cutoff.
#[derive(Debug, Clone)]
pub struct MarketSimConfig {
    pub markets: usize,
    pub customers_per_market: usize,
    pub k_true: usize,
    pub k_conf: usize,
    pub rho: f64,
    /// Binarization cutoff `T`; the default 1.0 is the median of every
    /// log-normal marginal here (zero latent mean), balancing the binary
    /// columns.
    pub cutoff: f64,
    pub frac_binary: f64,
    pub beta0: f64,
    pub seed: u64,
}

impl Default for MarketSimConfig {
    fn default() -> Self {
        Self {
            markets: 200,
            customers_per_market: 100,
            k_true: 4,
            k_conf: 46,
            rho: 0.1,
            cutoff: 1.0,
            frac_binary: 0.5,
            beta0: 0.0,
            seed: 0,
        }
    }
}

/// Simulated market data. `x`, `shares`, and `probs` cover all markets;
/// `log_q` covers only the `kept_markets` (markets with at least one sale).
#[derive(Debug, Clone)]
pub struct MarketSimData {
    pub x: DMatrix<f64>,
    pub shares: Vec<f64>,
    pub probs: Vec<f64>,
    pub log_q: Vec<f64>,
    pub kept_markets: Vec<usize>,
    pub n_zero_sale: usize,
    pub beta_true: DVector<f64>,
    pub column_names: Vec<String>,
    pub binary_columns: Vec<bool>,
}

impl MarketSimData {
    /// Regression view: characteristic rows and log quantities of the markets
    /// that recorded at least one sale.
    pub fn regression_design(&self) -> (DMatrix<f64>, DVector<f64>) {
        let x = crate::select::subset_rows(&self.x, &self.kept_markets);
        let y = DVector::from_column_slice(&self.log_q);
        (x, y)
    }
}

fn binary_flags(k_true: usize, k_conf: usize, frac: f64) -> Vec<bool> {
    let mut flags = vec![false; k_true + k_conf];
    let n_true = ((k_true as f64) * frac).round() as usize;
    let n_conf = ((k_conf as f64) * frac).round() as usize;
    for f in flags.iter_mut().take(k_true).skip(k_true - n_true) {
        *f = true;
    }
    for f in flags.iter_mut().skip(k_true + k_conf - n_conf) {
        *f = true;
    }
    flags
}

/// Runs the market model.
///
/// Draw order: latent variances, then the utility weights, then per market
/// the latent characteristic vector followed by one logistic noise draw per
/// customer. A customer buys when `β₀ + x_mᵀβ + ε > 0`; the market share is
/// the buyer fraction and `log_q` is the log of the buyer count, defined only
/// for markets with at least one buyer (others are counted in
/// `n_zero_sale`).
pub fn simulate_market(cfg: &MarketSimConfig) -> Result<MarketSimData> {
    if cfg.markets == 0 || cfg.customers_per_market == 0 || cfg.k_true == 0 {
        return Err(Error::InvalidInput(
            "markets, customers, and k_true must be positive".into(),
        ));
    }
    if cfg.frac_binary.is_nan() || cfg.frac_binary < 0.0 || cfg.frac_binary > 1.0 {
        return Err(Error::InvalidInput(format!(
            "frac_binary must lie in [0, 1], got {}",
            cfg.frac_binary
        )));
    }
    let dim = cfg.k_true + cfg.k_conf;
    let corr = corr_matrix(dim, cfg.rho)?;
    let chol_corr = corr.cholesky().expect("checked by corr_matrix").l();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // Latent covariance: D^{1/2} R D^{1/2}, composed as D^{1/2} L_R.
    let variances: Vec<f64> = (0..dim).map(|_| rng.random_range(0.5..1.5)).collect();
    let mut chol_sigma = chol_corr;
    for i in 0..dim {
        let s = variances[i].sqrt();
        for j in 0..=i {
            chol_sigma[(i, j)] *= s;
        }
    }

    let beta_true = DVector::from_fn(cfg.k_true, |_, _| rng.sample::<f64, _>(StandardNormal));
    let flags = binary_flags(cfg.k_true, cfg.k_conf, cfg.frac_binary);

    let mut x = DMatrix::zeros(cfg.markets, dim);
    let mut shares = Vec::with_capacity(cfg.markets);
    let mut probs = Vec::with_capacity(cfg.markets);
    let mut log_q = Vec::new();
    let mut kept_markets = Vec::new();
    let mut n_zero_sale = 0usize;
    let mut z = DVector::zeros(dim);

    for m in 0..cfg.markets {
        for j in 0..dim {
            z[j] = rng.sample::<f64, _>(StandardNormal);
        }
        let latent = &chol_sigma * &z;
        for j in 0..dim {
            let raw = latent[j].exp();
            x[(m, j)] = if flags[j] {
                if raw > cfg.cutoff {
                    1.0
                } else {
                    0.0
                }
            } else {
                raw
            };
        }
        let systematic =
            cfg.beta0 + (0..cfg.k_true).map(|j| x[(m, j)] * beta_true[j]).sum::<f64>();
        probs.push(choice_probability(systematic));

        let mut buyers = 0usize;
        for _ in 0..cfg.customers_per_market {
            let u: f64 = rng.sample(rand::distr::Open01);
            let eps = u.ln() - (1.0 - u).ln();
            if systematic + eps > 0.0 {
                buyers += 1;
            }
        }
        shares.push(buyers as f64 / cfg.customers_per_market as f64);
        if buyers >= 1 {
            log_q.push((buyers as f64).ln());
            kept_markets.push(m);
        } else {
            n_zero_sale += 1;
        }
    }

    if kept_markets.is_empty() {
        return Err(Error::DegenerateData("every market had zero sales".into()));
    }

    let column_names = (1..=cfg.k_true)
        .map(|j| format!("x{j}"))
        .chain((1..=cfg.k_conf).map(|j| format!("c{j}")))
        .collect();

    Ok(MarketSimData {
        x,
        shares,
        probs,
        log_q,
        kept_markets,
        n_zero_sale,
        beta_true,
        column_names,
        binary_columns: flags,
    })
}

/// A regression-ready view of simulated markets.
#[derive(Debug, Clone)]
pub struct MarketDataset {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub names: Vec<String>,
}

/// A half/half split of simulated markets into a fitting set and a held-out
/// comparison set.
#[derive(Debug, Clone)]
pub struct ComparisonSplit {
    pub train: MarketDataset,
    pub test: MarketDataset,
    pub warning: Option<String>,
}

/// Simulates markets from `cfg` and splits those with sales into two halves,
/// deterministically under `split_seed`. An odd count leaves the halves
/// differing by one, reported through `warning`.
pub fn make_comparison_datasets(
    cfg: &MarketSimConfig,
    split_seed: u64,
) -> Result<ComparisonSplit> {
    use rand::seq::SliceRandom;
    let sim = simulate_market(cfg)?;
    let (x, y) = sim.regression_design();
    let n = x.nrows();
    if n < 2 {
        return Err(Error::DegenerateData(
            "need at least two markets with sales to split".into(),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(split_seed);
    order.shuffle(&mut rng);
    let cut = n.div_ceil(2);
    let (first, second) = order.split_at(cut);
    let warning = if n % 2 == 1 {
        Some(format!("odd market count {n}: split sizes differ by one"))
    } else {
        None
    };
    let make = |rows: &[usize]| MarketDataset {
        x: crate::select::subset_rows(&x, rows),
        y: crate::select::subset_vec(&y, rows),
        names: sim.column_names.clone(),
    };
    Ok(ComparisonSplit {
        train: make(first),
        test: make(second),
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_corr(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma) * (x - ma)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb) * (y - mb)).sum();
        cov / (va.sqrt() * vb.sqrt())
    }

    #[test]
    fn corr_matrix_entries() {
        let m = corr_matrix(5, 0.1).unwrap();
        for i in 0..5 {
            assert_eq!(m[(i, i)], 1.0);
        }
        // |i-j| = 3 gives exactly rho.
        assert!((m[(0, 3)] - 0.1).abs() < 1e-15);
        let m6 = corr_matrix(5, 0.6).unwrap();
        assert!((m6[(0, 1)] - 0.6f64.powf(1.0 / 3.0)).abs() < 1e-15);
        assert!((m6[(0, 1)] - 0.8434).abs() < 1e-3);
        assert!(corr_matrix(4, 0.0).is_err());
        assert!(corr_matrix(4, 1.0).is_err());
    }

    #[test]
    fn linear_sim_matches_target_correlation() {
        let cfg = LinearSimConfig {
            n_train: 50_000,
            n_test: 1,
            p: 6,
            rho: 0.1,
            seed: 11,
            ..LinearSimConfig::default()
        };
        let data = simulate_linear(&cfg).unwrap();
        let col = |j: usize| data.x_train.column(j).iter().copied().collect::<Vec<_>>();
        for (i, j) in [(0usize, 3usize), (1, 2), (2, 5), (0, 5), (3, 4)] {
            let want = 0.1f64.powf((j - i) as f64 / 3.0);
            let got = sample_corr(&col(i), &col(j));
            assert!(
                (got - want).abs() <= 0.02,
                "corr(X{}, X{}) = {got}, want {want}",
                i + 1,
                j + 1
            );
        }
    }

    #[test]
    fn linear_sim_noiseless_is_exact() {
        let cfg = LinearSimConfig {
            n_train: 40,
            n_test: 10,
            p: 5,
            sigma: 0.0,
            seed: 2,
            ..LinearSimConfig::default()
        };
        let data = simulate_linear(&cfg).unwrap();
        let fitted = &data.x_train * &data.beta_true;
        for (a, b) in fitted.iter().zip(data.y_train.iter()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn linear_sim_column_variance() {
        let cfg = LinearSimConfig {
            n_train: 10_000,
            n_test: 1,
            p: 4,
            rho: 0.1,
            n_true: 2,
            seed: 3,
            ..LinearSimConfig::default()
        };
        let data = simulate_linear(&cfg).unwrap();
        for j in 0..4 {
            let col: Vec<f64> = data.x_train.column(j).iter().copied().collect();
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (col.len() - 1) as f64;
            assert!((var - 100.0).abs() <= 5.0, "column {j} variance {var}");
        }
    }

    #[test]
    fn linear_sim_is_reproducible() {
        let cfg = LinearSimConfig {
            n_train: 20,
            n_test: 5,
            p: 3,
            n_true: 2,
            seed: 9,
            ..LinearSimConfig::default()
        };
        let a = simulate_linear(&cfg).unwrap();
        let b = simulate_linear(&cfg).unwrap();
        assert_eq!(a.x_train.as_slice(), b.x_train.as_slice());
        assert_eq!(a.y_test.as_slice(), b.y_test.as_slice());
    }

    #[test]
    fn choice_probability_examples() {
        assert_eq!(choice_probability(0.0), 0.5);
        assert!((choice_probability(2.0f64.ln()) - 2.0 / 3.0).abs() < 1e-15);
        assert!(choice_probability(700.0) <= 1.0);
        assert!(choice_probability(700.0) > 0.999);
        assert!(choice_probability(-700.0) >= 0.0);
        let mut last = 0.0;
        for v in [-5.0, -1.0, 0.0, 1.0, 5.0] {
            let p = choice_probability(v);
            assert!(p > last);
            last = p;
        }
    }

    #[test]
    fn market_share_converges_to_probability() {
        let cfg = MarketSimConfig {
            markets: 1,
            customers_per_market: 100_000,
            k_true: 3,
            k_conf: 2,
            seed: 5,
            ..MarketSimConfig::default()
        };
        let data = simulate_market(&cfg).unwrap();
        assert!((data.shares[0] - data.probs[0]).abs() <= 0.01);
    }

    #[test]
    fn infinite_cutoff_zeroes_binary_columns() {
        let cfg = MarketSimConfig {
            markets: 20,
            customers_per_market: 50,
            k_true: 4,
            k_conf: 4,
            cutoff: f64::INFINITY,
            frac_binary: 0.5,
            seed: 6,
            ..MarketSimConfig::default()
        };
        let data = simulate_market(&cfg).unwrap();
        for (j, &flag) in data.binary_columns.iter().enumerate() {
            if flag {
                assert!(data.x.column(j).iter().all(|&v| v == 0.0));
            }
        }
        // Half of each block is binarized.
        assert_eq!(data.binary_columns.iter().filter(|&&f| f).count(), 4);
    }

    #[test]
    fn tiny_rho_gives_near_independent_latents() {
        let cfg = MarketSimConfig {
            markets: 10_000,
            customers_per_market: 2,
            k_true: 4,
            k_conf: 0,
            rho: 1e-9,
            frac_binary: 0.0,
            seed: 7,
            ..MarketSimConfig::default()
        };
        let data = simulate_market(&cfg).unwrap();
        let latent = |j: usize| -> Vec<f64> {
            data.x.column(j).iter().map(|v| v.ln()).collect()
        };
        for (a, b) in [(0usize, 1usize), (1, 3), (0, 2)] {
            let c = sample_corr(&latent(a), &latent(b));
            assert!(c.abs() <= 0.03, "corr({a},{b}) = {c}");
        }
    }

    #[test]
    fn market_invariants_hold() {
        let cfg = MarketSimConfig {
            markets: 300,
            customers_per_market: 60,
            seed: 8,
            ..MarketSimConfig::default()
        };
        let data = simulate_market(&cfg).unwrap();
        assert!(data.shares.iter().all(|&s| (0.0..=1.0).contains(&s)));
        assert!(data.log_q.iter().all(|v| v.is_finite()));
        assert_eq!(data.kept_markets.len() + data.n_zero_sale, 300);

        let twice = simulate_market(&cfg).unwrap();
        assert_eq!(data.x.as_slice(), twice.x.as_slice());
        assert_eq!(data.log_q, twice.log_q);
    }

    #[test]
    fn very_negative_intercept_kills_demand() {
        let base = MarketSimConfig {
            markets: 50,
            customers_per_market: 2000,
            k_true: 2,
            k_conf: 0,
            frac_binary: 0.0,
            seed: 9,
            ..MarketSimConfig::default()
        };
        let neutral = simulate_market(&base).unwrap();
        let mean_share =
            neutral.shares.iter().sum::<f64>() / neutral.shares.len() as f64;
        let starved = simulate_market(&MarketSimConfig {
            beta0: -8.0,
            ..base
        })
        .unwrap();
        let starved_share =
            starved.shares.iter().sum::<f64>() / starved.shares.len() as f64;
        assert!(starved_share < 0.01);
        assert!(starved_share < mean_share / 10.0);
    }

    #[test]
    fn comparison_split_properties() {
        let cfg = MarketSimConfig {
            markets: 200,
            customers_per_market: 200,
            beta0: 1.0,
            seed: 10,
            ..MarketSimConfig::default()
        };
        let split = make_comparison_datasets(&cfg, 77).unwrap();
        let n = split.train.x.nrows() + split.test.x.nrows();
        let sim = simulate_market(&cfg).unwrap();
        assert_eq!(n, sim.kept_markets.len());
        assert!(split.train.x.nrows().abs_diff(split.test.x.nrows()) <= 1);

        let again = make_comparison_datasets(&cfg, 77).unwrap();
        assert_eq!(split.train.x.as_slice(), again.train.x.as_slice());
        assert_eq!(split.train.y.as_slice(), again.train.y.as_slice());
    }
}
