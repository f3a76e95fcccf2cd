//! Subcommand implementations. Every command writes its results under the
//! `--out` directory; anything randomized is driven by `--seed`, so re-runs
//! with identical flags reproduce identical files.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use alphanorm::select::{cv_curve, select_columns, subset_rows, subset_vec, train_test_split};
use alphanorm::{
    bootstrap_beta_prom, cross_validate_named, fit, fit_ols, fit_path, kfold_split, lift_factors,
    make_lambda_grid, r2_oos, rmse, simulate_linear, simulate_market, split_by_promotion,
    standardize_named, ElasticNetFitter, FitResult, Init, LassoFitter, LinearSimConfig,
    MarketSimConfig, PathFitter, PenaltySpec, PromoData, RidgeFitter, SolverConfig,
};

use crate::data::load_csv;
use crate::encode::{one_hot, EncodedDesign};
use crate::error::{CliError, CliResult};
use crate::output::{fmt, write_json, CsvOut, CvOut, CvPointOut, FitOut, LiftSummaryOut};
use crate::schema::DatasetSchema;

#[derive(Debug, Parser)]
#[command(
    name = "alphanorm",
    version,
    about = "Sparse regression with alpha-norm penalties on CSV data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for anything randomized: splits, folds, simulators, bootstrap.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Penalty exponent in (0, 1]; 1 is the lasso case.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,

    /// Penalty weight; required by `fit`, optional elsewhere.
    #[arg(long, global = true)]
    pub lambda: Option<f64>,

    /// Number of cross-validation folds.
    #[arg(long = "k-folds", global = true, default_value_t = 5)]
    pub k_folds: usize,

    /// Solver convergence tolerance (max coefficient change per sweep).
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub tol: f64,

    /// Solver sweep cap.
    #[arg(long = "max-sweeps", global = true, default_value_t = 10_000)]
    pub max_sweeps: usize,

    /// JSON file describing the CSV columns.
    #[arg(long, global = true)]
    pub schema: Option<PathBuf>,

    /// Directory for output files (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one (alpha, lambda) model; writes fit.json.
    Fit {
        #[arg(long)]
        csv: PathBuf,
    },
    /// Regularization path; writes path.csv.
    Path {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long = "n-lambda", default_value_t = 100)]
        n_lambda: usize,
        #[arg(long = "ratio-min", default_value_t = 1e-4)]
        ratio_min: f64,
    },
    /// Cross-validate (lambda, alpha); writes cv.json.
    Cv {
        #[arg(long)]
        csv: PathBuf,
        /// Comma-separated alpha grid.
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.5, 0.9])]
        alphas: Vec<f64>,
        #[arg(long = "n-lambda", default_value_t = 100)]
        n_lambda: usize,
        #[arg(long = "ratio-min", default_value_t = 1e-4)]
        ratio_min: f64,
    },
    /// Train/test RMSE-ratio table across linear methods; writes compare.csv.
    Compare {
        #[arg(long)]
        csv: PathBuf,
        /// Use one fixed lambda for every penalized method instead of
        /// per-method cross-validation.
        #[arg(long = "shared-lambda")]
        shared_lambda: Option<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.5, 0.9])]
        alphas: Vec<f64>,
        #[arg(long = "n-lambda", default_value_t = 100)]
        n_lambda: usize,
        #[arg(long = "ratio-min", default_value_t = 1e-4)]
        ratio_min: f64,
    },
    /// Write a simulated correlated linear benchmark dataset.
    SimulateLinear {
        #[arg(long, default_value_t = 50)]
        p: usize,
        #[arg(long = "n-train", default_value_t = 600)]
        n_train: usize,
        #[arg(long = "n-test", default_value_t = 600)]
        n_test: usize,
        #[arg(long, default_value_t = 0.1)]
        rho: f64,
        #[arg(long = "n-true", default_value_t = 5)]
        n_true: usize,
        #[arg(long = "beta-value", default_value_t = 5.0)]
        beta_value: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long = "x-sd", default_value_t = 10.0)]
        x_sd: f64,
    },
    /// Write a simulated discrete-choice market dataset.
    SimulateMarket {
        #[arg(long, default_value_t = 200)]
        markets: usize,
        #[arg(long, default_value_t = 100)]
        customers: usize,
        #[arg(long = "k-true", default_value_t = 4)]
        k_true: usize,
        #[arg(long = "k-conf", default_value_t = 46)]
        k_conf: usize,
        #[arg(long, default_value_t = 0.1)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        cutoff: f64,
        #[arg(long = "frac-binary", default_value_t = 0.5)]
        frac_binary: f64,
        #[arg(long, default_value_t = 0.0)]
        beta0: f64,
    },
    /// Promotion-lift pipeline; writes lift.csv and lift_summary.json.
    Lift {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.5, 0.9])]
        alphas: Vec<f64>,
        #[arg(long = "n-lambda", default_value_t = 100)]
        n_lambda: usize,
        #[arg(long = "ratio-min", default_value_t = 1e-4)]
        ratio_min: f64,
    },
    /// Half-sample OLS bootstrap of the promotion coefficient; writes
    /// bootstrap_prom.csv.
    BootstrapProm {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = 1000)]
        b: usize,
    },
}

pub fn run(cli: Cli) -> CliResult<()> {
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", cli.out.display())))?;
    match &cli.command {
        Command::Fit { csv } => run_fit(&cli, csv),
        Command::Path {
            csv,
            n_lambda,
            ratio_min,
        } => run_path(&cli, csv, *n_lambda, *ratio_min),
        Command::Cv {
            csv,
            alphas,
            n_lambda,
            ratio_min,
        } => run_cv(&cli, csv, alphas, *n_lambda, *ratio_min),
        Command::Compare {
            csv,
            shared_lambda,
            alphas,
            n_lambda,
            ratio_min,
        } => run_compare(&cli, csv, *shared_lambda, alphas, *n_lambda, *ratio_min),
        Command::SimulateLinear {
            p,
            n_train,
            n_test,
            rho,
            n_true,
            beta_value,
            sigma,
            x_sd,
        } => run_simulate_linear(
            &cli,
            LinearSimConfig {
                n_train: *n_train,
                n_test: *n_test,
                p: *p,
                rho: *rho,
                n_true: *n_true,
                beta_value: *beta_value,
                sigma: *sigma,
                x_sd: *x_sd,
                seed: cli.seed,
            },
        ),
        Command::SimulateMarket {
            markets,
            customers,
            k_true,
            k_conf,
            rho,
            cutoff,
            frac_binary,
            beta0,
        } => run_simulate_market(
            &cli,
            MarketSimConfig {
                markets: *markets,
                customers_per_market: *customers,
                k_true: *k_true,
                k_conf: *k_conf,
                rho: *rho,
                cutoff: *cutoff,
                frac_binary: *frac_binary,
                beta0: *beta0,
                seed: cli.seed,
            },
        ),
        Command::Lift {
            csv,
            alphas,
            n_lambda,
            ratio_min,
        } => run_lift(&cli, csv, alphas, *n_lambda, *ratio_min),
        Command::BootstrapProm { csv, b } => run_bootstrap_prom(&cli, csv, *b),
    }
}

fn solver_config(cli: &Cli) -> SolverConfig {
    SolverConfig {
        tol: cli.tol,
        max_sweeps: cli.max_sweeps,
        init: Init::Zeros,
    }
}

fn alpha_or_default(cli: &Cli) -> f64 {
    cli.alpha.unwrap_or(0.5)
}

fn load_encoded(cli: &Cli, csv: &Path) -> CliResult<(EncodedDesign, usize, DatasetSchema)> {
    let schema_path = cli
        .schema
        .as_ref()
        .ok_or_else(|| CliError::Usage("--schema <file> is required for this command".into()))?;
    let schema = DatasetSchema::from_file(schema_path)?;
    let raw = load_csv(csv, &schema)?;
    let encoded = one_hot(&raw, &schema)?;
    for w in &encoded.warnings {
        eprintln!("note: {w}");
    }
    Ok((encoded, raw.n_dropped, schema))
}

/// Columns of `x` matching `wanted` names, in `wanted` order.
fn align_columns(
    x: &DMatrix<f64>,
    names: &[String],
    wanted: &[String],
) -> CliResult<DMatrix<f64>> {
    let idx: Vec<usize> = wanted
        .iter()
        .map(|w| {
            names
                .iter()
                .position(|n| n == w)
                .ok_or_else(|| CliError::Data(format!("column '{w}' missing from design")))
        })
        .collect::<CliResult<_>>()?;
    Ok(select_columns(x, &idx))
}

fn run_fit(cli: &Cli, csv: &Path) -> CliResult<()> {
    let (encoded, n_dropped, _) = load_encoded(cli, csv)?;
    let lambda = cli
        .lambda
        .ok_or_else(|| CliError::Usage("fit requires --lambda".into()))?;
    let alpha = alpha_or_default(cli);
    let pen = PenaltySpec::new(alpha, lambda).map_err(CliError::from)?;
    let d = standardize_named(&encoded.matrix, &encoded.response, &encoded.column_names)?;
    let result = fit(&d, pen, &solver_config(cli))?;
    let out = FitOut::from_fit(
        &result,
        alpha,
        lambda,
        d.dropped_columns().to_vec(),
        encoded.matrix.nrows(),
        n_dropped,
    );
    write_json(&cli.out.join("fit.json"), &out)?;
    println!(
        "fit: alpha={} lambda={} nonzero={} converged={}",
        alpha, lambda, result.n_nonzero, result.converged
    );
    Ok(())
}

fn run_path(cli: &Cli, csv: &Path, n_lambda: usize, ratio_min: f64) -> CliResult<()> {
    let (encoded, _, _) = load_encoded(cli, csv)?;
    let alpha = alpha_or_default(cli);
    let d = standardize_named(&encoded.matrix, &encoded.response, &encoded.column_names)?;
    let grid = make_lambda_grid(&d, alpha, n_lambda, ratio_min)?;
    let path = fit_path(&d, alpha, &grid, &solver_config(cli))?;

    let mut csv_out = CsvOut::create(&cli.out.join("path.csv"))?;
    let mut header = vec!["lambda".to_string(), "n_nonzero".to_string(), "objective".to_string()];
    header.extend(d.feature_names().iter().cloned());
    csv_out.row(header)?;
    for (j, fit) in path.fits.iter().enumerate() {
        let mut row = vec![
            fmt(path.lambdas[j]),
            fit.n_nonzero.to_string(),
            fmt(fit.objective),
        ];
        row.extend(fit.beta_orig.iter().map(|&v| fmt(v)));
        csv_out.row(row)?;
    }
    csv_out.finish()?;
    println!(
        "path: alpha={} over {} lambdas, nonzero range {}..{}",
        alpha,
        path.fits.len(),
        path.n_nonzero().iter().min().unwrap(),
        path.n_nonzero().iter().max().unwrap()
    );
    Ok(())
}

fn run_cv(cli: &Cli, csv: &Path, alphas: &[f64], n_lambda: usize, ratio_min: f64) -> CliResult<()> {
    let (encoded, n_dropped, _) = load_encoded(cli, csv)?;
    let folds = kfold_split(encoded.matrix.nrows(), cli.k_folds, cli.seed)?;
    let cv = cross_validate_named(
        &encoded.matrix,
        &encoded.response,
        &encoded.column_names,
        alphas,
        &folds,
        &solver_config(cli),
        n_lambda,
        ratio_min,
    )?;
    let out = CvOut {
        k_folds: cli.k_folds,
        seed: cli.seed,
        selected_alpha: cv.selected_alpha,
        selected_lambda: cv.selected_lambda,
        table: cv
            .points
            .iter()
            .map(|p| CvPointOut {
                alpha: p.alpha,
                lambda: p.lambda,
                mean_rmse: p.mean_rmse,
                se_rmse: p.se_rmse,
            })
            .collect(),
        refit: FitOut::from_fit(
            &cv.refit,
            cv.selected_alpha,
            cv.selected_lambda,
            vec![],
            encoded.matrix.nrows(),
            n_dropped,
        ),
    };
    write_json(&cli.out.join("cv.json"), &out)?;
    println!(
        "cv: selected alpha={} lambda={} nonzero={}",
        cv.selected_alpha, cv.selected_lambda, cv.refit.n_nonzero
    );
    Ok(())
}

struct MethodRow {
    method: &'static str,
    rmse: f64,
    r2: f64,
    n_nonzero: usize,
    lambda: Option<f64>,
    alpha: Option<f64>,
}

/// Cross-validates one baseline family on the training rows and returns its
/// final fit at the winning lambda.
fn cv_baseline(
    fitter: &dyn PathFitter,
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    names: &[String],
    folds: &[usize],
    n_lambda: usize,
    ratio_min: f64,
) -> CliResult<(FitResult, f64)> {
    let curve = cv_curve(fitter, x, y, folds, n_lambda, ratio_min)?;
    let best = curve
        .mean_rmse
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.total_cmp(b))
        .map(|(i, _)| i)
        .expect("nonempty grid");
    let lambda = curve.lambdas[best];
    let d = standardize_named(x, y, names)?;
    let fit = fitter.fit_at(&d, lambda, None)?;
    Ok((fit, lambda))
}

fn evaluate(
    fit: &FitResult,
    x_test: &DMatrix<f64>,
    names: &[String],
    y_test: &DVector<f64>,
) -> CliResult<(f64, f64)> {
    let aligned = align_columns(x_test, names, &fit.feature_names)?;
    let pred = fit.predict(&aligned);
    Ok((
        rmse(y_test.as_slice(), pred.as_slice())?,
        r2_oos(y_test.as_slice(), pred.as_slice())?,
    ))
}

fn run_compare(
    cli: &Cli,
    csv: &Path,
    shared_lambda: Option<f64>,
    alphas: &[f64],
    n_lambda: usize,
    ratio_min: f64,
) -> CliResult<()> {
    let (encoded, _, _) = load_encoded(cli, csv)?;
    let n = encoded.matrix.nrows();
    let (train_rows, test_rows) = train_test_split(n, cli.seed);
    let x_train = subset_rows(&encoded.matrix, &train_rows);
    let y_train = subset_vec(&encoded.response, &train_rows);
    let x_test = subset_rows(&encoded.matrix, &test_rows);
    let y_test = subset_vec(&encoded.response, &test_rows);
    let names = &encoded.column_names;
    let cfg = solver_config(cli);
    // Fold assignment on the training rows; offset the seed so the fold
    // shuffle is independent of the train/test shuffle.
    let folds = kfold_split(x_train.nrows(), cli.k_folds, cli.seed.wrapping_add(1))?;

    let mut rows: Vec<MethodRow> = Vec::new();

    // Alpha norm.
    let (alpha_fit, alpha_sel, lambda_sel) = match shared_lambda {
        Some(lam) => {
            let a = alpha_or_default(cli);
            let d = standardize_named(&x_train, &y_train, names)?;
            let pen = PenaltySpec::new(a, lam).map_err(CliError::from)?;
            (fit(&d, pen, &cfg)?, a, lam)
        }
        None => {
            let cv = cross_validate_named(
                &x_train, &y_train, names, alphas, &folds, &cfg, n_lambda, ratio_min,
            )?;
            (cv.refit, cv.selected_alpha, cv.selected_lambda)
        }
    };
    let (alpha_rmse, alpha_r2) = evaluate(&alpha_fit, &x_test, names, &y_test)?;
    rows.push(MethodRow {
        method: "alpha",
        rmse: alpha_rmse,
        r2: alpha_r2,
        n_nonzero: alpha_fit.n_nonzero,
        lambda: Some(lambda_sel),
        alpha: Some(alpha_sel),
    });

    // Penalized baselines.
    let lasso = LassoFitter { cfg: cfg.clone() };
    let enet = ElasticNetFitter { cfg: cfg.clone() };
    let ridge = RidgeFitter;
    let baselines: [(&'static str, &dyn PathFitter); 3] =
        [("lasso", &lasso), ("ridge", &ridge), ("elastic_net", &enet)];
    for (label, fitter) in baselines {
        let (fit, lambda) = match shared_lambda {
            Some(lam) => {
                let d = standardize_named(&x_train, &y_train, names)?;
                (fitter.fit_at(&d, lam, None)?, lam)
            }
            None => cv_baseline(fitter, &x_train, &y_train, names, &folds, n_lambda, ratio_min)?,
        };
        let (rmse_v, r2_v) = evaluate(&fit, &x_test, names, &y_test)?;
        rows.push(MethodRow {
            method: label,
            rmse: rmse_v,
            r2: r2_v,
            n_nonzero: fit.n_nonzero,
            lambda: Some(lambda),
            alpha: None,
        });
    }

    // OLS.
    let d = standardize_named(&x_train, &y_train, names)?;
    let ols = fit_ols(&d)?;
    if let Some(w) = &ols.warning {
        eprintln!("note: ols: {w}");
    }
    let (ols_rmse, ols_r2) = evaluate(&ols, &x_test, names, &y_test)?;
    rows.push(MethodRow {
        method: "ols",
        rmse: ols_rmse,
        r2: ols_r2,
        n_nonzero: ols.n_nonzero,
        lambda: None,
        alpha: None,
    });

    let mut csv_out = CsvOut::create(&cli.out.join("compare.csv"))?;
    csv_out.row(["method", "rmse", "rmse_ratio", "r2_oos", "n_nonzero", "lambda", "alpha"])?;
    for row in &rows {
        csv_out.row([
            row.method.to_string(),
            fmt(row.rmse),
            fmt(row.rmse / alpha_rmse),
            fmt(row.r2),
            row.n_nonzero.to_string(),
            row.lambda.map(fmt).unwrap_or_default(),
            row.alpha.map(fmt).unwrap_or_default(),
        ])?;
    }
    csv_out.finish()?;
    for row in &rows {
        println!(
            "compare: {:<12} rmse={:.6} ratio={:.4} nonzero={}",
            row.method,
            row.rmse,
            row.rmse / alpha_rmse,
            row.n_nonzero
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct LinearMetaOut {
    p: usize,
    n_train: usize,
    n_test: usize,
    rho: f64,
    n_true: usize,
    beta_value: f64,
    sigma: f64,
    x_sd: f64,
    seed: u64,
    beta_true: Vec<f64>,
}

fn write_xy_csv(
    path: &Path,
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    feature_names: &[String],
) -> CliResult<()> {
    let mut out = CsvOut::create(path)?;
    let mut header = vec!["y".to_string()];
    header.extend(feature_names.iter().cloned());
    out.row(header)?;
    for i in 0..x.nrows() {
        let mut row = vec![fmt(y[i])];
        row.extend((0..x.ncols()).map(|j| fmt(x[(i, j)])));
        out.row(row)?;
    }
    out.finish()
}

fn run_simulate_linear(cli: &Cli, cfg: LinearSimConfig) -> CliResult<()> {
    let data = simulate_linear(&cfg)?;
    let names: Vec<String> = (1..=cfg.p).map(|j| format!("x{j}")).collect();
    write_xy_csv(&cli.out.join("linear_train.csv"), &data.x_train, &data.y_train, &names)?;
    write_xy_csv(&cli.out.join("linear_test.csv"), &data.x_test, &data.y_test, &names)?;
    let schema = DatasetSchema {
        response: "y".into(),
        numeric_features: names,
        categorical_features: vec![],
        promotion_column: None,
        week_column: None,
        log_transform: vec![],
    };
    write_json(&cli.out.join("linear_schema.json"), &schema)?;
    write_json(
        &cli.out.join("linear_meta.json"),
        &LinearMetaOut {
            p: cfg.p,
            n_train: cfg.n_train,
            n_test: cfg.n_test,
            rho: cfg.rho,
            n_true: cfg.n_true,
            beta_value: cfg.beta_value,
            sigma: cfg.sigma,
            x_sd: cfg.x_sd,
            seed: cfg.seed,
            beta_true: data.beta_true.iter().copied().collect(),
        },
    )?;
    println!(
        "simulate-linear: wrote {} train and {} test rows with {} columns",
        cfg.n_train, cfg.n_test, cfg.p
    );
    Ok(())
}

#[derive(Serialize)]
struct MarketMetaOut {
    markets: usize,
    customers_per_market: usize,
    k_true: usize,
    k_conf: usize,
    rho: f64,
    cutoff: f64,
    frac_binary: f64,
    beta0: f64,
    seed: u64,
    beta_true: Vec<f64>,
    n_zero_sale_markets: usize,
    n_markets_written: usize,
}

fn run_simulate_market(cli: &Cli, cfg: MarketSimConfig) -> CliResult<()> {
    let data = simulate_market(&cfg)?;
    let mut out = CsvOut::create(&cli.out.join("market.csv"))?;
    let mut header = vec![
        "market".to_string(),
        "share".to_string(),
        "prob".to_string(),
        "log_q".to_string(),
    ];
    header.extend(data.column_names.iter().cloned());
    out.row(header)?;
    for (row_idx, &m) in data.kept_markets.iter().enumerate() {
        let mut row = vec![
            m.to_string(),
            fmt(data.shares[m]),
            fmt(data.probs[m]),
            fmt(data.log_q[row_idx]),
        ];
        row.extend((0..data.x.ncols()).map(|j| fmt(data.x[(m, j)])));
        out.row(row)?;
    }
    out.finish()?;

    let schema = DatasetSchema {
        response: "log_q".into(),
        numeric_features: data.column_names.clone(),
        categorical_features: vec![],
        promotion_column: None,
        week_column: None,
        log_transform: vec![],
    };
    write_json(&cli.out.join("market_schema.json"), &schema)?;
    write_json(
        &cli.out.join("market_meta.json"),
        &MarketMetaOut {
            markets: cfg.markets,
            customers_per_market: cfg.customers_per_market,
            k_true: cfg.k_true,
            k_conf: cfg.k_conf,
            rho: cfg.rho,
            cutoff: cfg.cutoff,
            frac_binary: cfg.frac_binary,
            beta0: cfg.beta0,
            seed: cfg.seed,
            beta_true: data.beta_true.iter().copied().collect(),
            n_zero_sale_markets: data.n_zero_sale,
            n_markets_written: data.kept_markets.len(),
        },
    )?;
    println!(
        "simulate-market: wrote {} markets ({} dropped for zero sales)",
        data.kept_markets.len(),
        data.n_zero_sale
    );
    Ok(())
}

fn promo_data_from(encoded: &EncodedDesign) -> CliResult<PromoData> {
    let promo_col = encoded.promo_col.ok_or_else(|| {
        CliError::Data("this command needs a schema with promotion_column set".into())
    })?;
    PromoData::new(
        encoded.matrix.clone(),
        encoded.response.clone(),
        encoded.column_names.clone(),
        promo_col,
    )
    .map_err(CliError::from)
}

fn run_lift(cli: &Cli, csv: &Path, alphas: &[f64], n_lambda: usize, ratio_min: f64) -> CliResult<()> {
    let (encoded, _, _) = load_encoded(cli, csv)?;
    let data = promo_data_from(&encoded)?;
    let split = split_by_promotion(&data)?;
    let cfg = solver_config(cli);

    let (model, model_alpha, model_lambda) = match cli.lambda {
        Some(lam) => {
            let a = alpha_or_default(cli);
            let d = standardize_named(&split.baseline.x, &split.baseline.y_log, &split.baseline.names)?;
            let pen = PenaltySpec::new(a, lam).map_err(CliError::from)?;
            (fit(&d, pen, &cfg)?, a, lam)
        }
        None => {
            let folds = kfold_split(split.baseline.n(), cli.k_folds, cli.seed)?;
            let cv = cross_validate_named(
                &split.baseline.x,
                &split.baseline.y_log,
                &split.baseline.names,
                alphas,
                &folds,
                &cfg,
                n_lambda,
                ratio_min,
            )?;
            (cv.refit, cv.selected_alpha, cv.selected_lambda)
        }
    };

    let lift = lift_factors(&model, &split.promoted)?;

    let mut out = CsvOut::create(&cli.out.join("lift.csv"))?;
    out.row(["actual", "baseline", "lift_factor", "log_lift", "delta_q"])?;
    for i in 0..lift.log_lifts.len() {
        out.row([
            fmt(lift.actuals[i]),
            fmt(lift.baselines[i]),
            fmt(lift.lift_factors[i]),
            fmt(lift.log_lifts[i]),
            fmt(lift.delta_q[i]),
        ])?;
    }
    out.finish()?;

    write_json(
        &cli.out.join("lift_summary.json"),
        &LiftSummaryOut {
            n_records: data.n(),
            n_baseline: split.baseline.n(),
            n_promoted: split.promoted.n(),
            non_promotion_share: split.non_promotion_share,
            n_excluded: lift.n_excluded,
            mean_log_lift: lift.mean_log_lift,
            mean_lift_factor: lift.mean_lift_factor,
            exp_mean_log_lift: lift.mean_log_lift.exp(),
            model_alpha,
            model_lambda,
            model_n_nonzero: model.n_nonzero,
            model_converged: model.converged,
        },
    )?;
    println!(
        "lift: {} promoted records, mean log-lift {:.4}, mean lift factor {:.4}",
        split.promoted.n(),
        lift.mean_log_lift,
        lift.mean_lift_factor
    );
    Ok(())
}

fn run_bootstrap_prom(cli: &Cli, csv: &Path, b: usize) -> CliResult<()> {
    let (encoded, _, _) = load_encoded(cli, csv)?;
    let data = promo_data_from(&encoded)?;
    let result = bootstrap_beta_prom(&data, b, cli.seed)?;
    let mut out = CsvOut::create(&cli.out.join("bootstrap_prom.csv"))?;
    out.row(["beta_prom"])?;
    for &draw in &result.draws {
        out.row([fmt(draw)])?;
    }
    out.finish()?;
    println!(
        "bootstrap-prom: {} draws (skipped {}), mean {:.4}, sd {:.4}",
        result.draws.len(),
        result.n_skipped,
        result.mean,
        result.sd
    );
    Ok(())
}
