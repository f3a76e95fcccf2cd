//! Serialized outputs: JSON for scalar results, CSV for tables. All files
//! are UTF-8 with LF line endings and a fixed column order, so identical
//! inputs reproduce identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use alphanorm::FitResult;

use crate::error::CliResult;

#[derive(Debug, Serialize)]
pub struct CoefficientOut {
    pub name: String,
    pub value: f64,
}

/// JSON body for a fitted model.
#[derive(Debug, Serialize)]
pub struct FitOut {
    pub alpha: f64,
    pub lambda: f64,
    pub intercept: f64,
    pub coefficients: Vec<CoefficientOut>,
    pub n_nonzero: usize,
    pub objective: f64,
    pub sweeps_used: usize,
    pub converged: bool,
    pub dropped_columns: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    pub n_rows: usize,
    pub n_rows_dropped: usize,
}

impl FitOut {
    pub fn from_fit(
        fit: &FitResult,
        alpha: f64,
        lambda: f64,
        dropped: Vec<String>,
        n_rows: usize,
        n_rows_dropped: usize,
    ) -> Self {
        FitOut {
            alpha,
            lambda,
            intercept: fit.intercept,
            coefficients: fit
                .feature_names
                .iter()
                .zip(fit.beta_orig.iter())
                .map(|(name, &value)| CoefficientOut {
                    name: name.clone(),
                    value,
                })
                .collect(),
            n_nonzero: fit.n_nonzero,
            objective: fit.objective,
            sweeps_used: fit.sweeps_used,
            converged: fit.converged,
            dropped_columns: dropped,
            warning: fit.warning.clone(),
            n_rows,
            n_rows_dropped,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CvPointOut {
    pub alpha: f64,
    pub lambda: f64,
    pub mean_rmse: f64,
    pub se_rmse: f64,
}

#[derive(Debug, Serialize)]
pub struct CvOut {
    pub k_folds: usize,
    pub seed: u64,
    pub selected_alpha: f64,
    pub selected_lambda: f64,
    pub table: Vec<CvPointOut>,
    pub refit: FitOut,
}

#[derive(Debug, Serialize)]
pub struct LiftSummaryOut {
    pub n_records: usize,
    pub n_baseline: usize,
    pub n_promoted: usize,
    pub non_promotion_share: f64,
    pub n_excluded: usize,
    pub mean_log_lift: f64,
    pub mean_lift_factor: f64,
    pub exp_mean_log_lift: f64,
    pub model_alpha: f64,
    pub model_lambda: f64,
    pub model_n_nonzero: usize,
    pub model_converged: bool,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let file = File::create(path)?;
    let mut writer = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, value)?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}

/// CSV writer with explicit LF endings and `{}` float formatting.
pub struct CsvOut {
    writer: BufWriter<File>,
}

impl CsvOut {
    pub fn create(path: &Path) -> CliResult<Self> {
        Ok(CsvOut {
            writer: BufWriter::new(File::create(path)?),
        })
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: impl IntoIterator<Item = S>) -> CliResult<()> {
        let mut first = true;
        for field in fields {
            if !first {
                self.writer.write_all(b",")?;
            }
            self.writer.write_all(field.as_ref().as_bytes())?;
            first = false;
        }
        self.writer.write_all(b"\n")?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.writer.flush()?;
        Ok(())
    }
}

pub fn fmt(v: f64) -> String {
    format!("{v}")
}
