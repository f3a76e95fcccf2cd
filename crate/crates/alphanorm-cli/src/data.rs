//! CSV ingestion: typed columns, row filtering, and log transforms.

use std::path::Path;

use crate::error::{CliError, CliResult};
use crate::schema::DatasetSchema;

#[derive(Debug, Clone)]
pub enum Column {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

/// Parsed dataset: one entry per used column, rows filtered to the usable
/// ones. Rows are dropped (and counted) when a used numeric field is
/// missing or non-finite, a used categorical field is empty, or a
/// log-transformed field is non-positive.
#[derive(Debug, Clone)]
pub struct RawDataset {
    pub columns: Vec<(String, Column)>,
    pub n_rows: usize,
    pub n_dropped: usize,
}

impl RawDataset {
    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c)
    }

    pub fn numeric(&self, name: &str) -> CliResult<&[f64]> {
        match self.column(name) {
            Some(Column::Numeric(v)) => Ok(v),
            _ => Err(CliError::Data(format!("no numeric column '{name}'"))),
        }
    }

    pub fn categorical(&self, name: &str) -> CliResult<&[String]> {
        match self.column(name) {
            Some(Column::Categorical(v)) => Ok(v),
            _ => Err(CliError::Data(format!("no categorical column '{name}'"))),
        }
    }
}

enum Kind {
    Response,
    Numeric,
    Categorical,
    Promotion,
    Week,
}

/// Loads the columns named by `schema` from a headed CSV file.
pub fn load_csv(path: &Path, schema: &DatasetSchema) -> CliResult<RawDataset> {
    schema.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;

    let headers = reader
        .headers()
        .map_err(|e| CliError::Data(format!("cannot read header of {}: {e}", path.display())))?
        .clone();
    let position = |name: &str| -> CliResult<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Data(format!("column '{name}' not found in {}", path.display())))
    };

    // (name, csv index, kind, apply log)
    let mut plan: Vec<(String, usize, Kind, bool)> = Vec::new();
    plan.push((
        schema.response.clone(),
        position(&schema.response)?,
        Kind::Response,
        schema.wants_log(&schema.response),
    ));
    for name in &schema.numeric_features {
        plan.push((name.clone(), position(name)?, Kind::Numeric, schema.wants_log(name)));
    }
    for name in &schema.categorical_features {
        plan.push((name.clone(), position(name)?, Kind::Categorical, false));
    }
    if let Some(name) = &schema.promotion_column {
        plan.push((name.clone(), position(name)?, Kind::Promotion, false));
    }
    if let Some(name) = &schema.week_column {
        plan.push((name.clone(), position(name)?, Kind::Week, false));
    }

    let mut columns: Vec<(String, Column)> = plan
        .iter()
        .map(|(name, _, kind, _)| {
            let col = match kind {
                Kind::Categorical => Column::Categorical(Vec::new()),
                _ => Column::Numeric(Vec::new()),
            };
            (name.clone(), col)
        })
        .collect();

    let mut n_rows = 0usize;
    let mut n_dropped = 0usize;
    let mut staged: Vec<Result<f64, String>> = Vec::with_capacity(plan.len());

    for (line, record) in reader.records().enumerate() {
        let record = record?;
        staged.clear();
        let mut keep = true;
        for (name, idx, kind, log) in &plan {
            let field = record.get(*idx).unwrap_or("");
            match kind {
                Kind::Categorical => {
                    if field.is_empty() {
                        keep = false;
                        break;
                    }
                    staged.push(Err(field.to_string()));
                }
                _ => {
                    let parsed: Option<f64> = field.parse().ok().filter(|v: &f64| v.is_finite());
                    let Some(mut value) = parsed else {
                        keep = false;
                        break;
                    };
                    if matches!(kind, Kind::Promotion) && value != 0.0 && value != 1.0 {
                        return Err(CliError::Data(format!(
                            "promotion column '{name}' has non-binary value {value} on data row {}",
                            line + 1
                        )));
                    }
                    if matches!(kind, Kind::Week) && (value < 1.0 || value.fract() != 0.0) {
                        return Err(CliError::Data(format!(
                            "week column '{name}' has non-integer value {value} on data row {}",
                            line + 1
                        )));
                    }
                    if *log {
                        if value <= 0.0 {
                            keep = false;
                            break;
                        }
                        value = value.ln();
                    }
                    staged.push(Ok(value));
                }
            }
        }
        if !keep {
            n_dropped += 1;
            continue;
        }
        for (slot, value) in columns.iter_mut().zip(staged.drain(..)) {
            match (&mut slot.1, value) {
                (Column::Numeric(v), Ok(x)) => v.push(x),
                (Column::Categorical(v), Err(s)) => v.push(s),
                _ => unreachable!("plan and columns are built together"),
            }
        }
        n_rows += 1;
    }

    if n_rows == 0 {
        return Err(CliError::Data(format!(
            "no usable rows in {} ({n_dropped} dropped)",
            path.display()
        )));
    }
    Ok(RawDataset {
        columns,
        n_rows,
        n_dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    fn schema() -> DatasetSchema {
        DatasetSchema {
            response: "quantity".into(),
            numeric_features: vec!["price".into()],
            categorical_features: vec!["brand".into()],
            promotion_column: None,
            week_column: None,
            log_transform: vec!["quantity".into()],
        }
    }

    #[test]
    fn empty_file_errors() {
        let f = write_csv("");
        assert!(load_csv(f.path(), &schema()).is_err());
    }

    #[test]
    fn header_only_errors() {
        let f = write_csv("quantity,price,brand\n");
        assert!(load_csv(f.path(), &schema()).is_err());
    }

    #[test]
    fn missing_column_errors() {
        let f = write_csv("quantity,brand\n3,a\n");
        let err = load_csv(f.path(), &schema()).unwrap_err();
        assert!(err.to_string().contains("price"));
    }

    #[test]
    fn missing_value_drops_row() {
        let f = write_csv("quantity,price,brand\n10,2.5,a\n20,,b\n30,1.5,c\n");
        let data = load_csv(f.path(), &schema()).unwrap();
        assert_eq!(data.n_rows, 2);
        assert_eq!(data.n_dropped, 1);
        assert_eq!(data.categorical("brand").unwrap(), ["a", "c"]);
    }

    #[test]
    fn log_transform_applies_and_filters() {
        let f = write_csv("quantity,price,brand\n10,2.0,a\n0,3.0,b\n4,1.0,c\n");
        let data = load_csv(f.path(), &schema()).unwrap();
        assert_eq!(data.n_rows, 2);
        assert_eq!(data.n_dropped, 1);
        let q = data.numeric("quantity").unwrap();
        assert!((q[0] - 10.0f64.ln()).abs() < 1e-15);
        assert!((q[1] - 4.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn promotion_values_are_checked() {
        let s = DatasetSchema {
            response: "y".into(),
            numeric_features: vec![],
            categorical_features: vec![],
            promotion_column: Some("promo".into()),
            week_column: None,
            log_transform: vec![],
        };
        let ok = write_csv("y,promo\n1.0,0\n2.0,1\n");
        assert!(load_csv(ok.path(), &s).is_ok());
        let bad = write_csv("y,promo\n1.0,2\n");
        assert!(load_csv(bad.path(), &s).is_err());
    }

    #[test]
    fn week_values_are_checked() {
        let s = DatasetSchema {
            response: "y".into(),
            numeric_features: vec![],
            categorical_features: vec![],
            promotion_column: None,
            week_column: Some("week".into()),
            log_transform: vec![],
        };
        let bad = write_csv("y,week\n1.0,2.5\n");
        assert!(load_csv(bad.path(), &s).is_err());
        let zero = write_csv("y,week\n1.0,0\n");
        assert!(load_csv(zero.path(), &s).is_err());
    }
}
