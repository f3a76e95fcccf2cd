//! Design-matrix assembly: numeric passthrough, one-hot encoding with
//! reference-level drop, and the week → (year, week-of-year) expansion.

use nalgebra::{DMatrix, DVector};

use crate::data::{Column, RawDataset};
use crate::error::{CliError, CliResult};
use crate::schema::DatasetSchema;

/// The numeric design matrix ready for standardization. Column order:
/// numeric features, the promotion flag (if any), one-hot blocks per
/// categorical, then the week-derived year and week-of-year blocks.
#[derive(Debug, Clone)]
pub struct EncodedDesign {
    pub matrix: DMatrix<f64>,
    pub column_names: Vec<String>,
    pub response: DVector<f64>,
    /// `(categorical column, dropped reference level)` pairs.
    pub reference_levels: Vec<(String, String)>,
    pub warnings: Vec<String>,
    pub promo_col: Option<usize>,
}

/// One-hot encodes a categorical: observed levels sorted lexicographically,
/// the smallest dropped as the reference. Returns the per-level indicator
/// columns. A single-level column yields no columns.
fn expand_levels(name: &str, values: &[String]) -> (Vec<(String, Vec<f64>)>, String) {
    let mut levels: Vec<&String> = values.iter().collect();
    levels.sort_unstable();
    levels.dedup();
    let reference = levels[0].clone();
    let columns = levels
        .iter()
        .skip(1)
        .map(|level| {
            let indicator: Vec<f64> = values
                .iter()
                .map(|v| if v == *level { 1.0 } else { 0.0 })
                .collect();
            (format!("{name}_{level}"), indicator)
        })
        .collect();
    (columns, reference)
}

/// Builds the design matrix from a loaded dataset.
pub fn one_hot(raw: &RawDataset, schema: &DatasetSchema) -> CliResult<EncodedDesign> {
    let n = raw.n_rows;
    let mut names: Vec<String> = Vec::new();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut reference_levels = Vec::new();
    let mut warnings = Vec::new();

    for name in &schema.numeric_features {
        names.push(name.clone());
        cols.push(raw.numeric(name)?.to_vec());
    }

    let mut promo_col = None;
    if let Some(name) = &schema.promotion_column {
        promo_col = Some(cols.len());
        names.push(name.clone());
        cols.push(raw.numeric(name)?.to_vec());
    }

    for name in &schema.categorical_features {
        let values = raw.categorical(name)?;
        let (expanded, reference) = expand_levels(name, values);
        if expanded.is_empty() {
            warnings.push(format!("categorical '{name}' has a single level; dropped"));
            continue;
        }
        reference_levels.push((name.clone(), reference));
        for (col_name, col) in expanded {
            names.push(col_name);
            cols.push(col);
        }
    }

    if let Some(name) = &schema.week_column {
        let weeks = raw.numeric(name)?;
        // A week index w >= 1 splits into year ceil(w/52) and
        // week-of-year ((w-1) mod 52) + 1.
        let years: Vec<String> = weeks
            .iter()
            .map(|&w| (w as u64).div_ceil(52).to_string())
            .collect();
        let woy: Vec<String> = weeks
            .iter()
            .map(|&w| ((((w as u64) - 1) % 52) + 1).to_string())
            .collect();
        for (derived_name, values) in [("year", &years), ("week_of_year", &woy)] {
            let (expanded, reference) = expand_levels(derived_name, values);
            if expanded.is_empty() {
                warnings.push(format!(
                    "derived '{derived_name}' has a single level; dropped"
                ));
                continue;
            }
            reference_levels.push((derived_name.to_string(), reference));
            for (col_name, col) in expanded {
                names.push(col_name);
                cols.push(col);
            }
        }
    }

    if cols.is_empty() {
        return Err(CliError::Data("schema produced no usable feature columns".into()));
    }
    {
        let mut sorted = names.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(CliError::Data(
                "encoded column names collide; rename the clashing columns".into(),
            ));
        }
    }

    let response = match raw.column(&schema.response) {
        Some(Column::Numeric(v)) => DVector::from_column_slice(v),
        _ => return Err(CliError::Data(format!("response '{}' not numeric", schema.response))),
    };
    let matrix = DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
    Ok(EncodedDesign {
        matrix,
        column_names: names,
        response,
        reference_levels,
        warnings,
        promo_col,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(columns: Vec<(String, Column)>, n_rows: usize) -> RawDataset {
        RawDataset {
            columns,
            n_rows,
            n_dropped: 0,
        }
    }

    #[test]
    fn categorical_reference_drop() {
        let data = raw(
            vec![
                ("y".into(), Column::Numeric(vec![1.0, 2.0, 3.0])),
                (
                    "kind".into(),
                    Column::Categorical(vec!["B".into(), "A".into(), "C".into()]),
                ),
            ],
            3,
        );
        let schema = DatasetSchema {
            response: "y".into(),
            numeric_features: vec![],
            categorical_features: vec!["kind".into()],
            promotion_column: None,
            week_column: None,
            log_transform: vec![],
        };
        let design = one_hot(&data, &schema).unwrap();
        assert_eq!(design.column_names, vec!["kind_B", "kind_C"]);
        assert_eq!(design.reference_levels, vec![("kind".into(), "A".into())]);
        // Row with B: (B=1, C=0).
        assert_eq!(design.matrix[(0, 0)], 1.0);
        assert_eq!(design.matrix[(0, 1)], 0.0);
        // Row with A (the reference): all zeros.
        assert_eq!(design.matrix[(1, 0)], 0.0);
        assert_eq!(design.matrix[(1, 1)], 0.0);
    }

    #[test]
    fn week_expansion() {
        let data = raw(
            vec![
                ("y".into(), Column::Numeric(vec![1.0, 2.0, 3.0])),
                ("week".into(), Column::Numeric(vec![53.0, 1.0, 105.0])),
            ],
            3,
        );
        let schema = DatasetSchema {
            response: "y".into(),
            numeric_features: vec![],
            categorical_features: vec![],
            promotion_column: None,
            week_column: Some("week".into()),
            log_transform: vec![],
        };
        let design = one_hot(&data, &schema).unwrap();
        // Week 53 -> year 2, week-of-year 1; week 1 -> year 1, woy 1;
        // week 105 -> year 3, woy 1. Years observed {1,2,3}: reference "1",
        // columns year_2, year_3. Week-of-year has a single level (1) and is
        // dropped with a warning.
        assert_eq!(design.column_names, vec!["year_2", "year_3"]);
        assert_eq!(design.matrix[(0, 0)], 1.0);
        assert_eq!(design.matrix[(0, 1)], 0.0);
        assert_eq!(design.matrix[(1, 0)], 0.0);
        assert_eq!(design.matrix[(2, 1)], 1.0);
        assert!(design.warnings.iter().any(|w| w.contains("week_of_year")));
    }

    #[test]
    fn week_of_year_levels() {
        let data = raw(
            vec![
                ("y".into(), Column::Numeric(vec![1.0, 2.0, 3.0])),
                ("week".into(), Column::Numeric(vec![1.0, 54.0, 3.0])),
            ],
            3,
        );
        let schema = DatasetSchema {
            response: "y".into(),
            numeric_features: vec![],
            categorical_features: vec![],
            promotion_column: None,
            week_column: Some("week".into()),
            log_transform: vec![],
        };
        let design = one_hot(&data, &schema).unwrap();
        // Week 54 -> year 2, week-of-year 2; weeks {1,3} -> year 1 woy {1,3}.
        // Observed woy levels {1,2,3}: reference "1".
        assert!(design.column_names.contains(&"week_of_year_2".to_string()));
        assert!(design.column_names.contains(&"week_of_year_3".to_string()));
        assert!(!design.column_names.contains(&"week_of_year_1".to_string()));
    }

    #[test]
    fn single_level_categorical_warns() {
        let data = raw(
            vec![
                ("y".into(), Column::Numeric(vec![1.0, 2.0])),
                ("k".into(), Column::Categorical(vec!["only".into(), "only".into()])),
                ("x".into(), Column::Numeric(vec![0.5, 0.7])),
            ],
            2,
        );
        let schema = DatasetSchema {
            response: "y".into(),
            numeric_features: vec!["x".into()],
            categorical_features: vec!["k".into()],
            promotion_column: None,
            week_column: None,
            log_transform: vec![],
        };
        let design = one_hot(&data, &schema).unwrap();
        assert_eq!(design.column_names, vec!["x"]);
        assert_eq!(design.warnings.len(), 1);
    }

    #[test]
    fn no_all_zero_columns() {
        let data = raw(
            vec![
                ("y".into(), Column::Numeric(vec![1.0, 2.0, 3.0, 4.0])),
                (
                    "k".into(),
                    Column::Categorical(vec!["a".into(), "b".into(), "c".into(), "b".into()]),
                ),
            ],
            4,
        );
        let schema = DatasetSchema {
            response: "y".into(),
            numeric_features: vec![],
            categorical_features: vec!["k".into()],
            promotion_column: None,
            week_column: None,
            log_transform: vec![],
        };
        let design = one_hot(&data, &schema).unwrap();
        for j in 0..design.matrix.ncols() {
            assert!(design.matrix.column(j).iter().any(|&v| v != 0.0));
        }
    }
}
