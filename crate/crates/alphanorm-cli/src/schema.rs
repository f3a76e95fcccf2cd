//! The dataset schema: which CSV columns play which role.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Column roles for a CSV dataset. `log_transform` columns are mapped
/// through the natural log at load time (rows with non-positive values are
/// dropped and counted); it may name the response or numeric features.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSchema {
    pub response: String,
    #[serde(default)]
    pub numeric_features: Vec<String>,
    #[serde(default)]
    pub categorical_features: Vec<String>,
    #[serde(default)]
    pub promotion_column: Option<String>,
    #[serde(default)]
    pub week_column: Option<String>,
    #[serde(default)]
    pub log_transform: Vec<String>,
}

impl DatasetSchema {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("cannot read schema {}: {e}", path.display())))?;
        let schema: DatasetSchema = serde_json::from_str(&text)
            .map_err(|e| CliError::Data(format!("invalid schema {}: {e}", path.display())))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> CliResult<()> {
        let mut seen = HashSet::new();
        let mut features: Vec<&String> = Vec::new();
        features.extend(&self.numeric_features);
        features.extend(&self.categorical_features);
        if let Some(p) = &self.promotion_column {
            features.push(p);
        }
        if let Some(w) = &self.week_column {
            features.push(w);
        }
        for name in &features {
            if !seen.insert(name.as_str()) {
                return Err(CliError::Data(format!(
                    "column '{name}' appears more than once in the schema"
                )));
            }
        }
        if seen.contains(self.response.as_str()) {
            return Err(CliError::Data(format!(
                "response '{}' cannot also be a feature",
                self.response
            )));
        }
        for name in &self.log_transform {
            let ok = *name == self.response || self.numeric_features.contains(name);
            if !ok {
                return Err(CliError::Data(format!(
                    "log_transform column '{name}' must be the response or a numeric feature"
                )));
            }
        }
        Ok(())
    }

    /// Every column the loader must find in the CSV header.
    pub fn used_columns(&self) -> Vec<&str> {
        let mut cols = vec![self.response.as_str()];
        cols.extend(self.numeric_features.iter().map(String::as_str));
        cols.extend(self.categorical_features.iter().map(String::as_str));
        if let Some(p) = &self.promotion_column {
            cols.push(p.as_str());
        }
        if let Some(w) = &self.week_column {
            cols.push(w.as_str());
        }
        cols
    }

    pub fn wants_log(&self, column: &str) -> bool {
        self.log_transform.iter().any(|c| c == column)
    }
}
