//! The analysis stack: standardization, per-language OLS, cross-language
//! mixed-effects regression (REML), multiple-comparison correction, rank
//! correlation and the LOESS smoother used by the figures.

mod battery;
mod bh;
mod describe;
mod lmm;
mod loess;
mod ols;
mod simplex;
mod spearman;

pub use battery::build_spec_battery;
pub use bh::benjamini_hochberg;
pub use describe::{mean, sample_sd, standardize};
pub use lmm::{lmm_fit, MixedModelFit, RegressionSpec};
pub use loess::loess;
pub use ols::{design_with_intercept, ols_fit, CoefficientEstimate, OlsFit};
pub use simplex::{nelder_mead, SimplexResult};
pub use spearman::spearman;

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A long-format analysis table: one grouping label (language) per row plus
/// named numeric columns.
#[derive(Debug, Clone)]
pub struct DataTable {
    columns: Vec<String>,
    language: Vec<String>,
    /// Column-major storage, aligned with `columns`.
    data: Vec<Vec<f64>>,
}

impl DataTable {
    pub fn new(columns: &[&str]) -> Self {
        DataTable {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            language: Vec::new(),
            data: vec![Vec::new(); columns.len()],
        }
    }

    pub fn push_row(&mut self, language: &str, values: &[f64]) {
        assert_eq!(values.len(), self.columns.len(), "row arity mismatch");
        self.language.push(language.to_string());
        for (col, &v) in self.data.iter_mut().zip(values) {
            col.push(v);
        }
    }

    /// Appends all rows of another table with the same columns.
    pub fn extend(&mut self, other: &DataTable) {
        assert_eq!(self.columns, other.columns, "column mismatch");
        self.language.extend_from_slice(&other.language);
        for (dst, src) in self.data.iter_mut().zip(&other.data) {
            dst.extend_from_slice(src);
        }
    }

    pub fn n_rows(&self) -> usize {
        self.language.len()
    }

    pub fn column_names(&self) -> &[String] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.columns
            .iter()
            .position(|c| c == name)
            .map(|i| self.data[i].as_slice())
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn languages(&self) -> &[String] {
        &self.language
    }

    /// Distinct group labels, sorted.
    pub fn distinct_languages(&self) -> Vec<String> {
        let set: BTreeMap<&str, ()> = self.language.iter().map(|l| (l.as_str(), ())).collect();
        set.keys().map(|s| s.to_string()).collect()
    }

    /// Rows of one group, as indices.
    pub fn rows_of(&self, language: &str) -> Vec<usize> {
        self.language
            .iter()
            .enumerate()
            .filter(|(_, l)| l.as_str() == language)
            .map(|(i, _)| i)
            .collect()
    }
}
