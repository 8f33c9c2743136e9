use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Variance below this (relative to the squared mean scale) counts as constant.
const ZERO_VARIANCE: f64 = 1e-24;

/// Per-feature z-score parameters fit on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Zero-variance features; they standardize to 0.
    pub constant: Vec<bool>,
}

/// Dense row-major design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Design {
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }
}

/// Mean and population standard deviation of each column over `rows`, ignoring missing cells.
pub fn fit_standardizer(matrix: &FeatureMatrix, rows: &[usize]) -> Result<StandardizationParams> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("cannot fit a standardizer on zero rows".into()));
    }
    let d = matrix.cols();
    let mut mean = vec![0.0; d];
    let mut std = vec![0.0; d];
    let mut constant = vec![false; d];
    for c in 0..d {
        let present: Vec<f64> = rows.iter().filter_map(|&r| matrix.value(r, c)).collect();
        if present.is_empty() {
            constant[c] = true;
            continue;
        }
        let n = present.len() as f64;
        let m = present.iter().sum::<f64>() / n;
        let var = present.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
        mean[c] = m;
        if var <= ZERO_VARIANCE * m.abs().max(1.0).powi(2) {
            constant[c] = true;
        } else {
            std[c] = var.sqrt();
        }
    }
    Ok(StandardizationParams { mean, std, constant })
}

impl StandardizationParams {
    pub fn transform_value(&self, c: usize, value: Option<f64>) -> f64 {
        match value {
            Some(v) if !self.constant[c] => (v - self.mean[c]) / self.std[c],
            _ => 0.0,
        }
    }

    /// Standardizes `rows` of the matrix; missing cells and constant features become 0.
    pub fn apply(&self, matrix: &FeatureMatrix, rows: &[usize]) -> Design {
        let d = matrix.cols();
        assert_eq!(d, self.mean.len(), "standardizer fit on a different schema");
        let mut data = Vec::with_capacity(rows.len() * d);
        for &r in rows {
            for c in 0..d {
                data.push(self.transform_value(c, matrix.value(r, c)));
            }
        }
        Design {
            rows: rows.len(),
            cols: d,
            data,
        }
    }
}

/// Standardizes every row of the matrix with `params`.
pub fn apply_standardizer(params: &StandardizationParams, matrix: &FeatureMatrix) -> Design {
    let all: Vec<usize> = (0..matrix.rows()).collect();
    params.apply(matrix, &all)
}
