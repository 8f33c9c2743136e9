use serde::{Deserialize, Serialize};

use super::standardize::{fit_standardizer, Design, StandardizationParams};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Smallest step before gradient descent gives up on further progress.
const MIN_STEP: f64 = 1e-12;

/// Probabilities are clamped to `[PROB_FLOOR, 1 - PROB_FLOOR]`.
const PROB_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    pub learning_rate: f64,
    pub l2: f64,
    pub max_epochs: usize,
    pub tolerance: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            l2: 1e-4,
            max_epochs: 5000,
            tolerance: 1e-6,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate > 0.0
            && self.learning_rate.is_finite()
            && self.l2 >= 0.0
            && self.tolerance > 0.0
            && self.max_epochs > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid hyperparameters {self:?}")))
        }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Raw weights from gradient descent on standardized data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub epochs: usize,
    pub converged: bool,
    pub final_loss: f64,
    pub gradient_norm: f64,
    /// Objective after each accepted step, starting with the initial point.
    #[serde(skip)]
    pub loss_trace: Vec<f64>,
}

/// Mean negative log-likelihood plus `l2/2 * |w|^2` and its gradient (weights, then bias).
pub fn objective(x: &Design, y: &[u8], weights: &[f64], bias: f64, l2: f64) -> (f64, Vec<f64>) {
    let d = x.cols;
    let mut grad = vec![0.0; d + 1];
    let mut loss = 0.0;
    for r in 0..x.rows {
        let row = x.row(r);
        let z = bias + row.iter().zip(weights).map(|(a, w)| a * w).sum::<f64>();
        let target = f64::from(y[r]);
        loss += softplus(z) - target * z;
        let err = sigmoid(z) - target;
        for (g, a) in grad[..d].iter_mut().zip(row) {
            *g += err * a;
        }
        grad[d] += err;
    }
    let n = x.rows as f64;
    loss /= n;
    grad.iter_mut().for_each(|g| *g /= n);
    loss += 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>();
    for (g, w) in grad[..d].iter_mut().zip(weights) {
        *g += l2 * w;
    }
    (loss, grad)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|g| g * g).sum::<f64>().sqrt()
}

/// Full-batch gradient descent from zero.
///
/// A step that raises the objective is rejected and the step size halved, so
/// the accepted objective sequence never increases. Stops when the gradient
/// norm drops below `tolerance` or after `max_epochs` steps.
pub fn train_logistic(x: &Design, y: &[u8], hp: &Hyperparams) -> Result<LogisticFit> {
    hp.validate()?;
    if x.rows == 0 || y.len() != x.rows {
        return Err(Error::InvalidArgument(format!("{} rows but {} labels", x.rows, y.len())));
    }
    let d = x.cols;
    let mut weights = vec![0.0; d];
    let mut bias = 0.0;
    let (mut loss, mut grad) = objective(x, y, &weights, bias, hp.l2);
    if !loss.is_finite() {
        return Err(Error::Diverged { epoch: 0 });
    }
    let mut step = hp.learning_rate;
    let mut trace = vec![loss];
    let mut converged = false;
    let mut epochs = 0;
    while epochs < hp.max_epochs {
        if norm(&grad) < hp.tolerance {
            converged = true;
            break;
        }
        epochs += 1;
        let accepted = loop {
            let cand_w: Vec<f64> = weights.iter().zip(&grad).map(|(w, g)| w - step * g).collect();
            let cand_b = bias - step * grad[d];
            let (cand_loss, cand_grad) = objective(x, y, &cand_w, cand_b, hp.l2);
            if !cand_loss.is_finite() {
                return Err(Error::Diverged { epoch: epochs });
            }
            if cand_loss <= loss {
                weights = cand_w;
                bias = cand_b;
                loss = cand_loss;
                grad = cand_grad;
                break true;
            }
            step /= 2.0;
            if step < MIN_STEP {
                break false;
            }
        };
        if !accepted {
            break;
        }
        trace.push(loss);
    }
    if !converged && norm(&grad) < hp.tolerance {
        converged = true;
    }
    Ok(LogisticFit {
        weights,
        bias,
        epochs,
        converged,
        final_loss: loss,
        gradient_norm: norm(&grad),
        loss_trace: trace,
    })
}

/// A trained classifier with the preprocessing it was fit with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub features: Vec<String>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub standardization: StandardizationParams,
    pub hyperparams: Hyperparams,
    pub epochs: usize,
    pub converged: bool,
}

impl LogisticModel {
    /// Standardizes on `rows` and trains on the same rows.
    pub fn fit(matrix: &FeatureMatrix, rows: &[usize], hp: &Hyperparams) -> Result<Self> {
        let standardization = fit_standardizer(matrix, rows)?;
        let x = standardization.apply(matrix, rows);
        let y: Vec<u8> = rows.iter().map(|&r| matrix.labels()[r]).collect();
        let fit = train_logistic(&x, &y, hp)?;
        Ok(Self {
            features: matrix.schema().names().map(str::to_string).collect(),
            weights: fit.weights,
            bias: fit.bias,
            standardization,
            hyperparams: *hp,
            epochs: fit.epochs,
            converged: fit.converged,
        })
    }

    pub fn fit_all(matrix: &FeatureMatrix, hp: &Hyperparams) -> Result<Self> {
        let rows: Vec<usize> = (0..matrix.rows()).collect();
        Self::fit(matrix, &rows, hp)
    }

    /// A model with all-zero parameters and identity standardization.
    pub fn zero(features: Vec<String>) -> Self {
        let d = features.len();
        Self {
            features,
            weights: vec![0.0; d],
            bias: 0.0,
            standardization: StandardizationParams {
                mean: vec![0.0; d],
                std: vec![1.0; d],
                constant: vec![false; d],
            },
            hyperparams: Hyperparams::default(),
            epochs: 0,
            converged: false,
        }
    }

    fn check_schema(&self, matrix: &FeatureMatrix) -> Result<()> {
        if matrix.schema().names().eq(self.features.iter().map(String::as_str)) {
            Ok(())
        } else {
            Err(Error::SchemaMismatch(format!(
                "model expects [{}], data has [{}]",
                self.features.join(","),
                matrix.schema().names().collect::<Vec<_>>().join(",")
            )))
        }
    }

    pub fn decision(&self, matrix: &FeatureMatrix, r: usize) -> f64 {
        self.bias
            + (0..matrix.cols())
                .map(|c| self.weights[c] * self.standardization.transform_value(c, matrix.value(r, c)))
                .sum::<f64>()
    }

    /// Probability of label 1, strictly inside (0, 1).
    pub fn predict_proba(&self, matrix: &FeatureMatrix, r: usize) -> f64 {
        sigmoid(self.decision(matrix, r)).clamp(PROB_FLOOR, 1.0 - PROB_FLOOR)
    }

    /// Label 1 when the probability is at least one half.
    pub fn predict(&self, matrix: &FeatureMatrix, r: usize) -> u8 {
        u8::from(self.decision(matrix, r) >= 0.0)
    }

    pub fn predict_rows(&self, matrix: &FeatureMatrix, rows: &[usize]) -> Result<Vec<u8>> {
        self.check_schema(matrix)?;
        Ok(rows.iter().map(|&r| self.predict(matrix, r)).collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
