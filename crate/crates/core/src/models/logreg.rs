//! One-vs-rest L2-regularized logistic regression trained by full-batch
//! gradient descent with backtracking line search. Each search starts from
//! the Barzilai-Borwein step and halves until the Armijo condition holds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{argmax_lowest, check_training_input, Prediction};
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, SparseVec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRegOptions {
    /// Inverse regularization strength.
    pub c: f64,
    pub max_iters: usize,
    /// Stop once the gradient's infinity norm falls below this.
    pub tol: f64,
}

impl Default for LogRegOptions {
    fn default() -> Self {
        LogRegOptions {
            c: 1.0,
            max_iters: 1000,
            tol: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegressionModel {
    /// Label ordinals, ascending; one binary model per label.
    pub labels: Vec<usize>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub width: usize,
    pub options: LogRegOptions,
    pub iterations: Vec<usize>,
    pub converged: Vec<bool>,
}

/// `log(1 + exp(t))` without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Weighted binary logistic loss
/// `||w||^2 / (2C) + sum_i s_i * log(1 + exp(-z_i (w.x_i + b)))`, `z_i = +-1`.
pub struct BinaryObjective<'a> {
    pub x: &'a FeatureMatrix,
    pub z: Vec<f64>,
    pub s: &'a [f64],
    pub c: f64,
}

impl BinaryObjective<'_> {
    fn margins(&self, w: &[f64], b: f64) -> Vec<f64> {
        self.x.rows.iter().map(|r| r.dot_dense(w) + b).collect()
    }

    fn data_loss(&self, margins: &[f64]) -> f64 {
        margins
            .iter()
            .zip(&self.z)
            .zip(self.s)
            .map(|((m, z), s)| s * softplus(-z * m))
            .sum()
    }

    pub fn loss(&self, w: &[f64], b: f64) -> f64 {
        let reg: f64 = w.iter().map(|v| v * v).sum::<f64>() / (2.0 * self.c);
        reg + self.data_loss(&self.margins(w, b))
    }

    fn gradient_from_margins(&self, w: &[f64], margins: &[f64]) -> (Vec<f64>, f64) {
        let mut gw: Vec<f64> = w.iter().map(|v| v / self.c).collect();
        let mut gb = 0.0;
        for (i, row) in self.x.rows.iter().enumerate() {
            let z = self.z[i];
            let r = -z * self.s[i] * sigmoid(-z * margins[i]);
            gb += r;
            for (j, v) in row.iter() {
                gw[j] += r * v;
            }
        }
        (gw, gb)
    }

    /// Analytic gradient with respect to `(w, b)`.
    pub fn gradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        self.gradient_from_margins(w, &self.margins(w, b))
    }
}

#[derive(Clone, Debug)]
pub struct BinaryFit {
    pub w: Vec<f64>,
    pub b: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Loss after initialization and after every accepted step.
    pub loss_history: Vec<f64>,
}

const ARMIJO: f64 = 1e-4;

/// Minimizes a binary objective from zero initialization.
pub fn fit_binary(obj: &BinaryObjective<'_>, max_iters: usize, tol: f64) -> BinaryFit {
    let n = obj.x.len();
    let d = obj.x.width;
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut margins = vec![0.0; n];
    let mut loss = obj.data_loss(&margins);
    let mut history = vec![loss];
    let mut step = 1.0;
    // previous iterate and gradient for the Barzilai-Borwein trial step
    let mut prev: Option<(Vec<f64>, f64, Vec<f64>, f64)> = None;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iters {
        let (gw, gb) = obj.gradient_from_margins(&w, &margins);
        let g_inf = gw.iter().fold(gb.abs(), |m, v| m.max(v.abs()));
        if g_inf < tol {
            converged = true;
            break;
        }
        let xg: Vec<f64> = obj.x.rows.iter().map(|r| r.dot_dense(&gw) + gb).collect();
        let gg: f64 = gw.iter().map(|v| v * v).sum::<f64>() + gb * gb;
        let ww: f64 = w.iter().map(|v| v * v).sum();
        let wg: f64 = w.iter().zip(&gw).map(|(a, g)| a * g).sum();
        let gwgw = gg - gb * gb;

        let mut t = step * 2.0;
        if let Some((pw, pb, pg, pgb)) = &prev {
            let mut ss = (b - pb) * (b - pb);
            let mut sy = (b - pb) * (gb - pgb);
            for j in 0..d {
                let dw = w[j] - pw[j];
                ss += dw * dw;
                sy += dw * (gw[j] - pg[j]);
            }
            if sy > 0.0 && ss > 0.0 {
                t = ss / sy;
            }
        }
        let mut trial = vec![0.0; n];
        let accepted = loop {
            for i in 0..n {
                trial[i] = margins[i] - t * xg[i];
            }
            let reg = (ww - 2.0 * t * wg + t * t * gwgw) / (2.0 * obj.c);
            let candidate = reg + obj.data_loss(&trial);
            if candidate <= loss - ARMIJO * t * gg {
                break Some(candidate);
            }
            t *= 0.5;
            if t < 1e-30 {
                break None;
            }
        };
        let Some(new_loss) = accepted else {
            // no descent possible at machine precision
            converged = true;
            break;
        };
        let old_w = w.clone();
        for (wj, gj) in w.iter_mut().zip(&gw) {
            *wj -= t * gj;
        }
        let old_b = b;
        b -= t * gb;
        prev = Some((old_w, old_b, gw, gb));
        std::mem::swap(&mut margins, &mut trial);
        loss = new_loss;
        history.push(loss);
        step = t;
        iterations += 1;
    }
    BinaryFit {
        w,
        b,
        iterations,
        converged,
        loss_history: history,
    }
}

pub fn train_logreg(
    x: &FeatureMatrix,
    y: &[usize],
    sample_weights: Option<&[f64]>,
    options: LogRegOptions,
) -> Result<LogisticRegressionModel> {
    let labels = check_training_input(x, y, sample_weights, 2)?;
    if !(options.c.is_finite() && options.c > 0.0) {
        return Err(Error::InvalidInput(format!(
            "C must be positive, got {}",
            options.c
        )));
    }
    let ones;
    let s = match sample_weights {
        Some(s) => s,
        None => {
            ones = vec![1.0; y.len()];
            &ones
        }
    };
    let fits: Vec<BinaryFit> = labels
        .par_iter()
        .map(|&label| {
            let obj = BinaryObjective {
                x,
                z: y.iter()
                    .map(|&l| if l == label { 1.0 } else { -1.0 })
                    .collect(),
                s,
                c: options.c,
            };
            fit_binary(&obj, options.max_iters, options.tol)
        })
        .collect();
    Ok(LogisticRegressionModel {
        width: x.width,
        options,
        iterations: fits.iter().map(|f| f.iterations).collect(),
        converged: fits.iter().map(|f| f.converged).collect(),
        biases: fits.iter().map(|f| f.b).collect(),
        weights: fits.into_iter().map(|f| f.w).collect(),
        labels,
    })
}

impl LogisticRegressionModel {
    pub fn predict(&self, x: &SparseVec) -> Result<Prediction> {
        if x.max_index().is_some_and(|m| m >= self.width) {
            return Err(Error::InvalidInput(format!(
                "feature index {} outside model width {}",
                x.max_index().unwrap_or(0),
                self.width
            )));
        }
        let scores: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| sigmoid(x.dot_dense(w) + b))
            .collect();
        Ok(Prediction {
            label: self.labels[argmax_lowest(&scores)],
            scores: self.labels.iter().copied().zip(scores).collect(),
        })
    }
}

pub fn predict_logreg(model: &LogisticRegressionModel, x: &SparseVec) -> Result<Prediction> {
    model.predict(x)
}
