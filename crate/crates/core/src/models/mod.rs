//! Classifiers and model persistence.

mod bundle;
mod forest;
mod logreg;

pub use bundle::{load_model, save_model, ModelBundle, MODEL_FORMAT_VERSION};
pub use forest::{
    predict_forest, train_forest, DecisionTree, ForestOptions, MaxFeatures, Node, RandomForestModel,
};
pub use logreg::{
    fit_binary, predict_logreg, train_logreg, BinaryFit, BinaryObjective, LogRegOptions,
    LogisticRegressionModel,
};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, SparseVec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    /// Winning label ordinal.
    pub label: usize,
    /// `(label ordinal, score)` for every trained label, ascending by label.
    pub scores: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameters")]
pub enum Model {
    LogisticRegression(LogisticRegressionModel),
    RandomForest(RandomForestModel),
}

impl Model {
    pub fn predict(&self, x: &SparseVec) -> Result<Prediction> {
        match self {
            Model::LogisticRegression(m) => m.predict(x),
            Model::RandomForest(m) => m.predict(x),
        }
    }

    pub fn labels(&self) -> &[usize] {
        match self {
            Model::LogisticRegression(m) => &m.labels,
            Model::RandomForest(m) => &m.labels,
        }
    }

    pub fn width(&self) -> usize {
        match self {
            Model::LogisticRegression(m) => m.width,
            Model::RandomForest(m) => m.width,
        }
    }
}

/// One point of the hyperparameter grid. Fields that do not apply to the
/// model family are `None`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_estimators: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_samples_split: Option<usize>,
    pub ngram_range: (usize, usize),
}

/// Index of the largest value; the first one wins ties.
pub(crate) fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Deterministic seed derivation from a sequence of components.
pub fn mix_seed(parts: &[u64]) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    parts
        .iter()
        .fold(0x6A09_E667_F3BC_C908, |acc, &p| splitmix(acc ^ splitmix(p)))
}

/// Validates a training set and returns its distinct labels, ascending.
pub(crate) fn check_training_input(
    x: &FeatureMatrix,
    y: &[usize],
    sample_weights: Option<&[f64]>,
    min_labels: usize,
) -> Result<Vec<usize>> {
    if y.is_empty() {
        return Err(Error::InvalidInput("training set is empty".into()));
    }
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "{} feature rows but {} labels",
            x.len(),
            y.len()
        )));
    }
    if let Some(s) = sample_weights {
        if s.len() != y.len() {
            return Err(Error::InvalidInput(format!(
                "{} sample weights for {} samples",
                s.len(),
                y.len()
            )));
        }
        if s.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidInput(
                "sample weights must be positive and finite".into(),
            ));
        }
    }
    if !x.all_finite() {
        return Err(Error::InvalidInput(
            "feature matrix contains NaN or infinite values".into(),
        ));
    }
    if let Some(row) = x
        .rows
        .iter()
        .position(|r| r.max_index().is_some_and(|m| m >= x.width))
    {
        return Err(Error::InvalidInput(format!(
            "row {row} has a feature index beyond width {}",
            x.width
        )));
    }
    let labels: Vec<usize> = y
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if labels.len() < min_labels {
        return Err(Error::InvalidInput(format!(
            "training needs at least {min_labels} distinct labels, found {}",
            labels.len()
        )));
    }
    Ok(labels)
}
