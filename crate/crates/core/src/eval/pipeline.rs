//! Fitting features, balancing and training on one train/test split.

use std::collections::BTreeSet;

use super::{Balancing, ExperimentConfig, Fold, ModelKind};
use crate::balance::{compute_class_weights, smote_resample_with, SingletonPolicy, SmoteConfig};
use crate::corpus::Dataset;
use crate::error::{Error, Result};
use crate::features::{
    thread_conversational, FeatureMatrix, FeatureSet, SparseVec, StandardScaler, TextualVectorizer,
    CONVERSATIONAL_WIDTH, DISCRETE_COLUMNS,
};
use crate::models::{
    mix_seed, train_forest, train_logreg, ForestOptions, Hyperparameters, LogRegOptions,
    MaxFeatures, Model, ModelBundle,
};

pub const SMOTE_K: usize = 5;

const TAG_SMOTE: u64 = 0x534d;
const TAG_MODEL: u64 = 0x4d4f;

/// Per-item inputs extracted once from a dataset.
#[derive(Clone, Debug)]
pub struct PreparedData {
    pub tokens: Vec<Vec<String>>,
    /// Raw (unscaled) conversational rows.
    pub conv: Vec<[f64; CONVERSATIONAL_WIDTH]>,
    pub labels: Vec<usize>,
    /// Owning thread of each item.
    pub groups: Vec<usize>,
    pub group_names: Vec<String>,
    /// Threads whose timestamps were synthesized on import.
    pub synthetic_groups: BTreeSet<usize>,
}

impl PreparedData {
    pub fn from_dataset(dataset: &Dataset) -> Self {
        let conv_by_thread: Vec<_> = dataset.threads.iter().map(thread_conversational).collect();
        let mut data = PreparedData {
            tokens: Vec::with_capacity(dataset.len()),
            conv: Vec::with_capacity(dataset.len()),
            labels: dataset.label_ordinals(),
            groups: dataset.thread_of_items(),
            group_names: dataset.threads.iter().map(|t| t.display_id()).collect(),
            synthetic_groups: dataset
                .threads
                .iter()
                .enumerate()
                .filter(|(_, t)| t.timestamps_synthetic)
                .map(|(i, _)| i)
                .collect(),
        };
        for item in &dataset.items {
            data.tokens.push(dataset.sentence(item).tokens.clone());
            data.conv
                .push(conv_by_thread[item.thread][item.comment][item.sentence].to_dense());
        }
        data
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels_of(&self, idx: &[usize]) -> Vec<usize> {
        idx.iter().map(|&i| self.labels[i]).collect()
    }

    fn check_config(&self, config: &ExperimentConfig) -> Result<()> {
        if config.feature_set.uses_conversational() && !self.synthetic_groups.is_empty() {
            let names: Vec<&str> = self
                .synthetic_groups
                .iter()
                .map(|&g| self.group_names[g].as_str())
                .collect();
            return Err(Error::Validation(format!(
                "configuration {config} needs real timestamps but these threads have synthetic ones: {}",
                names.join(", ")
            )));
        }
        Ok(())
    }
}

/// Vectorizer and scaler fitted on one training split.
#[derive(Clone, Debug, PartialEq)]
pub struct FittedFeatures {
    pub feature_set: FeatureSet,
    pub vectorizer: Option<TextualVectorizer>,
    pub scaler: Option<StandardScaler>,
}

impl FittedFeatures {
    pub fn fit(
        data: &PreparedData,
        train: &[usize],
        feature_set: FeatureSet,
        ngram_range: (usize, usize),
    ) -> Result<Self> {
        let vectorizer = if feature_set.uses_textual() {
            let docs: Vec<&[String]> = train.iter().map(|&i| data.tokens[i].as_slice()).collect();
            Some(TextualVectorizer::fit(&docs, ngram_range)?)
        } else {
            None
        };
        let scaler = if feature_set.uses_conversational() {
            let rows: Vec<_> = train.iter().map(|&i| data.conv[i]).collect();
            Some(StandardScaler::fit(&rows)?)
        } else {
            None
        };
        Ok(FittedFeatures {
            feature_set,
            vectorizer,
            scaler,
        })
    }

    pub fn textual_width(&self) -> usize {
        self.vectorizer.as_ref().map_or(0, |v| v.width())
    }

    pub fn width(&self) -> usize {
        self.textual_width() + self.scaler.as_ref().map_or(0, |_| CONVERSATIONAL_WIDTH)
    }

    pub fn row(&self, tokens: &[String], conv: &[f64; CONVERSATIONAL_WIDTH]) -> SparseVec {
        let mut row = self
            .vectorizer
            .as_ref()
            .map_or_else(SparseVec::default, |v| v.transform(tokens));
        if let Some(s) = &self.scaler {
            row.append_shifted(
                s.transform(conv).into_iter().enumerate(),
                self.textual_width(),
            );
        }
        row
    }

    pub fn matrix(&self, data: &PreparedData, idx: &[usize]) -> FeatureMatrix {
        FeatureMatrix::new(
            idx.iter()
                .map(|&i| self.row(&data.tokens[i], &data.conv[i]))
                .collect(),
            self.width(),
        )
    }

    /// Column indices holding 0/1 conversational values.
    pub fn discrete_columns(&self) -> Vec<usize> {
        if self.scaler.is_none() {
            return Vec::new();
        }
        DISCRETE_COLUMNS
            .iter()
            .map(|c| c + self.textual_width())
            .collect()
    }
}

pub(crate) struct TrainingSet {
    pub x: FeatureMatrix,
    pub y: Vec<usize>,
    pub weights: Option<Vec<f64>>,
}

pub(crate) fn balanced_training_set(
    features: &FittedFeatures,
    data: &PreparedData,
    train: &[usize],
    balancing: Balancing,
    seed: u64,
) -> Result<TrainingSet> {
    let x = features.matrix(data, train);
    let y = data.labels_of(train);
    match balancing {
        Balancing::ClassWeight => {
            let weights = compute_class_weights(&y).per_sample(&y);
            Ok(TrainingSet {
                x,
                y,
                weights: Some(weights),
            })
        }
        Balancing::Smote => {
            let cfg = SmoteConfig {
                k: SMOTE_K,
                seed: mix_seed(&[seed, TAG_SMOTE]),
                discrete_columns: features.discrete_columns(),
                singleton: SingletonPolicy::Duplicate,
                undersample_ratio: None,
            };
            let out = smote_resample_with(&x, &y, &cfg)?;
            Ok(TrainingSet {
                x: out.x,
                y: out.y,
                weights: None,
            })
        }
    }
}

pub(crate) fn train_model(
    model: ModelKind,
    hp: &Hyperparameters,
    set: &TrainingSet,
    seed: u64,
) -> Result<Model> {
    let weights = set.weights.as_deref();
    match model {
        ModelKind::LogisticRegression => {
            let c =
                hp.c.ok_or_else(|| Error::InvalidInput("logistic regression needs C".into()))?;
            let options = LogRegOptions {
                c,
                ..LogRegOptions::default()
            };
            Ok(Model::LogisticRegression(train_logreg(
                &set.x, &set.y, weights, options,
            )?))
        }
        ModelKind::RandomForest => {
            let options = ForestOptions {
                n_estimators: hp.n_estimators.ok_or_else(|| {
                    Error::InvalidInput("random forest needs n_estimators".into())
                })?,
                min_samples_split: hp.min_samples_split.ok_or_else(|| {
                    Error::InvalidInput("random forest needs min_samples_split".into())
                })?,
                max_features: MaxFeatures::Sqrt,
                bootstrap: true,
                seed: mix_seed(&[seed, TAG_MODEL]),
            };
            Ok(Model::RandomForest(train_forest(
                &set.x, &set.y, weights, options,
            )?))
        }
    }
}

fn warn_unseen_labels(data: &PreparedData, fold: &Fold) {
    let train: BTreeSet<usize> = fold.train.iter().map(|&i| data.labels[i]).collect();
    let missing: BTreeSet<usize> = fold
        .test
        .iter()
        .map(|&i| data.labels[i])
        .filter(|l| !train.contains(l))
        .collect();
    if !missing.is_empty() {
        log::warn!(
            "labels {missing:?} appear in a test split but not in its training split; they score 0"
        );
    }
}

/// Trains one model per hyperparameter point on `fold.train` and predicts
/// `fold.test`. All points must share an ngram range, so features and
/// balancing are computed once.
pub(crate) fn fit_predict_points(
    data: &PreparedData,
    fold: &Fold,
    config: &ExperimentConfig,
    points: &[Hyperparameters],
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    let Some(first) = points.first() else {
        return Ok(Vec::new());
    };
    debug_assert!(points.iter().all(|p| p.ngram_range == first.ngram_range));
    warn_unseen_labels(data, fold);
    let features = FittedFeatures::fit(data, &fold.train, config.feature_set, first.ngram_range)?;
    let set = balanced_training_set(&features, data, &fold.train, config.balancing, seed)?;
    let test = features.matrix(data, &fold.test);
    points
        .iter()
        .enumerate()
        .map(|(pi, hp)| {
            let model = train_model(config.model, hp, &set, mix_seed(&[seed, pi as u64]))?;
            test.rows
                .iter()
                .map(|r| model.predict(r).map(|p| p.label))
                .collect()
        })
        .collect()
}

/// Fits the full pipeline on `fold.train` with fixed hyperparameters and
/// returns predicted label ordinals for `fold.test`.
pub fn fit_predict(
    data: &PreparedData,
    fold: &Fold,
    config: &ExperimentConfig,
    hp: &Hyperparameters,
    seed: u64,
) -> Result<Vec<usize>> {
    data.check_config(config)?;
    let mut out = fit_predict_points(data, fold, config, std::slice::from_ref(hp), seed)?;
    Ok(out.pop().expect("one point"))
}

pub(crate) fn check_config(data: &PreparedData, config: &ExperimentConfig) -> Result<()> {
    data.check_config(config)
}

/// Tunes hyperparameters on the whole dataset and trains a deployable bundle.
pub fn train_bundle(
    dataset: &Dataset,
    config: &ExperimentConfig,
    seed: u64,
    threads: Option<usize>,
) -> Result<ModelBundle> {
    let data = PreparedData::from_dataset(dataset);
    data.check_config(config)?;
    super::with_threads(threads, || {
        let all: Vec<usize> = (0..data.len()).collect();
        let tuned = super::grid_search(&data, &all, config, mix_seed(&[seed, 0x5455]))?;
        let hp = tuned.best;
        let features = FittedFeatures::fit(&data, &all, config.feature_set, hp.ngram_range)?;
        let model_seed = mix_seed(&[seed, 0x4649]);
        let set = balanced_training_set(&features, &data, &all, config.balancing, model_seed)?;
        let model = train_model(config.model, &hp, &set, model_seed)?;
        ModelBundle::new(
            config.id(),
            config.feature_set,
            hp,
            seed,
            model,
            features.vectorizer,
            features.scaler,
        )
    })?
}
