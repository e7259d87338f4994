use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pipeline::fit_predict_points;
use super::{
    folds_from_tests, score_predictions, stratified_kfold, ExperimentConfig, Fold, ModelKind,
    PreparedData,
};
use crate::error::{Error, Result};
use crate::models::{mix_seed, Hyperparameters};

pub const INNER_FOLDS: usize = 5;
const C_VALUES: [f64; 4] = [0.01, 0.1, 1.0, 10.0];
const MIN_SAMPLES_SPLIT: [usize; 3] = [2, 5, 10];
const N_ESTIMATORS: [usize; 3] = [10, 50, 100];
const NGRAM_RANGES: [(usize, usize); 2] = [(1, 1), (1, 2)];

/// Grid points applicable to `config`, simplest first: smaller C, then
/// fewer trees, then smaller min_samples_split, then narrower n-grams.
pub fn hyperparameter_grid(config: &ExperimentConfig) -> Vec<Hyperparameters> {
    let ngrams: &[(usize, usize)] = if config.feature_set.uses_textual() {
        &NGRAM_RANGES
    } else {
        &NGRAM_RANGES[..1]
    };
    let mut out = Vec::new();
    match config.model {
        ModelKind::LogisticRegression => {
            for c in C_VALUES {
                for &ngram_range in ngrams {
                    out.push(Hyperparameters {
                        c: Some(c),
                        n_estimators: None,
                        min_samples_split: None,
                        ngram_range,
                    });
                }
            }
        }
        ModelKind::RandomForest => {
            for n in N_ESTIMATORS {
                for m in MIN_SAMPLES_SPLIT {
                    for &ngram_range in ngrams {
                        out.push(Hyperparameters {
                            c: None,
                            n_estimators: Some(n),
                            min_samples_split: Some(m),
                            ngram_range,
                        });
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub hyperparameters: Hyperparameters,
    pub mean_f1: f64,
    pub fold_f1: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub best: Hyperparameters,
    /// In grid order.
    pub points: Vec<GridPoint>,
}

/// Picks the grid point with the highest mean weighted F1 over an inner
/// stratified 5-fold split of `train`. Ties go to the earliest (simplest)
/// point.
pub fn grid_search(
    data: &PreparedData,
    train: &[usize],
    config: &ExperimentConfig,
    seed: u64,
) -> Result<GridSearchResult> {
    super::pipeline::check_config(data, config)?;
    let grid = hyperparameter_grid(config);
    let labels = data.labels_of(train);
    if train.len() < INNER_FOLDS {
        return Err(Error::InvalidInput(format!(
            "inner cross-validation needs at least {INNER_FOLDS} training samples, got {}",
            train.len()
        )));
    }
    let local = folds_from_tests(train.len(), stratified_kfold(&labels, INNER_FOLDS, seed)?);
    let inner: Vec<Fold> = local
        .into_iter()
        .map(|f| Fold {
            train: f.train.iter().map(|&i| train[i]).collect(),
            test: f.test.iter().map(|&i| train[i]).collect(),
        })
        .collect();

    // Points grouped by n-gram range share fitted features.
    let mut groups: Vec<((usize, usize), Vec<usize>)> = Vec::new();
    for (pi, hp) in grid.iter().enumerate() {
        match groups.iter_mut().find(|g| g.0 == hp.ngram_range) {
            Some(g) => g.1.push(pi),
            None => groups.push((hp.ngram_range, vec![pi])),
        }
    }
    let jobs: Vec<(usize, usize)> = (0..inner.len())
        .flat_map(|f| (0..groups.len()).map(move |g| (f, g)))
        .collect();
    let results: Vec<Result<Vec<f64>>> = jobs
        .par_iter()
        .map(|&(f, g)| {
            let fold = &inner[f];
            let points: Vec<Hyperparameters> = groups[g].1.iter().map(|&pi| grid[pi]).collect();
            let job_seed = mix_seed(&[seed, f as u64, g as u64]);
            let preds = fit_predict_points(data, fold, config, &points, job_seed)?;
            let gold = data.labels_of(&fold.test);
            preds
                .iter()
                .map(|p| score_predictions(&gold, p).map(|r| r.weighted.f1))
                .collect()
        })
        .collect();

    let mut fold_f1 = vec![vec![0.0; inner.len()]; grid.len()];
    for (&(f, g), r) in jobs.iter().zip(results) {
        for (&pi, f1) in groups[g].1.iter().zip(r?) {
            fold_f1[pi][f] = f1;
        }
    }
    let points: Vec<GridPoint> = grid
        .iter()
        .zip(fold_f1)
        .map(|(hp, fold_f1)| GridPoint {
            hyperparameters: *hp,
            mean_f1: fold_f1.iter().sum::<f64>() / fold_f1.len() as f64,
            fold_f1,
        })
        .collect();
    let mut best = 0;
    for (i, p) in points.iter().enumerate() {
        if p.mean_f1 > points[best].mean_f1 {
            best = i;
        }
    }
    Ok(GridSearchResult {
        best: points[best].hyperparameters,
        points,
    })
}
