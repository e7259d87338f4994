use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{grid_search, GridPoint};
use super::pipeline::{check_config, fit_predict_points};
use super::{
    folds_from_tests, leave_one_group_out, score_predictions, stratified_kfold, with_threads,
    Averages, ExperimentConfig, Fold, MetricsReport, PreparedData, Scenario,
};
use crate::corpus::Dataset;
use crate::error::Result;
use crate::models::{mix_seed, Hyperparameters};

pub const OUTER_FOLDS: usize = 5;
pub const ALL_SCENARIOS: [Scenario; 2] = [Scenario::StratifiedKFold, Scenario::LeaveOneIssueOut];

const TAG_OUTER: u64 = 0x4f55;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    /// Threads contributing test sentences.
    pub test_threads: Vec<String>,
    pub hyperparameters: Hyperparameters,
    pub grid: Vec<GridPoint>,
    pub metrics: MetricsReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub description: String,
    pub scenario: Scenario,
    pub seed: u64,
    pub samples: usize,
    /// Fold-size-weighted mean of the per-fold weighted F1.
    pub headline_f1: f64,
    /// Per-fold weighted averages, averaged with fold test sizes as weights.
    pub fold_weighted: Averages,
    /// Per-fold weighted averages, averaged uniformly.
    pub fold_uniform: Averages,
    /// Metrics over all folds' test predictions taken together.
    pub pooled: MetricsReport,
    pub folds: Vec<FoldReport>,
}

/// Outer train/test splits for a scenario. Folds depend only on the data
/// and seed, so every configuration sees the same splits.
pub fn outer_folds(data: &PreparedData, scenario: Scenario, seed: u64) -> Result<Vec<Fold>> {
    match scenario {
        Scenario::StratifiedKFold => Ok(folds_from_tests(
            data.len(),
            stratified_kfold(&data.labels, OUTER_FOLDS, mix_seed(&[seed, TAG_OUTER]))?,
        )),
        Scenario::LeaveOneIssueOut => leave_one_group_out(&data.groups),
    }
}

fn mean_averages(reports: &[&MetricsReport], weights: &[f64]) -> Averages {
    let total: f64 = weights.iter().sum();
    let mut a = Averages::default();
    for (r, w) in reports.iter().zip(weights) {
        a.precision += w * r.weighted.precision;
        a.recall += w * r.weighted.recall;
        a.f1 += w * r.weighted.f1;
    }
    a.precision /= total;
    a.recall /= total;
    a.f1 /= total;
    a
}

pub(crate) fn run_prepared(
    data: &PreparedData,
    scenario: Scenario,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<ExperimentReport> {
    check_config(data, config)?;
    let folds = outer_folds(data, scenario, seed)?;
    let cfg_seed = mix_seed(&[seed, scenario.number() as u64, config.index() as u64]);
    log::info!(
        "{} scenario {}: {} folds over {} sentences",
        config,
        scenario.number(),
        folds.len(),
        data.len()
    );
    let results: Vec<Result<(FoldReport, Vec<usize>)>> = folds
        .par_iter()
        .enumerate()
        .map(|(fi, fold)| {
            let fold_seed = mix_seed(&[cfg_seed, fi as u64]);
            let tuned = grid_search(data, &fold.train, config, mix_seed(&[fold_seed, 1]))?;
            let hp = tuned.best;
            let preds = fit_predict_points(data, fold, config, &[hp], mix_seed(&[fold_seed, 2]))?
                .pop()
                .expect("one point");
            let gold = data.labels_of(&fold.test);
            let mut metrics = score_predictions(&gold, &preds)?;
            metrics.config = Some(config.id());
            metrics.fold = Some(fi);
            let mut threads: Vec<usize> = fold.test.iter().map(|&i| data.groups[i]).collect();
            threads.sort_unstable();
            threads.dedup();
            log::debug!(
                "{config} fold {fi}: F1 {:.4} with {hp:?}",
                metrics.weighted.f1
            );
            Ok((
                FoldReport {
                    fold: fi,
                    train_size: fold.train.len(),
                    test_size: fold.test.len(),
                    test_threads: threads
                        .iter()
                        .map(|&g| data.group_names[g].clone())
                        .collect(),
                    hyperparameters: hp,
                    grid: tuned.points,
                    metrics,
                },
                preds,
            ))
        })
        .collect();

    let mut reports = Vec::with_capacity(folds.len());
    let mut all_gold = Vec::new();
    let mut all_pred = Vec::new();
    for (fold, r) in folds.iter().zip(results) {
        let (report, preds) = r?;
        all_gold.extend(data.labels_of(&fold.test));
        all_pred.extend(preds);
        reports.push(report);
    }
    let metrics: Vec<&MetricsReport> = reports.iter().map(|r| &r.metrics).collect();
    let sizes: Vec<f64> = reports.iter().map(|r| r.test_size as f64).collect();
    let fold_weighted = mean_averages(&metrics, &sizes);
    let fold_uniform = mean_averages(&metrics, &vec![1.0; metrics.len()]);
    let mut pooled = score_predictions(&all_gold, &all_pred)?;
    pooled.config = Some(config.id());
    Ok(ExperimentReport {
        config: *config,
        description: config.describe(),
        scenario,
        seed,
        samples: data.len(),
        headline_f1: fold_weighted.f1,
        fold_weighted,
        fold_uniform,
        pooled,
        folds: reports,
    })
}

/// Nested cross-validated evaluation of one configuration.
///
/// `threads` pins the worker count (1 runs serially); results do not depend
/// on it.
pub fn run_experiment(
    dataset: &Dataset,
    scenario: Scenario,
    config: &ExperimentConfig,
    seed: u64,
    threads: Option<usize>,
) -> Result<ExperimentReport> {
    let data = PreparedData::from_dataset(dataset);
    with_threads(threads, || run_prepared(&data, scenario, config, seed))?
}

/// Every configuration in table order. A failing configuration yields an
/// error in its slot without stopping the others.
pub fn run_all(
    dataset: &Dataset,
    scenario: Scenario,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<(ExperimentConfig, Result<ExperimentReport>)>> {
    let data = PreparedData::from_dataset(dataset);
    with_threads(threads, || {
        ExperimentConfig::all()
            .into_iter()
            .map(|c| {
                let r = run_prepared(&data, scenario, &c, seed);
                if let Err(e) = &r {
                    log::error!("configuration {c} failed: {e}");
                }
                (c, r)
            })
            .collect()
    })
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    /// Aligned text table of pooled per-label results followed by the
    /// weighted averages.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} ({}), scenario {}, {} folds, seed {}",
            self.config,
            self.description,
            self.scenario.number(),
            self.folds.len(),
            self.seed
        );
        let width = self
            .pooled
            .per_label
            .iter()
            .map(|l| l.name.len())
            .chain(["Weighted average/Total".len()])
            .max()
            .unwrap_or(0);
        let _ = writeln!(
            out,
            "{:<width$}  {:>9}  {:>6}  {:>8}  {:>7}",
            "Label", "Precision", "Recall", "F1-Score", "Support"
        );
        for l in &self.pooled.per_label {
            let _ = writeln!(
                out,
                "{:<width$}  {:>9.2}  {:>6.2}  {:>8.2}  {:>7}",
                l.name, l.precision, l.recall, l.f1, l.support
            );
        }
        let w = &self.pooled.weighted;
        let _ = writeln!(
            out,
            "{:<width$}  {:>9.2}  {:>6.2}  {:>8.2}  {:>7}",
            "Weighted average/Total", w.precision, w.recall, w.f1, self.pooled.support
        );
        let f = &self.fold_weighted;
        let _ = writeln!(
            out,
            "{:<width$}  {:>9.2}  {:>6.2}  {:>8.2}",
            "Mean over folds", f.precision, f.recall, f.f1
        );
        out
    }
}
