use std::collections::{BTreeMap, BTreeSet};

use super::{InfoType, IssueThread, Sentence};
use crate::error::{Error, Result};

/// Reference to one training sentence and its single label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DatasetItem {
    pub thread: usize,
    pub comment: usize,
    /// 0-based position within `comments[comment].sentences`.
    pub sentence: usize,
    pub label: InfoType,
}

/// Single-labeled sentences selected for training and evaluation.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub threads: Vec<IssueThread>,
    pub items: Vec<DatasetItem>,
    pub class_counts: BTreeMap<InfoType, usize>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn sentence(&self, item: &DatasetItem) -> &Sentence {
        &self.threads[item.thread].comments[item.comment].sentences[item.sentence]
    }

    pub fn labels(&self) -> Vec<InfoType> {
        self.items.iter().map(|i| i.label).collect()
    }

    /// Label ordinals, the form consumed by models and metrics.
    pub fn label_ordinals(&self) -> Vec<usize> {
        self.items.iter().map(|i| i.label.ordinal()).collect()
    }

    /// Owning thread index of each item.
    pub fn thread_of_items(&self) -> Vec<usize> {
        self.items.iter().map(|i| i.thread).collect()
    }
}

/// Keeps sentences with exactly one label that is not in `excluded`.
///
/// Multi-labeled and unlabeled sentences stay in the threads but produce no
/// item.
pub fn filter_for_training(
    threads: &[IssueThread],
    excluded: &BTreeSet<InfoType>,
) -> Result<Dataset> {
    let mut items = Vec::new();
    let mut class_counts = BTreeMap::new();
    for (ti, thread) in threads.iter().enumerate() {
        for (ci, comment) in thread.comments.iter().enumerate() {
            for (si, sentence) in comment.sentences.iter().enumerate() {
                let [label] = sentence.labels[..] else {
                    continue;
                };
                if excluded.contains(&label) {
                    continue;
                }
                items.push(DatasetItem {
                    thread: ti,
                    comment: ci,
                    sentence: si,
                    label,
                });
                *class_counts.entry(label).or_insert(0) += 1;
            }
        }
    }
    if items.is_empty() {
        return Err(Error::InvalidInput(
            "no single-labeled, non-excluded sentences remain for training".into(),
        ));
    }
    Ok(Dataset {
        threads: threads.to_vec(),
        items,
        class_counts,
    })
}

/// Per-label count and fraction of the dataset.
pub fn dataset_stats(ds: &Dataset) -> Result<BTreeMap<InfoType, (usize, f64)>> {
    if ds.is_empty() {
        return Err(Error::InvalidInput("dataset is empty".into()));
    }
    let n = ds.len() as f64;
    Ok(ds
        .class_counts
        .iter()
        .map(|(&label, &count)| (label, (count, count as f64 / n)))
        .collect())
}
