use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Splits indices into `k` stratified test folds.
///
/// Each label's indices are shuffled, then dealt round-robin with a pointer
/// that carries over from one label to the next, so both per-label and total
/// fold sizes differ by at most one.
pub fn stratified_kfold(labels: &[usize], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidInput(format!(
            "k must be at least 2, got {k}"
        )));
    }
    if k > labels.len() {
        return Err(Error::InvalidInput(format!(
            "cannot make {k} folds from {} samples",
            labels.len()
        )));
    }
    let mut by_label: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_label.entry(l).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for idx in by_label.values_mut() {
        idx.shuffle(&mut rng);
        for &i in idx.iter() {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    Ok(folds)
}

/// Turns test folds over `0..n` into train/test pairs.
pub fn folds_from_tests(n: usize, tests: Vec<Vec<usize>>) -> Vec<Fold> {
    tests
        .into_iter()
        .map(|test| {
            let mut in_test = vec![false; n];
            test.iter().for_each(|&i| in_test[i] = true);
            Fold {
                train: (0..n).filter(|&i| !in_test[i]).collect(),
                test,
            }
        })
        .collect()
}

/// One fold per group (issue thread), in ascending group order.
pub fn leave_one_group_out(groups: &[usize]) -> Result<Vec<Fold>> {
    let mut by_group: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &g) in groups.iter().enumerate() {
        by_group.entry(g).or_default().push(i);
    }
    if by_group.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "leave-one-issue-out needs at least 2 threads, found {}",
            by_group.len()
        )));
    }
    Ok(folds_from_tests(
        groups.len(),
        by_group.into_values().collect(),
    ))
}

pub fn leave_one_issue_out(dataset: &crate::corpus::Dataset) -> Result<Vec<Fold>> {
    leave_one_group_out(&dataset.thread_of_items())
}
