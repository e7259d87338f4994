//! Class imbalance handling: balanced class weights and SMOTE over-sampling.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, SparseVec};

/// Per-label weights `N / (K * n_c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassWeights(pub BTreeMap<usize, f64>);

impl ClassWeights {
    pub fn get(&self, label: usize) -> f64 {
        self.0.get(&label).copied().unwrap_or(1.0)
    }

    /// Expands to one weight per sample.
    pub fn per_sample(&self, labels: &[usize]) -> Vec<f64> {
        labels.iter().map(|&l| self.get(l)).collect()
    }
}

pub fn compute_class_weights(labels: &[usize]) -> ClassWeights {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0) += 1;
    }
    let n = labels.len() as f64;
    let k = counts.len() as f64;
    ClassWeights(
        counts
            .into_iter()
            .map(|(l, c)| (l, n / (k * c as f64)))
            .collect(),
    )
}

/// What to do with a label that has a single sample and needs synthesis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SingletonPolicy {
    #[default]
    Error,
    /// Synthesize exact copies of the lone sample.
    Duplicate,
}

#[derive(Clone, Debug)]
pub struct SmoteConfig {
    pub k: usize,
    pub seed: u64,
    /// Columns holding 0/1 (or one-hot) values. Synthetic values there are
    /// taken from the nearer parent instead of interpolated.
    pub discrete_columns: Vec<usize>,
    pub singleton: SingletonPolicy,
    /// Randomly reduce the largest label(s) to this fraction of their count
    /// before over-sampling. `None` or 1.0 leaves them untouched.
    pub undersample_ratio: Option<f64>,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig {
            k: 5,
            seed: 42,
            discrete_columns: Vec::new(),
            singleton: SingletonPolicy::Error,
            undersample_ratio: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SmoteOutput {
    pub x: FeatureMatrix,
    pub y: Vec<usize>,
    /// Number of leading rows that are original samples.
    pub n_original: usize,
    /// For each synthetic row (in order): indices of its two parents in the
    /// input matrix, and the interpolation factor.
    pub parents: Vec<(usize, usize, f64)>,
}

fn squared_distance(a: &SparseVec, b: &SparseVec) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < a.indices.len() || j < b.indices.len() {
        let ai = a.indices.get(i).copied().unwrap_or(u32::MAX);
        let bj = b.indices.get(j).copied().unwrap_or(u32::MAX);
        let d = if ai < bj {
            i += 1;
            a.values[i - 1]
        } else if bj < ai {
            j += 1;
            -b.values[j - 1]
        } else {
            i += 1;
            j += 1;
            a.values[i - 1] - b.values[j - 1]
        };
        acc += d * d;
    }
    acc
}

/// `x + lambda * (neighbor - x)`, with discrete columns copied from the
/// nearer parent.
fn interpolate(
    x: &SparseVec,
    neighbor: &SparseVec,
    lambda: f64,
    discrete: &BTreeSet<usize>,
) -> SparseVec {
    let mut pairs = Vec::with_capacity(x.nnz() + neighbor.nnz());
    let (mut i, mut j) = (0, 0);
    while i < x.indices.len() || j < neighbor.indices.len() {
        let xi = x.indices.get(i).copied().unwrap_or(u32::MAX);
        let nj = neighbor.indices.get(j).copied().unwrap_or(u32::MAX);
        let (col, a, b) = if xi < nj {
            i += 1;
            (xi, x.values[i - 1], 0.0)
        } else if nj < xi {
            j += 1;
            (nj, 0.0, neighbor.values[j - 1])
        } else {
            i += 1;
            j += 1;
            (xi, x.values[i - 1], neighbor.values[j - 1])
        };
        let v = if discrete.contains(&(col as usize)) {
            if lambda < 0.5 {
                a
            } else {
                b
            }
        } else {
            a + lambda * (b - a)
        };
        pairs.push((col, v));
    }
    SparseVec::from_pairs(pairs)
}

/// Over-samples every non-majority label up to the majority count.
pub fn smote_resample(
    x: &FeatureMatrix,
    y: &[usize],
    k: usize,
    seed: u64,
) -> Result<(FeatureMatrix, Vec<usize>)> {
    let out = smote_resample_with(
        x,
        y,
        &SmoteConfig {
            k,
            seed,
            ..SmoteConfig::default()
        },
    )?;
    Ok((out.x, out.y))
}

pub fn smote_resample_with(
    x: &FeatureMatrix,
    y: &[usize],
    cfg: &SmoteConfig,
) -> Result<SmoteOutput> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "{} feature rows but {} labels",
            x.len(),
            y.len()
        )));
    }
    if cfg.k == 0 {
        return Err(Error::InvalidInput("SMOTE needs k >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in y.iter().enumerate() {
        members.entry(l).or_default().push(i);
    }

    if let Some(ratio) = cfg.undersample_ratio {
        if !(ratio > 0.0 && ratio <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "undersample ratio must lie in (0, 1], got {ratio}"
            )));
        }
        let max = members.values().map(Vec::len).max().unwrap_or(0);
        for idx in members.values_mut().filter(|m| m.len() == max) {
            let keep = ((idx.len() as f64) * ratio).ceil() as usize;
            idx.shuffle(&mut rng);
            idx.truncate(keep.max(1));
            idx.sort_unstable();
        }
    }

    let mut kept: Vec<usize> = members.values().flatten().copied().collect();
    kept.sort_unstable();
    let target = members.values().map(Vec::len).max().unwrap_or(0);
    let discrete: BTreeSet<usize> = cfg.discrete_columns.iter().copied().collect();

    let mut rows: Vec<SparseVec> = kept.iter().map(|&i| x.rows[i].clone()).collect();
    let mut labels: Vec<usize> = kept.iter().map(|&i| y[i]).collect();
    let n_original = rows.len();
    let mut parents = Vec::new();

    for (&label, idx) in &members {
        let n_c = idx.len();
        if n_c >= target {
            continue;
        }
        if n_c == 1 && cfg.singleton == SingletonPolicy::Error {
            return Err(Error::InvalidInput(format!(
                "label {label} has a single sample; SMOTE needs at least two \
                 (duplicate the sample or exclude the label)"
            )));
        }
        let k_eff = cfg.k.min(n_c.saturating_sub(1)).max(1);
        let neighbors: Vec<Vec<usize>> = idx
            .iter()
            .map(|&a| {
                let mut d: Vec<(f64, usize)> = idx
                    .iter()
                    .filter(|&&b| b != a)
                    .map(|&b| (squared_distance(&x.rows[a], &x.rows[b]), b))
                    .collect();
                d.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
                let mut nn: Vec<usize> = d.into_iter().take(k_eff).map(|(_, b)| b).collect();
                if nn.is_empty() {
                    nn.push(a);
                }
                nn
            })
            .collect();
        for _ in 0..target - n_c {
            let m = rng.gen_range(0..n_c);
            let base = idx[m];
            let nb = neighbors[m][rng.gen_range(0..neighbors[m].len())];
            let lambda: f64 = rng.gen();
            rows.push(interpolate(&x.rows[base], &x.rows[nb], lambda, &discrete));
            labels.push(label);
            parents.push((base, nb, lambda));
        }
    }
    Ok(SmoteOutput {
        x: FeatureMatrix::new(rows, x.width),
        y: labels,
        n_original,
        parents,
    })
}
