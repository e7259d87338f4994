//! Random forest of unpruned CART trees with weighted Gini impurity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{argmax_lowest, check_training_input, mix_seed, Prediction};
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, SparseVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaxFeatures {
    /// `ceil(sqrt(width))`
    Sqrt,
    All,
    Count(usize),
}

impl MaxFeatures {
    fn resolve(self, width: usize) -> usize {
        let k = match self {
            MaxFeatures::Sqrt => (width as f64).sqrt().ceil() as usize,
            MaxFeatures::All => width,
            MaxFeatures::Count(k) => k,
        };
        k.clamp(1, width.max(1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestOptions {
    pub n_estimators: usize,
    pub min_samples_split: usize,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestOptions {
    fn default() -> Self {
        ForestOptions {
            n_estimators: 100,
            min_samples_split: 2,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
            seed: 42,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Node {
    /// Samples with `x[feature] <= threshold` go left.
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
    /// Weighted class mass, indexed like the forest's labels.
    Leaf { mass: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    /// Root at index 0.
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    fn leaf(&self, x: &SparseVec) -> &[f64] {
        let mut i = 0usize;
        loop {
            match &self.nodes[i] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if x.get(*feature as usize) <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
                Node::Leaf { mass } => return mass,
            }
        }
    }

    /// Index into the forest's labels.
    pub fn vote(&self, x: &SparseVec) -> usize {
        argmax_lowest(self.leaf(x))
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Split { left, right, .. } => {
                    1 + go(nodes, *left as usize).max(go(nodes, *right as usize))
                }
                Node::Leaf { .. } => 0,
            }
        }
        go(&self.nodes, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForestModel {
    pub labels: Vec<usize>,
    pub trees: Vec<DecisionTree>,
    pub width: usize,
    pub options: ForestOptions,
}

/// Column-major copy of the training matrix.
struct Columns {
    cols: Vec<Vec<(u32, f64)>>,
}

impl Columns {
    fn new(x: &FeatureMatrix) -> Self {
        let mut cols = vec![Vec::new(); x.width];
        for (i, row) in x.rows.iter().enumerate() {
            for (j, v) in row.iter() {
                if v != 0.0 {
                    cols[j].push((i as u32, v));
                }
            }
        }
        Columns { cols }
    }
}

struct Builder<'a> {
    x: &'a FeatureMatrix,
    cols: &'a Columns,
    /// Position of each sample's label in the label list.
    class: &'a [usize],
    n_classes: usize,
    /// Sample weight times bootstrap multiplicity.
    weight: Vec<f64>,
    count: Vec<u32>,
    min_samples_split: usize,
    max_features: usize,
    // scratch
    in_node: Vec<u32>,
    feature_seen: Vec<u32>,
    stamp: u32,
}

struct Best {
    feature: usize,
    threshold: f64,
    score: f64,
}

fn purity(mass: &[f64]) -> f64 {
    let total: f64 = mass.iter().sum();
    if total <= 0.0 {
        0.0
    } else {
        mass.iter().map(|m| m * m).sum::<f64>() / total
    }
}

impl Builder<'_> {
    fn class_mass(&self, samples: &[u32]) -> Vec<f64> {
        let mut mass = vec![0.0; self.n_classes];
        for &s in samples {
            mass[self.class[s as usize]] += self.weight[s as usize];
        }
        mass
    }

    /// Evaluates every threshold of one feature. Returns `None` when the
    /// feature is constant within the node.
    fn evaluate(&self, feature: usize, node_mass: &[f64], n_node: usize) -> Option<Best> {
        let mut entries: Vec<(f64, u32)> = self.cols.cols[feature]
            .iter()
            .filter(|(s, _)| self.in_node[*s as usize] == self.stamp)
            .map(|&(s, v)| (v, s))
            .collect();
        let zeros = n_node - entries.len();
        let mut zero_mass = node_mass.to_vec();
        for &(_, s) in &entries {
            zero_mass[self.class[s as usize]] -= self.weight[s as usize];
        }
        entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let split_at = entries.partition_point(|e| e.0 < 0.0);

        // Ordered groups of (value, mass); the implicit zeros sit between
        // negatives and positives.
        let mut groups: Vec<(f64, Vec<f64>)> = Vec::new();
        let push = |groups: &mut Vec<(f64, Vec<f64>)>, v: f64, s: Option<u32>, m: &[f64]| {
            if groups.last().is_none_or(|g| g.0 != v) {
                groups.push((v, vec![0.0; self.n_classes]));
            }
            let g = &mut groups.last_mut().expect("pushed").1;
            match s {
                Some(s) => g[self.class[s as usize]] += self.weight[s as usize],
                None => g.iter_mut().zip(m).for_each(|(a, b)| *a += b),
            }
        };
        for &(v, s) in &entries[..split_at] {
            push(&mut groups, v, Some(s), &[]);
        }
        if zeros > 0 {
            push(&mut groups, 0.0, None, &zero_mass);
        }
        for &(v, s) in &entries[split_at..] {
            push(&mut groups, v, Some(s), &[]);
        }
        if groups.len() < 2 {
            return None;
        }

        let mut left = vec![0.0; self.n_classes];
        let mut best: Option<Best> = None;
        for k in 0..groups.len() - 1 {
            left.iter_mut().zip(&groups[k].1).for_each(|(a, b)| *a += b);
            let right: Vec<f64> = node_mass.iter().zip(&left).map(|(n, l)| n - l).collect();
            let score = purity(&left) + purity(&right);
            if best.as_ref().is_none_or(|b| score > b.score) {
                let (a, b) = (groups[k].0, groups[k + 1].0);
                let mut threshold = a + (b - a) / 2.0;
                if threshold >= b {
                    threshold = a;
                }
                best = Some(Best {
                    feature,
                    threshold,
                    score,
                });
            }
        }
        best
    }

    /// Features with a nonzero value in some node sample and a different
    /// value (zero included) elsewhere may be non-constant; all others are.
    fn candidates(&mut self, samples: &[u32]) -> Vec<usize> {
        let mut out = Vec::new();
        for &s in samples {
            for (j, v) in self.x.rows[s as usize].iter() {
                if v != 0.0 && self.feature_seen[j] != self.stamp {
                    self.feature_seen[j] = self.stamp;
                    out.push(j);
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn build(&mut self, root: Vec<u32>, rng: &mut ChaCha8Rng) -> DecisionTree {
        let mut nodes: Vec<Node> = vec![Node::Leaf { mass: Vec::new() }];
        let mut stack = vec![(0usize, root)];
        while let Some((id, samples)) = stack.pop() {
            let mass = self.class_mass(&samples);
            let count: usize = samples
                .iter()
                .map(|&s| self.count[s as usize] as usize)
                .sum();
            let pure = mass.iter().filter(|m| **m > 0.0).count() <= 1;
            let split = if pure || count < self.min_samples_split {
                None
            } else {
                self.find_split(&samples, &mass, rng)
            };
            let Some(best) = split else {
                nodes[id] = Node::Leaf { mass };
                continue;
            };
            let (l, r): (Vec<u32>, Vec<u32>) = samples
                .into_iter()
                .partition(|&s| self.x.rows[s as usize].get(best.feature) <= best.threshold);
            let left = nodes.len();
            nodes.push(Node::Leaf { mass: Vec::new() });
            nodes.push(Node::Leaf { mass: Vec::new() });
            nodes[id] = Node::Split {
                feature: best.feature as u32,
                threshold: best.threshold,
                left: left as u32,
                right: left as u32 + 1,
            };
            stack.push((left + 1, r));
            stack.push((left, l));
        }
        DecisionTree { nodes }
    }

    fn find_split(&mut self, samples: &[u32], mass: &[f64], rng: &mut ChaCha8Rng) -> Option<Best> {
        self.stamp += 1;
        for &s in samples {
            self.in_node[s as usize] = self.stamp;
        }
        let mut pool = self.candidates(samples);
        let mut evaluated = 0;
        let mut best: Option<Best> = None;
        // Draw without replacement until enough non-constant features are seen.
        while evaluated < self.max_features && !pool.is_empty() {
            let pick = rng.gen_range(0..pool.len());
            let feature = pool.swap_remove(pick);
            if let Some(b) = self.evaluate(feature, mass, samples.len()) {
                evaluated += 1;
                let better = best.as_ref().is_none_or(|cur| {
                    b.score > cur.score || (b.score == cur.score && b.feature < cur.feature)
                });
                if better {
                    best = Some(b);
                }
            }
        }
        best
    }
}

pub fn train_forest(
    x: &FeatureMatrix,
    y: &[usize],
    sample_weights: Option<&[f64]>,
    options: ForestOptions,
) -> Result<RandomForestModel> {
    let labels = check_training_input(x, y, sample_weights, 1)?;
    if options.n_estimators == 0 {
        return Err(Error::InvalidInput(
            "n_estimators must be at least 1".into(),
        ));
    }
    let class: Vec<usize> = y
        .iter()
        .map(|l| labels.binary_search(l).expect("label collected from y"))
        .collect();
    let cols = Columns::new(x);
    let n = x.len();
    let max_features = options.max_features.resolve(x.width);

    let trees: Vec<DecisionTree> = (0..options.n_estimators)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[options.seed, t as u64]));
            let mut count = vec![0u32; n];
            if options.bootstrap {
                for _ in 0..n {
                    count[rng.gen_range(0..n)] += 1;
                }
            } else {
                count.fill(1);
            }
            let weight = (0..n)
                .map(|i| count[i] as f64 * sample_weights.map_or(1.0, |s| s[i]))
                .collect();
            let root: Vec<u32> = (0..n as u32).filter(|&i| count[i as usize] > 0).collect();
            let mut b = Builder {
                x,
                cols: &cols,
                class: &class,
                n_classes: labels.len(),
                weight,
                count,
                min_samples_split: options.min_samples_split,
                max_features,
                in_node: vec![0; n],
                feature_seen: vec![0; x.width],
                stamp: 0,
            };
            b.build(root, &mut rng)
        })
        .collect();

    Ok(RandomForestModel {
        labels,
        trees,
        width: x.width,
        options,
    })
}

impl RandomForestModel {
    /// Scores are vote fractions; the plurality wins, ties to the lowest label.
    pub fn predict(&self, x: &SparseVec) -> Result<Prediction> {
        if let Some(m) = x.max_index().filter(|m| *m >= self.width) {
            return Err(Error::InvalidInput(format!(
                "feature index {m} outside model width {}",
                self.width
            )));
        }
        let mut votes = vec![0.0; self.labels.len()];
        for t in &self.trees {
            votes[t.vote(x)] += 1.0;
        }
        let total = self.trees.len() as f64;
        votes.iter_mut().for_each(|v| *v /= total);
        Ok(Prediction {
            label: self.labels[argmax_lowest(&votes)],
            scores: self.labels.iter().copied().zip(votes).collect(),
        })
    }
}

pub fn predict_forest(model: &RandomForestModel, x: &SparseVec) -> Result<Prediction> {
    model.predict(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(n: usize, bootstrap: bool) -> ForestOptions {
        ForestOptions {
            n_estimators: n,
            bootstrap,
            ..Default::default()
        }
    }

    #[test]
    fn memorizes_distinct_rows_without_bootstrap() {
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|i| {
                (0..9)
                    .map(|j| (((i + 3) * (j + 5) * 37 + i * i * j) % 61) as f64 - 30.0)
                    .collect()
            })
            .collect();
        let x = FeatureMatrix::from_dense(&rows);
        let y: Vec<usize> = (0..60).map(|i| (i * 31) % 4).collect();
        let m = train_forest(&x, &y, None, opts(3, false)).unwrap();
        for (r, &l) in x.rows.iter().zip(&y) {
            for t in &m.trees {
                assert_eq!(m.labels[t.vote(r)], l);
            }
        }
    }

    #[test]
    fn threshold_is_midpoint() {
        let x = FeatureMatrix::from_dense(&[vec![1.0], vec![3.0]]);
        let m = train_forest(&x, &[0, 1], None, opts(1, false)).unwrap();
        match &m.trees[0].nodes[0] {
            Node::Split { threshold, .. } => assert_eq!(*threshold, 2.0),
            n => panic!("expected split, got {n:?}"),
        }
        assert_eq!(m.predict(&SparseVec::from_dense(&[2.0])).unwrap().label, 0);
        assert_eq!(m.predict(&SparseVec::from_dense(&[2.5])).unwrap().label, 1);
    }

    #[test]
    fn min_samples_split_stops_growth() {
        let x = FeatureMatrix::from_dense(&[vec![1.0], vec![2.0], vec![3.0]]);
        let m = ForestOptions {
            min_samples_split: 4,
            ..opts(1, false)
        };
        let f = train_forest(&x, &[0, 1, 0], None, m).unwrap();
        assert_eq!(f.trees[0].nodes.len(), 1);
    }

    #[test]
    fn seeded_determinism() {
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|i| vec![(i % 7) as f64, (i % 5) as f64])
            .collect();
        let x = FeatureMatrix::from_dense(&rows);
        let y: Vec<usize> = (0..50).map(|i| i % 3).collect();
        let a = train_forest(&x, &y, None, opts(10, true)).unwrap();
        let b = train_forest(&x, &y, None, opts(10, true)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn identical_rows_become_a_leaf() {
        let x = FeatureMatrix::from_dense(&[vec![1.0], vec![1.0]]);
        let f = train_forest(&x, &[2, 1], None, opts(1, false)).unwrap();
        assert_eq!(f.trees[0].nodes.len(), 1);
        assert_eq!(f.predict(&SparseVec::from_dense(&[1.0])).unwrap().label, 1);
    }

    #[test]
    fn constant_labels_give_single_leaves() {
        let x = FeatureMatrix::from_dense(&[vec![0.0], vec![1.0], vec![2.0]]);
        let f = train_forest(&x, &[4, 4, 4], None, opts(5, true)).unwrap();
        assert!(f.trees.iter().all(|t| t.nodes.len() == 1));
        let p = f.predict(&SparseVec::from_dense(&[9.0])).unwrap();
        assert_eq!(p.label, 4);
        assert_eq!(p.scores, vec![(4, 1.0)]);
    }

    #[test]
    fn vote_fractions_sum_to_one() {
        let x = FeatureMatrix::from_dense(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]);
        let f = train_forest(&x, &[0, 1, 0, 1], None, opts(7, true)).unwrap();
        let p = f.predict(&SparseVec::from_dense(&[1.5])).unwrap();
        let s: f64 = p.scores.iter().map(|(_, v)| v).sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(f.predict(&SparseVec::from_pairs(vec![(1, 1.0)])).is_err());
    }
}
