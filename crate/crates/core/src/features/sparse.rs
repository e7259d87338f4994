use serde::{Deserialize, Serialize};

/// Sparse real vector with strictly increasing indices.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVec {
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl SparseVec {
    /// Builds from (index, value) pairs in any order; duplicates are summed
    /// and explicit zeros dropped.
    pub fn from_pairs(mut pairs: Vec<(u32, f64)>) -> Self {
        pairs.sort_by_key(|(i, _)| *i);
        let mut out = SparseVec::default();
        for (i, v) in pairs {
            if out.indices.last() == Some(&i) {
                *out.values.last_mut().expect("parallel vectors") += v;
            } else {
                out.indices.push(i);
                out.values.push(v);
            }
        }
        out.retain_nonzero();
        out
    }

    pub fn from_dense(dense: &[f64]) -> Self {
        let mut out = SparseVec::default();
        for (i, &v) in dense.iter().enumerate() {
            if v != 0.0 {
                out.indices.push(i as u32);
                out.values.push(v);
            }
        }
        out
    }

    fn retain_nonzero(&mut self) {
        let mut k = 0;
        for j in 0..self.indices.len() {
            if self.values[j] != 0.0 {
                self.indices[k] = self.indices[j];
                self.values[k] = self.values[j];
                k += 1;
            }
        }
        self.indices.truncate(k);
        self.values.truncate(k);
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .zip(&self.values)
            .map(|(&i, &v)| (i as usize, v))
    }

    pub fn get(&self, index: usize) -> f64 {
        match self.indices.binary_search(&(index as u32)) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(i, v)| v * dense[i]).sum()
    }

    pub fn dot(&self, other: &SparseVec) -> f64 {
        let (mut a, mut b, mut acc) = (0, 0, 0.0);
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.indices.last().map(|&i| i as usize)
    }

    pub fn to_dense(&self, width: usize) -> Vec<f64> {
        let mut d = vec![0.0; width];
        for (i, v) in self.iter() {
            d[i] = v;
        }
        d
    }

    /// Appends `other` with its indices shifted by `offset`. All of `other`'s
    /// shifted indices must exceed this vector's.
    pub fn append_shifted(&mut self, other: impl IntoIterator<Item = (usize, f64)>, offset: usize) {
        for (i, v) in other {
            if v != 0.0 {
                self.indices.push((i + offset) as u32);
                self.values.push(v);
            }
        }
    }
}

/// Row-major sparse matrix of model inputs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FeatureMatrix {
    pub rows: Vec<SparseVec>,
    pub width: usize,
}

impl FeatureMatrix {
    pub fn new(rows: Vec<SparseVec>, width: usize) -> Self {
        debug_assert!(rows.iter().all(|r| r.max_index().is_none_or(|m| m < width)));
        FeatureMatrix { rows, width }
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let width = rows.first().map_or(0, Vec::len);
        FeatureMatrix {
            rows: rows.iter().map(|r| SparseVec::from_dense(r)).collect(),
            width,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn select(&self, idx: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            width: self.width,
        }
    }

    pub fn all_finite(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.values.iter().all(|v| v.is_finite()))
    }
}
