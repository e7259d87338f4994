use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::SparseVec;
use crate::error::{Error, Result};

/// TF-IDF over word n-grams with smoothed idf and L2 row normalization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TextualVectorizer {
    pub ngram_range: (usize, usize),
    /// n-gram (tokens joined by a space) to column; columns follow
    /// lexicographic n-gram order.
    pub vocabulary: BTreeMap<String, usize>,
    pub idf: Vec<f64>,
    pub fitted_on: usize,
}

fn check_range((lo, hi): (usize, usize)) -> Result<()> {
    if lo == 0 || hi < lo {
        return Err(Error::InvalidInput(format!(
            "invalid ngram_range ({lo}, {hi})"
        )));
    }
    Ok(())
}

/// Every n-gram of `tokens` with n in `range`, in order of occurrence.
pub fn ngrams(tokens: &[String], (lo, hi): (usize, usize)) -> Vec<String> {
    let mut out = Vec::new();
    for n in lo..=hi {
        if n > tokens.len() {
            break;
        }
        out.extend(tokens.windows(n).map(|w| w.join(" ")));
    }
    out
}

impl TextualVectorizer {
    pub fn fit<S: AsRef<[String]>>(train: &[S], ngram_range: (usize, usize)) -> Result<Self> {
        check_range(ngram_range)?;
        if train.is_empty() {
            return Err(Error::InvalidInput(
                "cannot fit a vectorizer on an empty training set".into(),
            ));
        }
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for doc in train {
            let distinct: BTreeSet<String> =
                ngrams(doc.as_ref(), ngram_range).into_iter().collect();
            for g in distinct {
                *df.entry(g).or_insert(0) += 1;
            }
        }
        let n = train.len() as f64;
        let mut vocabulary = BTreeMap::new();
        let mut idf = Vec::with_capacity(df.len());
        for (col, (gram, count)) in df.into_iter().enumerate() {
            idf.push(((1.0 + n) / (1.0 + count as f64)).ln() + 1.0);
            vocabulary.insert(gram, col);
        }
        Ok(TextualVectorizer {
            ngram_range,
            vocabulary,
            idf,
            fitted_on: train.len(),
        })
    }

    pub fn width(&self) -> usize {
        self.idf.len()
    }

    /// Term counts times idf, L2-normalized. Unknown n-grams are ignored.
    pub fn transform(&self, tokens: &[String]) -> SparseVec {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for g in ngrams(tokens, self.ngram_range) {
            if let Some(&col) = self.vocabulary.get(&g) {
                *counts.entry(col).or_insert(0.0) += 1.0;
            }
        }
        let mut v = SparseVec::default();
        for (col, tf) in counts {
            v.indices.push(col as u32);
            v.values.push(tf * self.idf[col]);
        }
        let norm = v.norm_sq().sqrt();
        if norm > 0.0 {
            v.values.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }
}

pub fn fit_vectorizer<S: AsRef<[String]>>(
    train_sentences: &[S],
    ngram_range: (usize, usize),
) -> Result<TextualVectorizer> {
    TextualVectorizer::fit(train_sentences, ngram_range)
}

pub fn transform_textual(vec: &TextualVectorizer, tokens: &[String]) -> SparseVec {
    vec.transform(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs() -> Vec<Vec<String>> {
        vec![
            vec!["cat".into(), "sat".into()],
            vec!["cat".into(), "ran".into()],
        ]
    }

    #[test]
    fn unigram_vocabulary_and_idf() {
        let v = fit_vectorizer(&docs(), (1, 1)).unwrap();
        let words: Vec<_> = v.vocabulary.keys().cloned().collect();
        assert_eq!(words, ["cat", "ran", "sat"]);
        assert_eq!(v.idf[v.vocabulary["cat"]], 1.0);
        assert!((v.idf[v.vocabulary["sat"]] - (1.5f64.ln() + 1.0)).abs() < 1e-15);
        assert_eq!(v.fitted_on, 2);
    }

    #[test]
    fn bigram_vocabulary() {
        let v = fit_vectorizer(&docs(), (1, 2)).unwrap();
        assert_eq!(v.width(), 5);
        assert!(v.vocabulary.contains_key("cat sat"));
        assert!(v.vocabulary.contains_key("cat ran"));
    }

    #[test]
    fn single_document() {
        let v = fit_vectorizer(&[vec!["a".to_string()]], (1, 1)).unwrap();
        assert_eq!(v.idf, [1.0]);
    }

    #[test]
    fn hand_computed_weights() {
        let v = fit_vectorizer(&docs(), (1, 1)).unwrap();
        let x = v.transform(&["cat".into(), "sat".into()]);
        let idf_sat = 1.5f64.ln() + 1.0;
        let norm = (1.0 + idf_sat * idf_sat).sqrt();
        assert!((x.get(v.vocabulary["cat"]) - 1.0 / norm).abs() < 1e-12);
        assert!((x.get(v.vocabulary["cat"]) - 0.580).abs() < 1e-3);
        assert!((x.get(v.vocabulary["sat"]) - 0.815).abs() < 1e-3);
    }

    #[test]
    fn out_of_vocabulary_and_unit_vectors() {
        let v = fit_vectorizer(&docs(), (1, 1)).unwrap();
        assert_eq!(v.transform(&["dog".into()]).nnz(), 0);
        let x = v.transform(&["ran".into(), "dog".into()]);
        assert_eq!(x.values, [1.0]);
    }

    #[test]
    fn empty_training_set() {
        assert!(fit_vectorizer::<Vec<String>>(&[], (1, 1)).is_err());
        assert!(fit_vectorizer(&docs(), (0, 1)).is_err());
    }
}
