use std::fmt;

use serde::{Deserialize, Serialize};

use super::conversational::{ConversationalFeatures, CONVERSATIONAL_WIDTH};
use super::SparseVec;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureSet {
    #[serde(rename = "T")]
    Textual,
    #[serde(rename = "C")]
    Conversational,
    #[serde(rename = "B")]
    Both,
}

impl FeatureSet {
    pub fn uses_textual(self) -> bool {
        matches!(self, FeatureSet::Textual | FeatureSet::Both)
    }

    pub fn uses_conversational(self) -> bool {
        matches!(self, FeatureSet::Conversational | FeatureSet::Both)
    }

    pub fn code(self) -> char {
        match self {
            FeatureSet::Textual => 'T',
            FeatureSet::Conversational => 'C',
            FeatureSet::Both => 'B',
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureSet::Textual => "Textual",
            FeatureSet::Conversational => "Conversational",
            FeatureSet::Both => "Both",
        })
    }
}

/// Column-wise z-score standardization; zero-variance columns map to 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardScaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl StandardScaler {
    pub fn fit(rows: &[[f64; CONVERSATIONAL_WIDTH]]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput(
                "cannot fit a scaler on zero rows".into(),
            ));
        }
        let n = rows.len() as f64;
        let mut mean = vec![0.0; CONVERSATIONAL_WIDTH];
        for r in rows {
            for (m, x) in mean.iter_mut().zip(r) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; CONVERSATIONAL_WIDTH];
        for r in rows {
            for ((v, x), m) in var.iter_mut().zip(r).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        let std = var.into_iter().map(|v| (v / n).sqrt()).collect();
        Ok(StandardScaler { mean, std })
    }

    pub fn transform(&self, row: &[f64; CONVERSATIONAL_WIDTH]) -> [f64; CONVERSATIONAL_WIDTH] {
        let mut out = [0.0; CONVERSATIONAL_WIDTH];
        for (j, o) in out.iter_mut().enumerate() {
            if self.std[j] > 0.0 {
                *o = (row[j] - self.mean[j]) / self.std[j];
            }
        }
        out
    }
}

/// A sentence's model input: textual block followed by the conversational block.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub textual: SparseVec,
    pub textual_width: usize,
    pub conversational: Vec<f64>,
    pub config: FeatureSet,
}

impl FeatureVector {
    pub fn width(&self) -> usize {
        self.textual_width + self.conversational.len()
    }

    /// Flattens into one sparse row over `width()` columns.
    pub fn to_row(&self) -> SparseVec {
        let mut row = self.textual.clone();
        row.append_shifted(
            self.conversational.iter().copied().enumerate(),
            self.textual_width,
        );
        row
    }
}

/// Combines the blocks required by `config`. `textual` carries the
/// vectorizer width alongside the vector.
pub fn assemble_features(
    config: FeatureSet,
    textual: Option<(&SparseVec, usize)>,
    conv: Option<&ConversationalFeatures>,
    scaler: Option<&StandardScaler>,
) -> Result<FeatureVector> {
    let (textual, textual_width) = if config.uses_textual() {
        let (v, w) = textual.ok_or_else(|| {
            Error::InvalidInput(format!("feature set {config} requires textual features"))
        })?;
        (v.clone(), w)
    } else {
        (SparseVec::default(), 0)
    };
    let conversational = if config.uses_conversational() {
        let conv = conv.ok_or_else(|| {
            Error::InvalidInput(format!(
                "feature set {config} requires conversational features"
            ))
        })?;
        let scaler = scaler.ok_or_else(|| {
            Error::InvalidInput(format!("feature set {config} requires a fitted scaler"))
        })?;
        scaler.transform(&conv.to_dense()).to_vec()
    } else {
        Vec::new()
    };
    Ok(FeatureVector {
        textual,
        textual_width,
        conversational,
        config,
    })
}
