use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::InfoType;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelMetrics {
    pub label: usize,
    pub name: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fold: Option<usize>,
    /// Every label seen in gold or predictions, ascending.
    pub per_label: Vec<LabelMetrics>,
    /// Support-weighted averages.
    pub weighted: Averages,
    pub support: usize,
}

pub(crate) fn label_name(ordinal: usize) -> String {
    InfoType::from_ordinal(ordinal)
        .map_or_else(|| ordinal.to_string(), |t| t.display_name().to_string())
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-label precision, recall and F1 plus support-weighted averages.
pub fn score_predictions(gold: &[usize], predicted: &[usize]) -> Result<MetricsReport> {
    if gold.len() != predicted.len() {
        return Err(Error::InvalidInput(format!(
            "{} gold labels but {} predictions",
            gold.len(),
            predicted.len()
        )));
    }
    if gold.is_empty() {
        return Err(Error::InvalidInput("cannot score zero predictions".into()));
    }
    // (tp, predicted count, gold count)
    let mut counts: BTreeMap<usize, (usize, usize, usize)> = BTreeMap::new();
    for (&g, &p) in gold.iter().zip(predicted) {
        counts.entry(g).or_default().2 += 1;
        let e = counts.entry(p).or_default();
        e.1 += 1;
        if g == p {
            e.0 += 1;
        }
    }
    let per_label: Vec<LabelMetrics> = counts
        .into_iter()
        .map(|(label, (tp, pred, support))| {
            let precision = ratio(tp, pred);
            let recall = ratio(tp, support);
            let f1 = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            LabelMetrics {
                label,
                name: label_name(label),
                precision,
                recall,
                f1,
                support,
            }
        })
        .collect();
    let total = gold.len() as f64;
    let avg = |m: fn(&LabelMetrics) -> f64| {
        per_label
            .iter()
            .map(|l| l.support as f64 * m(l))
            .sum::<f64>()
            / total
    };
    Ok(MetricsReport {
        config: None,
        fold: None,
        weighted: Averages {
            precision: avg(|l| l.precision),
            recall: avg(|l| l.recall),
            f1: avg(|l| l.f1),
        },
        per_label,
        support: gold.len(),
    })
}
