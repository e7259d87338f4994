use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Cohen's kappa between two annotators' label sequences.
///
/// Perfect observed agreement yields exactly 1.0, including the degenerate
/// case where both annotators used a single label throughout.
pub fn cohen_kappa<L: Ord>(labels_a: &[L], labels_b: &[L]) -> Result<f64> {
    if labels_a.len() != labels_b.len() {
        return Err(Error::InvalidInput(format!(
            "label sequences differ in length ({} vs {})",
            labels_a.len(),
            labels_b.len()
        )));
    }
    if labels_a.is_empty() {
        return Err(Error::InvalidInput("label sequences are empty".into()));
    }
    let n = labels_a.len() as f64;
    let mut marginals: BTreeMap<&L, (usize, usize)> = BTreeMap::new();
    let mut agree = 0usize;
    for (a, b) in labels_a.iter().zip(labels_b) {
        marginals.entry(a).or_default().0 += 1;
        marginals.entry(b).or_default().1 += 1;
        if a == b {
            agree += 1;
        }
    }
    if agree == labels_a.len() {
        return Ok(1.0);
    }
    let p_o = agree as f64 / n;
    let p_e: f64 = marginals
        .values()
        .map(|&(ca, cb)| (ca as f64 / n) * (cb as f64 / n))
        .sum();
    if p_e >= 1.0 {
        return Err(Error::Undefined(
            "kappa is undefined: expected agreement is 1 but observed agreement is not".into(),
        ));
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}
