//! Cross-validated evaluation: splitters, metrics, nested grid search and
//! the twelve experiment configurations.

mod experiment;
mod grid;
mod metrics;
mod pipeline;
mod split;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::features::FeatureSet;

pub use experiment::{
    outer_folds, run_all, run_experiment, ExperimentReport, FoldReport, ALL_SCENARIOS,
};
pub use grid::{grid_search, hyperparameter_grid, GridPoint, GridSearchResult};
pub use metrics::{score_predictions, Averages, LabelMetrics, MetricsReport};
pub use pipeline::{fit_predict, train_bundle, FittedFeatures, PreparedData};
pub use split::{
    folds_from_tests, leave_one_group_out, leave_one_issue_out, stratified_kfold, Fold,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelKind {
    LogisticRegression,
    RandomForest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Balancing {
    ClassWeight,
    Smote,
}

/// A model family, feature set and balancing strategy, named by a
/// three-letter id such as `RCC` (random forest, conversational, class weight).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub feature_set: FeatureSet,
    pub balancing: Balancing,
}

impl ExperimentConfig {
    /// All twelve configurations in table order.
    pub fn all() -> Vec<ExperimentConfig> {
        let mut out = Vec::with_capacity(12);
        for model in [ModelKind::LogisticRegression, ModelKind::RandomForest] {
            for feature_set in [
                FeatureSet::Textual,
                FeatureSet::Conversational,
                FeatureSet::Both,
            ] {
                for balancing in [Balancing::ClassWeight, Balancing::Smote] {
                    out.push(ExperimentConfig {
                        model,
                        feature_set,
                        balancing,
                    });
                }
            }
        }
        out
    }

    pub fn id(&self) -> String {
        let m = match self.model {
            ModelKind::LogisticRegression => 'L',
            ModelKind::RandomForest => 'R',
        };
        let b = match self.balancing {
            Balancing::ClassWeight => 'C',
            Balancing::Smote => 'S',
        };
        format!("{m}{}{b}", self.feature_set.code())
    }

    /// Position in [`ExperimentConfig::all`].
    pub fn index(&self) -> usize {
        Self::all()
            .iter()
            .position(|c| c == self)
            .expect("every config is listed")
    }

    pub fn describe(&self) -> String {
        let m = match self.model {
            ModelKind::LogisticRegression => "Logistic Regression",
            ModelKind::RandomForest => "Random Forest",
        };
        let b = match self.balancing {
            Balancing::ClassWeight => "Class Weight",
            Balancing::Smote => "SMOTE",
        };
        format!("{m} {} {b}", self.feature_set)
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let id = s.trim().to_ascii_uppercase();
        ExperimentConfig::all()
            .into_iter()
            .find(|c| c.id() == id)
            .ok_or_else(|| Error::InvalidInput(format!("unknown configuration id {s:?}")))
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl Serialize for ExperimentConfig {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.id())
    }
}

impl<'de> Deserialize<'de> for ExperimentConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Evaluation scenario: stratified 5-fold (1) or leave-one-issue-out (2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    StratifiedKFold,
    LeaveOneIssueOut,
}

impl Scenario {
    pub fn number(self) -> u8 {
        match self {
            Scenario::StratifiedKFold => 1,
            Scenario::LeaveOneIssueOut => 2,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Scenario::StratifiedKFold),
            2 => Ok(Scenario::LeaveOneIssueOut),
            _ => Err(Error::InvalidInput(format!(
                "scenario must be 1 or 2, got {n}"
            ))),
        }
    }
}

impl Serialize for Scenario {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

impl<'de> Deserialize<'de> for Scenario {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Scenario::from_number(u8::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Runs `f` on a dedicated pool of `threads` workers, or the global pool
/// when `None`. One thread gives fully serial execution.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Transport(format!("cannot start thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_decode() {
        let ids: Vec<String> = ExperimentConfig::all().iter().map(|c| c.id()).collect();
        assert_eq!(
            ids,
            ["LTC", "LTS", "LCC", "LCS", "LBC", "LBS", "RTC", "RTS", "RCC", "RCS", "RBC", "RBS"]
        );
        let rcc: ExperimentConfig = "rcc".parse().unwrap();
        assert_eq!(rcc.model, ModelKind::RandomForest);
        assert_eq!(rcc.feature_set, FeatureSet::Conversational);
        assert_eq!(rcc.balancing, Balancing::ClassWeight);
        assert_eq!(rcc.describe(), "Random Forest Conversational Class Weight");
        assert!("XYZ".parse::<ExperimentConfig>().is_err());
        assert_eq!(rcc.index(), 8);
    }
}
