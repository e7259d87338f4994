//! Self-contained model files (`.itm.json`).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Hyperparameters, Model};
use crate::corpus::InfoType;
use crate::error::{json_error_at, Error, Result};
use crate::features::{FeatureSet, StandardScaler, TextualVectorizer};
use crate::preprocess::LEMMATIZER_VERSION;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Everything needed to classify new sentences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format_version: u32,
    /// Experiment configuration id, e.g. `LTC`.
    pub config: String,
    pub feature_set: FeatureSet,
    pub hyperparameters: Hyperparameters,
    pub labels: Vec<InfoType>,
    pub lemmatizer_version: u32,
    pub seed: u64,
    pub model: Model,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectorizer: Option<TextualVectorizer>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaler: Option<StandardScaler>,
}

impl ModelBundle {
    pub fn new(
        config: impl Into<String>,
        feature_set: FeatureSet,
        hyperparameters: Hyperparameters,
        seed: u64,
        model: Model,
        vectorizer: Option<TextualVectorizer>,
        scaler: Option<StandardScaler>,
    ) -> Result<Self> {
        let labels = model
            .labels()
            .iter()
            .map(|&o| {
                InfoType::from_ordinal(o)
                    .ok_or_else(|| Error::InvalidInput(format!("label ordinal {o} out of range")))
            })
            .collect::<Result<_>>()?;
        let bundle = ModelBundle {
            format_version: MODEL_FORMAT_VERSION,
            config: config.into(),
            feature_set,
            hyperparameters,
            labels,
            lemmatizer_version: LEMMATIZER_VERSION,
            seed,
            model,
            vectorizer,
            scaler,
        };
        bundle.check()?;
        Ok(bundle)
    }

    /// Textual block width, or 0 without textual features.
    pub fn textual_width(&self) -> usize {
        self.vectorizer.as_ref().map_or(0, |v| v.width())
    }

    fn check(&self) -> Result<()> {
        if self.feature_set.uses_textual() != self.vectorizer.is_some() {
            return Err(Error::Validation(format!(
                "feature set {} does not match the presence of a vectorizer",
                self.feature_set
            )));
        }
        if self.feature_set.uses_conversational() != self.scaler.is_some() {
            return Err(Error::Validation(format!(
                "feature set {} does not match the presence of a scaler",
                self.feature_set
            )));
        }
        let conv = if self.feature_set.uses_conversational() {
            crate::features::CONVERSATIONAL_WIDTH
        } else {
            0
        };
        if self.textual_width() + conv != self.model.width() {
            return Err(Error::Validation(format!(
                "model width {} does not match feature width {}",
                self.model.width(),
                self.textual_width() + conv
            )));
        }
        let ordinals: Vec<usize> = self.labels.iter().map(|l| l.ordinal()).collect();
        if ordinals != self.model.labels() {
            return Err(Error::Validation(
                "bundle labels disagree with the model".into(),
            ));
        }
        Ok(())
    }
}

pub fn save_model(bundle: &ModelBundle, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let json = serde_json::to_string(bundle)
        .map_err(|e| Error::InvalidInput(format!("cannot serialize model: {e}")))?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: u32,
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelBundle> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_bundle(&text)
}

pub(crate) fn parse_bundle(text: &str) -> Result<ModelBundle> {
    let probe: VersionProbe = serde_json::from_str(text).map_err(|e| json_error_at(text, &e))?;
    if probe.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::UnsupportedVersion {
            found: probe.format_version,
            supported: MODEL_FORMAT_VERSION,
        });
    }
    let bundle: ModelBundle = serde_json::from_str(text).map_err(|e| json_error_at(text, &e))?;
    bundle.check()?;
    Ok(bundle)
}
