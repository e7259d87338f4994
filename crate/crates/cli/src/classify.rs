use infotypes::corpus::{InfoType, IssueThread};
use infotypes::features::{assemble_features, thread_conversational};
use infotypes::models::ModelBundle;
use infotypes::preprocess::{segment_thread, LEMMATIZER_VERSION};
use infotypes::{Error, Result};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SentencePrediction {
    pub sentence_id: String,
    pub label: InfoType,
    /// Score per trained label, in label order.
    pub scores: Vec<(InfoType, f64)>,
}

/// Predicts a label for every sentence of `thread`, in thread order.
/// Unsegmented threads are segmented first.
pub fn classify_thread(
    bundle: &ModelBundle,
    thread: &IssueThread,
) -> Result<Vec<SentencePrediction>> {
    if bundle.lemmatizer_version != LEMMATIZER_VERSION {
        return Err(Error::Validation(format!(
            "model was built with lemmatizer version {} but this build uses {}",
            bundle.lemmatizer_version, LEMMATIZER_VERSION
        )));
    }
    if bundle.feature_set.uses_conversational() && thread.timestamps_synthetic {
        return Err(Error::Validation(format!(
            "configuration {} uses conversational features but {} has synthetic timestamps",
            bundle.config,
            thread.display_id()
        )));
    }
    let mut thread = thread.clone();
    if !thread.is_segmented() {
        segment_thread(&mut thread);
    }
    let conv = thread_conversational(&thread);
    let textual_width = bundle.textual_width();
    let mut out = Vec::with_capacity(thread.sentence_count());
    for (ci, comment) in thread.comments.iter().enumerate() {
        for (si, sentence) in comment.sentences.iter().enumerate() {
            let textual = bundle
                .vectorizer
                .as_ref()
                .map(|v| v.transform(&sentence.tokens));
            let fv = assemble_features(
                bundle.feature_set,
                textual.as_ref().map(|t| (t, textual_width)),
                Some(&conv[ci][si]),
                bundle.scaler.as_ref(),
            )?;
            let p = bundle.model.predict(&fv.to_row())?;
            let to_type = |o: usize| {
                InfoType::from_ordinal(o).ok_or_else(|| {
                    Error::Validation(format!("model label ordinal {o} out of range"))
                })
            };
            out.push(SentencePrediction {
                sentence_id: sentence.id.clone(),
                label: to_type(p.label)?,
                scores: p
                    .scores
                    .into_iter()
                    .map(|(o, s)| Ok((to_type(o)?, s)))
                    .collect::<Result<_>>()?,
            });
        }
    }
    Ok(out)
}
