//! Textual (TF-IDF) and conversational feature extraction.

mod assemble;
mod conversational;
mod sparse;
mod textual;

pub use assemble::{assemble_features, FeatureSet, FeatureVector, StandardScaler};
pub use conversational::{
    extract_conversational, thread_conversational, ConversationalFeatures, CONVERSATIONAL_COLUMNS,
    CONVERSATIONAL_WIDTH, DISCRETE_COLUMNS,
};
pub use sparse::{FeatureMatrix, SparseVec};
pub use textual::{fit_vectorizer, ngrams, transform_textual, TextualVectorizer};
