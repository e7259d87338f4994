//! Sentence-level information type detection for issue discussion threads.
//!
//! The pipeline runs corpus ingestion, markdown-aware preprocessing, textual
//! and conversational feature extraction, class balancing, one-vs-rest
//! logistic regression or random forest classification, and nested
//! cross-validated evaluation.

pub mod balance;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod models;
pub mod preprocess;

pub use error::{Error, Result};
