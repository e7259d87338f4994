//! Corpus JSONL format: one thread per line.

use std::io::Write;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{AuthorAssociation, InfoType, IssueComment, IssueThread, Sentence};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct ThreadRecord {
    project: String,
    issue_number: u64,
    title: String,
    #[serde(with = "utc_seconds")]
    opened_at: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "is_false")]
    timestamps_synthetic: bool,
    comments: Vec<CommentRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CommentRecord {
    author_login: String,
    author_association: AuthorAssociation,
    #[serde(with = "utc_seconds")]
    created_at: DateTime<Utc>,
    body_raw: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sentences: Option<Vec<SentenceRecord>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SentenceRecord {
    text: String,
    labels: Vec<String>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

pub(crate) mod utc_seconds {
    use chrono::{DateTime, SecondsFormat, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.to_rfc3339_opts(SecondsFormat::Secs, true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_timestamp(&s).map_err(serde::de::Error::custom)
    }
}

/// Parses an ISO-8601 timestamp and normalizes it to UTC, second resolution.
pub(crate) fn parse_timestamp(s: &str) -> std::result::Result<DateTime<Utc>, String> {
    DateTime::parse_from_rfc3339(s.trim())
        .map(|t| super::truncate_to_second(t.with_timezone(&Utc)))
        .map_err(|e| format!("invalid timestamp {s:?}: {e}"))
}

fn thread_from_record(rec: ThreadRecord) -> Result<IssueThread> {
    let id = format!("{}#{}", rec.project, rec.issue_number);
    let mut comments = Vec::with_capacity(rec.comments.len());
    for c in rec.comments {
        let mut comment = IssueComment::new(
            c.author_login,
            c.author_association,
            c.created_at,
            c.body_raw,
        );
        if let Some(sentences) = c.sentences {
            for s in sentences {
                let labels = s
                    .labels
                    .iter()
                    .map(|l| l.parse::<InfoType>())
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::Validation(format!("thread {id}: {e}")))?;
                comment.sentences.push(Sentence::from_raw(s.text, labels));
            }
        }
        comments.push(comment);
    }
    let mut thread = IssueThread::new(
        rec.project,
        rec.issue_number,
        rec.title,
        rec.opened_at,
        comments,
    )?;
    thread.timestamps_synthetic = rec.timestamps_synthetic;
    Ok(thread)
}

fn record_from_thread(thread: &IssueThread) -> ThreadRecord {
    ThreadRecord {
        project: thread.project.clone(),
        issue_number: thread.issue_number,
        title: thread.title.clone(),
        opened_at: thread.opened_at,
        timestamps_synthetic: thread.timestamps_synthetic,
        comments: thread
            .comments
            .iter()
            .map(|c| CommentRecord {
                author_login: c.author_login.clone(),
                author_association: c.author_association,
                created_at: c.created_at,
                body_raw: c.body_raw.clone(),
                sentences: (!c.sentences.is_empty()).then(|| {
                    c.sentences
                        .iter()
                        .map(|s| SentenceRecord {
                            text: s.text_raw.clone(),
                            labels: s.labels.iter().map(|l| l.name().to_string()).collect(),
                        })
                        .collect()
                }),
            })
            .collect(),
    }
}

/// Parses one thread from its JSON text (a corpus line or a standalone file).
pub fn parse_thread(text: &str) -> Result<IssueThread> {
    let rec: ThreadRecord =
        serde_json::from_str(text).map_err(|e| crate::error::json_error_at(text, &e))?;
    thread_from_record(rec)
}

/// Canonical single-line JSON for a thread.
pub fn thread_to_json(thread: &IssueThread) -> String {
    serde_json::to_string(&record_from_thread(thread)).expect("thread record serializes")
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<IssueThread>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut threads = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: ThreadRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        threads.push(thread_from_record(rec)?);
    }
    Ok(threads)
}

pub fn save_corpus(threads: &[IssueThread], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    for t in threads {
        writeln!(out, "{}", thread_to_json(t)).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}
