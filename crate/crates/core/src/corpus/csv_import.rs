//! Adapter for sentence-per-row labeled CSV files.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use chrono::{DateTime, Duration, Utc};

use super::jsonl::parse_timestamp;
use super::{AuthorAssociation, InfoType, IssueComment, IssueThread, Sentence};
use crate::error::{Error, Result};

const REQUIRED: [&str; 6] = [
    "project",
    "issue_number",
    "comment_index",
    "sentence_index_in_comment",
    "text",
    "labels",
];

/// Epoch used for synthesised timestamps: one hour between consecutive comments.
const SYNTHETIC_BASE: i64 = 946_684_800; // 2000-01-01T00:00:00Z

#[derive(Default)]
struct CommentRows {
    author_login: Option<String>,
    author_association: Option<String>,
    created_at: Option<DateTime<Utc>>,
    sentences: Vec<(usize, String, Vec<InfoType>)>,
}

struct ThreadRows {
    project: String,
    issue_number: u64,
    comments: BTreeMap<usize, CommentRows>,
}

/// Reconstructs threads from a labeled CSV.
///
/// Threads appear in order of first occurrence; comments are ordered by
/// `comment_index` and sentences by `sentence_index_in_comment`, then
/// renumbered densely. When any comment of a thread lacks `created_at`, the
/// whole thread gets synthetic hourly timestamps and `timestamps_synthetic`.
pub fn import_labeled_csv(path: impl AsRef<Path>) -> Result<Vec<IssueThread>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    import_from_reader(file)
}

pub(crate) fn import_from_reader<R: std::io::Read>(reader: R) -> Result<Vec<IssueThread>> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(false)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let mut required = HashMap::new();
    for name in REQUIRED {
        let idx = col(name)
            .ok_or_else(|| Error::Validation(format!("CSV is missing required column {name:?}")))?;
        required.insert(name, idx);
    }
    let login_col = col("author_login");
    let assoc_col = col("author_association");
    let created_col = col("created_at");

    let mut order: Vec<(String, u64)> = Vec::new();
    let mut threads: HashMap<(String, u64), ThreadRows> = HashMap::new();

    for (row_no, record) in rdr.records().enumerate() {
        let line = row_no + 2;
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let field = |name: &str| record.get(required[name]).unwrap_or("").trim();
        let optional = |idx: Option<usize>| {
            idx.and_then(|i| record.get(i))
                .map(str::trim)
                .filter(|s| !s.is_empty())
        };
        let parse_int = |name: &str| -> Result<u64> {
            field(name).parse::<u64>().map_err(|_| Error::Parse {
                line,
                message: format!(
                    "column {name}: expected a non-negative integer, got {:?}",
                    field(name)
                ),
            })
        };

        let project = field("project").to_string();
        let issue_number = parse_int("issue_number")?;
        let comment_index = parse_int("comment_index")? as usize;
        let sentence_index = parse_int("sentence_index_in_comment")? as usize;

        let mut labels = Vec::new();
        for raw in field("labels")
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
        {
            let label = InfoType::parse_lenient(raw)?;
            if !labels.contains(&label) {
                labels.push(label);
            }
        }

        let key = (project.clone(), issue_number);
        let thread = threads.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            ThreadRows {
                project,
                issue_number,
                comments: BTreeMap::new(),
            }
        });
        let comment = thread.comments.entry(comment_index).or_default();
        if comment.author_login.is_none() {
            comment.author_login = optional(login_col).map(str::to_string);
        }
        if comment.author_association.is_none() {
            comment.author_association = optional(assoc_col).map(str::to_string);
        }
        if comment.created_at.is_none() {
            if let Some(ts) = optional(created_col) {
                comment.created_at =
                    Some(parse_timestamp(ts).map_err(|message| Error::Parse { line, message })?);
            }
        }
        comment
            .sentences
            .push((sentence_index, field("text").to_string(), labels));
    }

    order
        .into_iter()
        .map(|key| build_thread(threads.remove(&key).expect("grouped thread")))
        .collect()
}

fn build_thread(rows: ThreadRows) -> Result<IssueThread> {
    let synthetic = rows.comments.values().any(|c| c.created_at.is_none());
    let mut comments = Vec::with_capacity(rows.comments.len());
    for (k, (_, mut c)) in rows.comments.into_iter().enumerate() {
        c.sentences.sort_by_key(|(idx, _, _)| *idx);
        let created_at = if synthetic {
            DateTime::from_timestamp(SYNTHETIC_BASE, 0).expect("valid epoch")
                + Duration::hours(k as i64)
        } else {
            c.created_at.expect("checked above")
        };
        let body = c
            .sentences
            .iter()
            .map(|(_, text, _)| text.as_str())
            .collect::<Vec<_>>()
            .join("\n");
        let mut comment = IssueComment::new(
            c.author_login.unwrap_or_default(),
            c.author_association
                .as_deref()
                .map(AuthorAssociation::from_github)
                .unwrap_or(AuthorAssociation::Other),
            created_at,
            body,
        );
        comment.sentences = c
            .sentences
            .into_iter()
            .map(|(_, text, labels)| Sentence::from_raw(text, labels))
            .collect();
        comments.push(comment);
    }
    let opened_at = comments[0].created_at;
    let mut thread = IssueThread::new(rows.project, rows.issue_number, "", opened_at, comments)?;
    thread.timestamps_synthetic = synthetic;
    Ok(thread)
}
