//! Corpus data model: information types, issue threads, comments and sentences.
//!
//! Threads are built once (from JSONL, CSV or the GitHub API), validated, and
//! treated as immutable afterwards.

mod csv_import;
mod dataset;
pub mod github;
mod jsonl;
mod kappa;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use csv_import::import_labeled_csv;
pub use dataset::{dataset_stats, filter_for_training, Dataset, DatasetItem};
pub use github::fetch_thread;
pub use jsonl::{load_corpus, parse_thread, save_corpus, thread_to_json};
pub use kappa::cohen_kappa;

/// The sixteen information types found in issue discussions.
///
/// Ordinals follow declaration order and are stable; they are used for
/// tie-breaking, palette lookup and model label ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InfoType {
    ExpectedBehaviour,
    Motivation,
    ObservedBugBehaviour,
    BugReproduction,
    InvestigationAndExploration,
    SolutionDiscussion,
    ContributionAndCommitment,
    TaskProgress,
    Testing,
    FuturePlan,
    PotentialNewIssuesAndRequests,
    SolutionUsage,
    Workarounds,
    IssueContentManagement,
    ActionOnIssue,
    SocialConversation,
}

impl InfoType {
    pub const COUNT: usize = 16;

    pub const ALL: [InfoType; 16] = [
        InfoType::ExpectedBehaviour,
        InfoType::Motivation,
        InfoType::ObservedBugBehaviour,
        InfoType::BugReproduction,
        InfoType::InvestigationAndExploration,
        InfoType::SolutionDiscussion,
        InfoType::ContributionAndCommitment,
        InfoType::TaskProgress,
        InfoType::Testing,
        InfoType::FuturePlan,
        InfoType::PotentialNewIssuesAndRequests,
        InfoType::SolutionUsage,
        InfoType::Workarounds,
        InfoType::IssueContentManagement,
        InfoType::ActionOnIssue,
        InfoType::SocialConversation,
    ];

    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn from_ordinal(ordinal: usize) -> Option<Self> {
        Self::ALL.get(ordinal).copied()
    }

    /// Stable machine name, identical to the serialized form.
    pub fn name(self) -> &'static str {
        match self {
            InfoType::ExpectedBehaviour => "ExpectedBehaviour",
            InfoType::Motivation => "Motivation",
            InfoType::ObservedBugBehaviour => "ObservedBugBehaviour",
            InfoType::BugReproduction => "BugReproduction",
            InfoType::InvestigationAndExploration => "InvestigationAndExploration",
            InfoType::SolutionDiscussion => "SolutionDiscussion",
            InfoType::ContributionAndCommitment => "ContributionAndCommitment",
            InfoType::TaskProgress => "TaskProgress",
            InfoType::Testing => "Testing",
            InfoType::FuturePlan => "FuturePlan",
            InfoType::PotentialNewIssuesAndRequests => "PotentialNewIssuesAndRequests",
            InfoType::SolutionUsage => "SolutionUsage",
            InfoType::Workarounds => "Workarounds",
            InfoType::IssueContentManagement => "IssueContentManagement",
            InfoType::ActionOnIssue => "ActionOnIssue",
            InfoType::SocialConversation => "SocialConversation",
        }
    }

    /// Human-readable name used in tables and reports.
    pub fn display_name(self) -> &'static str {
        match self {
            InfoType::ExpectedBehaviour => "Expected Behaviour",
            InfoType::Motivation => "Motivation",
            InfoType::ObservedBugBehaviour => "Observed Bug Behaviour",
            InfoType::BugReproduction => "Bug Reproduction",
            InfoType::InvestigationAndExploration => "Investigation and Exploration",
            InfoType::SolutionDiscussion => "Solution Discussion",
            InfoType::ContributionAndCommitment => "Contribution and Commitment",
            InfoType::TaskProgress => "Task Progress",
            InfoType::Testing => "Testing",
            InfoType::FuturePlan => "Future Plan",
            InfoType::PotentialNewIssuesAndRequests => "Potential New Issues and Requests",
            InfoType::SolutionUsage => "Solution Usage",
            InfoType::Workarounds => "Workarounds",
            InfoType::IssueContentManagement => "Issue Content Management",
            InfoType::ActionOnIssue => "Action on Issue",
            InfoType::SocialConversation => "Social Conversation",
        }
    }

    /// Labels left out of training by default: too rare to learn from.
    pub fn default_excluded() -> BTreeSet<InfoType> {
        [
            InfoType::FuturePlan,
            InfoType::IssueContentManagement,
            InfoType::Testing,
        ]
        .into_iter()
        .collect()
    }

    /// Accepts the machine name, the display name, or common spelling
    /// variants ("Work-arounds", "Testing-Related", "Content Management").
    pub fn parse_lenient(s: &str) -> Result<Self> {
        if let Ok(t) = s.parse() {
            return Ok(t);
        }
        let key: String = s
            .chars()
            .filter(|c| c.is_alphanumeric())
            .flat_map(char::to_lowercase)
            .collect();
        let alias = match key.as_str() {
            "testingrelated" | "test" => Some(InfoType::Testing),
            "contentmanagement" => Some(InfoType::IssueContentManagement),
            "workaround" => Some(InfoType::Workarounds),
            "potentialnewissuesandrequest" | "potentialnewissues" => {
                Some(InfoType::PotentialNewIssuesAndRequests)
            }
            _ => None,
        };
        if let Some(t) = alias {
            return Ok(t);
        }
        InfoType::ALL
            .into_iter()
            .find(|t| t.name().to_lowercase() == key)
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

impl fmt::Display for InfoType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InfoType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InfoType::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

/// Author's association with the repository, as reported per comment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AuthorAssociation {
    #[serde(rename = "OWNER")]
    Owner,
    #[serde(rename = "CL")]
    Collaborator,
    #[serde(rename = "MBR")]
    Member,
    #[serde(rename = "OTHER")]
    Other,
}

impl AuthorAssociation {
    pub const ALL: [AuthorAssociation; 4] = [
        AuthorAssociation::Owner,
        AuthorAssociation::Collaborator,
        AuthorAssociation::Member,
        AuthorAssociation::Other,
    ];

    /// Maps GitHub's `author_association` values; anything unrecognised is `Other`.
    pub fn from_github(s: &str) -> Self {
        match s {
            "OWNER" => AuthorAssociation::Owner,
            "COLLABORATOR" | "CL" => AuthorAssociation::Collaborator,
            "MEMBER" | "MBR" => AuthorAssociation::Member,
            _ => AuthorAssociation::Other,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            AuthorAssociation::Owner => "OWNER",
            AuthorAssociation::Collaborator => "CL",
            AuthorAssociation::Member => "MBR",
            AuthorAssociation::Other => "OTHER",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sentence {
    /// Unique within the thread: `"{comment_index}:{sentence_index_in_comment}"`.
    pub id: String,
    pub text_raw: String,
    pub text_masked: String,
    pub tokens: Vec<String>,
    pub labels: Vec<InfoType>,
    pub comment_index: usize,
    /// 1-based.
    pub sentence_index_in_comment: usize,
    /// 1-based.
    pub sentence_index_in_thread: usize,
}

impl Sentence {
    /// Builds an unindexed sentence from raw text; indices are assigned when
    /// the owning thread is reindexed.
    pub fn from_raw(text_raw: impl Into<String>, labels: Vec<InfoType>) -> Self {
        let text_raw = text_raw.into();
        let (text_masked, _) = crate::preprocess::mask_markdown(&text_raw);
        let tokens = crate::preprocess::tokenize(&text_masked);
        Sentence {
            id: String::new(),
            text_raw,
            text_masked,
            tokens,
            labels,
            comment_index: 0,
            sentence_index_in_comment: 0,
            sentence_index_in_thread: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IssueComment {
    pub author_login: String,
    pub author_association: AuthorAssociation,
    pub created_at: DateTime<Utc>,
    pub body_raw: String,
    pub has_code: bool,
    pub sentences: Vec<Sentence>,
}

impl IssueComment {
    pub fn new(
        author_login: impl Into<String>,
        author_association: AuthorAssociation,
        created_at: DateTime<Utc>,
        body_raw: impl Into<String>,
    ) -> Self {
        let body_raw = body_raw.into();
        let has_code = crate::preprocess::mask_markdown(&body_raw).1;
        IssueComment {
            author_login: author_login.into(),
            author_association,
            created_at: truncate_to_second(created_at),
            body_raw,
            has_code,
            sentences: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IssueThread {
    pub project: String,
    pub issue_number: u64,
    pub title: String,
    /// Index 0 is the original post.
    pub comments: Vec<IssueComment>,
    pub opened_at: DateTime<Utc>,
    pub last_comment_at: DateTime<Utc>,
    /// Timestamps were synthesised (e.g. CSV import without dates); temporal
    /// features computed from them are not meaningful.
    pub timestamps_synthetic: bool,
}

impl IssueThread {
    /// Builds and validates a thread. Sentence indices are (re)assigned.
    pub fn new(
        project: impl Into<String>,
        issue_number: u64,
        title: impl Into<String>,
        opened_at: DateTime<Utc>,
        comments: Vec<IssueComment>,
    ) -> Result<Self> {
        let last_comment_at = comments.last().map(|c| c.created_at).unwrap_or(opened_at);
        let mut thread = IssueThread {
            project: project.into(),
            issue_number,
            title: title.into(),
            comments,
            opened_at: truncate_to_second(opened_at),
            last_comment_at,
            timestamps_synthetic: false,
        };
        thread.reindex();
        thread.validate()?;
        Ok(thread)
    }

    /// `project#number`, used in error messages and reports.
    pub fn display_id(&self) -> String {
        format!("{}#{}", self.project, self.issue_number)
    }

    pub fn validate(&self) -> Result<()> {
        let id = self.display_id();
        if self.issue_number == 0 {
            return Err(Error::Validation(format!(
                "thread {id}: issue_number must be positive"
            )));
        }
        if self.comments.is_empty() {
            return Err(Error::Validation(format!("thread {id}: no comments")));
        }
        if self.comments[0].created_at < self.opened_at {
            return Err(Error::Validation(format!(
                "thread {id}: first comment precedes opened_at"
            )));
        }
        for (i, pair) in self.comments.windows(2).enumerate() {
            if pair[1].created_at < pair[0].created_at {
                return Err(Error::Validation(format!(
                    "thread {id}: comments not sorted by created_at (comment {} precedes comment {})",
                    i + 1,
                    i
                )));
            }
        }
        for c in &self.comments {
            for s in &c.sentences {
                let distinct: BTreeSet<_> = s.labels.iter().collect();
                if distinct.len() != s.labels.len() {
                    return Err(Error::Validation(format!(
                        "thread {id}: sentence {} has duplicate labels",
                        s.id
                    )));
                }
            }
        }
        Ok(())
    }

    /// Recomputes `last_comment_at` and all sentence positions and ids.
    pub fn reindex(&mut self) {
        if let Some(last) = self.comments.last() {
            self.last_comment_at = last.created_at;
        }
        let mut in_thread = 0;
        for (ci, comment) in self.comments.iter_mut().enumerate() {
            for (si, s) in comment.sentences.iter_mut().enumerate() {
                in_thread += 1;
                s.comment_index = ci;
                s.sentence_index_in_comment = si + 1;
                s.sentence_index_in_thread = in_thread;
                s.id = format!("{ci}:{}", si + 1);
            }
        }
    }

    /// True once any comment carries sentences.
    pub fn is_segmented(&self) -> bool {
        self.comments.iter().any(|c| !c.sentences.is_empty())
    }

    pub fn sentence_count(&self) -> usize {
        self.comments.iter().map(|c| c.sentences.len()).sum()
    }

    /// All sentences in thread order.
    pub fn sentences(&self) -> impl Iterator<Item = &Sentence> {
        self.comments.iter().flat_map(|c| c.sentences.iter())
    }

    /// Total thread duration in seconds.
    pub fn duration_secs(&self) -> i64 {
        (self.last_comment_at - self.opened_at).num_seconds()
    }
}

pub(crate) fn truncate_to_second(t: DateTime<Utc>) -> DateTime<Utc> {
    DateTime::from_timestamp(t.timestamp(), 0).unwrap_or(t)
}
