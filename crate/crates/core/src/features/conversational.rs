//! Conversational context features of a sentence within its thread.

use serde::{Deserialize, Serialize};

use crate::corpus::{AuthorAssociation, IssueThread, Sentence};

pub const CONVERSATIONAL_WIDTH: usize = 17;

/// Dense column names, in encoding order.
pub const CONVERSATIONAL_COLUMNS: [&str; CONVERSATIONAL_WIDTH] = [
    "AA_OWNER",
    "AA_CL",
    "AA_MBR",
    "AA_OTHER",
    "BEGAUTH",
    "LEN",
    "TLEN",
    "CLEN",
    "TLOC",
    "CLOC",
    "FIRST_TURN",
    "LAST_TURN",
    "TPOS1",
    "TPOS2",
    "PPAU",
    "NPAU",
    "HAS_CODE",
];

/// Columns holding 0/1 values before standardization. The one-hot author
/// block is included.
pub const DISCRETE_COLUMNS: [usize; 8] = [0, 1, 2, 3, 4, 10, 11, 16];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConversationalFeatures {
    pub aa: AuthorAssociation,
    pub begauth: bool,
    pub len: usize,
    pub tlen: f64,
    pub clen: f64,
    pub tloc: f64,
    pub cloc: f64,
    pub first_turn: bool,
    pub last_turn: bool,
    pub tpos1: f64,
    pub tpos2: f64,
    pub ppau: f64,
    pub npau: f64,
    pub has_code: bool,
}

impl ConversationalFeatures {
    pub fn to_dense(&self) -> [f64; CONVERSATIONAL_WIDTH] {
        let b = |x: bool| if x { 1.0 } else { 0.0 };
        let mut out = [0.0; CONVERSATIONAL_WIDTH];
        let aa = AuthorAssociation::ALL
            .iter()
            .position(|a| *a == self.aa)
            .expect("association is one of ALL");
        out[aa] = 1.0;
        out[4] = b(self.begauth);
        out[5] = self.len as f64;
        out[6] = self.tlen;
        out[7] = self.clen;
        out[8] = self.tloc;
        out[9] = self.cloc;
        out[10] = b(self.first_turn);
        out[11] = b(self.last_turn);
        out[12] = self.tpos1;
        out[13] = self.tpos2;
        out[14] = self.ppau;
        out[15] = self.npau;
        out[16] = b(self.has_code);
        out
    }
}

fn word_count(s: &Sentence) -> usize {
    s.text_masked.split_whitespace().count().max(1)
}

/// Per-thread quantities shared by all of its sentences.
struct ThreadContext {
    max_words_thread: usize,
    max_words_comment: Vec<usize>,
    sentences_in_thread: usize,
    duration: f64,
}

impl ThreadContext {
    fn new(thread: &IssueThread) -> Self {
        let max_words_comment: Vec<usize> = thread
            .comments
            .iter()
            .map(|c| c.sentences.iter().map(word_count).max().unwrap_or(1))
            .collect();
        ThreadContext {
            max_words_thread: max_words_comment.iter().copied().max().unwrap_or(1),
            max_words_comment,
            sentences_in_thread: thread.sentence_count().max(1),
            duration: {
                let first = thread.comments.first().map(|c| c.created_at);
                let last = thread.comments.last().map(|c| c.created_at);
                match (first, last) {
                    (Some(a), Some(b)) => (b - a).num_seconds() as f64,
                    _ => 0.0,
                }
            },
        }
    }

    fn extract(
        &self,
        thread: &IssueThread,
        comment_index: usize,
        sentence: &Sentence,
    ) -> ConversationalFeatures {
        let comment = &thread.comments[comment_index];
        let last = thread.comments.len() - 1;
        let words = word_count(sentence) as f64;
        let in_comment = comment.sentences.len().max(1) as f64;

        let temporal = thread.comments.len() > 1 && self.duration > 0.0;
        let t0 = thread.comments[0].created_at;
        let secs = |i: usize| (thread.comments[i].created_at - t0).num_seconds() as f64;
        let frac = |x: f64| {
            if temporal {
                (x / self.duration).clamp(0.0, 1.0)
            } else {
                0.0
            }
        };
        let t = secs(comment_index);
        let tpos1 = frac(t);
        let tpos2 = frac(self.duration - t);
        let ppau = if comment_index == 0 {
            0.0
        } else {
            frac(t - secs(comment_index - 1))
        };
        let npau = if comment_index == last {
            0.0
        } else {
            frac(secs(comment_index + 1) - t)
        };

        let first_login = &thread.comments[0].author_login;
        ConversationalFeatures {
            aa: comment.author_association,
            begauth: comment_index == 0
                || (!comment.author_login.is_empty() && comment.author_login == *first_login),
            len: sentence.text_masked.chars().count(),
            tlen: words / self.max_words_thread as f64,
            clen: words / self.max_words_comment[comment_index] as f64,
            tloc: sentence.sentence_index_in_comment.max(1) as f64 / in_comment,
            cloc: sentence.sentence_index_in_thread.max(1) as f64 / self.sentences_in_thread as f64,
            first_turn: comment_index == 0,
            last_turn: comment_index == last,
            tpos1,
            tpos2,
            ppau,
            npau,
            has_code: comment.has_code,
        }
    }
}

/// Features of one sentence of a segmented thread.
///
/// Temporal features are 0 for single-comment or zero-duration threads.
pub fn extract_conversational(
    thread: &IssueThread,
    comment_index: usize,
    sentence: &Sentence,
) -> ConversationalFeatures {
    ThreadContext::new(thread).extract(thread, comment_index, sentence)
}

/// Features of every sentence of a thread, grouped by comment.
pub fn thread_conversational(thread: &IssueThread) -> Vec<Vec<ConversationalFeatures>> {
    let ctx = ThreadContext::new(thread);
    thread
        .comments
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            c.sentences
                .iter()
                .map(|s| ctx.extract(thread, ci, s))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::IssueComment;
    use chrono::DateTime;

    fn thread() -> IssueThread {
        let at = |s| DateTime::from_timestamp(s, 0).unwrap();
        let mut c0 = IssueComment::new("ann", AuthorAssociation::Member, at(0), "x");
        c0.sentences = ["One two three four.", "Five.", "Six seven.", "Eight."]
            .map(|t| Sentence::from_raw(t, vec![]))
            .to_vec();
        let mut c1 = IssueComment::new("bob", AuthorAssociation::Other, at(100), "`y`");
        c1.sentences = vec![Sentence::from_raw("A b c d e f.", vec![])];
        let mut c2 = IssueComment::new("ann", AuthorAssociation::Member, at(400), "z");
        c2.sentences = vec![Sentence::from_raw("Ok.", vec![])];
        IssueThread::new("p", 1, "t", at(0), vec![c0, c1, c2]).unwrap()
    }

    #[test]
    fn positions_and_lengths() {
        let t = thread();
        let f = thread_conversational(&t);
        let second = &f[0][1];
        assert_eq!(second.tloc, 0.5);
        assert_eq!(second.cloc, 2.0 / 6.0);
        assert_eq!(second.len, 5);
        assert_eq!(f[1][0].tlen, 1.0);
        assert_eq!(f[0][0].clen, 1.0);
        assert_eq!(f[0][0].tlen, 4.0 / 6.0);
    }

    #[test]
    fn first_comment_boundaries() {
        let t = thread();
        let f = extract_conversational(&t, 0, &t.comments[0].sentences[0]);
        assert!(f.first_turn && !f.last_turn && f.begauth);
        assert_eq!(f.tpos1, 0.0);
        assert_eq!(f.ppau, 0.0);
        assert_eq!(f.npau, 0.25);
    }

    #[test]
    fn temporal_and_participant_features() {
        let t = thread();
        let f = thread_conversational(&t);
        assert_eq!(f[1][0].tpos1, 0.25);
        assert_eq!(f[1][0].tpos2, 0.75);
        assert_eq!(f[1][0].ppau, 0.25);
        assert_eq!(f[1][0].npau, 0.75);
        assert!(f[1][0].has_code && !f[1][0].begauth);
        assert!(f[2][0].begauth && f[2][0].last_turn);
        assert_eq!(f[2][0].npau, 0.0);
    }

    #[test]
    fn single_comment_thread_has_zero_temporal_features() {
        let at = DateTime::from_timestamp(0, 0).unwrap();
        let mut c = IssueComment::new("a", AuthorAssociation::Owner, at, "x");
        c.sentences = vec![Sentence::from_raw("Hi.", vec![])];
        let t = IssueThread::new("p", 1, "t", at, vec![c]).unwrap();
        let f = extract_conversational(&t, 0, &t.comments[0].sentences[0]);
        assert_eq!((f.tpos1, f.tpos2, f.ppau, f.npau), (0.0, 0.0, 0.0, 0.0));
        assert!(f.first_turn && f.last_turn);
    }

    #[test]
    fn time_is_measured_from_the_first_comment() {
        let at = |s| DateTime::from_timestamp(s, 0).unwrap();
        let mk = |t| {
            let mut c = IssueComment::new("a", AuthorAssociation::Owner, at(t), "x");
            c.sentences = vec![Sentence::from_raw("Hi.", vec![])];
            c
        };
        let t = IssueThread::new("p", 1, "t", at(0), vec![mk(50), mk(150)]).unwrap();
        let f = thread_conversational(&t);
        assert_eq!((f[0][0].tpos1, f[0][0].tpos2), (0.0, 1.0));
        assert_eq!((f[1][0].tpos1, f[1][0].tpos2), (1.0, 0.0));
        assert_eq!(f[0][0].npau, 1.0);
    }

    #[test]
    fn dense_encoding() {
        let t = thread();
        let d = thread_conversational(&t)[0][0].to_dense();
        assert_eq!(&d[..4], &[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(d.len(), 17);
    }
}
