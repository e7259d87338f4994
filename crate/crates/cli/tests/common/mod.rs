#![allow(dead_code)]

use chrono::{DateTime, Utc};
use infotypes::corpus::{AuthorAssociation, InfoType, IssueComment, IssueThread, Sentence};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FILLER: [&str; 24] = [
    "the", "we", "it", "this", "that", "code", "issue", "maybe", "here", "there", "some", "about",
    "really", "should", "would", "version", "thing", "also", "now", "then", "project", "people",
    "again", "time",
];

const AUTHORS: [&str; 6] = ["alice", "bob", "carol", "dave", "erin", "frank"];

pub fn trainable_labels() -> Vec<InfoType> {
    let excluded = InfoType::default_excluded();
    InfoType::ALL
        .into_iter()
        .filter(|t| !excluded.contains(t))
        .collect()
}

/// Five made-up words unique to a label.
pub fn signature_words(label: InfoType) -> Vec<String> {
    let o = label.ordinal();
    ["vrak", "zulm", "quop", "blen", "trix"]
        .iter()
        .map(|stem| format!("{stem}{}", (b'a' + o as u8) as char))
        .collect()
}

fn at(secs: i64) -> DateTime<Utc> {
    DateTime::from_timestamp(1_600_000_000 + secs, 0).expect("valid timestamp")
}

/// Threads whose sentences each carry two of their label's signature words,
/// three shared filler words and one word that occurs nowhere else.
pub fn planted_corpus(threads: usize, sentences_per_thread: usize, seed: u64) -> Vec<IssueThread> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = trainable_labels();
    let per_comment = 10;
    let mut serial = 0usize;
    (0..threads)
        .map(|ti| {
            let n_comments = sentences_per_thread.div_ceil(per_comment);
            let mut t = 0i64;
            let mut remaining = sentences_per_thread;
            let comments = (0..n_comments)
                .map(|ci| {
                    let n = remaining.min(per_comment);
                    remaining -= n;
                    t += rng.gen_range(60..86_400);
                    let author = AUTHORS[rng.gen_range(0..AUTHORS.len())];
                    let assoc = AuthorAssociation::ALL[rng.gen_range(0..4)];
                    let sentences: Vec<Sentence> = (0..n)
                        .map(|_| {
                            let label = labels[rng.gen_range(0..labels.len())];
                            let sig = signature_words(label);
                            let mut words: Vec<String> =
                                sig.choose_multiple(&mut rng, 2).cloned().collect();
                            words
                                .extend(FILLER.choose_multiple(&mut rng, 3).map(|w| w.to_string()));
                            words.push(format!("noise{serial}x"));
                            serial += 1;
                            words.shuffle(&mut rng);
                            let mut text = words.join(" ");
                            text.push('.');
                            Sentence::from_raw(text, vec![label])
                        })
                        .collect();
                    let body = sentences
                        .iter()
                        .map(|s| s.text_raw.as_str())
                        .collect::<Vec<_>>()
                        .join(" ");
                    let mut c =
                        IssueComment::new(author, assoc, at(if ci == 0 { 0 } else { t }), body);
                    c.sentences = sentences;
                    c
                })
                .collect();
            IssueThread::new("planted/repo", ti as u64 + 1, "", at(0), comments)
                .expect("generated thread is valid")
        })
        .collect()
}

/// A random segmented thread: 1 to 20 comments, 1 to 10 sentences each,
/// non-decreasing timestamps that may coincide.
pub fn random_thread(rng: &mut ChaCha8Rng, number: u64) -> IssueThread {
    let n_comments = if rng.gen_bool(0.1) {
        1
    } else {
        rng.gen_range(1..=20)
    };
    let zero_duration = rng.gen_bool(0.05);
    let mut t = 0i64;
    let comments = (0..n_comments)
        .map(|ci| {
            if ci > 0 && !zero_duration {
                t += if rng.gen_bool(0.2) {
                    0
                } else {
                    rng.gen_range(1..500_000)
                };
            }
            let sentences: Vec<Sentence> = (0..rng.gen_range(1..=10))
                .map(|_| {
                    let words: Vec<&str> = (0..rng.gen_range(1..=30))
                        .map(|_| FILLER[rng.gen_range(0..FILLER.len())])
                        .collect();
                    let mut s = words.join(" ");
                    if rng.gen_bool(0.1) {
                        s.push_str(" `x()`");
                    }
                    Sentence::from_raw(s + ".", vec![])
                })
                .collect();
            let body = sentences
                .iter()
                .map(|s| s.text_raw.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            let mut c = IssueComment::new(
                AUTHORS[rng.gen_range(0..AUTHORS.len())],
                AuthorAssociation::ALL[rng.gen_range(0..4)],
                at(t),
                body,
            );
            c.sentences = sentences;
            c
        })
        .collect();
    IssueThread::new("random/repo", number, "", at(0), comments).expect("generated thread is valid")
}
