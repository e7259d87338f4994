//! Sentence preprocessing: markdown masking, sentence splitting, tokenizing.

mod mask;
mod rules;
mod split;
mod tokenize;

pub use mask::{
    is_mask_token, mask_markdown, mask_markdown_detailed, MaskSpan, Masked, CODE, MASK_TOKENS,
    QUOTE, SCREEN_NAME, URL,
};
pub use rules::TextRules;
pub use split::split_sentence_spans;
pub use tokenize::{lemmatize, tokenize_with, LEMMATIZER_VERSION};

use crate::corpus::{IssueThread, Sentence};

/// Splits masked text into sentences using the global rule tables.
pub fn split_sentences(masked: &str) -> Vec<String> {
    split_sentence_spans(TextRules::global(), masked)
        .into_iter()
        .map(|r| masked[r].to_string())
        .collect()
}

/// Tokenizes a masked sentence using the global rule tables.
pub fn tokenize(sentence: &str) -> Vec<String> {
    tokenize_with(TextRules::global(), sentence)
}

/// Masks and splits raw markdown, keeping each sentence's raw text.
pub fn segment_text(raw: &str) -> Vec<Sentence> {
    let rules = TextRules::global();
    let masked = mask_markdown_detailed(raw);
    split_sentence_spans(rules, &masked.text)
        .into_iter()
        .map(|r| {
            let text_masked = masked.text[r.clone()].to_string();
            Sentence {
                id: String::new(),
                text_raw: masked.unmask(r),
                tokens: tokenize_with(rules, &text_masked),
                text_masked,
                labels: Vec::new(),
                comment_index: 0,
                sentence_index_in_comment: 0,
                sentence_index_in_thread: 0,
            }
        })
        .collect()
}

/// Fills every comment's sentences from its body; the title's sentences
/// lead comment 0. Existing sentences are replaced.
pub fn segment_thread(thread: &mut IssueThread) {
    let title = segment_text(&thread.title);
    for (i, comment) in thread.comments.iter_mut().enumerate() {
        let mut sentences = if i == 0 { title.clone() } else { Vec::new() };
        sentences.extend(segment_text(&comment.body_raw));
        comment.sentences = sentences;
    }
    thread.reindex();
}
