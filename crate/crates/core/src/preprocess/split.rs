use std::ops::Range;

use super::rules::TextRules;

const TERMINATORS: [char; 3] = ['.', '!', '?'];
const CLOSERS: [char; 5] = [')', ']', '"', '\'', '\u{201D}'];

/// Byte ranges of sentences in `masked`, trimmed of surrounding whitespace.
///
/// Every line break ends a sentence. Within a line, a run of `.`, `!` or `?`
/// (plus closing quotes or brackets) ends a sentence when followed by
/// whitespace and an uppercase letter, or by the end of the line. A single
/// period after a known abbreviation or a lone capital initial does not.
pub fn split_sentence_spans(rules: &TextRules, masked: &str) -> Vec<Range<usize>> {
    let mut spans = Vec::new();
    let mut line_start = 0;
    for line in masked.split_inclusive('\n') {
        split_line(rules, line, line_start, &mut spans);
        line_start += line.len();
    }
    spans
}

fn push_trimmed(text: &str, offset: usize, range: Range<usize>, out: &mut Vec<Range<usize>>) {
    let piece = &text[range.clone()];
    let lead = piece.len() - piece.trim_start().len();
    let trimmed = piece.trim();
    if !trimmed.is_empty() {
        let start = offset + range.start + lead;
        out.push(start..start + trimmed.len());
    }
}

fn split_line(rules: &TextRules, line: &str, offset: usize, out: &mut Vec<Range<usize>>) {
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if !TERMINATORS.contains(&c) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < chars.len() && TERMINATORS.contains(&chars[j].1) {
            j += 1;
        }
        while j < chars.len() && CLOSERS.contains(&chars[j].1) {
            j += 1;
        }
        let end = chars.get(j).map_or(line.len(), |(p, _)| *p);
        let after = &line[end..];
        let next_visible = after.trim_start().chars().next();
        let next_word = after
            .trim_start()
            .trim_start_matches(['(', '[', '"', '\'', '\u{201C}'])
            .chars()
            .next();
        let boundary = match next_visible {
            None => true,
            Some(_) => {
                after.starts_with(char::is_whitespace) && next_word.is_some_and(char::is_uppercase)
            }
        };
        let single_period = c == '.'
            && chars[i..j]
                .iter()
                .filter(|(_, ch)| TERMINATORS.contains(ch))
                .count()
                == 1;
        if boundary
            && !(single_period
                && next_visible.is_some()
                && is_guarded(rules, &line[start..pos + 1]))
        {
            push_trimmed(line, offset, start..end, out);
            start = end;
        }
        i = j.max(i + 1);
    }
    push_trimmed(line, offset, start..line.len(), out);
}

/// True when the word ending at the final '.' is an abbreviation or initial.
fn is_guarded(rules: &TextRules, upto_period: &str) -> bool {
    let word = upto_period
        .rsplit(char::is_whitespace)
        .next()
        .unwrap_or("")
        .trim_start_matches(['(', '[', '"', '\'']);
    if rules.is_abbreviation(word) {
        return true;
    }
    // "et al." spans two words
    let two: Vec<&str> = upto_period.split_whitespace().rev().take(2).collect();
    if two.len() == 2 && rules.is_abbreviation(&format!("{} {}", two[1], two[0])) {
        return true;
    }
    let stem = &word[..word.len() - 1];
    let mut it = stem.chars();
    matches!((it.next(), it.next()), (Some(ch), None) if ch.is_uppercase())
}
