//! Replaces GitHub markdown constructs with reserved mask tokens.
//!
//! Passes run in a fixed order over the not-yet-masked text: fenced code,
//! quoted lines, inline code, URLs, then @-mentions. Mask tokens already
//! present in the input act as separators, which makes masking idempotent.

use std::ops::Range;
use std::sync::LazyLock;

use regex::Regex;

pub const CODE: &str = "CODE";
pub const QUOTE: &str = "QUOTE";
pub const URL: &str = "URL";
pub const SCREEN_NAME: &str = "SCREEN_NAME";

pub const MASK_TOKENS: [&str; 4] = [CODE, QUOTE, URL, SCREEN_NAME];

pub fn is_mask_token(s: &str) -> bool {
    MASK_TOKENS.contains(&s)
}

static EXISTING_MASK: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b(?:CODE|QUOTE|URL|SCREEN_NAME)\b").unwrap());
static INLINE_CODE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"``[^\n]+?``|`[^`\n]+`").unwrap());
static URL_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r#"https?://[^\s<>"'`]+"#).unwrap());

/// One substitution: where the token sits in the masked text and what it replaced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskSpan {
    pub token: &'static str,
    pub masked: Range<usize>,
    pub original: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Masked {
    pub text: String,
    pub had_code: bool,
    /// An opening fence had no closing fence; the remainder became one CODE.
    pub unterminated_fence: bool,
    pub spans: Vec<MaskSpan>,
}

impl Masked {
    /// Restores original text for a byte range of the masked text.
    pub fn unmask(&self, range: Range<usize>) -> String {
        let mut out = String::new();
        let mut pos = range.start;
        for span in &self.spans {
            if span.masked.start < range.start || span.masked.end > range.end {
                continue;
            }
            out.push_str(&self.text[pos..span.masked.start]);
            out.push_str(&span.original);
            pos = span.masked.end;
        }
        out.push_str(&self.text[pos..range.end]);
        out
    }
}

#[derive(Debug)]
enum Seg {
    Text(String),
    /// `fresh` is false for tokens that were already in the input.
    Mask {
        token: &'static str,
        original: String,
        fresh: bool,
    },
}

impl Seg {
    fn rendered(&self) -> &str {
        match self {
            Seg::Text(t) => t,
            Seg::Mask { token, .. } => token,
        }
    }
}

/// Masks code, quotes, URLs and user mentions; returns the masked text and
/// whether any code was replaced.
pub fn mask_markdown(body_raw: &str) -> (String, bool) {
    let m = mask_markdown_detailed(body_raw);
    (m.text, m.had_code)
}

pub fn mask_markdown_detailed(body_raw: &str) -> Masked {
    let mut unterminated_fence = false;
    let mut segs = split_existing(body_raw);
    segs = map_text(segs, |text, _| mask_fences(text, &mut unterminated_fence));
    segs = map_text(segs, mask_quotes);
    segs = map_text(segs, |text, _| {
        mask_regex(text, &INLINE_CODE, CODE, |m| m.to_string())
    });
    segs = map_text(segs, |text, _| mask_regex(text, &URL_RE, URL, trim_url));
    segs = map_text(segs, mask_mentions);
    if unterminated_fence {
        log::warn!("unterminated code fence; treating the rest of the comment as code");
    }
    render(segs, unterminated_fence)
}

fn split_existing(text: &str) -> Vec<Seg> {
    let mut segs = Vec::new();
    let mut pos = 0;
    for m in EXISTING_MASK.find_iter(text) {
        if m.start() > pos {
            segs.push(Seg::Text(text[pos..m.start()].to_string()));
        }
        let token = MASK_TOKENS
            .into_iter()
            .find(|t| *t == m.as_str())
            .expect("regex only matches mask tokens");
        segs.push(Seg::Mask {
            token,
            original: token.to_string(),
            fresh: false,
        });
        pos = m.end();
    }
    if pos < text.len() {
        segs.push(Seg::Text(text[pos..].to_string()));
    }
    segs
}

/// Applies `f` to every text segment. `f` receives the rendered character
/// preceding the segment (None at document start).
fn map_text(segs: Vec<Seg>, mut f: impl FnMut(&str, Option<char>) -> Vec<Seg>) -> Vec<Seg> {
    let mut out: Vec<Seg> = Vec::with_capacity(segs.len());
    for seg in segs {
        match seg {
            Seg::Text(t) => {
                let prev = out.last().and_then(|s| s.rendered().chars().last());
                out.extend(f(&t, prev));
            }
            m => out.push(m),
        }
    }
    out
}

fn fresh(token: &'static str, original: impl Into<String>) -> Seg {
    Seg::Mask {
        token,
        original: original.into(),
        fresh: true,
    }
}

fn mask_fences(text: &str, unterminated: &mut bool) -> Vec<Seg> {
    let mut segs = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find("```") {
        if open > 0 {
            segs.push(Seg::Text(rest[..open].to_string()));
        }
        let after_open = &rest[open + 3..];
        match after_open.find("```") {
            Some(close) => {
                let end = open + 3 + close + 3;
                segs.push(fresh(CODE, &rest[open..end]));
                rest = &rest[end..];
            }
            None => {
                *unterminated = true;
                segs.push(fresh(CODE, &rest[open..]));
                rest = "";
            }
        }
    }
    if !rest.is_empty() {
        segs.push(Seg::Text(rest.to_string()));
    }
    segs
}

fn mask_quotes(text: &str, prev: Option<char>) -> Vec<Seg> {
    let mut segs = Vec::new();
    let mut plain = String::new();
    let mut quote: Option<String> = None;
    let mut at_line_start = prev.is_none_or(|c| c == '\n');
    for line in text.split_inclusive('\n') {
        let is_quote = at_line_start && line.trim_start().starts_with('>');
        at_line_start = line.ends_with('\n');
        if is_quote {
            if !plain.is_empty() {
                segs.push(Seg::Text(std::mem::take(&mut plain)));
            }
            let q = quote.get_or_insert_with(String::new);
            q.push_str(line);
            continue;
        }
        if let Some(q) = quote.take() {
            flush_quote(q, &mut segs, &mut plain);
        }
        plain.push_str(line);
    }
    if let Some(q) = quote.take() {
        flush_quote(q, &mut segs, &mut plain);
    }
    if !plain.is_empty() {
        segs.push(Seg::Text(plain));
    }
    segs
}

/// Emits a run of quoted lines as one QUOTE, leaving its final newline as text.
fn flush_quote(mut q: String, segs: &mut Vec<Seg>, plain: &mut String) {
    let newline = q.ends_with('\n');
    if newline {
        q.pop();
    }
    segs.push(fresh(QUOTE, q));
    if newline {
        plain.push('\n');
    }
}

fn mask_regex(
    text: &str,
    re: &Regex,
    token: &'static str,
    accept: impl Fn(&str) -> String,
) -> Vec<Seg> {
    let mut segs = Vec::new();
    let mut pos = 0;
    for m in re.find_iter(text) {
        let matched = accept(m.as_str());
        if matched.is_empty() {
            continue;
        }
        if m.start() > pos {
            segs.push(Seg::Text(text[pos..m.start()].to_string()));
        }
        let end = m.start() + matched.len();
        segs.push(fresh(token, matched));
        pos = end;
    }
    if pos < text.len() {
        segs.push(Seg::Text(text[pos..].to_string()));
    }
    segs
}

/// Drops trailing sentence punctuation and unbalanced closing brackets.
fn trim_url(url: &str) -> String {
    let mut u = url;
    while let Some(last) = u.chars().last() {
        let unbalanced = |open: char, close: char| {
            last == close && u.matches(close).count() > u.matches(open).count()
        };
        if matches!(last, '.' | ',' | ';' | ':' | '!' | '?' | '*' | '_')
            || unbalanced('(', ')')
            || unbalanced('[', ']')
            || unbalanced('{', '}')
        {
            u = &u[..u.len() - last.len_utf8()];
        } else {
            break;
        }
    }
    if u.ends_with("://") {
        String::new()
    } else {
        u.to_string()
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// `@name` where name is 1-39 alphanumerics or hyphens, not starting or
/// ending with a hyphen, and not preceded by a word character (e-mail).
fn mask_mentions(text: &str, prev: Option<char>) -> Vec<Seg> {
    let mut segs = Vec::new();
    let mut pos = 0;
    let mut prev_char = prev;
    let mut iter = text.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if c == '@' && !prev_char.is_some_and(|p| is_word_char(p) || p == '@') {
            let rest = &text[i + 1..];
            let run_len = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '-'))
                .unwrap_or(rest.len());
            let name = rest[..run_len].trim_end_matches('-');
            let next = rest[name.len()..].chars().next();
            let valid = !name.is_empty()
                && name.len() <= 39
                && !name.starts_with('-')
                && !next.is_some_and(|n| is_word_char(n) && n.is_ascii());
            if valid && run_len <= 39 {
                if i > pos {
                    segs.push(Seg::Text(text[pos..i].to_string()));
                }
                let end = i + 1 + name.len();
                segs.push(fresh(SCREEN_NAME, &text[i..end]));
                pos = end;
                while iter.peek().is_some_and(|(j, _)| *j < end) {
                    iter.next();
                }
                prev_char = text[..end].chars().last();
                continue;
            }
        }
        prev_char = Some(c);
    }
    if pos < text.len() {
        segs.push(Seg::Text(text[pos..].to_string()));
    }
    segs
}

/// Concatenates segments, separating mask tokens from adjacent word
/// characters with a single space.
fn render(segs: Vec<Seg>, unterminated_fence: bool) -> Masked {
    let mut text = String::new();
    let mut spans = Vec::new();
    let mut had_code = false;
    let n = segs.len();
    for i in 0..n {
        match &segs[i] {
            Seg::Text(t) => text.push_str(t),
            Seg::Mask {
                token,
                original,
                fresh,
            } => {
                if text.chars().last().is_some_and(is_word_char) {
                    text.push(' ');
                }
                let start = text.len();
                text.push_str(token);
                if *fresh {
                    had_code |= *token == CODE;
                    spans.push(MaskSpan {
                        token,
                        masked: start..text.len(),
                        original: original.clone(),
                    });
                }
                let next = segs.get(i + 1).and_then(|s| s.rendered().chars().next());
                if next.is_some_and(is_word_char) {
                    text.push(' ');
                }
            }
        }
    }
    Masked {
        text,
        had_code,
        unterminated_fence,
        spans,
    }
}
