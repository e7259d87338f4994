//! Word tokenizer with contraction expansion and rule-based lemmatization.

use super::mask::is_mask_token;
use super::rules::TextRules;

/// Bumped whenever a rule below changes, since it changes feature columns.
pub const LEMMATIZER_VERSION: u32 = 1;

const IRREGULAR: &[(&str, &str)] = &[
    ("am", "be"),
    ("are", "be"),
    ("is", "be"),
    ("was", "be"),
    ("were", "be"),
    ("been", "be"),
    ("being", "be"),
    ("has", "have"),
    ("had", "have"),
    ("having", "have"),
    ("does", "do"),
    ("did", "do"),
    ("done", "do"),
    ("doing", "do"),
    ("goes", "go"),
    ("went", "go"),
    ("gone", "go"),
    ("got", "get"),
    ("gotten", "get"),
    ("made", "make"),
    ("ran", "run"),
    ("found", "find"),
    ("thought", "think"),
    ("took", "take"),
    ("taken", "take"),
    ("saw", "see"),
    ("seen", "see"),
    ("said", "say"),
    ("knew", "know"),
    ("known", "know"),
    ("wrote", "write"),
    ("written", "write"),
    ("built", "build"),
    ("broke", "break"),
    ("broken", "break"),
    ("came", "come"),
    ("gave", "give"),
    ("given", "give"),
    ("kept", "keep"),
    ("left", "leave"),
    ("felt", "feel"),
    ("meant", "mean"),
    ("sent", "send"),
    ("spent", "spend"),
    ("told", "tell"),
    ("understood", "understand"),
    ("chose", "choose"),
    ("chosen", "choose"),
    ("began", "begin"),
    ("begun", "begin"),
    ("using", "use"),
    ("used", "use"),
    ("uses", "use"),
    ("children", "child"),
    ("men", "man"),
    ("women", "woman"),
    ("indices", "index"),
    ("matrices", "matrix"),
    ("vertices", "vertex"),
    ("data", "data"),
];

/// Words the suffix rules must leave alone.
const KEEP: &[&str] = &[
    "always",
    "perhaps",
    "this",
    "thus",
    "its",
    "his",
    "hers",
    "ours",
    "yours",
    "theirs",
    "yes",
    "series",
    "species",
    "news",
    "analysis",
    "basis",
    "bias",
    "various",
    "previous",
    "obvious",
    "serious",
    "numerous",
    "status",
    "bus",
    "plus",
    "focus",
    "corpus",
    "virus",
    "versus",
    "minus",
    "bonus",
    "alias",
    "canvas",
    "atlas",
    "lens",
    "chaos",
    "process",
    "access",
    "less",
    "unless",
    "whereas",
    "across",
    "upstream",
    "something",
    "nothing",
    "anything",
    "everything",
    "during",
    "morning",
    "evening",
    "thing",
    "string",
    "bring",
    "spring",
    "ring",
    "king",
    "ceiling",
    "sibling",
    "swing",
    "sing",
    "need",
    "feed",
    "seed",
    "speed",
    "indeed",
    "embed",
    "proceed",
    "succeed",
    "exceed",
    "bed",
    "red",
    "shed",
    "hundred",
    "kindred",
    "sacred",
    "naked",
    "wicked",
    "physics",
    "mathematics",
    "statistics",
    "ones",
    "ios",
    "macos",
];

fn is_vowel(s: &[u8], i: usize) -> bool {
    match s[i] {
        b'a' | b'e' | b'i' | b'o' | b'u' => true,
        b'y' => i > 0 && !is_vowel(s, i - 1),
        _ => false,
    }
}

fn has_vowel(s: &str) -> bool {
    let b = s.as_bytes();
    (0..b.len()).any(|i| is_vowel(b, i))
}

/// Number of vowel-consonant sequences.
fn measure(s: &str) -> usize {
    let b = s.as_bytes();
    let mut m = 0;
    let mut prev_vowel = false;
    for i in 0..b.len() {
        let v = is_vowel(b, i);
        if prev_vowel && !v {
            m += 1;
        }
        prev_vowel = v;
    }
    m
}

fn ends_cvc(s: &str) -> bool {
    let b = s.as_bytes();
    let n = b.len();
    n >= 3
        && !is_vowel(b, n - 3)
        && is_vowel(b, n - 2)
        && !is_vowel(b, n - 1)
        && !matches!(b[n - 1], b'w' | b'x' | b'y')
}

/// Repairs a stem after removing -ing or -ed.
fn restore_stem(stem: &str) -> String {
    let b = stem.as_bytes();
    let n = b.len();
    if stem.ends_with("at") || stem.ends_with("bl") || stem.ends_with("iz") {
        return format!("{stem}e");
    }
    if n >= 4
        && b[n - 1] == b[n - 2]
        && !is_vowel(b, n - 1)
        && !matches!(b[n - 1], b'l' | b's' | b'z')
    {
        return stem[..n - 1].to_string();
    }
    if measure(stem) == 1 && ends_cvc(stem) {
        return format!("{stem}e");
    }
    stem.to_string()
}

/// Lemmatizes a lowercase word by irregular-form lookup, then suffix rules
/// for plural -s/-es/-ies, progressive -ing and past -ed.
pub fn lemmatize(word: &str) -> String {
    if let Some((_, lemma)) = IRREGULAR.iter().find(|(w, _)| *w == word) {
        return lemma.to_string();
    }
    if !word.bytes().all(|b| b.is_ascii_lowercase()) || KEEP.contains(&word) {
        return word.to_string();
    }
    let n = word.len();
    if n > 4 && (word.ends_with("ies") || word.ends_with("ied")) {
        return format!("{}y", &word[..n - 3]);
    }
    if n >= 5 && word.ends_with("ing") {
        let stem = &word[..n - 3];
        if stem.len() >= 2 && has_vowel(stem) {
            return restore_stem(stem);
        }
        return word.to_string();
    }
    if n >= 4 && word.ends_with("ed") && !word.ends_with("eed") {
        let stem = &word[..n - 2];
        if stem.len() >= 3 && has_vowel(stem) {
            return restore_stem(stem);
        }
        return word.to_string();
    }
    if n >= 4 && word.ends_with('s') {
        if word.ends_with("sses") {
            return word[..n - 2].to_string();
        }
        if ["ches", "shes", "xes", "zes"]
            .iter()
            .any(|s| word.ends_with(s))
        {
            return word[..n - 2].to_string();
        }
        if word.ends_with("ss") || word.ends_with("us") || word.ends_with("is") {
            return word.to_string();
        }
        return word[..n - 1].to_string();
    }
    word.to_string()
}

fn is_token_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn expand_clitics(rules: &TextRules, piece: &str, out: &mut Vec<String>) {
    if let Some(expansion) = rules.contractions.get(piece) {
        out.extend(expansion.iter().cloned());
        return;
    }
    let generic: [(&str, Option<&str>); 7] = [
        ("n't", Some("not")),
        ("'ll", Some("will")),
        ("'re", Some("are")),
        ("'ve", Some("have")),
        ("'m", Some("am")),
        ("'d", Some("would")),
        ("'s", None),
    ];
    for (suffix, expansion) in generic {
        if let Some(head) = piece.strip_suffix(suffix) {
            if !head.is_empty() {
                out.push(head.to_string());
                if let Some(e) = expansion {
                    out.push(e.to_string());
                }
                return;
            }
        }
    }
    out.push(piece.to_string());
}

/// Splits a (masked) sentence into normalized tokens.
///
/// Mask tokens pass through verbatim; everything else is lowercased,
/// contraction-expanded, stripped of punctuation and lemmatized. Stop words
/// are kept.
pub fn tokenize_with(rules: &TextRules, sentence: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let normalized = sentence.replace('\u{2019}', "'");
    let pieces = normalized.split(|c: char| !(is_token_char(c) || c == '\''));
    for piece in pieces {
        let piece = piece.trim_matches('\'');
        if piece.is_empty() {
            continue;
        }
        if is_mask_token(piece) {
            tokens.push(piece.to_string());
            continue;
        }
        let lower = piece.to_lowercase();
        let mut words = Vec::new();
        expand_clitics(rules, &lower, &mut words);
        for w in words {
            for part in w.split('\'').filter(|p| !p.is_empty()) {
                tokens.push(lemmatize(part));
            }
        }
    }
    tokens
}
