//! Data tables used by the splitter and tokenizer.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const BUILTIN_ABBREVIATIONS: &str = include_str!("../../data/abbreviations.txt");
const BUILTIN_CONTRACTIONS: &str = include_str!("../../data/contractions.txt");

#[derive(Clone, Debug)]
pub struct TextRules {
    pub(crate) abbreviations: HashSet<String>,
    pub(crate) contractions: HashMap<String, Vec<String>>,
}

static GLOBAL: OnceLock<TextRules> = OnceLock::new();

impl TextRules {
    pub fn builtin() -> Self {
        TextRules {
            abbreviations: parse_abbreviations(BUILTIN_ABBREVIATIONS),
            contractions: parse_contractions(BUILTIN_CONTRACTIONS)
                .expect("builtin contraction table is well formed"),
        }
    }

    /// Builtin tables, with either replaced by the given file.
    pub fn from_files(abbreviations: Option<&Path>, contractions: Option<&Path>) -> Result<Self> {
        let mut rules = Self::builtin();
        if let Some(p) = abbreviations {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            rules.abbreviations = parse_abbreviations(&text);
        }
        if let Some(p) = contractions {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            rules.contractions = parse_contractions(&text)?;
        }
        Ok(rules)
    }

    /// The process-wide tables used by the free functions in `preprocess`.
    pub fn global() -> &'static TextRules {
        GLOBAL.get_or_init(TextRules::builtin)
    }

    /// Installs process-wide tables. Fails once the tables have been used.
    pub fn install(rules: TextRules) -> Result<()> {
        GLOBAL
            .set(rules)
            .map_err(|_| Error::InvalidInput("text rules already initialised".into()))
    }

    pub fn is_abbreviation(&self, word: &str) -> bool {
        self.abbreviations.contains(&word.to_lowercase())
    }
}

fn entries(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn parse_abbreviations(text: &str) -> HashSet<String> {
    entries(text).map(str::to_lowercase).collect()
}

fn parse_contractions(text: &str) -> Result<HashMap<String, Vec<String>>> {
    let mut map = HashMap::new();
    for (i, line) in entries(text).enumerate() {
        let mut words = line.split_whitespace();
        let key = words.next().expect("non-empty line").to_lowercase();
        let expansion: Vec<String> = words.map(str::to_lowercase).collect();
        if expansion.is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("contraction {key:?} has no expansion"),
            });
        }
        map.insert(key.replace('\u{2019}', "'"), expansion);
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_tables_load() {
        let r = TextRules::builtin();
        assert!(r.is_abbreviation("e.g."));
        assert!(r.is_abbreviation("Etc."));
        assert!(r.contractions.len() >= 30);
        assert_eq!(r.contractions["don't"], vec!["do", "not"]);
    }

    #[test]
    fn malformed_contraction_line() {
        assert!(parse_contractions("ok fine\nbroken\n").is_err());
    }
}
