use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use super::Pos;
use crate::error::{Error, Result};

const CLOSED_CLASS: &str = include_str!("../../data/closed_class.tsv");
const OPEN_CLASS: &str = include_str!("../../data/open_class.tsv");
const VERBS: &str = include_str!("../../data/verbs.tsv");
const PARTICIPLES: &str = include_str!("../../data/participles.tsv");

/// How a word relates to the verb lexicon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum VerbForm {
    /// Base or third-person form, ambiguous with a noun.
    Base,
    Past,
    Gerund,
}

/// Word lists backing the tagger.
///
/// Four tab-separated files, one `word<TAB>TAG` per line: closed-class words,
/// open-class overrides, verb base forms and irregular past participles.
#[derive(Clone, Debug)]
pub struct Lexicon {
    closed: HashMap<String, Pos>,
    open: HashMap<String, Pos>,
    verbs: HashSet<String>,
    participles: HashSet<String>,
}

impl Lexicon {
    pub fn builtin() -> &'static Lexicon {
        static BUILTIN: OnceLock<Lexicon> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            Lexicon::from_sources(CLOSED_CLASS, OPEN_CLASS, VERBS, PARTICIPLES)
                .expect("shipped lexicon is well-formed")
        })
    }

    pub fn from_sources(closed: &str, open: &str, verbs: &str, participles: &str) -> Result<Self> {
        Ok(Lexicon {
            closed: parse_tsv(closed)?.into_iter().collect(),
            open: parse_tsv(open)?.into_iter().collect(),
            verbs: only_verbs(parse_tsv(verbs)?)?,
            participles: only_verbs(parse_tsv(participles)?)?,
        })
    }

    /// Loads `closed_class.tsv`, `open_class.tsv`, `verbs.tsv` and `participles.tsv` from `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|e| Error::io(path, e))
        };
        Lexicon::from_sources(
            &read("closed_class.tsv")?,
            &read("open_class.tsv")?,
            &read("verbs.tsv")?,
            &read("participles.tsv")?,
        )
    }

    pub fn closed_class(&self, word: &str) -> Option<Pos> {
        self.closed.get(word).copied()
    }

    pub fn open_class(&self, word: &str) -> Option<Pos> {
        self.open.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.closed.len() + self.open.len() + self.verbs.len() + self.participles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Irregular participle from the shipped list, or any `-ed` form.
    pub fn is_past_participle(&self, word: &str) -> bool {
        self.participles.contains(word) || (word.len() >= 4 && word.ends_with("ed"))
    }

    pub(crate) fn is_irregular_participle(&self, word: &str) -> bool {
        self.participles.contains(word)
    }

    pub(crate) fn verb_form(&self, word: &str) -> Option<VerbForm> {
        let base = |stem: &str| self.verbs.contains(stem);
        if base(word) {
            return Some(VerbForm::Base);
        }
        if let Some(stem) = word.strip_suffix("ies") {
            if base(&format!("{stem}y")) {
                return Some(VerbForm::Base);
            }
        }
        if let Some(stem) = word.strip_suffix("es") {
            if base(stem) {
                return Some(VerbForm::Base);
            }
        }
        if let Some(stem) = word.strip_suffix('s') {
            if base(stem) {
                return Some(VerbForm::Base);
            }
        }
        if let Some(stem) = word.strip_suffix("ed") {
            if base(stem) || base(&format!("{stem}e")) || undoubled(stem).is_some_and(base) {
                return Some(VerbForm::Past);
            }
            if let Some(stem) = stem.strip_suffix('i') {
                if base(&format!("{stem}y")) {
                    return Some(VerbForm::Past);
                }
            }
        }
        if let Some(stem) = word.strip_suffix('d') {
            if stem.ends_with('e') && base(stem) {
                return Some(VerbForm::Past);
            }
        }
        if let Some(stem) = word.strip_suffix("ing") {
            if base(stem) || base(&format!("{stem}e")) || undoubled(stem).is_some_and(base) {
                return Some(VerbForm::Gerund);
            }
        }
        None
    }
}

fn undoubled(stem: &str) -> Option<&str> {
    let bytes = stem.as_bytes();
    let n = bytes.len();
    (n >= 3 && bytes[n - 1] == bytes[n - 2]).then(|| &stem[..n - 1])
}

fn parse_tsv(source: &str) -> Result<Vec<(String, Pos)>> {
    let mut entries = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| Error::Lexicon {
            line: i + 1,
            message,
        };
        let (word, tag) = line
            .split_once('\t')
            .ok_or_else(|| bad(format!("expected word<TAB>TAG, got {line:?}")))?;
        let pos = tag.parse::<Pos>().map_err(bad)?;
        if word.is_empty() {
            return Err(bad("empty word".into()));
        }
        entries.push((word.to_lowercase(), pos));
    }
    Ok(entries)
}

fn only_verbs(entries: Vec<(String, Pos)>) -> Result<HashSet<String>> {
    entries
        .into_iter()
        .map(|(word, pos)| {
            if pos == Pos::Verb {
                Ok(word)
            } else {
                Err(Error::Lexicon {
                    line: 0,
                    message: format!("{word:?}: verb lists accept only VERB entries, got {pos}"),
                })
            }
        })
        .collect()
}
