//! Rule-based shallow parser: tokenizer, coarse POS tagger and chunker.
//!
//! The chunker assigns only the grammatical roles the pattern templates
//! consume: subjects, direct objects, predicate adjectives, prepositional
//! attachments and possessives.

mod chunker;
mod lexicon;
mod tagger;
mod tokenizer;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use chunker::{
    Attachee, NounPhrase, ParsedSentence, Possessive, PrepAttachment, Span, VerbGroup, VerbKind,
};
pub use lexicon::Lexicon;
pub use tokenizer::tokenize;

/// Coarse part-of-speech tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Pos {
    Noun,
    Verb,
    Aux,
    Adj,
    Adv,
    Prep,
    Det,
    Pron,
    Conj,
    To,
    Other,
}

impl Pos {
    pub const ALL: [Pos; 11] = [
        Pos::Noun,
        Pos::Verb,
        Pos::Aux,
        Pos::Adj,
        Pos::Adv,
        Pos::Prep,
        Pos::Det,
        Pos::Pron,
        Pos::Conj,
        Pos::To,
        Pos::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "NOUN",
            Pos::Verb => "VERB",
            Pos::Aux => "AUX",
            Pos::Adj => "ADJ",
            Pos::Adv => "ADV",
            Pos::Prep => "PREP",
            Pos::Det => "DET",
            Pos::Pron => "PRON",
            Pos::Conj => "CONJ",
            Pos::To => "TO",
            Pos::Other => "OTHER",
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pos::ALL
            .iter()
            .copied()
            .find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown tag {s:?}"))
    }
}

impl TryFrom<String> for Pos {
    type Error = String;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<Pos> for String {
    fn from(pos: Pos) -> String {
        pos.as_str().to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub normalized: String,
    pub pos: Pos,
    pub position: usize,
}

impl Token {
    pub fn new(surface: impl Into<String>, position: usize) -> Self {
        let surface = surface.into();
        Token {
            normalized: surface.to_lowercase(),
            surface,
            pos: Pos::Other,
            position,
        }
    }

    pub fn tagged(surface: impl Into<String>, pos: Pos, position: usize) -> Self {
        Token {
            pos,
            ..Token::new(surface, position)
        }
    }

    pub(crate) fn is_word(&self) -> bool {
        self.normalized.chars().any(char::is_alphanumeric)
    }
}

const BE_FORMS: &[&str] = &["be", "is", "am", "are", "was", "were", "been", "being", "'m", "'re"];
const HAVE_FORMS: &[&str] = &["have", "has", "had", "having", "'ve"];

/// True for forms of "to be"; `'s` counts only once the tagger has marked it AUX.
pub fn is_be_form(token: &Token) -> bool {
    BE_FORMS.contains(&token.normalized.as_str())
        || (token.pos == Pos::Aux && matches!(token.normalized.as_str(), "'s" | "’s"))
}

pub fn is_have_form(token: &Token) -> bool {
    HAVE_FORMS.contains(&token.normalized.as_str())
}

/// Pattern identity form of a verb head: be/have forms collapse, everything else is case-folded.
pub fn verb_lemma(token: &Token) -> &str {
    if is_be_form(token) {
        "be"
    } else if is_have_form(token) {
        "have"
    } else {
        &token.normalized
    }
}

/// Tokenizes, tags and chunks raw text.
#[derive(Clone, Copy, Debug)]
pub struct Parser<'l> {
    lexicon: &'l Lexicon,
}

impl Default for Parser<'static> {
    fn default() -> Self {
        Parser {
            lexicon: Lexicon::builtin(),
        }
    }
}

impl<'l> Parser<'l> {
    pub fn new(lexicon: &'l Lexicon) -> Self {
        Parser { lexicon }
    }

    pub fn lexicon(&self) -> &'l Lexicon {
        self.lexicon
    }

    pub fn pos_tag(&self, tokens: &mut [Token]) {
        tagger::pos_tag(self.lexicon, tokens);
    }

    /// Chunks an already tagged sentence.
    pub fn chunk(&self, tokens: Vec<Token>) -> ParsedSentence {
        chunker::chunk(self.lexicon, tokens)
    }

    pub fn parse(&self, text: &str) -> Vec<ParsedSentence> {
        tokenize(text)
            .into_iter()
            .map(|mut sentence| {
                self.pos_tag(&mut sentence);
                self.chunk(sentence)
            })
            .collect()
    }
}
