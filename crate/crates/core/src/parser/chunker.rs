use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::lexicon::Lexicon;
use super::tagger::is_possessive_pronoun;
use super::{is_be_form, verb_lemma, Pos, Token};

/// Half-open token range within a sentence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, i: usize) -> bool {
        (self.start..self.end).contains(&i)
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VerbKind {
    Active,
    Passive,
    Infinitive,
    Auxiliary,
    ActiveInfinitive,
    PassiveInfinitive,
}

impl VerbKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerbKind::Active => "ACTIVE",
            VerbKind::Passive => "PASSIVE",
            VerbKind::Infinitive => "INFINITIVE",
            VerbKind::Auxiliary => "AUXILIARY",
            VerbKind::ActiveInfinitive => "ACTIVE_INFINITIVE",
            VerbKind::PassiveInfinitive => "PASSIVE_INFINITIVE",
        }
    }

    pub fn is_infinitival(self) -> bool {
        matches!(
            self,
            VerbKind::Infinitive | VerbKind::ActiveInfinitive | VerbKind::PassiveInfinitive
        )
    }
}

impl fmt::Display for VerbKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NounPhrase {
    pub span: Span,
    /// Token index of the head noun (or pronoun).
    pub head: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerbGroup {
    /// Token index of the content verb; for composite infinitives, the infinitive verb.
    pub head: usize,
    /// Head of the finite verb in `expected to find`, `was used to measure`.
    pub lead: Option<usize>,
    pub kind: VerbKind,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Attachee {
    /// Index into `noun_phrases`.
    Noun(usize),
    /// Index into `verb_groups`.
    Verb(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrepAttachment {
    pub attachee: Attachee,
    /// Token index of the preposition.
    pub prep: usize,
    /// Index into `noun_phrases`.
    pub object: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Possessive {
    pub possessor: Span,
    /// Index into `noun_phrases`.
    pub possessed: usize,
}

/// A tagged sentence with chunks and role assignments.
///
/// Role maps are keyed by verb-group index and point into `noun_phrases`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedSentence {
    pub tokens: Vec<Token>,
    pub noun_phrases: Vec<NounPhrase>,
    pub verb_groups: Vec<VerbGroup>,
    pub subject_of: BTreeMap<usize, usize>,
    pub dobj_of: BTreeMap<usize, usize>,
    /// Verb group → token index of a predicate adjective (`is religious`).
    pub predicate_adj_of: BTreeMap<usize, usize>,
    pub prep_attachments: Vec<PrepAttachment>,
    pub possessives: Vec<Possessive>,
}

impl ParsedSentence {
    pub fn span_text(&self, span: Span) -> String {
        self.tokens[span.start..span.end]
            .iter()
            .map(|t| t.normalized.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn np_text(&self, np: usize) -> String {
        self.span_text(self.noun_phrases[np].span)
    }

    pub fn np_head(&self, np: usize) -> &str {
        &self.tokens[self.noun_phrases[np].head].normalized
    }

    /// Lemma-normalized head used as a pattern anchor.
    pub fn verb_anchor(&self, token: usize) -> &str {
        verb_lemma(&self.tokens[token])
    }
}

impl fmt::Display for ParsedSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sentence")?;
        writeln!(f, "  tokens")?;
        for t in &self.tokens {
            writeln!(f, "    {:>2} {:<16} {}", t.position, t.surface, t.pos)?;
        }
        writeln!(f, "  noun phrases")?;
        for (i, np) in self.noun_phrases.iter().enumerate() {
            writeln!(
                f,
                "    np{i} [{}..{}) \"{}\" head={}",
                np.span.start,
                np.span.end,
                self.span_text(np.span),
                self.tokens[np.head].normalized
            )?;
        }
        writeln!(f, "  verb groups")?;
        for (g, vg) in self.verb_groups.iter().enumerate() {
            write!(
                f,
                "    vg{g} [{}..{}) \"{}\" {} head={}",
                vg.span.start,
                vg.span.end,
                self.span_text(vg.span),
                vg.kind,
                self.verb_anchor(vg.head)
            )?;
            if let Some(lead) = vg.lead {
                write!(f, " lead={}", self.verb_anchor(lead))?;
            }
            writeln!(f)?;
            if let Some(&np) = self.subject_of.get(&g) {
                writeln!(f, "      subj \"{}\"", self.np_text(np))?;
            }
            if let Some(&np) = self.dobj_of.get(&g) {
                writeln!(f, "      dobj \"{}\"", self.np_text(np))?;
            }
            if let Some(&adj) = self.predicate_adj_of.get(&g) {
                writeln!(f, "      adj \"{}\"", self.tokens[adj].normalized)?;
            }
        }
        writeln!(f, "  prepositional attachments")?;
        for pp in &self.prep_attachments {
            let attachee = match pp.attachee {
                Attachee::Noun(np) => format!("np{np} \"{}\"", self.np_text(np)),
                Attachee::Verb(g) => {
                    format!("vg{g} \"{}\"", self.span_text(self.verb_groups[g].span))
                }
            };
            writeln!(
                f,
                "    {attachee} --{}--> \"{}\"",
                self.tokens[pp.prep].normalized,
                self.np_text(pp.object)
            )?;
        }
        writeln!(f, "  possessives")?;
        for p in &self.possessives {
            writeln!(
                f,
                "    \"{}\" owns \"{}\"",
                self.span_text(p.possessor),
                self.np_text(p.possessed)
            )?;
        }
        Ok(())
    }
}

const DEMONSTRATIVES: &[&str] = &["this", "that", "these", "those"];

fn is_possessive_marker(token: &Token) -> bool {
    token.pos == Pos::Other && matches!(token.normalized.as_str(), "'s" | "’s" | "'")
}

struct Chunker<'a> {
    lex: &'a Lexicon,
    tokens: &'a [Token],
}

impl Chunker<'_> {
    fn pos(&self, i: usize) -> Option<Pos> {
        self.tokens.get(i).map(|t| t.pos)
    }

    fn skip_adverbs(&self, mut i: usize) -> usize {
        while self.pos(i) == Some(Pos::Adv) {
            i += 1;
        }
        i
    }

    fn is_verbal(&self, i: usize) -> bool {
        matches!(self.pos(i), Some(Pos::Aux) | Some(Pos::Verb))
    }

    fn is_possessor(&self, i: usize) -> bool {
        let Some(t) = self.tokens.get(i) else {
            return false;
        };
        if t.pos != Pos::Pron {
            return false;
        }
        if is_possessive_pronoun(&t.normalized) {
            return true;
        }
        // "her" is possessive only before a nominal
        t.normalized == "her" && {
            let j = self.skip_adverbs(i + 1);
            matches!(self.pos(j), Some(Pos::Adj) | Some(Pos::Noun))
        }
    }

    /// Maximal run of auxiliaries (adverbs allowed between) ending in at most one verb.
    fn verbal_chain(&self, start: usize) -> Option<Vec<usize>> {
        if !self.is_verbal(start) {
            return None;
        }
        let mut chain = Vec::new();
        let mut j = start;
        loop {
            chain.push(j);
            if self.pos(j) == Some(Pos::Verb) {
                break;
            }
            let k = self.skip_adverbs(j + 1);
            if self.is_verbal(k) {
                j = k;
            } else {
                break;
            }
        }
        Some(chain)
    }

    fn finite_kind(&self, chain: &[usize]) -> VerbKind {
        let head = *chain.last().unwrap();
        let head_tok = &self.tokens[head];
        if head_tok.pos == Pos::Verb {
            let passive = chain.len() >= 2
                && is_be_form(&self.tokens[chain[chain.len() - 2]])
                && self.lex.is_past_participle(&head_tok.normalized);
            if passive {
                VerbKind::Passive
            } else {
                VerbKind::Active
            }
        } else if matches!(verb_lemma(head_tok), "be" | "have") {
            VerbKind::Auxiliary
        } else {
            VerbKind::Active
        }
    }

    /// `to` + adverbs + verbal chain; returns (span end, head).
    fn infinitive_at(&self, to: usize) -> Option<(usize, usize)> {
        if self.pos(to) != Some(Pos::To) {
            return None;
        }
        let start = self.skip_adverbs(to + 1);
        let chain = self.verbal_chain(start)?;
        let head = *chain.last().unwrap();
        Some((head + 1, head))
    }

    fn verb_groups(&self) -> Vec<VerbGroup> {
        let mut groups = Vec::new();
        let mut i = 0;
        while i < self.tokens.len() {
            if let Some((end, head)) = self.infinitive_at(i) {
                groups.push(VerbGroup {
                    head,
                    lead: None,
                    kind: VerbKind::Infinitive,
                    span: Span::new(i, end),
                });
                i = end;
                continue;
            }
            if let Some(chain) = self.verbal_chain(i) {
                let head = *chain.last().unwrap();
                let kind = self.finite_kind(&chain);
                let mut group = VerbGroup {
                    head,
                    lead: None,
                    kind,
                    span: Span::new(i, head + 1),
                };
                if matches!(kind, VerbKind::Active | VerbKind::Passive) {
                    if let Some((end, inf_head)) = self.infinitive_at(head + 1) {
                        group = VerbGroup {
                            head: inf_head,
                            lead: Some(head),
                            kind: if kind == VerbKind::Active {
                                VerbKind::ActiveInfinitive
                            } else {
                                VerbKind::PassiveInfinitive
                            },
                            span: Span::new(i, end),
                        };
                    }
                }
                i = group.span.end;
                groups.push(group);
                continue;
            }
            i += 1;
        }
        groups
    }

    fn noun_phrases(&self, in_vg: &[bool]) -> (Vec<NounPhrase>, Vec<(Span, usize)>) {
        let n = self.tokens.len();
        let mut nps = Vec::new();
        let mut owned = Vec::new();
        let free = |i: usize| i < n && !in_vg[i];
        let mut i = 0;
        while i < n {
            if !free(i) {
                i += 1;
                continue;
            }
            let t = &self.tokens[i];
            let possessor = self.is_possessor(i);
            if t.pos == Pos::Pron && !possessor {
                nps.push(NounPhrase {
                    span: Span::new(i, i + 1),
                    head: i,
                });
                i += 1;
                continue;
            }
            let mut start = i;
            let mut j = i;
            if t.pos == Pos::Det {
                j += 1;
            } else if possessor {
                j += 1;
                start = j;
            }
            // (ADV* ADJ)*
            let mut k = j;
            loop {
                let a = self.skip_adverbs(k);
                if free(a) && self.pos(a) == Some(Pos::Adj) {
                    k = a + 1;
                } else {
                    break;
                }
            }
            let mut m = k;
            while free(m) && self.pos(m) == Some(Pos::Noun) {
                m += 1;
            }
            if m > k {
                let idx = nps.len();
                nps.push(NounPhrase {
                    span: Span::new(start, m),
                    head: m - 1,
                });
                if possessor {
                    owned.push((Span::new(i, i + 1), idx));
                }
                i = m;
                continue;
            }
            let demonstrative =
                t.pos == Pos::Det && DEMONSTRATIVES.contains(&t.normalized.as_str());
            if (demonstrative && k == j) || possessor {
                nps.push(NounPhrase {
                    span: Span::new(i, i + 1),
                    head: i,
                });
                i += 1;
                continue;
            }
            i = if k > j { k } else { i + 1 };
        }
        // NP 's NP
        for (b, np) in nps.iter().enumerate() {
            let s = np.span.start;
            if s >= 2 && is_possessive_marker(&self.tokens[s - 1]) {
                if let Some(a) = nps.iter().position(|p| p.span.end == s - 1) {
                    owned.push((nps[a].span, b));
                }
            }
        }
        owned.sort();
        (nps, owned)
    }
}

pub(crate) fn chunk(lex: &Lexicon, tokens: Vec<Token>) -> ParsedSentence {
    let c = Chunker {
        lex,
        tokens: &tokens,
    };
    let n = tokens.len();
    let verb_groups = c.verb_groups();
    let mut in_vg = vec![false; n];
    for vg in &verb_groups {
        for flag in &mut in_vg[vg.span.start..vg.span.end] {
            *flag = true;
        }
    }
    let (noun_phrases, owned) = c.noun_phrases(&in_vg);
    let np_starting_at = |i: usize| noun_phrases.iter().position(|np| np.span.start == i);
    // object NP right after position `i`, looking past a possessive pronoun
    let object_at = |i: usize| {
        np_starting_at(i).or_else(|| {
            (c.is_possessor(i) && owned.iter().any(|(s, _)| s.start == i))
                .then(|| np_starting_at(i + 1))
                .flatten()
        })
    };

    let mut prep_attachments = Vec::new();
    let mut pp_objects = BTreeSet::new();
    for k in 0..n {
        let prepositional = tokens[k].pos == Pos::Prep || (tokens[k].pos == Pos::To && !in_vg[k]);
        if !prepositional {
            continue;
        }
        let Some(object) = object_at(k + 1) else {
            continue;
        };
        pp_objects.insert(object);
        let attachee = noun_phrases
            .iter()
            .position(|np| np.span.end == k)
            .map(Attachee::Noun)
            .or_else(|| {
                verb_groups
                    .iter()
                    .position(|vg| vg.span.end == k)
                    .map(Attachee::Verb)
            });
        if let Some(attachee) = attachee {
            prep_attachments.push(PrepAttachment {
                attachee,
                prep: k,
                object,
            });
        }
    }

    let mut subject_of = BTreeMap::new();
    let mut dobj_of = BTreeMap::new();
    let mut predicate_adj_of = BTreeMap::new();
    for (g, vg) in verb_groups.iter().enumerate() {
        if vg.kind != VerbKind::Infinitive {
            let subject = noun_phrases
                .iter()
                .enumerate()
                .filter(|(i, np)| np.span.end <= vg.span.start && !pp_objects.contains(i))
                .max_by_key(|(_, np)| np.span.end)
                .filter(|(_, np)| {
                    !verb_groups
                        .iter()
                        .any(|h| h.span.start >= np.span.end && h.span.end <= vg.span.start)
                })
                .map(|(i, _)| i);
            if let Some(np) = subject {
                subject_of.insert(g, np);
            }
        }
        if vg.kind != VerbKind::Passive {
            let after = c.skip_adverbs(vg.span.end);
            // an NP that opens a finite clause is its subject, not an object
            let opens_clause = |np: usize| {
                let end = noun_phrases[np].span.end;
                verb_groups
                    .iter()
                    .any(|h| h.span.start == end && h.kind != VerbKind::Infinitive)
            };
            match object_at(after) {
                Some(np) if !pp_objects.contains(&np) && !opens_clause(np) => {
                    dobj_of.insert(g, np);
                }
                _ if vg.kind == VerbKind::Auxiliary && c.pos(after) == Some(Pos::Adj) => {
                    predicate_adj_of.insert(g, after);
                }
                _ => {}
            }
        }
    }

    let possessives = owned
        .into_iter()
        .map(|(possessor, possessed)| Possessive {
            possessor,
            possessed,
        })
        .collect();

    ParsedSentence {
        tokens,
        noun_phrases,
        verb_groups,
        subject_of,
        dobj_of,
        predicate_adj_of,
        prep_attachments,
        possessives,
    }
}
