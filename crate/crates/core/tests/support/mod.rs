//! Shared helpers for integration tests: random tagged sentences and a
//! brute-force template matcher.

#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::Rng;

use factfeel::parser::{Attachee, Lexicon, ParsedSentence, Parser, Pos, Token};
use factfeel::templates::{PatternInstance, TemplateForm};

fn vocabulary(pos: Pos) -> &'static [&'static str] {
    match pos {
        Pos::Noun => &["dog", "policy", "evidence", "claim", "guns", "people", "law", "gun"],
        Pos::Verb => &["ban", "see", "used", "expected", "find", "argue", "killed", "taken", "limit"],
        Pos::Aux => &["is", "was", "has", "will", "can", "did", "been", "be", "'s", "were", "had"],
        Pos::Adj => &["wrong", "good", "religious", "red", "true"],
        Pos::Adv => &["not", "very", "really", "also"],
        Pos::Prep => &["of", "in", "for", "with", "like", "about"],
        Pos::Det => &["the", "a", "this", "that", "those"],
        Pos::Pron => &["he", "it", "my", "his", "her", "they", "you", "their"],
        Pos::Conj => &["and", "but"],
        Pos::To => &["to"],
        Pos::Other => &[",", "'s", "."],
    }
}

/// Tag sequences shaped like short phrases so verb groups, noun phrases and
/// attachments all occur often.
fn chunk_tags(rng: &mut impl Rng) -> Vec<Pos> {
    use Pos::*;
    let pieces: &[&[Pos]] = &[
        &[Det, Noun],
        &[Det, Adj, Noun],
        &[Noun],
        &[Noun, Noun],
        &[Pron],
        &[Pron, Noun],
        &[Aux, Verb],
        &[Verb],
        &[Aux, Adv, Verb],
        &[Aux, Aux, Verb],
        &[Aux],
        &[To, Verb],
        &[Prep],
        &[Adj],
        &[Adv],
        &[Adv, Adj],
        &[Conj],
        &[Other],
        &[Det],
        &[Adj, Conj, Adj],
        &[Adv, Adv],
    ];
    pieces.choose(rng).unwrap().to_vec()
}

/// A tagged sentence of 1 to 12 tokens.
pub fn random_sentence(rng: &mut impl Rng) -> Vec<Token> {
    let target = rng.random_range(1..=12);
    let mut tags = Vec::new();
    while tags.len() < target {
        tags.extend(chunk_tags(rng));
    }
    tags.truncate(target);
    tags.iter()
        .enumerate()
        .map(|(i, &pos)| {
            let word = *vocabulary(pos).choose(rng).unwrap();
            Token::tagged(word, pos, i)
        })
        .collect()
}

const BE: &[&str] = &["be", "is", "am", "are", "was", "were", "been", "being", "'m", "'re"];
const HAVE: &[&str] = &["have", "has", "had", "having", "'ve"];

fn lemma(t: &Token) -> String {
    let w = t.normalized.as_str();
    if BE.contains(&w) || (t.pos == Pos::Aux && w == "'s") {
        "be".into()
    } else if HAVE.contains(&w) {
        "have".into()
    } else {
        w.into()
    }
}

fn is_be(t: &Token) -> bool {
    lemma(t) == "be"
}

fn verbal(t: &Token) -> bool {
    matches!(t.pos, Pos::Verb | Pos::Aux)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Active,
    Passive,
    Infinitive,
    Auxiliary,
    ActiveInf,
    PassiveInf,
}

struct Group {
    head: usize,
    lead: Option<usize>,
    kind: Kind,
}

/// Whether verbal token `v` in `tokens[lo..=v]` is a passive participle.
fn passive_at(lex: &Lexicon, tokens: &[Token], lo: usize, v: usize) -> bool {
    if tokens[v].pos != Pos::Verb || !lex.is_past_participle(&tokens[v].normalized) {
        return false;
    }
    (lo..v).rev().find(|&i| verbal(&tokens[i])).is_some_and(|i| is_be(&tokens[i]))
}

/// Kind, head and lead of a verb group read back from its tags alone.
fn classify_group(lex: &Lexicon, tokens: &[Token], start: usize, end: usize) -> Group {
    let head = (start..end).rev().find(|&i| verbal(&tokens[i])).unwrap();
    if tokens[start].pos == Pos::To {
        return Group {
            head,
            lead: None,
            kind: Kind::Infinitive,
        };
    }
    if let Some(to) = (start..end).find(|&i| tokens[i].pos == Pos::To) {
        let lead = (start..to).rev().find(|&i| verbal(&tokens[i])).unwrap();
        let kind = if passive_at(lex, tokens, start, lead) {
            Kind::PassiveInf
        } else {
            Kind::ActiveInf
        };
        return Group {
            head,
            lead: Some(lead),
            kind,
        };
    }
    let kind = if tokens[head].pos == Pos::Verb {
        if passive_at(lex, tokens, start, head) {
            Kind::Passive
        } else {
            Kind::Active
        }
    } else if matches!(lemma(&tokens[head]).as_str(), "be" | "have") {
        Kind::Auxiliary
    } else {
        Kind::Active
    };
    Group {
        head,
        lead: None,
        kind,
    }
}

fn anchor(tokens: &[Token], form: TemplateForm, i: usize) -> String {
    if !form.is_ngram() && verbal(&tokens[i]) {
        lemma(&tokens[i])
    } else {
        tokens[i].normalized.clone()
    }
}

/// How many times `form` matches with anchors at exactly `tuple`.
fn witnesses(
    p: &ParsedSentence,
    groups: &[Group],
    form: TemplateForm,
    tuple: &[usize],
) -> usize {
    use TemplateForm as F;
    if let Some(tags) = form.tag_sequence() {
        let ok = tuple.len() == tags.len()
            && tuple.windows(2).all(|w| w[1] == w[0] + 1)
            && tuple.iter().zip(tags).all(|(&i, &t)| p.tokens[i].pos == t);
        return ok as usize;
    }
    let np_head = |np: usize| p.noun_phrases[np].head;
    let subj = |g: usize| p.subject_of.get(&g).map(|&np| np_head(np));
    let dobj = |g: usize| p.dobj_of.get(&g).map(|&np| np_head(np));
    let adj = |g: usize| p.predicate_adj_of.get(&g).copied();
    let mut n = 0;
    for (g, grp) in groups.iter().enumerate() {
        let k = grp.kind;
        let hit = match (form, tuple) {
            (F::SubjPassVP, &[v]) => k == Kind::Passive && grp.head == v && subj(g).is_some(),
            (F::SubjActVP, &[v]) => k == Kind::Active && grp.head == v && subj(g).is_some(),
            (F::ActVPDobj, &[v]) => k == Kind::Active && grp.head == v && dobj(g).is_some(),
            (F::SubjActVPDobj, &[v, d]) => {
                k == Kind::Active && grp.head == v && subj(g).is_some() && dobj(g) == Some(d)
            }
            (F::InfVPDobj, &[v]) => k == Kind::Infinitive && grp.head == v && dobj(g).is_some(),
            (F::SubjActInfVP, &[l, v]) => {
                k == Kind::ActiveInf && grp.lead == Some(l) && grp.head == v && subj(g).is_some()
            }
            (F::SubjPassInfVP, &[l, v]) => {
                k == Kind::PassiveInf && grp.lead == Some(l) && grp.head == v && subj(g).is_some()
            }
            (F::ActInfVPDobj, &[l, v]) => {
                k == Kind::ActiveInf && grp.lead == Some(l) && grp.head == v && dobj(g).is_some()
            }
            (F::PassInfVPDobj, &[l, v]) => {
                k == Kind::PassiveInf && grp.lead == Some(l) && grp.head == v && dobj(g).is_some()
            }
            (F::SubjAuxVPDobj, &[v, d]) => {
                k == Kind::Auxiliary && grp.head == v && subj(g).is_some() && dobj(g) == Some(d)
            }
            (F::SubjAuxVPDobjRhs, &[s, v]) => {
                k == Kind::Auxiliary && grp.head == v && subj(g) == Some(s) && dobj(g).is_some()
            }
            (F::SubjAuxVPAdj, &[v, a]) => {
                k == Kind::Auxiliary && grp.head == v && subj(g).is_some() && adj(g) == Some(a)
            }
            _ => false,
        };
        n += hit as usize;
    }
    for pp in &p.prep_attachments {
        let hit = match (form, tuple, pp.attachee) {
            (F::NPPrepNP, &[h, k], Attachee::Noun(np)) => np_head(np) == h && pp.prep == k,
            (F::ActVPPrepNP | F::PassVPPrepNP | F::InfVPPrepNP, &[v, k], Attachee::Verb(g)) => {
                let grp = &groups[g];
                let expected = match grp.kind {
                    Kind::Active => Some(F::ActVPPrepNP),
                    Kind::Passive => Some(F::PassVPPrepNP),
                    Kind::Infinitive | Kind::ActiveInf | Kind::PassiveInf => Some(F::InfVPPrepNP),
                    Kind::Auxiliary => None,
                };
                expected == Some(form) && grp.head == v && pp.prep == k
            }
            _ => false,
        };
        n += hit as usize;
    }
    if let (F::PossessiveNP, &[h]) = (form, tuple) {
        n += p.possessives.iter().filter(|o| np_head(o.possessed) == h).count();
    }
    n
}

fn arity(form: TemplateForm) -> usize {
    use TemplateForm as F;
    match form {
        F::SubjPassVP | F::SubjActVP | F::ActVPDobj | F::InfVPDobj | F::PossessiveNP => 1,
        f => f.tag_sequence().map_or(2, <[Pos]>::len),
    }
}

/// Every template match found by trying each form at each anchor tuple.
pub fn reference_instances(lex: &Lexicon, p: &ParsedSentence) -> Vec<PatternInstance> {
    let groups: Vec<Group> = p
        .verb_groups
        .iter()
        .map(|vg| classify_group(lex, &p.tokens, vg.span.start, vg.span.end))
        .collect();
    let n = p.tokens.len();
    let mut found: Vec<(usize, usize, PatternInstance)> = Vec::new();
    for (ordinal, &form) in TemplateForm::ALL.iter().enumerate() {
        let k = arity(form);
        let mut tuple = vec![0usize; k];
        let total = n.pow(k as u32);
        for code in 0..total {
            let mut c = code;
            for slot in tuple.iter_mut().rev() {
                *slot = c % n;
                c /= n;
            }
            let w = witnesses(p, &groups, form, &tuple);
            if w > 0 {
                let anchors: Vec<String> = tuple.iter().map(|&i| anchor(&p.tokens, form, i)).collect();
                for _ in 0..w {
                    found.push((tuple[0], ordinal, PatternInstance::new(form, anchors.clone())));
                }
            }
        }
    }
    found.sort_by(|a, b| (a.0, a.1, &a.2.anchors).cmp(&(b.0, b.1, &b.2.anchors)));
    found.into_iter().map(|(_, _, p)| p).collect()
}

pub fn chunk(parser: &Parser<'_>, tokens: Vec<Token>) -> ParsedSentence {
    parser.chunk(tokens)
}
