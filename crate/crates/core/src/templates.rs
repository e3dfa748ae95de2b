//! Exhaustive instantiation of the pattern templates over parsed sentences.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::parser::{Attachee, ParsedSentence, Parser, Pos, VerbKind};

/// The 17 syntactic templates followed by the 7 tag n-gram templates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TemplateForm {
    SubjPassVP,
    SubjActVP,
    SubjActVPDobj,
    SubjActInfVP,
    SubjPassInfVP,
    SubjAuxVPDobj,
    SubjAuxVPAdj,
    ActVPDobj,
    InfVPDobj,
    ActInfVPDobj,
    PassInfVPDobj,
    SubjAuxVPDobjRhs,
    NPPrepNP,
    ActVPPrepNP,
    PassVPPrepNP,
    InfVPPrepNP,
    PossessiveNP,
    AdjNoun,
    AdjConjAdj,
    AdvAdv,
    AdvAdvAdv,
    AdjAdj,
    AdvAdj,
    AdvAdvAdj,
}

use TemplateForm as F;

const NGRAMS: [(TemplateForm, &[Pos]); 7] = [
    (F::AdjNoun, &[Pos::Adj, Pos::Noun]),
    (F::AdjConjAdj, &[Pos::Adj, Pos::Conj, Pos::Adj]),
    (F::AdvAdv, &[Pos::Adv, Pos::Adv]),
    (F::AdvAdvAdv, &[Pos::Adv, Pos::Adv, Pos::Adv]),
    (F::AdjAdj, &[Pos::Adj, Pos::Adj]),
    (F::AdvAdj, &[Pos::Adv, Pos::Adj]),
    (F::AdvAdvAdj, &[Pos::Adv, Pos::Adv, Pos::Adj]),
];

impl TemplateForm {
    pub const ALL: [TemplateForm; 24] = [
        F::SubjPassVP,
        F::SubjActVP,
        F::SubjActVPDobj,
        F::SubjActInfVP,
        F::SubjPassInfVP,
        F::SubjAuxVPDobj,
        F::SubjAuxVPAdj,
        F::ActVPDobj,
        F::InfVPDobj,
        F::ActInfVPDobj,
        F::PassInfVPDobj,
        F::SubjAuxVPDobjRhs,
        F::NPPrepNP,
        F::ActVPPrepNP,
        F::PassVPPrepNP,
        F::InfVPPrepNP,
        F::PossessiveNP,
        F::AdjNoun,
        F::AdjConjAdj,
        F::AdvAdv,
        F::AdvAdvAdv,
        F::AdjAdj,
        F::AdvAdj,
        F::AdvAdvAdj,
    ];

    /// Identifier used in files and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            F::SubjPassVP => "SubjPassVP",
            F::SubjActVP => "SubjActVP",
            F::SubjActVPDobj => "SubjActVPDobj",
            F::SubjActInfVP => "SubjActInfVP",
            F::SubjPassInfVP => "SubjPassInfVP",
            F::SubjAuxVPDobj => "SubjAuxVPDobj",
            F::SubjAuxVPAdj => "SubjAuxVPAdj",
            F::ActVPDobj => "ActVPDobj",
            F::InfVPDobj => "InfVPDobj",
            F::ActInfVPDobj => "ActInfVPDobj",
            F::PassInfVPDobj => "PassInfVPDobj",
            F::SubjAuxVPDobjRhs => "SubjAuxVPDobj_rhs",
            F::NPPrepNP => "NPPrepNP",
            F::ActVPPrepNP => "ActVPPrepNP",
            F::PassVPPrepNP => "PassVPPrepNP",
            F::InfVPPrepNP => "InfVPPrepNP",
            F::PossessiveNP => "PossessiveNP",
            F::AdjNoun => "AdjNoun",
            F::AdjConjAdj => "AdjConjAdj",
            F::AdvAdv => "AdvAdv",
            F::AdvAdvAdv => "AdvAdvAdv",
            F::AdjAdj => "AdjAdj",
            F::AdvAdj => "AdvAdj",
            F::AdvAdvAdj => "AdvAdvAdj",
        }
    }

    /// Human-readable template with its extraction slot.
    pub fn label(self) -> &'static str {
        match self {
            F::SubjPassVP => "<subj> PassVP",
            F::SubjActVP => "<subj> ActVP",
            F::SubjActVPDobj => "<subj> ActVP Dobj",
            F::SubjActInfVP => "<subj> ActInfVP",
            F::SubjPassInfVP => "<subj> PassInfVP",
            F::SubjAuxVPDobj => "<subj> AuxVP Dobj",
            F::SubjAuxVPAdj => "<subj> AuxVP Adj",
            F::ActVPDobj => "ActVP <dobj>",
            F::InfVPDobj => "InfVP <dobj>",
            F::ActInfVPDobj => "ActInfVP <dobj>",
            F::PassInfVPDobj => "PassInfVP <dobj>",
            F::SubjAuxVPDobjRhs => "Subj AuxVP <dobj>",
            F::NPPrepNP => "NP Prep <np>",
            F::ActVPPrepNP => "ActVP Prep <np>",
            F::PassVPPrepNP => "PassVP Prep <np>",
            F::InfVPPrepNP => "InfVP Prep <np>",
            F::PossessiveNP => "<possessive> NP",
            F::AdjNoun => "Adj Noun",
            F::AdjConjAdj => "Adj Conj Adj",
            F::AdvAdv => "Adv Adv",
            F::AdvAdvAdv => "Adv Adv Adv",
            F::AdjAdj => "Adj Adj",
            F::AdvAdj => "Adv Adj",
            F::AdvAdvAdj => "Adv Adv Adj",
        }
    }

    pub fn is_ngram(self) -> bool {
        self.tag_sequence().is_some()
    }

    /// Tag window matched by an n-gram form.
    pub fn tag_sequence(self) -> Option<&'static [Pos]> {
        NGRAMS.iter().find(|(f, _)| *f == self).map(|(_, tags)| *tags)
    }

    fn ordinal(self) -> usize {
        self as usize
    }
}

impl fmt::Display for TemplateForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TemplateForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TemplateForm::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| format!("unknown template form {s:?}"))
    }
}

impl TryFrom<String> for TemplateForm {
    type Error = String;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<TemplateForm> for String {
    fn from(form: TemplateForm) -> String {
        form.name().to_string()
    }
}

/// A template filled with the words at one match site.
///
/// Identity is `(form, anchors)`; the open slot is never part of the anchors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PatternInstance {
    pub form: TemplateForm,
    pub anchors: Vec<String>,
}

impl PatternInstance {
    pub fn new<S: Into<String>>(form: TemplateForm, anchors: impl IntoIterator<Item = S>) -> Self {
        PatternInstance {
            form,
            anchors: anchors.into_iter().map(Into::into).collect(),
        }
    }

    /// Canonical uppercase rendering, e.g. `RESULT OF` or `EXPECTED TO FIND`.
    pub fn display(&self) -> String {
        let sep = match self.form {
            F::SubjActInfVP | F::SubjPassInfVP | F::ActInfVPDobj | F::PassInfVPDobj => " TO ",
            _ => " ",
        };
        self.anchors.join(sep).to_uppercase()
    }
}

impl fmt::Display for PatternInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}", self.form, self.display())
    }
}

struct Site {
    position: usize,
    instance: PatternInstance,
}

/// Every template match in one sentence, ordered by the position of the
/// first anchor word, then by form, then by anchors.
pub fn instantiate(parsed: &ParsedSentence) -> Vec<PatternInstance> {
    let mut sites = Vec::new();
    let mut emit = |form: TemplateForm, tokens: &[usize]| {
        let anchors = tokens
            .iter()
            .map(|&t| anchor_word(parsed, form, t).to_string())
            .collect();
        sites.push(Site {
            position: tokens[0],
            instance: PatternInstance { form, anchors },
        });
    };

    for (g, vg) in parsed.verb_groups.iter().enumerate() {
        let subj = parsed.subject_of.get(&g).map(|&np| parsed.noun_phrases[np].head);
        let dobj = parsed.dobj_of.get(&g).map(|&np| parsed.noun_phrases[np].head);
        let adj = parsed.predicate_adj_of.get(&g).copied();
        match vg.kind {
            VerbKind::Passive => {
                if subj.is_some() {
                    emit(F::SubjPassVP, &[vg.head]);
                }
            }
            VerbKind::Active => {
                if subj.is_some() {
                    emit(F::SubjActVP, &[vg.head]);
                }
                if let Some(d) = dobj {
                    emit(F::ActVPDobj, &[vg.head]);
                    if subj.is_some() {
                        emit(F::SubjActVPDobj, &[vg.head, d]);
                    }
                }
            }
            VerbKind::Infinitive => {
                if dobj.is_some() {
                    emit(F::InfVPDobj, &[vg.head]);
                }
            }
            VerbKind::ActiveInfinitive | VerbKind::PassiveInfinitive => {
                let lead = vg.lead.expect("composite infinitive has a lead verb");
                let active = vg.kind == VerbKind::ActiveInfinitive;
                if subj.is_some() {
                    let form = if active { F::SubjActInfVP } else { F::SubjPassInfVP };
                    emit(form, &[lead, vg.head]);
                }
                if dobj.is_some() {
                    let form = if active { F::ActInfVPDobj } else { F::PassInfVPDobj };
                    emit(form, &[lead, vg.head]);
                }
            }
            VerbKind::Auxiliary => {
                if let (Some(s), Some(d)) = (subj, dobj) {
                    emit(F::SubjAuxVPDobj, &[vg.head, d]);
                    emit(F::SubjAuxVPDobjRhs, &[s, vg.head]);
                }
                if let (Some(_), Some(a)) = (subj, adj) {
                    emit(F::SubjAuxVPAdj, &[vg.head, a]);
                }
            }
        }
    }

    for pp in &parsed.prep_attachments {
        match pp.attachee {
            Attachee::Noun(np) => emit(F::NPPrepNP, &[parsed.noun_phrases[np].head, pp.prep]),
            Attachee::Verb(g) => {
                let vg = &parsed.verb_groups[g];
                let form = match vg.kind {
                    VerbKind::Active => Some(F::ActVPPrepNP),
                    VerbKind::Passive => Some(F::PassVPPrepNP),
                    VerbKind::Infinitive
                    | VerbKind::ActiveInfinitive
                    | VerbKind::PassiveInfinitive => Some(F::InfVPPrepNP),
                    VerbKind::Auxiliary => None,
                };
                if let Some(form) = form {
                    emit(form, &[vg.head, pp.prep]);
                }
            }
        }
    }

    for p in &parsed.possessives {
        emit(F::PossessiveNP, &[parsed.noun_phrases[p.possessed].head]);
    }

    for (form, tags) in NGRAMS {
        for (start, window) in parsed.tokens.windows(tags.len()).enumerate() {
            if window.iter().zip(tags).all(|(t, &tag)| t.pos == tag) {
                let positions: Vec<usize> = (start..start + tags.len()).collect();
                emit(form, &positions);
            }
        }
    }

    sites.sort_by(|a, b| {
        (a.position, a.instance.form.ordinal(), &a.instance.anchors).cmp(&(
            b.position,
            b.instance.form.ordinal(),
            &b.instance.anchors,
        ))
    });
    sites.into_iter().map(|s| s.instance).collect()
}

/// Verb heads collapse be/have inflections; every other anchor is the case-folded word.
fn anchor_word(parsed: &ParsedSentence, form: TemplateForm, token: usize) -> &str {
    let t = &parsed.tokens[token];
    if !form.is_ngram() && matches!(t.pos, Pos::Verb | Pos::Aux) {
        parsed.verb_anchor(token)
    } else {
        &t.normalized
    }
}

pub fn instantiate_text(parser: &Parser<'_>, text: &str) -> Vec<PatternInstance> {
    parser
        .parse(text)
        .iter()
        .flat_map(instantiate)
        .collect()
}

pub fn instantiate_document(parser: &Parser<'_>, doc: &Document) -> Vec<PatternInstance> {
    instantiate_text(parser, &doc.text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn displays(text: &str) -> Vec<(TemplateForm, String)> {
        instantiate_text(&Parser::default(), text)
            .into_iter()
            .map(|p| (p.form, p.display()))
            .collect()
    }

    fn has(text: &str, form: TemplateForm, display: &str) -> bool {
        displays(text)
            .iter()
            .any(|(f, d)| *f == form && d == display)
    }

    #[test]
    fn exactly_seventeen_syntactic_and_seven_ngram_forms() {
        let ngrams = TemplateForm::ALL.iter().filter(|f| f.is_ngram()).count();
        assert_eq!(ngrams, 7);
        assert_eq!(TemplateForm::ALL.len() - ngrams, 17);
        for (i, f) in TemplateForm::ALL.iter().enumerate() {
            assert_eq!(f.ordinal(), i);
            assert_eq!(f.name().parse::<TemplateForm>().unwrap(), *f);
        }
    }

    #[test]
    fn passive_subject_pattern() {
        assert_eq!(
            displays("The theory was observed"),
            vec![(F::SubjPassVP, "OBSERVED".to_string())]
        );
    }

    #[test]
    fn ngram_patterns() {
        assert!(has("scientific theory", F::AdjNoun, "SCIENTIFIC THEORY"));
        assert!(has("It is morally wrong.", F::AdvAdj, "MORALLY WRONG"));
    }

    #[test]
    fn figure_examples() {
        assert!(has("People want explanation.", F::SubjActVPDobj, "WANT EXPLANATION"));
        assert!(has("People want explanation.", F::SubjActVP, "WANT"));
        assert!(has("They create problems.", F::ActVPDobj, "CREATE"));
        assert!(has("Scientists expected to find bones.", F::SubjActInfVP, "EXPECTED TO FIND"));
        assert!(has("The tool was used to measure heat.", F::SubjPassInfVP, "USED TO MEASURE"));
        assert!(has("This is evidence.", F::SubjAuxVPDobj, "BE EVIDENCE"));
        assert!(has("The question is evidence.", F::SubjAuxVPDobjRhs, "QUESTION BE"));
        assert!(has("He is religious.", F::SubjAuxVPAdj, "BE RELIGIOUS"));
        assert!(has("The idea is absurd.", F::SubjAuxVPAdj, "BE ABSURD"));
        assert!(has("It is wrong to limit speech.", F::InfVPDobj, "LIMIT"));
        assert!(has("I would like to see proof.", F::ActInfVPDobj, "LIKE TO SEE"));
        assert!(has("origins of life", F::NPPrepNP, "ORIGINS OF"));
        assert!(has("Birds evolved from dinosaurs.", F::ActVPPrepNP, "EVOLVED FROM"));
        assert!(has("The law was replaced by a new law.", F::PassVPPrepNP, "REPLACED BY"));
        assert!(has("Pick a word to use as a name.", F::InfVPPrepNP, "USE AS"));
        assert!(has("My son left.", F::PossessiveNP, "SON"));
        assert!(has("Humans are the result of evolution.", F::NPPrepNP, "RESULT OF"));
    }

    #[test]
    fn duplicated_sentence_doubles_every_pattern() {
        let once = displays("The theory was observed.");
        let twice = displays("The theory was observed. The theory was observed.");
        assert_eq!(twice.len(), 2 * once.len());
    }

    #[test]
    fn empty_text_has_no_patterns() {
        assert!(displays("").is_empty());
    }

    #[test]
    fn output_is_position_ordered() {
        let parser = Parser::default();
        for parsed in parser.parse("The scientific theory was clearly observed by many people.") {
            let out = instantiate(&parsed);
            assert_eq!(out, instantiate(&parsed));
            assert!(out.len() <= 24 * parsed.tokens.len().pow(2));
        }
    }

    #[test]
    fn display_is_uppercase_and_identity_includes_form() {
        let a = PatternInstance::new(F::NPPrepNP, ["result", "of"]);
        let b = PatternInstance::new(F::ActVPPrepNP, ["result", "of"]);
        assert_eq!(a.display(), b.display());
        assert_ne!(a, b);
        assert_eq!(a.to_string(), "NPPrepNP\tRESULT OF");
    }
}
