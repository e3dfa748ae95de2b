//! Synthetic corpora with planted class-exclusive expressions.
//!
//! Each expression is a pseudo-word adjective-noun pair dropped into a carrier
//! sentence. Per class there are three tiers of expressions:
//!
//! * `seen`: occurs in the labeled documents,
//! * `novel1`: occurs only in the pool, next to three seen expressions,
//! * `novel2`: occurs only in the pool, next to three novel1 expressions.
//!
//! A learner that starts from the labeled set can reach `novel1` after one
//! round of self-training and `novel2` after two. One expression yields
//! several distinct patterns (its Adj-Noun pair, n-grams, the verb or
//! preposition it attaches to), so no pool document mixes tiers that are
//! two rounds apart. Test documents are built per tier so recall at each
//! round is known in advance.

use std::collections::HashSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Document, Label, Split};
use crate::error::Result;

const CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aeiou";
const NOUN_ENDINGS: &[&str] = &["p", "k", "t", "x", "rn", "mp"];

const CARRIERS: &[&str] = &[
    "The {} is here.",
    "I like the {}.",
    "We talked about the {} again.",
];

const BACKGROUND: &[&str] = &[
    "People argue about this topic a lot.",
    "I read the whole thread yesterday.",
    "That point came up before.",
    "Many posters have opinions here.",
    "Someone asked the same question last week.",
    "The discussion keeps going.",
    "You replied to my post.",
    "This forum has many threads.",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expression {
    pub adjective: String,
    pub noun: String,
}

impl Expression {
    pub fn phrase(&self) -> String {
        format!("{} {}", self.adjective, self.noun)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassExpressions {
    pub seen: Vec<Expression>,
    pub novel1: Vec<Expression>,
    pub novel2: Vec<Expression>,
}

/// Sizes of each document group as `(fact, feel)` pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub expressions_per_tier: usize,
    pub labeled: (usize, usize),
    /// Pool documents with three seen and three novel1 expressions.
    pub pool_first_wave: (usize, usize),
    /// Pool documents with three novel1 and two novel2 expressions.
    pub pool_second_wave: (usize, usize),
    /// Pool documents carrying three seen expressions of each class.
    pub pool_conflicting: usize,
    /// Test documents per tier (seen, novel1, novel2).
    pub test_per_tier: (usize, usize),
    pub seed: u64,
}

impl SyntheticSpec {
    /// 400 labeled documents, a 2,000 document pool and 300 test documents.
    pub fn recovery(seed: u64) -> Self {
        SyntheticSpec {
            expressions_per_tier: 10,
            labeled: (240, 160),
            pool_first_wave: (540, 360),
            pool_second_wave: (540, 360),
            pool_conflicting: 200,
            test_per_tier: (60, 40),
            seed,
        }
    }

    /// 80 labeled and 120 unannotated documents.
    pub fn small(seed: u64) -> Self {
        SyntheticSpec {
            expressions_per_tier: 10,
            labeled: (48, 32),
            pool_first_wave: (36, 24),
            pool_second_wave: (36, 24),
            pool_conflicting: 0,
            test_per_tier: (0, 0),
            seed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticCorpus {
    pub fact: ClassExpressions,
    pub feel: ClassExpressions,
    pub labeled: Vec<Document>,
    pub pool: Vec<Document>,
    /// Test documents with the tier (0, 1 or 2) each was built from.
    pub test: Vec<(Document, usize)>,
}

impl SyntheticCorpus {
    pub fn expressions(&self, label: Label) -> &ClassExpressions {
        match label {
            Label::Fact => &self.fact,
            Label::Feel => &self.feel,
        }
    }

    /// Labeled documents in TRAIN, pool in UNANNOTATED, test in TEST.
    pub fn to_corpus(&self) -> Result<Corpus> {
        let with = |d: &Document, split| {
            let mut d = d.clone();
            d.split = Some(split);
            d
        };
        let docs = self
            .labeled
            .iter()
            .map(|d| with(d, Split::Train))
            .chain(self.pool.iter().map(|d| with(d, Split::Unannotated)))
            .chain(self.test.iter().map(|(d, _)| with(d, Split::Test)))
            .collect();
        Corpus::new(docs)
    }

    /// Every document without split assignments, for ingestion.
    pub fn unsplit(&self) -> Result<Corpus> {
        let docs = self
            .labeled
            .iter()
            .chain(&self.pool)
            .chain(self.test.iter().map(|(d, _)| d))
            .cloned()
            .collect();
        Corpus::new(docs)
    }
}

struct Words {
    rng: ChaCha8Rng,
    used: HashSet<String>,
}

impl Words {
    fn stem(&mut self) -> String {
        let mut s = String::new();
        for _ in 0..2 {
            s.push(*CONSONANTS.choose(&mut self.rng).unwrap() as char);
            s.push(*VOWELS.choose(&mut self.rng).unwrap() as char);
        }
        s
    }

    fn fresh(&mut self, make: impl Fn(&mut Self) -> String) -> String {
        loop {
            let w = make(self);
            if self.used.insert(w.clone()) {
                return w;
            }
        }
    }

    fn expression(&mut self) -> Expression {
        let adjective = self.fresh(|w| format!("{}vous", w.stem()));
        let noun = self.fresh(|w| {
            let end = *NOUN_ENDINGS.choose(&mut w.rng).unwrap();
            format!("{}{end}", w.stem())
        });
        Expression { adjective, noun }
    }

    fn tier(&mut self, n: usize) -> Vec<Expression> {
        (0..n).map(|_| self.expression()).collect()
    }
}

fn carrier(expr: &Expression, rng: &mut ChaCha8Rng) -> String {
    CARRIERS.choose(rng).unwrap().replace("{}", &expr.phrase())
}

/// Builds a document from distinct expressions of each listed tier plus one
/// background sentence chosen by `slot`, so background text is spread over
/// the classes in proportion to their sizes.
fn compose(rng: &mut ChaCha8Rng, picks: &[(&[Expression], usize)], slot: usize) -> String {
    let mut sentences: Vec<String> = Vec::new();
    for (tier, k) in picks {
        for e in tier.choose_multiple(rng, *k) {
            sentences.push(carrier(e, rng));
        }
    }
    sentences.push(BACKGROUND[slot % BACKGROUND.len()].to_string());
    sentences.shuffle(rng);
    sentences.join(" ")
}

fn score_for(label: Label, rng: &mut ChaCha8Rng) -> f64 {
    let magnitude = rng.random_range(15..=50) as f64 / 10.0;
    match label {
        Label::Fact => magnitude,
        Label::Feel => -magnitude,
    }
}

pub fn generate(spec: &SyntheticSpec) -> SyntheticCorpus {
    let mut words = Words {
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        used: HashSet::new(),
    };
    let n = spec.expressions_per_tier;
    let mut classes = [ClassExpressions::default(), ClassExpressions::default()];
    for c in &mut classes {
        c.seen = words.tier(n);
        c.novel1 = words.tier(n);
        c.novel2 = words.tier(n);
    }
    let [fact, feel] = classes;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x5eed);
    let pair = |f: usize, e: usize| [(Label::Fact, f), (Label::Feel, e)];
    let exprs = |label: Label| match label {
        Label::Fact => &fact,
        Label::Feel => &feel,
    };

    let mut labeled = Vec::new();
    for (label, count) in pair(spec.labeled.0, spec.labeled.1) {
        let c = exprs(label);
        for i in 0..count {
            let k = rng.random_range(2..=4).min(c.seen.len());
            let text = compose(&mut rng, &[(&c.seen, k)], i);
            let mut d = Document::labeled(format!("syn-l-{}-{i:04}", label.as_str().to_lowercase()), text, label);
            d.score = Some(score_for(label, &mut rng));
            labeled.push(d);
        }
    }

    let mut pool = Vec::new();
    let mut next_pool_id = 0usize;
    let mut push_pool = |pool: &mut Vec<Document>, text: String| {
        pool.push(Document::new(format!("syn-u-{next_pool_id:05}"), text));
        next_pool_id += 1;
    };
    for (label, count) in pair(spec.pool_first_wave.0, spec.pool_first_wave.1) {
        let c = exprs(label);
        for i in 0..count {
            let text = compose(&mut rng, &[(&c.seen, 3), (&c.novel1, 3)], i);
            push_pool(&mut pool, text);
        }
    }
    for (label, count) in pair(spec.pool_second_wave.0, spec.pool_second_wave.1) {
        let c = exprs(label);
        for i in 0..count {
            let text = compose(&mut rng, &[(&c.novel1, 3), (&c.novel2, 2)], i);
            push_pool(&mut pool, text);
        }
    }
    for i in 0..spec.pool_conflicting {
        let text = compose(&mut rng, &[(&fact.seen, 3), (&feel.seen, 3)], i);
        push_pool(&mut pool, text);
    }

    let mut test = Vec::new();
    for (label, count) in pair(spec.test_per_tier.0, spec.test_per_tier.1) {
        let c = exprs(label);
        let tiers: [Vec<(&[Expression], usize)>; 3] = [
            vec![(&c.seen, 3)],
            vec![(&c.novel1, 3)],
            vec![(&c.novel2, 3)],
        ];
        for (tier, picks) in tiers.iter().enumerate() {
            for i in 0..count {
                let text = compose(&mut rng, picks, i);
                let id = format!("syn-t{tier}-{}-{i:04}", label.as_str().to_lowercase());
                test.push((Document::labeled(id, text, label), tier));
            }
        }
    }

    SyntheticCorpus {
        fact,
        feel,
        labeled,
        pool,
        test,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::Parser;
    use crate::templates::{instantiate_text, TemplateForm};

    #[test]
    fn carriers_yield_the_planted_adj_noun() {
        let parser = Parser::default();
        let e = Expression {
            adjective: "bakivous".into(),
            noun: "tomep".into(),
        };
        for c in CARRIERS {
            let text = c.replace("{}", &e.phrase());
            let found = instantiate_text(&parser, &text);
            let adj_nouns: Vec<String> = found
                .iter()
                .filter(|p| p.form == TemplateForm::AdjNoun)
                .map(|p| p.display())
                .collect();
            assert_eq!(adj_nouns, ["BAKIVOUS TOMEP"], "{text}");
        }
    }

    #[test]
    fn sizes_and_determinism() {
        let spec = SyntheticSpec::recovery(5);
        let a = generate(&spec);
        assert_eq!(a.labeled.len(), 400);
        assert_eq!(a.pool.len(), 2000);
        assert_eq!(a.test.len(), 300);
        let b = generate(&spec);
        assert_eq!(a.labeled, b.labeled);
        assert_eq!(a.pool, b.pool);
        let corpus = a.to_corpus().unwrap();
        assert_eq!(corpus.class_ratio().total(), 700);
    }

    #[test]
    fn expressions_are_distinct_across_classes() {
        let s = generate(&SyntheticSpec::small(1));
        let mut words = HashSet::new();
        for c in [&s.fact, &s.feel] {
            for e in c.seen.iter().chain(&c.novel1).chain(&c.novel2) {
                assert!(words.insert(e.adjective.clone()));
                assert!(words.insert(e.noun.clone()));
            }
        }
        assert_eq!(s.unsplit().unwrap().len(), 200);
    }
}
