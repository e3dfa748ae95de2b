//! Precision/recall of pattern-based classification and the Naive Bayes baseline.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{classify_encoded, BootstrapState};
use crate::corpus::{Document, Label};
use crate::error::{Error, Result};
use crate::parser::{tokenize, Parser};
use crate::stats::{encode_documents, ClassThresholds, IdSet, PatternIndex, PatternSet};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassScores {
    pub tp: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl ClassScores {
    /// `None` when nothing was predicted for the class.
    pub fn precision(&self) -> Option<f64> {
        (self.predicted > 0).then(|| self.tp as f64 / self.predicted as f64)
    }

    pub fn recall(&self) -> Option<f64> {
        (self.gold > 0).then(|| self.tp as f64 / self.gold as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalRow {
    pub system: String,
    pub fact: ClassScores,
    pub feel: ClassScores,
    pub correct: usize,
    pub total: usize,
}

impl EvalRow {
    /// Scores predictions against gold labels; an abstention is never correct.
    pub fn score(system: impl Into<String>, gold: &[Label], predicted: &[Option<Label>]) -> Self {
        assert_eq!(gold.len(), predicted.len());
        let mut row = EvalRow {
            system: system.into(),
            fact: ClassScores::default(),
            feel: ClassScores::default(),
            correct: 0,
            total: gold.len(),
        };
        for (&g, &p) in gold.iter().zip(predicted) {
            row.class_mut(g).gold += 1;
            if let Some(p) = p {
                row.class_mut(p).predicted += 1;
                if p == g {
                    row.class_mut(p).tp += 1;
                    row.correct += 1;
                }
            }
        }
        row
    }

    pub fn class(&self, label: Label) -> &ClassScores {
        match label {
            Label::Fact => &self.fact,
            Label::Feel => &self.feel,
        }
    }

    fn class_mut(&mut self, label: Label) -> &mut ClassScores {
        match label {
            Label::Fact => &mut self.fact,
            Label::Feel => &mut self.feel,
        }
    }

    pub fn accuracy(&self) -> Option<f64> {
        (self.total > 0).then(|| self.correct as f64 / self.total as f64)
    }
}

/// One row per bootstrap round plus baseline rows.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
}

fn pct(x: Option<f64>) -> String {
    x.map(|v| format!("{:.1}", 100.0 * v)).unwrap_or_default()
}

impl EvalReport {
    pub fn get(&self, system: &str) -> Option<&EvalRow> {
        self.rows.iter().find(|r| r.system == system)
    }

    /// Percentages with one decimal; an undefined precision is an empty cell.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "system",
            "fact_precision",
            "fact_recall",
            "feel_precision",
            "feel_recall",
            "accuracy",
            "fact_tp",
            "fact_predicted",
            "fact_gold",
            "feel_tp",
            "feel_predicted",
            "feel_gold",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.system.clone(),
                pct(r.fact.precision()),
                pct(r.fact.recall()),
                pct(r.feel.precision()),
                pct(r.feel.recall()),
                pct(r.accuracy()),
                r.fact.tp.to_string(),
                r.fact.predicted.to_string(),
                r.fact.gold.to_string(),
                r.feel.tp.to_string(),
                r.feel.predicted.to_string(),
                r.feel.gold.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn gold_labels(test: &[&Document]) -> Result<Vec<Label>> {
    if test.is_empty() {
        return Err(Error::EmptyTestSplit);
    }
    test.iter()
        .map(|d| {
            d.label
                .ok_or_else(|| Error::config(format!("test document {:?} has no label", d.id)))
        })
        .collect()
}

/// Classifies each test document with the pattern sets and scores the result.
pub fn evaluate_patterns(
    parser: &Parser<'_>,
    test: &[&Document],
    fact_set: &PatternSet,
    feel_set: &PatternSet,
    thresholds: &ClassThresholds,
) -> Result<EvalRow> {
    let gold = gold_labels(test)?;
    let mut index = PatternIndex::new();
    let encoded = encode_documents(parser, &mut index, test.iter().copied());
    let fact = IdSet::resolve(fact_set, &index);
    let feel = IdSet::resolve(feel_set, &index);
    let predicted: Vec<Option<Label>> = encoded
        .par_iter()
        .map(|d| classify_encoded(d, &fact, &feel, thresholds))
        .collect();
    Ok(EvalRow::score("patterns", &gold, &predicted))
}

/// Evaluates the pattern sets of every round of a bootstrap run.
pub fn evaluate_state(
    parser: &Parser<'_>,
    state: &BootstrapState,
    test: &[&Document],
) -> Result<EvalReport> {
    let gold = gold_labels(test)?;
    let mut index = PatternIndex::new();
    let encoded = encode_documents(parser, &mut index, test.iter().copied());
    let mut rows = Vec::with_capacity(state.history.len());
    for sets in &state.history {
        let fact = IdSet::resolve(&sets.fact, &index);
        let feel = IdSet::resolve(&sets.feel, &index);
        let predicted: Vec<Option<Label>> = encoded
            .par_iter()
            .map(|d| classify_encoded(d, &fact, &feel, &state.thresholds))
            .collect();
        rows.push(EvalRow::score(
            format!("Iter {}", sets.iteration),
            &gold,
            &predicted,
        ));
    }
    Ok(EvalReport { rows })
}

/// Binary unigram presence features of a text.
pub fn nb_features(text: &str) -> BTreeSet<String> {
    tokenize(text)
        .into_iter()
        .flatten()
        .filter(|t| t.normalized.chars().any(char::is_alphanumeric))
        .map(|t| t.normalized)
        .collect()
}

/// Multinomial Naive Bayes over binary unigram presence with add-alpha smoothing.
#[derive(Clone, Debug, PartialEq)]
pub struct NbModel {
    pub alpha: f64,
    log_prior: [f64; 2],
    log_likelihood: HashMap<String, [f64; 2]>,
    /// Label returned when both classes score equally.
    pub tie_break: Label,
}

impl NbModel {
    pub fn vocabulary_size(&self) -> usize {
        self.log_likelihood.len()
    }

    pub fn log_prior(&self, label: Label) -> f64 {
        self.log_prior[label.index()]
    }

    /// log P(term | label), `None` for out-of-vocabulary terms.
    pub fn log_likelihood(&self, term: &str, label: Label) -> Option<f64> {
        self.log_likelihood.get(term).map(|l| l[label.index()])
    }

    /// Unnormalized log scores; terms outside the vocabulary are ignored.
    pub fn log_scores(&self, text: &str) -> [f64; 2] {
        let mut scores = self.log_prior;
        for term in nb_features(text) {
            if let Some(l) = self.log_likelihood.get(&term) {
                scores[0] += l[0];
                scores[1] += l[1];
            }
        }
        scores
    }

    /// Normalized class posteriors `[P(FACT|d), P(FEEL|d)]`.
    pub fn posterior(&self, text: &str) -> [f64; 2] {
        let s = self.log_scores(text);
        let m = s[0].max(s[1]);
        let e = [(s[0] - m).exp(), (s[1] - m).exp()];
        let z = e[0] + e[1];
        [e[0] / z, e[1] / z]
    }

    pub fn predict(&self, text: &str) -> Label {
        let s = self.log_scores(text);
        if s[0] > s[1] {
            Label::Fact
        } else if s[1] > s[0] {
            Label::Feel
        } else {
            self.tie_break
        }
    }
}

pub fn nb_train(train: &[&Document], alpha: f64) -> Result<NbModel> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::config(format!("smoothing alpha must be positive, got {alpha}")));
    }
    let mut doc_counts = [0usize; 2];
    let mut df: HashMap<String, [u64; 2]> = HashMap::new();
    for d in train {
        let label = d
            .label
            .ok_or_else(|| Error::config(format!("training document {:?} has no label", d.id)))?;
        doc_counts[label.index()] += 1;
        for term in nb_features(&d.text) {
            df.entry(term).or_default()[label.index()] += 1;
        }
    }
    let n = (doc_counts[0] + doc_counts[1]) as f64;
    let log_prior = if n == 0.0 {
        [0.5f64.ln(); 2]
    } else {
        [
            (doc_counts[0] as f64 / n).ln(),
            (doc_counts[1] as f64 / n).ln(),
        ]
    };
    let v = df.len() as f64;
    let mut totals = [0u64; 2];
    for c in df.values() {
        totals[0] += c[0];
        totals[1] += c[1];
    }
    let denom = [
        totals[0] as f64 + alpha * v,
        totals[1] as f64 + alpha * v,
    ];
    let log_likelihood = df
        .into_iter()
        .map(|(t, c)| {
            let l = [
                ((c[0] as f64 + alpha) / denom[0]).ln(),
                ((c[1] as f64 + alpha) / denom[1]).ln(),
            ];
            (t, l)
        })
        .collect();
    Ok(NbModel {
        alpha,
        log_prior,
        log_likelihood,
        tie_break: Label::Fact,
    })
}

pub fn nb_accuracy(model: &NbModel, docs: &[&Document]) -> Option<f64> {
    let scored: Vec<bool> = docs
        .par_iter()
        .filter_map(|d| d.label.map(|g| model.predict(&d.text) == g))
        .collect();
    (!scored.is_empty()).then(|| scored.iter().filter(|&&ok| ok).count() as f64 / scored.len() as f64)
}

/// Alpha with the best dev accuracy; ties go to the smaller alpha.
pub fn nb_tune(train: &[&Document], dev: &[&Document], grid: &[f64]) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(Error::config("NB alpha grid is empty"));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best: Option<(f64, f64)> = None;
    for alpha in sorted {
        let model = nb_train(train, alpha)?;
        let acc = nb_accuracy(&model, dev)
            .ok_or_else(|| Error::config("development split has no labeled documents"))?;
        if best.is_none_or(|(_, b)| acc > b) {
            best = Some((alpha, acc));
        }
    }
    Ok(best.unwrap())
}

pub fn nb_predict_row(model: &NbModel, test: &[&Document]) -> Result<EvalRow> {
    let gold = gold_labels(test)?;
    let predicted: Vec<Option<Label>> = test.par_iter().map(|d| Some(model.predict(&d.text))).collect();
    Ok(EvalRow::score("NB", &gold, &predicted))
}
