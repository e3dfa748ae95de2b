//! Self-training over the unannotated pool: label with high-precision
//! patterns, balance, absorb, relearn.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{mix_seed, seeded_order, ClassCounts, Corpus, Label, Split};
use crate::error::{Error, Result};
use crate::parser::Parser;
use crate::stats::{
    count_patterns, encode_documents, select_from_counts, ClassThresholds, CountMode, CountTable,
    EncodedDocument, IdSet, PatternIndex, PatternSet, PatternStats,
};
use crate::templates::{instantiate_document, PatternInstance};

/// Label from distinct-match counts: a class wins only if it alone reaches its `theta_n`.
pub fn decide(fact_matches: usize, feel_matches: usize, t: &ClassThresholds) -> Option<Label> {
    let fact = fact_matches >= t.fact.theta_n;
    let feel = feel_matches >= t.feel.theta_n;
    match (fact, feel) {
        (true, false) => Some(Label::Fact),
        (false, true) => Some(Label::Feel),
        _ => None,
    }
}

/// Classifies a pattern multiset by the distinct members of each set it contains.
pub fn classify_by_patterns(
    instances: &[PatternInstance],
    fact_set: &PatternSet,
    feel_set: &PatternSet,
    t: &ClassThresholds,
) -> Option<Label> {
    let distinct: HashSet<&PatternInstance> = instances.iter().collect();
    let fact = distinct.iter().filter(|p| fact_set.contains(p)).count();
    let feel = distinct.iter().filter(|p| feel_set.contains(p)).count();
    decide(fact, feel, t)
}

pub fn classify_document(
    parser: &Parser<'_>,
    doc: &crate::corpus::Document,
    fact_set: &PatternSet,
    feel_set: &PatternSet,
    t: &ClassThresholds,
) -> Option<Label> {
    classify_by_patterns(&instantiate_document(parser, doc), fact_set, feel_set, t)
}

pub(crate) fn classify_encoded(
    doc: &EncodedDocument,
    fact: &IdSet,
    feel: &IdSet,
    t: &ClassThresholds,
) -> Option<Label> {
    decide(fact.matches(doc), feel.matches(doc), t)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalanceConfig {
    /// FACT documents per FEEL document.
    pub target_ratio: f64,
    pub seed: u64,
}

impl BalanceConfig {
    pub fn new(target_ratio: f64, seed: u64) -> Result<Self> {
        if !(target_ratio.is_finite() && target_ratio > 0.0) {
            return Err(Error::config(format!(
                "balance target ratio must be positive, got {target_ratio}"
            )));
        }
        Ok(BalanceConfig { target_ratio, seed })
    }

    /// Kept counts for `fact` and `feel` newly labeled documents.
    ///
    /// The scarcer side (relative to the target) is kept whole and the other
    /// is trimmed to the floor of its target. A side that would end up empty
    /// empties both.
    pub fn kept_counts(&self, fact: usize, feel: usize) -> (usize, usize) {
        let r = self.target_ratio;
        let fact_for_feel = (feel as f64 * r + 1e-9).floor() as usize;
        let (kf, ke) = if fact >= fact_for_feel {
            (fact_for_feel, feel)
        } else {
            (fact, ((fact as f64 / r) + 1e-9).floor() as usize)
        };
        if kf == 0 || ke == 0 {
            (0, 0)
        } else {
            (kf, ke.min(feel))
        }
    }
}

/// Splits newly labeled ids into kept and returned-to-pool, per class.
///
/// Which documents are kept depends only on the seed, the iteration and the ids.
pub fn balance(
    new_fact: &[&str],
    new_feel: &[&str],
    cfg: &BalanceConfig,
    iteration: usize,
) -> Balanced {
    let (kf, ke) = cfg.kept_counts(new_fact.len(), new_feel.len());
    let pick = |ids: &[&str], keep: usize, label: Label| {
        let order = seeded_order(
            ids,
            mix_seed(cfg.seed, &[iteration as u64, label.index() as u64 + 1]),
        );
        let (kept, rest) = order.split_at(keep);
        let mut kept: Vec<String> = kept.iter().map(|s| s.to_string()).collect();
        let mut rest: Vec<String> = rest.iter().map(|s| s.to_string()).collect();
        kept.sort();
        rest.sort();
        (kept, rest)
    };
    let (kept_fact, rest_fact) = pick(new_fact, kf, Label::Fact);
    let (kept_feel, rest_feel) = pick(new_feel, ke, Label::Feel);
    let mut returned = rest_fact;
    returned.extend(rest_feel);
    returned.sort();
    Balanced {
        kept_fact,
        kept_feel,
        returned,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Balanced {
    pub kept_fact: Vec<String>,
    pub kept_feel: Vec<String>,
    pub returned: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub iterations: usize,
    pub count_mode: CountMode,
    /// Re-select from current statistics each round instead of accumulating.
    pub strict_refilter: bool,
    /// FACT:FEEL ratio to keep; `None` uses the training-set ratio.
    pub target_ratio: Option<f64>,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            iterations: 4,
            count_mode: CountMode::Instance,
            strict_refilter: false,
            target_ratio: None,
            seed: 17,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRow {
    pub iteration: usize,
    pub new_fact_patterns: usize,
    pub new_feel_patterns: usize,
    pub total_patterns: usize,
    pub docs_labeled_fact: usize,
    pub docs_labeled_feel: usize,
    pub docs_absorbed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledRef {
    pub id: String,
    pub label: Label,
    /// Round that absorbed the document; 0 for the training split.
    pub iteration: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationSets {
    pub iteration: usize,
    pub fact: PatternSet,
    pub feel: PatternSet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapState {
    pub thresholds: ClassThresholds,
    pub config: BootstrapConfig,
    pub balance: BalanceConfig,
    pub iteration: usize,
    pub labeled: Vec<LabeledRef>,
    pub pool: Vec<String>,
    pub fact_set: PatternSet,
    pub feel_set: PatternSet,
    /// Pattern sets in force after each round, starting with round 0.
    pub history: Vec<IterationSets>,
    pub log: Vec<LogRow>,
    /// Statistics of every final set member over the final labeled set.
    pub final_stats: Vec<PatternStats>,
}

impl BootstrapState {
    pub fn set(&self, label: Label) -> &PatternSet {
        match label {
            Label::Fact => &self.fact_set,
            Label::Feel => &self.feel_set,
        }
    }

    pub fn total_patterns(&self) -> usize {
        self.fact_set.len() + self.feel_set.len()
    }

    pub fn absorbed(&self) -> usize {
        self.labeled.iter().filter(|l| l.iteration > 0).count()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        serde_json::to_writer(&mut w, self)?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
    }

    pub fn write_log_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for row in &self.log {
            w.serialize(row)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Holds the encoded training and pool documents for a bootstrap run.
pub struct Bootstrapper {
    index: PatternIndex,
    train: Vec<EncodedDocument>,
    pool: Vec<EncodedDocument>,
}

impl Bootstrapper {
    /// Encodes the TRAIN split and the UNANNOTATED pool of `corpus`.
    pub fn new(parser: &Parser<'_>, corpus: &Corpus) -> Result<Self> {
        let mut index = PatternIndex::new();
        let train = encode_documents(parser, &mut index, corpus.in_split(Split::Train));
        if let Some(d) = train.iter().find(|d| d.label.is_none()) {
            return Err(Error::config(format!("training document {:?} has no label", d.id)));
        }
        let pool = encode_documents(parser, &mut index, corpus.in_split(Split::Unannotated));
        Ok(Bootstrapper { index, train, pool })
    }

    pub fn index(&self) -> &PatternIndex {
        &self.index
    }

    pub fn train_ratio(&self) -> ClassCounts {
        let mut c = ClassCounts::default();
        for d in &self.train {
            c.add(d.label.unwrap(), 1);
        }
        c
    }

    pub fn run(&self, thresholds: ClassThresholds, cfg: BootstrapConfig) -> Result<BootstrapState> {
        thresholds.validate()?;
        let target = match cfg.target_ratio {
            Some(r) => r,
            None => self.train_ratio().ratio().ok_or_else(|| {
                Error::config("training split needs both classes to derive a balance ratio")
            })?,
        };
        let balance_cfg = BalanceConfig::new(target, cfg.seed)?;

        let train_pairs: Vec<(Label, &EncodedDocument)> =
            self.train.iter().map(|d| (d.label.unwrap(), d)).collect();
        let mut counts = count_patterns(&train_pairs, cfg.count_mode);
        let mut fact_set = select_from_counts(&counts, &self.index, Label::Fact, &thresholds.fact);
        let mut feel_set = select_from_counts(&counts, &self.index, Label::Feel, &thresholds.feel);

        let mut log = vec![LogRow {
            iteration: 0,
            new_fact_patterns: fact_set.len(),
            new_feel_patterns: feel_set.len(),
            total_patterns: fact_set.len() + feel_set.len(),
            docs_labeled_fact: 0,
            docs_labeled_feel: 0,
            docs_absorbed: 0,
        }];
        let mut history = vec![IterationSets {
            iteration: 0,
            fact: fact_set.clone(),
            feel: feel_set.clone(),
        }];
        let mut labeled: Vec<LabeledRef> = self
            .train
            .iter()
            .map(|d| LabeledRef {
                id: d.id.clone(),
                label: d.label.unwrap(),
                iteration: 0,
            })
            .collect();
        let mut pool: Vec<&EncodedDocument> = self.pool.iter().collect();
        let mut iteration = 0;

        for k in 1..=cfg.iterations {
            if pool.is_empty() {
                log::info!("unannotated pool exhausted before round {k}; stopping");
                break;
            }
            iteration = k;
            let fact_ids = IdSet::resolve(&fact_set, &self.index);
            let feel_ids = IdSet::resolve(&feel_set, &self.index);
            let predictions: Vec<Option<Label>> = pool
                .par_iter()
                .map(|d| classify_encoded(d, &fact_ids, &feel_ids, &thresholds))
                .collect();
            let mut new_fact = Vec::new();
            let mut new_feel = Vec::new();
            for (d, p) in pool.iter().zip(&predictions) {
                match p {
                    Some(Label::Fact) => new_fact.push(d.id.as_str()),
                    Some(Label::Feel) => new_feel.push(d.id.as_str()),
                    None => {}
                }
            }
            let balanced = balance(&new_fact, &new_feel, &balance_cfg, k);
            let absorbed = balanced.kept_fact.len() + balanced.kept_feel.len();
            log::debug!(
                "round {k}: labeled {} FACT / {} FEEL, kept {} / {}",
                new_fact.len(),
                new_feel.len(),
                balanced.kept_fact.len(),
                balanced.kept_feel.len()
            );

            let kept: std::collections::HashMap<&str, Label> = balanced
                .kept_fact
                .iter()
                .map(|id| (id.as_str(), Label::Fact))
                .chain(balanced.kept_feel.iter().map(|id| (id.as_str(), Label::Feel)))
                .collect();
            let mut remaining = Vec::with_capacity(pool.len() - absorbed);
            for d in pool {
                match kept.get(d.id.as_str()) {
                    Some(&label) => {
                        counts.add(&d.patterns, label, cfg.count_mode);
                        labeled.push(LabeledRef {
                            id: d.id.clone(),
                            label,
                            iteration: k,
                        });
                    }
                    None => remaining.push(d),
                }
            }
            pool = remaining;

            let learned_fact =
                select_from_counts(&counts, &self.index, Label::Fact, &thresholds.fact);
            let learned_feel =
                select_from_counts(&counts, &self.index, Label::Feel, &thresholds.feel);
            let (new_fact_patterns, new_feel_patterns) = if cfg.strict_refilter {
                let fresh = |old: &PatternSet, new: &PatternSet| {
                    new.patterns().filter(|p| !old.contains(p)).count()
                };
                let added = (fresh(&fact_set, &learned_fact), fresh(&feel_set, &learned_feel));
                fact_set = learned_fact;
                feel_set = learned_feel;
                added
            } else {
                (
                    fact_set.union_with(&learned_fact),
                    feel_set.union_with(&learned_feel),
                )
            };
            log.push(LogRow {
                iteration: k,
                new_fact_patterns,
                new_feel_patterns,
                total_patterns: fact_set.len() + feel_set.len(),
                docs_labeled_fact: new_fact.len(),
                docs_labeled_feel: new_feel.len(),
                docs_absorbed: absorbed,
            });
            history.push(IterationSets {
                iteration: k,
                fact: fact_set.clone(),
                feel: feel_set.clone(),
            });
        }

        let final_stats = final_member_stats(&counts, &self.index, &fact_set, &feel_set);
        Ok(BootstrapState {
            thresholds,
            config: cfg,
            balance: balance_cfg,
            iteration,
            labeled,
            pool: pool.iter().map(|d| d.id.clone()).collect(),
            fact_set,
            feel_set,
            history,
            log,
            final_stats,
        })
    }
}

fn final_member_stats(
    counts: &CountTable,
    index: &PatternIndex,
    fact: &PatternSet,
    feel: &PatternSet,
) -> Vec<PatternStats> {
    let mut seen = HashSet::new();
    let mut out: Vec<PatternStats> = fact
        .patterns()
        .chain(feel.patterns())
        .filter(|p| seen.insert(*p))
        .map(|p| {
            let [f, e] = index.id(p).map(|id| counts.get(id)).unwrap_or_default();
            PatternStats::new(p.clone(), f, e)
        })
        .collect();
    out.sort_by(|a, b| a.pattern.cmp(&b.pattern));
    out
}

/// Learns from TRAIN, then runs `cfg.iterations` rounds over the pool.
pub fn run_bootstrap(
    parser: &Parser<'_>,
    corpus: &Corpus,
    thresholds: ClassThresholds,
    cfg: BootstrapConfig,
) -> Result<BootstrapState> {
    Bootstrapper::new(parser, corpus)?.run(thresholds, cfg)
}
