//! Pattern statistics over labeled text and high-precision pattern selection.

use std::collections::{HashMap, HashSet};
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, Label};
use crate::error::{Error, Result};
use crate::parser::Parser;
use crate::templates::{instantiate_document, PatternInstance, TemplateForm};

pub type PatternId = u32;

/// Interns pattern instances so documents can be held as id/count lists.
#[derive(Clone, Debug, Default)]
pub struct PatternIndex {
    patterns: Vec<PatternInstance>,
    ids: HashMap<PatternInstance, PatternId>,
}

impl PatternIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, pattern: PatternInstance) -> PatternId {
        if let Some(&id) = self.ids.get(&pattern) {
            return id;
        }
        let id = PatternId::try_from(self.patterns.len()).expect("fewer than 2^32 patterns");
        self.patterns.push(pattern.clone());
        self.ids.insert(pattern, id);
        id
    }

    pub fn id(&self, pattern: &PatternInstance) -> Option<PatternId> {
        self.ids.get(pattern).copied()
    }

    pub fn pattern(&self, id: PatternId) -> &PatternInstance {
        &self.patterns[id as usize]
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Collapses a multiset of instances into sorted `(id, multiplicity)` pairs.
    pub fn encode(&mut self, instances: Vec<PatternInstance>) -> Vec<(PatternId, u32)> {
        let mut ids: Vec<PatternId> = instances.into_iter().map(|p| self.intern(p)).collect();
        ids.sort_unstable();
        let mut out: Vec<(PatternId, u32)> = Vec::new();
        for id in ids {
            match out.last_mut() {
                Some((last, n)) if *last == id => *n += 1,
                _ => out.push((id, 1)),
            }
        }
        out
    }
}

/// A document reduced to its pattern multiset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedDocument {
    pub id: String,
    pub label: Option<Label>,
    pub patterns: Vec<(PatternId, u32)>,
}

impl EncodedDocument {
    pub fn distinct(&self) -> impl Iterator<Item = PatternId> + '_ {
        self.patterns.iter().map(|&(id, _)| id)
    }
}

/// Parses documents in parallel and interns their patterns in input order,
/// so ids do not depend on the worker count.
pub fn encode_documents<'a, I>(
    parser: &Parser<'_>,
    index: &mut PatternIndex,
    docs: I,
) -> Vec<EncodedDocument>
where
    I: IntoIterator<Item = &'a Document>,
{
    let docs: Vec<&Document> = docs.into_iter().collect();
    let mut out = Vec::with_capacity(docs.len());
    for chunk in docs.chunks(512) {
        let parsed: Vec<Vec<PatternInstance>> = chunk
            .par_iter()
            .map(|d| instantiate_document(parser, d))
            .collect();
        for (doc, instances) in chunk.iter().zip(parsed) {
            out.push(EncodedDocument {
                id: doc.id.clone(),
                label: doc.label,
                patterns: index.encode(instances),
            });
        }
    }
    out
}

/// Whether repeated occurrences in one document count more than once.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    #[default]
    Instance,
    Document,
}

/// Per-class occurrence counts keyed by pattern id. Merging is associative
/// and commutative.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CountTable {
    counts: HashMap<PatternId, [u64; 2]>,
}

impl CountTable {
    pub fn add(&mut self, doc: &[(PatternId, u32)], label: Label, mode: CountMode) {
        for &(id, n) in doc {
            let n = match mode {
                CountMode::Instance => u64::from(n),
                CountMode::Document => 1,
            };
            self.counts.entry(id).or_default()[label.index()] += n;
        }
    }

    pub fn merge(mut self, other: CountTable) -> CountTable {
        let (mut big, small) = if self.counts.len() >= other.counts.len() {
            (std::mem::take(&mut self.counts), other.counts)
        } else {
            (other.counts, std::mem::take(&mut self.counts))
        };
        for (id, [f, e]) in small {
            let slot = big.entry(id).or_default();
            slot[0] += f;
            slot[1] += e;
        }
        CountTable { counts: big }
    }

    pub fn get(&self, id: PatternId) -> [u64; 2] {
        self.counts.get(&id).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PatternId, [u64; 2])> + '_ {
        self.counts.iter().map(|(&id, &c)| (id, c))
    }
}

/// Counts patterns over `(label, document)` pairs in parallel.
pub fn count_patterns<'a>(
    docs: &[(Label, &'a EncodedDocument)],
    mode: CountMode,
) -> CountTable {
    docs.par_iter()
        .fold(CountTable::default, |mut table, (label, doc)| {
            table.add(&doc.patterns, *label, mode);
            table
        })
        .reduce(CountTable::default, CountTable::merge)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternStats {
    pub pattern: PatternInstance,
    pub freq: u64,
    pub count_fact: u64,
    pub count_feel: u64,
}

impl PatternStats {
    pub fn new(pattern: PatternInstance, count_fact: u64, count_feel: u64) -> Self {
        PatternStats {
            pattern,
            freq: count_fact + count_feel,
            count_fact,
            count_feel,
        }
    }

    pub fn count(&self, label: Label) -> u64 {
        match label {
            Label::Fact => self.count_fact,
            Label::Feel => self.count_feel,
        }
    }

    /// P(label | pattern); zero for an unseen pattern.
    pub fn p(&self, label: Label) -> f64 {
        if self.freq == 0 {
            0.0
        } else {
            self.count(label) as f64 / self.freq as f64
        }
    }

    pub fn p_fact(&self) -> f64 {
        self.p(Label::Fact)
    }

    pub fn p_feel(&self) -> f64 {
        self.p(Label::Feel)
    }
}

/// One row per distinct pattern, sorted by pattern.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StatsTable {
    rows: Vec<PatternStats>,
}

impl StatsTable {
    pub fn from_counts(counts: &CountTable, index: &PatternIndex) -> Self {
        let rows = counts
            .iter()
            .map(|(id, [f, e])| PatternStats::new(index.pattern(id).clone(), f, e))
            .collect();
        Self::from_rows(rows)
    }

    pub fn from_rows(mut rows: Vec<PatternStats>) -> Self {
        rows.sort_by(|a, b| a.pattern.cmp(&b.pattern));
        StatsTable { rows }
    }

    pub fn rows(&self) -> &[PatternStats] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, pattern: &PatternInstance) -> Option<&PatternStats> {
        self.rows
            .binary_search_by(|r| r.pattern.cmp(pattern))
            .ok()
            .map(|i| &self.rows[i])
    }

    pub fn total_instances(&self) -> u64 {
        self.rows.iter().map(|r| r.freq).sum()
    }

    /// CSV export: form, display, freq, count_fact, count_feel, p_fact, p_feel.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_stats_csv(path, self.rows.iter())
    }
}

pub(crate) fn write_stats_csv<'a>(
    path: &Path,
    rows: impl Iterator<Item = &'a PatternStats>,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["form", "display", "freq", "count_fact", "count_feel", "p_fact", "p_feel"])?;
    for r in rows {
        w.write_record([
            r.pattern.form.name().to_string(),
            r.pattern.display(),
            r.freq.to_string(),
            r.count_fact.to_string(),
            r.count_feel.to_string(),
            format!("{:.4}", r.p_fact()),
            format!("{:.4}", r.p_feel()),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Pattern statistics over the labeled documents of `corpus`; unlabeled
/// documents are ignored.
pub fn compute_stats(parser: &Parser<'_>, corpus: &Corpus, mode: CountMode) -> StatsTable {
    let mut index = PatternIndex::new();
    let labeled: Vec<&Document> = corpus.iter().filter(|d| d.label.is_some()).collect();
    let encoded = encode_documents(parser, &mut index, labeled);
    let pairs: Vec<(Label, &EncodedDocument)> =
        encoded.iter().map(|d| (d.label.unwrap(), d)).collect();
    StatsTable::from_counts(&count_patterns(&pairs, mode), &index)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Minimum pattern frequency.
    pub theta_f: u64,
    /// Minimum class-conditional probability.
    pub theta_p: f64,
    /// Distinct matched patterns needed to label a document.
    pub theta_n: usize,
}

impl Thresholds {
    pub fn new(theta_f: u64, theta_p: f64, theta_n: usize) -> Result<Self> {
        let t = Thresholds {
            theta_f,
            theta_p,
            theta_n,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta_f < 1 {
            return Err(Error::config("theta_f must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.theta_p) {
            return Err(Error::config(format!("theta_p {} outside [0, 1]", self.theta_p)));
        }
        if self.theta_n < 1 {
            return Err(Error::config("theta_n must be at least 1"));
        }
        Ok(())
    }

    pub fn admits(&self, stats: &PatternStats, label: Label) -> bool {
        stats.freq >= self.theta_f && stats.p(label) >= self.theta_p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassThresholds {
    pub fact: Thresholds,
    pub feel: Thresholds,
}

impl Default for ClassThresholds {
    fn default() -> Self {
        ClassThresholds {
            fact: Thresholds {
                theta_f: 3,
                theta_p: 0.70,
                theta_n: 3,
            },
            feel: Thresholds {
                theta_f: 3,
                theta_p: 0.55,
                theta_n: 3,
            },
        }
    }
}

impl ClassThresholds {
    pub fn get(&self, label: Label) -> &Thresholds {
        match label {
            Label::Fact => &self.fact,
            Label::Feel => &self.feel,
        }
    }

    pub fn get_mut(&mut self, label: Label) -> &mut Thresholds {
        match label {
            Label::Fact => &mut self.fact,
            Label::Feel => &mut self.feel,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.fact.validate()?;
        self.feel.validate()
    }
}

/// High-precision patterns for one class, each with the statistics it had
/// when admitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "PatternSetRepr", into = "PatternSetRepr")]
pub struct PatternSet {
    label: Label,
    entries: Vec<PatternStats>,
    members: HashSet<PatternInstance>,
}

#[derive(Serialize, Deserialize)]
struct PatternSetRepr {
    label: Label,
    patterns: Vec<PatternStats>,
}

impl From<PatternSetRepr> for PatternSet {
    fn from(r: PatternSetRepr) -> Self {
        PatternSet::from_entries(r.label, r.patterns)
    }
}

impl From<PatternSet> for PatternSetRepr {
    fn from(s: PatternSet) -> Self {
        PatternSetRepr {
            label: s.label,
            patterns: s.entries,
        }
    }
}

fn ranking(label: Label) -> impl Fn(&PatternStats, &PatternStats) -> std::cmp::Ordering {
    move |a, b| {
        b.p(label)
            .total_cmp(&a.p(label))
            .then(b.freq.cmp(&a.freq))
            .then_with(|| a.pattern.display().cmp(&b.pattern.display()))
            .then_with(|| a.pattern.cmp(&b.pattern))
    }
}

impl PatternSet {
    pub fn empty(label: Label) -> Self {
        PatternSet {
            label,
            entries: Vec::new(),
            members: HashSet::new(),
        }
    }

    /// Builds a set ranked by descending probability, descending frequency,
    /// then display. Duplicate patterns keep their first entry.
    pub fn from_entries(label: Label, entries: Vec<PatternStats>) -> Self {
        let mut set = PatternSet::empty(label);
        for e in entries {
            if set.members.insert(e.pattern.clone()) {
                set.entries.push(e);
            }
        }
        set.entries.sort_by(ranking(label));
        set
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, pattern: &PatternInstance) -> bool {
        self.members.contains(pattern)
    }

    /// Entries in ranked order.
    pub fn entries(&self) -> &[PatternStats] {
        &self.entries
    }

    pub fn patterns(&self) -> impl Iterator<Item = &PatternInstance> {
        self.entries.iter().map(|e| &e.pattern)
    }

    /// Adds the members of `other` not already present and returns how many
    /// were new. Existing members keep their original snapshot.
    pub fn union_with(&mut self, other: &PatternSet) -> usize {
        let before = self.entries.len();
        for e in &other.entries {
            if self.members.insert(e.pattern.clone()) {
                self.entries.push(e.clone());
            }
        }
        let added = self.entries.len() - before;
        if added > 0 {
            self.entries.sort_by(ranking(self.label));
        }
        added
    }

    pub fn count_by_form(&self) -> HashMap<TemplateForm, usize> {
        let mut out = HashMap::new();
        for p in self.patterns() {
            *out.entry(p.form).or_default() += 1;
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_stats_csv(path, self.entries.iter())
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, self)?;
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Exactly the rows with `freq >= theta_f` and `p(label) >= theta_p`.
pub fn select_patterns(table: &StatsTable, label: Label, t: &Thresholds) -> PatternSet {
    let rows = table
        .rows()
        .iter()
        .filter(|r| t.admits(r, label))
        .cloned()
        .collect();
    PatternSet::from_entries(label, rows)
}

/// Same selection as [`select_patterns`], read straight from a count table
/// so only admitted patterns are materialized.
pub fn select_from_counts(
    counts: &CountTable,
    index: &PatternIndex,
    label: Label,
    t: &Thresholds,
) -> PatternSet {
    let rows = counts
        .iter()
        .filter_map(|(id, [f, e])| {
            let freq = f + e;
            let hit = [f, e][label.index()];
            (freq >= t.theta_f && hit as f64 / freq as f64 >= t.theta_p)
                .then(|| PatternStats::new(index.pattern(id).clone(), f, e))
        })
        .collect();
    PatternSet::from_entries(label, rows)
}

/// Pattern ids of a set, resolved against an index. Unknown patterns can
/// never match an encoded document and are dropped.
#[derive(Clone, Debug, Default)]
pub struct IdSet(HashSet<PatternId>);

impl IdSet {
    pub fn resolve(set: &PatternSet, index: &PatternIndex) -> Self {
        IdSet(set.patterns().filter_map(|p| index.id(p)).collect())
    }

    pub fn contains(&self, id: PatternId) -> bool {
        self.0.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Distinct members of this set occurring in `doc`.
    pub fn matches(&self, doc: &EncodedDocument) -> usize {
        doc.distinct().filter(|&id| self.contains(id)).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use TemplateForm as F;

    fn pat(word: &str) -> PatternInstance {
        PatternInstance::new(F::AdjNoun, ["big", word])
    }

    fn stats(word: &str, fact: u64, feel: u64) -> PatternStats {
        PatternStats::new(pat(word), fact, feel)
    }

    #[test]
    fn probabilities() {
        let s = stats("a", 3, 1);
        assert_eq!(s.freq, 4);
        assert_eq!(s.p_fact(), 0.75);
        assert_eq!(s.p_fact() + s.p_feel(), 1.0);
        assert_eq!(stats("b", 2, 0).p_fact(), 1.0);
        assert_eq!(stats("c", 0, 0).p_fact(), 0.0);
    }

    #[test]
    fn selection_boundaries() {
        let fact = ClassThresholds::default().fact;
        let feel = ClassThresholds::default().feel;
        // 0.7 exactly: 7 of 10
        let table = StatsTable::from_rows(vec![
            stats("at", 7, 3),
            stats("rare", 2, 0),
            stats("feelish", 4, 5),
        ]);
        let set = select_patterns(&table, Label::Fact, &fact);
        assert!(set.contains(&pat("at")));
        assert!(!set.contains(&pat("rare")));
        let set = select_patterns(&table, Label::Feel, &feel);
        assert!(set.contains(&pat("feelish")));
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn ranked_by_probability_then_frequency_then_display() {
        let set = PatternSet::from_entries(
            Label::Fact,
            vec![stats("b", 3, 0), stats("a", 3, 0), stats("c", 9, 0), stats("d", 9, 1)],
        );
        let order: Vec<String> = set.patterns().map(|p| p.display()).collect();
        assert_eq!(order, ["BIG C", "BIG A", "BIG B", "BIG D"]);
    }

    #[test]
    fn union_keeps_first_snapshot() {
        let mut a = PatternSet::from_entries(Label::Fact, vec![stats("x", 3, 0)]);
        let b = PatternSet::from_entries(Label::Fact, vec![stats("x", 5, 1), stats("y", 4, 0)]);
        assert_eq!(a.union_with(&b), 1);
        assert_eq!(a.len(), 2);
        assert_eq!(a.entries().iter().find(|e| e.pattern == pat("x")).unwrap().freq, 3);
        assert_eq!(a.union_with(&b), 0);
    }

    #[test]
    fn set_round_trips_through_json() {
        let set = PatternSet::from_entries(Label::Feel, vec![stats("x", 0, 3), stats("y", 1, 4)]);
        let json = serde_json::to_string(&set).unwrap();
        let back: PatternSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, set);
        assert!(back.contains(&pat("y")));
    }

    #[test]
    fn encode_collapses_multiplicity() {
        let mut index = PatternIndex::new();
        let enc = index.encode(vec![pat("a"), pat("b"), pat("a")]);
        assert_eq!(enc, vec![(0, 2), (1, 1)]);
        assert_eq!(index.pattern(0), &pat("a"));
    }

    #[test]
    fn document_mode_counts_once() {
        let mut t = CountTable::default();
        t.add(&[(0, 3)], Label::Fact, CountMode::Document);
        t.add(&[(0, 3)], Label::Feel, CountMode::Instance);
        assert_eq!(t.get(0), [1, 3]);
    }

    #[test]
    fn compute_stats_counts_instances() {
        let docs = vec![
            Document::labeled("1", "The theory was observed. The theory was observed.", Label::Fact),
            Document::labeled("2", "The theory was observed.", Label::Fact),
            Document::labeled("3", "It was observed.", Label::Feel),
            Document::new("4", "The theory was observed."),
        ];
        let corpus = Corpus::new(docs).unwrap();
        let table = compute_stats(&Parser::default(), &corpus, CountMode::Instance);
        let row = table
            .get(&PatternInstance::new(F::SubjPassVP, ["observed"]))
            .unwrap();
        assert_eq!((row.freq, row.count_fact, row.count_feel), (4, 3, 1));
        assert_eq!(row.p_fact(), 0.75);
        let empty = compute_stats(&Parser::default(), &Corpus::new(vec![]).unwrap(), CountMode::Instance);
        assert!(empty.is_empty());
    }

    fn table_strategy() -> impl Strategy<Value = Vec<(u64, u64)>> {
        prop::collection::vec((0u64..12, 0u64..12), 0..40)
    }

    proptest! {
        #[test]
        fn merge_is_order_independent(
            docs in prop::collection::vec((prop::collection::vec((0u32..20, 1u32..4), 0..8), any::<bool>()), 0..20)
        ) {
            let mut whole = CountTable::default();
            let mut left = CountTable::default();
            let mut right = CountTable::default();
            for (i, (d, fact)) in docs.iter().enumerate() {
                let mut d = d.clone();
                d.sort_unstable();
                d.dedup_by_key(|p| p.0);
                let label = if *fact { Label::Fact } else { Label::Feel };
                whole.add(&d, label, CountMode::Instance);
                if i % 2 == 0 { left.add(&d, label, CountMode::Instance) } else { right.add(&d, label, CountMode::Instance) }
            }
            prop_assert_eq!(right.clone().merge(left.clone()), whole.clone());
            prop_assert_eq!(left.merge(right), whole);
        }

        #[test]
        fn selection_is_exact_and_monotone(
            rows in table_strategy(),
            f in 1u64..8, p in 0.0f64..=1.0, df in 0u64..4, dp in 0.0f64..0.5,
        ) {
            let table = StatsTable::from_rows(
                rows.iter().enumerate().map(|(i, &(a, b))| stats(&i.to_string(), a, b)).collect(),
            );
            let t = Thresholds { theta_f: f, theta_p: p, theta_n: 1 };
            for label in Label::ALL {
                let set = select_patterns(&table, label, &t);
                for r in table.rows() {
                    let expected = r.freq >= f && r.p(label) >= p;
                    prop_assert_eq!(set.contains(&r.pattern), expected);
                }
                let tighter = Thresholds { theta_f: f + df, theta_p: (p + dp).min(1.0), theta_n: 1 };
                let smaller = select_patterns(&table, label, &tighter);
                prop_assert!(smaller.patterns().all(|q| set.contains(q)));
            }
        }
    }
}
