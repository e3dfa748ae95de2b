//! Document ingestion, score binarization and stratified splitting.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Argument style of a post.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Label {
    Fact,
    Feel,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Fact, Label::Feel];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Fact => "FACT",
            Label::Feel => "FEEL",
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::Fact => Label::Feel,
            Label::Feel => Label::Fact,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Label::Fact => 0,
            Label::Feel => 1,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "FACT" | "FACTUAL" => Ok(Label::Fact),
            "FEEL" | "FEELING" => Ok(Label::Feel),
            other => Err(format!("unknown label {other:?}")),
        }
    }
}

impl TryFrom<String> for Label {
    type Error = String;

    fn try_from(value: String) -> std::result::Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<Label> for String {
    fn from(label: Label) -> String {
        label.as_str().to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Split {
    Train,
    Dev,
    Test,
    Unannotated,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "TRAIN",
            Split::Dev => "DEV",
            Split::Test => "TEST",
            Split::Unannotated => "UNANNOTATED",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "TRAIN" => Ok(Split::Train),
            "DEV" => Ok(Split::Dev),
            "TEST" => Ok(Split::Test),
            "UNANNOTATED" => Ok(Split::Unannotated),
            other => Err(format!("unknown split {other:?}")),
        }
    }
}

impl TryFrom<String> for Split {
    type Error = String;

    fn try_from(value: String) -> std::result::Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<Split> for String {
    fn from(split: Split) -> String {
        split.as_str().to_string()
    }
}

/// One forum response.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            score: None,
            label: None,
            split: None,
        }
    }

    pub fn labeled(id: impl Into<String>, text: impl Into<String>, label: Label) -> Self {
        Document {
            label: Some(label),
            ..Document::new(id, text)
        }
    }

    /// Unannotated pool candidate: neither a score nor a label.
    pub fn is_unannotated(&self) -> bool {
        self.score.is_none() && self.label.is_none()
    }
}

/// Maps a scalar fact/feel score to a label using strict thresholds at +1 and -1.
pub fn binarize_score(score: f64) -> Result<Option<Label>> {
    if !(-5.0..=5.0).contains(&score) {
        return Err(Error::ScoreOutOfRange(score));
    }
    Ok(if score > 1.0 {
        Some(Label::Fact)
    } else if score < -1.0 {
        Some(Label::Feel)
    } else {
        None
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub fact: usize,
    pub feel: usize,
}

impl ClassCounts {
    pub fn get(&self, label: Label) -> usize {
        match label {
            Label::Fact => self.fact,
            Label::Feel => self.feel,
        }
    }

    pub fn add(&mut self, label: Label, n: usize) {
        match label {
            Label::Fact => self.fact += n,
            Label::Feel => self.feel += n,
        }
    }

    pub fn total(&self) -> usize {
        self.fact + self.feel
    }

    /// FACT per FEEL document, `None` when there are no FEEL documents.
    pub fn ratio(&self) -> Option<f64> {
        (self.feel > 0).then(|| self.fact as f64 / self.feel as f64)
    }
}

/// An ordered, id-unique collection of documents.
#[derive(Clone, Debug, Default)]
pub struct Corpus {
    documents: Vec<Document>,
    index: HashMap<String, usize>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        let mut index = HashMap::with_capacity(documents.len());
        for (i, doc) in documents.iter().enumerate() {
            check_consistency(doc)?;
            if index.insert(doc.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(doc.id.clone()));
            }
        }
        Ok(Corpus { documents, index })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.index.get(id).map(|&i| &self.documents[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = &Document> {
        self.documents.iter()
    }

    pub fn in_split(&self, split: Split) -> impl Iterator<Item = &Document> {
        self.documents
            .iter()
            .filter(move |d| d.split == Some(split))
    }

    /// Documents of the given split, cloned into a new corpus.
    pub fn subset(&self, split: Split) -> Corpus {
        let docs = self.in_split(split).cloned().collect();
        Corpus::new(docs).expect("subset of a valid corpus is valid")
    }

    /// FACT:FEEL counts over labeled documents.
    pub fn class_ratio(&self) -> ClassCounts {
        let mut counts = ClassCounts::default();
        for label in self.documents.iter().filter_map(|d| d.label) {
            counts.add(label, 1);
        }
        counts
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        for doc in &self.documents {
            serde_json::to_writer(&mut out, doc)?;
            out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }
}

fn check_consistency(doc: &Document) -> Result<()> {
    if let Some(score) = doc.score {
        let derived = binarize_score(score)?;
        if let Some(label) = doc.label {
            if derived != Some(label) {
                return Err(Error::config(format!(
                    "document {:?}: label {label} inconsistent with score {score}",
                    doc.id
                )));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(Format::Jsonl),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown corpus format {other:?}")),
        }
    }
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    id: Option<String>,
    text: Option<String>,
    #[serde(default)]
    score: Option<f64>,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    split: Option<String>,
}

impl RawRecord {
    fn into_document(self, line: usize) -> Result<Document> {
        let bad = |message: String| Error::MalformedRecord { line, message };
        let id = self.id.ok_or_else(|| bad("missing field `id`".into()))?;
        let text = self.text.ok_or_else(|| bad("missing field `text`".into()))?;
        let label = match self.label.as_deref().map(str::trim) {
            None | Some("") => None,
            Some(s) => Some(s.parse::<Label>().map_err(bad)?),
        };
        let split = match self.split.as_deref().map(str::trim) {
            None | Some("") => None,
            Some(s) => Some(s.parse::<Split>().map_err(bad)?),
        };
        let label = match self.score {
            Some(score) => {
                let derived = binarize_score(score).map_err(|e| bad(e.to_string()))?;
                match (label, derived) {
                    (Some(given), Some(derived)) if given != derived => {
                        return Err(bad(format!(
                            "label {given} inconsistent with score {score}"
                        )))
                    }
                    (Some(given), None) => {
                        return Err(bad(format!(
                            "label {given} given for weak score {score}"
                        )))
                    }
                    (_, derived) => derived,
                }
            }
            None => label,
        };
        Ok(Document {
            id,
            text,
            score: self.score,
            label,
            split,
        })
    }
}

/// Reads a corpus file. Missing `label`s are derived from `score` by [`binarize_score`].
pub fn load_corpus(path: &Path, format: Format) -> Result<Corpus> {
    let docs = match format {
        Format::Jsonl => read_jsonl(path)?,
        Format::Csv => read_csv(path)?,
    };
    let mut seen = HashMap::with_capacity(docs.len());
    for (line, doc) in &docs {
        if seen.insert(doc.id.as_str(), *line).is_some() {
            return Err(Error::DuplicateId(doc.id.clone()));
        }
    }
    Corpus::new(docs.into_iter().map(|(_, d)| d).collect())
}

fn read_jsonl(path: &Path) -> Result<Vec<(usize, Document)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord =
            serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
                line: line_no,
                message: e.to_string(),
            })?;
        docs.push((line_no, raw.into_document(line_no)?));
    }
    Ok(docs)
}

fn read_csv(path: &Path) -> Result<Vec<(usize, Document)>> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::io(
                path,
                std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string()),
            ),
            _ => Error::Csv(e),
        })?;
    let headers = reader.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (id_col, text_col) = (column("id"), column("text"));
    let (score_col, label_col, split_col) = (column("score"), column("label"), column("split"));
    let mut docs = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |col: Option<usize>| {
            col.and_then(|c| record.get(c))
                .map(str::to_string)
        };
        let score = match field(score_col).as_deref().map(str::trim) {
            None | Some("") => None,
            Some(s) => Some(s.parse::<f64>().map_err(|e| Error::MalformedRecord {
                line,
                message: format!("score {s:?}: {e}"),
            })?),
        };
        let raw = RawRecord {
            id: field(id_col).filter(|s| !s.is_empty()),
            text: field(text_col),
            score,
            label: field(label_col),
            split: field(split_col),
        };
        docs.push((line, raw.into_document(line)?));
    }
    Ok(docs)
}

/// Train/dev/test proportions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub dev: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.70,
            dev: 0.20,
            test: 0.10,
        }
    }
}

impl SplitRatios {
    pub fn new(train: f64, dev: f64, test: f64) -> Result<Self> {
        let ratios = SplitRatios { train, dev, test };
        ratios.validate()?;
        Ok(ratios)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.dev, self.test];
        if parts.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::config(format!("split ratios {parts:?} must be non-negative")));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!("split ratios sum to {sum}, expected 1")));
        }
        Ok(())
    }
}

impl FromStr for SplitRatios {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::config(format!("ratio {p:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        match parts[..] {
            [train, dev, test] => SplitRatios::new(train, dev, test),
            _ => Err(Error::config(format!("expected three ratios, got {s:?}"))),
        }
    }
}

pub(crate) fn mix_seed(seed: u64, salt: &[u64]) -> u64 {
    // splitmix64 over the salt sequence
    let mut state = seed;
    for &s in salt {
        state = state.wrapping_add(s.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        state = z ^ (z >> 31);
    }
    state
}

/// Shuffles ids deterministically: the result depends only on the id set and the seed.
pub(crate) fn seeded_order<'a>(ids: &[&'a str], seed: u64) -> Vec<&'a str> {
    let mut sorted = ids.to_vec();
    sorted.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sorted.shuffle(&mut rng);
    sorted
}

/// Assigns TRAIN/DEV/TEST per class at `ratios`.
///
/// Documents with neither score nor label go to UNANNOTATED. Documents whose
/// score falls in the weak band [-1, 1] keep no split and are excluded downstream.
pub fn split_corpus(corpus: &Corpus, ratios: SplitRatios, seed: u64) -> Result<Corpus> {
    ratios.validate()?;
    let mut assignment: HashMap<&str, Split> = HashMap::with_capacity(corpus.len());
    for label in Label::ALL {
        let ids: Vec<&str> = corpus
            .iter()
            .filter(|d| d.label == Some(label))
            .map(|d| d.id.as_str())
            .collect();
        let n = ids.len();
        let n_train = ((n as f64 * ratios.train).round() as usize).min(n);
        let n_dev = ((n as f64 * ratios.dev).round() as usize).min(n - n_train);
        let order = seeded_order(&ids, mix_seed(seed, &[label.index() as u64 + 1]));
        for (rank, id) in order.into_iter().enumerate() {
            let split = if rank < n_train {
                Split::Train
            } else if rank < n_train + n_dev {
                Split::Dev
            } else {
                Split::Test
            };
            assignment.insert(id, split);
        }
    }
    let docs = corpus
        .iter()
        .map(|d| {
            let mut doc = d.clone();
            doc.split = if doc.is_unannotated() {
                Some(Split::Unannotated)
            } else {
                assignment.get(d.id.as_str()).copied()
            };
            doc
        })
        .collect();
    Corpus::new(docs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(contents: &str, suffix: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn binarize_boundaries() {
        assert_eq!(binarize_score(2.4).unwrap(), Some(Label::Fact));
        assert_eq!(binarize_score(1.0).unwrap(), None);
        assert_eq!(binarize_score(-1.0).unwrap(), None);
        assert_eq!(binarize_score(-1.2).unwrap(), Some(Label::Feel));
        assert!(matches!(binarize_score(5.5), Err(Error::ScoreOutOfRange(_))));
        assert!(binarize_score(f64::NAN).is_err());
    }

    #[test]
    fn loads_three_records() {
        let f = write_tmp(
            concat!(
                r#"{"id": "a", "text": "Read the verse.", "score": 2.4}"#, "\n",
                r#"{"id": "b", "text": "How typical.", "label": "FEEL"}"#, "\n",
                "\n",
                r#"{"id": "c", "text": "  spaced  "}"#, "\n",
            ),
            ".jsonl",
        );
        let corpus = load_corpus(f.path(), Format::Jsonl).unwrap();
        assert_eq!(corpus.len(), 3);
        assert_eq!(corpus.get("a").unwrap().label, Some(Label::Fact));
        assert_eq!(corpus.get("b").unwrap().label, Some(Label::Feel));
        assert_eq!(corpus.get("c").unwrap().text, "  spaced  ");
    }

    #[test]
    fn missing_text_names_line() {
        let f = write_tmp(
            "{\"id\": \"a\", \"text\": \"x\"}\n{\"id\": \"b\"}\n",
            ".jsonl",
        );
        match load_corpus(f.path(), Format::Jsonl) {
            Err(Error::MalformedRecord { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_id_is_rejected() {
        let f = write_tmp(
            "{\"id\": \"r17\", \"text\": \"x\"}\n{\"id\": \"r17\", \"text\": \"y\"}\n",
            ".jsonl",
        );
        match load_corpus(f.path(), Format::Jsonl) {
            Err(Error::DuplicateId(id)) => assert_eq!(id, "r17"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inconsistent_label_is_rejected() {
        let f = write_tmp("{\"id\": \"a\", \"text\": \"x\", \"score\": -3, \"label\": \"FACT\"}\n", ".jsonl");
        assert!(matches!(
            load_corpus(f.path(), Format::Jsonl),
            Err(Error::MalformedRecord { line: 1, .. })
        ));
    }

    #[test]
    fn loads_csv() {
        let f = write_tmp(
            "id,text,score,label\nx1,\"Hello, world.\",3.0,\nx2,Plain,,FEEL\nx3,Pool,,\n",
            ".csv",
        );
        let corpus = load_corpus(f.path(), Format::Csv).unwrap();
        assert_eq!(corpus.len(), 3);
        assert_eq!(corpus.get("x1").unwrap().text, "Hello, world.");
        assert_eq!(corpus.get("x1").unwrap().label, Some(Label::Fact));
        assert_eq!(corpus.get("x2").unwrap().label, Some(Label::Feel));
        assert!(corpus.get("x3").unwrap().is_unannotated());
    }

    #[test]
    fn csv_bad_score_names_line() {
        let f = write_tmp("id,text,score\na,x,1.5\nb,y,abc\n", ".csv");
        match load_corpus(f.path(), Format::Csv) {
            Err(Error::MalformedRecord { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    fn class_corpus(n_fact: usize, n_feel: usize, n_pool: usize) -> Corpus {
        let mut docs = Vec::new();
        for i in 0..n_fact {
            docs.push(Document::labeled(format!("f{i}"), "", Label::Fact));
        }
        for i in 0..n_feel {
            docs.push(Document::labeled(format!("e{i}"), "", Label::Feel));
        }
        for i in 0..n_pool {
            docs.push(Document::new(format!("u{i}"), ""));
        }
        Corpus::new(docs).unwrap()
    }

    fn split_counts(corpus: &Corpus, label: Label) -> [usize; 3] {
        let count = |s| corpus.in_split(s).filter(|d| d.label == Some(label)).count();
        [count(Split::Train), count(Split::Dev), count(Split::Test)]
    }

    #[test]
    fn split_matches_reported_sizes() {
        let corpus = class_corpus(3466, 2382, 10);
        let split = split_corpus(&corpus, SplitRatios::default(), 7).unwrap();
        let close = |got: [usize; 3], want: [usize; 3]| {
            got.iter().zip(want).all(|(g, w)| g.abs_diff(w) <= 1)
        };
        assert!(close(split_counts(&split, Label::Fact), [2426, 693, 347]));
        assert!(close(split_counts(&split, Label::Feel), [1667, 476, 239]));
        assert_eq!(split.in_split(Split::Unannotated).count(), 10);
    }

    #[test]
    fn degenerate_split_puts_everything_in_train() {
        let corpus = class_corpus(13, 7, 0);
        let split = split_corpus(&corpus, SplitRatios::new(1.0, 0.0, 0.0).unwrap(), 1).unwrap();
        assert_eq!(split.in_split(Split::Train).count(), 20);
    }

    #[test]
    fn split_is_deterministic_and_seed_sensitive() {
        let corpus = class_corpus(50, 30, 5);
        let a = split_corpus(&corpus, SplitRatios::default(), 11).unwrap();
        let b = split_corpus(&corpus, SplitRatios::default(), 11).unwrap();
        let c = split_corpus(&corpus, SplitRatios::default(), 12).unwrap();
        assert_eq!(a.documents(), b.documents());
        assert_ne!(a.documents(), c.documents());
    }

    #[test]
    fn bad_ratios_are_rejected() {
        assert!(SplitRatios::new(0.7, 0.2, 0.2).is_err());
        assert!("0.7,0.2".parse::<SplitRatios>().is_err());
        assert_eq!(
            "0.7,0.2,0.1".parse::<SplitRatios>().unwrap(),
            SplitRatios::default()
        );
    }

    #[test]
    fn weak_scores_get_no_split() {
        let mut doc = Document::new("w", "meh");
        doc.score = Some(0.5);
        let corpus = Corpus::new(vec![doc]).unwrap();
        let split = split_corpus(&corpus, SplitRatios::default(), 0).unwrap();
        assert_eq!(split.get("w").unwrap().split, None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn binarize_is_monotone(a in -5.0f64..=5.0, b in -5.0f64..=5.0) {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let rank = |l: Option<Label>| match l {
                    Some(Label::Feel) => 0,
                    None => 1,
                    Some(Label::Fact) => 2,
                };
                prop_assert!(rank(binarize_score(lo).unwrap()) <= rank(binarize_score(hi).unwrap()));
            }

            #[test]
            fn splits_partition_labeled_docs(n_fact in 0usize..60, n_feel in 0usize..60, seed in any::<u64>()) {
                let corpus = class_corpus(n_fact, n_feel, 3);
                let split = split_corpus(&corpus, SplitRatios::default(), seed).unwrap();
                let labeled: usize = split.iter().filter(|d| d.label.is_some()).count();
                let assigned = [Split::Train, Split::Dev, Split::Test]
                    .iter()
                    .map(|&s| split.in_split(s).count())
                    .sum::<usize>();
                prop_assert_eq!(labeled, assigned);
                for label in Label::ALL {
                    let n = corpus.class_ratio().get(label) as f64;
                    let got = split_counts(&split, label);
                    let want = [n * 0.7, n * 0.2, n * 0.1];
                    for (g, w) in got.iter().zip(want) {
                        prop_assert!((*g as f64 - w).abs() <= 1.0);
                    }
                }
            }
        }
    }
}
