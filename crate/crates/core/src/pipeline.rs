//! End-to-end run: ingest, learn, bootstrap, evaluate, analyze.
//!
//! Every stage reads and writes plain files under one output directory:
//!
//! ```text
//! out/
//!   corpus/     documents.jsonl, split_summary.csv
//!   learn/      pattern_stats.csv, fact_patterns.csv, feel_patterns.csv,
//!               thresholds.json, tuning.csv (when tuning is enabled)
//!   bootstrap/  bootstrap_state.json, bootstrap_log.csv,
//!               fact_patterns.csv, feel_patterns.csv
//!   eval/       eval.csv, nb.json
//!   analysis/   top_patterns_fact.csv, top_patterns_feel.csv,
//!               form_histogram.csv, prep_distribution.csv, report.md
//!   run.json
//! ```
//!
//! A failed run leaves a `FAILED` file holding the error message.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    form_histogram, instance_counts, prep_distribution, render_report, top_patterns, write_top_csv,
    FormGrouping,
};
use crate::bootstrap::{run_bootstrap, BootstrapState};
use crate::config::{InstanceSource, RunConfig};
use crate::corpus::{load_corpus, split_corpus, Corpus, Document, Format, Label, Split};
use crate::error::{Error, Result};
use crate::eval::{evaluate_state, nb_predict_row, nb_train, nb_tune, EvalReport};
use crate::parser::{Lexicon, Parser};
use crate::stats::{compute_stats, select_patterns, ClassThresholds, PatternStats};
use crate::tuning::{tune_thresholds, TuneOutcome};

pub const DOCUMENTS_FILE: &str = "documents.jsonl";
pub const STATE_FILE: &str = "bootstrap_state.json";
pub const FAILED_FILE: &str = "FAILED";
pub const MANIFEST_FILE: &str = "run.json";

/// Directory layout of a run.
#[derive(Clone, Debug)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Layout { root: root.into() }
    }

    pub fn corpus(&self) -> PathBuf {
        self.root.join("corpus")
    }

    pub fn learn(&self) -> PathBuf {
        self.root.join("learn")
    }

    pub fn bootstrap(&self) -> PathBuf {
        self.root.join("bootstrap")
    }

    pub fn eval(&self) -> PathBuf {
        self.root.join("eval")
    }

    pub fn analysis(&self) -> PathBuf {
        self.root.join("analysis")
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// The configured lexicon, or `None` for the shipped one.
pub fn load_lexicon(cfg: &RunConfig) -> Result<Option<Lexicon>> {
    cfg.paths.lexicon.as_deref().map(Lexicon::load_dir).transpose()
}

pub fn load_grouping(cfg: &RunConfig) -> Result<FormGrouping> {
    match &cfg.paths.form_groups {
        Some(p) => FormGrouping::load(p),
        None => Ok(FormGrouping::default()),
    }
}

/// Runs `f` inside a thread pool sized by `cfg.workers`.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn split_summary(corpus: &Corpus, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["split", "fact", "feel", "unlabeled"])?;
    for split in [Split::Train, Split::Dev, Split::Test, Split::Unannotated] {
        let (mut fact, mut feel, mut none) = (0usize, 0usize, 0usize);
        for d in corpus.in_split(split) {
            match d.label {
                Some(Label::Fact) => fact += 1,
                Some(Label::Feel) => feel += 1,
                None => none += 1,
            }
        }
        w.write_record([
            split.as_str().to_string(),
            fact.to_string(),
            feel.to_string(),
            none.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Loads a raw corpus, assigns splits and writes it to `dir`.
pub fn ingest(cfg: &RunConfig, input: &Path, format: Format, dir: &Path) -> Result<Corpus> {
    let raw = load_corpus(input, format)?;
    let corpus = split_corpus(&raw, cfg.split.ratios()?, cfg.split.seed)?;
    ensure_dir(dir)?;
    corpus.write_jsonl(&dir.join(DOCUMENTS_FILE))?;
    split_summary(&corpus, &dir.join("split_summary.csv"))?;
    log::info!(
        "ingested {} documents: train {}, dev {}, test {}, unannotated {}",
        corpus.len(),
        corpus.in_split(Split::Train).count(),
        corpus.in_split(Split::Dev).count(),
        corpus.in_split(Split::Test).count(),
        corpus.in_split(Split::Unannotated).count()
    );
    Ok(corpus)
}

/// Reads a corpus written by [`ingest`]; `path` may be the directory or the file.
pub fn load_ingested(path: &Path) -> Result<Corpus> {
    let file = if path.is_dir() {
        path.join(DOCUMENTS_FILE)
    } else {
        path.to_path_buf()
    };
    let corpus = load_corpus(&file, Format::Jsonl)?;
    if let Some(d) = corpus.iter().find(|d| d.split.is_none()) {
        return Err(Error::config(format!(
            "{}: document {:?} has no split; run ingest first",
            file.display(),
            d.id
        )));
    }
    Ok(corpus)
}

fn split_refs(corpus: &Corpus, split: Split) -> Vec<&Document> {
    corpus.in_split(split).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnOutcome {
    pub thresholds: ClassThresholds,
    pub tuning: Option<TuneOutcome>,
    pub fact_patterns: usize,
    pub feel_patterns: usize,
}

fn write_tuning_csv(outcome: &TuneOutcome, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["class", "theta_f", "theta_p", "theta_n", "precision", "recall"])?;
    for p in &outcome.points {
        w.write_record([
            p.label.as_str().to_string(),
            p.thresholds.theta_f.to_string(),
            format!("{:.2}", p.thresholds.theta_p),
            p.thresholds.theta_n.to_string(),
            p.precision.map(|v| format!("{v:.4}")).unwrap_or_default(),
            format!("{:.4}", p.recall),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Statistics and pattern sets over TRAIN, with optional threshold tuning on DEV.
pub fn learn(parser: &Parser<'_>, cfg: &RunConfig, corpus: &Corpus, dir: &Path) -> Result<LearnOutcome> {
    ensure_dir(dir)?;
    let mode = cfg.bootstrap.count_mode;
    let train = corpus.subset(Split::Train);
    let table = compute_stats(parser, &train, mode);
    table.write_csv(&dir.join("pattern_stats.csv"))?;

    let tuning = if cfg.tuning.enabled {
        let outcome = tune_thresholds(
            parser,
            &split_refs(corpus, Split::Train),
            &split_refs(corpus, Split::Dev),
            &cfg.tuning.grid,
            cfg.thresholds,
            mode,
        )?;
        write_tuning_csv(&outcome, &dir.join("tuning.csv"))?;
        Some(outcome)
    } else {
        None
    };
    let thresholds = tuning.as_ref().map_or(cfg.thresholds, |t| t.thresholds);
    let fact = select_patterns(&table, Label::Fact, &thresholds.fact);
    let feel = select_patterns(&table, Label::Feel, &thresholds.feel);
    fact.write_csv(&dir.join("fact_patterns.csv"))?;
    feel.write_csv(&dir.join("feel_patterns.csv"))?;
    log::info!(
        "learned {} FACT and {} FEEL patterns from {} distinct patterns",
        fact.len(),
        feel.len(),
        table.len()
    );
    let outcome = LearnOutcome {
        thresholds,
        tuning,
        fact_patterns: fact.len(),
        feel_patterns: feel.len(),
    };
    write_json(&dir.join("thresholds.json"), &outcome.thresholds)?;
    Ok(outcome)
}

/// Thresholds written by [`learn`], if present in `dir`.
pub fn learned_thresholds(dir: &Path) -> Result<Option<ClassThresholds>> {
    let path = dir.join("thresholds.json");
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let t: ClassThresholds = serde_json::from_str(&text)?;
    t.validate()?;
    Ok(Some(t))
}

pub fn bootstrap(
    parser: &Parser<'_>,
    cfg: &RunConfig,
    corpus: &Corpus,
    thresholds: ClassThresholds,
    dir: &Path,
) -> Result<BootstrapState> {
    ensure_dir(dir)?;
    let state = run_bootstrap(parser, corpus, thresholds, cfg.bootstrap.to_config())?;
    state.save(&dir.join(STATE_FILE))?;
    state.write_log_csv(&dir.join("bootstrap_log.csv"))?;
    state.fact_set.write_csv(&dir.join("fact_patterns.csv"))?;
    state.feel_set.write_csv(&dir.join("feel_patterns.csv"))?;
    Ok(state)
}

/// Reads a state written by [`bootstrap`]; `path` may be the directory or the file.
pub fn load_state(path: &Path) -> Result<BootstrapState> {
    if path.is_dir() {
        BootstrapState::load(&path.join(STATE_FILE))
    } else {
        BootstrapState::load(path)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NbSummary {
    pub alpha: f64,
    /// Accuracy on DEV at the chosen alpha; absent without a dev split.
    pub dev_accuracy: Option<f64>,
}

/// Scores every bootstrap round and the tuned NB baseline on TEST.
pub fn evaluate(
    parser: &Parser<'_>,
    cfg: &RunConfig,
    corpus: &Corpus,
    state: &BootstrapState,
    dir: &Path,
) -> Result<EvalReport> {
    ensure_dir(dir)?;
    let test = split_refs(corpus, Split::Test);
    if test.is_empty() {
        return Err(Error::EmptyTestSplit);
    }
    let mut report = evaluate_state(parser, state, &test)?;

    let train = split_refs(corpus, Split::Train);
    let dev = split_refs(corpus, Split::Dev);
    let summary = if dev.iter().any(|d| d.label.is_some()) {
        let (alpha, acc) = nb_tune(&train, &dev, &cfg.nb.alpha_grid)?;
        NbSummary {
            alpha,
            dev_accuracy: Some(acc),
        }
    } else {
        let alpha = cfg.nb.alpha_grid.iter().copied().fold(f64::INFINITY, f64::min);
        log::warn!("no labeled dev documents; NB uses alpha {alpha} untuned");
        NbSummary {
            alpha,
            dev_accuracy: None,
        }
    };
    let model = nb_train(&train, summary.alpha)?;
    report.rows.push(nb_predict_row(&model, &test)?);
    write_json(&dir.join("nb.json"), &summary)?;
    report.write_csv(&dir.join("eval.csv"))?;
    for row in &report.rows {
        log::info!(
            "{}: FACT P={:?} R={:?}, FEEL P={:?} R={:?}",
            row.system,
            row.fact.precision(),
            row.fact.recall(),
            row.feel.precision(),
            row.feel.recall()
        );
    }
    Ok(report)
}

/// Characteristic patterns, form histogram and preposition tables of the final sets.
pub fn analyze(cfg: &RunConfig, state: &BootstrapState, dir: &Path) -> Result<()> {
    ensure_dir(dir)?;
    let grouping = load_grouping(cfg)?;
    let k = cfg.analysis.top_k;
    let fact_top = top_patterns(&state.fact_set, k);
    let feel_top = top_patterns(&state.feel_set, k);
    write_top_csv(&fact_top, &dir.join("top_patterns_fact.csv"))?;
    write_top_csv(&feel_top, &dir.join("top_patterns_feel.csv"))?;

    let weights = match cfg.analysis.instances {
        InstanceSource::Final => instance_counts(&state.final_stats),
        InstanceSource::Admission => {
            let admitted: Vec<PatternStats> = state
                .fact_set
                .entries()
                .iter()
                .chain(state.feel_set.entries())
                .cloned()
                .collect();
            instance_counts(&admitted)
        }
    };
    let hist = form_histogram(&state.fact_set, &state.feel_set, &weights, &grouping);
    hist.write_csv(&dir.join("form_histogram.csv"))?;
    let preps = prep_distribution(&state.fact_set, &state.feel_set);
    preps.write_csv(&dir.join("prep_distribution.csv"))?;
    let report = render_report(&fact_top, &feel_top, &hist, &preps);
    let path = dir.join("report.md");
    std::fs::write(&path, report).map_err(|e| Error::io(&path, e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub status: String,
    pub config_sha256: String,
    pub config: RunConfig,
    pub thresholds: Option<ClassThresholds>,
    pub stages: Vec<StageTiming>,
    pub error: Option<String>,
}

struct Timer<'a>(&'a mut Vec<StageTiming>);

impl Timer<'_> {
    fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        log::info!("stage {name}");
        let start = Instant::now();
        let out = f();
        self.0.push(StageTiming {
            stage: name.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }
}

/// Runs every stage and writes `run.json`; on error also writes `FAILED`.
pub fn run_pipeline(cfg: &RunConfig) -> Result<Manifest> {
    cfg.validate()?;
    let layout = Layout::new(&cfg.paths.output);
    ensure_dir(&layout.root)?;
    let failed = layout.root.join(FAILED_FILE);
    if failed.exists() {
        std::fs::remove_file(&failed).map_err(|e| Error::io(&failed, e))?;
    }

    let mut manifest = Manifest {
        status: "running".into(),
        config_sha256: cfg.digest(),
        config: cfg.clone(),
        thresholds: None,
        stages: Vec::new(),
        error: None,
    };
    let result = with_workers(cfg.workers, || run_stages(cfg, &layout, &mut manifest)).and_then(|r| r);
    match &result {
        Ok(()) => manifest.status = "ok".into(),
        Err(e) => {
            manifest.status = "failed".into();
            manifest.error = Some(e.to_string());
            std::fs::write(&failed, format!("{e}\n")).map_err(|io| Error::io(&failed, io))?;
        }
    }
    write_json(&layout.root.join(MANIFEST_FILE), &manifest)?;
    result.map(|()| manifest)
}

fn run_stages(cfg: &RunConfig, layout: &Layout, manifest: &mut Manifest) -> Result<()> {
    let lexicon = load_lexicon(cfg)?;
    let parser = match &lexicon {
        Some(l) => Parser::new(l),
        None => Parser::default(),
    };
    let format = cfg.format()?;
    let mut timer = Timer(&mut manifest.stages);
    let corpus = timer.stage("ingest", || ingest(cfg, &cfg.paths.corpus, format, &layout.corpus()))?;
    let learned = timer.stage("learn", || learn(&parser, cfg, &corpus, &layout.learn()))?;
    let state = timer.stage("bootstrap", || {
        bootstrap(&parser, cfg, &corpus, learned.thresholds, &layout.bootstrap())
    })?;
    timer.stage("eval", || evaluate(&parser, cfg, &corpus, &state, &layout.eval()))?;
    timer.stage("analyze", || analyze(cfg, &state, &layout.analysis()))?;
    manifest.thresholds = Some(learned.thresholds);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{generate, SyntheticSpec};

    fn config_for(dir: &Path) -> RunConfig {
        let spec = SyntheticSpec {
            test_per_tier: (12, 8),
            ..SyntheticSpec::small(3)
        };
        let corpus = generate(&spec).unsplit().unwrap();
        let input = dir.join("input.jsonl");
        corpus.write_jsonl(&input).unwrap();
        let mut cfg = RunConfig::default();
        cfg.paths.corpus = input;
        cfg.paths.output = dir.join("out");
        cfg.workers = 2;
        cfg
    }

    #[test]
    fn run_writes_every_artifact() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = config_for(tmp.path());
        let manifest = run_pipeline(&cfg).unwrap();
        assert_eq!(manifest.status, "ok");
        assert_eq!(manifest.stages.len(), 5);
        let layout = Layout::new(&cfg.paths.output);
        for p in [
            layout.corpus().join(DOCUMENTS_FILE),
            layout.learn().join("pattern_stats.csv"),
            layout.bootstrap().join(STATE_FILE),
            layout.bootstrap().join("bootstrap_log.csv"),
            layout.eval().join("eval.csv"),
            layout.analysis().join("report.md"),
            layout.root.join(MANIFEST_FILE),
        ] {
            assert!(p.exists(), "{}", p.display());
        }
        assert!(!layout.root.join(FAILED_FILE).exists());
        let state = load_state(&layout.bootstrap()).unwrap();
        // the small corpus has no conflicting documents, so the pool runs dry
        assert!(state.pool.is_empty() || state.log.len() == cfg.bootstrap.iterations + 1);
        assert!(state.log.len() >= 2);
    }

    #[test]
    fn failure_leaves_a_marker() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = config_for(tmp.path());
        cfg.paths.corpus = tmp.path().join("missing.jsonl");
        assert!(run_pipeline(&cfg).is_err());
        let root = &cfg.paths.output;
        assert!(root.join(FAILED_FILE).exists());
        let manifest: Manifest =
            serde_json::from_str(&std::fs::read_to_string(root.join(MANIFEST_FILE)).unwrap()).unwrap();
        assert_eq!(manifest.status, "failed");
        assert!(manifest.error.unwrap().contains("missing.jsonl"));
    }
}
