use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser as ClapParser, Subcommand, ValueEnum};

use factfeel::config::RunConfig;
use factfeel::corpus::{Format, SplitRatios};
use factfeel::parser::{Lexicon, Parser};
use factfeel::pipeline::{self, Layout};
use factfeel::synthetic::{generate, SyntheticSpec};
use factfeel::templates::{instantiate_document, instantiate_text};

#[derive(ClapParser)]
#[command(name = "factfeel", version, about = "Learn FACT and FEEL patterns from argumentative text")]
struct Cli {
    /// TOML run configuration; every field has a default.
    #[arg(long, global = true, env = "FACTFEEL_CONFIG")]
    config: Option<PathBuf>,

    /// Worker threads (0 = all cores); overrides the config file.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a raw corpus, assign splits and write documents.jsonl.
    Ingest(IngestArgs),
    /// Print the shallow parse of a text.
    Parse(TextArgs),
    /// Print the pattern instances of a text or an ingested document.
    Patterns(PatternsArgs),
    /// Compute pattern statistics on TRAIN and select the initial sets.
    Learn(LearnArgs),
    /// Learn from TRAIN and bootstrap over the unannotated pool.
    Bootstrap(BootstrapArgs),
    /// Score every bootstrap round and the NB baseline on TEST.
    Eval(EvalArgs),
    /// Write pattern tables, form histograms and the report.
    Analyze(AnalyzeArgs),
    /// Run every stage end to end.
    Run(RunArgs),
    /// Write a synthetic corpus with planted expressions.
    Synth(SynthArgs),
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated train,dev,test fractions.
    #[arg(long)]
    ratios: Option<SplitRatios>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TextArgs {
    /// Text to process; read from --file or stdin when absent.
    #[arg(long, conflicts_with = "file")]
    text: Option<String>,
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct PatternsArgs {
    #[command(flatten)]
    text: TextArgs,
    /// Ingested corpus directory, used with --doc.
    #[arg(long, requires = "doc")]
    corpus: Option<PathBuf>,
    #[arg(long, requires = "corpus")]
    doc: Option<String>,
}

#[derive(Args)]
struct LearnArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BootstrapArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Re-select patterns from current statistics each round.
    #[arg(long)]
    strict: bool,
    /// Directory written by `learn`; its thresholds replace the configured ones.
    #[arg(long)]
    learned: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Bootstrap output directory or state file.
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    top_k: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    /// Raw corpus; overrides paths.corpus.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory; overrides paths.output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// 200 documents: 80 labeled, 120 unannotated.
    Small,
    /// 400 labeled, 2,000 unannotated and 300 test documents.
    Recovery,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum, default_value = "small")]
    preset: Preset,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Keep the generator's TRAIN/UNANNOTATED/TEST assignment instead of leaving
    /// splits to `ingest`.
    #[arg(long)]
    split: bool,
    #[arg(long)]
    out: PathBuf,
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => RunConfig::default(),
    };
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    Ok(cfg)
}

fn read_text(args: &TextArgs) -> Result<String> {
    if let Some(t) = &args.text {
        return Ok(t.clone());
    }
    if let Some(p) = &args.file {
        return std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()));
    }
    let mut s = String::new();
    std::io::stdin().read_to_string(&mut s)?;
    Ok(s)
}

fn with_parser<T>(cfg: &RunConfig, f: impl FnOnce(&Parser<'_>) -> Result<T>) -> Result<T> {
    let lexicon: Option<Lexicon> = pipeline::load_lexicon(cfg)?;
    match &lexicon {
        Some(l) => f(&Parser::new(l)),
        None => f(&Parser::default()),
    }
}

fn workers<T: Send>(cfg: &RunConfig, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    pipeline::with_workers(cfg.workers, f)?
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = load_config(&cli)?;
    match cli.command {
        Command::Ingest(a) => {
            if let Some(s) = a.seed {
                cfg.split.seed = s;
            }
            if let Some(r) = a.ratios {
                cfg.split.ratios = [r.train, r.dev, r.test];
            }
            let format: Format = match &a.format {
                Some(f) => f.parse().map_err(anyhow::Error::msg)?,
                None => cfg.format()?,
            };
            pipeline::ingest(&cfg, &a.input, format, &a.out)?;
        }
        Command::Parse(a) => {
            let text = read_text(&a)?;
            with_parser(&cfg, |parser| {
                for s in parser.parse(&text) {
                    print!("{s}");
                }
                Ok(())
            })?;
        }
        Command::Patterns(a) => with_parser(&cfg, |parser| {
            let found = match (&a.corpus, &a.doc) {
                (Some(dir), Some(id)) => {
                    let corpus = pipeline::load_ingested(dir)?;
                    let doc = corpus
                        .get(id)
                        .with_context(|| format!("no document {id:?} in {}", dir.display()))?;
                    instantiate_document(parser, doc)
                }
                _ => instantiate_text(parser, &read_text(&a.text)?),
            };
            for p in found {
                println!("{p}");
            }
            Ok(())
        })?,
        Command::Learn(a) => workers(&cfg, || {
            let corpus = pipeline::load_ingested(&a.corpus)?;
            with_parser(&cfg, |parser| Ok(pipeline::learn(parser, &cfg, &corpus, &a.out)?))?;
            Ok(())
        })?,
        Command::Bootstrap(a) => {
            if let Some(n) = a.iterations {
                cfg.bootstrap.iterations = n;
            }
            if let Some(s) = a.seed {
                cfg.bootstrap.seed = s;
            }
            if a.strict {
                cfg.bootstrap.strict_refilter = true;
            }
            let thresholds = match &a.learned {
                Some(dir) => match pipeline::learned_thresholds(dir)? {
                    Some(t) => t,
                    None => bail!("{} has no thresholds.json", dir.display()),
                },
                None => cfg.thresholds,
            };
            workers(&cfg, || {
                let corpus = pipeline::load_ingested(&a.corpus)?;
                with_parser(&cfg, |parser| {
                    Ok(pipeline::bootstrap(parser, &cfg, &corpus, thresholds, &a.out)?)
                })?;
                Ok(())
            })?;
        }
        Command::Eval(a) => workers(&cfg, || {
            let corpus = pipeline::load_ingested(&a.corpus)?;
            let state = pipeline::load_state(&a.state)?;
            let report = with_parser(&cfg, |parser| {
                Ok(pipeline::evaluate(parser, &cfg, &corpus, &state, &a.out)?)
            })?;
            for row in &report.rows {
                println!(
                    "{}\tFACT P={} R={}\tFEEL P={} R={}",
                    row.system,
                    pct(row.fact.precision()),
                    pct(row.fact.recall()),
                    pct(row.feel.precision()),
                    pct(row.feel.recall())
                );
            }
            Ok(())
        })?,
        Command::Analyze(a) => {
            if let Some(k) = a.top_k {
                cfg.analysis.top_k = k;
            }
            let state = pipeline::load_state(&a.state)?;
            pipeline::analyze(&cfg, &state, &a.out)?;
        }
        Command::Run(a) => {
            if let Some(p) = a.input {
                cfg.paths.corpus = p;
            }
            if let Some(p) = a.out {
                cfg.paths.output = p;
            }
            if let Some(s) = a.seed {
                cfg.split.seed = s;
                cfg.bootstrap.seed = s;
            }
            let manifest = pipeline::run_pipeline(&cfg)
                .with_context(|| format!("run failed; see {}", failed_marker(&cfg.paths.output).display()))?;
            for s in &manifest.stages {
                log::info!("{}: {:.2}s", s.stage, s.seconds);
            }
            println!("{}", Layout::new(&cfg.paths.output).root.display());
        }
        Command::Synth(a) => {
            let spec = match a.preset {
                Preset::Small => SyntheticSpec::small(a.seed),
                Preset::Recovery => SyntheticSpec::recovery(a.seed),
            };
            let synthetic = generate(&spec);
            let corpus = if a.split {
                synthetic.to_corpus()?
            } else {
                synthetic.unsplit()?
            };
            if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            corpus.write_jsonl(&a.out)?;
            log::info!("wrote {} documents to {}", corpus.len(), a.out.display());
        }
    }
    Ok(())
}

fn failed_marker(root: &Path) -> PathBuf {
    root.join(pipeline::FAILED_FILE)
}

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{:.1}", 100.0 * v))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
