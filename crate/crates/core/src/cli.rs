//! Command-line entry point.
//!
//! Machine output goes to stdout (or `-o`), diagnostics to stderr. Exit
//! codes: 0 success, 1 invalid input or usage, 2 unreadable files or
//! unreachable endpoints.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::corpus::{parse_corpus, Corpus, Lang, ParseMode, SplitKind};
use crate::error::{Error, Result};
use crate::fewshot::{
    build_prompt, sample_exemplars, AnnotationStatus, Annotator, ChatTransport, HttpTransport, LlmEndpointConfig,
    PromptSpec, PromptTarget, ScriptedResponder, DEFAULT_TEMPLATE,
};
use crate::labels::{aggregate_corpus, read_gold, write_gold, LabelSummary, Task};
use crate::metrics::{score_run, ItemPrediction, MetricConfig};
use crate::report::{render_table, render_tsv};
use crate::runs::{compare, emit_submission, generate_baseline, load_run, BaselineKind, Run, RunKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "disagree",
    version,
    about = "Score and annotate multi-annotator tweet classification corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a corpus file and print instance counts per split.
    Validate {
        corpus: PathBuf,
        /// Quarantine malformed instances instead of failing.
        #[arg(long)]
        lenient: bool,
    },
    /// Aggregate annotator votes into a gold-label file.
    Gold {
        corpus: PathBuf,
        #[arg(long, value_parser = parse_task)]
        task: Task,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        lenient: bool,
    },
    /// Write a baseline run file built from a gold-label file.
    Baseline {
        gold: PathBuf,
        #[arg(long, value_parser = parse_baseline)]
        kind: BaselineKind,
        /// Representation to write.
        #[arg(long = "as", value_enum, default_value_t = Representation::Soft)]
        representation: Representation,
        #[arg(long, value_parser = parse_task)]
        task: Option<Task>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Score run files against a gold-label file.
    Score {
        gold: PathBuf,
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        #[arg(long, value_parser = parse_lang)]
        lang: Option<Lang>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long, value_parser = parse_task)]
        task: Option<Task>,
        /// Decimal places in the output.
        #[arg(long, default_value_t = 2)]
        precision: usize,
    },
    /// Print the few-shot prompt for one target tweet.
    Prompt {
        corpus: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_parser = parse_task, default_value = "1")]
        task: Task,
        #[arg(long, default_value = DEFAULT_TEMPLATE)]
        template: String,
    },
    /// Label tweets with a chat-completion model and write a hard run file.
    Annotate {
        corpus: PathBuf,
        #[arg(long, value_parser = parse_task)]
        task: Task,
        #[arg(long)]
        endpoint_config: PathBuf,
        /// Replay replies from a JSONL script instead of calling the endpoint.
        #[arg(long)]
        dry_run: Option<PathBuf>,
        /// Split to annotate; by default every non-training instance.
        #[arg(long, value_parser = parse_split)]
        split: Option<SplitKind>,
        #[arg(long, value_parser = parse_lang)]
        lang: Option<Lang>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Per-target log, one JSON object per line.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Score baselines and runs overall and per language.
    Report {
        gold: PathBuf,
        runs: Vec<PathBuf>,
        #[arg(long, value_parser = parse_lang)]
        lang: Option<Lang>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long, value_parser = parse_task)]
        task: Option<Task>,
        #[arg(long, default_value_t = 2)]
        precision: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Representation {
    Hard,
    Soft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Table,
}

fn parse_task(s: &str) -> std::result::Result<Task, String> {
    s.parse()
}

fn parse_baseline(s: &str) -> std::result::Result<BaselineKind, String> {
    s.parse()
}

fn parse_lang(s: &str) -> std::result::Result<Lang, String> {
    s.to_ascii_lowercase().parse()
}

fn parse_split(s: &str) -> std::result::Result<SplitKind, String> {
    s.to_ascii_uppercase().parse()
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_INVALID
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_io() {
                EXIT_IO
            } else {
                EXIT_INVALID
            }
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

fn emit(output: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, bytes).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        }),
        None => out.write_all(bytes).map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn load_corpus(path: &Path, mode: ParseMode, err: &mut dyn Write) -> Result<Corpus> {
    let mut corpus = parse_corpus(&read(path)?, mode)?;
    corpus.provenance.source = Some(path.to_owned());
    for w in &corpus.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    for q in &corpus.quarantined {
        let _ = writeln!(
            err,
            "quarantined {}: {}",
            q.id.as_deref().unwrap_or("<no id>"),
            q.reason
        );
    }
    Ok(corpus)
}

fn mode(lenient: bool) -> ParseMode {
    if lenient {
        ParseMode::Lenient
    } else {
        ParseMode::Strict
    }
}

fn load_gold(path: &Path, task: Option<Task>) -> Result<(Task, Vec<LabelSummary>)> {
    read_gold(&read(path)?, task)
}

/// Loads a run file, naming the run after the file stem.
fn load_named_run(path: &Path, task: Task) -> Result<Run> {
    let mut run = load_run(&read(path)?, task)?;
    run.name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    run.source = path.display().to_string();
    Ok(run)
}

fn render(reports: &[crate::metrics::ScoreReport], format: Format, precision: usize) -> String {
    match format {
        Format::Tsv => render_tsv(reports, precision),
        Format::Table => render_table(reports, precision),
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match command {
        Command::Validate { corpus, lenient } => {
            let corpus = load_corpus(&corpus, mode(lenient), err)?;
            let mut counts: BTreeMap<String, usize> = BTreeMap::new();
            for i in &corpus.instances {
                *counts.entry(i.split().to_string()).or_default() += 1;
            }
            let mut text = String::new();
            for (split, n) in &counts {
                text.push_str(&format!("{split}\t{n}\n"));
            }
            text.push_str(&format!("total\t{}\n", corpus.len()));
            if lenient {
                text.push_str(&format!("warnings\t{}\n", corpus.warnings.len()));
                text.push_str(&format!("quarantined\t{}\n", corpus.quarantined.len()));
            }
            emit(None, text.as_bytes(), out)
        }
        Command::Gold {
            corpus,
            task,
            output,
            lenient,
        } => {
            let corpus = load_corpus(&corpus, mode(lenient), err)?;
            let labelled = Corpus::new(
                corpus
                    .instances
                    .into_iter()
                    .filter(|i| i.as_annotated().is_some())
                    .collect(),
            );
            let summaries = aggregate_corpus(&labelled, task)?;
            let excluded = summaries.iter().filter(|s| s.hard.is_none()).count();
            if excluded > 0 {
                let _ = writeln!(err, "{excluded} instance(s) have no {task} hard label");
            }
            emit(output.as_deref(), &write_gold(&summaries, task), out)
        }
        Command::Baseline {
            gold,
            kind,
            representation,
            task,
            output,
        } => {
            let (task, gold) = load_gold(&gold, task)?;
            let mut run = generate_baseline(kind, &gold, task)?;
            if representation == Representation::Hard {
                let predictions = run
                    .predictions
                    .into_iter()
                    .filter(|p| p.hard.is_some())
                    .map(|p| ItemPrediction { soft: None, ..p })
                    .collect();
                run = Run::new(run.name, task, RunKind::Hard, predictions)?;
            }
            emit(output.as_deref(), &emit_submission(&run), out)
        }
        Command::Score {
            gold,
            runs,
            lang,
            format,
            task,
            precision,
        } => {
            let (task, gold) = load_gold(&gold, task)?;
            let cfg = MetricConfig::default();
            let reports = runs
                .iter()
                .map(|path| score_run(&load_named_run(path, task)?, &gold, &cfg, lang))
                .collect::<Result<Vec<_>>>()?;
            emit(None, render(&reports, format, precision).as_bytes(), out)
        }
        Command::Prompt {
            corpus,
            target,
            seed,
            task,
            template,
        } => {
            let corpus = load_corpus(&corpus, ParseMode::Strict, err)?;
            let instance = corpus
                .get(&target)
                .ok_or_else(|| Error::Prompt(format!("no instance with id {target}")))?;
            let spec = PromptSpec {
                task,
                exemplars: sample_exemplars(&corpus, task, seed, Some(&target))?,
                target: PromptTarget::from(instance),
                template_id: template,
                seed,
            };
            let mut text = build_prompt(&spec)?;
            text.push('\n');
            emit(None, text.as_bytes(), out)
        }
        Command::Annotate {
            corpus,
            task,
            endpoint_config,
            dry_run,
            split,
            lang,
            seed,
            output,
            log,
        } => {
            let corpus = load_corpus(&corpus, ParseMode::Strict, err)?;
            let cfg = LlmEndpointConfig::from_json(&read(&endpoint_config)?)?;
            let transport: Box<dyn ChatTransport> = match &dry_run {
                Some(path) => {
                    let raw = String::from_utf8_lossy(&read(path)?).into_owned();
                    Box::new(ScriptedResponder::from_jsonl(&raw)?)
                }
                None => Box::new(HttpTransport::new(&cfg)?),
            };
            let targets: Vec<PromptTarget> = corpus
                .instances
                .iter()
                .filter(|i| match split {
                    Some(kind) => i.split().kind == kind,
                    None => i.split().kind != SplitKind::Train,
                })
                .filter(|i| lang.is_none_or(|l| i.lang() == l))
                .map(PromptTarget::from)
                .collect();
            if targets.is_empty() {
                return Err(Error::Prompt("no target instances selected".into()));
            }
            let annotator = Annotator::new(&corpus, &cfg, task, seed, transport.as_ref())?;
            let (run, annotations) = annotator.run(&targets)?;
            let count = |s: AnnotationStatus| annotations.iter().filter(|a| a.status == s).count();
            let _ = writeln!(
                err,
                "annotated {} target(s): {} ok, {} unparseable, {} transport error(s)",
                annotations.len(),
                count(AnnotationStatus::Ok),
                count(AnnotationStatus::Unparseable),
                count(AnnotationStatus::TransportError)
            );
            if let Some(path) = log {
                let mut lines = String::new();
                for a in &annotations {
                    lines.push_str(&a.to_json(task).to_string());
                    lines.push('\n');
                }
                emit(Some(&path), lines.as_bytes(), out)?;
            }
            emit(output.as_deref(), &emit_submission(&run), out)
        }
        Command::Report {
            gold,
            runs,
            lang,
            format,
            task,
            precision,
        } => {
            let (task, gold) = load_gold(&gold, task)?;
            let runs = runs
                .iter()
                .map(|path| load_named_run(path, task))
                .collect::<Result<Vec<_>>>()?;
            let cfg = MetricConfig::default();
            let scopes: Vec<Option<Lang>> = match lang {
                Some(l) => vec![Some(l)],
                None => std::iter::once(None)
                    .chain(
                        [Lang::En, Lang::Es]
                            .into_iter()
                            .filter(|l| gold.iter().any(|g| g.lang == Some(*l) && !g.is_excluded()))
                            .map(Some),
                    )
                    .collect(),
            };
            let mut text = String::new();
            for (i, scope) in scopes.iter().enumerate() {
                let reports = compare(&runs, &gold, task, &cfg, *scope)?;
                if i > 0 {
                    text.push('\n');
                }
                let title = match scope {
                    None => "Overall".to_owned(),
                    Some(l) => l.as_str().to_ascii_uppercase(),
                };
                text.push_str(&format!("# {title} ({task})\n"));
                text.push_str(&render(&reports, format, precision));
            }
            emit(None, text.as_bytes(), out)
        }
    }
}
