//! Command-line front end for sentence-level information type detection.

mod classify;
mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use infotypes::corpus::{
    cohen_kappa, fetch_thread, filter_for_training, import_labeled_csv, load_corpus, parse_thread,
    save_corpus, InfoType, IssueThread,
};
use infotypes::eval::{run_all, run_experiment, train_bundle, ExperimentConfig, Scenario};
use infotypes::models::{load_model, save_model};
use infotypes::preprocess::{segment_thread, TextRules};
use infotypes::{Error, Result};

pub use classify::{classify_thread, SentencePrediction};
pub use report::{gold_labels, render_html, render_report, PALETTE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "infotypes",
    version,
    about = "Detect information types in issue discussion threads"
)]
struct Cli {
    /// Abbreviation list (one per line) for the sentence splitter.
    #[arg(long, global = true)]
    abbreviations: Option<PathBuf>,
    /// Contraction table (`contraction expansion...` per line).
    #[arg(long, global = true)]
    contractions: Option<PathBuf>,
    /// More log output; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Download an issue thread from GitHub, or import labeled CSV.
    Ingest(IngestArgs),
    /// Segment and tokenize every thread of a corpus.
    Preprocess {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tune and train a model on a labeled corpus.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        config: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out_model: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Nested cross-validated evaluation.
    Evaluate(EvaluateArgs),
    /// Label every sentence of a thread with a trained model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        thread: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a thread as static HTML.
    Report {
        #[arg(long)]
        thread: PathBuf,
        /// `gold` to use the thread's own labels.
        #[arg(long, conflicts_with = "model", required_unless_present = "model")]
        labels: Option<String>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cohen's kappa between two label files (one label per line).
    Kappa {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
}

#[derive(Args, Debug)]
struct IngestArgs {
    #[arg(long, requires_all = ["repo", "issue"], conflicts_with = "csv")]
    owner: Option<String>,
    #[arg(long)]
    repo: Option<String>,
    #[arg(long)]
    issue: Option<u64>,
    /// Environment variable holding a GitHub token.
    #[arg(long, default_value = "GITHUB_TOKEN")]
    token_env: String,
    /// Labeled sentence CSV to import instead of downloading.
    #[arg(long, required_unless_present = "owner")]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    scenario: u8,
    #[arg(long, conflicts_with = "all", required_unless_present = "all")]
    config: Option<String>,
    #[arg(long)]
    all: bool,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, conflicts_with = "table")]
    json: bool,
    #[arg(long)]
    table: bool,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| io_err(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| io_err(Path::new("<stdout>"), e))
        }
    }
}

/// Reads a thread from a JSON file, or the first line of a JSONL corpus.
fn read_thread(path: &Path) -> Result<IssueThread> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    match parse_thread(&text) {
        Ok(t) => Ok(t),
        Err(first) => {
            let mut threads = load_corpus(path).map_err(|_| first)?;
            if threads.len() != 1 {
                return Err(Error::Validation(format!(
                    "{} holds {} threads; expected one",
                    path.display(),
                    threads.len()
                )));
            }
            Ok(threads.remove(0))
        }
    }
}

fn labeled_dataset(path: &Path) -> Result<infotypes::corpus::Dataset> {
    let mut threads = load_corpus(path)?;
    for t in threads.iter_mut().filter(|t| !t.is_segmented()) {
        segment_thread(t);
    }
    filter_for_training(&threads, &InfoType::default_excluded())
}

fn read_label_file(path: &Path) -> Result<Vec<InfoType>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(InfoType::parse_lenient)
        .collect()
}

fn execute(cli: Cli) -> Result<()> {
    if cli.abbreviations.is_some() || cli.contractions.is_some() {
        TextRules::install(TextRules::from_files(
            cli.abbreviations.as_deref(),
            cli.contractions.as_deref(),
        )?)?;
    }
    match cli.command {
        Command::Ingest(a) => {
            let threads = if let Some(csv) = &a.csv {
                import_labeled_csv(csv)?
            } else {
                let (owner, repo, issue) = (
                    a.owner.as_deref().unwrap_or_default(),
                    a.repo.as_deref().unwrap_or_default(),
                    a.issue.unwrap_or_default(),
                );
                let token = std::env::var(&a.token_env).ok().filter(|t| !t.is_empty());
                vec![fetch_thread(owner, repo, issue, token.as_deref())?]
            };
            log::info!("writing {} thread(s) to {}", threads.len(), a.out.display());
            save_corpus(&threads, &a.out)
        }
        Command::Preprocess { corpus, out } => {
            let mut threads = load_corpus(&corpus)?;
            for t in threads.iter_mut().filter(|t| !t.is_segmented()) {
                segment_thread(t);
            }
            save_corpus(&threads, &out)
        }
        Command::Train {
            corpus,
            config,
            seed,
            out_model,
            threads,
        } => {
            let config: ExperimentConfig = config.parse()?;
            let dataset = labeled_dataset(&corpus)?;
            let bundle = train_bundle(&dataset, &config, seed, threads)?;
            log::info!("selected {:?}", bundle.hyperparameters);
            save_model(&bundle, &out_model)
        }
        Command::Evaluate(a) => {
            let dataset = labeled_dataset(&a.corpus)?;
            let scenario = Scenario::from_number(a.scenario)?;
            let reports = match &a.config {
                Some(c) => {
                    let config: ExperimentConfig = c.parse()?;
                    vec![run_experiment(
                        &dataset, scenario, &config, a.seed, a.threads,
                    )?]
                }
                None => {
                    let all = run_all(&dataset, scenario, a.seed, a.threads)?;
                    let failed = all.iter().filter(|(_, r)| r.is_err()).count();
                    let ok: Vec<_> = all.into_iter().filter_map(|(_, r)| r.ok()).collect();
                    if ok.is_empty() {
                        return Err(Error::Validation(format!(
                            "all {failed} configurations failed"
                        )));
                    }
                    ok
                }
            };
            let text = if a.json {
                serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n"
            } else {
                reports
                    .iter()
                    .map(|r| r.to_table())
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            emit(a.out.as_deref(), &text)
        }
        Command::Predict { model, thread, out } => {
            let bundle = load_model(&model)?;
            let thread = read_thread(&thread)?;
            let preds = classify_thread(&bundle, &thread)?;
            let json = serde_json::to_string_pretty(&preds).expect("predictions serialize") + "\n";
            emit(out.as_deref(), &json)
        }
        Command::Report {
            thread,
            labels,
            model,
            out,
        } => {
            let mut thread = read_thread(&thread)?;
            let labels = match (labels.as_deref(), model) {
                (_, Some(m)) => {
                    let bundle = load_model(&m)?;
                    if !thread.is_segmented() {
                        segment_thread(&mut thread);
                    }
                    classify_thread(&bundle, &thread)?
                        .into_iter()
                        .map(|p| Some(p.label))
                        .collect()
                }
                (Some("gold"), None) => {
                    if !thread.is_segmented() {
                        return Err(Error::Validation(
                            "gold labels need a segmented, labeled thread".into(),
                        ));
                    }
                    gold_labels(&thread)
                }
                (other, None) => {
                    return Err(Error::InvalidInput(format!(
                        "--labels must be `gold` (got {other:?}) or use --model"
                    )))
                }
            };
            render_report(&thread, &labels, &out)
        }
        Command::Kappa { a, b } => {
            let k = cohen_kappa(&read_label_file(&a)?, &read_label_file(&b)?)?;
            emit(None, &format!("{k:.6}\n"))
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            if e.is_data_error() {
                EXIT_DATA
            } else {
                EXIT_RUNTIME
            }
        }
    }
}
