//! Command-line front end: annotate text, validate and describe a KB,
//! score predictions against gold.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use propnames::error::EvalError;
use propnames::eval::eval_corpus;
use propnames::kb::{merge_record_streams, parse_records};
use propnames::pipeline::{
    read_jsonl, write_records, AnnotationRecord, InputDocument, PipelineOptions,
};
use propnames::tokenizer::tokenize;
use propnames::{bundled, Annotator, KnowledgeBase, RulePack};

#[derive(Parser)]
#[command(
    name = "propnames",
    version,
    about = "Find and categorise proper names in text"
)]
struct Cli {
    /// Knowledge base file (JSON lines). Repeatable; later files overlay
    /// earlier ones. Defaults to the bundled sample KB.
    #[arg(long, global = true, value_name = "PATH")]
    kb: Vec<PathBuf>,
    /// Rule pack file (JSON lines). Defaults to the bundled rules.
    #[arg(long, global = true, value_name = "PATH")]
    rules: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Annotate documents and write one JSON record per mention.
    Annotate {
        /// Text file, JSON-lines file of {doc_id, text}, directory of text
        /// files, or `-` for stdin.
        #[arg(long = "in", value_name = "PATH", default_value = "-")]
        input: String,
        #[arg(long, value_name = "PATH", default_value = "-")]
        out: String,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
        #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
        input_format: InputFormat,
        /// Skip radical linking and global homonym selection.
        #[arg(long)]
        no_coreference: bool,
    },
    /// Check a KB (and rule pack, if given) and list invariant violations.
    Validate,
    /// Score predicted annotations against gold.
    Eval {
        #[arg(long, value_name = "PATH")]
        gold: PathBuf,
        #[arg(long, value_name = "PATH")]
        pred: PathBuf,
        /// Documents to time annotation on, for words per minute.
        #[arg(long, value_name = "PATH")]
        docs: Option<PathBuf>,
    },
    /// Print KB and rule pack counts.
    Stats,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum InputFormat {
    /// JSON lines for `.jsonl` files or stdin starting with `{`, text otherwise.
    Auto,
    Text,
    Jsonl,
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

const USAGE: u8 = 1;
const LOAD: u8 = 2;
const EVAL: u8 = 3;

trait Code<T> {
    fn code(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Code<T> for Result<T, E> {
    fn code(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            code,
            error: e.into(),
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate => validate(&cli.kb, cli.rules.as_deref()),
        Command::Stats => {
            let kb = load_kb(&cli.kb)?;
            let rules = load_rules(cli.rules.as_deref(), &kb)?;
            let out = serde_json::json!({
                "kb": kb.stats(),
                "prototype_rules": rules.prototypes.len(),
                "context_rules": rules.context.len(),
            });
            println!("{}", serde_json::to_string_pretty(&out).code(USAGE)?);
            Ok(())
        }
        Command::Annotate {
            input,
            out,
            format: Format::Jsonl,
            input_format,
            no_coreference,
        } => {
            let kb = load_kb(&cli.kb)?;
            let rules = load_rules(cli.rules.as_deref(), &kb)?;
            let docs = read_documents(&input, input_format).code(USAGE)?;
            let annotator = Annotator::new(&kb, &rules).with_options(PipelineOptions {
                coreference: !no_coreference,
            });
            let records = annotator.annotate_corpus(&docs);
            let mut w = open_output(&out).code(USAGE)?;
            write_records(&mut w, records.iter().flatten())
                .and_then(|_| w.flush())
                .with_context(|| format!("writing {out}"))
                .code(USAGE)
        }
        Command::Eval { gold, pred, docs } => {
            let gold_records = read_records(&gold)?;
            let pred_records = read_records(&pred)?;
            let mut report = eval_corpus(&gold_records, &pred_records).code(EVAL)?;
            if let Some(path) = docs {
                let kb = load_kb(&cli.kb)?;
                let rules = load_rules(cli.rules.as_deref(), &kb)?;
                let docs =
                    read_documents(&path.to_string_lossy(), InputFormat::Jsonl).code(USAGE)?;
                let words: usize = docs
                    .iter()
                    .map(|d| tokenize(&d.doc_id, &d.text).word_count())
                    .sum();
                let annotator = Annotator::new(&kb, &rules);
                let t = Instant::now();
                annotator.annotate_corpus_sequential(&docs);
                let secs = t.elapsed().as_secs_f64().max(1e-9);
                report.words_per_minute = Some(words as f64 / secs * 60.0);
            }
            println!("{}", serde_json::to_string_pretty(&report).code(USAGE)?);
            Ok(())
        }
    }
}

fn open_reader(path: &Path) -> anyhow::Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn kb_records(paths: &[PathBuf]) -> Result<Vec<(usize, propnames::kb::Record)>, Failure> {
    if paths.is_empty() {
        return parse_records(bundled::SAMPLE_KB.as_bytes()).code(LOAD);
    }
    let mut streams = Vec::new();
    for p in paths {
        let records = parse_records(open_reader(p).code(LOAD)?)
            .with_context(|| p.display().to_string())
            .code(LOAD)?;
        streams.push(records);
    }
    Ok(merge_record_streams(streams))
}

fn load_kb(paths: &[PathBuf]) -> Result<KnowledgeBase, Failure> {
    KnowledgeBase::from_records(kb_records(paths)?)
        .context("loading knowledge base")
        .code(LOAD)
}

fn load_rules(path: Option<&Path>, kb: &KnowledgeBase) -> Result<RulePack, Failure> {
    match path {
        None => bundled::default_rules(kb).code(LOAD),
        Some(p) => RulePack::load(open_reader(p).code(LOAD)?, kb)
            .with_context(|| p.display().to_string())
            .code(LOAD),
    }
}

fn validate(paths: &[PathBuf], rules: Option<&Path>) -> Result<(), Failure> {
    let kb = KnowledgeBase::from_records_lenient(kb_records(paths)?)
        .context("loading knowledge base")
        .code(LOAD)?;
    let report = kb.validate();
    if !report.is_empty() {
        return Err(Failure {
            code: LOAD,
            error: anyhow!("{} violation(s):\n{report}", report.violations.len()),
        });
    }
    if let Some(p) = rules {
        load_rules(Some(p), &kb)?;
    }
    println!("ok");
    Ok(())
}

fn read_records(path: &Path) -> Result<Vec<AnnotationRecord>, Failure> {
    let reader = open_reader(path).code(EVAL)?;
    read_jsonl(reader, &path.to_string_lossy())
        .map_err(|e: EvalError| anyhow!(e))
        .code(EVAL)
}

fn text_document(doc_id: String, bytes: Vec<u8>) -> anyhow::Result<InputDocument> {
    let text = String::from_utf8(bytes).map_err(|e| {
        anyhow!(
            "{doc_id}: input is not valid UTF-8 (first bad byte at offset {})",
            e.utf8_error().valid_up_to()
        )
    })?;
    Ok(InputDocument { doc_id, text })
}

fn jsonl_documents(bytes: &[u8], path: &str) -> anyhow::Result<Vec<InputDocument>> {
    Ok(read_jsonl(bytes, path)?)
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn is_jsonl_path(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("jsonl" | "ndjson")
    )
}

fn read_documents(input: &str, format: InputFormat) -> anyhow::Result<Vec<InputDocument>> {
    if input == "-" {
        let mut bytes = Vec::new();
        io::stdin()
            .lock()
            .read_to_end(&mut bytes)
            .context("reading stdin")?;
        let jsonl = match format {
            InputFormat::Auto => bytes.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'{'),
            f => f == InputFormat::Jsonl,
        };
        return if jsonl {
            jsonl_documents(&bytes, "stdin")
        } else {
            Ok(vec![text_document("stdin".into(), bytes)?])
        };
    }
    let path = Path::new(input);
    if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)
            .with_context(|| format!("reading directory {input}"))?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<_, _>>()?;
        files.retain(|p| p.is_file());
        files.sort();
        let mut docs = Vec::new();
        for f in files {
            docs.extend(read_file(&f, format)?);
        }
        return Ok(docs);
    }
    read_file(path, format)
}

fn read_file(path: &Path, format: InputFormat) -> anyhow::Result<Vec<InputDocument>> {
    let jsonl = match format {
        InputFormat::Auto => is_jsonl_path(path),
        f => f == InputFormat::Jsonl,
    };
    let mut bytes = Vec::new();
    open_reader(path)?.read_to_end(&mut bytes)?;
    if jsonl {
        jsonl_documents(&bytes, &path.to_string_lossy())
    } else {
        Ok(vec![text_document(file_name(path), bytes)?])
    }
}

fn open_output(out: &str) -> anyhow::Result<Box<dyn Write>> {
    if out == "-" {
        return Ok(Box::new(BufWriter::new(io::stdout().lock())));
    }
    let f = File::create(out).with_context(|| format!("creating {out}"))?;
    Ok(Box::new(BufWriter::new(f)))
}
