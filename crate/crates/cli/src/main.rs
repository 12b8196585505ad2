//! `tokeval` command-line front end.
//!
//! Exit status: 0 on success, 1 on bad input (one-line diagnostic on
//! stderr), 2 when a computed result violates an internal invariant.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use tokeval::compare::{run_comparison, ComparisonConfig};
use tokeval::corpus::CorpusStats;
use tokeval::metrics::{evaluate_tokenizer, fertility, EvalOptions, EvalReport, ModelInfo, Weighting};
use tokeval::plot::{heatmap_svg, scatter_svg, ScatterSpec};
use tokeval::report::{metric_table, render, NumberStyle, OutputFormat};
use tokeval::stats::{correlation_matrix, rank_models, MetricTable};
use tokeval::validator::{MorphValidator, PurityMode, TokenValidator};
use tokeval::{load_corpus, load_tokenizer, CorpusFormat, TABLE1_FIXTURE};

#[derive(Debug, Parser)]
#[command(name = "tokeval", version, about = "Evaluate subword tokenizers on Turkish text")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Root lexicon TSV (form, category, soft_final). Bundled if omitted.
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    /// Affix inventory TSV (allomorph, morpheme, slot, harmony, attaches_to).
    #[arg(long, global = true)]
    affixes: Option<PathBuf>,
    /// Whole-word list, one word per line.
    #[arg(long, global = true)]
    wordlist: Option<PathBuf>,
    /// Percentage denominator weighting: unique or frequency.
    #[arg(long, global = true)]
    weighting: Option<Weighting>,
    /// Purity predicate: single or extended.
    #[arg(long, global = true)]
    purity_mode: Option<PurityMode>,
    /// Drop tokens with non-letter surfaces from percentage denominators.
    #[arg(long, global = true)]
    letters_only: bool,
    /// JSONL fields concatenated into each document.
    #[arg(long, global = true, value_delimiter = ',')]
    text_fields: Vec<String>,
    /// Output format: json, csv or md.
    #[arg(long, global = true)]
    format: Option<OutputFormat>,
    /// Number style in Markdown tables: plain or tr.
    #[arg(long, global = true, default_value = "plain")]
    numbers: NumberStyle,
    /// Output file; stdout if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one tokenizer over a corpus.
    Evaluate(EvaluateArgs),
    /// Evaluate every entry of a comparison config.
    Compare(CompareArgs),
    /// Pearson correlation matrix over a metrics table.
    Correlate(CorrelateArgs),
    /// Scatter plot of two metrics with size- and color-encoded markers.
    Scatter(ScatterArgs),
    /// Print every segmentation of each word.
    Segment { words: Vec<String> },
    /// Print the (valid word, pure morph) verdicts of each token.
    CheckToken { tokens: Vec<String> },
    /// Document, character and word counts of a corpus.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct CorpusArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// jsonl or plain; inferred from the extension if omitted.
    #[arg(long)]
    corpus_format: Option<CorpusFormat>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    tokenizer: PathBuf,
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Model name in the report; the tokenizer file stem if omitted.
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    params_b: Option<f64>,
    /// External score, e.g. `mmlu=72.10`. Repeatable.
    #[arg(long = "score", value_parser = parse_score)]
    scores: Vec<(String, f64)>,
    /// Encode documents in parallel (timing is then not comparable).
    #[arg(long)]
    parallel: bool,
}

#[derive(Debug, Args)]
struct CompareArgs {
    config: PathBuf,
    /// Also write the merged metrics table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also write the reports as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TableInput {
    /// Metrics CSV (first column model names) or comparison config JSON.
    #[arg(required_unless_present = "bundled_table")]
    table: Option<PathBuf>,
    /// Use the bundled benchmark table instead of a file.
    #[arg(long, conflicts_with = "table")]
    bundled_table: bool,
}

#[derive(Debug, Args)]
struct CorrelateArgs {
    #[command(flatten)]
    input: TableInput,
    /// Restrict to these columns, in this order.
    #[arg(long, value_delimiter = ',')]
    columns: Vec<String>,
    /// Also write an annotated SVG heat map.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Also write the matrix as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long, default_value = "Correlation Matrix")]
    title: String,
    /// Print the model ranking by this column to stderr.
    #[arg(long)]
    rank_by: Option<String>,
}

#[derive(Debug, Args)]
struct ScatterArgs {
    #[command(flatten)]
    input: TableInput,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    /// Marker area proportional to this column.
    #[arg(long)]
    size: Option<String>,
    /// Marker fill ramp over this column.
    #[arg(long)]
    color: Option<String>,
    #[arg(long, default_value = "Model Comparison")]
    title: String,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
}

fn parse_score(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let value = value
        .parse()
        .map_err(|_| format!("score `{name}`: `{value}` is not a number"))?;
    Ok((name.to_string(), value))
}

/// A computed result failed its own consistency checks.
#[derive(Debug)]
struct InvariantViolation(String);

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invariant violated: {}", self.0)
    }
}

impl std::error::Error for InvariantViolation {}

fn invariant(check: Result<(), String>) -> Result<()> {
    check.map_err(|m| InvariantViolation(m).into())
}

impl Global {
    fn validator(&self) -> Result<MorphValidator> {
        let v = match (&self.lexicon, &self.affixes) {
            (Some(l), Some(a)) => MorphValidator::load(l, a, self.wordlist.as_deref())?,
            (None, None) if self.wordlist.is_none() => MorphValidator::bundled(),
            _ => bail!("--lexicon and --affixes must be given together"),
        };
        Ok(v.with_purity_mode(self.purity_mode.unwrap_or_default()))
    }

    fn options(&self, base: EvalOptions) -> EvalOptions {
        EvalOptions {
            weighting: self.weighting.unwrap_or(base.weighting),
            letters_only: self.letters_only || base.letters_only,
            parallel: base.parallel,
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => write_file(path, text),
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("{}: cannot write", path.display()))
}

fn corpus_format(args: &CorpusArgs) -> CorpusFormat {
    args.corpus_format
        .unwrap_or_else(|| CorpusFormat::infer(&args.corpus))
}

fn check_reports(reports: &[EvalReport]) -> Result<()> {
    for r in reports {
        invariant(r.check_invariants())?;
    }
    Ok(())
}

fn evaluate(g: &Global, args: &EvaluateArgs) -> Result<()> {
    let model = load_tokenizer(&args.tokenizer)?;
    let corpus = load_corpus(&args.corpus.corpus, corpus_format(&args.corpus), &g.text_fields)?;
    let validator = g.validator()?;
    let name = args.name.clone().unwrap_or_else(|| {
        args.tokenizer
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let info = ModelInfo {
        name,
        params_b: args.params_b,
        external_scores: args.scores.iter().cloned().collect::<BTreeMap<_, _>>(),
    };
    let options = g.options(EvalOptions {
        parallel: args.parallel,
        ..EvalOptions::default()
    });
    let report = evaluate_tokenizer(&model, &corpus, &validator, &info, &options)?;
    check_reports(std::slice::from_ref(&report))?;
    g.emit(&render(&[report], g.format.unwrap_or(OutputFormat::Json), g.numbers)?)
}

fn compare(g: &Global, args: &CompareArgs) -> Result<()> {
    let mut config = ComparisonConfig::load(&args.config)?;
    if !g.text_fields.is_empty() {
        config.text_fields = g.text_fields.clone();
    }
    let validator = if g.lexicon.is_some() || g.affixes.is_some() || g.wordlist.is_some() {
        g.validator()?
    } else {
        let v = config.validator()?;
        match g.purity_mode {
            Some(mode) => v.with_purity_mode(mode),
            None => v,
        }
    };
    let options = g.options(config.eval_options()?);
    let mut reports = run_comparison(&config, Some(&validator), Some(&options))?;
    if let Some(stats) = config.corpus_stats {
        fill_fertility(&mut reports, stats)?;
    }
    check_reports(&reports)?;
    if let Some(path) = &args.csv {
        write_file(path, &render(&reports, OutputFormat::Csv, g.numbers)?)?;
    }
    if let Some(path) = &args.json {
        write_file(path, &render(&reports, OutputFormat::Json, g.numbers)?)?;
    }
    g.emit(&render(&reports, g.format.unwrap_or(OutputFormat::Markdown), g.numbers)?)
}

/// Pre-filled entries without fertility get it from the published counts.
fn fill_fertility(reports: &mut [EvalReport], stats: CorpusStats) -> Result<()> {
    for r in reports.iter_mut().filter(|r| r.fertility.is_none()) {
        r.fertility = Some(fertility(r.total_tokens, stats.word_count)?);
    }
    Ok(())
}

fn load_table(input: &TableInput) -> Result<MetricTable> {
    let config = match &input.table {
        None => ComparisonConfig::from_json(TABLE1_FIXTURE)?,
        Some(path) if path.extension().is_some_and(|e| e == "json") => {
            ComparisonConfig::load(path)?
        }
        Some(path) => {
            let file = fs::File::open(path).with_context(|| format!("{}", path.display()))?;
            return MetricTable::from_csv(file, &[])
                .with_context(|| format!("{}", path.display()));
        }
    };
    Ok(metric_table(&run_comparison(&config, None, None)?)?)
}

fn correlate(g: &Global, args: &CorrelateArgs) -> Result<()> {
    let mut table = load_table(&args.input)?;
    if !args.columns.is_empty() {
        let names: Vec<&str> = args.columns.iter().map(String::as_str).collect();
        table = table.select(&names)?;
    }
    if let Some(key) = &args.rank_by {
        eprintln!("{}", rank_models(&table, key)?.join(" > "));
    }
    let matrix = correlation_matrix(&table)?;
    invariant(matrix.check_invariants())?;
    if let Some(path) = &args.svg {
        write_file(path, &heatmap_svg(&matrix, &args.title))?;
    }
    let json = serde_json::to_string_pretty(&matrix)? + "\n";
    if let Some(path) = &args.json {
        write_file(path, &json)?;
    }
    match g.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Json => g.emit(&json),
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            matrix.write_csv(&mut buf)?;
            g.emit(&String::from_utf8(buf)?)
        }
        OutputFormat::Markdown => g.emit(&matrix_markdown(&matrix, g.numbers)),
    }
}

fn matrix_markdown(m: &tokeval::CorrelationMatrix, style: NumberStyle) -> String {
    let mut out = String::from("| |");
    for l in &m.labels {
        out.push_str(&format!(" {l} |"));
    }
    out.push_str("\n|---|");
    out.push_str(&"---:|".repeat(m.labels.len()));
    out.push('\n');
    for (label, row) in m.labels.iter().zip(&m.r) {
        out.push_str(&format!("| {label} |"));
        for v in row {
            out.push_str(&format!(" {} |", style.decimal(*v, 2)));
        }
        out.push('\n');
    }
    out
}

fn scatter(g: &Global, args: &ScatterArgs) -> Result<()> {
    let table = load_table(&args.input)?;
    let spec = ScatterSpec {
        x: &args.x,
        y: &args.y,
        size: args.size.as_deref(),
        color: args.color.as_deref(),
        title: &args.title,
    };
    g.emit(&scatter_svg(&table, &spec)?)
}

fn segment(g: &Global, words: &[String]) -> Result<()> {
    let v = g.validator()?;
    let mut out = String::new();
    for word in words {
        let parses = v.segment(word);
        if parses.is_empty() {
            out.push_str(&format!("{word}: no segmentation\n"));
        }
        for p in parses {
            out.push_str(&format!("{p}\n"));
        }
    }
    g.emit(&out)
}

fn check_token(g: &Global, tokens: &[String]) -> Result<()> {
    let v = g.validator()?;
    let mut out = String::new();
    for token in tokens {
        if tokens.len() > 1 {
            out.push_str(&format!("{token} "));
        }
        out.push_str(&format!(
            "tr={} pure={}\n",
            v.is_valid_word(token),
            v.is_pure_token(token)
        ));
    }
    g.emit(&out)
}

fn stats(g: &Global, args: &StatsArgs) -> Result<()> {
    let corpus = load_corpus(&args.corpus.corpus, corpus_format(&args.corpus), &g.text_fields)?;
    let s = corpus.stats();
    let text = match g.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => serde_json::to_string_pretty(&s)? + "\n",
        OutputFormat::Csv => format!(
            "document_count,char_count,word_count\n{},{},{}\n",
            s.document_count, s.char_count, s.word_count
        ),
        OutputFormat::Markdown => format!(
            "| Documents | Characters | Words |\n|---:|---:|---:|\n| {} | {} | {} |\n",
            g.numbers.integer(s.document_count),
            g.numbers.integer(s.char_count),
            g.numbers.integer(s.word_count)
        ),
    };
    g.emit(&text)
}

fn run(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Evaluate(a) => evaluate(g, a),
        Command::Compare(a) => compare(g, a),
        Command::Correlate(a) => correlate(g, a),
        Command::Scatter(a) => scatter(g, a),
        Command::Segment { words } if words.is_empty() => Err(anyhow!("no words given")),
        Command::Segment { words } => segment(g, words),
        Command::CheckToken { tokens } if tokens.is_empty() => Err(anyhow!("no tokens given")),
        Command::CheckToken { tokens } => check_token(g, tokens),
        Command::Stats(a) => stats(g, a),
    }
}

/// Error chain on one line; causes already quoted by their parent are dropped.
fn diagnostic(e: &anyhow::Error) -> String {
    let mut line = String::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if !line.contains(&msg) {
            if !line.is_empty() {
                line.push_str(": ");
            }
            line.push_str(&msg);
        }
    }
    line.replace('\n', " ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tokeval: {}", diagnostic(&e));
            if e.downcast_ref::<InvariantViolation>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
