//! Serialization of evaluation reports: JSON, CSV (one row per model) and a
//! Markdown comparison table (one column per model).

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::str::FromStr;

use thiserror::Error;

use crate::metrics::EvalReport;
use crate::stats::{MetricTable, StatsError};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV row {row}: {message}")]
    BadRow { row: usize, message: String },
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "md" | "markdown" => Ok(OutputFormat::Markdown),
            other => Err(format!("unknown format `{other}` (expected json, csv or md)")),
        }
    }
}

/// How numbers are written in Markdown tables.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum NumberStyle {
    /// `256000`, `72.10`
    #[default]
    Plain,
    /// Turkish convention: `256.000`, `72,10`
    Turkish,
}

impl FromStr for NumberStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "plain" => Ok(NumberStyle::Plain),
            "tr" | "turkish" => Ok(NumberStyle::Turkish),
            other => Err(format!("unknown number style `{other}` (expected plain or tr)")),
        }
    }
}

impl NumberStyle {
    pub fn integer(self, n: u64) -> String {
        let digits = n.to_string();
        match self {
            NumberStyle::Plain => digits,
            NumberStyle::Turkish => group_thousands(&digits, '.'),
        }
    }

    pub fn decimal(self, v: f64, places: usize) -> String {
        let s = format!("{v:.places$}");
        match self {
            NumberStyle::Plain => s,
            NumberStyle::Turkish => {
                let (int, frac) = s.split_once('.').unwrap_or((&s, ""));
                let (sign, int) = int.strip_prefix('-').map_or(("", int), |i| ("-", i));
                let int = group_thousands(int, '.');
                if frac.is_empty() {
                    format!("{sign}{int}")
                } else {
                    format!("{sign}{int},{frac}")
                }
            }
        }
    }

    /// Parses a number written by [`NumberStyle::integer`] or [`NumberStyle::decimal`].
    pub fn parse(self, s: &str) -> Option<f64> {
        let normalized = match self {
            NumberStyle::Plain => s.to_string(),
            NumberStyle::Turkish => s.replace('.', "").replace(',', "."),
        };
        normalized.parse().ok()
    }
}

fn group_thousands(digits: &str, sep: char) -> String {
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(sep);
        }
        out.push(c);
    }
    out
}

fn score_names(reports: &[EvalReport]) -> Vec<String> {
    reports
        .iter()
        .flat_map(|r| r.external_scores.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

const COUNT_COLUMNS: [&str; 2] = ["vocab_size", "total_tokens"];
const TAIL_COLUMNS: [&str; 5] = [
    "processing_time_s",
    "unique_tokens",
    "pct_tr",
    "pct_pure",
    "fertility",
];

/// CSV header: model, parameters, external scores, then measured metrics
/// in benchmark-table order.
pub fn csv_header(reports: &[EvalReport]) -> Vec<String> {
    let mut header = vec!["model_name".to_string(), "params_b".to_string()];
    header.extend(score_names(reports));
    header.extend(COUNT_COLUMNS.iter().map(|s| s.to_string()));
    header.extend(TAIL_COLUMNS.iter().map(|s| s.to_string()));
    header
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(reports: &[EvalReport], writer: W) -> Result<(), ReportError> {
    let scores = score_names(reports);
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(csv_header(reports))?;
    for r in reports {
        let mut row = vec![r.model_name.clone(), opt(r.params_b)];
        row.extend(scores.iter().map(|s| opt(r.external_scores.get(s).copied())));
        row.push(r.vocab_size.to_string());
        row.push(r.total_tokens.to_string());
        row.push(r.processing_time_s.to_string());
        row.push(r.unique_tokens.to_string());
        row.push(r.pct_tr.to_string());
        row.push(r.pct_pure.to_string());
        row.push(opt(r.fertility));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<EvalReport>, ReportError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let fixed: BTreeSet<&str> = ["model_name", "params_b"]
        .into_iter()
        .chain(COUNT_COLUMNS)
        .chain(TAIL_COLUMNS)
        .collect();
    let mut reports = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record?;
        let row = idx + 2;
        let cell = |name: &str| {
            header
                .iter()
                .position(|h| h == name)
                .and_then(|i| record.get(i))
                .map(str::trim)
                .filter(|s| !s.is_empty())
        };
        let bad = |name: &str, v: &str| ReportError::BadRow {
            row,
            message: format!("{name}: cannot parse `{v}`"),
        };
        let float = |name: &str| -> Result<Option<f64>, ReportError> {
            cell(name).map(|v| v.parse().map_err(|_| bad(name, v))).transpose()
        };
        let count = |name: &str| -> Result<u64, ReportError> {
            let v = cell(name).ok_or_else(|| ReportError::BadRow {
                row,
                message: format!("missing {name}"),
            })?;
            v.parse().map_err(|_| bad(name, v))
        };
        let mut external_scores = std::collections::BTreeMap::new();
        for name in header.iter().filter(|h| !fixed.contains(h.as_str())) {
            if let Some(v) = float(name)? {
                external_scores.insert(name.clone(), v);
            }
        }
        reports.push(EvalReport {
            model_name: cell("model_name").unwrap_or_default().to_string(),
            params_b: float("params_b")?,
            external_scores,
            vocab_size: count("vocab_size")?,
            total_tokens: count("total_tokens")?,
            unique_tokens: count("unique_tokens")?,
            processing_time_s: float("processing_time_s")?.unwrap_or(0.0),
            pct_tr: float("pct_tr")?.unwrap_or(0.0),
            pct_pure: float("pct_pure")?.unwrap_or(0.0),
            fertility: float("fertility")?,
        });
    }
    Ok(reports)
}

pub fn to_json(reports: &[EvalReport]) -> Result<String, ReportError> {
    Ok(if let [single] = reports {
        serde_json::to_string_pretty(single)?
    } else {
        serde_json::to_string_pretty(reports)?
    })
}

/// Numeric columns in CSV order, skipping any with a missing value.
pub fn metric_table(reports: &[EvalReport]) -> Result<MetricTable, ReportError> {
    let mut buf = Vec::new();
    write_csv(reports, &mut buf)?;
    Ok(MetricTable::from_csv(buf.as_slice(), &[])?)
}

/// Row label of an external score column.
pub fn score_label(name: &str) -> String {
    format!("{} Score (%)", name.to_uppercase())
}

/// Benchmark-table layout: metrics as rows, models as columns.
pub fn markdown_table(reports: &[EvalReport], style: NumberStyle) -> String {
    let dash = || "-".to_string();
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    let each = |f: &dyn Fn(&EvalReport) -> String| reports.iter().map(f).collect::<Vec<_>>();

    rows.push((
        "Model Parameters (B)".into(),
        each(&|r| r.params_b.map_or_else(dash, |p| style.decimal(p, 1))),
    ));
    for name in score_names(reports) {
        rows.push((
            score_label(&name),
            each(&|r| {
                r.external_scores
                    .get(&name)
                    .map_or_else(dash, |v| style.decimal(*v, 2))
            }),
        ));
    }
    rows.push(("Vocabulary Size".into(), each(&|r| style.integer(r.vocab_size))));
    rows.push(("Token Count".into(), each(&|r| style.integer(r.total_tokens))));
    rows.push((
        "Processing Time (s)".into(),
        each(&|r| style.decimal(r.processing_time_s, 2)),
    ));
    rows.push(("Unique Token Count".into(), each(&|r| style.integer(r.unique_tokens))));
    rows.push(("TR %".into(), each(&|r| style.decimal(r.pct_tr, 2))));
    rows.push(("Pure %".into(), each(&|r| style.decimal(r.pct_pure, 2))));
    rows.push((
        "Fertility".into(),
        each(&|r| r.fertility.map_or_else(dash, |f| style.decimal(f, 3))),
    ));

    let mut out = String::from("| Metric |");
    for r in reports {
        out.push_str(&format!(" {} |", r.model_name));
    }
    out.push_str("\n|---|");
    out.push_str(&"---:|".repeat(reports.len()));
    out.push('\n');
    for (label, cells) in rows {
        out.push_str(&format!("| {label} |"));
        for c in cells {
            out.push_str(&format!(" {c} |"));
        }
        out.push('\n');
    }
    out
}

/// Splits a Markdown table into `(row label, cells)` pairs, header included.
pub fn parse_markdown_table(md: &str) -> Vec<(String, Vec<String>)> {
    md.lines()
        .filter(|l| l.starts_with('|') && !l.starts_with("|---"))
        .map(|l| {
            let mut cells = l
                .trim()
                .trim_matches('|')
                .split('|')
                .map(|c| c.trim().to_string());
            let label = cells.next().unwrap_or_default();
            (label, cells.collect())
        })
        .collect()
}

pub fn render(
    reports: &[EvalReport],
    format: OutputFormat,
    style: NumberStyle,
) -> Result<String, ReportError> {
    Ok(match format {
        OutputFormat::Json => to_json(reports)? + "\n",
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            write_csv(reports, &mut buf)?;
            String::from_utf8(buf).expect("CSV output is UTF-8")
        }
        OutputFormat::Markdown => markdown_table(reports, style),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn report() -> EvalReport {
        EvalReport {
            model_name: "gemma-2".into(),
            params_b: Some(27.2),
            external_scores: BTreeMap::from([("mmlu".to_string(), 72.10)]),
            vocab_size: 256_000,
            total_tokens: 497_015,
            unique_tokens: 6383,
            processing_time_s: 2.95,
            pct_tr: 48.63,
            pct_pure: 37.05,
            fertility: None,
        }
    }

    #[test]
    fn number_styles() {
        assert_eq!(NumberStyle::Turkish.integer(256_000), "256.000");
        assert_eq!(NumberStyle::Turkish.integer(6383), "6.383");
        assert_eq!(NumberStyle::Turkish.integer(999), "999");
        assert_eq!(NumberStyle::Turkish.decimal(72.10, 2), "72,10");
        assert_eq!(NumberStyle::Turkish.decimal(1234.5, 1), "1.234,5");
        assert_eq!(NumberStyle::Turkish.decimal(-0.93, 2), "-0,93");
        assert_eq!(NumberStyle::Plain.decimal(2.95, 2), "2.95");
        assert_eq!(NumberStyle::Turkish.parse("1.605.376"), Some(1_605_376.0));
        assert_eq!(NumberStyle::Turkish.parse("72,10"), Some(72.10));
    }

    #[test]
    fn csv_column_order() {
        assert_eq!(
            csv_header(&[report()]),
            [
                "model_name",
                "params_b",
                "mmlu",
                "vocab_size",
                "total_tokens",
                "processing_time_s",
                "unique_tokens",
                "pct_tr",
                "pct_pure",
                "fertility"
            ]
        );
    }

    #[test]
    fn csv_roundtrip() {
        let mut r2 = report();
        r2.model_name = "other".into();
        r2.params_b = None;
        r2.external_scores.clear();
        r2.fertility = Some(2.5078);
        let reports = vec![report(), r2];
        let mut buf = Vec::new();
        write_csv(&reports, &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), reports);
    }

    #[test]
    fn json_field_names() {
        let v: serde_json::Value = serde_json::from_str(&to_json(&[report()]).unwrap()).unwrap();
        let keys: BTreeSet<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(
            keys,
            BTreeSet::from([
                "model_name",
                "params_b",
                "external_scores",
                "vocab_size",
                "total_tokens",
                "unique_tokens",
                "processing_time_s",
                "pct_tr",
                "pct_pure",
                "fertility"
            ])
        );
    }

    #[test]
    fn markdown_rows() {
        let md = markdown_table(&[report()], NumberStyle::Turkish);
        let rows = parse_markdown_table(&md);
        let labels: Vec<&str> = rows.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(
            labels,
            [
                "Metric",
                "Model Parameters (B)",
                "MMLU Score (%)",
                "Vocabulary Size",
                "Token Count",
                "Processing Time (s)",
                "Unique Token Count",
                "TR %",
                "Pure %",
                "Fertility"
            ]
        );
        assert_eq!(rows[3].1, ["256.000"]);
        assert_eq!(rows[8].1, ["37,05"]);
        assert_eq!(rows[9].1, ["-"]);
    }
}
