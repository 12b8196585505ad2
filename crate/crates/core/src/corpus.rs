//! Corpus ingestion (JSONL records or plain text files) and corpus-level counts.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed JSON record: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: missing field `{field}`")]
    MissingField {
        path: PathBuf,
        line: usize,
        field: String,
    },
    #[error("{path}:{line}: field `{field}` is not a string")]
    NonStringField {
        path: PathBuf,
        line: usize,
        field: String,
    },
    #[error("{path}: file is not valid UTF-8")]
    InvalidUtf8 { path: PathBuf },
    #[error("unknown corpus format `{0}` (expected jsonl or plain)")]
    UnknownFormat(String),
    #[error("no text fields requested")]
    NoTextFields,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    Plain,
}

impl CorpusFormat {
    /// `.jsonl`/`.ndjson` files are JSONL, everything else is plain text.
    pub fn infer(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") => CorpusFormat::Jsonl,
            _ => CorpusFormat::Plain,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "plain" | "txt" => Ok(CorpusFormat::Plain),
            other => Err(CorpusError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
}

/// An ordered, immutable collection of documents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
}

impl Corpus {
    /// Builds an in-memory corpus; ids are the document positions.
    pub fn from_texts<I, S>(texts: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let documents = texts
            .into_iter()
            .enumerate()
            .map(|(i, t)| Document {
                id: (i + 1).to_string(),
                text: t.into(),
            })
            .collect();
        Corpus { documents }
    }

    pub fn from_documents(documents: Vec<Document>) -> Self {
        Corpus { documents }
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn stats(&self) -> CorpusStats {
        corpus_stats(self)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub document_count: u64,
    /// Unicode scalar values, not bytes.
    pub char_count: u64,
    /// Maximal runs of non-whitespace.
    pub word_count: u64,
}

impl std::ops::Add for CorpusStats {
    type Output = CorpusStats;

    fn add(self, rhs: CorpusStats) -> CorpusStats {
        CorpusStats {
            document_count: self.document_count + rhs.document_count,
            char_count: self.char_count + rhs.char_count,
            word_count: self.word_count + rhs.word_count,
        }
    }
}

pub fn text_stats(text: &str) -> CorpusStats {
    CorpusStats {
        document_count: 1,
        char_count: text.chars().count() as u64,
        word_count: text.split_whitespace().count() as u64,
    }
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    corpus
        .documents
        .iter()
        .map(|d| text_stats(&d.text))
        .fold(CorpusStats::default(), |acc, s| acc + s)
}

/// Loads a corpus. JSONL documents join the requested string fields with a
/// single newline; an empty `text_fields` selects `["text"]`. A plain-text
/// path yields one document; a directory yields one document per regular
/// file, in file-name order.
pub fn load_corpus(
    path: &Path,
    format: CorpusFormat,
    text_fields: &[String],
) -> Result<Corpus, CorpusError> {
    match format {
        CorpusFormat::Jsonl => {
            let default = ["text".to_string()];
            let fields = if text_fields.is_empty() {
                &default[..]
            } else {
                text_fields
            };
            load_jsonl(path, fields)
        }
        CorpusFormat::Plain => load_plain(path),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn load_jsonl(path: &Path, fields: &[String]) -> Result<Corpus, CorpusError> {
    if fields.is_empty() {
        return Err(CorpusError::NoTextFields);
    }
    let file = fs::File::open(path).map_err(io_err(path))?;
    let reader = BufReader::new(file);
    let mut documents = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => CorpusError::Malformed {
                path: path.to_path_buf(),
                line: line_no,
                message: "invalid UTF-8".to_string(),
            },
            _ => CorpusError::Io {
                path: path.to_path_buf(),
                source: e,
            },
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Value = serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
            path: path.to_path_buf(),
            line: line_no,
            message: e.to_string(),
        })?;
        let object = record.as_object().ok_or_else(|| CorpusError::Malformed {
            path: path.to_path_buf(),
            line: line_no,
            message: "record is not a JSON object".to_string(),
        })?;

        let mut parts = Vec::with_capacity(fields.len());
        for field in fields {
            match object.get(field) {
                None => {
                    return Err(CorpusError::MissingField {
                        path: path.to_path_buf(),
                        line: line_no,
                        field: field.clone(),
                    })
                }
                Some(Value::String(s)) => parts.push(s.as_str()),
                Some(_) => {
                    return Err(CorpusError::NonStringField {
                        path: path.to_path_buf(),
                        line: line_no,
                        field: field.clone(),
                    })
                }
            }
        }
        documents.push(Document {
            id: format!("line {line_no}"),
            text: parts.join("\n"),
        });
    }
    Ok(Corpus { documents })
}

fn load_plain(path: &Path) -> Result<Corpus, CorpusError> {
    let meta = fs::metadata(path).map_err(io_err(path))?;
    let files = if meta.is_dir() {
        let mut files = fs::read_dir(path)
            .map_err(io_err(path))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect::<Vec<_>>();
        files.sort();
        files
    } else {
        vec![path.to_path_buf()]
    };

    let mut documents = Vec::with_capacity(files.len());
    for file in files {
        let bytes = fs::read(&file).map_err(io_err(&file))?;
        let text =
            String::from_utf8(bytes).map_err(|_| CorpusError::InvalidUtf8 { path: file.clone() })?;
        documents.push(Document {
            id: file.display().to_string(),
            text,
        });
    }
    Ok(Corpus { documents })
}
