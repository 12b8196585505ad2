//! Multi-tokenizer comparison driven by a JSON config.
//!
//! Each entry either names a tokenizer file to evaluate over the shared
//! corpus, or carries pre-filled `metrics` (used for published results that
//! cannot be recomputed locally). Relative paths resolve against the config
//! file's directory.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::corpus::{load_corpus, CorpusError, CorpusFormat, CorpusStats};
use crate::metrics::{evaluate_tokenizer, EvalOptions, EvalReport, MetricsError, ModelInfo, Weighting};
use crate::tokenizer::{load_tokenizer, TokenizerError};
use crate::validator::{MorphValidator, PurityMode, ResourceError};

#[derive(Debug, Error)]
pub enum CompareError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid config: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("config has no entries")]
    NoEntries,
    #[error("duplicate entry name `{0}`")]
    DuplicateName(String),
    #[error("entry `{0}` needs exactly one of `tokenizer` or `metrics`")]
    EntrySource(String),
    #[error("file not found: {0}")]
    MissingFile(PathBuf),
    #[error("config needs a `corpus` to evaluate tokenizers")]
    NoCorpus,
    #[error("invalid option: {0}")]
    Option(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error("entry `{name}`: {source}")]
    Tokenizer {
        name: String,
        #[source]
        source: TokenizerError,
    },
    #[error("entry `{name}`: {source}")]
    Metrics {
        name: String,
        #[source]
        source: MetricsError,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrefilledMetrics {
    pub vocab_size: u64,
    pub total_tokens: u64,
    pub unique_tokens: u64,
    pub processing_time_s: f64,
    pub pct_tr: f64,
    pub pct_pure: f64,
    #[serde(default)]
    pub fertility: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonEntry {
    pub name: String,
    #[serde(default)]
    pub tokenizer: Option<PathBuf>,
    #[serde(default)]
    pub params_b: Option<f64>,
    #[serde(default)]
    pub external_scores: BTreeMap<String, f64>,
    #[serde(default)]
    pub metrics: Option<PrefilledMetrics>,
}

impl ComparisonEntry {
    pub fn info(&self) -> ModelInfo {
        ModelInfo {
            name: self.name.clone(),
            params_b: self.params_b,
            external_scores: self.external_scores.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOptions {
    #[serde(default)]
    pub weighting: Option<String>,
    #[serde(default)]
    pub purity_mode: Option<String>,
    #[serde(default)]
    pub letters_only: Option<bool>,
    #[serde(default)]
    pub parallel: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonConfig {
    #[serde(default)]
    pub version: Option<u32>,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub corpus: Option<PathBuf>,
    #[serde(default)]
    pub corpus_format: Option<String>,
    #[serde(default)]
    pub text_fields: Vec<String>,
    /// Published corpus counts for pre-filled entries.
    #[serde(default)]
    pub corpus_stats: Option<CorpusStats>,
    #[serde(default)]
    pub lexicon: Option<PathBuf>,
    #[serde(default)]
    pub affixes: Option<PathBuf>,
    #[serde(default)]
    pub wordlist: Option<PathBuf>,
    #[serde(default)]
    pub options: ConfigOptions,
    pub entries: Vec<ComparisonEntry>,
}

fn resolve(base: &Path, p: &mut Option<PathBuf>) {
    if let Some(path) = p {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
}

fn require(path: &Option<PathBuf>) -> Result<(), CompareError> {
    match path {
        Some(p) if !p.exists() => Err(CompareError::MissingFile(p.clone())),
        _ => Ok(()),
    }
}

impl ComparisonConfig {
    pub fn load(path: &Path) -> Result<Self, CompareError> {
        let text = fs::read_to_string(path).map_err(|source| CompareError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config: ComparisonConfig =
            serde_json::from_str(&text).map_err(|source| CompareError::Json {
                path: path.to_path_buf(),
                source,
            })?;
        let base = path.parent().unwrap_or(Path::new("."));
        resolve(base, &mut config.corpus);
        resolve(base, &mut config.lexicon);
        resolve(base, &mut config.affixes);
        resolve(base, &mut config.wordlist);
        for e in &mut config.entries {
            resolve(base, &mut e.tokenizer);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_json(json: &str) -> Result<Self, CompareError> {
        let config: ComparisonConfig =
            serde_json::from_str(json).map_err(|source| CompareError::Json {
                path: PathBuf::from("<inline>"),
                source,
            })?;
        config.validate()?;
        Ok(config)
    }

    /// Names unique, one metric source per entry, referenced files present.
    pub fn validate(&self) -> Result<(), CompareError> {
        if self.entries.is_empty() {
            return Err(CompareError::NoEntries);
        }
        let mut names = HashSet::new();
        for e in &self.entries {
            if !names.insert(e.name.as_str()) {
                return Err(CompareError::DuplicateName(e.name.clone()));
            }
            if e.tokenizer.is_some() == e.metrics.is_some() {
                return Err(CompareError::EntrySource(e.name.clone()));
            }
            require(&e.tokenizer)?;
        }
        if self.needs_corpus() && self.corpus.is_none() {
            return Err(CompareError::NoCorpus);
        }
        for p in [&self.corpus, &self.lexicon, &self.affixes, &self.wordlist] {
            require(p)?;
        }
        Ok(())
    }

    pub fn needs_corpus(&self) -> bool {
        self.entries.iter().any(|e| e.tokenizer.is_some())
    }

    pub fn eval_options(&self) -> Result<EvalOptions, CompareError> {
        let weighting = match &self.options.weighting {
            Some(w) => w.parse().map_err(CompareError::Option)?,
            None => Weighting::Unique,
        };
        Ok(EvalOptions {
            weighting,
            letters_only: self.options.letters_only.unwrap_or(false),
            parallel: self.options.parallel.unwrap_or(false),
        })
    }

    pub fn purity_mode(&self) -> Result<PurityMode, CompareError> {
        match &self.options.purity_mode {
            Some(m) => m.parse().map_err(CompareError::Option),
            None => Ok(PurityMode::Single),
        }
    }

    /// Validator from the config's resources; bundled resources otherwise.
    pub fn validator(&self) -> Result<MorphValidator, CompareError> {
        let v = match (&self.lexicon, &self.affixes) {
            (Some(l), Some(a)) => MorphValidator::load(l, a, self.wordlist.as_deref())?,
            _ => MorphValidator::bundled(),
        };
        Ok(v.with_purity_mode(self.purity_mode()?))
    }
}

fn prefilled_report(entry: &ComparisonEntry, m: &PrefilledMetrics) -> EvalReport {
    EvalReport {
        model_name: entry.name.clone(),
        params_b: entry.params_b,
        external_scores: entry.external_scores.clone(),
        vocab_size: m.vocab_size,
        total_tokens: m.total_tokens,
        unique_tokens: m.unique_tokens,
        processing_time_s: m.processing_time_s,
        pct_tr: m.pct_tr,
        pct_pure: m.pct_pure,
        fertility: m.fertility,
    }
}

/// One report per entry, in config order. `validator` and `options`
/// override what the config specifies.
pub fn run_comparison(
    config: &ComparisonConfig,
    validator: Option<&MorphValidator>,
    options: Option<&EvalOptions>,
) -> Result<Vec<EvalReport>, CompareError> {
    config.validate()?;
    let corpus = match (&config.corpus, config.needs_corpus()) {
        (Some(path), true) => {
            let format = match &config.corpus_format {
                Some(f) => f.parse()?,
                None => CorpusFormat::infer(path),
            };
            Some(load_corpus(path, format, &config.text_fields)?)
        }
        _ => None,
    };
    let owned_validator;
    let validator = match validator {
        Some(v) => v,
        None => {
            owned_validator = config.validator()?;
            &owned_validator
        }
    };
    let options = match options {
        Some(o) => *o,
        None => config.eval_options()?,
    };

    let mut reports = Vec::with_capacity(config.entries.len());
    for entry in &config.entries {
        let report = match (&entry.tokenizer, &entry.metrics) {
            (_, Some(m)) => prefilled_report(entry, m),
            (Some(path), None) => {
                let model = load_tokenizer(path).map_err(|source| CompareError::Tokenizer {
                    name: entry.name.clone(),
                    source,
                })?;
                let corpus = corpus.as_ref().ok_or(CompareError::NoCorpus)?;
                evaluate_tokenizer(&model, corpus, validator, &entry.info(), &options).map_err(
                    |source| CompareError::Metrics {
                        name: entry.name.clone(),
                        source,
                    },
                )?
            }
            (None, None) => return Err(CompareError::EntrySource(entry.name.clone())),
        };
        reports.push(report);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_entries_rejected() {
        assert!(matches!(
            ComparisonConfig::from_json(r#"{"entries":[]}"#),
            Err(CompareError::NoEntries)
        ));
    }

    #[test]
    fn duplicate_names_rejected() {
        let json = r#"{"entries":[
            {"name":"a","metrics":{"vocab_size":1,"total_tokens":1,"unique_tokens":1,"processing_time_s":0,"pct_tr":0,"pct_pure":0}},
            {"name":"a","metrics":{"vocab_size":1,"total_tokens":1,"unique_tokens":1,"processing_time_s":0,"pct_tr":0,"pct_pure":0}}]}"#;
        assert!(matches!(
            ComparisonConfig::from_json(json),
            Err(CompareError::DuplicateName(_))
        ));
    }

    #[test]
    fn entry_needs_one_source() {
        let json = r#"{"entries":[{"name":"a"}]}"#;
        assert!(matches!(
            ComparisonConfig::from_json(json),
            Err(CompareError::EntrySource(_))
        ));
    }

    #[test]
    fn missing_tokenizer_file() {
        let json = r#"{"corpus":"/nonexistent/c.jsonl","entries":[{"name":"a","tokenizer":"/nonexistent/t.json"}]}"#;
        let err = ComparisonConfig::from_json(json).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/t.json"), "{err}");
    }
}
