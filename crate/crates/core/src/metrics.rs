//! Per-tokenizer evaluation over a corpus: token counts, timing, fertility,
//! and the share of distinct tokens that are valid words or pure morphs.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::tokenizer::{Token, TokenId, TokenizerError, TokenizerModel};
use crate::validator::{normalize_token, TokenValidator};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("document {document}: {source}")]
    Encode {
        document: String,
        #[source]
        source: TokenizerError,
    },
    #[error(transparent)]
    Decode(#[from] TokenizerError),
    #[error("no tokens to score")]
    EmptyTokenSet,
    #[error("word count is zero")]
    ZeroWords,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// Each distinct token counts once.
    #[default]
    Unique,
    /// Each distinct token counts by its number of occurrences.
    Frequency,
}

impl FromStr for Weighting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "unique" => Ok(Weighting::Unique),
            "frequency" => Ok(Weighting::Frequency),
            other => Err(format!("unknown weighting `{other}` (expected unique or frequency)")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalOptions {
    pub weighting: Weighting,
    /// Restrict percentage denominators to tokens with a letters-only surface.
    pub letters_only: bool,
    /// Encode documents on the rayon pool. Timing is only meaningful when
    /// this is off.
    pub parallel: bool,
}

/// Externally supplied facts about the model behind a tokenizer.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelInfo {
    pub name: String,
    pub params_b: Option<f64>,
    pub external_scores: BTreeMap<String, f64>,
}

impl ModelInfo {
    pub fn named(name: impl Into<String>) -> Self {
        ModelInfo {
            name: name.into(),
            ..Default::default()
        }
    }
}

/// One tokenizer's metric row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model_name: String,
    pub params_b: Option<f64>,
    #[serde(default)]
    pub external_scores: BTreeMap<String, f64>,
    pub vocab_size: u64,
    pub total_tokens: u64,
    pub unique_tokens: u64,
    pub processing_time_s: f64,
    pub pct_tr: f64,
    pub pct_pure: f64,
    pub fertility: Option<f64>,
}

impl EvalReport {
    /// Checks the row's internal consistency.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (name, pct) in [("pct_tr", self.pct_tr), ("pct_pure", self.pct_pure)] {
            if !(0.0..=100.0).contains(&pct) {
                return Err(format!("{}: {name} = {pct} is outside [0, 100]", self.model_name));
            }
        }
        if self.unique_tokens > self.total_tokens.min(self.vocab_size) {
            return Err(format!(
                "{}: unique_tokens {} exceeds min(total_tokens {}, vocab_size {})",
                self.model_name, self.unique_tokens, self.total_tokens, self.vocab_size
            ));
        }
        if self.processing_time_s < 0.0 || self.processing_time_s.is_nan() {
            return Err(format!("{}: negative processing time", self.model_name));
        }
        Ok(())
    }

    /// Same metrics, ignoring the wall-clock field.
    pub fn same_metrics(&self, other: &EvalReport) -> bool {
        let mut a = self.clone();
        a.processing_time_s = other.processing_time_s;
        a == *other
    }
}

pub fn unique_tokens(stream: &[TokenId]) -> BTreeSet<TokenId> {
    stream.iter().copied().collect()
}

/// A distinct token's normalized surface and occurrence count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenTally {
    pub normalized: Option<String>,
    pub count: u64,
}

impl TokenTally {
    pub fn new(normalized: Option<&str>, count: u64) -> Self {
        TokenTally {
            normalized: normalized.map(str::to_string),
            count,
        }
    }
}

/// Returns `(pct_tr, pct_pure)`. Tallies without a normalized surface stay
/// in the denominator and fail both predicates.
pub fn compute_percentages(
    tallies: &[TokenTally],
    validator: &dyn TokenValidator,
    weighting: Weighting,
) -> Result<(f64, f64), MetricsError> {
    let mut total = 0u64;
    let mut valid = 0u64;
    let mut pure = 0u64;
    for t in tallies {
        let w = match weighting {
            Weighting::Unique => 1,
            Weighting::Frequency => t.count,
        };
        total += w;
        if let Some(word) = &t.normalized {
            if validator.is_valid_word(word) {
                valid += w;
            }
            if validator.is_pure_token(word) {
                pure += w;
            }
        }
    }
    if total == 0 {
        return Err(MetricsError::EmptyTokenSet);
    }
    let pct = |n: u64| 100.0 * n as f64 / total as f64;
    Ok((pct(valid), pct(pure)))
}

pub fn fertility(total_tokens: u64, word_count: u64) -> Result<f64, MetricsError> {
    if word_count == 0 {
        return Err(MetricsError::ZeroWords);
    }
    Ok(total_tokens as f64 / word_count as f64)
}

fn encode_all(
    model: &TokenizerModel,
    corpus: &Corpus,
    parallel: bool,
) -> Result<Vec<Vec<Token>>, MetricsError> {
    let encode = |doc: &crate::corpus::Document| {
        model.encode(&doc.text).map_err(|source| MetricsError::Encode {
            document: doc.id.clone(),
            source,
        })
    };
    if parallel {
        corpus.documents().par_iter().map(encode).collect()
    } else {
        corpus.documents().iter().map(encode).collect()
    }
}

/// Encodes every document and scores the resulting stream. Timing covers
/// encoding only.
pub fn evaluate_tokenizer(
    model: &TokenizerModel,
    corpus: &Corpus,
    validator: &dyn TokenValidator,
    info: &ModelInfo,
    options: &EvalOptions,
) -> Result<EvalReport, MetricsError> {
    if corpus.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }

    let started = Instant::now();
    let streams = encode_all(model, corpus, options.parallel)?;
    let elapsed = started.elapsed().as_secs_f64();

    let mut counts: BTreeMap<Token, u64> = BTreeMap::new();
    let mut total_tokens = 0u64;
    for stream in &streams {
        total_tokens += stream.len() as u64;
        for &t in stream {
            *counts.entry(t).or_default() += 1;
        }
    }
    let unique = counts.keys().filter(|t| t.id().is_some()).count() as u64;

    let mut tallies = Vec::with_capacity(counts.len());
    for (&token, &count) in &counts {
        let normalized = match token {
            Token::Id(id) => normalize_token(&model.decode_token(id)?),
            Token::Unknown(_) => None,
        };
        tallies.push(TokenTally { normalized, count });
    }
    if options.letters_only {
        tallies.retain(|t| t.normalized.is_some());
    }
    // An empty denominator (no tokens, or none left after filtering) scores 0.
    let (pct_tr, pct_pure) = if tallies.is_empty() {
        (0.0, 0.0)
    } else {
        compute_percentages(&tallies, validator, options.weighting)?
    };

    let words = corpus.stats().word_count;
    Ok(EvalReport {
        model_name: info.name.clone(),
        params_b: info.params_b,
        external_scores: info.external_scores.clone(),
        vocab_size: model.vocab_size() as u64,
        total_tokens,
        unique_tokens: unique,
        processing_time_s: elapsed,
        pct_tr,
        pct_pure,
        fertility: fertility(total_tokens, words).ok(),
    })
}
