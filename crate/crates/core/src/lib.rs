//! Tokenizer evaluation toolkit.
//!
//! Runs subword tokenizers over a corpus and measures vocabulary size, token
//! counts, encoding time, fertility (tokens per word), the share of distinct
//! tokens that are valid Turkish words, and the share that are single pure
//! morphs. Metric rows can be correlated against external model scores and
//! rendered as tables, heat maps and scatter plots.
//!
//! ```
//! use tokeval::tokenizer::TokenizerModel;
//! use tokeval::validator::{MorphValidator, TokenValidator};
//!
//! let model = TokenizerModel::from_json(
//!     r#"{"kind":"greedy","marker":"none","vocab":{"ev":0,"ler":1}}"#,
//! ).unwrap();
//! assert_eq!(model.encode("evler").unwrap().len(), 2);
//!
//! let v = MorphValidator::bundled();
//! assert!(v.is_valid_word("evlerimizden"));
//! assert!(v.is_pure_token("ler") && !v.is_valid_word("ler"));
//! ```

pub mod compare;
pub mod corpus;
pub mod metrics;
pub mod plot;
pub mod report;
pub mod stats;
pub mod tokenizer;
pub mod validator;

pub use corpus::{corpus_stats, load_corpus, Corpus, CorpusFormat, CorpusStats, Document};
pub use metrics::{evaluate_tokenizer, EvalOptions, EvalReport, ModelInfo, Weighting};
pub use stats::{correlation_matrix, pearson, rank_models, CorrelationMatrix, MetricTable};
pub use tokenizer::{load_tokenizer, DecodedToken, Token, TokenId, TokenizerModel};
pub use validator::{segment_word, MorphValidator, PurityMode, Segmentation, TokenValidator};

/// The benchmark table for four commercial tokenizers, as a comparison
/// config with pre-filled metrics.
pub const TABLE1_FIXTURE: &str = include_str!("../data/table1_fixture.json");
