//! Tokenizer models: loading, byte-level BPE and greedy longest-match
//! encoding, and per-token decoding.
//!
//! Tokenizer files are UTF-8 JSON:
//!
//! ```json
//! {"kind": "byte-bpe", "marker": "byte-level-space",
//!  "vocab": {"e": 0, "v": 1, "ev": 2}, "merges": ["e v"]}
//! ```
//!
//! Merge order is priority order. `kind` is `byte-bpe` or `greedy`;
//! `marker` is `byte-level-space`, `underscore-prefix` or `none`.

mod bytes;
mod pretokenize;

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

pub use bytes::{byte_to_unicode, bytes_to_symbols, unicode_to_byte};
pub use pretokenize::pretokenize;

pub type TokenId = u32;

/// SentencePiece word-boundary marker.
pub const UNDERSCORE_MARKER: char = '\u{2581}';

#[derive(Debug, Error)]
pub enum TokenizerError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid tokenizer JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown tokenizer kind `{0}` (expected byte-bpe or greedy)")]
    UnknownKind(String),
    #[error("unknown marker `{0}` (expected byte-level-space, underscore-prefix or none)")]
    UnknownMarker(String),
    #[error("byte-bpe models require the byte-level-space marker, found `{0}`")]
    MarkerMismatch(&'static str),
    #[error("duplicate token id {id} (`{first}` and `{second}`)")]
    DuplicateId {
        id: TokenId,
        first: String,
        second: String,
    },
    #[error("merge #{index} `{merge}` is malformed (expected two space-separated symbols)")]
    MalformedMerge { index: usize, merge: String },
    #[error("merge #{index} `{merge}` references `{symbol}`, which is not in the vocabulary")]
    MergeMissingSymbol {
        index: usize,
        merge: String,
        symbol: String,
    },
    #[error("merges are only allowed for byte-bpe models")]
    MergesOnGreedy,
    #[error("symbol `{0}` is not in the vocabulary")]
    UnknownSymbol(String),
    #[error("token id {0} is not in the vocabulary")]
    IdOutOfRange(TokenId),
    #[error("operation requires a {expected} model")]
    WrongKind { expected: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    ByteBpe,
    Greedy,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::ByteBpe => "byte-bpe",
            ModelKind::Greedy => "greedy",
        }
    }
}

impl FromStr for ModelKind {
    type Err = TokenizerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "byte-bpe" => Ok(ModelKind::ByteBpe),
            "greedy" => Ok(ModelKind::Greedy),
            other => Err(TokenizerError::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    ByteLevelSpace,
    UnderscorePrefix,
    None,
}

impl Marker {
    pub fn as_str(self) -> &'static str {
        match self {
            Marker::ByteLevelSpace => "byte-level-space",
            Marker::UnderscorePrefix => "underscore-prefix",
            Marker::None => "none",
        }
    }
}

impl FromStr for Marker {
    type Err = TokenizerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "byte-level-space" => Ok(Marker::ByteLevelSpace),
            "underscore-prefix" => Ok(Marker::UnderscorePrefix),
            "none" => Ok(Marker::None),
            other => Err(TokenizerError::UnknownMarker(other.to_string())),
        }
    }
}

/// One element of an encoded stream. Greedy models emit `Unknown` for a
/// scalar no vocabulary entry covers; byte-level BPE never does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Token {
    Id(TokenId),
    Unknown(char),
}

impl Token {
    pub fn id(self) -> Option<TokenId> {
        match self {
            Token::Id(id) => Some(id),
            Token::Unknown(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedToken {
    pub id: TokenId,
    /// Bytes the token stands for, including a decoded boundary space.
    pub raw: Vec<u8>,
    /// Marker-stripped text; `None` when the bytes are not valid UTF-8.
    pub surface: Option<String>,
    pub word_initial: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MergeSpec {
    Joined(String),
    Pair([String; 2]),
}

#[derive(Deserialize)]
struct TokenizerFile {
    kind: String,
    #[serde(default)]
    marker: Option<String>,
    vocab: HashMap<String, TokenId>,
    #[serde(default)]
    merges: Vec<MergeSpec>,
}

#[derive(Debug, Clone, Copy)]
struct MergeRule {
    rank: usize,
    merged: TokenId,
}

/// A validated, immutable tokenizer.
#[derive(Debug, Clone)]
pub struct TokenizerModel {
    kind: ModelKind,
    marker: Marker,
    vocab: HashMap<String, TokenId>,
    id_to_token: Vec<Option<String>>,
    merges: Vec<(String, String)>,
    merge_rules: HashMap<(TokenId, TokenId), MergeRule>,
    max_token_chars: usize,
}

pub fn load_tokenizer(path: &Path) -> Result<TokenizerModel, TokenizerError> {
    let text = fs::read_to_string(path).map_err(|source| TokenizerError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    TokenizerModel::from_json(&text)
}

impl TokenizerModel {
    pub fn from_json(json: &str) -> Result<Self, TokenizerError> {
        let file: TokenizerFile = serde_json::from_str(json)?;
        let kind: ModelKind = file.kind.parse()?;
        let marker = match file.marker {
            Some(m) => m.parse()?,
            None if kind == ModelKind::ByteBpe => Marker::ByteLevelSpace,
            None => Marker::None,
        };
        let mut merges = Vec::with_capacity(file.merges.len());
        for (index, spec) in file.merges.into_iter().enumerate() {
            let pair = match spec {
                MergeSpec::Pair([a, b]) => (a, b),
                MergeSpec::Joined(s) => {
                    let mut parts = s.split(' ');
                    match (parts.next(), parts.next(), parts.next()) {
                        (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => {
                            (a.to_string(), b.to_string())
                        }
                        _ => return Err(TokenizerError::MalformedMerge { index, merge: s }),
                    }
                }
            };
            merges.push(pair);
        }
        Self::new(kind, marker, file.vocab, merges)
    }

    pub fn new(
        kind: ModelKind,
        marker: Marker,
        vocab: HashMap<String, TokenId>,
        merges: Vec<(String, String)>,
    ) -> Result<Self, TokenizerError> {
        if kind == ModelKind::ByteBpe && marker != Marker::ByteLevelSpace {
            return Err(TokenizerError::MarkerMismatch(marker.as_str()));
        }
        if kind == ModelKind::Greedy && !merges.is_empty() {
            return Err(TokenizerError::MergesOnGreedy);
        }

        let max_id = vocab.values().copied().max().map_or(0, |m| m as usize + 1);
        let mut id_to_token: Vec<Option<String>> = vec![None; max_id];
        // Sorted so the duplicate-id diagnostic is stable.
        let mut entries: Vec<(&String, &TokenId)> = vocab.iter().collect();
        entries.sort();
        for (token, &id) in entries {
            let slot = &mut id_to_token[id as usize];
            if let Some(first) = slot {
                return Err(TokenizerError::DuplicateId {
                    id,
                    first: first.clone(),
                    second: token.clone(),
                });
            }
            *slot = Some(token.clone());
        }

        let mut merge_rules = HashMap::with_capacity(merges.len());
        for (rank, (a, b)) in merges.iter().enumerate() {
            let merge = format!("{a} {b}");
            let lookup = |symbol: &str| {
                vocab
                    .get(symbol)
                    .copied()
                    .ok_or_else(|| TokenizerError::MergeMissingSymbol {
                        index: rank,
                        merge: merge.clone(),
                        symbol: symbol.to_string(),
                    })
            };
            let left = lookup(a)?;
            let right = lookup(b)?;
            let merged = lookup(&format!("{a}{b}"))?;
            merge_rules
                .entry((left, right))
                .or_insert(MergeRule { rank, merged });
        }

        let max_token_chars = vocab.keys().map(|t| t.chars().count()).max().unwrap_or(0);
        Ok(TokenizerModel {
            kind,
            marker,
            vocab,
            id_to_token,
            merges,
            merge_rules,
            max_token_chars,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn marker(&self) -> Marker {
        self.marker
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn token_to_id(&self, token: &str) -> Option<TokenId> {
        self.vocab.get(token).copied()
    }

    pub fn id_to_token(&self, id: TokenId) -> Option<&str> {
        self.id_to_token.get(id as usize)?.as_deref()
    }

    /// Encodes `text` piece by piece after pretokenization.
    pub fn encode(&self, text: &str) -> Result<Vec<Token>, TokenizerError> {
        let mut out = Vec::new();
        for piece in pretokenize(text) {
            match self.kind {
                ModelKind::ByteBpe => {
                    out.extend(self.bpe_encode(piece)?.into_iter().map(Token::Id));
                }
                ModelKind::Greedy => out.extend(self.greedy_encode(piece)?),
            }
        }
        Ok(out)
    }

    /// Runs the merge loop over one pretokenized piece: the adjacent pair
    /// with the lowest merge rank is merged, leftmost first on ties, until no
    /// adjacent pair has a rule.
    pub fn bpe_encode(&self, piece: &str) -> Result<Vec<TokenId>, TokenizerError> {
        if self.kind != ModelKind::ByteBpe {
            return Err(TokenizerError::WrongKind {
                expected: "byte-bpe",
            });
        }
        let mut symbols = Vec::with_capacity(piece.len());
        for &b in piece.as_bytes() {
            let symbol = byte_to_unicode(b);
            let mut buf = [0u8; 4];
            let key: &str = symbol.encode_utf8(&mut buf);
            // A symbol outside the vocabulary is never part of a merge rule,
            // so it would survive to the output unchanged.
            let id = self
                .vocab
                .get(key)
                .copied()
                .ok_or_else(|| TokenizerError::UnknownSymbol(key.to_string()))?;
            symbols.push(id);
        }

        loop {
            let mut best: Option<(usize, usize, TokenId)> = None;
            for (i, pair) in symbols.windows(2).enumerate() {
                if let Some(rule) = self.merge_rules.get(&(pair[0], pair[1])) {
                    if best.is_none_or(|(rank, _, _)| rule.rank < rank) {
                        best = Some((rule.rank, i, rule.merged));
                    }
                }
            }
            match best {
                Some((_, i, merged)) => {
                    symbols[i] = merged;
                    symbols.remove(i + 1);
                }
                None => break,
            }
        }
        Ok(symbols)
    }

    /// Longest-prefix scan over one piece. Whitespace handling follows the
    /// marker: byte-level models match on mapped byte symbols, underscore
    /// models replace spaces with `▁`, and unmarked models drop whitespace.
    pub fn greedy_encode(&self, piece: &str) -> Result<Vec<Token>, TokenizerError> {
        if self.kind != ModelKind::Greedy {
            return Err(TokenizerError::WrongKind { expected: "greedy" });
        }
        let prepared: String = match self.marker {
            Marker::ByteLevelSpace => bytes_to_symbols(piece.as_bytes()),
            Marker::UnderscorePrefix => piece
                .chars()
                .map(|c| if c == ' ' { UNDERSCORE_MARKER } else { c })
                .collect(),
            Marker::None => piece.chars().filter(|c| !c.is_whitespace()).collect(),
        };
        Ok(self.longest_match(&prepared))
    }

    fn longest_match(&self, text: &str) -> Vec<Token> {
        let bounds: Vec<usize> = text
            .char_indices()
            .map(|(i, _)| i)
            .chain(std::iter::once(text.len()))
            .collect();
        let n_chars = bounds.len() - 1;
        let mut out = Vec::new();
        let mut pos = 0;
        while pos < n_chars {
            let longest = self.max_token_chars.min(n_chars - pos);
            let hit = (1..=longest).rev().find_map(|len| {
                let candidate = &text[bounds[pos]..bounds[pos + len]];
                self.vocab.get(candidate).map(|&id| (id, len))
            });
            match hit {
                Some((id, len)) => {
                    out.push(Token::Id(id));
                    pos += len;
                }
                None => {
                    let c = text[bounds[pos]..].chars().next().expect("in bounds");
                    out.push(Token::Unknown(c));
                    pos += 1;
                }
            }
        }
        out
    }

    pub fn decode_token(&self, id: TokenId) -> Result<DecodedToken, TokenizerError> {
        let token = self
            .id_to_token(id)
            .ok_or(TokenizerError::IdOutOfRange(id))?;
        let (raw, word_initial, body_start) = match self.marker {
            Marker::ByteLevelSpace => {
                let raw = symbols_to_bytes(token);
                let initial = raw.first() == Some(&b' ');
                (raw, initial, usize::from(initial))
            }
            Marker::UnderscorePrefix => {
                let initial = token.starts_with(UNDERSCORE_MARKER);
                let raw = token.replace(UNDERSCORE_MARKER, " ").into_bytes();
                (raw, initial, usize::from(initial))
            }
            Marker::None => (token.as_bytes().to_vec(), false, 0),
        };
        let surface = std::str::from_utf8(&raw[body_start..])
            .ok()
            .map(str::to_string);
        Ok(DecodedToken {
            id,
            raw,
            surface,
            word_initial,
        })
    }

    /// Raw bytes a stream element stands for.
    pub fn token_bytes(&self, token: Token) -> Result<Vec<u8>, TokenizerError> {
        match token {
            Token::Id(id) => Ok(self.decode_token(id)?.raw),
            Token::Unknown(c) => Ok(match self.marker {
                Marker::ByteLevelSpace => symbols_to_bytes(c.encode_utf8(&mut [0u8; 4])),
                _ => c.to_string().into_bytes(),
            }),
        }
    }

    /// Concatenates the raw bytes of an encoded stream.
    pub fn decode(&self, tokens: &[Token]) -> Result<Vec<u8>, TokenizerError> {
        let mut out = Vec::new();
        for &t in tokens {
            out.extend(self.token_bytes(t)?);
        }
        Ok(out)
    }
}

/// Symbols outside the byte table (e.g. added special tokens) pass through
/// as their own UTF-8 bytes.
fn symbols_to_bytes(symbols: &str) -> Vec<u8> {
    let mut out = Vec::with_capacity(symbols.len());
    for c in symbols.chars() {
        match unicode_to_byte(c) {
            Some(b) => out.push(b),
            None => out.extend_from_slice(c.encode_utf8(&mut [0u8; 4]).as_bytes()),
        }
    }
    out
}
