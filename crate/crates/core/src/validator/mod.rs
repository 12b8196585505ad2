//! Turkish token validation: whether a decoded token is a valid standalone
//! word, and whether it is a single pure morph.
//!
//! Word validity comes from an optional whole-word list plus a morphotactic
//! search: a lexicon root followed by affix allomorphs whose slots strictly
//! increase, each agreeing in two-way vowel harmony with everything consumed
//! before it. Final-stop softening (kitap → kitab) is the only consonant
//! alternation; buffer consonants live in the allomorph forms.

mod resources;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

pub use resources::{
    is_turkish_letter, AffixEntry, AffixInventory, AttachesTo, Category, HarmonyClass,
    ResourceError, RootEntry, RootLexicon, WordList,
};

use crate::tokenizer::DecodedToken;

pub const BUNDLED_ROOTS: &str = include_str!("../../data/roots.tsv");
pub const BUNDLED_AFFIXES: &str = include_str!("../../data/affixes.tsv");
pub const BUNDLED_WORDS: &str = include_str!("../../data/words.txt");

pub fn turkish_lower(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            'I' => out.push('ı'),
            'İ' => out.push('i'),
            _ => out.extend(c.to_lowercase()),
        }
    }
    out
}

fn is_letters(s: &str) -> bool {
    !s.is_empty() && s.chars().all(char::is_alphabetic)
}

/// Lowercased, trimmed surface of a token; `None` for invalid UTF-8, empty
/// surfaces, and anything containing a non-letter.
pub fn normalize_token(token: &DecodedToken) -> Option<String> {
    normalize_surface(token.surface.as_deref()?)
}

pub fn normalize_surface(surface: &str) -> Option<String> {
    let lowered = turkish_lower(surface.trim());
    is_letters(&lowered).then_some(lowered)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Backness {
    Front,
    Back,
}

fn vowel_backness(c: char) -> Option<Backness> {
    match c {
        'e' | 'i' | 'ö' | 'ü' | 'î' => Some(Backness::Front),
        'a' | 'ı' | 'o' | 'u' | 'â' | 'û' => Some(Backness::Back),
        _ => None,
    }
}

pub fn is_vowel(c: char) -> bool {
    vowel_backness(c).is_some()
}

/// Two-way harmony between a stem's last vowel and an affix's class.
pub fn harmony_ok(stem: &str, affix: &AffixEntry) -> Result<bool, ResourceError> {
    let last = stem
        .chars()
        .rev()
        .find_map(vowel_backness)
        .ok_or_else(|| ResourceError::VowellessStem(stem.to_string()))?;
    Ok(match affix.harmony {
        HarmonyClass::Neutral => true,
        HarmonyClass::Front => last == Backness::Front,
        HarmonyClass::Back => last == Backness::Back,
    })
}

fn harmonizes(stem: &str, affix: &AffixEntry) -> bool {
    harmony_ok(stem, affix).unwrap_or(false)
}

fn vowel_initial(s: &str) -> bool {
    s.chars().next().is_some_and(is_vowel)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segmentation {
    pub root: RootEntry,
    /// Root as it appears in the word, after any softening.
    pub root_surface: String,
    pub affixes: Vec<AffixEntry>,
}

impl Segmentation {
    pub fn surface(&self) -> String {
        let mut s = self.root_surface.clone();
        for a in &self.affixes {
            s.push_str(&a.allomorph);
        }
        s
    }
}

impl fmt::Display for Segmentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.root_surface)?;
        for a in &self.affixes {
            write!(f, "+{a}")?;
        }
        Ok(())
    }
}

struct Search<'a> {
    inv: &'a AffixInventory,
    root: &'a RootEntry,
    root_surface: &'a str,
    softened: bool,
    out: &'a mut Vec<Segmentation>,
}

impl Search<'_> {
    fn extend(&mut self, stem: &str, rest: &str, last_slot: Option<u32>, chain: &mut Vec<usize>) {
        if rest.is_empty() {
            // A softened root needs a vowel-initial affix after it.
            if !(self.softened && chain.is_empty()) {
                self.out.push(Segmentation {
                    root: self.root.clone(),
                    root_surface: self.root_surface.to_string(),
                    affixes: chain
                        .iter()
                        .map(|&i| self.inv.affixes()[i].clone())
                        .collect(),
                });
            }
            return;
        }
        for (i, affix) in self.inv.affixes().iter().enumerate() {
            if last_slot.is_some_and(|s| affix.slot <= s)
                || !affix.attaches_to.accepts(self.root.category)
                || !rest.starts_with(affix.allomorph.as_str())
            {
                continue;
            }
            if chain.is_empty() && self.root.soft_final && self.root.softened().is_some() {
                // Softened surface iff the first affix starts with a vowel.
                if self.softened != vowel_initial(&affix.allomorph) {
                    continue;
                }
            }
            if !harmonizes(stem, affix) {
                continue;
            }
            let next_stem = format!("{stem}{}", affix.allomorph);
            chain.push(i);
            self.extend(&next_stem, &rest[affix.allomorph.len()..], Some(affix.slot), chain);
            chain.pop();
        }
    }
}

/// Every parse of a normalized word, ordered by root length (longest first)
/// then affix count (fewest first).
pub fn segment_word(word: &str, lex: &RootLexicon, inv: &AffixInventory) -> Vec<Segmentation> {
    let mut out = Vec::new();
    if !is_letters(word) {
        return out;
    }
    for root in lex.roots() {
        let softened = root.softened();
        let surfaces = std::iter::once((root.form.clone(), false))
            .chain(softened.map(|s| (s, true)));
        for (surface, is_softened) in surfaces {
            if let Some(rest) = word.strip_prefix(surface.as_str()) {
                let mut search = Search {
                    inv,
                    root,
                    root_surface: &surface,
                    softened: is_softened,
                    out: &mut out,
                };
                search.extend(&surface, rest, None, &mut Vec::new());
            }
        }
    }
    out.sort_by(|a, b| {
        b.root
            .form
            .chars()
            .count()
            .cmp(&a.root.form.chars().count())
            .then(a.affixes.len().cmp(&b.affixes.len()))
    });
    out
}

/// Whether `word` is a chain of two or more allomorphs with strictly
/// increasing slots, agreeing in category and harmony among themselves.
pub fn is_affix_chain(word: &str, inv: &AffixInventory) -> bool {
    fn walk(
        inv: &AffixInventory,
        consumed: &str,
        rest: &str,
        last_slot: Option<u32>,
        category: Option<AttachesTo>,
        depth: usize,
    ) -> bool {
        if rest.is_empty() {
            return depth >= 2;
        }
        inv.affixes().iter().any(|a| {
            if last_slot.is_some_and(|s| a.slot <= s) || !rest.starts_with(a.allomorph.as_str()) {
                return false;
            }
            let category = match (category, a.attaches_to) {
                (Some(c), AttachesTo::Any) | (None, c) => Some(c),
                (Some(AttachesTo::Any), c) => Some(c),
                (Some(c), d) if c == d => Some(c),
                _ => return false,
            };
            if consumed.chars().any(is_vowel) && !harmonizes(consumed, a) {
                return false;
            }
            let next = format!("{consumed}{}", a.allomorph);
            walk(inv, &next, &rest[a.allomorph.len()..], Some(a.slot), category, depth + 1)
        })
    }
    walk(inv, "", word, None, None, 0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PurityMode {
    /// Exactly one root or one affix allomorph.
    #[default]
    Single,
    /// Also full root+affix parses and affix-only chains.
    Extended,
}

impl FromStr for PurityMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "single" => Ok(PurityMode::Single),
            "extended" => Ok(PurityMode::Extended),
            other => Err(format!("unknown purity mode `{other}` (expected single or extended)")),
        }
    }
}

/// Predicates behind the language-validity and purity percentages. Inputs
/// are normalized token surfaces.
pub trait TokenValidator: Sync {
    fn is_valid_word(&self, word: &str) -> bool;
    fn is_pure_token(&self, word: &str) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdict {
    pub valid_word: bool,
    pub pure: bool,
}

#[derive(Debug, Clone)]
pub struct MorphValidator {
    lexicon: RootLexicon,
    affixes: AffixInventory,
    words: WordList,
    purity: PurityMode,
}

impl MorphValidator {
    pub fn new(lexicon: RootLexicon, affixes: AffixInventory, words: WordList) -> Self {
        MorphValidator {
            lexicon,
            affixes,
            words,
            purity: PurityMode::Single,
        }
    }

    /// Loads resources from disk; a missing word list means an empty one.
    pub fn load(
        lexicon: &Path,
        affixes: &Path,
        words: Option<&Path>,
    ) -> Result<Self, ResourceError> {
        let words = match words {
            Some(p) => WordList::load(p)?,
            None => WordList::default(),
        };
        Ok(Self::new(
            RootLexicon::load(lexicon)?,
            AffixInventory::load(affixes)?,
            words,
        ))
    }

    /// The small Turkish resources shipped with the crate.
    pub fn bundled() -> Self {
        Self::new(
            RootLexicon::parse(BUNDLED_ROOTS, "roots.tsv").expect("bundled roots are valid"),
            AffixInventory::parse(BUNDLED_AFFIXES, "affixes.tsv")
                .expect("bundled affixes are valid"),
            WordList::parse(BUNDLED_WORDS),
        )
    }

    pub fn with_purity_mode(mut self, mode: PurityMode) -> Self {
        self.purity = mode;
        self
    }

    pub fn purity_mode(&self) -> PurityMode {
        self.purity
    }

    pub fn lexicon(&self) -> &RootLexicon {
        &self.lexicon
    }

    pub fn affixes(&self) -> &AffixInventory {
        &self.affixes
    }

    pub fn words(&self) -> &WordList {
        &self.words
    }

    pub fn segment(&self, word: &str) -> Vec<Segmentation> {
        segment_word(&turkish_lower(word), &self.lexicon, &self.affixes)
    }

    pub fn verdict(&self, word: &str) -> Verdict {
        Verdict {
            valid_word: self.is_valid_word(word),
            pure: self.is_pure_token(word),
        }
    }
}

impl TokenValidator for MorphValidator {
    fn is_valid_word(&self, word: &str) -> bool {
        let word = turkish_lower(word);
        if !is_letters(&word) {
            return false;
        }
        self.words.contains(&word) || !segment_word(&word, &self.lexicon, &self.affixes).is_empty()
    }

    fn is_pure_token(&self, word: &str) -> bool {
        let word = turkish_lower(word);
        if !is_letters(&word) {
            return false;
        }
        if self.lexicon.contains_form(&word) || self.affixes.contains_allomorph(&word) {
            return true;
        }
        match self.purity {
            PurityMode::Single => false,
            PurityMode::Extended => {
                !segment_word(&word, &self.lexicon, &self.affixes).is_empty()
                    || is_affix_chain(&word, &self.affixes)
            }
        }
    }
}
