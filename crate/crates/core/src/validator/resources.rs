//! TSV-backed linguistic resources: root lexicon, affix inventory and an
//! optional whole-word list. `#` lines and blank lines are ignored.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{source_name}:{line}: {message}")]
    Malformed {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("{source_name}:{line}: duplicate entry `{entry}`")]
    Duplicate {
        source_name: String,
        line: usize,
        entry: String,
    },
    #[error("stem `{0}` contains no vowel")]
    VowellessStem(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Noun,
    Verb,
    Other,
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "noun" => Ok(Category::Noun),
            "verb" => Ok(Category::Verb),
            "other" => Ok(Category::Other),
            other => Err(format!("unknown category `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttachesTo {
    Noun,
    Verb,
    Any,
}

impl AttachesTo {
    pub fn accepts(self, category: Category) -> bool {
        match self {
            AttachesTo::Any => true,
            AttachesTo::Noun => category == Category::Noun,
            AttachesTo::Verb => category == Category::Verb,
        }
    }
}

impl FromStr for AttachesTo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "noun" => Ok(AttachesTo::Noun),
            "verb" => Ok(AttachesTo::Verb),
            "any" => Ok(AttachesTo::Any),
            other => Err(format!("unknown attachment `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HarmonyClass {
    Front,
    Back,
    Neutral,
}

impl FromStr for HarmonyClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "front" => Ok(HarmonyClass::Front),
            "back" => Ok(HarmonyClass::Back),
            "neutral" => Ok(HarmonyClass::Neutral),
            other => Err(format!("unknown harmony class `{other}`")),
        }
    }
}

/// Lowercase Turkish alphabet plus circumflexed vowels.
pub fn is_turkish_letter(c: char) -> bool {
    matches!(
        c,
        'a'..='z' | 'ç' | 'ğ' | 'ı' | 'ö' | 'ş' | 'ü' | 'â' | 'î' | 'û'
    ) && !matches!(c, 'q' | 'w' | 'x')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootEntry {
    pub form: String,
    pub category: Category,
    /// Final stop voices before a vowel-initial affix (kitap → kitab).
    pub soft_final: bool,
}

impl RootEntry {
    /// Surface used before vowel-initial affixes, when it differs from `form`.
    pub fn softened(&self) -> Option<String> {
        if !self.soft_final {
            return None;
        }
        let mut chars: Vec<char> = self.form.chars().collect();
        let last = chars.last_mut()?;
        *last = match *last {
            'p' => 'b',
            't' => 'd',
            'k' => 'ğ',
            'ç' => 'c',
            _ => return None,
        };
        Some(chars.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffixEntry {
    pub allomorph: String,
    pub morpheme: String,
    pub slot: u32,
    pub harmony: HarmonyClass,
    pub attaches_to: AttachesTo,
}

impl fmt::Display for AffixEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.allomorph, self.morpheme)
    }
}

fn data_rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            None
        } else {
            Some((i + 1, line.split('\t').map(str::trim).collect()))
        }
    })
}

fn read(path: &Path) -> Result<String, ResourceError> {
    fs::read_to_string(path).map_err(|source| ResourceError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn check_form(form: &str, what: &str) -> Result<(), String> {
    if form.is_empty() {
        return Err(format!("empty {what}"));
    }
    if let Some(c) = form.chars().find(|&c| !is_turkish_letter(c)) {
        return Err(format!("{what} `{form}` contains non-letter `{c}`"));
    }
    Ok(())
}

#[derive(Debug, Clone, Default)]
pub struct RootLexicon {
    roots: Vec<RootEntry>,
    forms: HashSet<String>,
}

impl RootLexicon {
    pub fn load(path: &Path) -> Result<Self, ResourceError> {
        Self::parse(&read(path)?, &path.display().to_string())
    }

    /// Rows are `form<TAB>category<TAB>soft_final(0|1)`.
    pub fn parse(text: &str, source_name: &str) -> Result<Self, ResourceError> {
        let malformed = |line, message: String| ResourceError::Malformed {
            source_name: source_name.to_string(),
            line,
            message,
        };
        let mut lex = RootLexicon::default();
        let mut seen = HashSet::new();
        for (line, cols) in data_rows(text) {
            let [form, category, soft] = cols[..] else {
                return Err(malformed(line, format!("expected 3 columns, found {}", cols.len())));
            };
            check_form(form, "root").map_err(|m| malformed(line, m))?;
            let category: Category = category.parse().map_err(|m| malformed(line, m))?;
            let soft_final = match soft {
                "0" => false,
                "1" => true,
                other => return Err(malformed(line, format!("soft_final must be 0 or 1, found `{other}`"))),
            };
            if !seen.insert((form.to_string(), category)) {
                return Err(ResourceError::Duplicate {
                    source_name: source_name.to_string(),
                    line,
                    entry: form.to_string(),
                });
            }
            lex.forms.insert(form.to_string());
            lex.roots.push(RootEntry {
                form: form.to_string(),
                category,
                soft_final,
            });
        }
        Ok(lex)
    }

    pub fn roots(&self) -> &[RootEntry] {
        &self.roots
    }

    pub fn contains_form(&self, form: &str) -> bool {
        self.forms.contains(form)
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

#[derive(Debug, Clone, Default)]
pub struct AffixInventory {
    affixes: Vec<AffixEntry>,
    allomorphs: HashSet<String>,
}

impl AffixInventory {
    pub fn load(path: &Path) -> Result<Self, ResourceError> {
        Self::parse(&read(path)?, &path.display().to_string())
    }

    /// Rows are `allomorph<TAB>morpheme<TAB>slot<TAB>harmony<TAB>attaches_to`.
    /// All allomorphs of a morpheme must share its slot.
    pub fn parse(text: &str, source_name: &str) -> Result<Self, ResourceError> {
        let malformed = |line, message: String| ResourceError::Malformed {
            source_name: source_name.to_string(),
            line,
            message,
        };
        let mut inv = AffixInventory::default();
        let mut seen = HashSet::new();
        let mut morpheme_slots: HashMap<String, u32> = HashMap::new();
        for (line, cols) in data_rows(text) {
            let [allomorph, morpheme, slot, harmony, attaches] = cols[..] else {
                return Err(malformed(line, format!("expected 5 columns, found {}", cols.len())));
            };
            check_form(allomorph, "allomorph").map_err(|m| malformed(line, m))?;
            if morpheme.is_empty() {
                return Err(malformed(line, "empty morpheme label".to_string()));
            }
            let slot: u32 = slot
                .parse()
                .map_err(|_| malformed(line, format!("slot must be a non-negative integer, found `{slot}`")))?;
            let harmony: HarmonyClass = harmony.parse().map_err(|m| malformed(line, m))?;
            let attaches_to: AttachesTo = attaches.parse().map_err(|m| malformed(line, m))?;

            match morpheme_slots.get(morpheme) {
                Some(&s) if s != slot => {
                    return Err(malformed(
                        line,
                        format!("morpheme {morpheme} already uses slot {s}, found {slot}"),
                    ))
                }
                _ => {
                    morpheme_slots.insert(morpheme.to_string(), slot);
                }
            }
            if !seen.insert((allomorph.to_string(), morpheme.to_string())) {
                return Err(ResourceError::Duplicate {
                    source_name: source_name.to_string(),
                    line,
                    entry: format!("{allomorph} {morpheme}"),
                });
            }
            inv.allomorphs.insert(allomorph.to_string());
            inv.affixes.push(AffixEntry {
                allomorph: allomorph.to_string(),
                morpheme: morpheme.to_string(),
                slot,
                harmony,
                attaches_to,
            });
        }
        Ok(inv)
    }

    pub fn affixes(&self) -> &[AffixEntry] {
        &self.affixes
    }

    pub fn contains_allomorph(&self, s: &str) -> bool {
        self.allomorphs.contains(s)
    }

    /// Distinct morpheme labels in file order.
    pub fn morphemes(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.affixes
            .iter()
            .map(|a| a.morpheme.as_str())
            .filter(|m| seen.insert(*m))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.affixes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.affixes.is_empty()
    }
}

/// Words accepted as valid without a morphological parse.
#[derive(Debug, Clone, Default)]
pub struct WordList {
    words: HashSet<String>,
}

impl WordList {
    pub fn load(path: &Path) -> Result<Self, ResourceError> {
        Ok(Self::parse(&read(path)?))
    }

    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(super::turkish_lower)
            .collect();
        WordList { words }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_row() {
        let lex = RootLexicon::parse("ev\tnoun\t0\n", "t").unwrap();
        assert_eq!(
            lex.roots()[0],
            RootEntry {
                form: "ev".into(),
                category: Category::Noun,
                soft_final: false
            }
        );
    }

    #[test]
    fn duplicate_root_is_error() {
        let err = RootLexicon::parse("ev\tnoun\t0\nev\tnoun\t0\n", "roots.tsv").unwrap_err();
        assert!(matches!(err, ResourceError::Duplicate { line: 2, .. }), "{err}");
    }

    #[test]
    fn same_form_different_category_is_allowed() {
        let lex = RootLexicon::parse("yaz\tnoun\t0\nyaz\tverb\t0\n", "t").unwrap();
        assert_eq!(lex.len(), 2);
    }

    #[test]
    fn malformed_rows_carry_line_numbers() {
        let err = RootLexicon::parse("# c\nev\tnoun\n", "roots.tsv").unwrap_err();
        assert_eq!(err.to_string(), "roots.tsv:2: expected 3 columns, found 2");
        let err = RootLexicon::parse("ev1\tnoun\t0\n", "r").unwrap_err();
        assert!(err.to_string().contains("non-letter"));
        let err = AffixInventory::parse("ler\tPL\tx\tfront\tnoun\n", "a").unwrap_err();
        assert!(err.to_string().starts_with("a:1:"));
    }

    #[test]
    fn allomorphs_group_by_morpheme() {
        let inv = AffixInventory::parse("ler\tPL\t1\tfront\tnoun\nlar\tPL\t1\tback\tnoun\n", "a")
            .unwrap();
        assert_eq!(inv.len(), 2);
        assert_eq!(inv.morphemes(), vec!["PL"]);
    }

    #[test]
    fn morpheme_slot_conflict_is_error() {
        let err = AffixInventory::parse("ler\tPL\t1\tfront\tnoun\nlar\tPL\t2\tback\tnoun\n", "a")
            .unwrap_err();
        assert!(err.to_string().contains("slot"));
    }

    #[test]
    fn softening() {
        let root = |f: &str| RootEntry {
            form: f.into(),
            category: Category::Noun,
            soft_final: true,
        };
        assert_eq!(root("kitap").softened().as_deref(), Some("kitab"));
        assert_eq!(root("ağaç").softened().as_deref(), Some("ağac"));
        assert_eq!(root("git").softened().as_deref(), Some("gid"));
        assert_eq!(root("ev").softened(), None);
    }
}
