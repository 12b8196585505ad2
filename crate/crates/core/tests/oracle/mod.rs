//! Reference implementations used to cross-check the library. Written
//! without calling into the code under test beyond resource parsing.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use tokeval::validator::{AffixEntry, AffixInventory, HarmonyClass, RootEntry, RootLexicon};

/// `root_surface+allomorph(MORPHEME)@slot...|root_form/category`.
pub type ParseKey = String;

pub fn parse_key(root: &RootEntry, root_surface: &str, affixes: &[&AffixEntry]) -> ParseKey {
    let mut key = root_surface.to_string();
    for a in affixes {
        key.push_str(&format!("+{}({})@{}", a.allomorph, a.morpheme, a.slot));
    }
    format!("{key}|{}/{:?}", root.form, root.category)
}

fn last_vowel_is_front(s: &str) -> Option<bool> {
    s.chars().rev().find_map(|c| {
        if "eiöüî".contains(c) {
            Some(true)
        } else if "aıouâû".contains(c) {
            Some(false)
        } else {
            None
        }
    })
}

fn agrees(stem: &str, a: &AffixEntry) -> bool {
    match (a.harmony, last_vowel_is_front(stem)) {
        (_, None) => false,
        (HarmonyClass::Neutral, _) => true,
        (HarmonyClass::Front, Some(front)) => front,
        (HarmonyClass::Back, Some(front)) => !front,
    }
}

fn soften(form: &str) -> Option<String> {
    let mut chars: Vec<char> = form.chars().collect();
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

fn starts_with_vowel(s: &str) -> bool {
    s.chars().next().is_some_and(|c| "aeıioöuüâîû".contains(c))
}

/// Brute force: each root followed by every slot-increasing selection of at
/// most one allomorph per slot, filtered by attachment, harmony and
/// softening. Maps surface to the set of parses producing it.
pub fn enumerate_parses(lex: &RootLexicon, inv: &AffixInventory) -> BTreeMap<String, BTreeSet<ParseKey>> {
    let mut slots: Vec<u32> = inv.affixes().iter().map(|a| a.slot).collect();
    slots.sort_unstable();
    slots.dedup();

    // All strictly slot-increasing sequences (including the empty one).
    let mut sequences: Vec<Vec<&AffixEntry>> = vec![Vec::new()];
    for &slot in &slots {
        let mut grown = Vec::new();
        for seq in &sequences {
            for a in inv.affixes().iter().filter(|a| a.slot == slot) {
                let mut s = seq.clone();
                s.push(a);
                grown.push(s);
            }
        }
        sequences.extend(grown);
    }

    let mut out: BTreeMap<String, BTreeSet<ParseKey>> = BTreeMap::new();
    for root in lex.roots() {
        for seq in &sequences {
            if !seq.iter().all(|a| a.attaches_to.accepts(root.category)) {
                continue;
            }
            let softenable = root.soft_final && soften(&root.form).is_some();
            let root_surface = match seq.first() {
                Some(first) if softenable && starts_with_vowel(&first.allomorph) => {
                    soften(&root.form).unwrap()
                }
                _ => root.form.clone(),
            };
            let mut stem = root_surface.clone();
            let mut ok = true;
            for a in seq {
                if !agrees(&stem, a) {
                    ok = false;
                    break;
                }
                stem.push_str(&a.allomorph);
            }
            if ok {
                out.entry(stem)
                    .or_default()
                    .insert(parse_key(root, &root_surface, seq));
            }
        }
    }
    out
}

/// Every root surface (plain and softened) followed by every sequence of up
/// to `max_len` allomorphs, with no grammatical filtering.
pub fn exhaustive_words(lex: &RootLexicon, inv: &AffixInventory, max_len: usize) -> BTreeSet<String> {
    let allomorphs: BTreeSet<&str> = inv.affixes().iter().map(|a| a.allomorph.as_str()).collect();
    let mut tails: Vec<String> = vec![String::new()];
    let mut frontier = tails.clone();
    for _ in 0..max_len {
        let next: Vec<String> = frontier
            .iter()
            .flat_map(|t| allomorphs.iter().map(move |a| format!("{t}{a}")))
            .collect();
        tails.extend(next.iter().cloned());
        frontier = next;
    }
    let mut words = BTreeSet::new();
    for root in lex.roots() {
        let surfaces = std::iter::once(root.form.clone()).chain(soften(&root.form));
        for s in surfaces {
            for t in &tails {
                words.insert(format!("{s}{t}"));
            }
        }
    }
    words
}

/// Single-mode verdicts derived from the resources alone.
pub fn oracle_verdict(
    word: &str,
    parses: &BTreeMap<String, BTreeSet<ParseKey>>,
    lex: &RootLexicon,
    inv: &AffixInventory,
    whole_words: &[&str],
) -> (bool, bool) {
    let tr = whole_words.contains(&word) || parses.contains_key(word);
    let pure = lex.roots().iter().any(|r| r.form == word)
        || inv.affixes().iter().any(|a| a.allomorph == word);
    (tr, pure)
}

/// Textbook single-pass product-moment formula.
pub fn naive_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sx += a;
        sy += b;
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
    }
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}

/// Column values of the benchmark table, in fixture order
/// (gemma-2, llama-3.1, Qwen2.5, aya-expanse).
pub const TABLE: [(&str, [f64; 4]); 8] = [
    ("params_b", [27.2, 70.6, 7.6, 32.3]),
    ("mmlu", [72.10, 70.42, 61.68, 70.66]),
    ("vocab_size", [256000.0, 128256.0, 151665.0, 255029.0]),
    ("total_tokens", [497015.0, 488535.0, 561866.0, 434526.0]),
    ("processing_time_s", [2.95, 3.12, 3.31, 2.77]),
    ("unique_tokens", [6383.0, 6823.0, 5752.0, 8562.0]),
    ("pct_tr", [48.63, 45.80, 40.33, 50.67]),
    ("pct_pure", [37.05, 30.91, 30.15, 32.96]),
];

/// Pairwise r over `TABLE`, computed offline with numpy.corrcoef and frozen
/// to four decimals.
pub const FROZEN_R: [(&str, &str, f64); 28] = [
    ("params_b", "mmlu", 0.5906),
    ("params_b", "vocab_size", -0.3415),
    ("params_b", "total_tokens", -0.4636),
    ("params_b", "processing_time_s", -0.1709),
    ("params_b", "unique_tokens", 0.2962),
    ("params_b", "pct_tr", 0.3267),
    ("params_b", "pct_pure", -0.1159),
    ("mmlu", "vocab_size", 0.5357),
    ("mmlu", "total_tokens", -0.7965),
    ("mmlu", "processing_time_s", -0.7875),
    ("mmlu", "unique_tokens", 0.5495),
    ("mmlu", "pct_tr", 0.9001),
    ("mmlu", "pct_pure", 0.6838),
    ("vocab_size", "total_tokens", -0.5665),
    ("vocab_size", "processing_time_s", -0.8283),
    ("vocab_size", "unique_tokens", 0.5065),
    ("vocab_size", "pct_tr", 0.7670),
    ("vocab_size", "pct_pure", 0.8161),
    ("total_tokens", "processing_time_s", 0.9308),
    ("total_tokens", "unique_tokens", -0.9426),
    ("total_tokens", "pct_tr", -0.9331),
    ("total_tokens", "pct_pure", -0.3429),
    ("processing_time_s", "unique_tokens", -0.8604),
    ("processing_time_s", "pct_tr", -0.9773),
    ("processing_time_s", "pct_pure", -0.6030),
    ("unique_tokens", "pct_tr", 0.7990),
    ("unique_tokens", "pct_pure", 0.1122),
    ("pct_tr", "pct_pure", 0.6577),
];
