//! Splits text into word-like pieces ahead of subword encoding.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Letter,
    Digit,
    Space,
    Other,
}

fn classify(c: char) -> CharClass {
    if c.is_whitespace() {
        CharClass::Space
    } else if c.is_alphabetic() {
        CharClass::Letter
    } else if c.is_numeric() {
        CharClass::Digit
    } else {
        CharClass::Other
    }
}

/// Splits at every boundary between letter, digit, other and whitespace runs.
/// A single U+0020 directly before a non-whitespace run is moved onto that
/// run. Concatenating the pieces gives back `text`.
pub fn pretokenize(text: &str) -> Vec<&str> {
    let mut runs: Vec<(CharClass, usize, usize)> = Vec::new();
    for (i, c) in text.char_indices() {
        let class = classify(c);
        let end = i + c.len_utf8();
        match runs.last_mut() {
            Some((last, _, run_end)) if *last == class => *run_end = end,
            _ => runs.push((class, i, end)),
        }
    }

    let mut pieces = Vec::with_capacity(runs.len());
    let mut carry: Option<usize> = None;
    for (idx, &(class, start, end)) in runs.iter().enumerate() {
        let start = carry.take().unwrap_or(start);
        let next_is_word = runs.get(idx + 1).is_some();
        if class == CharClass::Space && next_is_word && text[..end].ends_with(' ') {
            if end - 1 > start {
                pieces.push(&text[start..end - 1]);
            }
            carry = Some(end - 1);
        } else {
            pieces.push(&text[start..end]);
        }
    }
    pieces
}
