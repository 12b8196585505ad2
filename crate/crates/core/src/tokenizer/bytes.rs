//! Reversible byte ↔ printable code point table used by byte-level vocabularies.
//!
//! Bytes that are already printable (`!`..`~`, `¡`..`¬`, `®`..`ÿ`) map to
//! themselves. The 68 remaining bytes, in increasing order, map to U+0100,
//! U+0101, and so on.

use std::sync::OnceLock;

const SHIFTED_BASE: u32 = 256;

fn is_identity_byte(b: u8) -> bool {
    matches!(b, 33..=126 | 161..=172 | 174..=255)
}

fn forward_table() -> &'static [char; 256] {
    static TABLE: OnceLock<[char; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = ['\0'; 256];
        let mut next = SHIFTED_BASE;
        for b in 0..=255u8 {
            table[b as usize] = if is_identity_byte(b) {
                char::from(b)
            } else {
                let c = char::from_u32(next).expect("shifted range is valid");
                next += 1;
                c
            };
        }
        table
    })
}

fn shifted_bytes() -> &'static [u8] {
    static SHIFTED: OnceLock<Vec<u8>> = OnceLock::new();
    SHIFTED.get_or_init(|| (0..=255u8).filter(|&b| !is_identity_byte(b)).collect())
}

pub fn byte_to_unicode(b: u8) -> char {
    forward_table()[b as usize]
}

/// Inverse of [`byte_to_unicode`]; `None` for code points outside its image.
pub fn unicode_to_byte(c: char) -> Option<u8> {
    let cp = c as u32;
    if cp < 256 {
        let b = cp as u8;
        return is_identity_byte(b).then_some(b);
    }
    let offset = cp.checked_sub(SHIFTED_BASE)? as usize;
    shifted_bytes().get(offset).copied()
}

/// Maps UTF-8 bytes to their symbol string.
pub fn bytes_to_symbols(bytes: &[u8]) -> String {
    bytes.iter().map(|&b| byte_to_unicode(b)).collect()
}
