//! Name normalization shared by table ingest and author lookup.
//!
//! Reference tables publish names as uppercase ASCII with no punctuation, so
//! both sides of a lookup are squashed to that form: accents are stripped by
//! canonical decomposition, a handful of letters without a decomposition are
//! mapped by hand, and anything that is not an ASCII letter is dropped.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Letters with no canonical decomposition but an obvious one-letter ASCII
/// equivalent. Multi-letter expansions (`ß`, `æ`, `œ`) are deliberately absent.
fn fold_special(c: char) -> Option<char> {
    Some(match c {
        'ł' | 'Ł' => 'L',
        'ø' | 'Ø' => 'O',
        'đ' | 'Đ' | 'ð' | 'Ð' => 'D',
        'ħ' | 'Ħ' => 'H',
        'ı' => 'I',
        'ŧ' | 'Ŧ' => 'T',
        _ => return None,
    })
}

/// Normalize a personal name for table lookup.
///
/// Returns an empty string when the input contains no usable letters; callers
/// treat that as a missing name.
pub fn normalize_name(raw: &str) -> String {
    raw.trim()
        .nfd()
        .filter(|c| !is_combining_mark(*c))
        .filter_map(|c| {
            if c.is_ascii_alphabetic() {
                Some(c.to_ascii_uppercase())
            } else {
                fold_special(c)
            }
        })
        .collect()
}
