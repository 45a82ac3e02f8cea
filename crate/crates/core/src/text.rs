//! Small string helpers shared by the matchers.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Lower-cases a surface for case-insensitive word resolution.
pub fn fold_case(s: &str) -> String {
    s.to_lowercase()
}

/// Lower-cases and strips diacritics (`É` -> `e`).
pub fn fold_letters(s: &str) -> String {
    s.nfd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .collect()
}

/// First alphanumeric character of a word, case and diacritic folded.
pub fn initial(s: &str) -> Option<char> {
    let c = s.chars().find(|c| c.is_alphanumeric())?;
    fold_letters(c.encode_utf8(&mut [0; 4])).chars().next()
}

pub fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}
