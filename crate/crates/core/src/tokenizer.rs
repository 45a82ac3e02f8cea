//! Byte-offset tokenizer with case classes and sentence boundaries.
//!
//! Hyphens, commas, full stops, parentheses and other sentence punctuation
//! become standalone tokens. French elisions split after the apostrophe
//! (`l'Energie` -> `l'` `Energie`) while possessives stay whole (`Poor's`).

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::TextError;
use crate::text::is_apostrophe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseClass {
    InitialUpper,
    AllCaps,
    Lower,
    Mixed,
    Digit,
    Punct,
}

impl CaseClass {
    /// Carries uppercase evidence of a name.
    pub fn is_capitalized(self) -> bool {
        matches!(
            self,
            CaseClass::InitialUpper | CaseClass::AllCaps | CaseClass::Mixed
        )
    }

    pub fn classify(surface: &str) -> CaseClass {
        let mut letters = 0usize;
        let mut upper = 0usize;
        let mut digits = 0usize;
        let mut first_letter_upper = None;
        let mut later_upper = false;
        for c in surface.chars() {
            if c.is_alphabetic() {
                letters += 1;
                let is_upper = c.is_uppercase();
                if is_upper {
                    upper += 1;
                }
                match first_letter_upper {
                    None => first_letter_upper = Some(is_upper),
                    Some(_) => later_upper |= is_upper,
                }
            } else if c.is_numeric() {
                digits += 1;
            }
        }
        if letters == 0 {
            return if digits > 0 {
                CaseClass::Digit
            } else {
                CaseClass::Punct
            };
        }
        if digits > 0 {
            return CaseClass::Mixed;
        }
        if letters >= 2 && upper == letters {
            return CaseClass::AllCaps;
        }
        match (first_letter_upper, later_upper) {
            (Some(true), false) => CaseClass::InitialUpper,
            (Some(false), false) => CaseClass::Lower,
            _ => CaseClass::Mixed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Half-open byte offsets into the document text.
    pub start: usize,
    pub end: usize,
    pub case_class: CaseClass,
    pub sentence_initial: bool,
}

impl Token {
    pub fn span(&self) -> Range<usize> {
        self.start..self.end
    }

    pub fn is_punct(&self) -> bool {
        self.case_class == CaseClass::Punct
    }

    pub fn is_hyphen(&self) -> bool {
        matches!(self.surface.as_str(), "-" | "\u{2010}" | "\u{2011}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub text: String,
    pub tokens: Vec<Token>,
    /// Token-index ranges; they partition `0..tokens.len()`.
    pub sentences: Vec<Range<usize>>,
}

impl Document {
    /// Index of the sentence containing token `idx`.
    pub fn sentence_of(&self, idx: usize) -> usize {
        self.sentences
            .partition_point(|s| s.end <= idx)
            .min(self.sentences.len().saturating_sub(1))
    }

    pub fn sentence_range(&self, idx: usize) -> Range<usize> {
        self.sentences[self.sentence_of(idx)].clone()
    }

    /// Byte range covered by a token range.
    pub fn byte_span(&self, tokens: Range<usize>) -> Range<usize> {
        self.tokens[tokens.start].start..self.tokens[tokens.end - 1].end
    }

    /// Number of tokens that are words or numbers.
    pub fn word_count(&self) -> usize {
        self.tokens.iter().filter(|t| !t.is_punct()).count()
    }
}

const ELISIONS: &[&str] = &[
    "l", "d", "j", "m", "n", "s", "t", "c", "qu", "jusqu", "lorsqu", "puisqu",
];

fn is_standalone_punct(c: char) -> bool {
    matches!(
        c,
        '-' | '\u{2010}'
            | '\u{2011}'
            | '\u{2013}'
            | '\u{2014}'
            | ','
            | '('
            | ')'
            | '['
            | ']'
            | '{'
            | '}'
            | ';'
            | ':'
            | '!'
            | '?'
            | '"'
            | '\u{ab}'
            | '\u{bb}'
            | '\u{201c}'
            | '\u{201d}'
            | '/'
            | '\u{2026}'
    )
}

fn is_sentence_final(surface: &str) -> bool {
    matches!(surface, "." | "!" | "?" | "..." | "\u{2026}")
}

pub fn tokenize_bytes(doc_id: &str, bytes: &[u8]) -> Result<Document, TextError> {
    let text = std::str::from_utf8(bytes).map_err(|e| TextError::InvalidEncoding {
        offset: e.valid_up_to(),
    })?;
    Ok(tokenize(doc_id, text))
}

pub fn tokenize(doc_id: &str, text: &str) -> Document {
    let mut spans: Vec<(usize, usize)> = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].1.is_whitespace() {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < chars.len() && !chars[i].1.is_whitespace() {
            i += 1;
        }
        split_run(text, &chars[run_start..i], &mut spans);
    }

    let mut tokens: Vec<Token> = spans
        .into_iter()
        .map(|(start, end)| {
            let surface = text[start..end].to_string();
            let case_class = CaseClass::classify(&surface);
            Token {
                surface,
                start,
                end,
                case_class,
                sentence_initial: false,
            }
        })
        .collect();

    let mut sentences = Vec::new();
    let mut sent_start = 0;
    for idx in 1..tokens.len() {
        let prev = &tokens[idx - 1];
        let cur = &tokens[idx];
        let gap = &text[prev.end..cur.start];
        let paragraph_break = gap.matches('\n').count() >= 2;
        let starts_upper = cur
            .surface
            .chars()
            .find(|c| c.is_alphabetic())
            .is_some_and(char::is_uppercase)
            && cur.case_class.is_capitalized();
        let after_final = is_sentence_final(&prev.surface) && !gap.is_empty() && starts_upper;
        if paragraph_break || after_final {
            sentences.push(sent_start..idx);
            sent_start = idx;
        }
    }
    if !tokens.is_empty() {
        sentences.push(sent_start..tokens.len());
    }
    for s in &sentences {
        tokens[s.start].sentence_initial = true;
    }

    Document {
        doc_id: doc_id.to_string(),
        text: text.to_string(),
        tokens,
        sentences,
    }
}

/// Splits one whitespace-free run into token byte spans.
fn split_run(text: &str, run: &[(usize, char)], out: &mut Vec<(usize, usize)>) {
    let run_end = run.last().map(|(b, c)| b + c.len_utf8()).unwrap_or(0);
    let byte_at = |k: usize| if k < run.len() { run[k].0 } else { run_end };
    let mut word_start: Option<usize> = None;
    let flush = |out: &mut Vec<(usize, usize)>, word_start: &mut Option<usize>, end: usize| {
        if let Some(s) = word_start.take() {
            if s < end {
                out.push((s, end));
            }
        }
    };

    let mut k = 0;
    while k < run.len() {
        let (b, c) = run[k];
        let prev = if k > 0 { Some(run[k - 1].1) } else { None };
        let next = run.get(k + 1).map(|x| x.1);
        let in_word = word_start.is_some();

        if c == '.' {
            if in_word
                && prev.is_some_and(|p| p.is_ascii_digit())
                && next.is_some_and(|n| n.is_ascii_digit())
            {
                k += 1;
                continue;
            }
            flush(out, &mut word_start, b);
            if next == Some('.') && run.get(k + 2).map(|x| x.1) == Some('.') {
                out.push((b, byte_at(k + 3)));
                k += 3;
            } else {
                out.push((b, byte_at(k + 1)));
                k += 1;
            }
            continue;
        }
        if c == ','
            && in_word
            && prev.is_some_and(|p| p.is_ascii_digit())
            && next.is_some_and(|n| n.is_ascii_digit())
        {
            k += 1;
            continue;
        }
        if is_standalone_punct(c) {
            flush(out, &mut word_start, b);
            out.push((b, byte_at(k + 1)));
            k += 1;
            continue;
        }
        if is_apostrophe(c) {
            match word_start {
                Some(s) => {
                    let stem = text[s..b].to_lowercase();
                    if ELISIONS.contains(&stem.as_str()) {
                        out.push((s, byte_at(k + 1)));
                        word_start = None;
                    } else if next.is_some_and(char::is_alphabetic) {
                        // possessive or internal apostrophe: stays in the word
                    } else {
                        flush(out, &mut word_start, b);
                        out.push((b, byte_at(k + 1)));
                    }
                }
                None => out.push((b, byte_at(k + 1))),
            }
            k += 1;
            continue;
        }
        if word_start.is_none() {
            word_start = Some(b);
        }
        k += 1;
    }
    flush(out, &mut word_start, run_end);
}
