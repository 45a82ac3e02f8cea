//! Longest-match scanning of knowledge-base forms.
//!
//! Tokens are resolved to words, words to their equivalence-class
//! representative, and the representative sequence is walked through the
//! base trie and the document overlay trie in lockstep. A single hyphen
//! between two words is transparent, so `Saint-Louis` and `Saint Louis`
//! share a key; so is a full stop glued to a word marked `abbreviation`
//! (`Soc. gen.`).

use std::collections::BTreeSet;

use crate::kb::{CategoryId, FormId, RefId};
use crate::mention::{Mention, Method};
use crate::overlay::DocumentKb;
use crate::tokenizer::{Document, Token};

pub const ABBREVIATION_ATTRIBUTE: &str = "abbreviation";

/// Per-token resolution against a document KB.
#[derive(Debug, Clone)]
pub struct ResolvedTokens {
    /// Canonical key atom, `None` for bridges and unknown surfaces.
    pub atoms: Vec<Option<u32>>,
    abbreviation: Vec<bool>,
}

impl ResolvedTokens {
    pub fn new(doc: &Document, dkb: &DocumentKb<'_>) -> Self {
        let abbrev_attr = dkb.base().attribute_id(ABBREVIATION_ATTRIBUTE);
        let mut atoms = Vec::with_capacity(doc.tokens.len());
        let mut abbreviation = Vec::with_capacity(doc.tokens.len());
        for t in &doc.tokens {
            if t.is_hyphen() {
                atoms.push(None);
                abbreviation.push(false);
                continue;
            }
            let word = dkb.resolve_word(&t.surface);
            atoms.push(word.map(|w| dkb.canonical(w)));
            abbreviation.push(match (word, abbrev_attr) {
                (Some(w), Some(a)) => dkb.word_has_attribute(w, a),
                _ => false,
            });
        }
        Self {
            atoms,
            abbreviation,
        }
    }

    /// The token after word `j` that continues a form, skipping one
    /// abbreviation full stop and one hyphen. `None` at the sentence end.
    pub fn next_word(&self, tokens: &[Token], j: usize, end: usize) -> Option<usize> {
        let mut k = j + 1;
        if k < end
            && self.abbreviation[j]
            && tokens[k].surface == "."
            && tokens[k].start == tokens[j].end
        {
            k += 1;
        }
        if k < end && tokens[k].is_hyphen() {
            k += 1;
        }
        (k < end && !tokens[k].is_hyphen()).then_some(k)
    }
}

/// Canonical key of a token subsequence, or `None` if some word is
/// unknown. Hyphens between words and abbreviation full stops are dropped.
pub fn normalize_sequence(dkb: &DocumentKb<'_>, tokens: &[Token]) -> Option<Vec<u32>> {
    let abbrev_attr = dkb.base().attribute_id(ABBREVIATION_ATTRIBUTE);
    let mut key = Vec::with_capacity(tokens.len());
    let mut prev_abbrev_end: Option<usize> = None;
    for (i, t) in tokens.iter().enumerate() {
        let between_words = i > 0 && i + 1 < tokens.len();
        if t.is_hyphen() && between_words {
            continue;
        }
        if t.surface == "." && prev_abbrev_end == Some(t.start) {
            prev_abbrev_end = None;
            continue;
        }
        let word = dkb.resolve_word(&t.surface)?;
        prev_abbrev_end = match abbrev_attr {
            Some(a) if dkb.word_has_attribute(word, a) => Some(t.end),
            _ => None,
        };
        key.push(dkb.canonical(word));
    }
    (!key.is_empty()).then_some(key)
}

/// Finds every knowledge-base form in the document, longest match first,
/// scanning left to right; matched tokens are consumed.
pub fn match_known(doc: &Document, dkb: &DocumentKb<'_>) -> Vec<Mention> {
    let resolved = ResolvedTokens::new(doc, dkb);
    match_known_resolved(doc, dkb, &resolved)
}

pub(crate) fn match_known_resolved(
    doc: &Document,
    dkb: &DocumentKb<'_>,
    resolved: &ResolvedTokens,
) -> Vec<Mention> {
    let base = dkb.base_trie();
    let overlay = dkb.overlay_trie();
    let mut mentions = Vec::new();
    for sentence in &doc.sentences {
        let mut i = sentence.start;
        while i < sentence.end {
            if resolved.atoms[i].is_none() {
                i += 1;
                continue;
            }
            let mut best: Option<(usize, Vec<FormId>)> = None;
            let mut cb = Some(base.root());
            let mut co = Some(overlay.root());
            let mut capitalized = false;
            let mut j = i;
            while let Some(atom) = resolved.atoms[j] {
                cb = cb.and_then(|c| base.step(c, atom));
                co = co.and_then(|c| overlay.step(c, atom));
                if cb.is_none() && co.is_none() {
                    break;
                }
                capitalized |= doc.tokens[j].case_class.is_capitalized();
                let mut terminals: Vec<FormId> = Vec::new();
                if let Some(c) = cb {
                    terminals.extend_from_slice(base.terminals(c));
                }
                if let Some(c) = co {
                    terminals.extend_from_slice(overlay.terminals(c));
                }
                if !terminals.is_empty() && capitalized {
                    best = Some((j + 1, terminals));
                }
                match resolved.next_word(&doc.tokens, j, sentence.end) {
                    Some(k) => j = k,
                    None => break,
                }
            }
            match best {
                Some((end, forms)) => {
                    mentions.push(known_mention(doc, dkb, i, end, forms));
                    i = end;
                }
                None => i += 1,
            }
        }
    }
    mentions
}

pub(crate) fn known_mention(
    doc: &Document,
    dkb: &DocumentKb<'_>,
    start: usize,
    end: usize,
    forms: Vec<FormId>,
) -> Mention {
    let base_forms = dkb.base().forms().len() as u32;
    let all_overlay = forms.iter().all(|f| f.0 >= base_forms);
    let candidates: BTreeSet<RefId> = forms.iter().map(|&f| dkb.form(f).reference).collect();
    let method = if all_overlay {
        Method::AcronymDef
    } else {
        Method::KnownForm
    };
    let category = shared_category(dkb, &candidates);
    let bytes = doc.byte_span(start..end);
    let n = candidates.len();
    Mention {
        start,
        end,
        surface: doc.text[bytes].to_string(),
        candidates,
        forms: forms.into_iter().collect(),
        category,
        confidence: method.confidence() / n as f64,
        doubtful: n > 1,
        method,
        extendable: true,
    }
}

/// The category common to all candidates, if there is one.
pub fn shared_category(dkb: &DocumentKb<'_>, candidates: &BTreeSet<RefId>) -> Option<CategoryId> {
    let mut it = candidates.iter().map(|&r| dkb.category_of(r));
    let first = it.next()??;
    it.all(|c| c == Some(first)).then_some(first)
}
