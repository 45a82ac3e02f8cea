//! Document-wide passes: acronym definitions, radical links and homonym
//! selection by form counting.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Range;

use crate::kb::RefId;
use crate::mention::{Mention, Method};
use crate::overlay::{DocumentKb, NewReference, OverlayOrigin};
use crate::text::{fold_letters, initial};
use crate::tokenizer::{CaseClass, Document};

pub const ACRONYM_SKIPPABLE_ATTRIBUTE: &str = "acronym-skippable";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcronymOrder {
    /// `International Primary Aluminium Institute (IPAI)`
    ExpansionFirst,
    /// `AIEA (Agence Internationale de l'Energie Atomique)`
    AcronymFirst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcronymCandidate {
    pub acronym_span: Range<usize>,
    pub expansion_span: Range<usize>,
    pub order: AcronymOrder,
    pub reference: RefId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadicalLink {
    /// Indices into the mention list.
    pub short_mention: usize,
    pub long_mention: usize,
    pub shared_words: Vec<String>,
}

fn acronym_letters(acronym: &str) -> Vec<char> {
    fold_letters(acronym)
        .chars()
        .filter(|c| c.is_alphabetic())
        .collect()
}

/// Whether the acronym spells the initials of `words`, where words marked
/// `acronym-skippable` and punctuation may be skipped. Every other word
/// must contribute its initial, and every letter must be used.
pub fn match_acronym_letters(acronym: &str, words: &[&str], dkb: &DocumentKb<'_>) -> bool {
    let letters = acronym_letters(acronym);
    if letters.len() < 2 || words.is_empty() {
        return false;
    }
    let skip_attr = dkb.base().attribute_id(ACRONYM_SKIPPABLE_ATTRIBUTE);
    let items: Vec<(Option<char>, bool)> = words
        .iter()
        .map(|w| {
            let init = initial(w).and_then(|c| fold_letters(&c.to_string()).chars().next());
            let skippable = init.is_none() || dkb.surface_has_attribute(w, skip_attr);
            (init, skippable)
        })
        .collect();
    let mut memo = HashMap::new();
    align(&items, &letters, 0, 0, &mut memo)
}

fn align(
    items: &[(Option<char>, bool)],
    letters: &[char],
    i: usize,
    j: usize,
    memo: &mut HashMap<(usize, usize), bool>,
) -> bool {
    if i == items.len() {
        return j == letters.len();
    }
    if let Some(&v) = memo.get(&(i, j)) {
        return v;
    }
    let (init, skippable) = items[i];
    let take =
        j < letters.len() && init == Some(letters[j]) && align(items, letters, i + 1, j + 1, memo);
    let v = take || (skippable && align(items, letters, i + 1, j, memo));
    memo.insert((i, j), v);
    v
}

fn is_acronym_token(surface: &str, class: CaseClass) -> bool {
    matches!(class, CaseClass::AllCaps | CaseClass::Mixed)
        && surface.chars().filter(|c| c.is_alphabetic()).count() >= 2
}

/// Surfaces of a token span, without hyphens.
fn span_words(doc: &Document, span: Range<usize>) -> Vec<String> {
    doc.tokens[span]
        .iter()
        .filter(|t| !t.is_hyphen())
        .map(|t| t.surface.clone())
        .collect()
}

/// Finds `expansion (ACRONYM)` and `ACRONYM (expansion)` definitions,
/// registers each accepted pair as forms of one reference in the overlay,
/// and returns them. An expansion that is already a known, unambiguous
/// name lends its reference; otherwise a new overlay reference is made,
/// categorised when the expansion's known mention has a category.
pub fn detect_acronym_defs(
    doc: &Document,
    dkb: &mut DocumentKb<'_>,
    known: &[Mention],
) -> Vec<AcronymCandidate> {
    let tokens = &doc.tokens;
    let mut out = Vec::new();
    for sentence in &doc.sentences {
        for open in sentence.clone() {
            if tokens[open].surface != "(" || open == sentence.start {
                continue;
            }
            let Some(close) = (open + 1..sentence.end)
                .find(|&k| tokens[k].surface == ")" || tokens[k].surface == "(")
                .filter(|&k| tokens[k].surface == ")")
            else {
                continue;
            };
            let content = open + 1..close;
            if content.is_empty() {
                continue;
            }
            let found = expansion_first(doc, dkb, sentence.start, open, content.clone())
                .or_else(|| acronym_first(doc, dkb, open, content));
            if let Some((acronym_span, expansion_span, order)) = found {
                let reference = register(doc, dkb, known, &acronym_span, &expansion_span);
                out.push(AcronymCandidate {
                    acronym_span,
                    expansion_span,
                    order,
                    reference,
                });
            }
        }
    }
    out
}

type Found = (Range<usize>, Range<usize>, AcronymOrder);

fn expansion_first(
    doc: &Document,
    dkb: &DocumentKb<'_>,
    sentence_start: usize,
    open: usize,
    content: Range<usize>,
) -> Option<Found> {
    let tokens = &doc.tokens;
    if content.len() != 1 {
        return None;
    }
    let acr = &tokens[content.start];
    if !is_acronym_token(&acr.surface, acr.case_class) {
        return None;
    }
    let bound = 3 * acronym_letters(&acr.surface).len() + 4;
    let floor = open.saturating_sub(bound).max(sentence_start);
    let mut s = open;
    while s > floor {
        s -= 1;
        let t = &tokens[s];
        if matches!(t.surface.as_str(), "(" | ")" | "." | ";" | ":") {
            break;
        }
        if !t.case_class.is_capitalized() {
            continue;
        }
        let words = span_words(doc, s..open);
        let refs: Vec<&str> = words.iter().map(String::as_str).collect();
        if match_acronym_letters(&acr.surface, &refs, dkb) {
            return Some((content, s..open, AcronymOrder::ExpansionFirst));
        }
    }
    None
}

fn acronym_first(
    doc: &Document,
    dkb: &DocumentKb<'_>,
    open: usize,
    content: Range<usize>,
) -> Option<Found> {
    let tokens = &doc.tokens;
    let acr = &tokens[open - 1];
    if !is_acronym_token(&acr.surface, acr.case_class)
        || !tokens[content.start].case_class.is_capitalized()
    {
        return None;
    }
    let words = span_words(doc, content.clone());
    let refs: Vec<&str> = words.iter().map(String::as_str).collect();
    match_acronym_letters(&acr.surface, &refs, dkb)
        .then(|| (open - 1..open, content, AcronymOrder::AcronymFirst))
}

fn register(
    doc: &Document,
    dkb: &mut DocumentKb<'_>,
    known: &[Mention],
    acronym: &Range<usize>,
    expansion: &Range<usize>,
) -> RefId {
    let acronym_words = span_words(doc, acronym.clone());
    let expansion_words = span_words(doc, expansion.clone());
    let forms = [acronym_words.clone(), expansion_words];
    let exact = known.iter().find(|m| m.tokens() == *expansion);
    if let Some(m) = exact.filter(|m| m.candidates.len() == 1) {
        let rid = *m.candidates.iter().next().unwrap();
        dkb.attach_forms(rid, &forms);
        return rid;
    }
    dkb.extend_overlay(
        NewReference {
            id: format!("doc:acronym:{}", acronym_words.join(" ")),
            category: exact.and_then(|m| m.category),
            attributes: Vec::new(),
            origin: OverlayOrigin::AcronymDefinition,
        },
        &forms,
    )
}

fn mention_words(doc: &Document, m: &Mention) -> Vec<String> {
    doc.tokens[m.tokens()]
        .iter()
        .filter(|t| !t.is_punct())
        .map(|t| fold_letters(&t.surface))
        .collect()
}

fn contains_run(long: &[String], short: &[String]) -> bool {
    !short.is_empty() && long.len() >= short.len() && long.windows(short.len()).any(|w| w == short)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Referent {
    Reference(RefId),
    Name(u16, Vec<String>),
}

/// Gives an uncategorised mention the category (and reference) of the one
/// categorised name in the document that contains its words. When several
/// distinct names contain it, the mention is marked doubtful instead.
pub fn link_radicals(
    doc: &Document,
    mentions: &mut [Mention],
    _dkb: &DocumentKb<'_>,
) -> Vec<RadicalLink> {
    let words: Vec<Vec<String>> = mentions.iter().map(|m| mention_words(doc, m)).collect();
    let categorised: Vec<usize> = (0..mentions.len())
        .filter(|&i| mentions[i].category.is_some())
        .collect();
    let mut links = Vec::new();
    for i in 0..mentions.len() {
        let m = &mentions[i];
        if m.category.is_some() || m.is_ambiguous() {
            continue;
        }
        let mut referents: BTreeMap<Referent, usize> = BTreeMap::new();
        for &j in &categorised {
            if j == i || !contains_run(&words[j], &words[i]) {
                continue;
            }
            let n = &mentions[j];
            let key = match n.candidates.len() {
                1 => Referent::Reference(*n.candidates.iter().next().unwrap()),
                _ => Referent::Name(n.category.unwrap().0, words[j].clone()),
            };
            referents.entry(key).or_insert(j);
        }
        match referents.len() {
            0 => {}
            1 => {
                let (key, j) = referents.into_iter().next().unwrap();
                let category = mentions[j].category;
                let m = &mut mentions[i];
                m.category = category;
                if let Referent::Reference(r) = key {
                    m.candidates = BTreeSet::from([r]);
                }
                m.set_method(Method::RadicalLink);
                m.doubtful = false;
                links.push(RadicalLink {
                    short_mention: i,
                    long_mention: j,
                    shared_words: words[i].clone(),
                });
            }
            _ => mentions[i].doubtful = true,
        }
    }
    links
}

/// Chooses one reference for every ambiguous mention: the candidate with
/// the most distinct forms present in the document, when that count is a
/// unique maximum backed by real evidence; otherwise the most frequent
/// reading, flagged doubtful.
pub fn disambiguate_global(_doc: &Document, mentions: &mut [Mention], dkb: &DocumentKb<'_>) {
    let present: BTreeSet<_> = mentions
        .iter()
        .flat_map(|m| m.forms.iter().copied())
        .collect();
    let confirmed: BTreeSet<RefId> = mentions
        .iter()
        .filter(|m| m.candidates.len() == 1)
        .flat_map(|m| m.candidates.iter().copied())
        .collect();
    for m in mentions.iter_mut().filter(|m| m.is_ambiguous()) {
        let counts: Vec<(RefId, usize)> = m
            .candidates
            .iter()
            .map(|&r| {
                let n = dkb
                    .forms_of(r)
                    .iter()
                    .filter(|f| present.contains(f))
                    .count();
                (r, n)
            })
            .collect();
        let max = counts.iter().map(|c| c.1).max().unwrap_or(0);
        let leaders: Vec<RefId> = counts.iter().filter(|c| c.1 == max).map(|c| c.0).collect();
        let backed: Vec<RefId> = m
            .candidates
            .iter()
            .copied()
            .filter(|r| confirmed.contains(r))
            .collect();
        let chosen = if leaders.len() == 1 && max >= 2 {
            Some(leaders[0])
        } else if backed.len() == 1 {
            Some(backed[0])
        } else {
            None
        };
        match chosen {
            Some(r) => {
                m.candidates = BTreeSet::from([r]);
                m.category = dkb.category_of(r);
                let method = m.method;
                m.set_method(method);
                m.doubtful = false;
            }
            None => {
                let r = *m
                    .candidates
                    .iter()
                    .min_by(|&&a, &&b| {
                        let (ra, rb) = (dkb.reference(a), dkb.reference(b));
                        ra.frequency_rank
                            .cmp(&rb.frequency_rank)
                            .then_with(|| ra.id.cmp(&rb.id))
                    })
                    .unwrap();
                m.candidates = BTreeSet::from([r]);
                m.category = dkb.category_of(r);
                m.set_method(Method::FrequencyFallback);
                m.doubtful = true;
            }
        }
    }
}
