//! Unknown-name detection, prototype rules and local-context rules.

use std::collections::BTreeSet;
use std::ops::Range;

use crate::kb::{AttrId, AttributeKind, CategoryId, RefId};
use crate::matcher::shared_category;
use crate::mention::{Mention, Method};
use crate::overlay::DocumentKb;
use crate::rules::{
    AtomKind, CandidatePredicate, ContextAction, ContextRule, PatternAtom, PrototypeRule, Relation,
    RulePack,
};
use crate::text::fold_case;
use crate::tokenizer::{CaseClass, Document, Token};

pub const COMMON_WORD_ATTRIBUTE: &str = "common-word";
pub const DETERMINER_ATTRIBUTE: &str = "determiner";

/// Factor applied to a prototype match whose only uppercase evidence is a
/// sentence-initial capital.
const SENTENCE_INITIAL_DEMOTION: f64 = 0.75;

/// Folded surface with typographic apostrophes straightened.
pub(crate) fn fold_token(surface: &str) -> String {
    fold_case(surface).replace('\u{2019}', "'")
}

fn covered_mask(doc: &Document, mentions: &[Mention]) -> Vec<bool> {
    let mut covered = vec![false; doc.tokens.len()];
    for m in mentions {
        for c in &mut covered[m.tokens()] {
            *c = true;
        }
    }
    covered
}

/// Whether a capitalised token can start or continue an unknown name.
fn eligible(doc: &Document, dkb: &DocumentKb<'_>, covered: &[bool], i: usize) -> bool {
    let t = &doc.tokens[i];
    if covered[i] || !t.case_class.is_capitalized() {
        return false;
    }
    let common = dkb.base().attribute_id(COMMON_WORD_ATTRIBUTE);
    match dkb.resolve_word(&t.surface) {
        Some(w) => {
            if common.is_some_and(|a| dkb.word_has_attribute(w, a)) {
                return false;
            }
            let kb_lower = CaseClass::classify(&dkb.word(w).surface) == CaseClass::Lower;
            !(t.sentence_initial && kb_lower)
        }
        None => true,
    }
}

/// Index of the next eligible token reachable from `k` (the token after a
/// segment), directly or through a bridge.
fn bridge(
    doc: &Document,
    dkb: &DocumentKb<'_>,
    rules: &RulePack,
    covered: &[bool],
    k: usize,
    end: usize,
) -> Option<usize> {
    let tokens = &doc.tokens;
    let ok = |i: usize| i < end && eligible(doc, dkb, covered, i);
    let free = |i: usize| i < end && !covered[i];
    if !free(k) {
        return None;
    }
    if ok(k) {
        return Some(k);
    }
    let t = &tokens[k];
    if t.is_hyphen() || t.surface == "'" || t.surface == "\u{2019}" {
        if ok(k + 1) {
            return Some(k + 1);
        }
        // Condé-sur-Huisne
        if t.is_hyphen()
            && free(k + 1)
            && tokens[k + 1].case_class == CaseClass::Lower
            && free(k + 2)
            && tokens[k + 2].is_hyphen()
            && ok(k + 3)
        {
            return Some(k + 3);
        }
        return None;
    }
    let is_connector = |i: usize| {
        free(i)
            && !tokens[i].is_punct()
            && rules.connectors.contains(&fold_token(&tokens[i].surface))
    };
    let mut n = 0;
    while n < 2 && is_connector(k + n) {
        n += 1;
        if ok(k + n) {
            return Some(k + n);
        }
    }
    None
}

/// Maximal runs of capitalised tokens not covered by `known`, within a
/// sentence, possibly bridged by hyphens, apostrophes and connector words.
pub fn detect_unknown_segments(
    doc: &Document,
    dkb: &DocumentKb<'_>,
    known: &[Mention],
    rules: &RulePack,
) -> Vec<Range<usize>> {
    let covered = covered_mask(doc, known);
    let mut out = Vec::new();
    for sentence in &doc.sentences {
        let mut i = sentence.start;
        while i < sentence.end {
            if !eligible(doc, dkb, &covered, i) {
                i += 1;
                continue;
            }
            let start = i;
            let mut end = i + 1;
            while let Some(next) = bridge(doc, dkb, rules, &covered, end, sentence.end) {
                end = next + 1;
            }
            out.push(start..end);
            i = end;
        }
    }
    out
}

#[derive(Debug, Clone)]
enum Unit {
    Token(usize),
    Mention(Mention),
}

impl Unit {
    fn first_token(&self) -> usize {
        match self {
            Unit::Token(i) => *i,
            Unit::Mention(m) => m.start,
        }
    }

    fn last_token(&self) -> usize {
        match self {
            Unit::Token(i) => *i,
            Unit::Mention(m) => m.end - 1,
        }
    }
}

struct Engine<'x, 'k> {
    doc: &'x Document,
    dkb: &'x DocumentKb<'k>,
    rules: &'x [PrototypeRule],
    markers: Vec<AttrId>,
}

impl<'x, 'k> Engine<'x, 'k> {
    fn new(doc: &'x Document, dkb: &'x DocumentKb<'k>, rules: &'x [PrototypeRule]) -> Self {
        let markers = dkb
            .base()
            .attributes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.kind == AttributeKind::WordMarker)
            .map(|(i, _)| AttrId(i as u16))
            .collect();
        Self {
            doc,
            dkb,
            rules,
            markers,
        }
    }

    fn is_unknown_upcase(&self, t: &Token) -> bool {
        if !t.case_class.is_capitalized() {
            return false;
        }
        match self.dkb.resolve_word(&t.surface) {
            None => true,
            Some(w) => !self
                .markers
                .iter()
                .any(|&a| self.dkb.word_has_attribute(w, a)),
        }
    }

    fn atom_matches(&self, atom: &AtomKind, unit: &Unit) -> bool {
        match (atom, unit) {
            (AtomKind::Any, _) => true,
            (AtomKind::Mention(c), Unit::Mention(m)) => m.extendable && m.category == Some(*c),
            (AtomKind::Mention(_), Unit::Token(_)) => false,
            (_, Unit::Mention(_)) => false,
            (AtomKind::WordAttribute(a), Unit::Token(i)) => self
                .dkb
                .surface_has_attribute(&self.doc.tokens[*i].surface, Some(*a)),
            (AtomKind::UnknownUpcase, Unit::Token(i)) => {
                self.is_unknown_upcase(&self.doc.tokens[*i])
            }
            (AtomKind::Literal(alts), Unit::Token(i)) => {
                let f = fold_token(&self.doc.tokens[*i].surface);
                alts.contains(&f)
            }
        }
    }

    /// End unit index of a match of `pattern` starting at `ui`, greedy with
    /// backtracking. With `must_end`, only a match ending there counts.
    fn match_at(
        &self,
        pattern: &[PatternAtom],
        units: &[Unit],
        ui: usize,
        must_end: Option<usize>,
    ) -> Option<usize> {
        let Some((atom, rest)) = pattern.split_first() else {
            return match must_end {
                Some(e) if e != ui => None,
                _ => Some(ui),
            };
        };
        let (min, max) = atom.repeat.bounds();
        let mut n = 0;
        while n < max && ui + n < units.len() && self.atom_matches(&atom.kind, &units[ui + n]) {
            n += 1;
        }
        if n < min {
            return None;
        }
        (min..=n)
            .rev()
            .find_map(|k| self.match_at(rest, units, ui + k, must_end))
    }

    fn build(&self, rule: &PrototypeRule, units: &[Unit]) -> Mention {
        let start = units[0].first_token();
        let end = units[units.len() - 1].last_token() + 1;
        let mut evidence = 0;
        let mut initial_only = true;
        for u in units {
            match u {
                Unit::Mention(_) => {
                    evidence += 1;
                    initial_only = false;
                }
                Unit::Token(i) => {
                    let t = &self.doc.tokens[*i];
                    if t.case_class.is_capitalized() {
                        evidence += 1;
                        initial_only &= t.sentence_initial;
                    }
                }
            }
        }
        let mut confidence = Method::Prototype.confidence();
        if evidence == 1 && initial_only {
            confidence *= SENTENCE_INITIAL_DEMOTION;
        }
        Mention {
            start,
            end,
            surface: self.doc.text[self.doc.byte_span(start..end)].to_string(),
            candidates: BTreeSet::new(),
            forms: BTreeSet::new(),
            category: Some(rule.category),
            confidence,
            doubtful: false,
            method: Method::Prototype,
            extendable: rule.extendable,
        }
    }

    /// Applies rules to a fixpoint. Anchored rules only run when `closed`,
    /// and then must cover the whole window.
    fn run(&self, units: &mut Vec<Unit>, closed: bool) {
        loop {
            let mut hit = None;
            'scan: for start in 0..units.len() {
                for rule in self.rules {
                    if rule.anchored && (!closed || start != 0) {
                        continue;
                    }
                    let must_end = rule.anchored.then_some(units.len());
                    let Some(end) = self.match_at(&rule.pattern, units, start, must_end) else {
                        continue;
                    };
                    if end == start
                        || (end - start == 1 && matches!(units[start], Unit::Mention(_)))
                    {
                        continue;
                    }
                    hit = Some((start, end, rule));
                    break 'scan;
                }
            }
            let Some((start, end, rule)) = hit else { break };
            let m = self.build(rule, &units[start..end]);
            units.splice(start..end, [Unit::Mention(m)]);
        }
    }
}

fn units_for(range: Range<usize>, mentions: &[Mention]) -> Vec<Unit> {
    let mut units = Vec::new();
    let mut i = range.start;
    let mut ms = mentions
        .iter()
        .filter(|m| m.start >= range.start && m.end <= range.end)
        .peekable();
    while i < range.end {
        if let Some(m) = ms.next_if(|m| m.start == i) {
            i = m.end;
            units.push(Unit::Mention(m.clone()));
        } else {
            units.push(Unit::Token(i));
            i += 1;
        }
    }
    units
}

/// Runs the prototype rules over every sentence. Known mentions may be
/// absorbed into larger prototype names; capitalised segments no rule
/// explains are returned as uncategorised `Segment` mentions. The result
/// is sorted by position.
pub fn classify_unknowns(
    doc: &Document,
    dkb: &DocumentKb<'_>,
    rules: &RulePack,
    known: Vec<Mention>,
    segments: &[Range<usize>],
) -> Vec<Mention> {
    let engine = Engine::new(doc, dkb, &rules.prototypes);
    let mut out = Vec::with_capacity(known.len());
    for sentence in &doc.sentences {
        let mut units = units_for(sentence.clone(), &known);
        engine.run(&mut units, false);
        out.extend(units.into_iter().filter_map(|u| match u {
            Unit::Mention(m) => Some(m),
            Unit::Token(_) => None,
        }));
    }
    let covered = covered_mask(doc, &out);
    for seg in segments {
        let mut i = seg.start;
        while i < seg.end {
            if covered[i] || !doc.tokens[i].case_class.is_capitalized() {
                i += 1;
                continue;
            }
            let start = i;
            let mut end = i + 1;
            let mut j = i + 1;
            while j < seg.end && !covered[j] {
                if doc.tokens[j].case_class.is_capitalized() {
                    end = j + 1;
                }
                j += 1;
            }
            out.push(segment_mention(doc, start, end));
            i = end;
        }
    }
    out.sort_by_key(|m| m.start);
    out
}

fn segment_mention(doc: &Document, start: usize, end: usize) -> Mention {
    Mention {
        start,
        end,
        surface: doc.text[doc.byte_span(start..end)].to_string(),
        candidates: BTreeSet::new(),
        forms: BTreeSet::new(),
        category: None,
        confidence: Method::Segment.confidence(),
        doubtful: true,
        method: Method::Segment,
        extendable: false,
    }
}

/// Applies prototype rules to one segment, together with the capitalised
/// tokens and known mentions adjacent to it (possibly across a hyphen). Returns
/// the prototype mention covering the segment, if a rule fired.
pub fn apply_prototypes(
    segment: Range<usize>,
    doc: &Document,
    dkb: &DocumentKb<'_>,
    rules: &[PrototypeRule],
    known: &[Mention],
) -> Option<Mention> {
    let sentence = doc.sentence_range(segment.start);
    let covering = |i: usize| known.iter().find(|m| m.start <= i && i < m.end);
    let name_like = |i: usize| {
        sentence.contains(&i)
            && !doc.tokens[i].is_hyphen()
            && (doc.tokens[i].case_class.is_capitalized() || covering(i).is_some())
    };
    let mut window = segment.clone();
    while window.start > sentence.start {
        let mut p = window.start - 1;
        if doc.tokens[p].is_hyphen() && p > sentence.start {
            p -= 1;
        }
        if !name_like(p) {
            break;
        }
        window.start = covering(p).map_or(p, |m| m.start);
    }
    while window.end < sentence.end {
        let mut p = window.end;
        if doc.tokens[p].is_hyphen() {
            p += 1;
        }
        if !name_like(p) {
            break;
        }
        window.end = covering(p).map_or(p + 1, |m| m.end);
    }
    let engine = Engine::new(doc, dkb, rules);
    let mut units = units_for(window, known);
    engine.run(&mut units, false);
    units.into_iter().find_map(|u| match u {
        Unit::Mention(m)
            if m.method == Method::Prototype
                && m.start <= segment.start
                && m.end >= segment.end =>
        {
            Some(m)
        }
        _ => None,
    })
}

/// Category of a closed token window (an acronym expansion) when the
/// rules, anchored ones included, reduce it to a single name.
pub fn classify_window(
    window: Range<usize>,
    doc: &Document,
    dkb: &DocumentKb<'_>,
    rules: &[PrototypeRule],
    known: &[Mention],
) -> Option<CategoryId> {
    let engine = Engine::new(doc, dkb, rules);
    let inner: Vec<Mention> = known
        .iter()
        .filter(|m| m.start >= window.start && m.end <= window.end && m.tokens() != window)
        .cloned()
        .collect();
    let mut units = units_for(window, &inner);
    engine.run(&mut units, true);
    match units.as_slice() {
        [Unit::Mention(m)] => m.category,
        _ => None,
    }
}

fn has_attr(dkb: &DocumentKb<'_>, t: &Token, attr: Option<AttrId>) -> bool {
    !t.is_punct() && dkb.surface_has_attribute(&t.surface, attr)
}

/// References named by the trigger of `rule` around `mention`, if the rule's
/// relation holds. Returns `Some(empty)` when the trigger is a word.
fn trigger(
    rule: &ContextRule,
    mention: &Mention,
    doc: &Document,
    dkb: &DocumentKb<'_>,
    rules: &RulePack,
    others: &[Mention],
) -> Option<BTreeSet<RefId>> {
    let tokens = &doc.tokens;
    let sentence = doc.sentence_range(mention.start);
    let determiner = dkb.base().attribute_id(DETERMINER_ATTRIBUTE);
    match rule.relation {
        Relation::AppositionAfter => {
            let k = mention.end;
            if k >= sentence.end || tokens[k].surface != "," {
                return None;
            }
            let mut j = k + 1;
            let mut skipped = 0;
            while j < sentence.end {
                let t = &tokens[j];
                if has_attr(dkb, t, Some(rule.trigger)) {
                    return Some(BTreeSet::new());
                }
                let skippable = has_attr(dkb, t, determiner)
                    || (t.case_class == CaseClass::Lower && !t.is_punct());
                if !skippable || skipped == 2 {
                    return None;
                }
                skipped += 1;
                j += 1;
            }
            None
        }
        Relation::ComplementOfBefore => {
            let mut p = mention.start.checked_sub(1)?;
            if p > sentence.start && has_attr(dkb, &tokens[p], determiner) {
                p -= 1;
            }
            if p <= sentence.start
                || !rules
                    .of_prepositions
                    .contains(&fold_token(&tokens[p].surface))
            {
                return None;
            }
            has_attr(dkb, &tokens[p - 1], Some(rule.trigger)).then(BTreeSet::new)
        }
        Relation::ParentheticalAfter => {
            let k = mention.end;
            if k + 2 >= sentence.end || tokens[k].surface != "(" {
                return None;
            }
            let trigger_name = &dkb.base().attribute(rule.trigger).name;
            let inner = others.iter().find(|o| o.start == k + 1)?;
            let closes = inner.end < sentence.end && tokens[inner.end].surface == ")";
            let category_ok = inner
                .category
                .is_some_and(|c| dkb.category_name(c) == trigger_name);
            (closes && category_ok).then(|| inner.candidates.clone())
        }
    }
}

fn restrict(mention: &mut Mention, keep: impl Fn(RefId) -> bool, dkb: &DocumentKb<'_>) {
    let kept: BTreeSet<RefId> = mention
        .candidates
        .iter()
        .copied()
        .filter(|&r| keep(r))
        .collect();
    if kept.len() == mention.candidates.len() {
        return;
    }
    if kept.is_empty() {
        mention.doubtful = true;
        return;
    }
    mention.candidates = kept;
    mention.category = shared_category(dkb, &mention.candidates);
    if mention.candidates.len() == 1 {
        mention.set_method(Method::LocalContext);
        mention.doubtful = false;
    } else {
        mention.confidence = mention.method.confidence() / mention.candidates.len() as f64;
    }
}

/// Categorises an uncategorised mention, or prunes the candidates of an
/// ambiguous one, from its immediate neighbourhood. `others` are the
/// document's other mentions (for parenthetical triggers).
pub fn apply_local_context(
    mention: &Mention,
    doc: &Document,
    dkb: &DocumentKb<'_>,
    rules: &RulePack,
    others: &[Mention],
) -> Mention {
    let mut out = mention.clone();
    for rule in &rules.context {
        let unknown = out.category.is_none() && out.candidates.len() <= 1;
        if !unknown && !out.is_ambiguous() {
            break;
        }
        let Some(trigger_refs) = trigger(rule, &out, doc, dkb, rules, others) else {
            continue;
        };
        match &rule.action {
            ContextAction::AssignCategory(c) => {
                if unknown {
                    out.category = Some(*c);
                    if out.method == Method::Segment {
                        out.set_method(Method::LocalContext);
                    }
                    out.doubtful = false;
                } else {
                    restrict(&mut out, |r| dkb.category_of(r) == Some(*c), dkb);
                }
            }
            ContextAction::RestrictCandidatesTo(pred) => {
                if !out.is_ambiguous() {
                    if unknown {
                        if let CandidatePredicate::Category(c) = pred {
                            out.category = Some(*c);
                            out.set_method(Method::LocalContext);
                            out.doubtful = false;
                        }
                    }
                    continue;
                }
                match pred {
                    CandidatePredicate::Category(c) => {
                        restrict(&mut out, |r| dkb.category_of(r) == Some(*c), dkb)
                    }
                    CandidatePredicate::Attribute(a) => {
                        restrict(&mut out, |r| dkb.reference(r).attributes.contains(a), dkb)
                    }
                    CandidatePredicate::LocatedInTrigger => {
                        if trigger_refs.len() == 1 {
                            restrict(
                                &mut out,
                                |r| {
                                    dkb.reference(r)
                                        .located_in
                                        .iter()
                                        .any(|l| trigger_refs.contains(l))
                                },
                                dkb,
                            )
                        }
                    }
                }
            }
        }
    }
    out
}
