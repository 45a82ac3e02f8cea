//! Pass orchestration and standoff output.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::classifier::{
    apply_local_context, classify_unknowns, classify_window, detect_unknown_segments,
};
use crate::coref::{
    detect_acronym_defs, disambiguate_global, link_radicals, AcronymCandidate, RadicalLink,
};
use crate::error::EvalError;
use crate::kb::KnowledgeBase;
use crate::matcher::match_known;
use crate::mention::{Mention, Method};
use crate::overlay::{DocumentKb, NewReference, OverlayOrigin};
use crate::rules::RulePack;
use crate::text::fold_case;
use crate::tokenizer::{tokenize, Document};

pub const UNKNOWN_CATEGORY: &str = "unknown";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Run radical linking and global homonym selection.
    pub coreference: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { coreference: true }
    }
}

/// One output row per mention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub doc_id: String,
    pub start_byte: usize,
    pub end_byte: usize,
    pub surface: String,
    pub category: String,
    #[serde(default)]
    pub reference_id: Option<String>,
    pub confidence: f64,
    pub doubtful: bool,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDocument {
    pub doc_id: String,
    pub text: String,
}

/// Everything the passes produced for one document.
#[derive(Debug)]
pub struct Analysis<'k> {
    pub doc: Document,
    pub dkb: DocumentKb<'k>,
    pub mentions: Vec<Mention>,
    pub acronyms: Vec<AcronymCandidate>,
    pub radical_links: Vec<RadicalLink>,
}

#[derive(Debug, Clone, Copy)]
pub struct Annotator<'k> {
    kb: &'k KnowledgeBase,
    rules: &'k RulePack,
    options: PipelineOptions,
}

impl<'k> Annotator<'k> {
    pub fn new(kb: &'k KnowledgeBase, rules: &'k RulePack) -> Self {
        Self {
            kb,
            rules,
            options: PipelineOptions::default(),
        }
    }

    pub fn with_options(mut self, options: PipelineOptions) -> Self {
        self.options = options;
        self
    }

    pub fn analyze(&self, doc_id: &str, text: &str) -> Analysis<'k> {
        let rules = self.rules;
        let doc = tokenize(doc_id, text);
        let mut dkb = DocumentKb::new(self.kb);
        let mut known = match_known(&doc, &dkb);
        let acronyms = detect_acronym_defs(&doc, &mut dkb, &known);
        if !acronyms.is_empty() {
            known = match_known(&doc, &dkb);
        }

        let segments = detect_unknown_segments(&doc, &dkb, &known, rules);
        let mut mentions = classify_unknowns(&doc, &dkb, rules, known, &segments);

        for acr in &acronyms {
            if dkb.category_of(acr.reference).is_some() {
                continue;
            }
            let window = acr.expansion_span.clone();
            if let Some(c) = classify_window(window, &doc, &dkb, &rules.prototypes, &mentions) {
                dkb.set_category(acr.reference, c);
            }
        }
        register_prototype_names(&doc, &mut dkb, &mut mentions);
        propagate_overlay_categories(&mut mentions, &dkb);

        let snapshot = mentions.clone();
        for m in &mut mentions {
            if m.category.is_none() && m.candidates.len() <= 1 {
                let updated = apply_local_context(m, &doc, &dkb, rules, &snapshot);
                if let (Some(c), Some(&r)) = (updated.category, updated.candidates.iter().next()) {
                    dkb.set_category(r, c);
                }
                *m = updated;
            }
        }
        propagate_overlay_categories(&mut mentions, &dkb);
        let snapshot = mentions.clone();
        for m in &mut mentions {
            if m.is_ambiguous() {
                *m = apply_local_context(m, &doc, &dkb, rules, &snapshot);
            }
        }

        let mut radical_links = Vec::new();
        if self.options.coreference {
            radical_links = link_radicals(&doc, &mut mentions, &dkb);
            disambiguate_global(&doc, &mut mentions, &dkb);
        }
        for m in &mut mentions {
            if m.category.is_none() {
                m.doubtful = true;
            }
        }
        Analysis {
            doc,
            dkb,
            mentions,
            acronyms,
            radical_links,
        }
    }

    pub fn annotate(&self, doc_id: &str, text: &str) -> Vec<AnnotationRecord> {
        records(&self.analyze(doc_id, text))
    }

    /// Annotates documents in parallel when the `parallel` feature is on.
    /// Output is in input order either way.
    pub fn annotate_corpus(&self, docs: &[InputDocument]) -> Vec<Vec<AnnotationRecord>> {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            docs.par_iter()
                .map(|d| self.annotate(&d.doc_id, &d.text))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.annotate_corpus_sequential(docs)
        }
    }

    pub fn annotate_corpus_sequential(&self, docs: &[InputDocument]) -> Vec<Vec<AnnotationRecord>> {
        docs.iter()
            .map(|d| self.annotate(&d.doc_id, &d.text))
            .collect()
    }
}

pub fn annotate_document(
    doc_id: &str,
    text: &str,
    kb: &KnowledgeBase,
    rules: &RulePack,
) -> Vec<AnnotationRecord> {
    Annotator::new(kb, rules).annotate(doc_id, text)
}

fn name_words(doc: &Document, m: &Mention) -> Vec<String> {
    doc.tokens[m.tokens()]
        .iter()
        .filter(|t| !t.is_hyphen())
        .map(|t| t.surface.clone())
        .collect()
}

fn register_prototype_names(doc: &Document, dkb: &mut DocumentKb<'_>, mentions: &mut [Mention]) {
    for m in mentions
        .iter_mut()
        .filter(|m| m.method == Method::Prototype)
    {
        let words = name_words(doc, m);
        let id = format!("doc:name:{}", fold_case(&words.join(" ")));
        let rid = dkb.extend_overlay(
            NewReference {
                id,
                category: m.category,
                attributes: Vec::new(),
                origin: OverlayOrigin::PrototypeName,
            },
            &[words],
        );
        m.candidates = BTreeSet::from([rid]);
    }
}

fn propagate_overlay_categories(mentions: &mut [Mention], dkb: &DocumentKb<'_>) {
    for m in mentions.iter_mut() {
        if m.category.is_some() || m.candidates.len() != 1 {
            continue;
        }
        let r = *m.candidates.iter().next().unwrap();
        if let Some(c) = dkb.category_of(r) {
            m.category = Some(c);
            m.doubtful = false;
        }
    }
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

pub fn records(analysis: &Analysis<'_>) -> Vec<AnnotationRecord> {
    let doc = &analysis.doc;
    let dkb = &analysis.dkb;
    analysis
        .mentions
        .iter()
        .map(|m| {
            let span = doc.byte_span(m.tokens());
            AnnotationRecord {
                doc_id: doc.doc_id.clone(),
                start_byte: span.start,
                end_byte: span.end,
                surface: m.surface.clone(),
                category: m
                    .category
                    .map_or(UNKNOWN_CATEGORY, |c| dkb.category_name(c))
                    .to_string(),
                reference_id: (m.candidates.len() == 1).then(|| {
                    dkb.reference_label(*m.candidates.iter().next().unwrap())
                        .to_string()
                }),
                confidence: round3(m.confidence),
                doubtful: m.doubtful,
                method: m.method,
            }
        })
        .collect()
}

pub fn write_records<'r>(
    mut w: impl Write,
    records: impl IntoIterator<Item = &'r AnnotationRecord>,
) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a line-JSON stream, skipping blank lines. `path` only labels
/// errors.
pub fn read_jsonl<T: DeserializeOwned>(
    reader: impl BufRead,
    path: &str,
) -> Result<Vec<T>, EvalError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let err = |message: String| EvalError::Parse {
            path: path.to_string(),
            line: idx + 1,
            message,
        };
        let line = line.map_err(|e| err(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| err(e.to_string()))?);
    }
    Ok(out)
}
