//! Exact-span scoring of predicted annotations against gold.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::EvalError;
use crate::pipeline::AnnotationRecord;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CategoryCounts {
    pub gold: usize,
    pub predicted: usize,
    pub detected: usize,
    pub correct: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub gold_mentions: usize,
    pub predicted_mentions: usize,
    pub true_positives: usize,
    pub detection_recall: f64,
    /// 1.0 when nothing was predicted; see `zero_predictions`.
    pub detection_precision: f64,
    pub zero_predictions: bool,
    /// Over true-positive spans only.
    pub categorization_accuracy: f64,
    /// Keyed by gold category (predicted category for `predicted`).
    pub per_category: BTreeMap<String, CategoryCounts>,
    /// Predicted mentions per method, and how many of those were correct.
    pub per_method: BTreeMap<String, (usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub words_per_minute: Option<f64>,
}

type SpanKey<'a> = (&'a str, usize, usize);

fn ratio(num: usize, den: usize, empty: f64) -> f64 {
    if den == 0 {
        empty
    } else {
        num as f64 / den as f64
    }
}

/// Scores `pred` against `gold`. A predicted document absent from the gold
/// set is an alignment error.
pub fn eval_corpus(
    gold: &[AnnotationRecord],
    pred: &[AnnotationRecord],
) -> Result<EvalReport, EvalError> {
    let gold_docs: BTreeSet<&str> = gold.iter().map(|r| r.doc_id.as_str()).collect();
    if let Some(r) = pred.iter().find(|r| !gold_docs.contains(r.doc_id.as_str())) {
        return Err(EvalError::DocMismatch {
            doc_id: r.doc_id.clone(),
        });
    }
    let gold_by_span: HashMap<SpanKey<'_>, &AnnotationRecord> = gold
        .iter()
        .map(|r| ((r.doc_id.as_str(), r.start_byte, r.end_byte), r))
        .collect();

    let mut per_category: BTreeMap<String, CategoryCounts> = BTreeMap::new();
    for g in gold {
        per_category.entry(g.category.clone()).or_default().gold += 1;
    }
    let mut per_method: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut seen: BTreeSet<SpanKey<'_>> = BTreeSet::new();
    let (mut tp, mut correct) = (0, 0);
    for p in pred {
        per_category
            .entry(p.category.clone())
            .or_default()
            .predicted += 1;
        let key = (p.doc_id.as_str(), p.start_byte, p.end_byte);
        let method = per_method.entry(p.method.as_str().to_string()).or_default();
        method.0 += 1;
        let Some(g) = gold_by_span.get(&key) else {
            continue;
        };
        if !seen.insert(key) {
            continue;
        }
        tp += 1;
        let counts = per_category.entry(g.category.clone()).or_default();
        counts.detected += 1;
        if g.category == p.category {
            counts.correct += 1;
            correct += 1;
            method.1 += 1;
        }
    }
    Ok(EvalReport {
        gold_mentions: gold.len(),
        predicted_mentions: pred.len(),
        true_positives: tp,
        detection_recall: ratio(tp, gold.len(), 0.0),
        detection_precision: ratio(tp, pred.len(), 1.0),
        zero_predictions: pred.is_empty(),
        categorization_accuracy: ratio(correct, tp, 0.0),
        per_category,
        per_method,
        words_per_minute: None,
    })
}
