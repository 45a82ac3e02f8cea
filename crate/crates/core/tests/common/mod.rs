#![allow(dead_code)]

pub mod oracle;
pub mod worked;

use std::io::BufReader;
use std::path::PathBuf;
use std::sync::OnceLock;

use propnames::pipeline::{read_jsonl, Analysis, AnnotationRecord, Annotator, InputDocument};
use propnames::{bundled, KnowledgeBase, RulePack};

pub struct Sample {
    pub kb: KnowledgeBase,
    pub rules: RulePack,
}

pub fn sample() -> &'static Sample {
    static SAMPLE: OnceLock<Sample> = OnceLock::new();
    SAMPLE.get_or_init(|| {
        let kb = bundled::sample_kb().expect("sample KB loads");
        let rules = bundled::default_rules(&kb).expect("default rules load");
        Sample { kb, rules }
    })
}

pub fn annotator() -> Annotator<'static> {
    let s = sample();
    Annotator::new(&s.kb, &s.rules)
}

pub fn analyze(text: &str) -> Analysis<'static> {
    annotator().analyze("t", text)
}

pub fn data_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(rel)
}

pub fn corpus_docs() -> Vec<InputDocument> {
    let f = std::fs::File::open(data_path("corpus/docs.jsonl")).expect("corpus docs");
    read_jsonl(BufReader::new(f), "docs.jsonl").expect("corpus docs parse")
}

pub fn corpus_gold() -> Vec<AnnotationRecord> {
    let f = std::fs::File::open(data_path("corpus/gold.jsonl")).expect("corpus gold");
    read_jsonl(BufReader::new(f), "gold.jsonl").expect("corpus gold parse")
}

/// The record covering exactly `surface`'s `nth` occurrence.
pub fn record_for<'r>(
    records: &'r [AnnotationRecord],
    text: &str,
    surface: &str,
    nth: usize,
) -> Option<&'r AnnotationRecord> {
    let (start, _) = text.match_indices(surface).nth(nth)?;
    records
        .iter()
        .find(|r| r.start_byte == start && r.end_byte == start + surface.len())
}
