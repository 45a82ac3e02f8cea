//! The sample knowledge base, default rule pack and synthetic corpus that
//! ship with the crate.

use crate::error::{KbError, RuleError};
use crate::kb::KnowledgeBase;
use crate::rules::RulePack;

pub const SAMPLE_KB: &str = include_str!("../data/sample_kb.jsonl");
pub const DEFAULT_RULES: &str = include_str!("../data/default_rules.jsonl");

pub fn sample_kb() -> Result<KnowledgeBase, KbError> {
    KnowledgeBase::load(SAMPLE_KB.as_bytes())
}

pub fn default_rules(kb: &KnowledgeBase) -> Result<RulePack, RuleError> {
    RulePack::load(DEFAULT_RULES.as_bytes(), kb)
}
