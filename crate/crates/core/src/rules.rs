//! Prototype and context rules, loaded from a line-JSON rule pack.
//!
//! A prototype rule is a small pattern over "units" (single tokens or
//! already-recognised mentions) that both delimits and categorises a name,
//! e.g. `first-name unknown-upcase+ -> human-being`. A context rule looks
//! at a fixed neighbourhood of a mention (apposition, `<word> of <name>`,
//! parenthesis) for a word carrying a trigger attribute.

use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::RuleError;
use crate::kb::{AttrId, CategoryId, KnowledgeBase};
use crate::text::fold_case;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Repeat {
    #[default]
    One,
    Optional,
    Plus,
    Star,
}

impl Repeat {
    pub fn bounds(self) -> (usize, usize) {
        match self {
            Repeat::One => (1, 1),
            Repeat::Optional => (0, 1),
            Repeat::Plus => (1, usize::MAX),
            Repeat::Star => (0, usize::MAX),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "atom", rename_all = "kebab-case")]
pub enum AtomSpec {
    WordAttribute {
        attribute: String,
        #[serde(default)]
        repeat: Repeat,
    },
    UnknownUpcase {
        #[serde(default)]
        repeat: Repeat,
    },
    Mention {
        category: String,
        #[serde(default)]
        repeat: Repeat,
    },
    Literal {
        any_of: Vec<String>,
        #[serde(default)]
        repeat: Repeat,
    },
    Any {
        #[serde(default)]
        repeat: Repeat,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `<name> , [det] <trigger>`
    AppositionAfter,
    /// `<trigger> <of> [det] <name>`
    ComplementOfBefore,
    /// `<name> ( <known name with the trigger category> )`
    ParentheticalAfter,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredicateSpec {
    Category(String),
    Attribute(String),
    LocatedInTrigger,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionSpec {
    AssignCategory(String),
    RestrictCandidatesTo(PredicateSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RuleRecord {
    RulePackHeader {
        format_version: u32,
        #[serde(default)]
        of_prepositions: Vec<String>,
        #[serde(default)]
        connectors: Vec<String>,
    },
    PrototypeRule {
        id: String,
        pattern: Vec<AtomSpec>,
        category: String,
        #[serde(default)]
        extendable: bool,
        #[serde(default)]
        priority: i32,
        /// Only applies to a closed window it covers entirely (acronym
        /// expansions), never to running text.
        #[serde(default)]
        anchored: bool,
    },
    ContextRule {
        id: String,
        trigger_attribute: String,
        relation: Relation,
        action: ActionSpec,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomKind {
    WordAttribute(AttrId),
    UnknownUpcase,
    Mention(CategoryId),
    /// Case-folded alternatives.
    Literal(Vec<String>),
    Any,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternAtom {
    pub kind: AtomKind,
    pub repeat: Repeat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrototypeRule {
    pub id: String,
    pub pattern: Vec<PatternAtom>,
    pub category: CategoryId,
    pub extendable: bool,
    pub priority: i32,
    pub anchored: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidatePredicate {
    Category(CategoryId),
    Attribute(AttrId),
    LocatedInTrigger,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContextAction {
    AssignCategory(CategoryId),
    RestrictCandidatesTo(CandidatePredicate),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextRule {
    pub id: String,
    pub trigger: AttrId,
    pub relation: Relation,
    pub action: ContextAction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RulePack {
    /// Sorted by descending priority, then id.
    pub prototypes: Vec<PrototypeRule>,
    /// In file order.
    pub context: Vec<ContextRule>,
    /// Case-folded.
    pub of_prepositions: Vec<String>,
    /// Case-folded lowercase words allowed inside an unknown name.
    pub connectors: Vec<String>,
}

const RECORD_KINDS: &[&str] = &["rule-pack-header", "prototype-rule", "context-rule"];

impl RulePack {
    pub fn load(reader: impl BufRead, kb: &KnowledgeBase) -> Result<Self, RuleError> {
        let mut records = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| RuleError::Io {
                line: lineno,
                source: e,
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let value: serde_json::Value =
                serde_json::from_str(trimmed).map_err(|e| RuleError::Parse {
                    line: lineno,
                    message: e.to_string(),
                })?;
            let kind = value.get("kind").and_then(|k| k.as_str()).unwrap_or("");
            if !RECORD_KINDS.contains(&kind) {
                return Err(RuleError::UnknownRecordKind {
                    line: lineno,
                    kind: kind.to_string(),
                });
            }
            let record = serde_json::from_value(value).map_err(|e| RuleError::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
            records.push(record);
        }
        Self::from_records(records, kb)
    }

    pub fn from_records(records: Vec<RuleRecord>, kb: &KnowledgeBase) -> Result<Self, RuleError> {
        let mut pack = RulePack {
            prototypes: Vec::new(),
            context: Vec::new(),
            of_prepositions: Vec::new(),
            connectors: Vec::new(),
        };
        for record in records {
            match record {
                RuleRecord::RulePackHeader {
                    format_version,
                    of_prepositions,
                    connectors,
                } => {
                    if format_version != FORMAT_VERSION {
                        return Err(RuleError::Invalid {
                            rule: "header".into(),
                            message: format!("unsupported format version {format_version}"),
                        });
                    }
                    pack.of_prepositions = of_prepositions.iter().map(|s| fold_case(s)).collect();
                    pack.connectors = connectors.iter().map(|s| fold_case(s)).collect();
                }
                RuleRecord::PrototypeRule {
                    id,
                    pattern,
                    category,
                    extendable,
                    priority,
                    anchored,
                } => {
                    if pattern.is_empty() {
                        return Err(RuleError::Invalid {
                            rule: id,
                            message: "empty pattern".into(),
                        });
                    }
                    let category = bind_category(kb, &id, &category)?;
                    let pattern = pattern
                        .iter()
                        .map(|a| bind_atom(kb, &id, a))
                        .collect::<Result<Vec<_>, _>>()?;
                    if pattern.iter().all(|a| a.repeat.bounds().0 == 0) {
                        return Err(RuleError::Invalid {
                            rule: id,
                            message: "pattern can match nothing".into(),
                        });
                    }
                    pack.prototypes.push(PrototypeRule {
                        id,
                        pattern,
                        category,
                        extendable,
                        priority,
                        anchored,
                    });
                }
                RuleRecord::ContextRule {
                    id,
                    trigger_attribute,
                    relation,
                    action,
                } => {
                    let trigger = bind_attribute(kb, &id, &trigger_attribute)?;
                    let action = match action {
                        ActionSpec::AssignCategory(c) => {
                            ContextAction::AssignCategory(bind_category(kb, &id, &c)?)
                        }
                        ActionSpec::RestrictCandidatesTo(p) => {
                            ContextAction::RestrictCandidatesTo(match p {
                                PredicateSpec::Category(c) => {
                                    CandidatePredicate::Category(bind_category(kb, &id, &c)?)
                                }
                                PredicateSpec::Attribute(a) => {
                                    CandidatePredicate::Attribute(bind_attribute(kb, &id, &a)?)
                                }
                                PredicateSpec::LocatedInTrigger => {
                                    CandidatePredicate::LocatedInTrigger
                                }
                            })
                        }
                    };
                    pack.context.push(ContextRule {
                        id,
                        trigger,
                        relation,
                        action,
                    });
                }
            }
        }
        pack.prototypes
            .sort_by(|a, b| b.priority.cmp(&a.priority).then_with(|| a.id.cmp(&b.id)));
        Ok(pack)
    }
}

fn bind_category(kb: &KnowledgeBase, rule: &str, name: &str) -> Result<CategoryId, RuleError> {
    kb.category_id(name)
        .ok_or_else(|| RuleError::UnknownCategory {
            rule: rule.to_string(),
            category: name.to_string(),
        })
}

fn bind_attribute(kb: &KnowledgeBase, rule: &str, name: &str) -> Result<AttrId, RuleError> {
    kb.attribute_id(name)
        .ok_or_else(|| RuleError::UnknownAttribute {
            rule: rule.to_string(),
            attribute: name.to_string(),
        })
}

fn bind_atom(kb: &KnowledgeBase, rule: &str, spec: &AtomSpec) -> Result<PatternAtom, RuleError> {
    Ok(match spec {
        AtomSpec::WordAttribute { attribute, repeat } => PatternAtom {
            kind: AtomKind::WordAttribute(bind_attribute(kb, rule, attribute)?),
            repeat: *repeat,
        },
        AtomSpec::UnknownUpcase { repeat } => PatternAtom {
            kind: AtomKind::UnknownUpcase,
            repeat: *repeat,
        },
        AtomSpec::Mention { category, repeat } => PatternAtom {
            kind: AtomKind::Mention(bind_category(kb, rule, category)?),
            repeat: *repeat,
        },
        AtomSpec::Literal { any_of, repeat } => PatternAtom {
            kind: AtomKind::Literal(any_of.iter().map(|s| fold_case(s)).collect()),
            repeat: *repeat,
        },
        AtomSpec::Any { repeat } => PatternAtom {
            kind: AtomKind::Any,
            repeat: *repeat,
        },
    })
}
