use std::collections::BTreeSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::kb::{CategoryId, FormId, RefId};

/// How a mention got its segmentation and category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    KnownForm,
    AcronymDef,
    Prototype,
    LocalContext,
    RadicalLink,
    FrequencyFallback,
    /// Detected as a capitalised segment but never categorised.
    Segment,
}

impl Method {
    /// Ordinal confidence of a decision made by this method. Only the
    /// ordering is meaningful.
    pub fn confidence(self) -> f64 {
        match self {
            Method::KnownForm => 1.0,
            Method::AcronymDef => 0.95,
            Method::LocalContext => 0.85,
            Method::Prototype => 0.8,
            Method::RadicalLink => 0.75,
            Method::FrequencyFallback => 0.5,
            Method::Segment => 0.3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::KnownForm => "known-form",
            Method::AcronymDef => "acronym-def",
            Method::Prototype => "prototype",
            Method::LocalContext => "local-context",
            Method::RadicalLink => "radical-link",
            Method::FrequencyFallback => "frequency-fallback",
            Method::Segment => "segment",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mention {
    /// Token indices, half-open.
    pub start: usize,
    pub end: usize,
    pub surface: String,
    /// Candidate references; empty for names known only by category.
    pub candidates: BTreeSet<RefId>,
    /// Forms matched in the text (known mentions only).
    pub forms: BTreeSet<FormId>,
    pub category: Option<CategoryId>,
    pub confidence: f64,
    pub doubtful: bool,
    pub method: Method,
    /// Whether prototype extension rules may absorb this mention.
    pub extendable: bool,
}

impl Mention {
    pub fn tokens(&self) -> Range<usize> {
        self.start..self.end
    }

    pub fn is_ambiguous(&self) -> bool {
        self.candidates.len() > 1
    }

    pub fn overlaps(&self, other: &Mention) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub(crate) fn set_method(&mut self, method: Method) {
        self.method = method;
        self.confidence = method.confidence();
    }
}
