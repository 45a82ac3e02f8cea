//! Proper-name recognition and disambiguation over a knowledge base of
//! words, forms and references.
//!
//! ```
//! use propnames::{bundled, pipeline::Annotator};
//!
//! let kb = bundled::sample_kb().unwrap();
//! let rules = bundled::default_rules(&kb).unwrap();
//! let records = Annotator::new(&kb, &rules).annotate("d1", "Kyocera Corp profits rose.");
//! assert_eq!(records[0].surface, "Kyocera Corp");
//! assert_eq!(records[0].category, "company");
//! ```

pub mod bundled;
pub mod classifier;
pub mod coref;
pub mod error;
pub mod eval;
pub mod kb;
pub mod matcher;
pub mod mention;
pub mod overlay;
pub mod pipeline;
pub mod rules;
pub mod text;
pub mod tokenizer;
pub mod trie;

pub use kb::KnowledgeBase;
pub use pipeline::{annotate_document, AnnotationRecord, Annotator};
pub use rules::RulePack;
