use thiserror::Error;

use crate::kb::ValidationReport;

#[derive(Debug, Error)]
pub enum KbError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown record kind `{kind}`")]
    UnknownRecordKind { line: usize, kind: String },
    #[error("line {line}: reference to undefined id `{id}`")]
    DanglingId { line: usize, id: String },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: duplicate word surface {surface:?}")]
    DuplicateSurface { line: usize, surface: String },
    #[error("form `{form}` is owned by `{first}` and `{second}` which are not linked as homonyms")]
    DuplicateFormWithoutHomonym {
        form: String,
        first: String,
        second: String,
    },
    #[error("knowledge base violates invariants:\n{0}")]
    Invalid(ValidationReport),
    #[error("line {line}: read failed: {source}")]
    Io {
        line: usize,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown record kind `{kind}`")]
    UnknownRecordKind { line: usize, kind: String },
    #[error("rule `{rule}`: unknown category `{category}`")]
    UnknownCategory { rule: String, category: String },
    #[error("rule `{rule}`: unknown attribute `{attribute}`")]
    UnknownAttribute { rule: String, attribute: String },
    #[error("rule `{rule}`: {message}")]
    Invalid { rule: String, message: String },
    #[error("line {line}: read failed: {source}")]
    Io {
        line: usize,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum TextError {
    #[error("input is not valid UTF-8 (first bad byte at offset {offset})")]
    InvalidEncoding { offset: usize },
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("predicted annotations mention document `{doc_id}` which has no gold entry")]
    DocMismatch { doc_id: String },
}
