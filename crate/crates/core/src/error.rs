//! Error types shared across the pipeline.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FrontendError {
    #[error("lexical error at {line}:{col}: {message}")]
    Lexical { line: u32, col: u32, message: String },
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: u32, col: u32, message: String },
    #[error("duplicate declaration of `{name}` at {line}:{col}")]
    DuplicateDeclaration { name: String, line: u32, col: u32 },
    #[error("assignment to const variable `{name}` at {line}:{col}")]
    AssignToConst { name: String, line: u32, col: u32 },
    #[error("type mismatch at {line}:{col}: {message}")]
    TypeMismatch { line: u32, col: u32, message: String },
    #[error("unknown variable `{name}` at {line}:{col}")]
    UnknownVariable { name: String, line: u32, col: u32 },
    #[error("statements must start on distinct source lines: line {line} is used twice")]
    DuplicateStatementLine { line: u32 },
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SortError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` expects {expected} arguments, got {actual}")]
    Arity {
        symbol: String,
        expected: usize,
        actual: usize,
    },
    #[error("sort mismatch: {0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PropertyError {
    #[error("parse error at {pos}: {message}")]
    Parse { pos: String, message: String },
    #[error("unknown symbol `{name}` at {pos}")]
    UnknownSymbol { name: String, pos: String },
    #[error("unbound variable `{name}` at {pos}")]
    UnboundVariable { name: String, pos: String },
    #[error("sort error at {pos}: {message}")]
    Sort { pos: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum InterpError {
    #[error("step budget exhausted after {fuel} steps (non-terminating input?)")]
    FuelExhausted { fuel: u64 },
    #[error("arithmetic overflow at line {line}")]
    Overflow { line: u32 },
    #[error("timepoint {0} visited twice (uniqueness violation)")]
    DuplicateTimepoint(String),
    #[error("invalid input fixture: {0}")]
    BadInput(String),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("unbound symbol `{0}` during evaluation")]
    UnboundSymbol(String),
    #[error("unbound variable `{0}` during evaluation")]
    UnboundVariable(String),
    #[error("arithmetic overflow during evaluation")]
    Overflow,
    #[error("evaluation expects {expected} trace records, got {actual}")]
    TraceCount { expected: usize, actual: usize },
}
