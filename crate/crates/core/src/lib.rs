pub mod ast;
pub mod error;
pub mod lexer;
pub mod lemmas;
pub mod oracle;
pub mod parser;
pub mod pipeline;
pub mod fol;
pub mod interp;
pub mod properties;
pub mod semantics;
pub mod sexpr;
pub mod smtlib;
pub mod timepoints;
