//! CBPV syntax: abstract syntax, concrete grammar, printer, alpha-equivalence,
//! signatures and a seeded generator of well-typed closed terms.

pub mod alpha;
pub mod ast;
pub mod generate;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod signature;

pub use alpha::{alpha_eq, alpha_eq_comp, canonical_comp};
pub use ast::{AnyType, Comp, CompType, Term, Value, ValueType};
pub use generate::{generate_terms, GenError, Generator};
pub use parser::{
    parse_comp, parse_comp_in, parse_ctype, parse_program, parse_program_in, parse_value, parse_value_in, parse_vtype,
};
pub use printer::print_term;
pub use signature::{ConstEnv, OpDecl, Signature, SignatureError};

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    Grammar,
    UnknownIdentifier,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn lexical(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError { kind: ParseErrorKind::Lexical, line, col, message: message.into() }
    }

    pub fn grammar(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError { kind: ParseErrorKind::Grammar, line, col, message: message.into() }
    }

    pub fn unknown(line: usize, col: usize, name: &str) -> Self {
        ParseError {
            kind: ParseErrorKind::UnknownIdentifier,
            line,
            col,
            message: format!("unknown identifier `{name}`"),
        }
    }
}
