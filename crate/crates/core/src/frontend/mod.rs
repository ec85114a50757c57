//! Tokenizer, parser and pretty-printer for MVSL source text.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;

use thiserror::Error;

use crate::diag::{Diagnostic, Span};

pub use ast::Program;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse_program;
pub use pretty::{path_text, pretty_print};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {span}: {message}")]
pub struct SyntaxError {
    pub span: Span,
    pub message: String,
    pub expected: Vec<String>,
}

impl SyntaxError {
    pub fn new(span: Span, message: String) -> Self {
        SyntaxError {
            span,
            message,
            expected: Vec::new(),
        }
    }
}

impl Diagnostic for SyntaxError {
    fn span(&self) -> Span {
        self.span
    }
    fn code(&self) -> &'static str {
        "SyntaxError"
    }
    fn message(&self) -> String {
        self.message.clone()
    }
}

/// Tokenizes and parses `source` in one step.
pub fn parse(source: &str) -> Result<Program, SyntaxError> {
    parse_program(&tokenize(source)?)
}
