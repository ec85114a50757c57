//! Static semantics: name resolution, struct well-formedness, transitive
//! immutability, capture inference and inout exclusivity.

mod check;
pub mod overlap;
pub mod typed;
pub mod types;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::diag::{Diagnostic, Span};

pub use check::{check_program, check_struct_table};
pub use overlap::{paths_overlap, AccessPathShape, OverlapVerdict, ShapeStep};
pub use typed::TypedProgram;
pub use types::{FuncType, StructTable, Type};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ErrorCode {
    UnboundName,
    TypeMismatch,
    ImmutableTarget,
    ArityMismatch,
    InvalidInoutArgument,
    OverlappingInout,
    RecursiveStruct,
    WildcardRead,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::UnboundName => "UnboundName",
            ErrorCode::TypeMismatch => "TypeMismatch",
            ErrorCode::ImmutableTarget => "ImmutableTarget",
            ErrorCode::ArityMismatch => "ArityMismatch",
            ErrorCode::InvalidInoutArgument => "InvalidInoutArgument",
            ErrorCode::OverlappingInout => "OverlappingInout",
            ErrorCode::RecursiveStruct => "RecursiveStruct",
            ErrorCode::WildcardRead => "WildcardRead",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{code} at {span}: {message}")]
pub struct TypeError {
    pub code: ErrorCode,
    pub span: Span,
    pub message: String,
    /// Struct names forming the cycle, for `RecursiveStruct`.
    pub cycle: Vec<String>,
}

impl TypeError {
    pub fn new(code: ErrorCode, span: Span, message: impl Into<String>) -> Self {
        TypeError {
            code,
            span,
            message: message.into(),
            cycle: Vec::new(),
        }
    }
}

impl Diagnostic for TypeError {
    fn span(&self) -> Span {
        self.span
    }
    fn code(&self) -> &'static str {
        self.code.as_str()
    }
    fn message(&self) -> String {
        self.message.clone()
    }
}
