//! Virtual machine for the IR: reference-counted array storage with
//! copy-on-write, closure records, and exclusive inout locations.

mod arith;
mod heap;
mod layout;
mod vm;

use serde::Serialize;
use thiserror::Error;

use crate::diag::{Diagnostic, Span};
use crate::ir::IrProgram;

pub use arith::{float_op, format_float, int_op, FloatResult};
pub use heap::{ArrayStorage, ClosureRecord, Heap, RuntimeStats, StorageId, Value};
pub use layout::{serialize_array_layout, ArrayLayout, ByteOrder, LayoutError};
pub use vm::{Location, PathStep, Target, Vm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TrapKind {
    IndexOutOfBounds,
    OverlapViolation,
    IntegerOverflow,
    DivisionByZero,
}

impl TrapKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TrapKind::IndexOutOfBounds => "IndexOutOfBounds",
            TrapKind::OverlapViolation => "OverlapViolation",
            TrapKind::IntegerOverflow => "IntegerOverflow",
            TrapKind::DivisionByZero => "DivisionByZero",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{} at {span}: {message}", kind.as_str())]
pub struct RuntimeTrap {
    pub kind: TrapKind,
    pub span: Span,
    pub message: String,
}

impl Diagnostic for RuntimeTrap {
    fn span(&self) -> Span {
        self.span
    }
    fn code(&self) -> &'static str {
        self.kind.as_str()
    }
    fn message(&self) -> String {
        self.message.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecOptions {
    pub cow: bool,
    /// Scan the store after every instruction and panic on a refcount that
    /// disagrees with the number of live handles.
    pub check_refcounts: bool,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions {
            cow: true,
            check_refcounts: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub output: String,
    pub stats: RuntimeStats,
}

pub fn execute(program: &IrProgram, options: ExecOptions) -> Result<Execution, RuntimeTrap> {
    Vm::new(program, options).run()
}
