//! MVSL: a small expression-oriented language with mutable value semantics.
//!
//! The pipeline is [`frontend::parse`] → [`typeck::check_program`] →
//! [`ir::lower_program`] → [`ir::apply_move_optimization`] →
//! [`runtime::execute`]. [`oracle`] holds a naive reference interpreter,
//! a program generator and the differential harness comparing the two.

pub mod diag;
pub mod frontend;
pub mod ir;
pub mod oracle;
pub mod runtime;
pub mod typeck;

use thiserror::Error;

pub use diag::{Diagnostic, Span};
pub use frontend::{parse, SyntaxError};
pub use ir::IrProgram;
pub use runtime::{execute, ExecOptions, Execution, RuntimeStats, RuntimeTrap, TrapKind};
pub use typeck::{check_program, ErrorCode, Type, TypeError, TypedProgram};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Trap(#[from] RuntimeTrap),
}

impl Error {
    pub fn diagnostic(&self) -> &dyn Diagnostic {
        match self {
            Error::Syntax(e) => e,
            Error::Type(e) => e,
            Error::Trap(e) => e,
        }
    }

    pub fn render(&self, source: &str) -> String {
        self.diagnostic().render(source)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub move_opt: bool,
    pub exec: ExecOptions,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            move_opt: true,
            exec: ExecOptions::default(),
        }
    }
}

pub fn check_source(source: &str) -> Result<TypedProgram, Error> {
    Ok(check_program(&parse(source)?)?)
}

/// Lowers a checked program, optionally eliding copies. Both forms are
/// linearity-checked in debug builds.
pub fn compile(typed: &TypedProgram, move_opt: bool) -> IrProgram {
    let mut ir = ir::lower_program(typed);
    debug_assert_eq!(ir::verify_linearity(&ir), Ok(()));
    if move_opt {
        ir::apply_move_optimization(&mut ir);
        debug_assert_eq!(ir::verify_linearity(&ir), Ok(()));
    }
    ir
}

pub fn run_source(source: &str, options: RunOptions) -> Result<Execution, Error> {
    let typed = check_source(source)?;
    Ok(execute(&compile(&typed, options.move_opt), options.exec)?)
}
