//! Reference semantics and differential testing.

mod diff;
mod eager;
mod gen;

pub use diff::{
    differential_run, differential_run_source, differential_run_typed, DiffReport, Engine, Status,
    TrapReport, TrialResult, ALL_ENGINES,
};
pub use eager::{interpret_eager, OValue};
pub use gen::{generate_copy_then_mutate, generate_program, type_expr, GenConfig};
