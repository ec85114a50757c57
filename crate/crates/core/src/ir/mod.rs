//! Register-style intermediate representation with explicit value lifetimes.
//!
//! Every slot holds at most one owned value. A value enters a slot through a
//! defining instruction and leaves it through exactly one consuming
//! instruction (`Move`, `Destroy`, a constructor operand, a by-value call
//! argument or `Return`). Locations (`Loc`) are non-owning handles used for
//! inout access and closure environments.

mod display;
mod lower;
pub mod metatype;
mod moveopt;
mod verify;

use std::collections::BTreeMap;

use crate::diag::Span;
use crate::frontend::ast::BinOp;
use crate::typeck::types::{StructTable, Type};

pub use display::dump;
pub use lower::lower_program;
pub use metatype::{synthesize_metatype, MetaRoutine, Subject, TypeMetadata};
pub use moveopt::apply_move_optimization;
pub use verify::{verify_linearity, VerifyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Loc(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoutineId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Place {
    Slot(Slot),
    Loc(Loc),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Field(u32),
    /// Into a closure's environment record.
    Env(u32),
    /// Subscript by the integer held in the slot; consumes the slot.
    Index(Slot),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Callee {
    /// A temporary closure; the slot is only read.
    Slot(Slot),
    /// A closure called in place through a resolved location.
    Loc(Loc),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instr {
    MakeInt {
        dst: Slot,
        value: i64,
    },
    MakeFloat {
        dst: Slot,
        value: f64,
    },
    MakeArray {
        dst: Slot,
        elem: Type,
        elems: Vec<Slot>,
    },
    MakeStruct {
        dst: Slot,
        name: String,
        fields: Vec<Slot>,
    },
    MakeClosure {
        dst: Slot,
        routine: RoutineId,
        env: Vec<Slot>,
        copy: MetaRoutine,
        destroy: MetaRoutine,
    },
    Copy {
        dst: Slot,
        src: Slot,
    },
    Move {
        dst: Slot,
        src: Slot,
    },
    Destroy {
        slot: Slot,
    },
    /// Copies the value found at `base` + `steps` into `dst`.
    LoadPath {
        dst: Slot,
        base: Place,
        steps: Vec<Step>,
        span: Span,
    },
    /// Replaces the value at `base` + `steps`, destroying the old one.
    StorePath {
        base: Place,
        steps: Vec<Step>,
        value: Slot,
        span: Span,
    },
    ResolveLocation {
        dst: Loc,
        base: Place,
        steps: Vec<Step>,
        span: Span,
    },
    Call {
        dst: Slot,
        callee: Callee,
        args: Vec<Slot>,
        inouts: Vec<Loc>,
        span: Span,
    },
    Binary {
        dst: Slot,
        op: BinOp,
        lhs: Slot,
        rhs: Slot,
        span: Span,
    },
    OverlapCheck {
        a: Loc,
        b: Loc,
        span: Span,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Terminator {
    Jump(BlockId),
    CondBr {
        cond: Slot,
        then: BlockId,
        els: BlockId,
    },
    Return(Slot),
}

impl Terminator {
    pub fn successors(&self) -> Vec<BlockId> {
        match self {
            Terminator::Jump(b) => vec![*b],
            Terminator::CondBr { then, els, .. } => vec![*then, *els],
            Terminator::Return(_) => vec![],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub instrs: Vec<Instr>,
    pub term: Terminator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    ByValue(Slot),
    Inout(Loc),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Routine {
    pub id: RoutineId,
    pub params: Vec<Param>,
    /// Location of the closure being invoked; captures are reached through it.
    pub env: Option<Loc>,
    pub slot_types: Vec<Type>,
    pub loc_count: u32,
    /// Block 0 is the entry block.
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrProgram {
    pub routines: Vec<Routine>,
    pub metatypes: BTreeMap<Subject, TypeMetadata>,
    pub entry: RoutineId,
    pub structs: StructTable,
}

impl IrProgram {
    pub fn routine(&self, id: RoutineId) -> &Routine {
        &self.routines[id.0 as usize]
    }

    pub fn metatype(&self, t: &Type) -> &TypeMetadata {
        self.metatypes
            .get(&Subject::Type(t.clone()))
            .unwrap_or_else(|| panic!("no metatype registered for {t}"))
    }
}

impl Instr {
    /// Visits every slot operand with its role.
    pub fn visit_slots(&self, mut f: impl FnMut(Slot, Use)) {
        let steps = |steps: &[Step], f: &mut dyn FnMut(Slot, Use)| {
            for s in steps {
                if let Step::Index(i) = s {
                    f(*i, Use::Consume);
                }
            }
        };
        let place = |p: &Place, f: &mut dyn FnMut(Slot, Use)| {
            if let Place::Slot(s) = p {
                f(*s, Use::Read);
            }
        };
        match self {
            Instr::MakeInt { dst, .. } | Instr::MakeFloat { dst, .. } => f(*dst, Use::Define),
            Instr::MakeArray { dst, elems: ops, .. }
            | Instr::MakeStruct {
                dst, fields: ops, ..
            }
            | Instr::MakeClosure { dst, env: ops, .. } => {
                ops.iter().for_each(|s| f(*s, Use::Consume));
                f(*dst, Use::Define);
            }
            Instr::Copy { dst, src } => {
                f(*src, Use::Read);
                f(*dst, Use::Define);
            }
            Instr::Move { dst, src } => {
                f(*src, Use::Consume);
                f(*dst, Use::Define);
            }
            Instr::Destroy { slot } => f(*slot, Use::Destroy),
            Instr::LoadPath {
                dst, base, steps: st, ..
            } => {
                place(base, &mut f);
                steps(st, &mut f);
                f(*dst, Use::Define);
            }
            Instr::StorePath {
                base,
                steps: st,
                value,
                ..
            } => {
                place(base, &mut f);
                steps(st, &mut f);
                f(*value, Use::Consume);
            }
            Instr::ResolveLocation {
                base, steps: st, ..
            } => {
                place(base, &mut f);
                steps(st, &mut f);
            }
            Instr::Call {
                dst, callee, args, ..
            } => {
                if let Callee::Slot(s) = callee {
                    f(*s, Use::Read);
                }
                args.iter().for_each(|s| f(*s, Use::Consume));
                f(*dst, Use::Define);
            }
            Instr::Binary { dst, lhs, rhs, .. } => {
                f(*lhs, Use::Consume);
                f(*rhs, Use::Consume);
                f(*dst, Use::Define);
            }
            Instr::OverlapCheck { .. } => {}
        }
    }

    /// Locations read by this instruction.
    pub fn loc_reads(&self) -> Vec<Loc> {
        let base = |p: &Place| match p {
            Place::Loc(l) => vec![*l],
            Place::Slot(_) => vec![],
        };
        match self {
            Instr::LoadPath { base: b, .. }
            | Instr::StorePath { base: b, .. }
            | Instr::ResolveLocation { base: b, .. } => base(b),
            Instr::Call { callee, inouts, .. } => {
                let mut v = inouts.clone();
                if let Callee::Loc(l) = callee {
                    v.push(*l);
                }
                v
            }
            Instr::OverlapCheck { a, b, .. } => vec![*a, *b],
            _ => vec![],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Use {
    Read,
    Consume,
    Destroy,
    Define,
}

#[cfg(test)]
mod tests;
