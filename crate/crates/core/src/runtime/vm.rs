//! The IR interpreter.

use super::arith::{float_op, int_op, FloatResult};
use super::heap::{ClosureRecord, Heap, RuntimeStats, StorageId, Value};
use super::{ExecOptions, Execution, RuntimeTrap, TrapKind};
use crate::diag::Span;
use crate::ir::metatype::size_bytes;
use crate::ir::{Callee, Instr, IrProgram, Loc, Param, Place, RoutineId, Slot, Step, Terminator};

/// One concrete step of an access path after index evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStep {
    Field(u32),
    Env(u32),
    Index(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    FrameSlot { frame: usize, slot: u32 },
    ArrayElement { storage: StorageId, index: usize },
}

/// A resolved, exclusive position in the value tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub target: Target,
    /// Field and environment steps below `target`.
    pub residual: Vec<PathStep>,
    /// The frame slot at the root of the access path, and every step taken
    /// from it. Two locations overlap iff they share a root and one trail
    /// is a prefix of the other.
    pub root: (usize, u32),
    pub trail: Vec<PathStep>,
}

impl Location {
    fn frame_slot(frame: usize, slot: Slot) -> Self {
        Location {
            target: Target::FrameSlot {
                frame,
                slot: slot.0,
            },
            residual: Vec::new(),
            root: (frame, slot.0),
            trail: Vec::new(),
        }
    }

    pub fn overlaps(&self, other: &Location) -> bool {
        self.root == other.root
            && (self.trail.starts_with(&other.trail) || other.trail.starts_with(&self.trail))
    }
}

struct Frame {
    slots: Vec<Option<Value>>,
    locs: Vec<Option<Location>>,
}

enum Nav {
    Step(PathStep),
    Index(i64),
}

pub struct Vm<'p> {
    program: &'p IrProgram,
    heap: Heap,
    frames: Vec<Frame>,
    check_refcounts: bool,
}

fn trap(kind: TrapKind, span: Span, message: impl Into<String>) -> RuntimeTrap {
    RuntimeTrap {
        kind,
        span,
        message: message.into(),
    }
}

impl<'p> Vm<'p> {
    pub fn new(program: &'p IrProgram, options: ExecOptions) -> Self {
        Vm {
            program,
            heap: Heap::new(options.cow),
            frames: Vec::new(),
            check_refcounts: options.check_refcounts,
        }
    }

    pub fn run(mut self) -> Result<Execution, RuntimeTrap> {
        let v = self.call(self.program.entry, Vec::new(), Vec::new(), None)?;
        let output = self.heap.format_value(&v);
        self.heap.destroy_value(v);
        debug_assert_eq!(self.heap.live_blocks() == 0, self.heap.stats.is_balanced());
        Ok(Execution {
            output,
            stats: self.heap.stats,
        })
    }

    pub fn stats(&self) -> RuntimeStats {
        self.heap.stats
    }

    fn frame(&mut self) -> &mut Frame {
        self.frames.last_mut().expect("frame")
    }

    fn take(&mut self, s: Slot) -> Value {
        self.frame().slots[s.0 as usize]
            .take()
            .unwrap_or_else(|| panic!("slot %{} is empty", s.0))
    }

    fn put(&mut self, s: Slot, v: Value) {
        let slot = &mut self.frame().slots[s.0 as usize];
        debug_assert!(slot.is_none(), "slot %{} overwritten", s.0);
        *slot = Some(v);
    }

    fn read(&self, s: Slot) -> &Value {
        self.frames.last().expect("frame").slots[s.0 as usize]
            .as_ref()
            .unwrap_or_else(|| panic!("slot %{} is empty", s.0))
    }

    fn loc(&self, l: Loc) -> Location {
        self.frames.last().expect("frame").locs[l.0 as usize]
            .clone()
            .unwrap_or_else(|| panic!("location @{} unresolved", l.0))
    }

    fn value_at(&self, loc: &Location) -> &Value {
        let mut v = match loc.target {
            Target::FrameSlot { frame, slot } => self.frames[frame].slots[slot as usize]
                .as_ref()
                .expect("live frame slot"),
            Target::ArrayElement { storage, index } => &self.heap.block(storage).elements[index],
        };
        for s in &loc.residual {
            v = match (s, v) {
                (PathStep::Field(i), Value::Struct(_, fs)) => &fs[*i as usize],
                (PathStep::Env(i), Value::Func(c)) => &c.env[*i as usize],
                (s, v) => panic!("bad step {s:?} into {v:?}"),
            };
        }
        v
    }

    fn value_at_mut(&mut self, loc: &Location) -> &mut Value {
        let mut v = match loc.target {
            Target::FrameSlot { frame, slot } => self.frames[frame].slots[slot as usize]
                .as_mut()
                .expect("live frame slot"),
            Target::ArrayElement { storage, index } => {
                &mut self.heap.block_mut(storage).elements[index]
            }
        };
        for s in &loc.residual {
            v = match (s, v) {
                (PathStep::Field(i), Value::Struct(_, fs)) => &mut fs[*i as usize],
                (PathStep::Env(i), Value::Func(c)) => &mut c.env[*i as usize],
                (s, v) => panic!("bad step {s:?} into {v:?}"),
            };
        }
        v
    }

    /// Consumes index operands in order.
    fn eval_steps(&mut self, steps: &[Step]) -> Vec<Nav> {
        steps
            .iter()
            .map(|s| match s {
                Step::Field(i) => Nav::Step(PathStep::Field(*i)),
                Step::Env(i) => Nav::Step(PathStep::Env(*i)),
                Step::Index(slot) => Nav::Index(self.take(*slot).as_int()),
            })
            .collect()
    }

    /// Walks `steps` from `base`. When `mutate` is set, every array passed
    /// through is made uniquely referenced first (copy-on-write).
    fn resolve(&mut self, base: Place, steps: &[Step], mutate: bool, span: Span) -> Result<Location, RuntimeTrap> {
        let navs = self.eval_steps(steps);
        let mut loc = match base {
            Place::Slot(s) => Location::frame_slot(self.frames.len() - 1, s),
            Place::Loc(l) => self.loc(l),
        };
        for nav in navs {
            match nav {
                Nav::Step(s) => {
                    loc.residual.push(s);
                    loc.trail.push(s);
                }
                Nav::Index(i) => {
                    let Value::Array(mut storage) = *self.value_at(&loc) else {
                        panic!("subscript of non-array");
                    };
                    if mutate {
                        let fresh = self.heap.unique(storage);
                        if fresh != storage {
                            *self.value_at_mut(&loc) = Value::Array(fresh);
                            storage = fresh;
                        }
                    }
                    let n = self.heap.block(storage).elements.len();
                    if i < 0 || i as usize >= n {
                        return Err(trap(
                            TrapKind::IndexOutOfBounds,
                            span,
                            format!("index {i} out of bounds for array of length {n}"),
                        ));
                    }
                    let index = i as usize;
                    loc.target = Target::ArrayElement { storage, index };
                    loc.residual.clear();
                    loc.trail.push(PathStep::Index(index));
                }
            }
        }
        Ok(loc)
    }

    fn copy_counted(&mut self, v: Value) -> Value {
        if !self.is_trivial_value(&v) {
            self.heap.stats.deep_copies += 1;
        }
        v
    }

    fn is_trivial_value(&self, v: &Value) -> bool {
        match v {
            Value::Int(_) | Value::Float(_) => true,
            Value::Struct(_, fs) => fs.iter().all(|f| self.is_trivial_value(f)),
            Value::Array(_) | Value::Func(_) => false,
        }
    }

    fn call(
        &mut self,
        id: RoutineId,
        args: Vec<Value>,
        inouts: Vec<Location>,
        env: Option<Location>,
    ) -> Result<Value, RuntimeTrap> {
        let r = self.program.routine(id);
        let mut frame = Frame {
            slots: (0..r.slot_types.len()).map(|_| None).collect(),
            locs: vec![None; r.loc_count as usize],
        };
        let (mut args, mut inouts) = (args.into_iter(), inouts.into_iter());
        for p in &r.params {
            match p {
                Param::ByValue(s) => frame.slots[s.0 as usize] = args.next(),
                Param::Inout(l) => frame.locs[l.0 as usize] = inouts.next(),
            }
        }
        if let Some(l) = r.env {
            frame.locs[l.0 as usize] = env;
        }
        self.frames.push(frame);
        let result = self.run_blocks(id);
        self.frames.pop();
        result
    }

    fn run_blocks(&mut self, id: RoutineId) -> Result<Value, RuntimeTrap> {
        let program = self.program;
        let r = program.routine(id);
        let mut b = 0usize;
        loop {
            let block = &r.blocks[b];
            for i in &block.instrs {
                self.step(i)?;
                if self.check_refcounts {
                    self.verify_refcounts();
                }
            }
            match &block.term {
                Terminator::Jump(t) => b = t.0 as usize,
                Terminator::CondBr { cond, then, els } => {
                    b = if self.take(*cond).as_int() != 0 {
                        then.0 as usize
                    } else {
                        els.0 as usize
                    };
                }
                Terminator::Return(s) => return Ok(self.take(*s)),
            }
        }
    }

    fn verify_refcounts(&self) {
        let roots = self
            .frames
            .iter()
            .flat_map(|f| f.slots.iter().flatten());
        if let Err(e) = self.heap.check_refcounts(roots) {
            panic!("refcount invariant violated: {e}");
        }
    }

    fn step(&mut self, instr: &Instr) -> Result<(), RuntimeTrap> {
        match instr {
            Instr::MakeInt { dst, value } => self.put(*dst, Value::Int(*value)),
            Instr::MakeFloat { dst, value } => self.put(*dst, Value::Float(*value)),
            Instr::MakeArray { dst, elem, elems } => {
                let values = elems.iter().map(|s| self.take(*s)).collect();
                let size = size_bytes(elem, &self.program.structs);
                let s = self.heap.alloc(elem.clone(), size, values);
                self.put(*dst, Value::Array(s));
            }
            Instr::MakeStruct { dst, name, fields } => {
                let values = fields.iter().map(|s| self.take(*s)).collect();
                self.put(*dst, Value::Struct(name.as_str().into(), values));
            }
            Instr::MakeClosure {
                dst,
                routine,
                env,
                copy,
                destroy,
            } => {
                let env = env.iter().map(|s| self.take(*s)).collect();
                let rec = ClosureRecord {
                    routine: *routine,
                    env,
                    copy: copy.clone(),
                    destroy: destroy.clone(),
                };
                self.put(*dst, Value::Func(Box::new(rec)));
            }
            Instr::Copy { dst, src } => {
                let v = self.heap_copy_slot(*src);
                let v = self.copy_counted(v);
                self.put(*dst, v);
            }
            Instr::Move { dst, src } => {
                let v = self.take(*src);
                self.heap.stats.moves += 1;
                self.put(*dst, v);
            }
            Instr::Destroy { slot } => {
                let v = self.take(*slot);
                self.heap.destroy_value(v);
            }
            Instr::LoadPath {
                dst,
                base,
                steps,
                span,
            } => {
                let loc = self.resolve(*base, steps, false, *span)?;
                let v = self.copy_at(&loc);
                let v = self.copy_counted(v);
                self.put(*dst, v);
            }
            Instr::StorePath {
                base,
                steps,
                value,
                span,
            } => {
                let v = self.take(*value);
                let loc = match self.resolve(*base, steps, true, *span) {
                    Ok(l) => l,
                    Err(e) => {
                        self.heap.destroy_value(v);
                        return Err(e);
                    }
                };
                let old = std::mem::replace(self.value_at_mut(&loc), v);
                self.heap.destroy_value(old);
            }
            Instr::ResolveLocation {
                dst,
                base,
                steps,
                span,
            } => {
                let loc = self.resolve(*base, steps, true, *span)?;
                self.frame().locs[dst.0 as usize] = Some(loc);
            }
            Instr::OverlapCheck { a, b, span } => {
                if self.loc(*a).overlaps(&self.loc(*b)) {
                    return Err(trap(
                        TrapKind::OverlapViolation,
                        *span,
                        "overlapping inout accesses in one call",
                    ));
                }
            }
            Instr::Binary {
                dst,
                op,
                lhs,
                rhs,
                span,
            } => {
                let (l, r) = (self.take(*lhs), self.take(*rhs));
                let v = match (l, r) {
                    (Value::Int(a), Value::Int(b)) => Value::Int(int_op(*op, a, b).map_err(|k| {
                        let m = match k {
                            TrapKind::DivisionByZero => "division by zero".to_string(),
                            _ => format!("integer overflow in {a} {} {b}", op.symbol()),
                        };
                        trap(k, *span, m)
                    })?),
                    (Value::Float(a), Value::Float(b)) => match float_op(*op, a, b) {
                        FloatResult::Float(x) => Value::Float(x),
                        FloatResult::Int(i) => Value::Int(i),
                    },
                    (l, r) => panic!("ill-typed operands {l:?} {r:?}"),
                };
                self.put(*dst, v);
            }
            Instr::Call {
                dst,
                callee,
                args,
                inouts,
                ..
            } => {
                let (routine, env) = match callee {
                    Callee::Slot(s) => {
                        let Value::Func(c) = self.read(*s) else {
                            panic!("call of non-function")
                        };
                        (c.routine, Location::frame_slot(self.frames.len() - 1, *s))
                    }
                    Callee::Loc(l) => {
                        let loc = self.loc(*l);
                        let Value::Func(c) = self.value_at(&loc) else {
                            panic!("call of non-function")
                        };
                        (c.routine, loc)
                    }
                };
                let args = args.iter().map(|s| self.take(*s)).collect();
                let inouts = inouts.iter().map(|l| self.loc(*l)).collect();
                let v = self.call(routine, args, inouts, Some(env))?;
                self.put(*dst, v);
            }
        }
        Ok(())
    }

    fn heap_copy_slot(&mut self, s: Slot) -> Value {
        let alias = self.read(s).alias();
        self.heap.adopt(alias)
    }

    fn copy_at(&mut self, loc: &Location) -> Value {
        let alias = self.value_at(loc).alias();
        self.heap.adopt(alias)
    }
}
