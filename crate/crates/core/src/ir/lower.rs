//! Lowering of the typed tree to IR. Function literals become routines and
//! closure values become `MakeClosure` records pairing a routine with its
//! captured environment.

use std::collections::BTreeMap;

use super::metatype::{synthesize_env_metatype, synthesize_metatype};
use super::*;
use crate::typeck::typed::{Access, TArg, TCall, TCallee, TExpr, TExprKind, TFunc, TPath, TStep};
use crate::typeck::TypedProgram;

pub fn lower_program(program: &TypedProgram) -> IrProgram {
    let mut cx = Lowerer {
        structs: &program.structs,
        routines: vec![None],
        metatypes: BTreeMap::new(),
    };
    let mut fb = FnBuilder::new(None);
    let result = cx.expr(&mut fb, &program.entry);
    fb.terminate(Terminator::Return(result));
    cx.routines[0] = Some(fb.finish(RoutineId(0), Vec::new()));
    IrProgram {
        routines: cx.routines.into_iter().map(|r| r.expect("routine")).collect(),
        metatypes: cx.metatypes,
        entry: RoutineId(0),
        structs: program.structs.clone(),
    }
}

#[derive(Debug, Clone, Copy)]
enum VarRef {
    Slot(Slot),
    Loc(Loc),
    Capture(u32),
}

struct FnBuilder {
    blocks: Vec<(Vec<Instr>, Option<Terminator>)>,
    current: usize,
    slot_types: Vec<Type>,
    loc_count: u32,
    scope: Vec<(String, VarRef)>,
    env: Option<Loc>,
}

impl FnBuilder {
    fn new(env_loc: Option<()>) -> Self {
        let mut fb = FnBuilder {
            blocks: vec![(Vec::new(), None)],
            current: 0,
            slot_types: Vec::new(),
            loc_count: 0,
            scope: Vec::new(),
            env: None,
        };
        if env_loc.is_some() {
            fb.env = Some(fb.new_loc());
        }
        fb
    }

    fn new_loc(&mut self) -> Loc {
        self.loc_count += 1;
        Loc(self.loc_count - 1)
    }

    fn new_block(&mut self) -> BlockId {
        self.blocks.push((Vec::new(), None));
        BlockId(self.blocks.len() as u32 - 1)
    }

    fn switch_to(&mut self, b: BlockId) {
        self.current = b.0 as usize;
    }

    fn emit(&mut self, i: Instr) {
        let block = &mut self.blocks[self.current];
        debug_assert!(block.1.is_none(), "emit into terminated block");
        block.0.push(i);
    }

    fn terminate(&mut self, t: Terminator) {
        self.blocks[self.current].1 = Some(t);
    }

    fn lookup(&self, name: &str) -> VarRef {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
            .unwrap_or_else(|| panic!("unbound `{name}` after type checking"))
    }

    fn finish(self, id: RoutineId, params: Vec<Param>) -> Routine {
        Routine {
            id,
            params,
            env: self.env,
            slot_types: self.slot_types,
            loc_count: self.loc_count,
            blocks: self
                .blocks
                .into_iter()
                .map(|(instrs, term)| Block {
                    instrs,
                    term: term.expect("unterminated block"),
                })
                .collect(),
        }
    }
}

struct Lowerer<'a> {
    structs: &'a StructTable,
    routines: Vec<Option<Routine>>,
    metatypes: BTreeMap<Subject, TypeMetadata>,
}

impl Lowerer<'_> {
    fn register(&mut self, t: &Type) {
        let key = Subject::Type(t.clone());
        if self.metatypes.contains_key(&key) {
            return;
        }
        self.metatypes
            .insert(key, synthesize_metatype(t, self.structs));
        match t {
            Type::Array(e) => self.register(e),
            Type::Struct(n) => {
                let fields: Vec<Type> = self.structs[n].fields.iter().map(|f| f.ty.clone()).collect();
                fields.iter().for_each(|f| self.register(f));
            }
            Type::Func(f) => {
                for (_, p) in &f.params {
                    self.register(p);
                }
                self.register(&f.codomain);
            }
            Type::Int | Type::Float => {}
        }
    }

    fn slot(&mut self, fb: &mut FnBuilder, t: &Type) -> Slot {
        self.register(t);
        fb.slot_types.push(t.clone());
        Slot(fb.slot_types.len() as u32 - 1)
    }

    fn root_place(&mut self, fb: &mut FnBuilder, root: &str) -> (Place, Vec<Step>) {
        match fb.lookup(root) {
            VarRef::Slot(s) => (Place::Slot(s), Vec::new()),
            VarRef::Loc(l) => (Place::Loc(l), Vec::new()),
            VarRef::Capture(i) => (Place::Loc(fb.env.expect("env")), vec![Step::Env(i)]),
        }
    }

    /// Evaluates the path's index expressions left to right.
    fn path_steps(&mut self, fb: &mut FnBuilder, path: &TPath) -> (Place, Vec<Step>) {
        let (place, mut steps) = self.root_place(fb, &path.root);
        for s in &path.steps {
            steps.push(match s {
                TStep::Field { index, .. } => Step::Field(*index as u32),
                TStep::Index(e) => Step::Index(self.expr(fb, e)),
            });
        }
        (place, steps)
    }

    fn whole_slot(&self, fb: &FnBuilder, e: &TExpr) -> Option<Slot> {
        match &e.kind {
            TExprKind::Path(p) if p.steps.is_empty() => match fb.lookup(&p.root) {
                VarRef::Slot(s) => Some(s),
                _ => None,
            },
            _ => None,
        }
    }

    /// Evaluates `e` into a fresh slot through an explicit `Copy`, the form
    /// every binding, assignment and by-value argument takes.
    fn copy_into(&mut self, fb: &mut FnBuilder, e: &TExpr) -> Slot {
        if let Some(src) = self.whole_slot(fb, e) {
            let dst = self.slot(fb, &e.ty);
            fb.emit(Instr::Copy { dst, src });
            return dst;
        }
        let t = self.expr(fb, e);
        let dst = self.slot(fb, &e.ty);
        fb.emit(Instr::Copy { dst, src: t });
        fb.emit(Instr::Destroy { slot: t });
        dst
    }

    fn expr(&mut self, fb: &mut FnBuilder, e: &TExpr) -> Slot {
        match &e.kind {
            TExprKind::Int(v) => {
                let dst = self.slot(fb, &e.ty);
                fb.emit(Instr::MakeInt { dst, value: *v });
                dst
            }
            TExprKind::Float(v) => {
                let dst = self.slot(fb, &e.ty);
                fb.emit(Instr::MakeFloat { dst, value: *v });
                dst
            }
            TExprKind::Array(elems) => {
                let elems: Vec<Slot> = elems.iter().map(|x| self.expr(fb, x)).collect();
                let elem = match &e.ty {
                    Type::Array(t) => (**t).clone(),
                    _ => unreachable!("array literal of non-array type"),
                };
                let dst = self.slot(fb, &e.ty);
                fb.emit(Instr::MakeArray { dst, elem, elems });
                dst
            }
            TExprKind::StructInit { name, args } => {
                let fields: Vec<Slot> = args.iter().map(|x| self.expr(fb, x)).collect();
                let dst = self.slot(fb, &e.ty);
                fb.emit(Instr::MakeStruct {
                    dst,
                    name: name.clone(),
                    fields,
                });
                dst
            }
            TExprKind::Path(p) => self.read_path(fb, p),
            TExprKind::Binding {
                name, init, body, ..
            } => {
                let Some(name) = name else {
                    let t = self.expr(fb, init);
                    fb.emit(Instr::Destroy { slot: t });
                    return self.expr(fb, body);
                };
                let v = self.copy_into(fb, init);
                fb.scope.push((name.clone(), VarRef::Slot(v)));
                let r = self.expr(fb, body);
                fb.scope.pop();
                fb.emit(Instr::Destroy { slot: v });
                r
            }
            TExprKind::Assign {
                target,
                value,
                body,
            } => {
                match target {
                    None => {
                        let t = self.expr(fb, value);
                        fb.emit(Instr::Destroy { slot: t });
                    }
                    Some(path) => {
                        let v = self.copy_into(fb, value);
                        match (path.steps.is_empty(), fb.lookup(&path.root)) {
                            (true, VarRef::Slot(var)) => {
                                fb.emit(Instr::Destroy { slot: var });
                                fb.emit(Instr::Move { dst: var, src: v });
                            }
                            _ => {
                                let (base, steps) = self.path_steps(fb, path);
                                fb.emit(Instr::StorePath {
                                    base,
                                    steps,
                                    value: v,
                                    span: path.span,
                                });
                            }
                        }
                    }
                }
                self.expr(fb, body)
            }
            TExprKind::Binary { op, lhs, rhs } => {
                let l = self.expr(fb, lhs);
                let r = self.expr(fb, rhs);
                let dst = self.slot(fb, &e.ty);
                fb.emit(Instr::Binary {
                    dst,
                    op: *op,
                    lhs: l,
                    rhs: r,
                    span: e.span,
                });
                dst
            }
            TExprKind::Cond { cond, then, els } => {
                let c = self.expr(fb, cond);
                let res = self.slot(fb, &e.ty);
                let (bt, be, join) = (fb.new_block(), fb.new_block(), fb.new_block());
                fb.terminate(Terminator::CondBr {
                    cond: c,
                    then: bt,
                    els: be,
                });
                for (block, arm) in [(bt, then), (be, els)] {
                    fb.switch_to(block);
                    let r = self.expr(fb, arm);
                    fb.emit(Instr::Move { dst: res, src: r });
                    fb.terminate(Terminator::Jump(join));
                }
                fb.switch_to(join);
                res
            }
            TExprKind::Func(f) => self.closure(fb, f, &e.ty),
            TExprKind::Call(call) => self.call(fb, call, &e.ty, e.span),
        }
    }

    fn read_path(&mut self, fb: &mut FnBuilder, p: &TPath) -> Slot {
        if p.steps.is_empty() {
            if let VarRef::Slot(src) = fb.lookup(&p.root) {
                let dst = self.slot(fb, p.ty());
                fb.emit(Instr::Copy { dst, src });
                return dst;
            }
        }
        let (base, steps) = self.path_steps(fb, p);
        let dst = self.slot(fb, p.ty());
        fb.emit(Instr::LoadPath {
            dst,
            base,
            steps,
            span: p.span,
        });
        dst
    }

    fn closure(&mut self, fb: &mut FnBuilder, f: &TFunc, ty: &Type) -> Slot {
        let id = RoutineId(self.routines.len() as u32);
        self.routines.push(None);

        let mut inner = FnBuilder::new(Some(()));
        for (i, c) in f.captures.iter().enumerate() {
            inner.scope.push((c.name.clone(), VarRef::Capture(i as u32)));
        }
        let mut params = Vec::new();
        let mut by_value = Vec::new();
        for p in &f.params {
            let r = match p.passing {
                crate::frontend::ast::Passing::ByValue => {
                    let s = self.slot(&mut inner, &p.ty);
                    by_value.push(s);
                    params.push(Param::ByValue(s));
                    VarRef::Slot(s)
                }
                crate::frontend::ast::Passing::Inout => {
                    let l = inner.new_loc();
                    params.push(Param::Inout(l));
                    VarRef::Loc(l)
                }
            };
            inner.scope.push((p.name.clone(), r));
        }
        let r = self.expr(&mut inner, &f.body);
        for s in by_value.into_iter().rev() {
            inner.emit(Instr::Destroy { slot: s });
        }
        inner.terminate(Terminator::Return(r));
        self.routines[id.0 as usize] = Some(inner.finish(id, params));

        let env_types: Vec<Type> = f.captures.iter().map(|c| c.ty.clone()).collect();
        let env_meta = synthesize_env_metatype(&env_types, self.structs);
        let (copy, destroy) = (env_meta.copy_routine.clone(), env_meta.destroy_routine.clone());
        self.metatypes
            .entry(env_meta.subject.clone())
            .or_insert(env_meta);

        let env: Vec<Slot> = f
            .captures
            .iter()
            .map(|c| {
                let p = TPath {
                    root: c.name.clone(),
                    root_mutable: c.mutable,
                    steps: Vec::new(),
                    step_types: vec![c.ty.clone()],
                    span: Span::default(),
                };
                self.read_path(fb, &p)
            })
            .collect();
        let dst = self.slot(fb, ty);
        fb.emit(Instr::MakeClosure {
            dst,
            routine: id,
            env,
            copy,
            destroy,
        });
        dst
    }

    fn call(&mut self, fb: &mut FnBuilder, call: &TCall, ty: &Type, span: Span) -> Slot {
        let callee_temp = match &call.callee {
            TCallee::Expr(e) => Some(self.expr(fb, e)),
            TCallee::Path(_) => None,
        };
        let mut args = Vec::new();
        for a in &call.args {
            if let TArg::Value(e) = a {
                args.push(self.copy_into(fb, e));
            }
        }
        let callee_steps = match &call.callee {
            TCallee::Path(p) => Some((self.path_steps(fb, p), p.span)),
            TCallee::Expr(_) => None,
        };
        let mut inout_steps = Vec::new();
        for (i, a) in call.args.iter().enumerate() {
            if let TArg::Inout(p) = a {
                inout_steps.push((i, self.path_steps(fb, p), p.span));
            }
        }

        let callee = match (callee_temp, callee_steps) {
            (Some(s), _) => Callee::Slot(s),
            (None, Some(((base, steps), span))) => {
                let dst = fb.new_loc();
                fb.emit(Instr::ResolveLocation {
                    dst,
                    base,
                    steps,
                    span,
                });
                Callee::Loc(dst)
            }
            (None, None) => unreachable!(),
        };
        let mut arg_locs = BTreeMap::new();
        let mut inouts = Vec::new();
        for (i, (base, steps), span) in inout_steps {
            let dst = fb.new_loc();
            fb.emit(Instr::ResolveLocation {
                dst,
                base,
                steps,
                span,
            });
            arg_locs.insert(i, dst);
            inouts.push(dst);
        }
        let loc_of = |a: Access| match (a, callee) {
            (Access::Callee, Callee::Loc(l)) => l,
            (Access::Arg(i), _) => arg_locs[&i],
            (Access::Callee, Callee::Slot(_)) => unreachable!("temporary callee has no access"),
        };
        for (a, b) in &call.overlap_checks {
            fb.emit(Instr::OverlapCheck {
                a: loc_of(*a),
                b: loc_of(*b),
                span,
            });
        }
        let dst = self.slot(fb, ty);
        fb.emit(Instr::Call {
            dst,
            callee,
            args,
            inouts,
            span,
        });
        if let Callee::Slot(s) = callee {
            fb.emit(Instr::Destroy { slot: s });
        }
        dst
    }
}
