//! Deterministic, type-directed generation of well-typed programs.
//!
//! Generated programs never trap: every arithmetic result is reduced modulo
//! a constant so Int values stay below 2^31 in magnitude, divisors are
//! nonzero literals, every array of a given element type has one fixed
//! length and is only subscripted by in-bounds literals, and inout arguments
//! are chosen to be statically disjoint.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diag::Span;
use crate::frontend::ast::{
    Accessor, Arg, BinOp, Expr, ExprKind, FieldDecl, FuncLit, Param, Passing, Path, Program,
    Qualifier, StructDecl, TypeExpr,
};
use crate::typeck::overlap::{paths_overlap, AccessPathShape, OverlapVerdict, ShapeStep};
use crate::typeck::types::{FuncType, Type};

/// Modulus applied after every `+`, `-` and `*`.
const MODULUS: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub size_budget: usize,
    pub max_depth: usize,
    pub struct_count: usize,
    pub enable_closures: bool,
    pub enable_inout: bool,
}

impl GenConfig {
    pub fn new(seed: u64, size_budget: usize) -> Self {
        GenConfig {
            seed,
            size_budget,
            max_depth: 6,
            struct_count: 3,
            enable_closures: true,
            enable_inout: true,
        }
    }
}

pub fn generate_program(cfg: &GenConfig) -> Program {
    assert!(cfg.size_budget >= 1, "size budget must be positive");
    let mut g = Gen::new(cfg);
    if cfg.size_budget == 1 {
        return Program {
            structs: Vec::new(),
            entry: g.int_literal(),
        };
    }
    g.declare_structs();
    let ty = g.pick_value_type(0);
    let entry = g.expr(&ty, 0);
    Program {
        structs: g.struct_decls(),
        entry,
    }
}

/// A program of the shape `let p = e in var q = p in <mutations of q> in p`,
/// paired with `let p = e in p`, which must print the same value.
pub fn generate_copy_then_mutate(cfg: &GenConfig) -> (Program, Program) {
    let mut g = Gen::new(cfg);
    g.declare_structs();
    let ty = loop {
        let t = g.pick_value_type(0);
        if !matches!(t, Type::Int | Type::Float) {
            break t;
        }
    };
    let init = g.expr(&ty, 2);
    let structs = g.struct_decls();
    let baseline = Program {
        structs: structs.clone(),
        entry: binding(Qualifier::Let, "p", Some(&ty), init.clone(), path_expr(&GPath::var("p"))),
    };

    g.scope.push(GVar::new("p", ty.clone(), false));
    g.scope.push(GVar::new("q", ty.clone(), true));
    let mut mutations = Vec::new();
    let count = g.rng.gen_range(1..=4);
    for _ in 0..count {
        g.budget = (cfg.size_budget / 4).max(4) as isize;
        let targets: Vec<(GPath, Type)> = g
            .paths()
            .into_iter()
            .filter(|(p, _, m)| *m && p.root == "q")
            .map(|(p, t, _)| (p, t))
            .collect();
        let (target, t) = targets.choose(&mut g.rng).expect("q is mutable").clone();
        if cfg.enable_inout && g.rng.gen_bool(0.3) {
            mutations.push(Mutation::Call(g.mutator_call(&target, &t)));
        } else {
            mutations.push(Mutation::Assign(target, g.expr(&t, 2)));
        }
    }
    let mut body = path_expr(&GPath::var("p"));
    for m in mutations.into_iter().rev() {
        body = match m {
            Mutation::Assign(p, v) => assign(Some(&p), v, body),
            Mutation::Call(c) => binding(Qualifier::Let, "_", None, c, body),
        };
    }
    let body = binding(Qualifier::Var, "q", Some(&ty), path_expr(&GPath::var("p")), body);
    let entry = binding(Qualifier::Let, "p", Some(&ty), init, body);
    (Program { structs, entry }, baseline)
}

enum Mutation {
    Assign(GPath, Expr),
    Call(Expr),
}

#[derive(Debug, Clone)]
struct GVar {
    name: String,
    ty: Type,
    mutable: bool,
}

impl GVar {
    fn new(name: &str, ty: Type, mutable: bool) -> Self {
        GVar {
            name: name.to_string(),
            ty,
            mutable,
        }
    }
}

#[derive(Debug, Clone)]
struct GStruct {
    name: String,
    fields: Vec<(String, bool, Type)>,
}

#[derive(Debug, Clone, PartialEq)]
enum GStep {
    Field(String),
    Index(usize),
}

#[derive(Debug, Clone, PartialEq)]
struct GPath {
    root: String,
    steps: Vec<GStep>,
}

impl GPath {
    fn var(name: &str) -> Self {
        GPath {
            root: name.to_string(),
            steps: Vec::new(),
        }
    }

    fn shape(&self) -> AccessPathShape {
        AccessPathShape::new(
            self.root.clone(),
            self.steps
                .iter()
                .map(|s| match s {
                    GStep::Field(f) => ShapeStep::Field(f.clone()),
                    GStep::Index(i) => ShapeStep::IndexLiteral(*i as i64),
                })
                .collect(),
        )
    }

    fn to_ast(&self) -> Path {
        Path {
            root: self.root.clone(),
            accessors: self
                .steps
                .iter()
                .map(|s| match s {
                    GStep::Field(f) => Accessor::Field(f.clone()),
                    GStep::Index(i) => Accessor::Index(lit(*i as i64)),
                })
                .collect(),
            span: Span::default(),
        }
    }
}

fn e(kind: ExprKind) -> Expr {
    Expr::new(kind, Span::default())
}

fn lit(i: i64) -> Expr {
    e(ExprKind::Int(i))
}

fn path_expr(p: &GPath) -> Expr {
    e(ExprKind::Path(p.to_ast()))
}

fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
    e(ExprKind::Binary {
        op,
        lhs: Box::new(l),
        rhs: Box::new(r),
    })
}

fn binding(q: Qualifier, name: &str, ann: Option<&Type>, init: Expr, body: Expr) -> Expr {
    e(ExprKind::Binding {
        qualifier: q,
        name: (name != "_").then(|| name.to_string()),
        annotation: ann.map(type_expr),
        init: Box::new(init),
        body: Box::new(body),
    })
}

fn assign(target: Option<&GPath>, value: Expr, body: Expr) -> Expr {
    e(ExprKind::Assign {
        target: target.map(GPath::to_ast),
        value: Box::new(value),
        body: Box::new(body),
    })
}

pub fn type_expr(t: &Type) -> TypeExpr {
    match t {
        Type::Int => TypeExpr::Named("Int".into(), Span::default()),
        Type::Float => TypeExpr::Named("Float".into(), Span::default()),
        Type::Struct(n) => TypeExpr::Named(n.clone(), Span::default()),
        Type::Array(t) => TypeExpr::Array(Box::new(type_expr(t))),
        Type::Func(f) => TypeExpr::Func(
            f.params.iter().map(|(p, t)| (*p, type_expr(t))).collect(),
            Box::new(type_expr(&f.codomain)),
        ),
    }
}

struct Gen<'c> {
    cfg: &'c GenConfig,
    rng: ChaCha8Rng,
    budget: isize,
    structs: Vec<GStruct>,
    lengths: HashMap<Type, usize>,
    scope: Vec<GVar>,
    func_types: Vec<FuncType>,
    next_var: usize,
    next_param: usize,
}

impl<'c> Gen<'c> {
    fn new(cfg: &'c GenConfig) -> Self {
        Gen {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            budget: cfg.size_budget as isize,
            structs: Vec::new(),
            lengths: HashMap::new(),
            scope: Vec::new(),
            func_types: Vec::new(),
            next_var: 0,
            next_param: 0,
        }
    }

    fn declare_structs(&mut self) {
        let count = self.rng.gen_range(0..=self.cfg.struct_count);
        for i in 0..count {
            let nfields = self.rng.gen_range(1..=3);
            let mut fields = Vec::new();
            for k in 0..nfields {
                let ty = self.field_type(i);
                let mutable = self.rng.gen_bool(0.75);
                fields.push((format!("f{k}"), mutable, ty));
            }
            self.structs.push(GStruct {
                name: format!("S{i}"),
                fields,
            });
        }
        self.build_func_types();
    }

    /// Field types may only mention earlier structs, so declarations are acyclic.
    fn field_type(&mut self, index: usize) -> Type {
        let earlier = |g: &mut Self| Type::Struct(format!("S{}", g.rng.gen_range(0..index)));
        match self.rng.gen_range(0..10) {
            0..=3 => Type::Int,
            4 => Type::Float,
            5 | 6 if index > 0 => earlier(self),
            7 => Type::array_of(Type::Int),
            8 if index > 0 => Type::array_of(earlier(self)),
            9 if self.cfg.enable_closures => Type::Func(FuncType {
                params: vec![(Passing::ByValue, Type::Int)],
                codomain: Box::new(Type::Int),
            }),
            _ => Type::Int,
        }
    }

    fn build_func_types(&mut self) {
        let f = |params: Vec<(Passing, Type)>, codomain: Type| FuncType {
            params,
            codomain: Box::new(codomain),
        };
        let mut v = vec![
            f(vec![], Type::Int),
            f(vec![(Passing::ByValue, Type::Int)], Type::Int),
            f(vec![(Passing::ByValue, Type::Float)], Type::Float),
            f(vec![(Passing::ByValue, Type::array_of(Type::Int))], Type::Int),
        ];
        if self.cfg.enable_inout {
            v.push(f(vec![(Passing::Inout, Type::Int)], Type::Int));
            v.push(f(
                vec![(Passing::Inout, Type::Int), (Passing::Inout, Type::Int)],
                Type::Int,
            ));
            v.push(f(vec![(Passing::Inout, Type::array_of(Type::Int))], Type::Int));
        }
        for s in self.structs.iter().map(|s| Type::Struct(s.name.clone())) {
            v.push(f(vec![(Passing::ByValue, Type::Int)], s.clone()));
            if self.cfg.enable_inout {
                v.push(f(vec![(Passing::Inout, s), (Passing::ByValue, Type::Int)], Type::Int));
            }
        }
        self.func_types = v;
    }

    fn struct_decls(&self) -> Vec<StructDecl> {
        self.structs
            .iter()
            .map(|s| StructDecl {
                name: s.name.clone(),
                fields: s
                    .fields
                    .iter()
                    .map(|(n, m, t)| FieldDecl {
                        qualifier: if *m { Qualifier::Var } else { Qualifier::Let },
                        name: n.clone(),
                        ty: type_expr(t),
                    })
                    .collect(),
                span: Span::default(),
            })
            .collect()
    }

    fn struct_def(&self, name: &str) -> &GStruct {
        self.structs.iter().find(|s| s.name == name).expect("declared struct")
    }

    fn length_of(&mut self, elem: &Type) -> usize {
        if let Some(n) = self.lengths.get(elem) {
            return *n;
        }
        let n = self.rng.gen_range(1..=3);
        self.lengths.insert(elem.clone(), n);
        n
    }

    fn pick_value_type(&mut self, depth: usize) -> Type {
        let nstructs = self.structs.len();
        match self.rng.gen_range(0..13) {
            0..=3 => Type::Int,
            4 => Type::Float,
            5..=6 if nstructs > 0 => Type::Struct(format!("S{}", self.rng.gen_range(0..nstructs))),
            7..=8 => Type::array_of(Type::Int),
            9 if nstructs > 0 => {
                Type::array_of(Type::Struct(format!("S{}", self.rng.gen_range(0..nstructs))))
            }
            10..=11 if depth < 2 => Type::array_of(Type::array_of(Type::Int)),
            12 if self.cfg.enable_closures => {
                let i = self.rng.gen_range(0..self.func_types.len());
                Type::Func(self.func_types[i].clone())
            }
            _ => Type::Int,
        }
    }

    fn fresh_var(&mut self) -> String {
        self.next_var += 1;
        format!("v{}", self.next_var - 1)
    }

    fn fresh_param(&mut self) -> String {
        self.next_param += 1;
        format!("p{}", self.next_param - 1)
    }

    /// Every path reachable from variables in scope, up to three steps.
    fn paths(&mut self) -> Vec<(GPath, Type, bool)> {
        let mut out = Vec::new();
        let roots: Vec<GVar> = self.scope.clone();
        for v in roots {
            let mut frontier = vec![(GPath::var(&v.name), v.ty.clone(), v.mutable)];
            for _ in 0..=3 {
                let mut next = Vec::new();
                for (p, t, m) in frontier {
                    match &t {
                        Type::Struct(n) => {
                            for (f, fm, ft) in self.struct_def(n).fields.clone() {
                                let mut q = p.clone();
                                q.steps.push(GStep::Field(f));
                                next.push((q, ft, m && fm));
                            }
                        }
                        Type::Array(elem) => {
                            let n = self.length_of(elem);
                            let i = self.rng.gen_range(0..n);
                            let mut q = p.clone();
                            q.steps.push(GStep::Index(i));
                            next.push((q, (**elem).clone(), m));
                        }
                        _ => {}
                    }
                    out.push((p, t, m));
                }
                frontier = next;
            }
        }
        out
    }

    fn readable(&mut self, ty: &Type) -> Vec<GPath> {
        self.paths()
            .into_iter()
            .filter(|(_, t, _)| t == ty)
            .map(|(p, _, _)| p)
            .collect()
    }

    fn int_literal(&mut self) -> Expr {
        lit(self.rng.gen_range(-999..=999))
    }

    fn float_literal(&mut self) -> Expr {
        e(ExprKind::Float(self.rng.gen_range(-40..=40) as f64 / 4.0))
    }

    fn expr(&mut self, ty: &Type, depth: usize) -> Expr {
        self.budget -= 1;
        if self.budget <= 0 || depth >= self.cfg.max_depth {
            return self.leaf(ty, depth);
        }
        let mut choices: Vec<(u32, u8)> = vec![(4, 0), (1, 3), (3, 5)];
        if self.paths().iter().any(|(_, _, m)| *m) {
            choices.push((4, 1));
        }
        if !self.readable(ty).is_empty() {
            choices.push((3, 2));
        }
        if self.cfg.enable_closures {
            choices.push((2, 4));
        }
        let total: u32 = choices.iter().map(|c| c.0).sum();
        let mut roll = self.rng.gen_range(0..total);
        let pick = choices
            .iter()
            .find(|(w, _)| {
                if roll < *w {
                    true
                } else {
                    roll -= w;
                    false
                }
            })
            .map(|c| c.1)
            .unwrap_or(5);
        match pick {
            0 => self.binding_expr(ty, depth),
            1 => self.assign_expr(ty, depth),
            2 => {
                let ps = self.readable(ty);
                let p = ps.choose(&mut self.rng).expect("readable path").clone();
                path_expr(&p)
            }
            3 => {
                let c = self.condition(depth + 1);
                let then = self.expr(ty, depth + 1);
                let els = self.expr(ty, depth + 1);
                e(ExprKind::Cond {
                    cond: Box::new(c),
                    then: Box::new(then),
                    els: Box::new(els),
                })
            }
            4 => self
                .call_expr(ty, depth)
                .unwrap_or_else(|| self.leaf(ty, depth)),
            _ => self.intro(ty, depth),
        }
    }

    /// A type-specific introduction form: literal, arithmetic or constructor.
    fn intro(&mut self, ty: &Type, depth: usize) -> Expr {
        match ty {
            Type::Int => match self.rng.gen_range(0..6) {
                0 => self.int_literal(),
                1..=3 => {
                    let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul].choose(&mut self.rng).unwrap();
                    let l = self.expr(&Type::Int, depth + 1);
                    let r = self.expr(&Type::Int, depth + 1);
                    bin(BinOp::Rem, bin(op, l, r), lit(MODULUS))
                }
                4 => {
                    let op = *[BinOp::Div, BinOp::Rem].choose(&mut self.rng).unwrap();
                    let l = self.expr(&Type::Int, depth + 1);
                    let d = self.rng.gen_range(1..=9);
                    bin(op, l, lit(d))
                }
                _ => self.condition(depth),
            },
            Type::Float => {
                if self.rng.gen_bool(0.4) {
                    self.float_literal()
                } else {
                    let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div]
                        .choose(&mut self.rng)
                        .unwrap();
                    let l = self.expr(&Type::Float, depth + 1);
                    let r = self.expr(&Type::Float, depth + 1);
                    bin(op, l, r)
                }
            }
            Type::Struct(n) => {
                let fields = self.struct_def(n).fields.clone();
                let args = fields.iter().map(|(_, _, t)| self.expr(t, depth + 1)).collect();
                e(ExprKind::StructInit {
                    name: n.clone(),
                    args,
                })
            }
            Type::Array(elem) => {
                let n = self.length_of(elem);
                e(ExprKind::Array((0..n).map(|_| self.expr(elem, depth + 1)).collect()))
            }
            Type::Func(f) => self.closure(f, depth),
        }
    }

    fn condition(&mut self, depth: usize) -> Expr {
        let op = *[BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge, BinOp::Eq, BinOp::Ne]
            .choose(&mut self.rng)
            .unwrap();
        let (l, r) = if self.rng.gen_bool(0.8) {
            (self.expr(&Type::Int, depth + 1), self.expr(&Type::Int, depth + 1))
        } else {
            (self.expr(&Type::Float, depth + 1), self.expr(&Type::Float, depth + 1))
        };
        bin(op, l, r)
    }

    /// Minimal-size expression of the type; does not consume budget.
    fn leaf(&mut self, ty: &Type, depth: usize) -> Expr {
        let vars: Vec<String> = self
            .scope
            .iter()
            .filter(|v| v.ty == *ty)
            .map(|v| v.name.clone())
            .collect();
        if !vars.is_empty() && self.rng.gen_bool(0.5) {
            return path_expr(&GPath::var(vars.choose(&mut self.rng).unwrap()));
        }
        match ty {
            Type::Int => self.int_literal(),
            Type::Float => self.float_literal(),
            Type::Struct(n) => {
                let fields = self.struct_def(n).fields.clone();
                let args = fields.iter().map(|(_, _, t)| self.leaf(t, depth + 1)).collect();
                e(ExprKind::StructInit {
                    name: n.clone(),
                    args,
                })
            }
            Type::Array(elem) => {
                let n = self.length_of(elem);
                e(ExprKind::Array((0..n).map(|_| self.leaf(elem, depth + 1)).collect()))
            }
            Type::Func(f) => {
                let saved = self.budget;
                self.budget = 0;
                let c = self.closure(f, depth);
                self.budget = saved;
                c
            }
        }
    }

    fn binding_expr(&mut self, ty: &Type, depth: usize) -> Expr {
        // Often copy something already in scope, so later mutations of
        // either side exercise value independence.
        let existing = self.paths();
        let (t, init) = if !existing.is_empty() && self.rng.gen_bool(0.4) {
            let (p, t, _) = existing.choose(&mut self.rng).unwrap().clone();
            (t, path_expr(&p))
        } else {
            let t = self.pick_value_type(depth);
            let init = self.expr(&t, depth + 1);
            (t, init)
        };
        let name = self.fresh_var();
        let mutable = self.rng.gen_bool(0.6);
        let ann = self.rng.gen_bool(0.3).then_some(&t);
        self.scope.push(GVar::new(&name, t.clone(), mutable));
        let body = self.expr(ty, depth + 1);
        self.scope.pop();
        let q = if mutable { Qualifier::Var } else { Qualifier::Let };
        binding(q, &name, ann, init, body)
    }

    fn assign_expr(&mut self, ty: &Type, depth: usize) -> Expr {
        let targets: Vec<(GPath, Type)> = self
            .paths()
            .into_iter()
            .filter(|(_, _, m)| *m)
            .map(|(p, t, _)| (p, t))
            .collect();
        if targets.is_empty() || self.rng.gen_bool(0.05) {
            let t = self.pick_value_type(depth);
            let v = self.expr(&t, depth + 1);
            let body = self.expr(ty, depth + 1);
            return assign(None, v, body);
        }
        let (p, t) = targets.choose(&mut self.rng).unwrap().clone();
        let v = self.expr(&t, depth + 1);
        let body = self.expr(ty, depth + 1);
        assign(Some(&p), v, body)
    }

    fn closure(&mut self, f: &FuncType, depth: usize) -> Expr {
        let mut params = Vec::new();
        for (passing, t) in &f.params {
            let name = self.fresh_param();
            params.push(Param {
                name: name.clone(),
                passing: *passing,
                ty: type_expr(t),
            });
            self.scope
                .push(GVar::new(&name, t.clone(), *passing == Passing::Inout));
        }
        let body = self.expr(&f.codomain, depth + 1);
        for _ in &f.params {
            self.scope.pop();
        }
        e(ExprKind::Func(FuncLit {
            params,
            codomain: type_expr(&f.codomain),
            body: Box::new(body),
        }))
    }

    /// Picks statically disjoint mutable paths for the inout parameters.
    fn inout_paths(&mut self, f: &FuncType, callee: Option<&GPath>) -> Option<Vec<GPath>> {
        let mutable: Vec<(GPath, Type)> = self
            .paths()
            .into_iter()
            .filter(|(_, _, m)| *m)
            .map(|(p, t, _)| (p, t))
            .collect();
        let mut chosen: Vec<GPath> = callee.into_iter().cloned().collect();
        let mut inouts = Vec::new();
        for (passing, t) in &f.params {
            if *passing != Passing::Inout {
                continue;
            }
            let candidates: Vec<&GPath> = mutable
                .iter()
                .filter(|(p, pt)| {
                    pt == t
                        && chosen
                            .iter()
                            .all(|c| paths_overlap(&c.shape(), &p.shape()) == OverlapVerdict::Disjoint)
                })
                .map(|(p, _)| p)
                .collect();
            let p = (*candidates.choose(&mut self.rng)?).clone();
            chosen.push(p.clone());
            inouts.push(p);
        }
        Some(inouts)
    }

    fn call_expr(&mut self, ty: &Type, depth: usize) -> Option<Expr> {
        let callees: Vec<(GPath, FuncType)> = self
            .paths()
            .into_iter()
            .filter_map(|(p, t, _)| match t {
                Type::Func(f) if *f.codomain == *ty => Some((p, f)),
                _ => None,
            })
            .collect();
        let (callee, f) = if !callees.is_empty() && self.rng.gen_bool(0.7) {
            let (p, f) = callees.choose(&mut self.rng).unwrap().clone();
            (Some(p), f)
        } else {
            let fits: Vec<FuncType> = self
                .func_types
                .iter()
                .filter(|f| *f.codomain == *ty)
                .cloned()
                .collect();
            let f = fits.choose(&mut self.rng)?.clone();
            (None, f)
        };
        let mut inouts = self.inout_paths(&f, callee.as_ref())?.into_iter();
        let callee_expr = match &callee {
            Some(p) => path_expr(p),
            None => self.closure(&f, depth + 1),
        };
        let mut args = Vec::new();
        for (passing, t) in &f.params {
            args.push(match passing {
                Passing::ByValue => Arg::Value(self.expr(t, depth + 1)),
                Passing::Inout => Arg::Inout(inouts.next().expect("inout path").to_ast()),
            });
        }
        Some(e(ExprKind::Call {
            callee: Box::new(callee_expr),
            args,
        }))
    }

    /// A call that mutates `target` in place through an inout parameter.
    fn mutator_call(&mut self, target: &GPath, t: &Type) -> Expr {
        let name = self.fresh_param();
        self.scope.push(GVar::new(&name, t.clone(), true));
        let param = GPath::var(&name);
        let v = self.expr(t, 3);
        self.scope.pop();
        let body = assign(Some(&param), v, lit(0));
        let f = e(ExprKind::Func(FuncLit {
            params: vec![Param {
                name,
                passing: Passing::Inout,
                ty: type_expr(t),
            }],
            codomain: type_expr(&Type::Int),
            body: Box::new(body),
        }));
        e(ExprKind::Call {
            callee: Box::new(f),
            args: vec![Arg::Inout(target.to_ast())],
        })
    }
}
