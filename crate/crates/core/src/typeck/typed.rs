//! Type-annotated program tree produced by the checker.

use std::fmt::Write;
use std::rc::Rc;

use crate::diag::Span;
use crate::frontend::ast::{BinOp, Passing};
use crate::typeck::types::{FuncType, StructTable, Type};

#[derive(Debug, Clone)]
pub struct TypedProgram {
    pub structs: StructTable,
    pub entry: TExpr,
}

#[derive(Debug, Clone)]
pub struct TExpr {
    pub kind: TExprKind,
    pub ty: Type,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum TExprKind {
    Binding {
        mutable: bool,
        name: Option<String>,
        init: Box<TExpr>,
        body: Box<TExpr>,
    },
    Assign {
        target: Option<TPath>,
        value: Box<TExpr>,
        body: Box<TExpr>,
    },
    Int(i64),
    Float(f64),
    Array(Vec<TExpr>),
    StructInit {
        name: String,
        args: Vec<TExpr>,
    },
    Func(Rc<TFunc>),
    Call(TCall),
    Path(TPath),
    Binary {
        op: BinOp,
        lhs: Box<TExpr>,
        rhs: Box<TExpr>,
    },
    Cond {
        cond: Box<TExpr>,
        then: Box<TExpr>,
        els: Box<TExpr>,
    },
}

#[derive(Debug, Clone)]
pub struct TParam {
    pub name: String,
    pub passing: Passing,
    pub ty: Type,
}

/// A captured identifier. Captures are listed in the order their bindings
/// were declared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Capture {
    pub name: String,
    pub ty: Type,
    pub mutable: bool,
}

#[derive(Debug, Clone)]
pub struct TFunc {
    pub ty: FuncType,
    pub params: Vec<TParam>,
    pub body: TExpr,
    pub captures: Vec<Capture>,
}

#[derive(Debug, Clone)]
pub enum TCallee {
    /// Called in place; the closure environment is accessed through the path.
    Path(TPath),
    Expr(Box<TExpr>),
}

#[derive(Debug, Clone)]
pub enum TArg {
    Value(TExpr),
    Inout(TPath),
}

/// One of the exclusive accesses made by a call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Access {
    Callee,
    Arg(usize),
}

#[derive(Debug, Clone)]
pub struct TCall {
    pub callee: TCallee,
    pub args: Vec<TArg>,
    /// Access pairs that may overlap depending on runtime index values.
    pub overlap_checks: Vec<(Access, Access)>,
}

impl TCall {
    pub fn access_path(&self, access: Access) -> &TPath {
        match (access, &self.callee) {
            (Access::Callee, TCallee::Path(p)) => p,
            (Access::Arg(i), _) => match &self.args[i] {
                TArg::Inout(p) => p,
                TArg::Value(_) => panic!("argument {i} is not inout"),
            },
            (Access::Callee, TCallee::Expr(_)) => panic!("callee is not a path"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum TStep {
    Field {
        name: String,
        index: usize,
        mutable: bool,
    },
    Index(Box<TExpr>),
}

#[derive(Debug, Clone)]
pub struct TPath {
    pub root: String,
    pub root_mutable: bool,
    pub steps: Vec<TStep>,
    /// Type after each step; `step_types[0]` is the root's type.
    pub step_types: Vec<Type>,
    pub span: Span,
}

impl TPath {
    pub fn ty(&self) -> &Type {
        self.step_types.last().expect("root type")
    }

    /// A path is mutable iff its root is and every field it traverses is.
    pub fn is_mutable(&self) -> bool {
        self.root_mutable
            && self.steps.iter().all(|s| match s {
                TStep::Field { mutable, .. } => *mutable,
                TStep::Index(_) => true,
            })
    }

    pub fn index_exprs(&self) -> impl Iterator<Item = &TExpr> {
        self.steps.iter().filter_map(|s| match s {
            TStep::Index(e) => Some(&**e),
            TStep::Field { .. } => None,
        })
    }
}

/// Indented, one-node-per-line dump used by `--dump=types`.
pub fn dump(program: &TypedProgram) -> String {
    let mut out = String::new();
    for s in program.structs.values() {
        let _ = write!(out, "struct {}", s.name);
        for f in &s.fields {
            let q = if f.mutable { "var" } else { "let" };
            let _ = write!(out, " {q} {}: {};", f.name, f.ty);
        }
        out.push('\n');
    }
    dump_expr(&program.entry, 0, &mut out);
    out
}

fn path_text(p: &TPath) -> String {
    let mut s = p.root.clone();
    for step in &p.steps {
        match step {
            TStep::Field { name, .. } => {
                s.push('.');
                s.push_str(name);
            }
            TStep::Index(_) => s.push_str("[_]"),
        }
    }
    s
}

fn dump_expr(e: &TExpr, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let head = match &e.kind {
        TExprKind::Binding { mutable, name, .. } => format!(
            "binding {} {}",
            if *mutable { "var" } else { "let" },
            name.as_deref().unwrap_or("_")
        ),
        TExprKind::Assign { target, .. } => format!(
            "assign {}",
            target.as_ref().map(path_text).unwrap_or_else(|| "_".into())
        ),
        TExprKind::Int(v) => format!("int {v}"),
        TExprKind::Float(v) => format!("float {v:?}"),
        TExprKind::Array(_) => "array".into(),
        TExprKind::StructInit { name, .. } => format!("init {name}"),
        TExprKind::Func(f) => {
            let caps: Vec<&str> = f.captures.iter().map(|c| c.name.as_str()).collect();
            format!("func captures=[{}]", caps.join(", "))
        }
        TExprKind::Call(c) => match &c.callee {
            TCallee::Path(p) => format!("call {}", path_text(p)),
            TCallee::Expr(_) => "call".into(),
        },
        TExprKind::Path(p) => format!("path {}", path_text(p)),
        TExprKind::Binary { op, .. } => format!("binary {}", op.symbol()),
        TExprKind::Cond { .. } => "if".into(),
    };
    let _ = writeln!(out, "{pad}{head} : {}", e.ty);
    let mut child = |c: &TExpr| dump_expr(c, depth + 1, out);
    match &e.kind {
        TExprKind::Binding { init, body, .. } => {
            child(init);
            child(body);
        }
        TExprKind::Assign { target, value, body } => {
            if let Some(t) = target {
                t.index_exprs().for_each(&mut child);
            }
            child(value);
            child(body);
        }
        TExprKind::Array(elems) | TExprKind::StructInit { args: elems, .. } => {
            elems.iter().for_each(child)
        }
        TExprKind::Func(f) => child(&f.body),
        TExprKind::Call(c) => {
            match &c.callee {
                TCallee::Path(p) => p.index_exprs().for_each(&mut child),
                TCallee::Expr(e) => child(e),
            }
            for a in &c.args {
                match a {
                    TArg::Value(e) => child(e),
                    TArg::Inout(p) => p.index_exprs().for_each(&mut child),
                }
            }
        }
        TExprKind::Path(p) => p.index_exprs().for_each(child),
        TExprKind::Binary { lhs, rhs, .. } => {
            child(lhs);
            child(rhs);
        }
        TExprKind::Cond { cond, then, els } => {
            child(cond);
            child(then);
            child(els);
        }
        TExprKind::Int(_) | TExprKind::Float(_) => {}
    }
}
