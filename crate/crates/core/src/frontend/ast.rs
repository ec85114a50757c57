//! Abstract syntax of MVSL programs.

use crate::diag::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qualifier {
    Let,
    Var,
}

impl Qualifier {
    pub fn as_str(self) -> &'static str {
        match self {
            Qualifier::Let => "let",
            Qualifier::Var => "var",
        }
    }

    pub fn is_mutable(self) -> bool {
        self == Qualifier::Var
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Passing {
    ByValue,
    Inout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 1,
            BinOp::Add | BinOp::Sub => 2,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 3,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeExpr {
    Named(String, Span),
    Array(Box<TypeExpr>),
    Func(Vec<(Passing, TypeExpr)>, Box<TypeExpr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub qualifier: Qualifier,
    pub name: String,
    pub ty: TypeExpr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructDecl {
    pub name: String,
    pub fields: Vec<FieldDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub structs: Vec<StructDecl>,
    pub entry: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }
}

/// `None` names the wildcard `_`.
pub type Name = Option<String>;

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Binding {
        qualifier: Qualifier,
        name: Name,
        annotation: Option<TypeExpr>,
        init: Box<Expr>,
        body: Box<Expr>,
    },
    Assign {
        /// `None` is the wildcard target `_`.
        target: Option<Path>,
        value: Box<Expr>,
        body: Box<Expr>,
    },
    Int(i64),
    Float(f64),
    Array(Vec<Expr>),
    StructInit {
        name: String,
        args: Vec<Expr>,
    },
    Func(FuncLit),
    Call {
        callee: Box<Expr>,
        args: Vec<Arg>,
    },
    Path(Path),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Cond {
        cond: Box<Expr>,
        then: Box<Expr>,
        els: Box<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub passing: Passing,
    pub ty: TypeExpr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuncLit {
    pub params: Vec<Param>,
    pub codomain: TypeExpr,
    pub body: Box<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Arg {
    Value(Expr),
    Inout(Path),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Accessor {
    Field(String),
    Index(Expr),
}

/// `_` as a root parses to a path named `"_"` so the type checker can
/// report the read.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub root: String,
    pub accessors: Vec<Accessor>,
    pub span: Span,
}

/// Structural equality that ignores source positions.
pub trait SpanFree {
    fn clear_spans(&mut self);

    fn without_spans(&self) -> Self
    where
        Self: Clone,
    {
        let mut copy = self.clone();
        copy.clear_spans();
        copy
    }
}

impl SpanFree for Program {
    fn clear_spans(&mut self) {
        for s in &mut self.structs {
            s.span = Span::default();
            for f in &mut s.fields {
                f.ty.clear_spans();
            }
        }
        self.entry.clear_spans();
    }
}

impl SpanFree for TypeExpr {
    fn clear_spans(&mut self) {
        match self {
            TypeExpr::Named(_, span) => *span = Span::default(),
            TypeExpr::Array(elem) => elem.clear_spans(),
            TypeExpr::Func(params, cod) => {
                for (_, t) in params {
                    t.clear_spans();
                }
                cod.clear_spans();
            }
        }
    }
}

impl SpanFree for Path {
    fn clear_spans(&mut self) {
        self.span = Span::default();
        for a in &mut self.accessors {
            if let Accessor::Index(e) = a {
                e.clear_spans();
            }
        }
    }
}

impl SpanFree for Expr {
    fn clear_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            ExprKind::Binding {
                annotation,
                init,
                body,
                ..
            } => {
                if let Some(a) = annotation {
                    a.clear_spans();
                }
                init.clear_spans();
                body.clear_spans();
            }
            ExprKind::Assign {
                target,
                value,
                body,
            } => {
                if let Some(t) = target {
                    t.clear_spans();
                }
                value.clear_spans();
                body.clear_spans();
            }
            ExprKind::Int(_) | ExprKind::Float(_) => {}
            ExprKind::Array(elems) => elems.iter_mut().for_each(Expr::clear_spans),
            ExprKind::StructInit { args, .. } => args.iter_mut().for_each(Expr::clear_spans),
            ExprKind::Func(f) => {
                for p in &mut f.params {
                    p.ty.clear_spans();
                }
                f.codomain.clear_spans();
                f.body.clear_spans();
            }
            ExprKind::Call { callee, args } => {
                callee.clear_spans();
                for a in args {
                    match a {
                        Arg::Value(e) => e.clear_spans(),
                        Arg::Inout(p) => p.clear_spans(),
                    }
                }
            }
            ExprKind::Path(p) => p.clear_spans(),
            ExprKind::Binary { lhs, rhs, .. } => {
                lhs.clear_spans();
                rhs.clear_spans();
            }
            ExprKind::Cond { cond, then, els } => {
                cond.clear_spans();
                then.clear_spans();
                els.clear_spans();
            }
        }
    }
}
