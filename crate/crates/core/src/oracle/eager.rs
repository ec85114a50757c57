//! Reference interpreter over the typed tree. Every value is a self-contained
//! tree, every copy is a deep clone and inout arguments are copied in before
//! the call and copied back out after it. Evaluation order and trap positions
//! match the VM so that outcomes can be compared exactly.

use std::fmt::Write;
use std::rc::Rc;

use crate::diag::Span;
use crate::runtime::{float_op, format_float, int_op, FloatResult, RuntimeTrap, TrapKind};
use crate::typeck::typed::{TArg, TCall, TCallee, TExpr, TExprKind, TFunc, TPath, TStep};
use crate::typeck::TypedProgram;

#[derive(Debug, Clone)]
pub enum OValue {
    Int(i64),
    Float(f64),
    Struct(String, Vec<OValue>),
    Array(Vec<OValue>),
    Func(Rc<TFunc>, Vec<OValue>),
}

impl OValue {
    fn int(&self) -> i64 {
        match self {
            OValue::Int(i) => *i,
            v => panic!("expected Int, found {v:?}"),
        }
    }

    pub fn format(&self) -> String {
        let mut s = String::new();
        self.write(&mut s);
        s
    }

    fn write(&self, out: &mut String) {
        let seq = |vs: &[OValue], open, close, out: &mut String| {
            out.push(open);
            for (i, v) in vs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                v.write(out);
            }
            out.push(close);
        };
        match self {
            OValue::Int(i) => {
                let _ = write!(out, "{i}");
            }
            OValue::Float(x) => out.push_str(&format_float(*x)),
            OValue::Struct(n, fs) => {
                out.push_str(n);
                seq(fs, '(', ')', out);
            }
            OValue::Array(es) => seq(es, '[', ']', out),
            OValue::Func(..) => out.push_str("<function>"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Concrete {
    Field(usize),
    Index(usize),
}

fn trap(kind: TrapKind, span: Span, message: impl Into<String>) -> RuntimeTrap {
    RuntimeTrap {
        kind,
        span,
        message: message.into(),
    }
}

type Result<T> = std::result::Result<T, RuntimeTrap>;

/// Evaluates the program and formats its final value.
pub fn interpret_eager(program: &TypedProgram) -> Result<String> {
    let mut scope = Vec::new();
    Ok(eval(&mut scope, &program.entry)?.format())
}

type Scope = Vec<(String, OValue)>;

fn var<'a>(scope: &'a mut Scope, name: &str) -> &'a mut OValue {
    scope
        .iter_mut()
        .rev()
        .find(|(n, _)| n == name)
        .map(|(_, v)| v)
        .unwrap_or_else(|| panic!("unbound `{name}`"))
}

/// Evaluates the path's index expressions left to right.
fn indices(scope: &mut Scope, path: &TPath) -> Result<Vec<i64>> {
    path.index_exprs().map(|e| Ok(eval(scope, e)?.int())).collect()
}

/// Navigates `path` given pre-evaluated indices, checking bounds in order.
fn place<'a>(
    scope: &'a mut Scope,
    path: &TPath,
    idx: &[i64],
) -> Result<(&'a mut OValue, Vec<Concrete>)> {
    let mut v = var(scope, &path.root);
    let mut idx = idx.iter();
    let mut trail = Vec::new();
    for s in &path.steps {
        v = match (s, v) {
            (TStep::Field { index, .. }, OValue::Struct(_, fs)) => {
                trail.push(Concrete::Field(*index));
                &mut fs[*index]
            }
            (TStep::Index(_), OValue::Array(es)) => {
                let i = *idx.next().expect("index value");
                if i < 0 || i as usize >= es.len() {
                    return Err(trap(
                        TrapKind::IndexOutOfBounds,
                        path.span,
                        format!("index {i} out of bounds for array of length {}", es.len()),
                    ));
                }
                trail.push(Concrete::Index(i as usize));
                &mut es[i as usize]
            }
            (s, v) => panic!("bad step {s:?} into {v:?}"),
        };
    }
    Ok((v, trail))
}

fn eval(scope: &mut Scope, e: &TExpr) -> Result<OValue> {
    match &e.kind {
        TExprKind::Int(i) => Ok(OValue::Int(*i)),
        TExprKind::Float(x) => Ok(OValue::Float(*x)),
        TExprKind::Array(es) => Ok(OValue::Array(
            es.iter().map(|x| eval(scope, x)).collect::<Result<_>>()?,
        )),
        TExprKind::StructInit { name, args } => Ok(OValue::Struct(
            name.clone(),
            args.iter().map(|x| eval(scope, x)).collect::<Result<_>>()?,
        )),
        TExprKind::Path(p) => {
            let idx = indices(scope, p)?;
            Ok(place(scope, p, &idx)?.0.clone())
        }
        TExprKind::Binding {
            name, init, body, ..
        } => {
            let v = eval(scope, init)?;
            match name {
                None => eval(scope, body),
                Some(n) => {
                    scope.push((n.clone(), v));
                    let r = eval(scope, body);
                    scope.pop();
                    r
                }
            }
        }
        TExprKind::Assign {
            target,
            value,
            body,
        } => {
            let v = eval(scope, value)?;
            if let Some(p) = target {
                let idx = indices(scope, p)?;
                *place(scope, p, &idx)?.0 = v;
            }
            eval(scope, body)
        }
        TExprKind::Binary { op, lhs, rhs } => {
            let l = eval(scope, lhs)?;
            let r = eval(scope, rhs)?;
            match (l, r) {
                (OValue::Int(a), OValue::Int(b)) => int_op(*op, a, b).map(OValue::Int).map_err(|k| {
                    let m = match k {
                        TrapKind::DivisionByZero => "division by zero".to_string(),
                        _ => format!("integer overflow in {a} {} {b}", op.symbol()),
                    };
                    trap(k, e.span, m)
                }),
                (OValue::Float(a), OValue::Float(b)) => Ok(match float_op(*op, a, b) {
                    FloatResult::Float(x) => OValue::Float(x),
                    FloatResult::Int(i) => OValue::Int(i),
                }),
                (l, r) => panic!("ill-typed operands {l:?} {r:?}"),
            }
        }
        TExprKind::Cond { cond, then, els } => {
            if eval(scope, cond)?.int() != 0 {
                eval(scope, then)
            } else {
                eval(scope, els)
            }
        }
        TExprKind::Func(f) => {
            let mut env = Vec::new();
            for c in &f.captures {
                env.push(var(scope, &c.name).clone());
            }
            Ok(OValue::Func(f.clone(), env))
        }
        TExprKind::Call(call) => eval_call(scope, call, e.span),
    }
}

fn eval_call(scope: &mut Scope, call: &TCall, span: Span) -> Result<OValue> {
    let temp = match &call.callee {
        TCallee::Expr(e) => Some(eval(scope, e)?),
        TCallee::Path(_) => None,
    };
    let mut by_value = Vec::new();
    for a in &call.args {
        if let TArg::Value(e) = a {
            by_value.push(eval(scope, e)?);
        }
    }
    let callee_idx = match &call.callee {
        TCallee::Path(p) => Some(indices(scope, p)?),
        TCallee::Expr(_) => None,
    };
    let mut inout_idx = Vec::new();
    for a in &call.args {
        if let TArg::Inout(p) = a {
            inout_idx.push(indices(scope, p)?);
        }
    }

    // Resolve in the VM's order so bounds traps agree; remember the concrete
    // trail of each access for the exclusivity check.
    let callee_trail = match (&call.callee, &callee_idx) {
        (TCallee::Path(p), Some(idx)) => Some(place(scope, p, idx)?.1),
        _ => None,
    };
    let inout_paths: Vec<&TPath> = call
        .args
        .iter()
        .filter_map(|a| match a {
            TArg::Inout(p) => Some(p),
            TArg::Value(_) => None,
        })
        .collect();
    let mut trails = Vec::new();
    for (p, idx) in inout_paths.iter().zip(&inout_idx) {
        trails.push(place(scope, p, idx)?.1);
    }
    let arg_trail = |i: usize| {
        let k = call.args[..i]
            .iter()
            .filter(|a| matches!(a, TArg::Inout(_)))
            .count();
        &trails[k]
    };
    for (a, b) in &call.overlap_checks {
        let trail_of = |acc| match acc {
            crate::typeck::typed::Access::Callee => callee_trail.as_ref().expect("callee path"),
            crate::typeck::typed::Access::Arg(i) => arg_trail(i),
        };
        let (ta, tb) = (trail_of(*a), trail_of(*b));
        if ta.starts_with(tb) || tb.starts_with(ta) {
            return Err(trap(
                TrapKind::OverlapViolation,
                span,
                "overlapping inout accesses in one call",
            ));
        }
    }

    // Copy in.
    let closure = match (&temp, &call.callee, &callee_idx) {
        (Some(v), _, _) => v.clone(),
        (None, TCallee::Path(p), Some(idx)) => place(scope, p, idx)?.0.clone(),
        _ => unreachable!(),
    };
    let OValue::Func(f, env) = closure else {
        panic!("call of non-function")
    };
    let mut inner: Scope = Vec::new();
    for (c, v) in f.captures.iter().zip(env) {
        inner.push((c.name.clone(), v));
    }
    let mut by_value = by_value.into_iter();
    let mut inouts = inout_paths.iter().zip(&inout_idx);
    for p in &f.params {
        let v = match p.passing {
            crate::frontend::ast::Passing::ByValue => by_value.next().expect("argument"),
            crate::frontend::ast::Passing::Inout => {
                let (path, idx) = inouts.next().expect("inout argument");
                place(scope, path, idx)?.0.clone()
            }
        };
        inner.push((p.name.clone(), v));
    }
    let result = eval(&mut inner, &f.body)?;

    // Copy out, left to right, then write the environment back.
    let ncap = f.captures.len();
    let mut inouts = inout_paths.iter().zip(&inout_idx);
    for (k, p) in f.params.iter().enumerate() {
        if p.passing == crate::frontend::ast::Passing::Inout {
            let (path, idx) = inouts.next().expect("inout argument");
            let v = std::mem::replace(&mut inner[ncap + k].1, OValue::Int(0));
            *place(scope, path, idx)?.0 = v;
        }
    }
    if let (TCallee::Path(p), Some(idx)) = (&call.callee, &callee_idx) {
        let env: Vec<OValue> = inner.drain(..ncap).map(|(_, v)| v).collect();
        *place(scope, p, idx)?.0 = OValue::Func(f, env);
    }
    Ok(result)
}
