//! Canonical source rendering of an AST. Re-parsing the output yields a
//! structurally identical program.

use std::collections::HashSet;
use std::fmt::Write;

use crate::frontend::ast::*;

pub fn pretty_print(program: &Program) -> String {
    let structs: HashSet<&str> = program.structs.iter().map(|s| s.name.as_str()).collect();
    let mut p = Printer {
        out: String::new(),
        structs,
    };
    for s in &program.structs {
        p.out.push_str("struct ");
        p.out.push_str(&s.name);
        p.out.push_str(" {");
        for (i, f) in s.fields.iter().enumerate() {
            p.out.push_str(if i == 0 { " " } else { "; " });
            let _ = write!(p.out, "{} {}: {}", f.qualifier.as_str(), f.name, type_expr(&f.ty));
        }
        p.out.push_str(if s.fields.is_empty() { "} in\n" } else { " } in\n" });
    }
    p.expr(&program.entry);
    p.out
}

/// Source text of an access path, e.g. `a[i].fs`.
pub fn path_text(path: &Path) -> String {
    let mut p = Printer {
        out: String::new(),
        structs: HashSet::new(),
    };
    p.path(path);
    p.out
}

pub fn type_expr(t: &TypeExpr) -> String {
    match t {
        TypeExpr::Named(n, _) => n.clone(),
        TypeExpr::Array(e) => format!("[{}]", type_expr(e)),
        TypeExpr::Func(params, cod) => {
            let ps: Vec<String> = params
                .iter()
                .map(|(pass, t)| match pass {
                    Passing::Inout => format!("inout {}", type_expr(t)),
                    Passing::ByValue => type_expr(t),
                })
                .collect();
            format!("({}) -> {}", ps.join(", "), type_expr(cod))
        }
    }
}

struct Printer<'a> {
    out: String,
    structs: HashSet<&'a str>,
}

fn is_open(e: &Expr) -> bool {
    matches!(
        e.kind,
        ExprKind::Binding { .. } | ExprKind::Assign { .. } | ExprKind::Cond { .. }
    )
}

impl Printer<'_> {
    /// Prints `e` in a position where an open-ended expression would swallow
    /// trailing tokens.
    fn closed(&mut self, e: &Expr, wrap: bool) {
        if wrap || is_open(e) {
            self.out.push('(');
            self.expr(e);
            self.out.push(')');
        } else {
            self.expr(e);
        }
    }

    fn list(&mut self, items: &[Expr]) {
        for (i, e) in items.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            self.expr(e);
        }
    }

    fn path(&mut self, p: &Path) {
        self.out.push_str(&p.root);
        for a in &p.accessors {
            match a {
                Accessor::Field(f) => {
                    self.out.push('.');
                    self.out.push_str(f);
                }
                Accessor::Index(e) => {
                    self.out.push('[');
                    self.expr(e);
                    self.out.push(']');
                }
            }
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Binding {
                qualifier,
                name,
                annotation,
                init,
                body,
            } => {
                let _ = write!(
                    self.out,
                    "{} {}",
                    qualifier.as_str(),
                    name.as_deref().unwrap_or("_")
                );
                if let Some(t) = annotation {
                    let _ = write!(self.out, ": {}", type_expr(t));
                }
                self.out.push_str(" = ");
                self.expr(init);
                self.out.push_str(" in\n");
                self.expr(body);
            }
            ExprKind::Assign {
                target,
                value,
                body,
            } => {
                match target {
                    Some(p) => self.path(p),
                    None => self.out.push('_'),
                }
                self.out.push_str(" = ");
                self.expr(value);
                self.out.push_str(" in\n");
                self.expr(body);
            }
            ExprKind::Int(v) => {
                let _ = write!(self.out, "{v}");
            }
            ExprKind::Float(v) => {
                let _ = write!(self.out, "{v:?}");
            }
            ExprKind::Array(elems) => {
                self.out.push('[');
                self.list(elems);
                self.out.push(']');
            }
            ExprKind::StructInit { name, args } => {
                self.out.push_str(name);
                self.out.push('(');
                self.list(args);
                self.out.push(')');
            }
            ExprKind::Func(f) => {
                self.out.push('(');
                for (i, p) in f.params.iter().enumerate() {
                    if i > 0 {
                        self.out.push_str(", ");
                    }
                    let inout = if p.passing == Passing::Inout { "inout " } else { "" };
                    let _ = write!(self.out, "{}: {inout}{}", p.name, type_expr(&p.ty));
                }
                let _ = write!(self.out, ") -> {} {{ ", type_expr(&f.codomain));
                self.expr(&f.body);
                self.out.push_str(" }");
            }
            ExprKind::Call { callee, args } => {
                let wrap = match &callee.kind {
                    ExprKind::Binary { .. } => true,
                    ExprKind::Path(p) => {
                        p.accessors.is_empty() && self.structs.contains(p.root.as_str())
                    }
                    _ => false,
                };
                self.closed(callee, wrap);
                self.out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        self.out.push_str(", ");
                    }
                    match a {
                        Arg::Value(e) => self.expr(e),
                        Arg::Inout(p) => {
                            self.out.push('&');
                            self.path(p);
                        }
                    }
                }
                self.out.push(')');
            }
            ExprKind::Path(p) => self.path(p),
            ExprKind::Binary { op, lhs, rhs } => {
                let prec = op.precedence();
                let wrap_l = matches!(lhs.kind, ExprKind::Binary { op: l, .. } if l.precedence() < prec);
                let wrap_r = matches!(rhs.kind, ExprKind::Binary { op: r, .. } if r.precedence() <= prec);
                self.closed(lhs, wrap_l);
                let _ = write!(self.out, " {} ", op.symbol());
                self.closed(rhs, wrap_r);
            }
            ExprKind::Cond { cond, then, els } => {
                self.out.push_str("if ");
                self.expr(cond);
                self.out.push_str(" then ");
                self.expr(then);
                self.out.push_str(" else ");
                self.expr(els);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    fn round_trip(src: &str) {
        let p = parse(src).unwrap();
        let printed = pretty_print(&p);
        let q = parse(&printed).unwrap_or_else(|e| panic!("reparse failed: {e}\n{printed}"));
        assert_eq!(p.without_spans(), q.without_spans(), "\n{printed}");
    }

    #[test]
    fn round_trips_listings() {
        round_trip("var foo: Int = 4 in let bar: Int = foo in bar");
        round_trip(
            "struct Pair { var fs: Int; var sn: Int } in struct U {} in \
             let swap: (inout Int, inout Int) -> U = (a: inout Int, b: inout Int) -> U { \
               let tmp = a in a = b in b = tmp in U() } in \
             var p = Pair(4, 2) in _ = swap(&p.fs, &p.sn) in p",
        );
        round_trip("var foo: Int = 42 in var fn: () -> Int { foo = foo + 1 in foo } in let bar = fn() in bar");
    }

    #[test]
    fn round_trips_nesting() {
        round_trip("(1 - (2 - 3)) * (4 + 5) / 6 % 7");
        round_trip("1 + (var x = 2 in x) + (if 1 then 2 else 3)");
        round_trip("f(x = 1 in 2)(3)");
        round_trip("[-1, -2.5, 1e300, 0.1](0)");
        round_trip("struct P {} in var P: Int = 1 in (P)(2)");
        round_trip("var x = if 1 then 2 else var y = 3 in y in x");
    }
}
