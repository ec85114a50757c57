use std::rc::Rc;

use crate::diag::Span;
use crate::frontend::path_text;
use crate::frontend::ast::{
    Accessor, Arg, BinOp, Expr, ExprKind, FuncLit, Passing, Path, Program, SpanFree, StructDecl,
    TypeExpr,
};
use crate::typeck::overlap::{paths_overlap, AccessPathShape, OverlapVerdict};
use crate::typeck::typed::*;
use crate::typeck::types::{FieldDef, FuncType, StructDef, StructTable, Type};
use crate::typeck::{ErrorCode, TypeError};

type Result<T> = std::result::Result<T, TypeError>;

pub fn check_program(program: &Program) -> Result<TypedProgram> {
    let structs = check_struct_table(&program.structs)?;
    let mut checker = Checker {
        structs: &structs,
        scopes: vec![FnScope::default()],
        next_var: 0,
    };
    let entry = checker.expr(&program.entry, None)?;
    Ok(TypedProgram { structs, entry })
}

pub fn check_struct_table(decls: &[StructDecl]) -> Result<StructTable> {
    let mut table = StructTable::new();
    for d in decls {
        table.insert(
            d.name.clone(),
            StructDef {
                name: d.name.clone(),
                fields: Vec::new(),
            },
        );
    }
    for d in decls {
        let mut fields = Vec::with_capacity(d.fields.len());
        for f in &d.fields {
            fields.push(FieldDef {
                name: f.name.clone(),
                mutable: f.qualifier.is_mutable(),
                ty: resolve_type(&table, &f.ty)?,
            });
        }
        table[&d.name].fields = fields;
    }

    // Depth-first search for a cycle in the inline-storage dependency graph.
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Gray,
        Black,
    }
    fn deps(t: &Type, out: &mut Vec<String>) {
        match t {
            Type::Struct(n) => out.push(n.clone()),
            Type::Array(e) => deps(e, out),
            Type::Int | Type::Float | Type::Func(_) => {}
        }
    }
    fn visit(
        table: &StructTable,
        idx: usize,
        marks: &mut [Mark],
        stack: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        marks[idx] = Mark::Gray;
        stack.push(idx);
        let mut next = Vec::new();
        for f in &table[idx].fields {
            deps(&f.ty, &mut next);
        }
        for name in next {
            let j = table.get_index_of(&name).expect("resolved struct");
            match marks[j] {
                Mark::Gray => {
                    let pos = stack.iter().position(|&s| s == j).expect("on stack");
                    return Some(stack[pos..].to_vec());
                }
                Mark::White => {
                    if let Some(c) = visit(table, j, marks, stack) {
                        return Some(c);
                    }
                }
                Mark::Black => {}
            }
        }
        stack.pop();
        marks[idx] = Mark::Black;
        None
    }

    let mut marks = vec![Mark::White; table.len()];
    for i in 0..table.len() {
        if marks[i] == Mark::White {
            if let Some(cycle) = visit(&table, i, &mut marks, &mut Vec::new()) {
                let names: Vec<String> = cycle.iter().map(|&c| table[c].name.clone()).collect();
                let mut err = TypeError::new(
                    ErrorCode::RecursiveStruct,
                    decls[cycle[0]].span,
                    format!(
                        "recursive struct definition: {} -> {}",
                        names.join(" -> "),
                        names[0]
                    ),
                );
                err.cycle = names;
                return Err(err);
            }
        }
    }
    Ok(table)
}

fn resolve_type(structs: &StructTable, t: &TypeExpr) -> Result<Type> {
    Ok(match t {
        TypeExpr::Named(n, span) => match n.as_str() {
            "Int" => Type::Int,
            "Float" => Type::Float,
            _ if structs.contains_key(n) => Type::Struct(n.clone()),
            _ => {
                return Err(TypeError::new(
                    ErrorCode::UnboundName,
                    *span,
                    format!("unknown type `{n}`"),
                ))
            }
        },
        TypeExpr::Array(e) => Type::array_of(resolve_type(structs, e)?),
        TypeExpr::Func(params, cod) => Type::Func(FuncType {
            params: params
                .iter()
                .map(|(p, t)| Ok((*p, resolve_type(structs, t)?)))
                .collect::<Result<_>>()?,
            codomain: Box::new(resolve_type(structs, cod)?),
        }),
    })
}

#[derive(Clone)]
struct Var {
    id: usize,
    name: String,
    ty: Type,
    mutable: bool,
}

#[derive(Default)]
struct FnScope {
    vars: Vec<Var>,
    captures: Vec<Var>,
}

struct Checker<'s> {
    structs: &'s StructTable,
    scopes: Vec<FnScope>,
    next_var: usize,
}

fn mismatch(span: Span, expected: &Type, found: &Type) -> TypeError {
    TypeError::new(
        ErrorCode::TypeMismatch,
        span,
        format!("expected `{expected}`, found `{found}`"),
    )
}

impl Checker<'_> {
    fn resolve(&self, t: &TypeExpr) -> Result<Type> {
        resolve_type(self.structs, t)
    }

    fn declare(&mut self, name: &str, ty: Type, mutable: bool) {
        let id = self.next_var;
        self.next_var += 1;
        self.scopes.last_mut().unwrap().vars.push(Var {
            id,
            name: name.to_string(),
            ty,
            mutable,
        });
    }

    fn undeclare(&mut self) {
        self.scopes.last_mut().unwrap().vars.pop();
    }

    /// Finds `name` in function scope `level`, recording a capture in every
    /// function scope it crosses.
    fn lookup_at(&mut self, level: usize, name: &str) -> Option<Var> {
        let scope = &self.scopes[level];
        if let Some(v) = scope.vars.iter().rev().find(|v| v.name == name) {
            return Some(v.clone());
        }
        if let Some(v) = scope.captures.iter().find(|v| v.name == name) {
            return Some(v.clone());
        }
        if level == 0 {
            return None;
        }
        let v = self.lookup_at(level - 1, name)?;
        self.scopes[level].captures.push(v.clone());
        Some(v)
    }

    fn lookup(&mut self, name: &str, span: Span) -> Result<Var> {
        if name == "_" {
            return Err(TypeError::new(
                ErrorCode::WildcardRead,
                span,
                "`_` cannot be read",
            ));
        }
        let top = self.scopes.len() - 1;
        self.lookup_at(top, name).ok_or_else(|| {
            TypeError::new(
                ErrorCode::UnboundName,
                span,
                format!("unbound identifier `{name}`"),
            )
        })
    }

    fn path(&mut self, p: &Path) -> Result<TPath> {
        let root = self.lookup(&p.root, p.span)?;
        let mut ty = root.ty.clone();
        let mut steps = Vec::with_capacity(p.accessors.len());
        let mut step_types = vec![ty.clone()];
        for acc in &p.accessors {
            match acc {
                Accessor::Field(name) => {
                    let Type::Struct(sname) = &ty else {
                        return Err(TypeError::new(
                            ErrorCode::TypeMismatch,
                            p.span,
                            format!("type `{ty}` has no field `{name}`"),
                        ));
                    };
                    let def = &self.structs[sname];
                    let Some((index, field)) = def.field(name) else {
                        return Err(TypeError::new(
                            ErrorCode::UnboundName,
                            p.span,
                            format!("struct `{sname}` has no field `{name}`"),
                        ));
                    };
                    steps.push(TStep::Field {
                        name: name.clone(),
                        index,
                        mutable: field.mutable,
                    });
                    ty = field.ty.clone();
                }
                Accessor::Index(e) => {
                    let Type::Array(elem) = &ty else {
                        return Err(TypeError::new(
                            ErrorCode::TypeMismatch,
                            p.span,
                            format!("type `{ty}` cannot be subscripted"),
                        ));
                    };
                    let elem = (**elem).clone();
                    let index = self.expr(e, Some(&Type::Int))?;
                    if index.ty != Type::Int {
                        return Err(mismatch(e.span, &Type::Int, &index.ty));
                    }
                    steps.push(TStep::Index(Box::new(index)));
                    ty = elem;
                }
            }
            step_types.push(ty.clone());
        }
        Ok(TPath {
            root: p.root.clone(),
            root_mutable: root.mutable,
            steps,
            step_types,
            span: p.span,
        })
    }

    fn expect(&mut self, e: &Expr, ty: &Type) -> Result<TExpr> {
        let te = self.expr(e, Some(ty))?;
        if &te.ty != ty {
            return Err(mismatch(e.span, ty, &te.ty));
        }
        Ok(te)
    }

    fn expr(&mut self, e: &Expr, expected: Option<&Type>) -> Result<TExpr> {
        let span = e.span;
        let (kind, ty) = match &e.kind {
            ExprKind::Binding {
                qualifier,
                name,
                annotation,
                init,
                body,
            } => {
                let init = match annotation {
                    Some(a) => {
                        let ty = self.resolve(a)?;
                        self.expect(init, &ty)?
                    }
                    None => self.expr(init, None)?,
                };
                if let Some(n) = name {
                    self.declare(n, init.ty.clone(), qualifier.is_mutable());
                }
                let body = self.expr(body, expected);
                if name.is_some() {
                    self.undeclare();
                }
                let body = body?;
                let ty = body.ty.clone();
                (
                    TExprKind::Binding {
                        mutable: qualifier.is_mutable(),
                        name: name.clone(),
                        init: Box::new(init),
                        body: Box::new(body),
                    },
                    ty,
                )
            }
            ExprKind::Assign {
                target,
                value,
                body,
            } => {
                let (target, value) = match target {
                    Some(p) => {
                        let tp = self.path(p)?;
                        if !tp.is_mutable() {
                            return Err(TypeError::new(
                                ErrorCode::ImmutableTarget,
                                p.span,
                                format!("cannot assign to immutable location `{}`", p.root),
                            ));
                        }
                        let ty = tp.ty().clone();
                        let value = self.expect(value, &ty)?;
                        (Some(tp), value)
                    }
                    None => (None, self.expr(value, None)?),
                };
                let body = self.expr(body, expected)?;
                let ty = body.ty.clone();
                (
                    TExprKind::Assign {
                        target,
                        value: Box::new(value),
                        body: Box::new(body),
                    },
                    ty,
                )
            }
            ExprKind::Int(v) => (TExprKind::Int(*v), Type::Int),
            ExprKind::Float(v) => (TExprKind::Float(*v), Type::Float),
            ExprKind::Array(elems) => {
                let expected_elem = match expected {
                    Some(Type::Array(t)) => Some((**t).clone()),
                    _ => None,
                };
                let mut out = Vec::with_capacity(elems.len());
                let mut elem_ty = expected_elem;
                for el in elems {
                    let te = match &elem_ty {
                        Some(t) => self.expect(el, t)?,
                        None => self.expr(el, None)?,
                    };
                    elem_ty.get_or_insert_with(|| te.ty.clone());
                    out.push(te);
                }
                let Some(elem_ty) = elem_ty else {
                    return Err(TypeError::new(
                        ErrorCode::TypeMismatch,
                        span,
                        "cannot infer the element type of an empty array",
                    ));
                };
                (TExprKind::Array(out), Type::array_of(elem_ty))
            }
            ExprKind::StructInit { name, args } => {
                let def = self.structs.get(name).ok_or_else(|| {
                    TypeError::new(
                        ErrorCode::UnboundName,
                        span,
                        format!("unknown struct `{name}`"),
                    )
                })?;
                if def.fields.len() != args.len() {
                    return Err(TypeError::new(
                        ErrorCode::ArityMismatch,
                        span,
                        format!(
                            "`{name}` has {} fields but {} arguments were given",
                            def.fields.len(),
                            args.len()
                        ),
                    ));
                }
                let field_types: Vec<Type> = def.fields.iter().map(|f| f.ty.clone()).collect();
                let args = args
                    .iter()
                    .zip(&field_types)
                    .map(|(a, t)| self.expect(a, t))
                    .collect::<Result<_>>()?;
                (
                    TExprKind::StructInit {
                        name: name.clone(),
                        args,
                    },
                    Type::Struct(name.clone()),
                )
            }
            ExprKind::Func(f) => {
                let func = self.func(f)?;
                let ty = Type::Func(func.ty.clone());
                (TExprKind::Func(Rc::new(func)), ty)
            }
            ExprKind::Call { callee, args } => self.call(e, callee, args)?,
            ExprKind::Path(p) => {
                let tp = self.path(p)?;
                let ty = tp.ty().clone();
                (TExprKind::Path(tp), ty)
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let lhs = self.expr(lhs, None)?;
                let rhs = self.expect_operand(rhs, &lhs.ty)?;
                if !lhs.ty.is_numeric() || (*op == BinOp::Rem && lhs.ty != Type::Int) {
                    return Err(TypeError::new(
                        ErrorCode::TypeMismatch,
                        span,
                        format!("operator `{}` is not defined on `{}`", op.symbol(), lhs.ty),
                    ));
                }
                let ty = if op.is_comparison() {
                    Type::Int
                } else {
                    lhs.ty.clone()
                };
                (
                    TExprKind::Binary {
                        op: *op,
                        lhs: Box::new(lhs),
                        rhs: Box::new(rhs),
                    },
                    ty,
                )
            }
            ExprKind::Cond { cond, then, els } => {
                let cond = self.expect(cond, &Type::Int)?;
                let then = self.expr(then, expected)?;
                let els = self.expect(els, &then.ty.clone())?;
                let ty = then.ty.clone();
                (
                    TExprKind::Cond {
                        cond: Box::new(cond),
                        then: Box::new(then),
                        els: Box::new(els),
                    },
                    ty,
                )
            }
        };
        Ok(TExpr { kind, ty, span })
    }

    fn expect_operand(&mut self, e: &Expr, ty: &Type) -> Result<TExpr> {
        self.expect(e, ty)
    }

    fn func(&mut self, f: &FuncLit) -> Result<TFunc> {
        let mut params = Vec::with_capacity(f.params.len());
        for p in &f.params {
            params.push(TParam {
                name: p.name.clone(),
                passing: p.passing,
                ty: self.resolve(&p.ty)?,
            });
        }
        let codomain = self.resolve(&f.codomain)?;
        self.scopes.push(FnScope::default());
        for p in &params {
            self.declare(&p.name, p.ty.clone(), p.passing == Passing::Inout);
        }
        let body = self.expect(&f.body, &codomain);
        let mut scope = self.scopes.pop().expect("function scope");
        let body = body?;
        scope.captures.sort_by_key(|v| v.id);
        Ok(TFunc {
            ty: FuncType {
                params: params.iter().map(|p| (p.passing, p.ty.clone())).collect(),
                codomain: Box::new(codomain),
            },
            params,
            body,
            captures: scope
                .captures
                .into_iter()
                .map(|v| Capture {
                    name: v.name,
                    ty: v.ty,
                    mutable: v.mutable,
                })
                .collect(),
        })
    }

    fn call(&mut self, e: &Expr, callee: &Expr, args: &[Arg]) -> Result<(TExprKind, Type)> {
        let (callee_t, callee_ty, callee_path) = match &callee.kind {
            ExprKind::Path(p) => {
                let tp = self.path(p)?;
                let ty = tp.ty().clone();
                (TCallee::Path(tp), ty, Some(p))
            }
            _ => {
                let te = self.expr(callee, None)?;
                let ty = te.ty.clone();
                (TCallee::Expr(Box::new(te)), ty, None)
            }
        };
        let Type::Func(fty) = callee_ty else {
            return Err(TypeError::new(
                ErrorCode::TypeMismatch,
                callee.span,
                format!("`{callee_ty}` is not a function"),
            ));
        };
        if fty.params.len() != args.len() {
            return Err(TypeError::new(
                ErrorCode::ArityMismatch,
                e.span,
                format!(
                    "function expects {} arguments but {} were given",
                    fty.params.len(),
                    args.len()
                ),
            ));
        }

        let mut targs = Vec::with_capacity(args.len());
        for (arg, (passing, pty)) in args.iter().zip(&fty.params) {
            match (arg, passing) {
                (Arg::Value(a), Passing::ByValue) => targs.push(TArg::Value(self.expect(a, pty)?)),
                (Arg::Inout(p), Passing::Inout) => {
                    let tp = self.path(p)?;
                    if !tp.is_mutable() {
                        return Err(TypeError::new(
                            ErrorCode::ImmutableTarget,
                            p.span,
                            format!("cannot pass immutable location `{}` as inout", p.root),
                        ));
                    }
                    if tp.ty() != pty {
                        return Err(mismatch(p.span, pty, tp.ty()));
                    }
                    targs.push(TArg::Inout(tp));
                }
                (Arg::Value(a), Passing::Inout) => {
                    return Err(TypeError::new(
                        ErrorCode::InvalidInoutArgument,
                        a.span,
                        "inout parameter requires an `&path` argument",
                    ))
                }
                (Arg::Inout(p), Passing::ByValue) => {
                    return Err(TypeError::new(
                        ErrorCode::InvalidInoutArgument,
                        p.span,
                        "`&` argument passed to a by-value parameter",
                    ))
                }
            }
        }

        // Exclusivity among the callee path and the inout arguments.
        let mut accesses: Vec<(Access, &Path)> = Vec::new();
        if let Some(p) = callee_path {
            accesses.push((Access::Callee, p));
        }
        for (i, a) in args.iter().enumerate() {
            if let Arg::Inout(p) = a {
                accesses.push((Access::Arg(i), p));
            }
        }
        let call = TCall {
            callee: callee_t,
            args: targs,
            overlap_checks: Vec::new(),
        };
        let mut checks = Vec::new();
        for i in 0..accesses.len() {
            for j in i + 1..accesses.len() {
                let (ai, pi) = accesses[i];
                let (aj, pj) = accesses[j];
                let verdict = if pi.without_spans() == pj.without_spans() {
                    OverlapVerdict::Overlap
                } else {
                    paths_overlap(
                        &AccessPathShape::of(call.access_path(ai)),
                        &AccessPathShape::of(call.access_path(aj)),
                    )
                };
                match verdict {
                    OverlapVerdict::Disjoint => {}
                    OverlapVerdict::MaybeOverlap => checks.push((ai, aj)),
                    OverlapVerdict::Overlap => {
                        return Err(TypeError::new(
                            ErrorCode::OverlappingInout,
                            pj.span,
                            format!(
                                "`{}` overlaps `{}` in the same call",
                                path_text(pj),
                                path_text(pi)
                            ),
                        ))
                    }
                }
            }
        }
        let call = TCall {
            overlap_checks: checks,
            ..call
        };
        Ok((TExprKind::Call(call), (*fty.codomain).clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    const PAIR: &str = "struct Pair { var fs: Int; var sn: Int } in ";

    fn check(src: &str) -> Result<TypedProgram> {
        check_program(&parse(src).unwrap())
    }

    fn code(src: &str) -> ErrorCode {
        check(src).unwrap_err().code
    }

    #[test]
    fn let_field_assignment_is_rejected() {
        assert_eq!(
            code(&format!("{PAIR}let p: Pair = Pair(4, 2) in p.sn = 8 in p")),
            ErrorCode::ImmutableTarget
        );
    }

    #[test]
    fn let_array_element_assignment_is_rejected() {
        assert_eq!(
            code(&format!(
                "{PAIR}let a: [Pair] = [Pair(4,2), Pair(5,3)] in a[0].sn = 8 in a"
            )),
            ErrorCode::ImmutableTarget
        );
    }

    #[test]
    fn let_field_of_var_is_immutable() {
        assert_eq!(
            code("struct P { let x: Int } in var p = P(1) in p.x = 2 in p"),
            ErrorCode::ImmutableTarget
        );
        assert!(check("struct P { let x: Int } in var p = P(1) in p = P(2) in p").is_ok());
    }

    #[test]
    fn swap_is_well_typed() {
        let tp = check(&format!(
            "{PAIR}struct U {{}} in \
             let swap: (inout Int, inout Int) -> U = (a: inout Int, b: inout Int) -> U {{ \
               let tmp = a in a = b in b = tmp in U() }} in \
             var p = Pair(4, 2) in _ = swap(&p.fs, &p.sn) in p"
        ))
        .unwrap();
        assert_eq!(tp.entry.ty, Type::Struct("Pair".into()));
    }

    #[test]
    fn struct_cycles() {
        let err = check_struct_table(
            &parse("struct A { var x: B }; struct B { var y: A } in 0")
                .unwrap()
                .structs,
        )
        .unwrap_err();
        assert_eq!(err.code, ErrorCode::RecursiveStruct);
        assert_eq!(err.cycle, ["A", "B"]);

        let err = check_struct_table(&parse("struct A { var x: A } in 0").unwrap().structs)
            .unwrap_err();
        assert_eq!(err.cycle, ["A"]);

        let err = check_struct_table(&parse("struct A { var x: [A] } in 0").unwrap().structs)
            .unwrap_err();
        assert_eq!(err.code, ErrorCode::RecursiveStruct);

        let table = check_struct_table(&parse(&format!("{PAIR}0")).unwrap().structs).unwrap();
        assert_eq!(table.len(), 1);

        // Function-typed fields do not store the struct inline.
        assert!(check("struct A { var f: (A) -> Int } in 0").is_ok());
        assert_eq!(code("struct A { var x: Nope } in 0"), ErrorCode::UnboundName);
    }

    #[test]
    fn error_codes() {
        assert_eq!(code("x"), ErrorCode::UnboundName);
        assert_eq!(code("let x: Int = 1.5 in x"), ErrorCode::TypeMismatch);
        assert_eq!(code(&format!("{PAIR}Pair(1)")), ErrorCode::ArityMismatch);
        assert_eq!(code("1 + 2.0"), ErrorCode::TypeMismatch);
        assert_eq!(code("1.0 % 2.0"), ErrorCode::TypeMismatch);
        assert_eq!(code("_ = 1 in _"), ErrorCode::WildcardRead);
        assert_eq!(code("let a = [1] in a[1.0]"), ErrorCode::TypeMismatch);
        assert_eq!(code(&format!("{PAIR}var p = Pair(1, 2) in p[0]")), ErrorCode::TypeMismatch);
        assert_eq!(code("var a = [1] in a.len"), ErrorCode::TypeMismatch);
        assert_eq!(code("let a = [] in 0"), ErrorCode::TypeMismatch);
        assert_eq!(code("if 1.0 then 1 else 2"), ErrorCode::TypeMismatch);
        assert_eq!(code("let f = (x: Int) -> Int { x } in f(1, 2)"), ErrorCode::ArityMismatch);
        assert_eq!(
            code("var x = 1 in let f = (x: inout Int) -> Int { x } in f(x)"),
            ErrorCode::InvalidInoutArgument
        );
        assert_eq!(
            code("var x = 1 in let f = (x: Int) -> Int { x } in f(&x)"),
            ErrorCode::InvalidInoutArgument
        );
        assert_eq!(
            code("let x = 1 in let f = (x: inout Int) -> Int { x } in f(&x)"),
            ErrorCode::ImmutableTarget
        );
        assert!(check("let a: [Int] = [] in 0").is_ok());
    }

    #[test]
    fn overlapping_inout() {
        let swap = "let swap = (a: inout Int, b: inout Int) -> Int { 0 } in ";
        assert_eq!(
            code(&format!("{PAIR}{swap}var p = Pair(4, 2) in swap(&p.fs, &p.fs)")),
            ErrorCode::OverlappingInout
        );
        // Character-identical paths are rejected even with dynamic indices.
        assert_eq!(
            code(&format!("{swap}var a = [1, 2] in var i = 0 in swap(&a[i], &a[i])")),
            ErrorCode::OverlappingInout
        );
        let tp = check(&format!(
            "{swap}var a = [1, 2] in var i = 0 in var j = 1 in swap(&a[i], &a[j])"
        ))
        .unwrap();
        let mut found = false;
        walk(&tp.entry, &mut |e| {
            if let TExprKind::Call(c) = &e.kind {
                if !c.overlap_checks.is_empty() {
                    assert_eq!(c.overlap_checks, [(Access::Arg(0), Access::Arg(1))]);
                    found = true;
                }
            }
        });
        assert!(found);
        assert!(check(&format!("{swap}var a = [1, 2] in swap(&a[0], &a[1])")).is_ok());
        // The callee path takes part in exclusivity.
        assert_eq!(
            code("struct S { var f: (inout S) -> Int } in var s = S((x: inout S) -> Int { 0 }) in s.f(&s)"),
            ErrorCode::OverlappingInout
        );
    }

    #[test]
    fn captures_in_declaration_order() {
        let tp = check(
            "var b = 1 in var a = 2 in let f = () -> Int { a + b + a } in \
             let g = () -> Int { let h = () -> Int { b } in h() } in f() + g()",
        )
        .unwrap();
        let mut funcs = Vec::new();
        walk(&tp.entry, &mut |e| {
            if let TExprKind::Func(f) = &e.kind {
                funcs.push(f.captures.iter().map(|c| c.name.clone()).collect::<Vec<_>>());
            }
        });
        assert_eq!(funcs, [vec!["b", "a"], vec!["b"], vec!["b"]]);
    }

    #[test]
    fn closure_may_mutate_var_capture_only() {
        assert!(check("var foo: Int = 42 in var fn: () -> Int { foo = foo + 1 in foo } in fn()").is_ok());
        assert_eq!(
            code("let foo: Int = 42 in var fn: () -> Int { foo = foo + 1 in foo } in fn()"),
            ErrorCode::ImmutableTarget
        );
        // Calling through a let binding is allowed.
        assert!(check("let f = () -> Int { 1 } in f()").is_ok());
    }

    pub(crate) fn walk(e: &TExpr, f: &mut dyn FnMut(&TExpr)) {
        f(e);
        match &e.kind {
            TExprKind::Binding { init, body, .. } => {
                walk(init, f);
                walk(body, f);
            }
            TExprKind::Assign { value, body, .. } => {
                walk(value, f);
                walk(body, f);
            }
            TExprKind::Array(es) | TExprKind::StructInit { args: es, .. } => {
                es.iter().for_each(|x| walk(x, f))
            }
            TExprKind::Func(func) => walk(&func.body, f),
            TExprKind::Call(c) => {
                if let TCallee::Expr(x) = &c.callee {
                    walk(x, f);
                }
                for a in &c.args {
                    if let TArg::Value(x) = a {
                        walk(x, f);
                    }
                }
            }
            TExprKind::Binary { lhs, rhs, .. } => {
                walk(lhs, f);
                walk(rhs, f);
            }
            TExprKind::Cond { cond, then, els } => {
                walk(cond, f);
                walk(then, f);
                walk(els, f);
            }
            TExprKind::Int(_) | TExprKind::Float(_) | TExprKind::Path(_) => {}
        }
    }
}
