//! Quantified properties over generated programs.

use mvsl::frontend::ast::SpanFree;
use mvsl::frontend::{parse, pretty_print, tokenize};
use mvsl::ir::metatype::{is_trivial, synthesize_metatype};
use mvsl::ir::{apply_move_optimization, lower_program, verify_linearity};
use mvsl::oracle::{
    differential_run, generate_copy_then_mutate, generate_program, interpret_eager, Engine,
    GenConfig, ALL_ENGINES,
};
use mvsl::typeck::typed::{TArg, TCallee, TExpr, TExprKind, TPath, TStep};
use mvsl::typeck::types::StructTable;
use mvsl::{check_program, compile, execute, ErrorCode, ExecOptions, Type, TypedProgram};
use proptest::prelude::*;

fn typed(cfg: &GenConfig) -> (String, TypedProgram) {
    let src = pretty_print(&generate_program(cfg));
    let p = parse(&src).unwrap_or_else(|e| panic!("{e}\n{src}"));
    let t = check_program(&p).unwrap_or_else(|e| panic!("{e}\n{src}"));
    (src, t)
}

fn walk(e: &TExpr, f: &mut dyn FnMut(&TExpr)) {
    f(e);
    let path = |p: &TPath, f: &mut dyn FnMut(&TExpr)| {
        for s in &p.steps {
            if let TStep::Index(i) = s {
                walk(i, f);
            }
        }
    };
    match &e.kind {
        TExprKind::Binding { init, body, .. } => {
            walk(init, f);
            walk(body, f);
        }
        TExprKind::Assign {
            target,
            value,
            body,
        } => {
            if let Some(t) = target {
                path(t, f);
            }
            walk(value, f);
            walk(body, f);
        }
        TExprKind::Int(_) | TExprKind::Float(_) => {}
        TExprKind::Array(es) | TExprKind::StructInit { args: es, .. } => {
            es.iter().for_each(|x| walk(x, f))
        }
        TExprKind::Func(func) => walk(&func.body, f),
        TExprKind::Call(c) => {
            match &c.callee {
                TCallee::Path(p) => path(p, f),
                TCallee::Expr(x) => walk(x, f),
            }
            for a in &c.args {
                match a {
                    TArg::Value(x) => walk(x, f),
                    TArg::Inout(p) => path(p, f),
                }
            }
        }
        TExprKind::Path(p) => path(p, f),
        TExprKind::Binary { lhs, rhs, .. } => {
            walk(lhs, f);
            walk(rhs, f);
        }
        TExprKind::Cond { cond, then, els } => {
            walk(cond, f);
            walk(then, f);
            walk(els, f);
        }
    }
}

/// Independent statement of triviality: no array or function anywhere inline.
fn brute_trivial(t: &Type, table: &StructTable) -> bool {
    match t {
        Type::Int | Type::Float => true,
        Type::Array(_) | Type::Func(_) => false,
        Type::Struct(n) => {
            let mut ok = true;
            for f in &table[n].fields {
                ok &= brute_trivial(&f.ty, table);
            }
            ok
        }
    }
}

#[test]
fn thousand_seeds_are_accepted_and_round_trip() {
    for seed in 0..1000 {
        let p = generate_program(&GenConfig::new(seed, 50));
        let src = pretty_print(&p);
        let reparsed = parse(&src).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{src}"));
        assert_eq!(reparsed.without_spans(), p.without_spans(), "seed {seed}");
        check_program(&reparsed).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{src}"));
    }
}

#[test]
fn generation_is_deterministic() {
    for seed in [0, 1, 99, u64::MAX] {
        let cfg = GenConfig::new(seed, 80);
        assert_eq!(pretty_print(&generate_program(&cfg)), pretty_print(&generate_program(&cfg)));
    }
    let one = pretty_print(&generate_program(&GenConfig::new(7, 1)));
    assert!(one.trim().parse::<i64>().is_ok(), "{one}");
}

#[test]
fn corpus_round_trips() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "mvs") {
            let src = std::fs::read_to_string(&path).unwrap();
            if let Ok(p) = parse(&src) {
                let again = parse(&pretty_print(&p)).unwrap();
                assert_eq!(again.without_spans(), p.without_spans(), "{}", path.display());
            }
        }
    }
}

#[test]
fn moves_stay_linear_when_a_branch_redefines_the_source() {
    // A join reached both from a branch that destroyed and rebound the slot
    // and from one that left the copied value in place.
    let (src, t) = typed(&GenConfig::new(5485898870482779897, 67));
    let mut ir = lower_program(&t);
    apply_move_optimization(&mut ir);
    assert!(verify_linearity(&ir).is_ok(), "{src}");
    let r = mvsl::oracle::differential_run_typed(&t, &src, &ALL_ENGINES);
    assert!(r.passed() && r.leak_free(), "{}", r.to_json());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn engines_agree_without_leaks(seed in any::<u64>(), budget in 2usize..160) {
        let p = generate_program(&GenConfig::new(seed, budget));
        let r = differential_run(&p, &ALL_ENGINES).unwrap();
        prop_assert!(r.passed(), "{}", r.to_json());
        prop_assert!(r.leak_free(), "{}", r.to_json());
        for cow in [true, false] {
            let on = r.stats(Engine::Vm { cow, move_opt: true }).unwrap();
            let off = r.stats(Engine::Vm { cow, move_opt: false }).unwrap();
            prop_assert!(on.deep_copies <= off.deep_copies, "{}", r.to_json());
        }
        for e in ALL_ENGINES.iter().skip(1) {
            let s = r.stats(*e).unwrap();
            prop_assert!(s.cow_copies <= s.retains, "{}", r.to_json());
        }
    }

    #[test]
    fn refcounts_match_live_handles(seed in any::<u64>(), budget in 2usize..100) {
        let (src, t) = typed(&GenConfig::new(seed, budget));
        for move_opt in [true, false] {
            let ir = compile(&t, move_opt);
            let opts = ExecOptions { cow: true, check_refcounts: true };
            let x = execute(&ir, opts).unwrap_or_else(|e| panic!("{e}\n{src}"));
            prop_assert!(x.stats.is_balanced());
        }
    }

    #[test]
    fn linearity_holds_before_and_after_moves(seed in any::<u64>(), budget in 2usize..160) {
        let (src, t) = typed(&GenConfig::new(seed, budget));
        let mut ir = lower_program(&t);
        prop_assert!(verify_linearity(&ir).is_ok(), "{src}");
        apply_move_optimization(&mut ir);
        prop_assert!(verify_linearity(&ir).is_ok(), "{src}");
    }

    #[test]
    fn assignments_never_target_immutable_paths(seed in any::<u64>(), budget in 2usize..160) {
        let (_, t) = typed(&GenConfig::new(seed, budget));
        let mut bad = Vec::new();
        walk(&t.entry, &mut |e| match &e.kind {
            TExprKind::Assign { target: Some(p), .. } if !p.is_mutable() => bad.push(p.root.clone()),
            TExprKind::Call(c) => {
                for a in &c.args {
                    if let TArg::Inout(p) = a {
                        if !p.is_mutable() {
                            bad.push(p.root.clone());
                        }
                    }
                }
            }
            _ => {}
        });
        prop_assert!(bad.is_empty(), "{bad:?}");
    }

    #[test]
    fn accepted_programs_run_in_the_oracle(seed in any::<u64>(), budget in 2usize..160) {
        let (src, t) = typed(&GenConfig::new(seed, budget));
        prop_assert!(interpret_eager(&t).is_ok(), "{src}");
    }

    #[test]
    fn triviality_matches_brute_force(seed in any::<u64>()) {
        let (_, t) = typed(&GenConfig::new(seed, 30));
        let mut types = vec![Type::Int, Type::Float, Type::array_of(Type::Int)];
        types.extend(t.structs.keys().map(|n| Type::Struct(n.clone())));
        let arrays: Vec<Type> = types.iter().cloned().map(Type::array_of).collect();
        types.extend(arrays);
        for ty in &types {
            prop_assert_eq!(is_trivial(ty, &t.structs), brute_trivial(ty, &t.structs));
            let m = synthesize_metatype(ty, &t.structs);
            prop_assert_eq!(&m, &synthesize_metatype(ty, &t.structs));
            prop_assert_eq!(m.trivial, brute_trivial(ty, &t.structs));
        }
    }

    #[test]
    fn copies_are_independent(seed in any::<u64>(), budget in 8usize..80) {
        let (prog, base) = generate_copy_then_mutate(&GenConfig::new(seed, budget));
        let a = differential_run(&prog, &ALL_ENGINES).unwrap();
        let b = differential_run(&base, &ALL_ENGINES[..1]).unwrap();
        prop_assert!(a.passed(), "{}", a.to_json());
        prop_assert_eq!(&a.results[0].output, &b.results[0].output, "{}", a.program);
    }

    #[test]
    fn identical_inout_paths_are_rejected(
        path in prop_oneof![
            Just("p.fs".to_string()),
            "(0|1|i|i \\+ 1|i \\* 0)".prop_map(|ix| format!("a[{ix}].fs")),
            "(0|i)".prop_map(|ix| format!("m[{ix}][{ix}]")),
        ],
    ) {
        let src = format!(
            "struct P {{ var fs: Int }} in var p = P(1) in var a = [P(1), P(2)] in \
             var m = [[1]] in let i = 0 in \
             let f = (x: inout Int, y: inout Int) -> Int {{ 0 }} in f(&{path}, &{path})"
        );
        let Err(mvsl::Error::Type(e)) = mvsl::check_source(&src) else {
            panic!("identical paths accepted: {src}");
        };
        prop_assert_eq!(e.code, ErrorCode::OverlappingInout);
    }

    #[test]
    fn tokenize_is_total(s in "\\PC{0,64}") {
        let _ = tokenize(&s);
        let _ = parse(&s);
    }
}
