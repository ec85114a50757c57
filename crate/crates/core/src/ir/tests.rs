use super::*;
use crate::frontend::parse;
use crate::typeck::check_program;

fn lower(src: &str) -> IrProgram {
    let p = lower_program(&check_program(&parse(src).unwrap()).unwrap());
    verify_linearity(&p).unwrap_or_else(|e| panic!("{e}\n{}", dump(&p)));
    p
}

fn optimized(src: &str) -> IrProgram {
    let mut p = lower(src);
    apply_move_optimization(&mut p);
    verify_linearity(&p).unwrap_or_else(|e| panic!("{e}\n{}", dump(&p)));
    p
}

fn instrs(r: &Routine) -> Vec<&Instr> {
    r.blocks.iter().flat_map(|b| &b.instrs).collect()
}

const PAIR: &str = "struct Pair { var fs: Int; var sn: Int } in ";

#[test]
fn closure_becomes_routine_with_env() {
    let p = lower("var foo = 42 in let f = () -> Int { foo + 1 } in f()");
    assert_eq!(p.routines.len(), 2);
    let body = &p.routines[1];
    assert!(body.env.is_some());
    assert!(instrs(body).iter().any(|i| matches!(
        i,
        Instr::LoadPath { steps, .. } if steps == &[Step::Env(0)]
    )));
    let make = instrs(&p.routines[0])
        .into_iter()
        .find(|i| matches!(i, Instr::MakeClosure { .. }))
        .unwrap();
    let Instr::MakeClosure { env, routine, .. } = make else { unreachable!() };
    assert_eq!(env.len(), 1);
    assert_eq!(*routine, RoutineId(1));
}

#[test]
fn binding_from_variable_copies_then_destroys() {
    let p = lower(&format!("{PAIR}var p = Pair(4, 2) in var q: Pair = p in 0"));
    let is = instrs(&p.routines[0]);
    let copy = is
        .iter()
        .position(|i| matches!(i, Instr::Copy { src: Slot(s), .. } if *s == 3))
        .expect("copy of p");
    let Instr::Copy { dst: q, .. } = is[copy] else { unreachable!() };
    assert!(is[copy..].contains(&&Instr::Destroy { slot: *q }));
}

#[test]
fn dynamic_inout_pair_emits_check() {
    let p = lower(
        "let swap = (a: inout Int, b: inout Int) -> Int { a = b in 0 } in \
         var a = [1, 2] in let i = 0 in let j = 1 in swap(&a[i], &a[j])",
    );
    let is = instrs(&p.routines[0]);
    let resolves = is
        .iter()
        .filter(|i| matches!(i, Instr::ResolveLocation { .. }))
        .count();
    assert_eq!(resolves, 3, "callee plus two arguments\n{}", dump(&p));
    let check = is.iter().position(|i| matches!(i, Instr::OverlapCheck { .. })).unwrap();
    let call = is.iter().position(|i| matches!(i, Instr::Call { .. })).unwrap();
    assert!(check < call);
}

#[test]
fn only_last_use_becomes_move() {
    let src = "let g = (v: [Int]) -> Int { v[0] } in let h = (v: [Int]) -> Int { v[1] } in \
               let x = [1, 2] in g(x) + h(x)";
    let p = optimized(src);
    let is = instrs(&p.routines[0]);
    let arr = is
        .iter()
        .find_map(|i| match i {
            Instr::MakeArray { dst, .. } => Some(*dst),
            _ => None,
        })
        .unwrap();
    let x = is
        .iter()
        .find_map(|i| match i {
            Instr::Copy { dst, src } | Instr::Move { dst, src } if *src == arr => Some(*dst),
            _ => None,
        })
        .expect("x binding");
    let reads: Vec<&&Instr> = is
        .iter()
        .filter(|i| matches!(i, Instr::Copy { src, .. } | Instr::Move { src, .. } if *src == x))
        .collect();
    assert_eq!(reads.len(), 2, "{}", dump(&p));
    assert!(matches!(reads[0], Instr::Copy { .. }));
    assert!(matches!(reads[1], Instr::Move { .. }));
    assert!(!is.contains(&&Instr::Destroy { slot: x }));
}

#[test]
fn branches_keep_linearity() {
    optimized("let c = 1 in var a = [1, 2, 3] in var b = a in _ = if c then (b[0] = 9 in 0) else 0 in a");
    optimized("let c = 0 in let x = [1] in if c then x else [2]");
}

#[test]
fn copy_in_one_branch_is_not_moved_past_join() {
    let p = optimized("let c = 0 in let x = [1] in let y = if c then x else [2] in x");
    let is = instrs(&p.routines[0]);
    let moves_of_x = is.iter().filter(|i| matches!(i, Instr::Move { .. })).count();
    assert!(moves_of_x >= 1);
    verify_linearity(&p).unwrap();
}

#[test]
fn dump_numbers_instructions() {
    let d = dump(&lower("1 + 2"));
    assert!(d.contains("0: MakeInt %0 1"), "{d}");
    assert!(d.contains("2: Binary %2 + %0 %1"), "{d}");
    assert!(d.contains("3: Return %2"), "{d}");
}
