//! Text form used by `--dump=ir`: one instruction per line,
//! `<id>: <opcode> <operands>`, numbered within each routine.

use std::fmt::Write;

use super::*;

fn place(p: &Place) -> String {
    match p {
        Place::Slot(s) => format!("%{}", s.0),
        Place::Loc(l) => format!("@{}", l.0),
    }
}

fn steps(st: &[Step]) -> String {
    st.iter()
        .map(|s| match s {
            Step::Field(i) => format!(".{i}"),
            Step::Env(i) => format!(".env{i}"),
            Step::Index(s) => format!("[%{}]", s.0),
        })
        .collect()
}

fn slots(v: &[Slot]) -> String {
    v.iter()
        .map(|s| format!("%{}", s.0))
        .collect::<Vec<_>>()
        .join(", ")
}

fn instr(i: &Instr) -> String {
    match i {
        Instr::MakeInt { dst, value } => format!("MakeInt %{} {value}", dst.0),
        Instr::MakeFloat { dst, value } => format!("MakeFloat %{} {value:?}", dst.0),
        Instr::MakeArray { dst, elem, elems } => {
            format!("MakeArray %{} [{elem}] ({})", dst.0, slots(elems))
        }
        Instr::MakeStruct { dst, name, fields } => {
            format!("MakeStruct %{} {name} ({})", dst.0, slots(fields))
        }
        Instr::MakeClosure {
            dst,
            routine,
            env,
            copy,
            destroy,
        } => format!(
            "MakeClosure %{} r{} ({}) {copy} {destroy}",
            dst.0,
            routine.0,
            slots(env)
        ),
        Instr::Copy { dst, src } => format!("Copy %{} %{}", dst.0, src.0),
        Instr::Move { dst, src } => format!("Move %{} %{}", dst.0, src.0),
        Instr::Destroy { slot } => format!("Destroy %{}", slot.0),
        Instr::LoadPath {
            dst, base, steps: s, ..
        } => format!("LoadPath %{} {}{}", dst.0, place(base), steps(s)),
        Instr::StorePath {
            base,
            steps: s,
            value,
            ..
        } => format!("StorePath {}{} %{}", place(base), steps(s), value.0),
        Instr::ResolveLocation {
            dst, base, steps: s, ..
        } => format!("ResolveLocation @{} {}{}", dst.0, place(base), steps(s)),
        Instr::Call {
            dst,
            callee,
            args,
            inouts,
            ..
        } => {
            let c = match callee {
                Callee::Slot(s) => format!("%{}", s.0),
                Callee::Loc(l) => format!("@{}", l.0),
            };
            let io: Vec<String> = inouts.iter().map(|l| format!("&@{}", l.0)).collect();
            format!("Call %{} {c} ({}) ({})", dst.0, slots(args), io.join(", "))
        }
        Instr::Binary {
            dst, op, lhs, rhs, ..
        } => format!("Binary %{} {} %{} %{}", dst.0, op.symbol(), lhs.0, rhs.0),
        Instr::OverlapCheck { a, b, .. } => format!("OverlapCheck @{} @{}", a.0, b.0),
    }
}

fn terminator(t: &Terminator) -> String {
    match t {
        Terminator::Jump(b) => format!("Jump b{}", b.0),
        Terminator::CondBr { cond, then, els } => {
            format!("CondBr %{} b{} b{}", cond.0, then.0, els.0)
        }
        Terminator::Return(s) => format!("Return %{}", s.0),
    }
}

pub fn dump(program: &IrProgram) -> String {
    let mut out = String::new();
    for r in &program.routines {
        let params: Vec<String> = r
            .params
            .iter()
            .map(|p| match p {
                Param::ByValue(s) => format!("%{}", s.0),
                Param::Inout(l) => format!("&@{}", l.0),
            })
            .collect();
        let env = r.env.map(|l| format!(" env @{}", l.0)).unwrap_or_default();
        let _ = writeln!(out, "routine r{}({}){env}:", r.id.0, params.join(", "));
        let mut id = 0;
        for (b, block) in r.blocks.iter().enumerate() {
            let _ = writeln!(out, "b{b}:");
            for i in &block.instrs {
                let _ = writeln!(out, "  {id}: {}", instr(i));
                id += 1;
            }
            let _ = writeln!(out, "  {id}: {}", terminator(&block.term));
            id += 1;
        }
    }
    out
}
