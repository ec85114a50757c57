//! Linearity checking: every slot holds a value from its definition until
//! exactly one consuming use, on every path, and nothing is live at return.

use std::collections::BTreeSet;

use thiserror::Error;

use super::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("routine {routine}, block {block}: {message}")]
pub struct VerifyError {
    pub routine: u32,
    pub block: u32,
    pub message: String,
}

type Live = BTreeSet<Slot>;

pub fn verify_linearity(program: &IrProgram) -> Result<(), VerifyError> {
    program.routines.iter().try_for_each(verify_routine)
}

fn verify_routine(r: &Routine) -> Result<(), VerifyError> {
    let err = |block: usize, message: String| VerifyError {
        routine: r.id.0,
        block: block as u32,
        message,
    };
    let mut entry_live = Live::new();
    let mut defined_locs = BTreeSet::new();
    for p in &r.params {
        match p {
            Param::ByValue(s) => {
                entry_live.insert(*s);
            }
            Param::Inout(l) => {
                defined_locs.insert(*l);
            }
        }
    }
    if let Some(l) = r.env {
        defined_locs.insert(l);
    }

    let mut state: Vec<Option<Live>> = vec![None; r.blocks.len()];
    state[0] = Some(entry_live);
    let mut work = vec![0usize];
    while let Some(b) = work.pop() {
        let mut live = state[b].clone().expect("state");
        let block = &r.blocks[b];
        for (k, i) in block.instrs.iter().enumerate() {
            for l in i.loc_reads() {
                if !defined_locs.contains(&l) && !resolved_before(r, l) {
                    return Err(err(b, format!("instruction {k} reads unresolved location {}", l.0)));
                }
            }
            let mut problem = None;
            i.visit_slots(|s, u| match u {
                Use::Read => {
                    if !live.contains(&s) {
                        problem.get_or_insert(format!("instruction {k} reads dead slot {}", s.0));
                    }
                }
                Use::Consume | Use::Destroy => {
                    if !live.remove(&s) {
                        problem.get_or_insert(format!("instruction {k} consumes dead slot {}", s.0));
                    }
                }
                Use::Define => {
                    if !live.insert(s) {
                        problem.get_or_insert(format!("instruction {k} overwrites live slot {}", s.0));
                    }
                }
            });
            if let Some(m) = problem {
                return Err(err(b, m));
            }
        }
        match &block.term {
            Terminator::Return(s) | Terminator::CondBr { cond: s, .. } => {
                if !live.remove(s) {
                    return Err(err(b, format!("terminator consumes dead slot {}", s.0)));
                }
            }
            Terminator::Jump(_) => {}
        }
        if let Terminator::Return(_) = block.term {
            if !live.is_empty() {
                let names: Vec<String> = live.iter().map(|s| s.0.to_string()).collect();
                return Err(err(b, format!("slots live at return: {}", names.join(", "))));
            }
        }
        for succ in block.term.successors() {
            let s = succ.0 as usize;
            match &state[s] {
                None => {
                    state[s] = Some(live.clone());
                    work.push(s);
                }
                Some(prev) if *prev != live => {
                    return Err(err(s, "live slots disagree at join".into()));
                }
                Some(_) => {}
            }
        }
    }
    Ok(())
}

fn resolved_before(r: &Routine, l: Loc) -> bool {
    r.blocks.iter().flat_map(|b| &b.instrs).any(|i| {
        matches!(i, Instr::ResolveLocation { dst, .. } if *dst == l)
    })
}
