//! Copy elision by last-use analysis.
//!
//! `Copy { dst, src }` becomes `Move { dst, src }` when, on every path
//! leaving the copy, the next instruction that touches `src` (directly or
//! through a location derived from it) is `Destroy src`. Those destroys are
//! then deleted. Every block the search enters must be reached only from
//! blocks it already crossed without touching `src`, so no other path can
//! arrive at a deleted destroy.

use std::collections::{BTreeSet, HashMap};

use super::*;

pub fn apply_move_optimization(program: &mut IrProgram) {
    for r in &mut program.routines {
        optimize_routine(r);
    }
}

fn loc_roots(r: &Routine) -> HashMap<Loc, Slot> {
    let mut roots = HashMap::new();
    for b in &r.blocks {
        for i in &b.instrs {
            if let Instr::ResolveLocation { dst, base, .. } = i {
                let root = match base {
                    Place::Slot(s) => Some(*s),
                    Place::Loc(l) => roots.get(l).copied(),
                };
                if let Some(s) = root {
                    roots.insert(*dst, s);
                }
            }
        }
    }
    roots
}

fn dominators(r: &Routine) -> Vec<BTreeSet<usize>> {
    let n = r.blocks.len();
    let preds = predecessors(r);
    let all: BTreeSet<usize> = (0..n).collect();
    let mut dom = vec![all; n];
    dom[0] = BTreeSet::from([0]);
    let mut changed = true;
    while changed {
        changed = false;
        for b in 1..n {
            let mut d = preds[b]
                .iter()
                .map(|p| dom[*p].clone())
                .reduce(|a, x| a.intersection(&x).copied().collect())
                .unwrap_or_default();
            d.insert(b);
            if d != dom[b] {
                dom[b] = d;
                changed = true;
            }
        }
    }
    dom
}

fn touches(i: &Instr, s: Slot, roots: &HashMap<Loc, Slot>) -> bool {
    let mut hit = false;
    i.visit_slots(|x, _| hit |= x == s);
    hit || i.loc_reads().iter().any(|l| roots.get(l) == Some(&s))
}

/// Positions of the destroys ending `src`'s life after `(block, index)`, or
/// `None` if some path touches it in any other way first.
fn last_uses(
    r: &Routine,
    block: usize,
    index: usize,
    src: Slot,
    roots: &HashMap<Loc, Slot>,
) -> Option<Vec<(usize, usize)>> {
    let mut found = Vec::new();
    let mut visited = BTreeSet::new();
    let mut clean = BTreeSet::new();
    let mut work = vec![(block, index + 1)];
    while let Some((b, start)) = work.pop() {
        let blk = &r.blocks[b];
        let mut ended = false;
        for (k, i) in blk.instrs.iter().enumerate().skip(start) {
            if touches(i, src, roots) {
                if *i != (Instr::Destroy { slot: src }) {
                    return None;
                }
                found.push((b, k));
                ended = true;
                break;
            }
        }
        if ended {
            continue;
        }
        clean.insert(b);
        match &blk.term {
            Terminator::Return(_) => return None,
            Terminator::CondBr { cond, .. } if *cond == src => return None,
            t => {
                for s in t.successors() {
                    if visited.insert(s.0 as usize) {
                        work.push((s.0 as usize, 0));
                    }
                }
            }
        }
    }
    let preds = predecessors(r);
    let entered_cleanly = visited.iter().all(|b| preds[*b].iter().all(|p| clean.contains(p)));
    entered_cleanly.then_some(found)
}

fn predecessors(r: &Routine) -> Vec<Vec<usize>> {
    let mut preds = vec![Vec::new(); r.blocks.len()];
    for (i, b) in r.blocks.iter().enumerate() {
        for s in b.term.successors() {
            preds[s.0 as usize].push(i);
        }
    }
    preds
}

fn optimize_routine(r: &mut Routine) {
    let roots = loc_roots(r);
    let dom = dominators(r);
    let mut to_move = BTreeSet::new();
    let mut to_delete = BTreeSet::new();
    for b in 0..r.blocks.len() {
        for k in 0..r.blocks[b].instrs.len() {
            let Instr::Copy { src, .. } = r.blocks[b].instrs[k] else {
                continue;
            };
            let Some(ends) = last_uses(r, b, k, src, &roots) else {
                continue;
            };
            if ends.is_empty() || !ends.iter().all(|(eb, _)| dom[*eb].contains(&b)) {
                continue;
            }
            if ends.iter().any(|e| to_delete.contains(e)) {
                continue;
            }
            to_move.insert((b, k));
            to_delete.extend(ends);
        }
    }
    for (b, block) in r.blocks.iter_mut().enumerate() {
        let old = std::mem::take(&mut block.instrs);
        for (k, i) in old.into_iter().enumerate() {
            if to_delete.contains(&(b, k)) {
                continue;
            }
            block.instrs.push(match i {
                Instr::Copy { dst, src } if to_move.contains(&(b, k)) => Instr::Move { dst, src },
                other => other,
            });
        }
    }
}
