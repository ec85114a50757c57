//! Values and the dynamic store of reference-counted array blocks.

use std::collections::HashMap;
use std::fmt::Write;
use std::rc::Rc;

use serde::Serialize;

use super::arith::format_float;
use crate::ir::{MetaRoutine, RoutineId};
use crate::typeck::types::Type;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StorageId(pub u64);

#[derive(Debug)]
pub struct ArrayStorage {
    pub refcount: u64,
    pub elem: Type,
    pub elem_size: u64,
    pub elements: Vec<Value>,
}

impl ArrayStorage {
    pub fn n(&self) -> u64 {
        self.elements.len() as u64
    }

    /// Payload capacity in bytes.
    pub fn k(&self) -> u64 {
        self.n() * self.elem_size
    }
}

#[derive(Debug)]
pub struct ClosureRecord {
    pub routine: RoutineId,
    pub env: Vec<Value>,
    pub copy: MetaRoutine,
    pub destroy: MetaRoutine,
}

/// A runtime value. Values are not `Clone`; duplication goes through
/// [`Heap::copy_value`] so reference counts stay exact.
#[derive(Debug)]
pub enum Value {
    Int(i64),
    Float(f64),
    Struct(Rc<str>, Vec<Value>),
    Array(StorageId),
    Func(Box<ClosureRecord>),
}

impl Value {
    /// Duplicates the representation without touching reference counts.
    pub(crate) fn alias(&self) -> Value {
        match self {
            Value::Int(v) => Value::Int(*v),
            Value::Float(v) => Value::Float(*v),
            Value::Struct(n, fs) => Value::Struct(n.clone(), fs.iter().map(Value::alias).collect()),
            Value::Array(s) => Value::Array(*s),
            Value::Func(c) => Value::Func(Box::new(ClosureRecord {
                routine: c.routine,
                env: c.env.iter().map(Value::alias).collect(),
                copy: c.copy.clone(),
                destroy: c.destroy.clone(),
            })),
        }
    }

    pub fn as_int(&self) -> i64 {
        match self {
            Value::Int(v) => *v,
            other => panic!("expected Int, found {other:?}"),
        }
    }

    /// Handles reachable without entering a storage block.
    fn for_each_handle(&self, f: &mut impl FnMut(StorageId)) {
        match self {
            Value::Int(_) | Value::Float(_) => {}
            Value::Array(s) => f(*s),
            Value::Struct(_, fs) => fs.iter().for_each(|v| v.for_each_handle(f)),
            Value::Func(c) => c.env.iter().for_each(|v| v.for_each_handle(f)),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RuntimeStats {
    /// Copies of non-trivial values requested by executed `Copy`/`LoadPath`
    /// instructions, whether or not copy-on-write defers the work.
    pub deep_copies: u64,
    pub retains: u64,
    /// Reference count decrements that leave the block alive.
    pub releases: u64,
    pub moves: u64,
    pub cow_copies: u64,
    pub allocs: u64,
    pub frees: u64,
}

impl RuntimeStats {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("stats serialize")
    }

    pub fn is_balanced(&self) -> bool {
        self.allocs == self.frees && self.retains == self.releases
    }
}

#[derive(Debug)]
pub struct Heap {
    blocks: HashMap<StorageId, ArrayStorage>,
    next_id: u64,
    pub cow: bool,
    pub stats: RuntimeStats,
}

impl Heap {
    pub fn new(cow: bool) -> Self {
        Heap {
            blocks: HashMap::new(),
            next_id: 0,
            cow,
            stats: RuntimeStats::default(),
        }
    }

    pub fn block(&self, s: StorageId) -> &ArrayStorage {
        &self.blocks[&s]
    }

    pub fn block_mut(&mut self, s: StorageId) -> &mut ArrayStorage {
        self.blocks.get_mut(&s).expect("live storage")
    }

    pub fn live_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn alloc(&mut self, elem: Type, elem_size: u64, elements: Vec<Value>) -> StorageId {
        let id = StorageId(self.next_id);
        self.next_id += 1;
        self.stats.allocs += 1;
        self.blocks.insert(
            id,
            ArrayStorage {
                refcount: 1,
                elem,
                elem_size,
                elements,
            },
        );
        id
    }

    /// Copies `v`: retains shared storage under copy-on-write, duplicates it
    /// element by element otherwise.
    pub fn copy_value(&mut self, v: &Value) -> Value {
        self.adopt(v.alias())
    }

    /// Completes a copy started with [`Value::alias`].
    pub(crate) fn adopt(&mut self, mut v: Value) -> Value {
        self.own(&mut v);
        v
    }

    /// Turns a representation-only alias into an independent owner.
    fn own(&mut self, v: &mut Value) {
        match v {
            Value::Int(_) | Value::Float(_) => {}
            Value::Struct(_, fs) => fs.iter_mut().for_each(|f| self.own(f)),
            Value::Func(c) => c.env.iter_mut().for_each(|f| self.own(f)),
            Value::Array(s) => {
                if self.cow {
                    self.block_mut(*s).refcount += 1;
                    self.stats.retains += 1;
                } else {
                    *s = self.duplicate(*s);
                }
            }
        }
    }

    fn duplicate(&mut self, s: StorageId) -> StorageId {
        let b = self.block(s);
        let (elem, size) = (b.elem.clone(), b.elem_size);
        let mut elements: Vec<Value> = b.elements.iter().map(Value::alias).collect();
        elements.iter_mut().for_each(|e| self.own(e));
        self.alloc(elem, size, elements)
    }

    pub fn destroy_value(&mut self, v: Value) {
        let mut handles = Vec::new();
        v.for_each_handle(&mut |s| handles.push(s));
        for s in handles {
            self.release(s);
        }
    }

    fn release(&mut self, s: StorageId) {
        let b = self.block_mut(s);
        assert!(b.refcount > 0, "release of dead storage {s:?}");
        b.refcount -= 1;
        if b.refcount > 0 {
            self.stats.releases += 1;
            return;
        }
        let b = self.blocks.remove(&s).expect("live storage");
        self.stats.frees += 1;
        for e in b.elements {
            self.destroy_value(e);
        }
    }

    /// Returns storage that may be mutated in place: `s` itself when uniquely
    /// referenced, otherwise a fresh copy (the caller rewrites its handle).
    pub fn unique(&mut self, s: StorageId) -> StorageId {
        if self.block(s).refcount <= 1 {
            return s;
        }
        let fresh = self.duplicate(s);
        self.block_mut(s).refcount -= 1;
        self.stats.releases += 1;
        self.stats.cow_copies += 1;
        fresh
    }

    pub fn format_value(&self, v: &Value) -> String {
        let mut out = String::new();
        self.write_value(v, &mut out);
        out
    }

    fn write_value(&self, v: &Value, out: &mut String) {
        match v {
            Value::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Value::Float(x) => out.push_str(&format_float(*x)),
            Value::Struct(name, fs) => {
                out.push_str(name);
                self.write_seq(fs, '(', ')', out);
            }
            Value::Array(s) => self.write_seq(&self.block(*s).elements, '[', ']', out),
            Value::Func(_) => out.push_str("<function>"),
        }
    }

    fn write_seq(&self, vs: &[Value], open: char, close: char, out: &mut String) {
        out.push(open);
        for (i, v) in vs.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            self.write_value(v, out);
        }
        out.push(close);
    }

    /// Compares every block's counter with the number of handles held by
    /// `roots` and by other blocks' elements.
    pub fn check_refcounts<'a>(&self, roots: impl Iterator<Item = &'a Value>) -> Result<(), String> {
        let mut counts: HashMap<StorageId, u64> = HashMap::new();
        let mut bump = |s: StorageId| *counts.entry(s).or_default() += 1;
        for v in roots {
            v.for_each_handle(&mut bump);
        }
        for b in self.blocks.values() {
            for e in &b.elements {
                e.for_each_handle(&mut bump);
            }
        }
        for (s, b) in &self.blocks {
            let seen = counts.get(s).copied().unwrap_or(0);
            if seen != b.refcount {
                return Err(format!("{s:?}: refcount {} but {seen} handles", b.refcount));
            }
            if b.k() != b.n() * b.elem_size {
                return Err(format!("{s:?}: capacity mismatch"));
            }
        }
        if let Some(s) = counts.keys().find(|s| !self.blocks.contains_key(s)) {
            return Err(format!("dangling handle {s:?}"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(heap: &mut Heap, xs: &[i64]) -> Value {
        let es = xs.iter().map(|x| Value::Int(*x)).collect();
        Value::Array(heap.alloc(Type::Int, 8, es))
    }

    #[test]
    fn cow_copy_retains() {
        let mut h = Heap::new(true);
        let a = ints(&mut h, &[1, 2]);
        let b = h.copy_value(&a);
        let Value::Array(s) = a else { unreachable!() };
        assert!(matches!(b, Value::Array(t) if t == s));
        assert_eq!(h.block(s).refcount, 2);
        assert_eq!(h.stats.retains, 1);
        h.destroy_value(b);
        assert_eq!(h.block(s).refcount, 1);
        h.destroy_value(a);
        assert_eq!(h.live_blocks(), 0);
        assert!(h.stats.is_balanced());
    }

    #[test]
    fn eager_copy_duplicates() {
        let mut h = Heap::new(false);
        let a = ints(&mut h, &[1, 2]);
        let b = h.copy_value(&a);
        assert_eq!(h.live_blocks(), 2);
        assert_eq!(h.format_value(&b), "[1, 2]");
        h.destroy_value(a);
        h.destroy_value(b);
        assert!(h.stats.is_balanced());
    }

    #[test]
    fn unique_detaches_shared_storage() {
        let mut h = Heap::new(true);
        let a = ints(&mut h, &[1]);
        let Value::Array(s) = a else { unreachable!() };
        assert_eq!(h.unique(s), s);
        let extra = [h.copy_value(&a), h.copy_value(&a)];
        let t = h.unique(s);
        assert_ne!(t, s);
        assert_eq!(h.block(s).refcount, 2);
        assert_eq!(h.block(t).refcount, 1);
        assert_eq!(h.stats.cow_copies, 1);
        // `a`'s handle is now `t`; the two extra copies still share `s`.
        std::mem::forget(a);
        h.destroy_value(Value::Array(t));
        for e in extra {
            h.destroy_value(e);
        }
        assert!(h.stats.is_balanced());
    }

    #[test]
    fn nested_release() {
        let mut h = Heap::new(true);
        let inner = ints(&mut h, &[7]);
        let outer = Value::Array(h.alloc(Type::array_of(Type::Int), 8, vec![inner]));
        h.check_refcounts(std::iter::once(&outer)).unwrap();
        assert_eq!(h.format_value(&outer), "[[7]]");
        h.destroy_value(outer);
        assert_eq!(h.live_blocks(), 0);
        assert_eq!(h.stats.frees, 2);
    }

    #[test]
    fn formats() {
        let h = Heap::new(true);
        let p = Value::Struct("Pair".into(), vec![Value::Int(4), Value::Int(2)]);
        assert_eq!(h.format_value(&p), "Pair(4, 2)");
        assert_eq!(h.format_value(&Value::Float(2.5)), "2.5");
    }
}
