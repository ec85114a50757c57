//! Per-type copy/destroy metadata.
//!
//! Every type gets a metatype describing whether its values are trivial
//! (bitwise copy, no-op destroy) and, if not, which synthesized routine
//! copies or destroys them. Closure environments get their own metatypes,
//! referenced from the closure record's copy and destroy entries.

use std::fmt;

use crate::typeck::types::{StructTable, Type};

/// Width of a pointer-sized cell: array handles and each closure record entry.
pub const HANDLE_SIZE: u64 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subject {
    Type(Type),
    /// A closure environment record holding captures of these types.
    Env(Vec<Type>),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Type(t) => write!(f, "{t}"),
            Subject::Env(ts) => {
                f.write_str("env{")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str("}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetaRoutine {
    BitCopy,
    NoOp,
    Copy(Subject),
    Destroy(Subject),
}

impl fmt::Display for MetaRoutine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetaRoutine::BitCopy => f.write_str("bitcopy"),
            MetaRoutine::NoOp => f.write_str("noop"),
            MetaRoutine::Copy(s) => write!(f, "copy<{s}>"),
            MetaRoutine::Destroy(s) => write!(f, "destroy<{s}>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeMetadata {
    pub subject: Subject,
    pub trivial: bool,
    pub size_bytes: u64,
    pub copy_routine: MetaRoutine,
    pub destroy_routine: MetaRoutine,
}

impl TypeMetadata {
    fn new(subject: Subject, trivial: bool, size_bytes: u64) -> Self {
        let (copy_routine, destroy_routine) = if trivial {
            (MetaRoutine::BitCopy, MetaRoutine::NoOp)
        } else {
            (
                MetaRoutine::Copy(subject.clone()),
                MetaRoutine::Destroy(subject.clone()),
            )
        };
        TypeMetadata {
            subject,
            trivial,
            size_bytes,
            copy_routine,
            destroy_routine,
        }
    }
}

pub fn is_trivial(t: &Type, structs: &StructTable) -> bool {
    match t {
        Type::Int | Type::Float => true,
        Type::Struct(n) => structs[n].fields.iter().all(|f| is_trivial(&f.ty, structs)),
        Type::Array(_) | Type::Func(_) => false,
    }
}

/// Inline size of a value: structs are laid out contiguously; an array is a
/// single handle and a closure is its four-cell record.
pub fn size_bytes(t: &Type, structs: &StructTable) -> u64 {
    match t {
        Type::Int | Type::Float => 8,
        Type::Struct(n) => structs[n]
            .fields
            .iter()
            .map(|f| size_bytes(&f.ty, structs))
            .sum(),
        Type::Array(_) => HANDLE_SIZE,
        Type::Func(_) => 4 * HANDLE_SIZE,
    }
}

pub fn synthesize_metatype(t: &Type, structs: &StructTable) -> TypeMetadata {
    TypeMetadata::new(
        Subject::Type(t.clone()),
        is_trivial(t, structs),
        size_bytes(t, structs),
    )
}

pub fn synthesize_env_metatype(captures: &[Type], structs: &StructTable) -> TypeMetadata {
    TypeMetadata::new(
        Subject::Env(captures.to_vec()),
        captures.iter().all(|t| is_trivial(t, structs)),
        captures.iter().map(|t| size_bytes(t, structs)).sum(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;
    use crate::typeck::check_struct_table;

    fn table(src: &str) -> StructTable {
        check_struct_table(&parse(src).unwrap().structs).unwrap()
    }

    #[test]
    fn scalar_and_pair_are_trivial() {
        let t = table("struct Pair { var fs: Int; var sn: Int } in 0");
        let int = synthesize_metatype(&Type::Int, &t);
        assert!(int.trivial);
        assert_eq!(int.size_bytes, 8);
        assert_eq!(int.copy_routine, MetaRoutine::BitCopy);
        assert_eq!(int.destroy_routine, MetaRoutine::NoOp);

        let pair = synthesize_metatype(&Type::Struct("Pair".into()), &t);
        assert!(pair.trivial);
        assert_eq!(pair.size_bytes, 16);
    }

    #[test]
    fn arrays_and_closures_are_not_trivial() {
        let t = table("struct H { var xs: [Int]; var n: Int } in 0");
        let arr = synthesize_metatype(&Type::array_of(Type::Int), &t);
        assert!(!arr.trivial);
        assert_eq!(
            arr.copy_routine,
            MetaRoutine::Copy(Subject::Type(Type::array_of(Type::Int)))
        );
        let h = synthesize_metatype(&Type::Struct("H".into()), &t);
        assert!(!h.trivial);
        assert_eq!(h.size_bytes, 16);
        assert!(synthesize_env_metatype(&[Type::Int, Type::Float], &t).trivial);
        assert!(!synthesize_env_metatype(&[Type::array_of(Type::Int)], &t).trivial);
    }

    #[test]
    fn synthesis_is_deterministic() {
        let t = table("struct A { var x: [Int] } in struct B { let a: A; var f: Float } in 0");
        for ty in [
            Type::Struct("A".into()),
            Type::Struct("B".into()),
            Type::array_of(Type::Struct("B".into())),
        ] {
            assert_eq!(synthesize_metatype(&ty, &t), synthesize_metatype(&ty, &t));
        }
    }
}
