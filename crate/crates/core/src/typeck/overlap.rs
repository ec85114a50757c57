//! Static classification of inout access paths.

use serde::Serialize;

use crate::typeck::typed::{TExprKind, TPath, TStep};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ShapeStep {
    Field(String),
    IndexLiteral(i64),
    IndexDynamic,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AccessPathShape {
    pub root: String,
    pub steps: Vec<ShapeStep>,
}

impl AccessPathShape {
    pub fn new(root: impl Into<String>, steps: Vec<ShapeStep>) -> Self {
        AccessPathShape {
            root: root.into(),
            steps,
        }
    }

    pub fn of(path: &TPath) -> Self {
        let steps = path
            .steps
            .iter()
            .map(|s| match s {
                TStep::Field { name, .. } => ShapeStep::Field(name.clone()),
                TStep::Index(e) => match e.kind {
                    TExprKind::Int(v) => ShapeStep::IndexLiteral(v),
                    _ => ShapeStep::IndexDynamic,
                },
            })
            .collect();
        AccessPathShape::new(path.root.clone(), steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OverlapVerdict {
    Disjoint,
    Overlap,
    MaybeOverlap,
}

pub fn paths_overlap(a: &AccessPathShape, b: &AccessPathShape) -> OverlapVerdict {
    if a.root != b.root {
        return OverlapVerdict::Disjoint;
    }
    let mut dynamic = false;
    for (x, y) in a.steps.iter().zip(&b.steps) {
        match (x, y) {
            (ShapeStep::Field(f), ShapeStep::Field(g)) if f != g => return OverlapVerdict::Disjoint,
            (ShapeStep::IndexLiteral(i), ShapeStep::IndexLiteral(j)) if i != j => {
                return OverlapVerdict::Disjoint
            }
            (ShapeStep::IndexDynamic, _) | (_, ShapeStep::IndexDynamic) => dynamic = true,
            _ => {}
        }
    }
    if dynamic {
        OverlapVerdict::MaybeOverlap
    } else {
        OverlapVerdict::Overlap
    }
}
