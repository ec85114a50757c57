//! Differential testing: the reference interpreter against the VM under every
//! combination of copy-on-write and move optimization.

use serde::Serialize;

use super::eager::interpret_eager;
use crate::diag::LineIndex;
use crate::frontend::ast::Program;
use crate::frontend::pretty_print;
use crate::runtime::{execute, ExecOptions, RuntimeStats, RuntimeTrap, TrapKind};
use crate::typeck::{check_program, TypeError, TypedProgram};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Oracle,
    Vm { cow: bool, move_opt: bool },
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Oracle => "oracle",
            Engine::Vm {
                cow: true,
                move_opt: true,
            } => "vm+cow+move",
            Engine::Vm {
                cow: true,
                move_opt: false,
            } => "vm+cow",
            Engine::Vm {
                cow: false,
                move_opt: true,
            } => "vm+move",
            Engine::Vm {
                cow: false,
                move_opt: false,
            } => "vm",
        }
    }
}

/// The reference interpreter followed by the four VM configurations.
pub const ALL_ENGINES: [Engine; 5] = [
    Engine::Oracle,
    Engine::Vm {
        cow: true,
        move_opt: true,
    },
    Engine::Vm {
        cow: true,
        move_opt: false,
    },
    Engine::Vm {
        cow: false,
        move_opt: true,
    },
    Engine::Vm {
        cow: false,
        move_opt: false,
    },
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrapReport {
    pub kind: TrapKind,
    /// `line:col` of the trapping construct.
    pub at: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialResult {
    pub config: &'static str,
    pub output: Option<String>,
    pub trap: Option<TrapReport>,
    pub stats: Option<RuntimeStats>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffReport {
    pub program: String,
    pub results: Vec<TrialResult>,
    pub status: Status,
}

impl DiffReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Every non-trapping VM run released all storage it acquired.
    pub fn leak_free(&self) -> bool {
        self.results
            .iter()
            .filter(|r| r.trap.is_none())
            .filter_map(|r| r.stats)
            .all(|s| s.is_balanced())
    }

    pub fn stats(&self, engine: Engine) -> Option<RuntimeStats> {
        self.results
            .iter()
            .find(|r| r.config == engine.name())
            .and_then(|r| r.stats)
    }
}

fn trap_report(t: &RuntimeTrap, source: &str) -> TrapReport {
    let (line, col) = LineIndex::new(source).line_col(t.span.start);
    TrapReport {
        kind: t.kind,
        at: format!("{line}:{col}"),
    }
}

/// Runs `typed` (whose source text is `source`) under each engine.
pub fn differential_run_typed(typed: &TypedProgram, source: &str, engines: &[Engine]) -> DiffReport {
    let mut results = Vec::new();
    let mut irs: [Option<crate::ir::IrProgram>; 2] = [None, None];
    for &engine in engines {
        let r = match engine {
            Engine::Oracle => {
                let (output, trap) = match interpret_eager(typed) {
                    Ok(o) => (Some(o), None),
                    Err(t) => (None, Some(trap_report(&t, source))),
                };
                TrialResult {
                    config: engine.name(),
                    output,
                    trap,
                    stats: None,
                }
            }
            Engine::Vm { cow, move_opt } => {
                let ir = irs[move_opt as usize].get_or_insert_with(|| crate::compile(typed, move_opt));
                let opts = ExecOptions {
                    cow,
                    check_refcounts: false,
                };
                match execute(ir, opts) {
                    Ok(x) => TrialResult {
                        config: engine.name(),
                        output: Some(x.output),
                        trap: None,
                        stats: Some(x.stats),
                    },
                    Err(t) => TrialResult {
                        config: engine.name(),
                        output: None,
                        trap: Some(trap_report(&t, source)),
                        stats: None,
                    },
                }
            }
        };
        results.push(r);
    }
    let agree = results
        .windows(2)
        .all(|w| w[0].output == w[1].output && w[0].trap == w[1].trap);
    DiffReport {
        program: source.to_string(),
        results,
        status: if agree { Status::Pass } else { Status::Fail },
    }
}

/// Type-checks `program` and compares all engines. The report's program text
/// is the pretty-printed source, which positions in trap reports refer to.
pub fn differential_run(program: &Program, engines: &[Engine]) -> Result<DiffReport, TypeError> {
    let source = pretty_print(program);
    let reparsed = crate::frontend::parse(&source).expect("pretty output parses");
    let typed = check_program(&reparsed)?;
    Ok(differential_run_typed(&typed, &source, engines))
}

/// Like [`differential_run`] but on source text, keeping its positions.
pub fn differential_run_source(source: &str, engines: &[Engine]) -> Result<DiffReport, crate::Error> {
    let typed = crate::check_source(source)?;
    Ok(differential_run_typed(&typed, source, engines))
}

