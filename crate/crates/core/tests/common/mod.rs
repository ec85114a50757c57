use std::path::{Path, PathBuf};

use mvsl::{run_source, Error, RunOptions};

pub struct Case {
    pub name: String,
    pub source: String,
    pub exit: u8,
    /// Value line for exit 0, otherwise the diagnostic prefix.
    pub expected: String,
}

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus() -> Vec<Case> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "mvs"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let exp = std::fs::read_to_string(p.with_extension("expected")).unwrap();
            let mut lines = exp.lines();
            let exit = lines.next().unwrap().strip_prefix("exit: ").unwrap().parse().unwrap();
            Case {
                name: p.file_stem().unwrap().to_string_lossy().into_owned(),
                source: std::fs::read_to_string(&p).unwrap(),
                exit,
                expected: lines.next().unwrap_or("").to_string(),
            }
        })
        .collect()
}

/// Runs a case through the library and returns (exit code, stdout or diagnostic).
pub fn outcome(case: &Case, opts: RunOptions) -> (u8, String) {
    match run_source(&case.source, opts) {
        Ok(x) => (0, x.output),
        Err(e) => {
            let code = if matches!(e, Error::Trap(_)) { 2 } else { 1 };
            (code, e.render(&case.source))
        }
    }
}

pub fn matches(case: &Case, opts: RunOptions) -> Result<(), String> {
    let (code, text) = outcome(case, opts);
    let ok = code == case.exit
        && if code == 0 {
            text == case.expected
        } else {
            text.starts_with(&case.expected)
        };
    if ok {
        Ok(())
    } else {
        Err(format!(
            "{}: expected exit {} `{}`, got exit {code} `{text}`",
            case.name, case.exit, case.expected
        ))
    }
}
