//! Source positions and diagnostic rendering.

use std::fmt;

use serde::Serialize;

/// Half-open byte range into the source text.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// Maps byte offsets to 1-based line and column numbers.
pub struct LineIndex {
    line_starts: Vec<usize>,
}

impl LineIndex {
    pub fn new(source: &str) -> Self {
        let mut line_starts = vec![0];
        for (i, b) in source.bytes().enumerate() {
            if b == b'\n' {
                line_starts.push(i + 1);
            }
        }
        LineIndex { line_starts }
    }

    pub fn line_col(&self, offset: usize) -> (usize, usize) {
        let line = match self.line_starts.binary_search(&offset) {
            Ok(l) => l,
            Err(l) => l - 1,
        };
        (line + 1, offset - self.line_starts[line] + 1)
    }
}

/// Anything that can be reported as `<line>:<col>: <severity>[<code>]: <message>`.
pub trait Diagnostic {
    fn span(&self) -> Span;
    fn code(&self) -> &'static str;
    fn message(&self) -> String;
    fn severity(&self) -> &'static str {
        "error"
    }

    fn render(&self, source: &str) -> String {
        let (line, col) = LineIndex::new(source).line_col(self.span().start);
        format!(
            "{line}:{col}: {}[{}]: {}",
            self.severity(),
            self.code(),
            self.message()
        )
    }
}
