use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// A location in PENMAN source text. Lines and columns are 1-based; the
/// column counts characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Position {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl Position {
    pub(crate) fn locate(text: &str, offset: usize) -> Position {
        let before = &text[..offset.min(text.len())];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        let column = before[line_start..].chars().count() + 1;
        Position { offset, line, column }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

fn located(pos: &Option<Position>) -> String {
    pos.map(|p| format!(" at {p}")).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmrError {
    #[error("syntax error at {at}: expected {expected}, found {found}")]
    Syntax { at: Position, expected: String, found: String },
    #[error("variable `{var}` is introduced twice{}", located(.at))]
    DuplicateVariable { var: String, at: Option<Position> },
    #[error("variable `{var}` is referenced but never introduced{}", located(.at))]
    DanglingVariable { var: String, at: Option<Position> },
    #[error("invalid value `{value}` for role :{role}{}", located(.at))]
    InvalidConstant { role: String, value: String, at: Option<Position> },
    #[error("node `{var}` has an empty concept")]
    EmptyConcept { var: String },
    #[error("unknown node `{var}`")]
    UnknownNode { var: String },
    #[error("node `{var}` is not reachable from the root")]
    Unreachable { var: String },
    #[error("cycle through {}", .path.join(" -> "))]
    Cycle { path: Vec<String> },
}

impl AmrError {
    /// Stable machine-readable code for diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            AmrError::Syntax { .. } => "SyntaxError",
            AmrError::DuplicateVariable { .. } => "DuplicateVariable",
            AmrError::DanglingVariable { .. } => "DanglingVariable",
            AmrError::InvalidConstant { .. } => "InvalidConstant",
            AmrError::EmptyConcept { .. } => "EmptyConcept",
            AmrError::UnknownNode { .. } => "UnknownNode",
            AmrError::Unreachable { .. } => "Unreachable",
            AmrError::Cycle { .. } => "Cycle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "warning", rename_all = "lowercase")]
pub enum AmrWarning {
    Cycle { path: Vec<String> },
}

impl fmt::Display for AmrWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmrWarning::Cycle { path } => write!(f, "cycle through {}", path.join(" -> ")),
        }
    }
}
