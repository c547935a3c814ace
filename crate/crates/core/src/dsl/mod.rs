//! Concrete syntax: `.csys` system files, `.curse` failure files and
//! `.scope` hiding sets.

mod lexer;
mod parser;
mod printer;

use std::fmt;

use thiserror::Error;

use crate::syntax::{System, SystemConfig};

pub use parser::{parse_curse, parse_scope, parse_system};
pub use printer::{print_curse, print_process_expanded, print_scope, print_system};

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SourceSpan {
    pub file: Option<String>,
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl SourceSpan {
    pub fn new(line: usize, column: usize, length: usize) -> Self {
        SourceSpan {
            file: None,
            line,
            column,
            length,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(file) => write!(f, "{file}:{}:{}", self.line, self.column),
            None => write!(f, "{}:{}", self.line, self.column),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    pub fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError {
            span,
            message: message.into(),
        }
    }

    pub fn in_file(mut self, file: impl Into<String>) -> Self {
        self.span.file = Some(file.into());
        self
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Severity {
    Warning,
    /// Recursion not guarded by time: rejected unless explicitly allowed.
    Zeno,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: SourceSpan,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.severity {
            Severity::Warning => "warning",
            Severity::Zeno => "error",
        };
        write!(f, "{}: {kind}: {}", self.span, self.message)
    }
}

/// A parsed system file.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParsedBundle {
    pub config: SystemConfig,
    pub system: System,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParsedBundle {
    pub fn has_zeno(&self) -> bool {
        self.diagnostics
            .iter()
            .any(|d| d.severity == Severity::Zeno)
    }

    pub fn in_file(mut self, file: &str) -> Self {
        for d in &mut self.diagnostics {
            d.span.file = Some(file.to_string());
        }
        self
    }
}
