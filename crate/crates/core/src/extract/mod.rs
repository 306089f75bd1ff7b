//! Extraction of models from the Java subset.
//!
//! Extraction runs in two passes. Pass 1 parses every file and builds a
//! declaration table (types, their members and signatures). Pass 2 walks each
//! file again and emits its facts, resolving names against the whole table.
//! A single file is the degenerate case with a one-file table.

mod facts;
mod lexer;
mod lower;
mod ondemand;
pub mod parser;
pub mod syntax;
mod table;

use std::fmt;

use thiserror::Error;

use crate::ast::AstNode;
use crate::loc::SourceLocation;
use crate::model::M3Model;
use crate::source::{SourceResolver, SourceUnavailable};

pub use ondemand::{get_ast, AstError, AstService};
pub use table::DeclTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: expected {expected}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, expected: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            expected: expected.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

/// One extraction issue. Printed as `severity file:line:col message`, with
/// the file given as its location literal without the bars.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub file: SourceLocation,
    pub line: usize,
    pub column: usize,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let file = self.file.to_string();
        write!(
            f,
            "{sev} {}:{}:{} {}",
            file.trim_matches('|'),
            self.line,
            self.column,
            self.message
        )
    }
}

/// A successfully parsed file.
#[derive(Debug, Clone)]
pub struct ParsedFile {
    pub file: SourceLocation,
    pub text: String,
    pub unit: syntax::CompilationUnit,
    line_starts: Vec<usize>,
}

impl ParsedFile {
    /// 1-based line and column of a character offset.
    pub fn position(&self, offset: usize) -> (usize, usize) {
        let line = self.line_starts.partition_point(|&s| s <= offset);
        (line, offset - self.line_starts[line - 1] + 1)
    }

    fn diagnostic(&self, severity: Severity, offset: usize, message: String) -> Diagnostic {
        let (line, column) = self.position(offset);
        Diagnostic {
            file: self.file.clone(),
            line,
            column,
            severity,
            message,
        }
    }

    /// The tree with `src` annotations only.
    pub fn tree(&self) -> AstNode {
        lower::Lowerer {
            file: &self.file,
            ann: None,
        }
        .unit(&self.unit)
    }
}

/// Parses `text` as the contents of `file` (a physical location).
pub fn parse_file(text: &str, file: SourceLocation) -> Result<ParsedFile, ParseError> {
    let unit = parser::parse_unit(text)?;
    let mut line_starts = vec![0];
    for (i, c) in text.chars().enumerate() {
        if c == '\n' {
            line_starts.push(i + 1);
        }
    }
    Ok(ParsedFile {
        file: file.without_region(),
        text: text.to_string(),
        unit,
        line_starts,
    })
}

#[derive(Debug, Clone)]
pub struct FileExtraction {
    /// Facts of this file; the id is the file location.
    pub model: M3Model,
    /// Tree with `src`, `decl` and `type` annotations.
    pub tree: AstNode,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone)]
pub struct DirectoryExtraction {
    /// Fusion of all per-file models; the id is the root.
    pub model: M3Model,
    /// Per-file models in path order, including empty models for files
    /// that failed to parse.
    pub file_models: Vec<M3Model>,
    pub diagnostics: Vec<Diagnostic>,
}

impl DirectoryExtraction {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }
}

/// Extracts one file on its own: names declared in other files stay
/// unresolved or external.
pub fn extract_file(parsed: &ParsedFile, authority: &str) -> FileExtraction {
    let table = DeclTable::build(authority, &[parsed]);
    let mut out = extract_in(&table, 0, parsed);
    let mut diagnostics = table.diagnostics.clone();
    diagnostics.append(&mut out.diagnostics);
    diagnostics.sort();
    out.diagnostics = diagnostics;
    out
}

/// Extracts file number `idx` of the files `table` was built from.
pub fn extract_in(table: &DeclTable, idx: usize, parsed: &ParsedFile) -> FileExtraction {
    let facts = facts::file_facts(table, idx, parsed);
    let tree = lower::Lowerer {
        file: &parsed.file,
        ann: Some(&facts.ann),
    }
    .unit(&parsed.unit);
    FileExtraction {
        model: facts.model,
        tree,
        diagnostics: facts.diagnostics,
    }
}

/// Extracts every `.java` file below `root`.
pub fn extract_directory(
    root: &SourceLocation,
    authority: &str,
    resolver: &dyn SourceResolver,
) -> Result<DirectoryExtraction, SourceUnavailable> {
    let files = resolver.list_java_files(root)?;
    let mut sources = Vec::with_capacity(files.len());
    for f in files {
        let text = resolver.read(&f)?;
        sources.push((f, text));
    }
    Ok(extract_sources(root, authority, sources))
}

/// Two-pass extraction over in-memory sources. The result does not depend on
/// the order of `sources`.
pub fn extract_sources(
    root: &SourceLocation,
    authority: &str,
    mut sources: Vec<(SourceLocation, String)>,
) -> DirectoryExtraction {
    sources.sort_by_key(|(f, _)| f.to_string());
    sources.dedup_by(|a, b| a.0 == b.0);
    let mut diagnostics = Vec::new();
    let mut parsed = Vec::new();
    let mut slots = Vec::new();
    for (file, text) in &sources {
        match parse_file(text, file.clone()) {
            Ok(p) => {
                slots.push(Some(parsed.len()));
                parsed.push(p);
            }
            Err(e) => {
                slots.push(None);
                diagnostics.push(Diagnostic {
                    file: file.without_region(),
                    line: e.line,
                    column: e.column,
                    severity: Severity::Error,
                    message: format!("expected {}", e.expected),
                });
            }
        }
    }
    let refs: Vec<&ParsedFile> = parsed.iter().collect();
    let table = DeclTable::build(authority, &refs);
    diagnostics.extend(table.diagnostics.iter().cloned());

    let mut file_models = Vec::with_capacity(sources.len());
    for ((file, _), slot) in sources.iter().zip(&slots) {
        match slot {
            Some(i) => {
                let mut out = extract_in(&table, *i, &parsed[*i]);
                diagnostics.append(&mut out.diagnostics);
                file_models.push(out.model);
            }
            None => file_models.push(M3Model::empty(file.without_region())),
        }
    }
    let model = file_models
        .iter()
        .try_fold(M3Model::empty(root.clone()), |acc, m| acc.compose(m, root.clone()))
        .expect("declared types of distinct files never overlap");
    diagnostics.sort();
    diagnostics.dedup();
    DirectoryExtraction {
        model,
        file_models,
        diagnostics,
    }
}
