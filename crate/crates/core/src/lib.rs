//! Source-code fact models.
//!
//! A model is a bundle of binary relations between URI-shaped
//! [`SourceLocation`]s: *logical* locations name declared entities
//! (`|java+class://proj/foo/Bar|`), *physical* locations name character
//! slices of files (`|project://proj/foo/Bar.java|(12,80)`).
//!
//! - [`loc`]: location literals and the physical/logical scheme registry
//! - [`rel`]: immutable relation algebra (union, composition, closure, images)
//! - [`typesym`]: symbolic, possibly parametrized types
//! - [`model`]: the model value, fusion and cross-project linking
//! - [`ast`]: five-sort syntax trees computed on demand
//! - [`extract`]: fact extraction for a small Java subset
//! - [`metrics`]: volume, cyclomatic complexity, inheritance depth, fan-out
//! - [`serial`]: the `.m3` text format

pub mod ast;
pub mod extract;
pub mod loc;
pub mod metrics;
pub mod model;
pub mod rel;
pub mod serial;
pub mod source;
pub mod typesym;

pub use ast::{AstNode, Child, Sort};
pub use loc::{Region, SchemeRegistry, SourceLocation};
pub use model::M3Model;
pub use rel::Relation;
pub use typesym::TypeSymbol;
