//! Trees computed on demand for a declared logical location.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use super::lower::Lowerer;
use super::parser::{parse_fragment, Fragment, FragmentKind};
use super::syntax::Member;
use super::{extract_in, parse_file, DeclTable, ParsedFile};
use crate::ast::AstNode;
use crate::loc::SourceLocation;
use crate::model::M3Model;
use crate::source::{SourceResolver, SourceUnavailable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AstError {
    #[error("{0} is not declared in the model")]
    NotDeclared(SourceLocation),
    #[error(transparent)]
    SourceUnavailable(#[from] SourceUnavailable),
    #[error("{region} no longer holds the declaration of {target}: {reason}")]
    RegionMismatch {
        target: SourceLocation,
        region: SourceLocation,
        reason: String,
    },
}

/// Annotated trees of every file declaring entities under one authority.
struct Snapshot {
    trees: HashMap<SourceLocation, AstNode>,
}

/// Computes trees for declarations of a model, re-reading sources through a
/// resolver. Re-extraction results are cached per authority.
pub struct AstService<'a> {
    model: &'a M3Model,
    resolver: &'a dyn SourceResolver,
    cache: Mutex<HashMap<String, Arc<Snapshot>>>,
}

/// One-off [`AstService::get`].
pub fn get_ast(model: &M3Model, target: &SourceLocation, resolver: &dyn SourceResolver) -> Result<AstNode, AstError> {
    AstService::new(model, resolver).get(target)
}

impl<'a> AstService<'a> {
    pub fn new(model: &'a M3Model, resolver: &'a dyn SourceResolver) -> Self {
        AstService {
            model,
            resolver,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn get(&self, target: &SourceLocation) -> Result<AstNode, AstError> {
        let region_loc = self
            .model
            .declarations
            .image(target)
            .into_iter()
            .next()
            .ok_or_else(|| AstError::NotDeclared(target.clone()))?;
        let mismatch = |reason: String| AstError::RegionMismatch {
            target: target.clone(),
            region: region_loc.clone(),
            reason,
        };
        let region = region_loc
            .region()
            .ok_or_else(|| mismatch("declaration has no region".into()))?;
        let file = region_loc.without_region();
        let text = self.resolver.read(&file)?;
        let (start, len) = (region.offset as usize, region.length as usize);
        if start + len > text.chars().count() {
            return Err(mismatch("region extends past the end of the file".into()));
        }
        let slice: String = text.chars().skip(start).take(len).collect();

        let kind = match target.kind() {
            "class" | "interface" => FragmentKind::Type,
            "method" | "constructor" | "field" => FragmentKind::Member,
            "parameter" => FragmentKind::Param,
            "variable" => FragmentKind::LocalVar,
            other => return Err(mismatch(format!("`{other}` locations have no tree"))),
        };
        let fragment = parse_fragment(&slice, start, kind).map_err(|e| mismatch(format!("re-parse failed: {e}")))?;
        let last = target.path().last().cloned().unwrap_or_default();
        let lower = Lowerer { file: &file, ann: None };
        let (name, expected) = match &fragment {
            Fragment::Type(t) => (t.name.name.clone(), lower.type_decl(t)),
            Fragment::Member(m) => {
                let name = match (m, target.kind()) {
                    (Member::Method(md), "method") | (Member::Constructor(md), "constructor") => md.signature(),
                    (Member::Field(f), "field") => f.name.name.clone(),
                    _ => return Err(mismatch("region holds a different kind of member".into())),
                };
                (name, lower.member(m))
            }
            Fragment::Param(p) => (p.name.name.clone(), lower.param(p)),
            Fragment::LocalVar(v) => (v.name.name.clone(), lower.local(v)),
        };
        let bare = last.split('#').next().unwrap_or_default();
        if name != bare {
            return Err(mismatch(format!("region declares `{name}`")));
        }

        let snapshot = self.snapshot(target.authority())?;
        let tree = snapshot
            .trees
            .get(&file)
            .ok_or_else(|| mismatch("file no longer parses".into()))?;
        let found = tree
            .find(&|n| n.src.as_ref() == Some(&region_loc) && n.constructor == expected.constructor)
            .ok_or_else(|| mismatch("no declaration at this region".into()))?;
        if found.strip_semantics() != expected {
            return Err(mismatch("re-parsed region differs from the file's tree".into()));
        }
        Ok(found.clone())
    }

    fn snapshot(&self, authority: &str) -> Result<Arc<Snapshot>, AstError> {
        if let Some(s) = self.cache.lock().expect("cache lock").get(authority) {
            return Ok(s.clone());
        }
        let files: BTreeSet<SourceLocation> = self
            .model
            .declarations
            .iter()
            .filter(|(l, _)| l.authority() == authority)
            .map(|(_, p)| p.without_region())
            .collect();
        let mut parsed: Vec<ParsedFile> = Vec::new();
        for f in files {
            let text = self.resolver.read(&f)?;
            if let Ok(p) = parse_file(&text, f) {
                parsed.push(p);
            }
        }
        let refs: Vec<&ParsedFile> = parsed.iter().collect();
        let table = DeclTable::build(authority, &refs);
        let trees = parsed
            .iter()
            .enumerate()
            .map(|(i, p)| (p.file.clone(), extract_in(&table, i, p).tree))
            .collect();
        let snap = Arc::new(Snapshot { trees });
        self.cache
            .lock()
            .expect("cache lock")
            .insert(authority.to_string(), snap.clone());
        Ok(snap)
    }
}
