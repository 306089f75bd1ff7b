//! Pass 1: the declaration table. Collects every type with its type
//! parameters, supertypes, fields, methods and constructors, and resolves
//! written type names against it.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::syntax::{CompilationUnit, Member, MethodDecl, Span, TypeDecl, TypeExpr, TypeKind};
use super::{Diagnostic, ParsedFile, Severity};
use crate::loc::SourceLocation;
use crate::typesym::{Binding, TypeSymbol};

#[derive(Debug, Clone)]
pub struct FieldEntry {
    pub name: String,
    pub loc: SourceLocation,
    pub ty: TypeSymbol,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct MethodEntry {
    pub name: String,
    pub loc: SourceLocation,
    /// Erased written parameter type names, as in the signature segment.
    pub param_names: Vec<String>,
    pub params: Vec<TypeSymbol>,
    pub ret: TypeSymbol,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct TypeEntry {
    pub qname: String,
    pub simple: String,
    pub loc: SourceLocation,
    pub kind: TypeKind,
    pub type_params: Vec<(String, SourceLocation)>,
    /// `extends` then `implements`, in written order.
    pub supertypes: Vec<TypeSymbol>,
    pub fields: Vec<FieldEntry>,
    pub methods: Vec<MethodEntry>,
    pub ctors: Vec<MethodEntry>,
    pub member_types: BTreeMap<String, String>,
    pub outer: Option<String>,
    pub file: usize,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct FileScope {
    pub package: Vec<String>,
    /// Simple name to dotted qualified name.
    pub imports: BTreeMap<String, String>,
}

/// Result of looking up a written type name.
#[derive(Debug, Clone, PartialEq)]
pub enum Found {
    Str,
    TypeParam(SourceLocation),
    Type(String),
    External(SourceLocation),
}

#[derive(Debug, Clone)]
pub struct DeclTable {
    pub authority: String,
    pub types: BTreeMap<String, TypeEntry>,
    pub by_loc: HashMap<SourceLocation, String>,
    pub scopes: Vec<FileScope>,
    pub diagnostics: Vec<Diagnostic>,
}

fn dotted(prefix: &[String], name: &str) -> String {
    let mut parts = prefix.to_vec();
    parts.push(name.to_string());
    parts.join(".")
}

impl DeclTable {
    /// Builds the table over `files`; on duplicate declarations the first file
    /// (in the given order) wins and an error is recorded.
    pub fn build(authority: &str, files: &[&ParsedFile]) -> DeclTable {
        let mut table = DeclTable {
            authority: authority.to_string(),
            types: BTreeMap::new(),
            by_loc: HashMap::new(),
            scopes: Vec::new(),
            diagnostics: Vec::new(),
        };
        for (idx, f) in files.iter().enumerate() {
            let package: Vec<String> = f
                .unit
                .package
                .as_ref()
                .map(|(p, _)| p.split('.').map(String::from).collect())
                .unwrap_or_default();
            let mut imports = BTreeMap::new();
            for (q, span) in &f.unit.imports {
                let simple = q.rsplit('.').next().unwrap_or(q).to_string();
                if let Some(prev) = imports.insert(simple.clone(), q.clone()) {
                    if prev != *q {
                        table.error(f, *span, format!("import of `{q}` clashes with `{prev}`"));
                        imports.insert(simple, prev);
                    }
                }
            }
            table.scopes.push(FileScope {
                package: package.clone(),
                imports,
            });
            for t in &f.unit.types {
                table.collect_type(f, idx, &package, None, t);
            }
        }
        for (idx, f) in files.iter().enumerate() {
            table.collect_members(f, idx, &f.unit);
        }
        table
    }

    fn error(&mut self, f: &ParsedFile, span: Span, message: String) {
        self.diagnostics
            .push(f.diagnostic(Severity::Error, span.start, message));
    }

    pub fn logical(&self, kind: &str, path: Vec<String>) -> SourceLocation {
        SourceLocation::new(&format!("java+{kind}"), &self.authority, path).expect("valid scheme")
    }

    fn collect_type(&mut self, f: &ParsedFile, idx: usize, prefix: &[String], outer: Option<&str>, t: &TypeDecl) {
        let qname = dotted(prefix, &t.name.name);
        if self.types.contains_key(&qname) {
            self.error(f, t.name.span, format!("duplicate declaration of type `{qname}`"));
            return;
        }
        let mut path = prefix.to_vec();
        path.push(t.name.name.clone());
        let kind = match t.kind {
            TypeKind::Class => "class",
            TypeKind::Interface => "interface",
        };
        let loc = self.logical(kind, path.clone());
        let type_params = t
            .type_params
            .iter()
            .map(|p| {
                let mut pp = path.clone();
                pp.push(p.name.clone());
                (p.name.clone(), self.logical("typeparameter", pp))
            })
            .collect();
        if let Some(o) = outer {
            if let Some(entry) = self.types.get_mut(o) {
                entry.member_types.insert(t.name.name.clone(), qname.clone());
            }
        }
        self.by_loc.insert(loc.clone(), qname.clone());
        self.types.insert(
            qname.clone(),
            TypeEntry {
                qname: qname.clone(),
                simple: t.name.name.clone(),
                loc,
                kind: t.kind,
                type_params,
                supertypes: Vec::new(),
                fields: Vec::new(),
                methods: Vec::new(),
                ctors: Vec::new(),
                member_types: BTreeMap::new(),
                outer: outer.map(String::from),
                file: idx,
                span: t.span,
            },
        );
        for m in &t.members {
            if let Member::Type(inner) = m {
                self.collect_type(f, idx, &path, Some(&qname), inner);
            }
        }
    }

    /// Whether `t` in file `idx` is the declaration registered under `qname`.
    pub fn registered(&self, qname: &str, idx: usize, span: Span) -> bool {
        self.types.get(qname).is_some_and(|e| e.file == idx && e.span == span)
    }

    fn collect_members(&mut self, f: &ParsedFile, idx: usize, unit: &CompilationUnit) {
        let package = self.scopes[idx].package.clone();
        let mut stack: Vec<(Vec<String>, &TypeDecl)> = unit.types.iter().map(|t| (package.clone(), t)).collect();
        while let Some((prefix, t)) = stack.pop() {
            let qname = dotted(&prefix, &t.name.name);
            if !self.registered(&qname, idx, t.span) {
                continue;
            }
            let enclosing = self.enclosing_chain(&qname);
            let mut ignore = Vec::new();
            let supertypes: Vec<TypeSymbol> = t
                .extends
                .iter()
                .chain(&t.implements)
                .map(|te| self.resolve_type(idx, &enclosing, te, &mut ignore))
                .collect();
            let type_loc = self.types[&qname].loc.clone();
            let mut fields: Vec<FieldEntry> = Vec::new();
            let mut methods: Vec<MethodEntry> = Vec::new();
            let mut ctors: Vec<MethodEntry> = Vec::new();
            let mut inner_prefix = prefix.clone();
            inner_prefix.push(t.name.name.clone());
            for m in &t.members {
                match m {
                    Member::Field(fd) => {
                        if fields.iter().any(|e| e.name == fd.name.name) {
                            self.error(f, fd.name.span, format!("duplicate field `{}`", fd.name.name));
                            continue;
                        }
                        fields.push(FieldEntry {
                            name: fd.name.name.clone(),
                            loc: type_loc
                                .with_scheme("java+field")
                                .expect("valid scheme")
                                .child(&fd.name.name),
                            ty: self.resolve_type(idx, &enclosing, &fd.ty, &mut ignore),
                            span: fd.span,
                        });
                    }
                    Member::Method(md) | Member::Constructor(md) => {
                        let is_ctor = md.ret.is_none();
                        let entry = self.method_entry(idx, &enclosing, &type_loc, md);
                        let list = if is_ctor { &mut ctors } else { &mut methods };
                        if list.iter().any(|e| e.loc == entry.loc) {
                            self.error(
                                f,
                                md.name.span,
                                format!("duplicate declaration of `{}`", md.signature()),
                            );
                            continue;
                        }
                        list.push(entry);
                    }
                    Member::Type(inner) => stack.push((inner_prefix.clone(), inner)),
                }
            }
            let entry = self.types.get_mut(&qname).expect("registered");
            entry.supertypes = supertypes;
            entry.fields = fields;
            entry.methods = methods;
            entry.ctors = ctors;
        }
    }

    fn method_entry(
        &self,
        idx: usize,
        enclosing: &[String],
        type_loc: &SourceLocation,
        md: &MethodDecl,
    ) -> MethodEntry {
        let mut ignore = Vec::new();
        let kind = if md.ret.is_some() {
            "java+method"
        } else {
            "java+constructor"
        };
        MethodEntry {
            name: md.name.name.clone(),
            loc: type_loc.with_scheme(kind).expect("valid scheme").child(&md.signature()),
            param_names: md.params.iter().map(|p| p.ty.erased()).collect(),
            params: md
                .params
                .iter()
                .map(|p| self.resolve_type(idx, enclosing, &p.ty, &mut ignore))
                .collect(),
            ret: match &md.ret {
                Some(r) => self.resolve_type(idx, enclosing, r, &mut ignore),
                None => TypeSymbol::void(),
            },
            span: md.span,
        }
    }

    /// `qname` followed by its enclosing types, innermost first.
    pub fn enclosing_chain(&self, qname: &str) -> Vec<String> {
        let mut chain = vec![qname.to_string()];
        while let Some(o) = self
            .types
            .get(chain.last().expect("non-empty"))
            .and_then(|e| e.outer.clone())
        {
            chain.push(o);
        }
        chain
    }

    pub fn lookup_type(&self, file: usize, enclosing: &[String], name: &str) -> Option<Found> {
        if let Some((first, rest)) = name.split_once('.') {
            if self.types.contains_key(name) {
                return Some(Found::Type(name.to_string()));
            }
            return match self.lookup_type(file, enclosing, first)? {
                Found::Type(q) => {
                    let q = format!("{q}.{rest}");
                    self.types.contains_key(&q).then_some(Found::Type(q))
                }
                Found::External(loc) => Some(Found::External(rest.split('.').fold(loc, |l, seg| l.child(seg)))),
                _ => None,
            };
        }
        if name == "String" {
            return Some(Found::Str);
        }
        for q in enclosing {
            if let Some(e) = self.types.get(q) {
                if let Some((_, loc)) = e.type_params.iter().find(|(n, _)| n == name) {
                    return Some(Found::TypeParam(loc.clone()));
                }
            }
        }
        for q in enclosing {
            if let Some(e) = self.types.get(q) {
                if let Some(inner) = e.member_types.get(name) {
                    return Some(Found::Type(inner.clone()));
                }
                if e.simple == name {
                    return Some(Found::Type(q.clone()));
                }
            }
        }
        let scope = &self.scopes[file];
        if let Some(q) = scope.imports.get(name) {
            if self.types.contains_key(q) {
                return Some(Found::Type(q.clone()));
            }
            return Some(Found::External(self.external(q)));
        }
        let q = dotted(&scope.package, name);
        if self.types.contains_key(&q) {
            return Some(Found::Type(q));
        }
        None
    }

    /// Location assumed for an imported type that no file declares.
    pub fn external(&self, qualified: &str) -> SourceLocation {
        self.logical("class", qualified.split('.').map(String::from).collect())
    }

    /// Resolves a written type. Names that cannot be bound are pushed onto
    /// `unresolved` and become `unresolved(..)` symbols.
    pub fn resolve_type(
        &self,
        file: usize,
        enclosing: &[String],
        te: &TypeExpr,
        unresolved: &mut Vec<(Span, String)>,
    ) -> TypeSymbol {
        match te {
            TypeExpr::Primitive { name, .. } => match name.as_str() {
                "int" => TypeSymbol::int(),
                "boolean" => TypeSymbol::boolean(),
                _ => TypeSymbol::void(),
            },
            TypeExpr::Array { elem, .. } => TypeSymbol::array(self.resolve_type(file, enclosing, elem, unresolved)),
            TypeExpr::Named { name, args, span } => {
                let args: Vec<TypeSymbol> = args
                    .iter()
                    .map(|a| self.resolve_type(file, enclosing, a, unresolved))
                    .collect();
                match self.lookup_type(file, enclosing, name) {
                    Some(Found::Str) => TypeSymbol::str(),
                    Some(Found::TypeParam(loc)) => TypeSymbol::TypeParameter(loc),
                    Some(Found::Type(q)) => self.symbol(&q, args),
                    Some(Found::External(loc)) => TypeSymbol::Class { decl: loc, args },
                    None => {
                        unresolved.push((*span, name.clone()));
                        TypeSymbol::unresolved(name.clone())
                    }
                }
            }
        }
    }

    pub fn symbol(&self, qname: &str, args: Vec<TypeSymbol>) -> TypeSymbol {
        let e = &self.types[qname];
        match e.kind {
            TypeKind::Class => TypeSymbol::Class {
                decl: e.loc.clone(),
                args,
            },
            TypeKind::Interface => TypeSymbol::Interface {
                decl: e.loc.clone(),
                args,
            },
        }
    }

    /// The type as seen from inside its own body: parametrized by its own
    /// type parameters.
    pub fn self_symbol(&self, qname: &str) -> TypeSymbol {
        let args = self.types[qname]
            .type_params
            .iter()
            .map(|(_, l)| TypeSymbol::TypeParameter(l.clone()))
            .collect();
        self.symbol(qname, args)
    }

    pub fn entry_of(&self, sym: &TypeSymbol) -> Option<&TypeEntry> {
        match sym {
            TypeSymbol::Class { decl, .. } | TypeSymbol::Interface { decl, .. } => {
                self.by_loc.get(decl).map(|q| &self.types[q])
            }
            _ => None,
        }
    }

    /// `sym`'s declared type followed by its supertypes (depth first, in
    /// written order), each with the binding of its type parameters.
    pub fn walk(&self, sym: &TypeSymbol) -> Vec<(&TypeEntry, Binding)> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        self.walk_into(sym, &mut seen, &mut out);
        out
    }

    fn walk_into<'a>(&'a self, sym: &TypeSymbol, seen: &mut HashSet<String>, out: &mut Vec<(&'a TypeEntry, Binding)>) {
        let Some(e) = self.entry_of(sym) else { return };
        if !seen.insert(e.qname.clone()) {
            return;
        }
        let mut binding = Binding::new();
        if sym.type_args().len() == e.type_params.len() {
            for ((_, loc), arg) in e.type_params.iter().zip(sym.type_args()) {
                binding.insert(loc.clone(), arg.clone());
            }
        }
        let supers: Vec<TypeSymbol> = e.supertypes.iter().map(|s| s.instantiate(&binding)).collect();
        out.push((e, binding));
        for s in &supers {
            self.walk_into(s, seen, out);
        }
    }

    pub fn find_field(&self, sym: &TypeSymbol, name: &str) -> Option<(SourceLocation, TypeSymbol)> {
        self.walk(sym).into_iter().find_map(|(e, b)| {
            e.fields
                .iter()
                .find(|f| f.name == name)
                .map(|f| (f.loc.clone(), f.ty.instantiate(&b)))
        })
    }

    /// Overload selection: first type in the walk with an exact match on
    /// name, arity and argument symbols; failing that, the first type with a
    /// single candidate of that name and arity.
    pub fn find_method(
        &self,
        sym: &TypeSymbol,
        name: &str,
        args: &[TypeSymbol],
    ) -> Option<(SourceLocation, TypeSymbol)> {
        let walk = self.walk(sym);
        let pick = |exact: bool| {
            walk.iter().find_map(|(e, b)| {
                let cands: Vec<&MethodEntry> = e
                    .methods
                    .iter()
                    .filter(|m| m.name == name && m.params.len() == args.len())
                    .collect();
                select(&cands, args, b, exact)
            })
        };
        pick(true).or_else(|| pick(false))
    }

    pub fn find_ctor(&self, sym: &TypeSymbol, args: &[TypeSymbol]) -> Option<(SourceLocation, TypeSymbol)> {
        let walk = self.walk(sym);
        let (e, b) = walk.first()?;
        let cands: Vec<&MethodEntry> = e.ctors.iter().filter(|m| m.params.len() == args.len()).collect();
        select(&cands, args, b, true).or_else(|| select(&cands, args, b, false))
    }

    /// Every type reachable through supertypes, excluding `qname` itself.
    pub fn supertypes_of(&self, qname: &str) -> Vec<&TypeEntry> {
        let sym = self.self_symbol(qname);
        self.walk(&sym).into_iter().skip(1).map(|(e, _)| e).collect()
    }
}

fn select(
    cands: &[&MethodEntry],
    args: &[TypeSymbol],
    b: &Binding,
    exact: bool,
) -> Option<(SourceLocation, TypeSymbol)> {
    let hit = if exact {
        cands
            .iter()
            .find(|m| m.params.iter().map(|p| p.instantiate(b)).eq(args.iter().cloned()))
    } else if cands.len() == 1 {
        cands.first()
    } else {
        None
    };
    hit.map(|m| (m.loc.clone(), m.ret.instantiate(b)))
}
