//! Pass 2: facts for one file against a complete declaration table.

use std::collections::{BTreeMap, HashMap};

use super::lower::Annotations;
use super::syntax::*;
use super::table::{DeclTable, Found};
use super::{Diagnostic, ParsedFile, Severity};
use crate::loc::{Region, SourceLocation};
use crate::model::M3Model;
use crate::rel::Pair;
use crate::typesym::TypeSymbol;

pub struct FileFacts {
    pub model: M3Model,
    pub ann: Annotations,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn file_facts(table: &DeclTable, idx: usize, f: &ParsedFile) -> FileFacts {
    let mut c = Collector {
        t: table,
        idx,
        f,
        containment: Vec::new(),
        declarations: Vec::new(),
        uses: Vec::new(),
        inheritance: Vec::new(),
        overrides: Vec::new(),
        invocations: Vec::new(),
        types: BTreeMap::new(),
        ann: Annotations::default(),
        diags: Vec::new(),
    };
    c.unit(&f.unit);
    let mut model = M3Model::empty(f.file.clone());
    model.containment = c.containment.into_iter().collect();
    model.declarations = c.declarations.into_iter().collect();
    model.uses = c.uses.into_iter().collect();
    model.inheritance = c.inheritance.into_iter().collect();
    model.overrides = c.overrides.into_iter().collect();
    model.invocations = c.invocations.into_iter().collect();
    model.declared_types = c.types;
    FileFacts {
        model,
        ann: c.ann,
        diagnostics: c.diags,
    }
}

struct Collector<'a> {
    t: &'a DeclTable,
    idx: usize,
    f: &'a ParsedFile,
    containment: Vec<Pair>,
    declarations: Vec<Pair>,
    uses: Vec<Pair>,
    inheritance: Vec<Pair>,
    overrides: Vec<Pair>,
    invocations: Vec<Pair>,
    types: BTreeMap<SourceLocation, TypeSymbol>,
    ann: Annotations,
    diags: Vec<Diagnostic>,
}

/// Name-resolution context inside one member.
struct Scope {
    /// The using side of `uses` and caller of `invocations`.
    owner: SourceLocation,
    /// Enclosing type qualified names, innermost first.
    enclosing: Vec<String>,
    vars: Vec<HashMap<String, (SourceLocation, TypeSymbol)>>,
    /// Declarations per (scheme, name) so far, for ordinal suffixes.
    counts: HashMap<(&'static str, String), usize>,
}

impl Scope {
    fn lookup(&self, name: &str) -> Option<(SourceLocation, TypeSymbol)> {
        self.vars.iter().rev().find_map(|frame| frame.get(name).cloned())
    }
}

fn expr_ctor(k: &ExprKind) -> &'static str {
    match k {
        ExprKind::Int(_) => "intLit",
        ExprKind::Bool(_) => "boolLit",
        ExprKind::Str(_) => "stringLit",
        ExprKind::Null => "nullLit",
        ExprKind::Name(_) => "name",
        ExprKind::FieldAccess { .. } => "fieldAccess",
        ExprKind::Invoke { .. } => "invoke",
        ExprKind::New { .. } => "newObject",
        ExprKind::Assign { .. } => "assign",
        ExprKind::Binary { .. } => "binary",
        ExprKind::Unary { .. } => "unary",
        ExprKind::Cast { .. } => "cast",
        ExprKind::This => "thisRef",
    }
}

/// Class and interface locations mentioned anywhere in `sym`.
fn type_refs(sym: &TypeSymbol, out: &mut Vec<SourceLocation>) {
    match sym {
        TypeSymbol::Class { decl, args } | TypeSymbol::Interface { decl, args } => {
            out.push(decl.clone());
            for a in args {
                type_refs(a, out);
            }
        }
        TypeSymbol::Array(e) => type_refs(e, out),
        TypeSymbol::Method { ret, params, .. } => {
            type_refs(ret, out);
            for p in params {
                type_refs(p, out);
            }
        }
        _ => {}
    }
}

impl Collector<'_> {
    fn region(&self, span: Span) -> SourceLocation {
        self.f
            .file
            .with_region(Region::new(span.start as u64, (span.end - span.start) as u64))
    }

    fn warn(&mut self, offset: usize, message: String) {
        self.diags.push(self.f.diagnostic(Severity::Warning, offset, message));
    }

    fn declare(&mut self, loc: &SourceLocation, span: Span, ctor: &'static str, container: &SourceLocation) {
        self.declarations.push((loc.clone(), self.region(span)));
        self.containment.push((loc.clone(), container.clone()));
        self.ann.decls.insert((span.start, span.end, ctor), loc.clone());
    }

    /// Resolves a written type, reporting unresolved names and recording uses by `owner`.
    fn written_type(&mut self, enclosing: &[String], te: &TypeExpr, owner: &SourceLocation) -> TypeSymbol {
        let mut missing = Vec::new();
        let sym = self.t.resolve_type(self.idx, enclosing, te, &mut missing);
        for (span, name) in missing {
            self.warn(span.start, format!("unresolved type `{name}`"));
        }
        let mut refs = Vec::new();
        type_refs(&sym, &mut refs);
        for r in refs {
            self.uses.push((owner.clone(), r));
        }
        sym
    }

    fn unit(&mut self, u: &CompilationUnit) {
        let package: Vec<String> = u
            .package
            .as_ref()
            .map(|(p, _)| p.split('.').map(String::from).collect())
            .unwrap_or_default();
        for (q, span) in &u.imports {
            if !self.t.types.contains_key(q) {
                let loc = self.t.external(q);
                self.warn(span.start, format!("external type {loc} is not declared here"));
            }
        }
        let pkg = self.t.logical("package", package.clone());
        for td in &u.types {
            self.type_decl(&package, &pkg, td);
        }
    }

    fn type_decl(&mut self, prefix: &[String], container: &SourceLocation, td: &TypeDecl) {
        let mut path = prefix.to_vec();
        path.push(td.name.name.clone());
        let qname = path.join(".");
        if !self.t.registered(&qname, self.idx, td.span) {
            return;
        }
        let t = self.t;
        let entry = &t.types[&qname];
        let loc = entry.loc.clone();
        let ctor = match td.kind {
            TypeKind::Class => "classDecl",
            TypeKind::Interface => "interfaceDecl",
        };
        self.declare(&loc, td.span, ctor, container);
        self.types.insert(loc.clone(), t.self_symbol(&qname));
        let enclosing = t.enclosing_chain(&qname);
        for te in td.extends.iter().chain(&td.implements) {
            let sym = self.written_type(&enclosing, te, &loc);
            if let Some(sup) = sym.decl() {
                self.inheritance.push((loc.clone(), sup.clone()));
            }
        }
        for m in &td.members {
            match m {
                Member::Type(inner) => self.type_decl(&path, &loc, inner),
                Member::Field(fd) => {
                    let Some(fe) = entry.fields.iter().find(|e| e.span == fd.span) else {
                        continue;
                    };
                    self.declare(&fe.loc, fd.span, "fieldDecl", &loc);
                    self.types.insert(fe.loc.clone(), fe.ty.clone());
                    self.written_type(&enclosing, &fd.ty, &fe.loc);
                    if let Some(init) = &fd.init {
                        let mut sc = Scope {
                            owner: fe.loc.clone(),
                            enclosing: enclosing.clone(),
                            vars: vec![HashMap::new()],
                            counts: HashMap::new(),
                        };
                        self.expr(&mut sc, init);
                    }
                }
                Member::Method(md) | Member::Constructor(md) => {
                    let is_ctor = md.ret.is_none();
                    let list = if is_ctor { &entry.ctors } else { &entry.methods };
                    let Some(me) = list.iter().find(|e| e.span == md.span) else {
                        continue;
                    };
                    let mloc = me.loc.clone();
                    self.declare(
                        &mloc,
                        md.span,
                        if is_ctor { "constructorDecl" } else { "methodDecl" },
                        &loc,
                    );
                    self.types.insert(
                        mloc.clone(),
                        TypeSymbol::Method {
                            decl: mloc.clone(),
                            ret: Box::new(me.ret.clone()),
                            params: me.params.clone(),
                        },
                    );
                    if let Some(r) = &md.ret {
                        self.written_type(&enclosing, r, &mloc);
                    }
                    if !is_ctor {
                        for sup in t.supertypes_of(&qname) {
                            for other in &sup.methods {
                                if other.name == me.name && other.param_names == me.param_names {
                                    self.overrides.push((other.loc.clone(), mloc.clone()));
                                }
                            }
                        }
                    }
                    let mut sc = Scope {
                        owner: mloc.clone(),
                        enclosing: enclosing.clone(),
                        vars: vec![HashMap::new()],
                        counts: HashMap::new(),
                    };
                    for p in &md.params {
                        let ty = self.written_type(&enclosing, &p.ty, &mloc);
                        self.local(&mut sc, "java+parameter", "paramDecl", &p.name, p.span, ty);
                    }
                    if let Some(b) = &md.body {
                        self.block(&mut sc, b);
                    }
                }
            }
        }
    }

    /// Declares a parameter or local variable of the member owning `sc`.
    fn local(
        &mut self,
        sc: &mut Scope,
        scheme: &'static str,
        ctor: &'static str,
        name: &Ident,
        span: Span,
        ty: TypeSymbol,
    ) {
        let n = sc.counts.entry((scheme, name.name.clone())).or_insert(0);
        *n += 1;
        let segment = if *n == 1 {
            name.name.clone()
        } else {
            format!("{}#{}", name.name, n)
        };
        let loc = sc.owner.with_scheme(scheme).expect("valid scheme").child(&segment);
        let owner = sc.owner.clone();
        self.declare(&loc, span, ctor, &owner);
        sc.vars
            .last_mut()
            .expect("scope has a frame")
            .insert(name.name.clone(), (loc, ty));
    }

    fn local_var(&mut self, sc: &mut Scope, v: &LocalVar) {
        let owner = sc.owner.clone();
        let ty = self.written_type(&sc.enclosing.clone(), &v.ty, &owner);
        if let Some(init) = &v.init {
            self.expr(sc, init);
        }
        self.local(sc, "java+variable", "localVarDecl", &v.name, v.span, ty);
    }

    fn block(&mut self, sc: &mut Scope, b: &Block) {
        sc.vars.push(HashMap::new());
        for s in &b.stmts {
            self.stmt(sc, s);
        }
        sc.vars.pop();
    }

    fn stmt(&mut self, sc: &mut Scope, s: &Stmt) {
        match s {
            Stmt::Block(b) => self.block(sc, b),
            Stmt::If { cond, then, els, .. } => {
                self.expr(sc, cond);
                self.nested(sc, then);
                if let Some(e) = els {
                    self.nested(sc, e);
                }
            }
            Stmt::While { cond, body, .. } => {
                self.expr(sc, cond);
                self.nested(sc, body);
            }
            Stmt::For {
                init,
                cond,
                update,
                body,
                ..
            } => {
                sc.vars.push(HashMap::new());
                for i in init {
                    match i {
                        ForInit::Local(v) => self.local_var(sc, v),
                        ForInit::Expr(e) => {
                            self.expr(sc, e);
                        }
                    }
                }
                if let Some(c) = cond {
                    self.expr(sc, c);
                }
                for u in update {
                    self.expr(sc, u);
                }
                self.nested(sc, body);
                sc.vars.pop();
            }
            Stmt::Foreach { var, iter, body, .. } => {
                self.expr(sc, iter);
                sc.vars.push(HashMap::new());
                self.local_var(sc, var);
                self.nested(sc, body);
                sc.vars.pop();
            }
            Stmt::Return { value, .. } => {
                if let Some(v) = value {
                    self.expr(sc, v);
                }
            }
            Stmt::Expr { expr, .. } => {
                self.expr(sc, expr);
            }
            Stmt::Break(_) | Stmt::Continue(_) | Stmt::Empty(_) => {}
            Stmt::Local(v) => self.local_var(sc, v),
        }
    }

    /// A sub-statement gets its own frame so a bare declaration does not leak.
    fn nested(&mut self, sc: &mut Scope, s: &Stmt) {
        sc.vars.push(HashMap::new());
        self.stmt(sc, s);
        sc.vars.pop();
    }

    fn use_of(&mut self, sc: &Scope, used: &SourceLocation) {
        self.uses.push((sc.owner.clone(), used.clone()));
    }

    fn annotate(&mut self, e: &Expr, ty: TypeSymbol) -> TypeSymbol {
        self.ann
            .types
            .insert((e.span.start, e.span.end, expr_ctor(&e.kind)), ty.clone());
        ty
    }

    fn field_in_scope(&self, sc: &Scope, name: &str) -> Option<(SourceLocation, TypeSymbol)> {
        sc.enclosing
            .iter()
            .find_map(|q| self.t.find_field(&self.t.self_symbol(q), name))
    }

    /// Types a call receiver; a bare name that is neither a variable nor a
    /// field may denote a type (static access).
    fn receiver(&mut self, sc: &mut Scope, target: &Expr) -> TypeSymbol {
        if let ExprKind::Name(n) = &target.kind {
            if sc.lookup(n).is_none() && self.field_in_scope(sc, n).is_none() {
                let sym = match self.t.lookup_type(self.idx, &sc.enclosing, n) {
                    Some(Found::Type(q)) => Some(self.t.symbol(&q, vec![])),
                    Some(Found::External(loc)) => Some(TypeSymbol::Class {
                        decl: loc,
                        args: vec![],
                    }),
                    _ => None,
                };
                if let Some(sym) = sym {
                    self.use_of(sc, sym.decl().expect("class or interface"));
                    return self.annotate(target, sym);
                }
            }
        }
        self.expr(sc, target)
    }

    fn expr(&mut self, sc: &mut Scope, e: &Expr) -> TypeSymbol {
        let ty = match &e.kind {
            ExprKind::Int(_) => TypeSymbol::int(),
            ExprKind::Bool(_) => TypeSymbol::boolean(),
            ExprKind::Str(_) => TypeSymbol::str(),
            ExprKind::Null => TypeSymbol::unresolved("null"),
            ExprKind::This => match sc.enclosing.first() {
                Some(q) => self.t.self_symbol(q),
                None => TypeSymbol::unresolved("this"),
            },
            ExprKind::Name(n) => {
                if let Some((loc, ty)) = sc.lookup(n).or_else(|| self.field_in_scope(sc, n)) {
                    self.use_of(sc, &loc);
                    ty
                } else {
                    self.warn(e.span.start, format!("cannot resolve `{n}`"));
                    TypeSymbol::unresolved(n.clone())
                }
            }
            ExprKind::FieldAccess { target, name } => {
                let rt = self.receiver(sc, target);
                if matches!(rt, TypeSymbol::Array(_)) && name.name == "length" {
                    TypeSymbol::int()
                } else if let Some((loc, ty)) = self.t.find_field(&rt, &name.name) {
                    self.use_of(sc, &loc);
                    ty
                } else {
                    if !rt.is_unresolved() {
                        self.warn(name.span.start, format!("cannot resolve field `{}` of {rt}", name.name));
                    }
                    TypeSymbol::unresolved(name.name.clone())
                }
            }
            ExprKind::Invoke { target, name, args } => {
                let rt = target.as_ref().map(|t| self.receiver(sc, t));
                let arg_types: Vec<TypeSymbol> = args.iter().map(|a| self.expr(sc, a)).collect();
                let hit = match &rt {
                    Some(rt) => self.t.find_method(rt, &name.name, &arg_types),
                    None => sc
                        .enclosing
                        .iter()
                        .find_map(|q| self.t.find_method(&self.t.self_symbol(q), &name.name, &arg_types)),
                };
                match hit {
                    Some((callee, ret)) => {
                        self.invocations.push((sc.owner.clone(), callee.clone()));
                        self.use_of(sc, &callee);
                        ret
                    }
                    None => {
                        if !rt.as_ref().is_some_and(|r| r.is_unresolved()) {
                            self.warn(
                                name.span.start,
                                format!("cannot resolve method `{}` with {} argument(s)", name.name, args.len()),
                            );
                        }
                        TypeSymbol::unresolved(name.name.clone())
                    }
                }
            }
            ExprKind::New { ty, args } => {
                let owner = sc.owner.clone();
                let sym = self.written_type(&sc.enclosing.clone(), ty, &owner);
                let arg_types: Vec<TypeSymbol> = args.iter().map(|a| self.expr(sc, a)).collect();
                if let Some(entry) = self.t.entry_of(&sym) {
                    if !(entry.ctors.is_empty() && args.is_empty()) {
                        match self.t.find_ctor(&sym, &arg_types) {
                            Some((ctor, _)) => {
                                self.invocations.push((owner, ctor.clone()));
                                self.use_of(sc, &ctor);
                            }
                            None => self.warn(
                                ty.span().start,
                                format!("no constructor of {} takes {} argument(s)", entry.loc, args.len()),
                            ),
                        }
                    }
                }
                sym
            }
            ExprKind::Assign { target, value } => {
                let lt = self.expr(sc, target);
                self.expr(sc, value);
                lt
            }
            ExprKind::Binary { op, left, right } => {
                let l = self.expr(sc, left);
                let r = self.expr(sc, right);
                match *op {
                    "+" if l == TypeSymbol::str() || r == TypeSymbol::str() => TypeSymbol::str(),
                    "+" | "-" | "*" | "/" | "%" => TypeSymbol::int(),
                    _ => TypeSymbol::boolean(),
                }
            }
            ExprKind::Unary { op, operand } => {
                self.expr(sc, operand);
                if *op == "!" {
                    TypeSymbol::boolean()
                } else {
                    TypeSymbol::int()
                }
            }
            ExprKind::Cast { ty, operand } => {
                let owner = sc.owner.clone();
                let sym = self.written_type(&sc.enclosing.clone(), ty, &owner);
                self.expr(sc, operand);
                sym
            }
        };
        self.annotate(e, ty)
    }
}
