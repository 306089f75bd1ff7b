//! Abstract syntax trees over five sorts: Expression, Declaration, Statement,
//! Type and Modifier.
//!
//! Constructor catalogue and child layout (`[..]` is a list child, `?` an
//! optional trailing child):
//!
//! | constructor | children |
//! |---|---|
//! | `compilationUnit` | `[packageDecl?] [importDecl*] [type decls]` |
//! | `packageDecl`, `importDecl` | qualified name text |
//! | `classDecl` | `[modifiers] name [type params] [extends] [implements] [members]` |
//! | `interfaceDecl` | `[modifiers] name [type params] [extends] [members]` |
//! | `fieldDecl` | `[modifiers] type name [init?]` |
//! | `methodDecl` | `[modifiers] returnType name [paramDecl*] [body?]` |
//! | `constructorDecl` | `[modifiers] name [paramDecl*] body` |
//! | `paramDecl` | `type name` |
//! | `localVarDecl` | `type name [init?]` |
//! | `block` | statements |
//! | `ifStmt` | `cond then else?` |
//! | `whileStmt` | `cond body` |
//! | `forStmt` | `[init] [cond?] [updates] body` |
//! | `foreachStmt` | `localVarDecl iterable body` |
//! | `returnStmt` | `expr?` |
//! | `exprStmt` | `expr` |
//! | `binary`, `unary` | operator text, operands |
//! | `invoke` | `[receiver?] name [args]` |
//! | `newObject` | `type [args]` |
//! | `namedType` | `name [type args]` |

use std::fmt::Write as _;

use crate::loc::SourceLocation;
use crate::typesym::TypeSymbol;

pub use crate::extract::{get_ast, AstError, AstService};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Expression,
    Declaration,
    Statement,
    Type,
    Modifier,
}

impl Sort {
    pub fn name(self) -> &'static str {
        match self {
            Sort::Expression => "Expression",
            Sort::Declaration => "Declaration",
            Sort::Statement => "Statement",
            Sort::Type => "Type",
            Sort::Modifier => "Modifier",
        }
    }

    /// Constructors allowed for this sort.
    pub fn constructors(self) -> &'static [&'static str] {
        match self {
            Sort::Declaration => &[
                "compilationUnit",
                "packageDecl",
                "importDecl",
                "classDecl",
                "interfaceDecl",
                "fieldDecl",
                "methodDecl",
                "constructorDecl",
                "paramDecl",
                "localVarDecl",
            ],
            Sort::Statement => &[
                "block",
                "ifStmt",
                "whileStmt",
                "forStmt",
                "foreachStmt",
                "returnStmt",
                "exprStmt",
                "breakStmt",
                "continueStmt",
                "emptyStmt",
            ],
            Sort::Expression => &[
                "intLit",
                "boolLit",
                "stringLit",
                "nullLit",
                "name",
                "fieldAccess",
                "invoke",
                "newObject",
                "assign",
                "binary",
                "unary",
                "cast",
                "thisRef",
            ],
            Sort::Type => &["namedType", "primitiveType", "arrayType"],
            Sort::Modifier => &["public", "private", "protected", "static", "abstract", "final"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Child {
    Node(AstNode),
    Text(String),
    Int(i64),
    Bool(bool),
    List(Vec<Child>),
}

impl From<AstNode> for Child {
    fn from(n: AstNode) -> Self {
        Child::Node(n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AstNode {
    pub sort: Sort,
    pub constructor: &'static str,
    pub children: Vec<Child>,
    pub src: Option<SourceLocation>,
    pub decl: Option<SourceLocation>,
    pub ty: Option<TypeSymbol>,
}

impl AstNode {
    pub fn new(sort: Sort, constructor: &'static str, children: Vec<Child>) -> Self {
        AstNode {
            sort,
            constructor,
            children,
            src: None,
            decl: None,
            ty: None,
        }
    }

    pub fn with_src(mut self, src: SourceLocation) -> Self {
        self.src = Some(src);
        self
    }

    /// Direct child nodes, looking through list children.
    pub fn child_nodes(&self) -> Vec<&AstNode> {
        fn collect<'a>(cs: &'a [Child], out: &mut Vec<&'a AstNode>) {
            for c in cs {
                match c {
                    Child::Node(n) => out.push(n),
                    Child::List(items) => collect(items, out),
                    _ => {}
                }
            }
        }
        let mut out = Vec::new();
        collect(&self.children, &mut out);
        out
    }

    fn child_nodes_mut(&mut self) -> Vec<&mut AstNode> {
        fn collect<'a>(cs: &'a mut [Child], out: &mut Vec<&'a mut AstNode>) {
            for c in cs {
                match c {
                    Child::Node(n) => out.push(n),
                    Child::List(items) => collect(items, out),
                    _ => {}
                }
            }
        }
        let mut out = Vec::new();
        collect(&mut self.children, &mut out);
        out
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a AstNode)) {
        f(self);
        for c in self.child_nodes() {
            c.walk(f);
        }
    }

    pub fn walk_mut(&mut self, f: &mut dyn FnMut(&mut AstNode)) {
        f(self);
        for c in self.child_nodes_mut() {
            c.walk_mut(f);
        }
    }

    /// Number of nodes satisfying `pred`.
    pub fn visit_count(&self, pred: impl Fn(&AstNode) -> bool) -> usize {
        let mut n = 0;
        self.walk(&mut |node| {
            if pred(node) {
                n += 1;
            }
        });
        n
    }

    /// First node in pre-order matching `pred`.
    pub fn find(&self, pred: &dyn Fn(&AstNode) -> bool) -> Option<&AstNode> {
        if pred(self) {
            return Some(self);
        }
        self.child_nodes().into_iter().find_map(|c| c.find(pred))
    }

    /// Operator text of `binary`/`unary` nodes.
    pub fn operator(&self) -> Option<&str> {
        match (self.constructor, self.children.first()) {
            ("binary" | "unary", Some(Child::Text(op))) => Some(op),
            _ => None,
        }
    }

    /// Copy without `decl`/`type` annotations.
    pub fn strip_semantics(&self) -> AstNode {
        let mut out = self.clone();
        out.walk_mut(&mut |n| {
            n.decl = None;
            n.ty = None;
        });
        out
    }

    /// Indented dump, one node per line:
    /// `<sort>:<constructor> @ <src> [decl=…] [type=…]`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        self.dump_into(&mut out, 0);
        out
    }

    fn dump_into(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        write!(out, "{pad}{}:{}", self.sort.name(), self.constructor).unwrap();
        if let Some(src) = &self.src {
            write!(out, " @ {src}").unwrap();
        }
        if let Some(d) = &self.decl {
            write!(out, " decl={d}").unwrap();
        }
        if let Some(t) = &self.ty {
            write!(out, " type={t}").unwrap();
        }
        out.push('\n');
        for c in &self.children {
            dump_child(c, out, depth + 1);
        }
    }

    /// Catalogue and src-nesting violations, as messages.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        self.validate_into(&mut problems);
        problems
    }

    fn validate_into(&self, problems: &mut Vec<String>) {
        if !self.sort.constructors().contains(&self.constructor) {
            problems.push(format!("unknown constructor {}:{}", self.sort.name(), self.constructor));
        }
        if self.decl.is_some() && self.sort != Sort::Declaration {
            problems.push(format!("decl annotation on {}", self.constructor));
        }
        for c in self.child_nodes() {
            if let (Some(p), Some(k)) = (&self.src, &c.src) {
                let nested = p.without_region() == k.without_region()
                    && match (p.region(), k.region()) {
                        (Some(pr), Some(kr)) => pr.contains(&kr),
                        _ => false,
                    };
                if !nested {
                    problems.push(format!("{k} not contained in parent {p}"));
                }
            }
            c.validate_into(problems);
        }
    }
}

fn dump_child(c: &Child, out: &mut String, depth: usize) {
    let pad = "  ".repeat(depth);
    match c {
        Child::Node(n) => n.dump_into(out, depth),
        Child::Text(t) => writeln!(out, "{pad}{t:?}").unwrap(),
        Child::Int(i) => writeln!(out, "{pad}{i}").unwrap(),
        Child::Bool(b) => writeln!(out, "{pad}{b}").unwrap(),
        Child::List(items) if items.is_empty() => writeln!(out, "{pad}[]").unwrap(),
        Child::List(items) => {
            writeln!(out, "{pad}[").unwrap();
            for i in items {
                dump_child(i, out, depth + 1);
            }
            writeln!(out, "{pad}]").unwrap();
        }
    }
}

/// Cyclomatic decision points: branch statements plus short-circuit operators.
pub fn is_decision_point(n: &AstNode) -> bool {
    match n.sort {
        Sort::Statement => matches!(n.constructor, "ifStmt" | "whileStmt" | "forStmt" | "foreachStmt"),
        Sort::Expression => matches!(n.operator(), Some("&&" | "||")) && n.constructor == "binary",
        _ => false,
    }
}
