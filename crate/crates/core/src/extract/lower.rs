//! Lowering of the typed syntax tree to generic [`AstNode`]s with `src`
//! annotations, plus `decl`/`type` annotations when available.

use std::collections::HashMap;

use super::syntax::*;
use crate::ast::{AstNode, Child, Sort};
use crate::loc::{Region, SourceLocation};
use crate::typesym::TypeSymbol;

/// Annotation key: node span and constructor.
pub type AnnKey = (usize, usize, &'static str);

#[derive(Debug, Clone, Default)]
pub struct Annotations {
    pub decls: HashMap<AnnKey, SourceLocation>,
    pub types: HashMap<AnnKey, TypeSymbol>,
}

pub struct Lowerer<'a> {
    pub file: &'a SourceLocation,
    pub ann: Option<&'a Annotations>,
}

fn list(items: Vec<AstNode>) -> Child {
    Child::List(items.into_iter().map(Child::Node).collect())
}

fn text(s: &str) -> Child {
    Child::Text(s.to_string())
}

impl Lowerer<'_> {
    fn node(&self, sort: Sort, ctor: &'static str, span: Span, children: Vec<Child>) -> AstNode {
        let mut n = AstNode::new(sort, ctor, children).with_src(
            self.file
                .with_region(Region::new(span.start as u64, (span.end - span.start) as u64)),
        );
        if let Some(ann) = self.ann {
            let key = (span.start, span.end, ctor);
            n.decl = ann.decls.get(&key).cloned();
            n.ty = ann.types.get(&key).cloned();
        }
        n
    }

    pub fn unit(&self, u: &CompilationUnit) -> AstNode {
        let package = u
            .package
            .iter()
            .map(|(q, s)| self.node(Sort::Declaration, "packageDecl", *s, vec![text(q)]))
            .collect();
        let imports = u
            .imports
            .iter()
            .map(|(q, s)| self.node(Sort::Declaration, "importDecl", *s, vec![text(q)]))
            .collect();
        let types = u.types.iter().map(|t| self.type_decl(t)).collect();
        self.node(
            Sort::Declaration,
            "compilationUnit",
            u.span,
            vec![list(package), list(imports), list(types)],
        )
    }

    fn modifiers(&self, mods: &[(Modifier, Span)]) -> Child {
        list(
            mods.iter()
                .map(|(m, s)| self.node(Sort::Modifier, m.keyword(), *s, vec![]))
                .collect(),
        )
    }

    pub fn type_decl(&self, t: &TypeDecl) -> AstNode {
        let params = Child::List(t.type_params.iter().map(|p| text(&p.name)).collect());
        let types = |ts: &[TypeExpr]| list(ts.iter().map(|x| self.ty(x)).collect());
        let members = list(t.members.iter().map(|m| self.member(m)).collect());
        match t.kind {
            TypeKind::Class => self.node(
                Sort::Declaration,
                "classDecl",
                t.span,
                vec![
                    self.modifiers(&t.modifiers),
                    text(&t.name.name),
                    params,
                    types(&t.extends),
                    types(&t.implements),
                    members,
                ],
            ),
            TypeKind::Interface => self.node(
                Sort::Declaration,
                "interfaceDecl",
                t.span,
                vec![
                    self.modifiers(&t.modifiers),
                    text(&t.name.name),
                    params,
                    types(&t.extends),
                    members,
                ],
            ),
        }
    }

    pub fn member(&self, m: &Member) -> AstNode {
        match m {
            Member::Type(t) => self.type_decl(t),
            Member::Field(f) => self.node(
                Sort::Declaration,
                "fieldDecl",
                f.span,
                vec![
                    self.modifiers(&f.modifiers),
                    self.ty(&f.ty).into(),
                    text(&f.name.name),
                    list(f.init.iter().map(|e| self.expr(e)).collect()),
                ],
            ),
            Member::Method(md) => self.node(
                Sort::Declaration,
                "methodDecl",
                md.span,
                vec![
                    self.modifiers(&md.modifiers),
                    self.ty(md.ret.as_ref().expect("methods have a return type")).into(),
                    text(&md.name.name),
                    list(md.params.iter().map(|p| self.param(p)).collect()),
                    list(md.body.iter().map(|b| self.block(b)).collect()),
                ],
            ),
            Member::Constructor(md) => self.node(
                Sort::Declaration,
                "constructorDecl",
                md.span,
                vec![
                    self.modifiers(&md.modifiers),
                    text(&md.name.name),
                    list(md.params.iter().map(|p| self.param(p)).collect()),
                    self.block(md.body.as_ref().expect("constructors have a body")).into(),
                ],
            ),
        }
    }

    pub fn param(&self, p: &Param) -> AstNode {
        self.node(
            Sort::Declaration,
            "paramDecl",
            p.span,
            vec![self.ty(&p.ty).into(), text(&p.name.name)],
        )
    }

    pub fn local(&self, v: &LocalVar) -> AstNode {
        self.node(
            Sort::Declaration,
            "localVarDecl",
            v.span,
            vec![
                self.ty(&v.ty).into(),
                text(&v.name.name),
                list(v.init.iter().map(|e| self.expr(e)).collect()),
            ],
        )
    }

    fn block(&self, b: &Block) -> AstNode {
        self.node(
            Sort::Statement,
            "block",
            b.span,
            b.stmts.iter().map(|s| self.stmt(s).into()).collect(),
        )
    }

    fn stmt(&self, s: &Stmt) -> AstNode {
        let st = |ctor, span, children| self.node(Sort::Statement, ctor, span, children);
        match s {
            Stmt::Block(b) => self.block(b),
            Stmt::If { cond, then, els, span } => {
                let mut children = vec![self.expr(cond).into(), self.stmt(then).into()];
                if let Some(e) = els {
                    children.push(self.stmt(e).into());
                }
                st("ifStmt", *span, children)
            }
            Stmt::While { cond, body, span } => {
                st("whileStmt", *span, vec![self.expr(cond).into(), self.stmt(body).into()])
            }
            Stmt::For {
                init,
                cond,
                update,
                body,
                span,
            } => {
                let init = init
                    .iter()
                    .map(|i| match i {
                        ForInit::Local(v) => self.local(v),
                        ForInit::Expr(e) => self.expr(e),
                    })
                    .collect();
                st(
                    "forStmt",
                    *span,
                    vec![
                        list(init),
                        list(cond.iter().map(|c| self.expr(c)).collect()),
                        list(update.iter().map(|u| self.expr(u)).collect()),
                        self.stmt(body).into(),
                    ],
                )
            }
            Stmt::Foreach { var, iter, body, span } => st(
                "foreachStmt",
                *span,
                vec![self.local(var).into(), self.expr(iter).into(), self.stmt(body).into()],
            ),
            Stmt::Return { value, span } => {
                st("returnStmt", *span, value.iter().map(|v| self.expr(v).into()).collect())
            }
            Stmt::Expr { expr, span } => st("exprStmt", *span, vec![self.expr(expr).into()]),
            Stmt::Break(span) => st("breakStmt", *span, vec![]),
            Stmt::Continue(span) => st("continueStmt", *span, vec![]),
            Stmt::Empty(span) => st("emptyStmt", *span, vec![]),
            Stmt::Local(v) => self.local(v),
        }
    }

    pub fn expr(&self, e: &Expr) -> AstNode {
        let ex = |ctor, children| self.node(Sort::Expression, ctor, e.span, children);
        match &e.kind {
            ExprKind::Int(i) => ex("intLit", vec![Child::Int(*i)]),
            ExprKind::Bool(b) => ex("boolLit", vec![Child::Bool(*b)]),
            ExprKind::Str(s) => ex("stringLit", vec![text(s)]),
            ExprKind::Null => ex("nullLit", vec![]),
            ExprKind::Name(n) => ex("name", vec![text(n)]),
            ExprKind::FieldAccess { target, name } => {
                ex("fieldAccess", vec![self.expr(target).into(), text(&name.name)])
            }
            ExprKind::Invoke { target, name, args } => ex(
                "invoke",
                vec![
                    list(target.iter().map(|t| self.expr(t)).collect()),
                    text(&name.name),
                    list(args.iter().map(|a| self.expr(a)).collect()),
                ],
            ),
            ExprKind::New { ty, args } => ex(
                "newObject",
                vec![self.ty(ty).into(), list(args.iter().map(|a| self.expr(a)).collect())],
            ),
            ExprKind::Assign { target, value } => ex("assign", vec![self.expr(target).into(), self.expr(value).into()]),
            ExprKind::Binary { op, left, right } => ex(
                "binary",
                vec![text(op), self.expr(left).into(), self.expr(right).into()],
            ),
            ExprKind::Unary { op, operand } => ex("unary", vec![text(op), self.expr(operand).into()]),
            ExprKind::Cast { ty, operand } => ex("cast", vec![self.ty(ty).into(), self.expr(operand).into()]),
            ExprKind::This => ex("thisRef", vec![]),
        }
    }

    pub fn ty(&self, t: &TypeExpr) -> AstNode {
        match t {
            TypeExpr::Named { name, args, span } => self.node(
                Sort::Type,
                "namedType",
                *span,
                vec![text(name), list(args.iter().map(|a| self.ty(a)).collect())],
            ),
            TypeExpr::Primitive { name, span } => self.node(Sort::Type, "primitiveType", *span, vec![text(name)]),
            TypeExpr::Array { elem, span } => self.node(Sort::Type, "arrayType", *span, vec![self.ty(elem).into()]),
        }
    }
}
