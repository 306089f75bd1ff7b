//! Recursive-descent parser for the Java subset.
//!
//! ```text
//! unit      := ('package' qname ';')? ('import' qname ';')* typeDecl+
//! typeDecl  := modifier* ('class' | 'interface') ident typeParams?
//!              ('extends' type (',' type)*)? ('implements' type (',' type)*)? '{' member* '}'
//! member    := modifier* ( typeDecl | ident '(' params ')' block
//!              | type ident '(' params ')' (block | ';') | type ident ('=' expr)? ';' )
//! type      := ('int' | 'boolean' | 'void' | qname ('<' type (',' type)* '>')?) ('[' ']')*
//! ```
//!
//! Statements and expressions follow the usual Java shapes and precedence,
//! restricted to the constructors of the AST catalogue.

use super::lexer::{tokenize, Tok, Token, KEYWORDS};
use super::syntax::*;
use super::ParseError;

/// Which declaration a fragment is expected to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FragmentKind {
    Type,
    Member,
    Param,
    LocalVar,
}

pub enum Fragment {
    Type(TypeDecl),
    Member(Member),
    Param(Param),
    LocalVar(LocalVar),
}

pub fn parse_unit(text: &str) -> Result<CompilationUnit, ParseError> {
    let mut p = Parser::new(tokenize(text, 0)?);
    let unit = p.unit()?;
    p.expect_eof()?;
    Ok(unit)
}

/// Parses a declaration slice whose first character is at offset `base`.
pub fn parse_fragment(text: &str, base: usize, kind: FragmentKind) -> Result<Fragment, ParseError> {
    let mut p = Parser::new(tokenize(text, base)?);
    let frag = match kind {
        FragmentKind::Type => {
            let mods = p.modifiers()?;
            Fragment::Type(p.type_decl(mods)?)
        }
        FragmentKind::Member => Fragment::Member(p.member(None)?),
        FragmentKind::Param => Fragment::Param(p.param()?),
        FragmentKind::LocalVar => {
            let start = p.peek().start;
            let ty = p.ty()?;
            let mut var = p.local_var_rest(start, ty)?;
            if p.eat(";") {
                var.span.end = p.prev_end();
            }
            Fragment::LocalVar(var)
        }
    };
    p.expect_eof()?;
    Ok(frag)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(i) => format!("`{i}`"),
        Tok::Str(_) => "string literal".into(),
        Tok::Punct(p) => format!("`{p}`"),
        Tok::Eof => "end of input".into(),
    }
}

impl Parser {
    fn new(toks: Vec<Token>) -> Self {
        Parser { toks, pos: 0 }
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn prev_end(&self) -> usize {
        self.toks[self.pos.saturating_sub(1)].end
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::new(
            t.line,
            t.column,
            format!("{}, found {}", expected.into(), describe(&t.tok)),
        )
    }

    fn is(&self, p: &str) -> bool {
        matches!(&self.peek().tok, Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == k)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is(p) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> PResult<Token> {
        if self.is(p) {
            Ok(self.advance())
        } else {
            Err(self.error(format!("`{p}`")))
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if matches!(self.peek().tok, Tok::Eof) {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match &self.peek().tok {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let name = s.clone();
                let t = self.advance();
                Ok(Ident {
                    name,
                    span: Span::new(t.start, t.end),
                })
            }
            _ => Err(self.error("identifier")),
        }
    }

    fn at_ident(&self) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
    }

    fn qname(&mut self) -> PResult<(String, Span)> {
        let first = self.ident()?;
        let mut name = first.name;
        let mut span = first.span;
        while self.is(".") && matches!(self.peek_at(1), Tok::Ident(_)) {
            self.advance();
            let next = self.ident()?;
            name.push('.');
            name.push_str(&next.name);
            span.end = next.span.end;
        }
        Ok((name, span))
    }

    fn unit(&mut self) -> PResult<CompilationUnit> {
        let start = self.peek().start;
        let mut package = None;
        if self.is_kw("package") {
            let kw = self.advance();
            let (name, _) = self.qname()?;
            let semi = self.expect(";")?;
            package = Some((name, Span::new(kw.start, semi.end)));
        }
        let mut imports = Vec::new();
        while self.is_kw("import") {
            let kw = self.advance();
            if self.is_kw("static") {
                return Err(self.error("type name (static imports are not supported)"));
            }
            let (name, _) = self.qname()?;
            if self.is(".") {
                return Err(self.error("`;` (wildcard imports are not supported)"));
            }
            let semi = self.expect(";")?;
            imports.push((name, Span::new(kw.start, semi.end)));
        }
        let mut types = Vec::new();
        while !matches!(self.peek().tok, Tok::Eof) {
            let mods = self.modifiers()?;
            types.push(self.type_decl(mods)?);
        }
        if types.is_empty() {
            return Err(self.error("class or interface declaration"));
        }
        Ok(CompilationUnit {
            package,
            imports,
            types,
            span: Span::new(start, self.prev_end()),
        })
    }

    fn modifiers(&mut self) -> PResult<Vec<(Modifier, Span)>> {
        let mut mods = Vec::new();
        while let Tok::Ident(s) = &self.peek().tok {
            match Modifier::from_keyword(s) {
                Some(m) => {
                    let t = self.advance();
                    mods.push((m, Span::new(t.start, t.end)));
                }
                None => break,
            }
        }
        if self.is("@") {
            return Err(self.error("declaration (annotations are not supported)"));
        }
        Ok(mods)
    }

    fn type_decl(&mut self, modifiers: Vec<(Modifier, Span)>) -> PResult<TypeDecl> {
        let start = modifiers.first().map(|(_, s)| s.start).unwrap_or(self.peek().start);
        let kind = if self.eat_kw("class") {
            TypeKind::Class
        } else if self.eat_kw("interface") {
            TypeKind::Interface
        } else {
            return Err(self.error("`class` or `interface`"));
        };
        let name = self.ident()?;
        let mut type_params = Vec::new();
        if self.eat("<") {
            loop {
                type_params.push(self.ident()?);
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(">")?;
        }
        let mut extends = Vec::new();
        let mut implements = Vec::new();
        if self.eat_kw("extends") {
            extends.push(self.ty()?);
            if kind == TypeKind::Interface {
                while self.eat(",") {
                    extends.push(self.ty()?);
                }
            }
        }
        if kind == TypeKind::Class && self.eat_kw("implements") {
            loop {
                implements.push(self.ty()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect("{")?;
        let mut members = Vec::new();
        while !self.is("}") {
            if matches!(self.peek().tok, Tok::Eof) {
                return Err(self.error("`}`"));
            }
            members.push(self.member(Some(&name.name))?);
        }
        let close = self.expect("}")?;
        Ok(TypeDecl {
            kind,
            modifiers,
            name,
            type_params,
            extends,
            implements,
            members,
            span: Span::new(start, close.end),
        })
    }

    /// `owner` is the enclosing type's name when known.
    fn member(&mut self, owner: Option<&str>) -> PResult<Member> {
        let mods = self.modifiers()?;
        let start = mods.first().map(|(_, s)| s.start).unwrap_or(self.peek().start);
        if self.is_kw("class") || self.is_kw("interface") {
            return Ok(Member::Type(self.type_decl(mods)?));
        }
        if self.at_ident() && matches!(self.peek_at(1), Tok::Punct("(")) {
            let name_tok = self.peek().clone();
            let name = self.ident()?;
            if let Some(owner) = owner {
                if owner != name.name {
                    return Err(ParseError::new(
                        name_tok.line,
                        name_tok.column,
                        format!("constructor named `{owner}` or a return type, found `{}`", name.name),
                    ));
                }
            }
            let params = self.params()?;
            let body = self.block()?;
            return Ok(Member::Constructor(MethodDecl {
                modifiers: mods,
                ret: None,
                name,
                params,
                span: Span::new(start, body.span.end),
                body: Some(body),
            }));
        }
        let ty = self.ty()?;
        let name = self.ident()?;
        if self.is("(") {
            let params = self.params()?;
            let body = if self.eat(";") { None } else { Some(self.block()?) };
            return Ok(Member::Method(MethodDecl {
                modifiers: mods,
                ret: Some(ty),
                name,
                params,
                body,
                span: Span::new(start, self.prev_end()),
            }));
        }
        if matches!(&ty, TypeExpr::Primitive { name, .. } if name == "void") {
            return Err(self.error("`(` after a `void` member name"));
        }
        let init = if self.eat("=") { Some(self.expr()?) } else { None };
        let semi = self.expect(";")?;
        Ok(Member::Field(FieldDecl {
            modifiers: mods,
            ty,
            name,
            init,
            span: Span::new(start, semi.end),
        }))
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect("(")?;
        let mut params = Vec::new();
        if !self.is(")") {
            loop {
                params.push(self.param()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        Ok(params)
    }

    fn param(&mut self) -> PResult<Param> {
        let ty = self.ty()?;
        let name = self.ident()?;
        Ok(Param {
            span: ty.span().to(name.span),
            ty,
            name,
        })
    }

    fn ty(&mut self) -> PResult<TypeExpr> {
        let mut t = match &self.peek().tok {
            Tok::Ident(s) if matches!(s.as_str(), "int" | "boolean" | "void") => {
                let name = s.clone();
                let tok = self.advance();
                TypeExpr::Primitive {
                    name,
                    span: Span::new(tok.start, tok.end),
                }
            }
            _ => {
                let (name, mut span) = self.qname().map_err(|_| self.error("type"))?;
                let mut args = Vec::new();
                if self.eat("<") {
                    loop {
                        args.push(self.ty()?);
                        if !self.eat(",") {
                            break;
                        }
                    }
                    span.end = self.expect(">")?.end;
                }
                TypeExpr::Named { name, args, span }
            }
        };
        while self.is("[") && matches!(self.peek_at(1), Tok::Punct("]")) {
            self.advance();
            let close = self.advance();
            let span = Span::new(t.span().start, close.end);
            t = TypeExpr::Array {
                elem: Box::new(t),
                span,
            };
        }
        Ok(t)
    }

    /// Runs `f` and rewinds when it fails or returns `None`.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<Option<T>>) -> Option<T> {
        let save = self.pos;
        match f(self) {
            Ok(Some(v)) => Some(v),
            _ => {
                self.pos = save;
                None
            }
        }
    }

    fn block(&mut self) -> PResult<Block> {
        let open = self.expect("{")?;
        let mut stmts = Vec::new();
        while !self.is("}") {
            if matches!(self.peek().tok, Tok::Eof) {
                return Err(self.error("`}`"));
            }
            stmts.push(self.stmt()?);
        }
        let close = self.expect("}")?;
        Ok(Block {
            stmts,
            span: Span::new(open.start, close.end),
        })
    }

    fn local_var_rest(&mut self, start: usize, ty: TypeExpr) -> PResult<LocalVar> {
        let name = self.ident()?;
        let init = if self.eat("=") { Some(self.expr()?) } else { None };
        Ok(LocalVar {
            ty,
            name,
            init,
            span: Span::new(start, self.prev_end()),
        })
    }

    /// A type followed by an identifier starts a local variable declaration.
    fn try_local_type(&mut self) -> Option<TypeExpr> {
        self.attempt(|p| {
            let t = p.ty()?;
            Ok(p.at_ident().then_some(t))
        })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.peek().start;
        if self.is("{") {
            return Ok(Stmt::Block(self.block()?));
        }
        if self.eat(";") {
            return Ok(Stmt::Empty(Span::new(start, self.prev_end())));
        }
        if self.eat_kw("if") {
            self.expect("(")?;
            let cond = self.expr()?;
            self.expect(")")?;
            let then = Box::new(self.stmt()?);
            let els = if self.eat_kw("else") {
                Some(Box::new(self.stmt()?))
            } else {
                None
            };
            return Ok(Stmt::If {
                cond,
                then,
                els,
                span: Span::new(start, self.prev_end()),
            });
        }
        if self.eat_kw("while") {
            self.expect("(")?;
            let cond = self.expr()?;
            self.expect(")")?;
            let body = Box::new(self.stmt()?);
            return Ok(Stmt::While {
                cond,
                body,
                span: Span::new(start, self.prev_end()),
            });
        }
        if self.eat_kw("for") {
            return self.for_stmt(start);
        }
        if self.eat_kw("return") {
            let value = if self.is(";") { None } else { Some(self.expr()?) };
            self.expect(";")?;
            return Ok(Stmt::Return {
                value,
                span: Span::new(start, self.prev_end()),
            });
        }
        if self.eat_kw("break") {
            self.expect(";")?;
            return Ok(Stmt::Break(Span::new(start, self.prev_end())));
        }
        if self.eat_kw("continue") {
            self.expect(";")?;
            return Ok(Stmt::Continue(Span::new(start, self.prev_end())));
        }
        if let Some(ty) = self.try_local_type() {
            let mut var = self.local_var_rest(start, ty)?;
            self.expect(";")?;
            var.span.end = self.prev_end();
            return Ok(Stmt::Local(var));
        }
        let expr = self.expr()?;
        if !matches!(
            expr.kind,
            ExprKind::Assign { .. } | ExprKind::Invoke { .. } | ExprKind::New { .. }
        ) {
            return Err(self.error("assignment, call or object creation as statement, then `;`"));
        }
        self.expect(";")?;
        Ok(Stmt::Expr {
            expr,
            span: Span::new(start, self.prev_end()),
        })
    }

    fn for_stmt(&mut self, start: usize) -> PResult<Stmt> {
        self.expect("(")?;
        // Enhanced for: `for (Type name : expr)`.
        let foreach = self.attempt(|p| {
            let vstart = p.peek().start;
            let ty = p.ty()?;
            let name = p.ident()?;
            if !p.eat(":") {
                return Ok(None);
            }
            Ok(Some(LocalVar {
                span: Span::new(vstart, name.span.end),
                ty,
                name,
                init: None,
            }))
        });
        if let Some(var) = foreach {
            let iter = self.expr()?;
            self.expect(")")?;
            let body = Box::new(self.stmt()?);
            return Ok(Stmt::Foreach {
                var,
                iter,
                body,
                span: Span::new(start, self.prev_end()),
            });
        }
        let mut init = Vec::new();
        if !self.is(";") {
            let istart = self.peek().start;
            if let Some(ty) = self.try_local_type() {
                init.push(ForInit::Local(self.local_var_rest(istart, ty)?));
            } else {
                loop {
                    init.push(ForInit::Expr(self.expr()?));
                    if !self.eat(",") {
                        break;
                    }
                }
            }
        }
        self.expect(";")?;
        let cond = if self.is(";") { None } else { Some(self.expr()?) };
        self.expect(";")?;
        let mut update = Vec::new();
        if !self.is(")") {
            loop {
                update.push(self.expr()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        let body = Box::new(self.stmt()?);
        Ok(Stmt::For {
            init,
            cond,
            update,
            body,
            span: Span::new(start, self.prev_end()),
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let left = self.binary(0)?;
        if self.is("=") {
            let eq = self.peek().clone();
            if !matches!(left.kind, ExprKind::Name(_) | ExprKind::FieldAccess { .. }) {
                return Err(ParseError::new(eq.line, eq.column, "assignable expression before `=`"));
            }
            self.advance();
            let value = self.expr()?;
            return Ok(Expr {
                span: left.span.to(value.span),
                kind: ExprKind::Assign {
                    target: Box::new(left),
                    value: Box::new(value),
                },
            });
        }
        Ok(left)
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut left = self.unary()?;
        while let Some((op, prec)) = match &self.peek().tok {
            Tok::Punct(p) => binary_precedence(p)
                .filter(|&prec| prec >= min_prec)
                .map(|prec| (*p, prec)),
            _ => None,
        } {
            self.advance();
            let right = self.binary(prec + 1)?;
            left = Expr {
                span: left.span.to(right.span),
                kind: ExprKind::Binary {
                    op,
                    left: Box::new(left),
                    right: Box::new(right),
                },
            };
        }
        Ok(left)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let start = self.peek().start;
        for op in ["!", "-"] {
            if self.eat(op) {
                let operand = self.unary()?;
                return Ok(Expr {
                    span: Span::new(start, operand.span.end),
                    kind: ExprKind::Unary {
                        op,
                        operand: Box::new(operand),
                    },
                });
            }
        }
        if self.is("(") {
            let cast = self.attempt(|p| {
                p.advance();
                let ty = p.ty()?;
                p.expect(")")?;
                let primitive = matches!(ty, TypeExpr::Primitive { .. });
                let starts_operand = match p.peek_at(0) {
                    Tok::Ident(_) | Tok::Int(_) | Tok::Str(_) | Tok::Punct("(") | Tok::Punct("!") => true,
                    Tok::Punct("-") => primitive,
                    _ => false,
                };
                if !starts_operand {
                    return Ok(None);
                }
                let operand = p.unary()?;
                Ok(Some(Expr {
                    span: Span::new(start, operand.span.end),
                    kind: ExprKind::Cast {
                        ty,
                        operand: Box::new(operand),
                    },
                }))
            });
            if let Some(c) = cast {
                return Ok(c);
            }
        }
        self.postfix()
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect("(")?;
        let mut args = Vec::new();
        if !self.is(")") {
            loop {
                args.push(self.expr()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        Ok(args)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while self.eat(".") {
            let name = self.ident()?;
            if self.is("(") {
                let args = self.args()?;
                e = Expr {
                    span: Span::new(e.span.start, self.prev_end()),
                    kind: ExprKind::Invoke {
                        target: Some(Box::new(e)),
                        name,
                        args,
                    },
                };
            } else {
                e = Expr {
                    span: e.span.to(name.span),
                    kind: ExprKind::FieldAccess {
                        target: Box::new(e),
                        name,
                    },
                };
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let t = self.peek().clone();
        let span = Span::new(t.start, t.end);
        let simple = |kind| Ok(Expr { kind, span });
        match &t.tok {
            Tok::Int(v) => {
                self.advance();
                simple(ExprKind::Int(*v))
            }
            Tok::Str(s) => {
                self.advance();
                simple(ExprKind::Str(s.clone()))
            }
            Tok::Punct("(") => {
                self.advance();
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Tok::Ident(k) => match k.as_str() {
                "true" | "false" => {
                    self.advance();
                    simple(ExprKind::Bool(k == "true"))
                }
                "null" => {
                    self.advance();
                    simple(ExprKind::Null)
                }
                "this" => {
                    self.advance();
                    simple(ExprKind::This)
                }
                "new" => {
                    self.advance();
                    let ty = self.ty()?;
                    if !matches!(ty, TypeExpr::Named { .. }) {
                        return Err(self.error("class type after `new`"));
                    }
                    let args = self.args()?;
                    Ok(Expr {
                        span: Span::new(t.start, self.prev_end()),
                        kind: ExprKind::New { ty, args },
                    })
                }
                _ => {
                    let name = self.ident()?;
                    if self.is("(") {
                        let args = self.args()?;
                        return Ok(Expr {
                            span: Span::new(t.start, self.prev_end()),
                            kind: ExprKind::Invoke {
                                target: None,
                                name,
                                args,
                            },
                        });
                    }
                    Ok(Expr {
                        span: name.span,
                        kind: ExprKind::Name(name.name),
                    })
                }
            },
            _ => Err(self.error("expression")),
        }
    }
}

fn binary_precedence(op: &str) -> Option<u8> {
    Some(match op {
        "||" => 1,
        "&&" => 2,
        "==" | "!=" => 3,
        "<" | ">" | "<=" | ">=" => 4,
        "+" | "-" => 5,
        "*" | "/" | "%" => 6,
        _ => return None,
    })
}
