//! Symbolic type values. Declared entities are referenced by their logical
//! locations, so a symbol such as
//! `class(|class:///java/util/List|,[class(|class:///java/lang/String|,[])])`
//! can be compared, substituted and linked without the defining source.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::loc::{parse_prefix, SourceLocation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Primitive {
    Int,
    Boolean,
    Str,
    Void,
}

impl Primitive {
    pub fn name(self) -> &'static str {
        match self {
            Primitive::Int => "int",
            Primitive::Boolean => "boolean",
            Primitive::Str => "str",
            Primitive::Void => "void",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "int" => Primitive::Int,
            "boolean" => Primitive::Boolean,
            "str" => Primitive::Str,
            "void" => Primitive::Void,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeSymbol {
    Class {
        decl: SourceLocation,
        args: Vec<TypeSymbol>,
    },
    Interface {
        decl: SourceLocation,
        args: Vec<TypeSymbol>,
    },
    Method {
        decl: SourceLocation,
        ret: Box<TypeSymbol>,
        params: Vec<TypeSymbol>,
    },
    Primitive(Primitive),
    Array(Box<TypeSymbol>),
    TypeParameter(SourceLocation),
    Unresolved(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed type symbol at byte {position}: {message}")]
pub struct MalformedTypeSymbol {
    pub position: usize,
    pub message: String,
}

/// Substitution from type-parameter locations to symbols.
pub type Binding = BTreeMap<SourceLocation, TypeSymbol>;

impl TypeSymbol {
    pub fn int() -> Self {
        TypeSymbol::Primitive(Primitive::Int)
    }

    pub fn boolean() -> Self {
        TypeSymbol::Primitive(Primitive::Boolean)
    }

    pub fn str() -> Self {
        TypeSymbol::Primitive(Primitive::Str)
    }

    pub fn void() -> Self {
        TypeSymbol::Primitive(Primitive::Void)
    }

    pub fn array(elem: TypeSymbol) -> Self {
        TypeSymbol::Array(Box::new(elem))
    }

    pub fn unresolved(name: impl Into<String>) -> Self {
        TypeSymbol::Unresolved(name.into())
    }

    /// The declaring location for class, interface, method and type-parameter symbols.
    pub fn decl(&self) -> Option<&SourceLocation> {
        match self {
            TypeSymbol::Class { decl, .. }
            | TypeSymbol::Interface { decl, .. }
            | TypeSymbol::Method { decl, .. }
            | TypeSymbol::TypeParameter(decl) => Some(decl),
            _ => None,
        }
    }

    pub fn type_args(&self) -> &[TypeSymbol] {
        match self {
            TypeSymbol::Class { args, .. } | TypeSymbol::Interface { args, .. } => args,
            _ => &[],
        }
    }

    pub fn is_unresolved(&self) -> bool {
        matches!(self, TypeSymbol::Unresolved(_))
    }

    /// Structural substitution of type-parameter leaves; unbound parameters stay.
    pub fn instantiate(&self, binding: &Binding) -> TypeSymbol {
        if binding.is_empty() {
            return self.clone();
        }
        let all = |ts: &[TypeSymbol]| ts.iter().map(|t| t.instantiate(binding)).collect();
        match self {
            TypeSymbol::Class { decl, args } => TypeSymbol::Class {
                decl: decl.clone(),
                args: all(args),
            },
            TypeSymbol::Interface { decl, args } => TypeSymbol::Interface {
                decl: decl.clone(),
                args: all(args),
            },
            TypeSymbol::Method { decl, ret, params } => TypeSymbol::Method {
                decl: decl.clone(),
                ret: Box::new(ret.instantiate(binding)),
                params: all(params),
            },
            TypeSymbol::Array(e) => TypeSymbol::array(e.instantiate(binding)),
            TypeSymbol::TypeParameter(p) => binding.get(p).cloned().unwrap_or_else(|| self.clone()),
            TypeSymbol::Primitive(_) | TypeSymbol::Unresolved(_) => self.clone(),
        }
    }

    /// Rewrites every embedded location.
    pub fn map_locations(&self, f: &mut dyn FnMut(&SourceLocation) -> SourceLocation) -> TypeSymbol {
        match self {
            TypeSymbol::Class { decl, args } => TypeSymbol::Class {
                decl: f(decl),
                args: args.iter().map(|a| a.map_locations(f)).collect(),
            },
            TypeSymbol::Interface { decl, args } => TypeSymbol::Interface {
                decl: f(decl),
                args: args.iter().map(|a| a.map_locations(f)).collect(),
            },
            TypeSymbol::Method { decl, ret, params } => TypeSymbol::Method {
                decl: f(decl),
                ret: Box::new(ret.map_locations(f)),
                params: params.iter().map(|p| p.map_locations(f)).collect(),
            },
            TypeSymbol::Array(e) => TypeSymbol::array(e.map_locations(f)),
            TypeSymbol::TypeParameter(p) => TypeSymbol::TypeParameter(f(p)),
            TypeSymbol::Primitive(_) | TypeSymbol::Unresolved(_) => self.clone(),
        }
    }

    /// Visits every embedded location, outermost first.
    pub fn for_each_location(&self, f: &mut dyn FnMut(&SourceLocation)) {
        if let Some(d) = self.decl() {
            f(d);
        }
        match self {
            TypeSymbol::Class { args, .. } | TypeSymbol::Interface { args, .. } => {
                args.iter().for_each(|a| a.for_each_location(f))
            }
            TypeSymbol::Method { ret, params, .. } => {
                ret.for_each_location(f);
                params.iter().for_each(|p| p.for_each_location(f));
            }
            TypeSymbol::Array(e) => e.for_each_location(f),
            _ => {}
        }
    }

    pub fn parse(text: &str) -> Result<TypeSymbol, MalformedTypeSymbol> {
        let mut p = SymbolParser { text, pos: 0 };
        let sym = p.symbol()?;
        if p.pos != text.len() {
            return Err(p.error("trailing text"));
        }
        Ok(sym)
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[TypeSymbol]) -> fmt::Result {
    f.write_str("[")?;
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{t}")?;
    }
    f.write_str("]")
}

impl fmt::Display for TypeSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeSymbol::Class { decl, args } => {
                write!(f, "class({decl},")?;
                write_list(f, args)?;
                f.write_str(")")
            }
            TypeSymbol::Interface { decl, args } => {
                write!(f, "interface({decl},")?;
                write_list(f, args)?;
                f.write_str(")")
            }
            TypeSymbol::Method { decl, ret, params } => {
                write!(f, "method({decl},{ret},")?;
                write_list(f, params)?;
                f.write_str(")")
            }
            TypeSymbol::Primitive(p) => write!(f, "{}()", p.name()),
            TypeSymbol::Array(e) => write!(f, "array({e})"),
            TypeSymbol::TypeParameter(d) => write!(f, "typeParameter({d})"),
            TypeSymbol::Unresolved(name) => {
                f.write_str("unresolved(\"")?;
                for c in name.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\")")
            }
        }
    }
}

struct SymbolParser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> SymbolParser<'a> {
    fn error(&self, message: impl Into<String>) -> MalformedTypeSymbol {
        MalformedTypeSymbol {
            position: self.pos,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn expect(&mut self, token: &str) -> Result<(), MalformedTypeSymbol> {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    fn location(&mut self) -> Result<SourceLocation, MalformedTypeSymbol> {
        let rest = self.rest();
        let (loc, after) = parse_prefix(rest).map_err(|e| self.error(e.to_string()))?;
        self.pos += rest.len() - after.len();
        Ok(loc)
    }

    fn list(&mut self) -> Result<Vec<TypeSymbol>, MalformedTypeSymbol> {
        self.expect("[")?;
        let mut items = Vec::new();
        if self.rest().starts_with(']') {
            self.pos += 1;
            return Ok(items);
        }
        loop {
            items.push(self.symbol()?);
            if self.rest().starts_with(',') {
                self.pos += 1;
            } else {
                self.expect("]")?;
                return Ok(items);
            }
        }
    }

    fn symbol(&mut self) -> Result<TypeSymbol, MalformedTypeSymbol> {
        let name_len = self
            .rest()
            .find(|c: char| !c.is_ascii_alphabetic())
            .unwrap_or(self.rest().len());
        let name = &self.rest()[..name_len];
        if name.is_empty() {
            return Err(self.error("expected constructor name"));
        }
        self.pos += name_len;
        self.expect("(")?;
        let sym = match name {
            "class" | "interface" => {
                let decl = self.location()?;
                self.expect(",")?;
                let args = self.list()?;
                if name == "class" {
                    TypeSymbol::Class { decl, args }
                } else {
                    TypeSymbol::Interface { decl, args }
                }
            }
            "method" => {
                let decl = self.location()?;
                self.expect(",")?;
                let ret = Box::new(self.symbol()?);
                self.expect(",")?;
                let params = self.list()?;
                TypeSymbol::Method { decl, ret, params }
            }
            "array" => TypeSymbol::array(self.symbol()?),
            "typeParameter" => TypeSymbol::TypeParameter(self.location()?),
            "unresolved" => TypeSymbol::Unresolved(self.string()?),
            other => match Primitive::from_name(other) {
                Some(p) => TypeSymbol::Primitive(p),
                None => return Err(self.error(format!("unknown constructor `{other}`"))),
            },
        };
        self.expect(")")?;
        Ok(sym)
    }

    fn string(&mut self) -> Result<String, MalformedTypeSymbol> {
        self.expect("\"")?;
        let mut out = String::new();
        let mut chars = self.rest().char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.pos += i + 1;
                    return Ok(out);
                }
                '\\' => match chars.next() {
                    Some((_, e @ ('"' | '\\'))) => out.push(e),
                    _ => return Err(self.error("bad escape in string")),
                },
                c => out.push(c),
            }
        }
        Err(self.error("unterminated string"))
    }
}
