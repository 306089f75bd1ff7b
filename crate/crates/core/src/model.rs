//! The model value: core relations (containment, declarations, uses), the
//! Java layer (inheritance, overrides, invocations) and the declared-types
//! table, plus fusion and cross-project linking.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::loc::{SchemeRegistry, SourceLocation};
use crate::rel::Relation;
use crate::typesym::TypeSymbol;

pub const RELATION_NAMES: [&str; 6] = [
    "containment",
    "declarations",
    "uses",
    "inheritance",
    "overrides",
    "invocations",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("conflicting declared types for {loc}: {left} vs {right}")]
    DeclaredTypeConflict {
        loc: SourceLocation,
        left: TypeSymbol,
        right: TypeSymbol,
    },
    #[error("`{name}` declared under authorities `{left}` and `{right}`")]
    AmbiguousDeclaration { name: String, left: String, right: String },
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct M3Model {
    pub id: SourceLocation,
    /// `<contained, container>`
    pub containment: Relation,
    /// `<logical, physical>`
    pub declarations: Relation,
    /// `<using logical, used logical>`
    pub uses: Relation,
    /// `<subtype, supertype>`
    pub inheritance: Relation,
    /// `<overridden, overriding>`
    pub overrides: Relation,
    /// `<caller, statically resolved callee>`
    pub invocations: Relation,
    pub declared_types: BTreeMap<SourceLocation, TypeSymbol>,
}

/// One violated model invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub relation: &'static str,
    pub location: SourceLocation,
    pub message: String,
}

impl M3Model {
    pub fn empty(id: SourceLocation) -> Self {
        M3Model {
            id,
            containment: Relation::new(),
            declarations: Relation::new(),
            uses: Relation::new(),
            inheritance: Relation::new(),
            overrides: Relation::new(),
            invocations: Relation::new(),
            declared_types: BTreeMap::new(),
        }
    }

    pub fn relation(&self, name: &str) -> Result<&Relation, ModelError> {
        Ok(match name {
            "containment" => &self.containment,
            "declarations" => &self.declarations,
            "uses" => &self.uses,
            "inheritance" => &self.inheritance,
            "overrides" => &self.overrides,
            "invocations" => &self.invocations,
            other => return Err(ModelError::UnknownRelation(other.to_string())),
        })
    }

    pub fn relation_mut(&mut self, name: &str) -> Result<&mut Relation, ModelError> {
        Ok(match name {
            "containment" => &mut self.containment,
            "declarations" => &mut self.declarations,
            "uses" => &mut self.uses,
            "inheritance" => &mut self.inheritance,
            "overrides" => &mut self.overrides,
            "invocations" => &mut self.invocations,
            other => return Err(ModelError::UnknownRelation(other.to_string())),
        })
    }

    /// `(name, relation)` for all six relations, in canonical order.
    pub fn relations(&self) -> [(&'static str, &Relation); 6] {
        [
            ("containment", &self.containment),
            ("declarations", &self.declarations),
            ("uses", &self.uses),
            ("inheritance", &self.inheritance),
            ("overrides", &self.overrides),
            ("invocations", &self.invocations),
        ]
    }

    /// Equality of everything but the id.
    pub fn relation_eq(&self, other: &M3Model) -> bool {
        self.relations() == other.relations() && self.declared_types == other.declared_types
    }

    /// Pointwise union; conflicting declared types are an error.
    pub fn compose(&self, other: &M3Model, id: SourceLocation) -> Result<M3Model, ModelError> {
        let mut declared_types = self.declared_types.clone();
        for (loc, ty) in &other.declared_types {
            match declared_types.get(loc) {
                Some(existing) if existing != ty => {
                    return Err(ModelError::DeclaredTypeConflict {
                        loc: loc.clone(),
                        left: existing.clone(),
                        right: ty.clone(),
                    })
                }
                Some(_) => {}
                None => {
                    declared_types.insert(loc.clone(), ty.clone());
                }
            }
        }
        Ok(M3Model {
            id,
            containment: self.containment.union(&other.containment),
            declarations: self.declarations.union(&other.declarations),
            uses: self.uses.union(&other.uses),
            inheritance: self.inheritance.union(&other.inheritance),
            overrides: self.overrides.union(&other.overrides),
            invocations: self.invocations.union(&other.invocations),
            declared_types,
        })
    }

    /// Rebinds logical locations to the authority of whichever operand
    /// declares them, then fuses.
    pub fn link(&self, other: &M3Model, id: SourceLocation) -> Result<M3Model, ModelError> {
        let mut index: HashMap<(String, Vec<String>), String> = HashMap::new();
        for m in [self, other] {
            for d in m.declarations.domain() {
                let key = (d.scheme().to_string(), d.path().to_vec());
                match index.get(&key) {
                    Some(auth) if auth != d.authority() => {
                        return Err(ModelError::AmbiguousDeclaration {
                            name: format!("{}:{}", key.0, d.path_string()),
                            left: auth.clone(),
                            right: d.authority().to_string(),
                        })
                    }
                    Some(_) => {}
                    None => {
                        index.insert(key, d.authority().to_string());
                    }
                }
            }
        }
        let rebind = |l: &SourceLocation| -> SourceLocation {
            // Physical locations never share a scheme with a declared logical one.
            match index.get(&(l.scheme().to_string(), l.path().to_vec())) {
                Some(auth) if auth != l.authority() => l.with_authority(auth),
                _ => l.clone(),
            }
        };
        let a = self.map_locations(&rebind);
        let b = other.map_locations(&rebind);
        a.compose(&b, id)
    }

    /// Applies `f` to every location in every relation and in the types table.
    /// The id is left unchanged.
    pub fn map_locations(&self, f: &dyn Fn(&SourceLocation) -> SourceLocation) -> M3Model {
        let declared_types = self
            .declared_types
            .iter()
            .map(|(k, v)| (f(k), v.map_locations(&mut |l| f(l))))
            .collect();
        M3Model {
            id: self.id.clone(),
            containment: self.containment.map(f),
            declarations: self.declarations.map(f),
            uses: self.uses.map(f),
            inheritance: self.inheritance.map(f),
            overrides: self.overrides.map(f),
            invocations: self.invocations.map(f),
            declared_types,
        }
    }

    /// Checks the logical/physical placement invariants and that each logical
    /// location is declared at most once.
    pub fn validate(&self, registry: &SchemeRegistry) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut check =
            |relation: &'static str, loc: &SourceLocation, want_logical: bool| match registry.is_logical(loc) {
                Ok(is) if is == want_logical => {}
                Ok(_) => out.push(Violation {
                    relation,
                    location: loc.clone(),
                    message: if want_logical {
                        "expected a logical location".into()
                    } else {
                        "expected a physical location".into()
                    },
                }),
                Err(e) => out.push(Violation {
                    relation,
                    location: loc.clone(),
                    message: e.to_string(),
                }),
            };
        for (name, rel) in self.relations() {
            for (a, b) in rel {
                check(name, a, true);
                check(name, b, name != "declarations");
            }
        }
        for k in self.declared_types.keys() {
            check("types", k, true);
        }
        let mut seen: HashMap<&SourceLocation, usize> = HashMap::new();
        for (a, _) in &self.declarations {
            *seen.entry(a).or_default() += 1;
        }
        let mut multi: Vec<_> = seen.into_iter().filter(|(_, n)| *n > 1).collect();
        multi.sort();
        for (loc, n) in multi {
            out.push(Violation {
                relation: "declarations",
                location: loc.clone(),
                message: format!("declared at {n} physical locations"),
            });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loc(s: &str) -> SourceLocation {
        SourceLocation::parse(s).unwrap()
    }

    fn sample(auth: &str) -> M3Model {
        let mut m = M3Model::empty(loc("|file:///p|"));
        let bar = loc(&format!("|java+class://{auth}/foo/Bar|"));
        m.containment = m
            .containment
            .with(bar.clone(), loc(&format!("|java+package://{auth}/foo|")));
        m.declarations = m.declarations.with(bar.clone(), loc("|file:///p/foo/Bar.java|(0,10)"));
        m.declared_types.insert(
            bar.clone(),
            TypeSymbol::Class {
                decl: bar,
                args: vec![],
            },
        );
        m
    }

    #[test]
    fn empty_model_is_fusion_identity() {
        let e = M3Model::empty(loc("|file:///p|"));
        assert!(e.containment.is_empty());
        let m = sample("A");
        assert!(e.compose(&m, loc("|file:///q|")).unwrap().relation_eq(&m));
        assert!(m.compose(&e, loc("|file:///q|")).unwrap().relation_eq(&m));
    }

    #[test]
    fn relation_by_name() {
        let m = sample("A");
        assert_eq!(m.relation("inheritance").unwrap(), &m.inheritance);
        assert_eq!(m.relation("flow"), Err(ModelError::UnknownRelation("flow".into())));
    }

    #[test]
    fn declared_type_conflict() {
        let a = sample("A");
        let mut b = sample("A");
        let bar = loc("|java+class://A/foo/Bar|");
        b.declared_types.insert(bar, TypeSymbol::int());
        assert!(matches!(
            a.compose(&b, loc("|file:///x|")),
            Err(ModelError::DeclaredTypeConflict { .. })
        ));
    }

    #[test]
    fn link_rewrites_to_declaring_authority() {
        let mut a = M3Model::empty(loc("|file:///a|"));
        let user = loc("|java+method://projA/app/Main/run()|");
        a.declarations = a.declarations.with(user.clone(), loc("|file:///a/Main.java|(0,5)"));
        a.uses = a.uses.with(user.clone(), loc("|java+class://projA/java/util/List|"));
        a.declared_types.insert(
            user.clone(),
            TypeSymbol::Method {
                decl: user.clone(),
                ret: Box::new(TypeSymbol::Class {
                    decl: loc("|java+class://projA/java/util/List|"),
                    args: vec![],
                }),
                params: vec![],
            },
        );
        let mut b = M3Model::empty(loc("|file:///b|"));
        let list = loc("|java+class://projB/java/util/List|");
        b.declarations = b.declarations.with(list.clone(), loc("|file:///b/List.java|(0,9)"));

        let linked = a.link(&b, loc("|file:///ab|")).unwrap();
        assert!(linked.uses.contains(&user, &list));
        let ty = &linked.declared_types[&user];
        assert_eq!(ty.to_string().matches("projB").count(), 1);
        assert_eq!(linked.id, loc("|file:///ab|"));

        let alone = a.link(&M3Model::empty(loc("|file:///e|")), loc("|file:///e|")).unwrap();
        assert!(alone.relation_eq(&a));
    }

    #[test]
    fn link_ambiguity() {
        let a = sample("A");
        let b = sample("B");
        assert!(matches!(
            a.link(&b, loc("|file:///x|")),
            Err(ModelError::AmbiguousDeclaration { .. })
        ));
    }

    #[test]
    fn validator_flags_misplaced_locations() {
        let reg = SchemeRegistry::default();
        let m = sample("A");
        assert!(m.validate(&reg).is_empty());
        let mut bad = m.clone();
        bad.uses = bad.uses.with(loc("|file:///x|"), loc("|java+class://A/x|"));
        bad.declarations = bad
            .declarations
            .with(loc("|java+class://A/foo/Bar|"), loc("|file:///other|(1,1)"));
        let v = bad.validate(&reg);
        assert_eq!(v.len(), 2, "{v:?}");
    }
}
