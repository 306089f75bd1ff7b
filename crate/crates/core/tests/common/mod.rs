//! Fixtures and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use m3::extract::{extract_directory, DirectoryExtraction};
use m3::loc::Region;
use m3::source::FsResolver;
use m3::{M3Model, Relation, SourceLocation, TypeSymbol};
use proptest::prelude::*;

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn corpus_dir() -> PathBuf {
    data_dir().join("corpus")
}

pub fn golden(name: &str) -> String {
    std::fs::read_to_string(data_dir().join("golden").join(name)).unwrap()
}

pub fn loc(s: &str) -> SourceLocation {
    SourceLocation::parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn project(name: &str) -> SourceLocation {
    SourceLocation::new("project", name, Vec::<String>::new()).unwrap()
}

/// Extracts `dir` as `project://<name>` with authority `name`.
pub fn extract_project(dir: &Path, name: &str) -> (DirectoryExtraction, FsResolver) {
    let resolver = FsResolver::new(Some(dir.to_path_buf()));
    let result = extract_directory(&project(name), name, &resolver).unwrap();
    (result, resolver)
}

pub fn corpus() -> (DirectoryExtraction, FsResolver) {
    extract_project(&corpus_dir(), "corpus")
}

/// Copies a directory tree.
pub fn copy_tree(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for entry in std::fs::read_dir(from).unwrap() {
        let path = entry.unwrap().path();
        let target = to.join(path.file_name().unwrap());
        if path.is_dir() {
            copy_tree(&path, &target);
        } else {
            std::fs::copy(&path, &target).unwrap();
        }
    }
}

const SEGMENT: &str = "[a-zA-Z0-9 ._~()%&=|/?<>,#+é中-]{0,6}";

pub fn arb_location() -> impl Strategy<Value = SourceLocation> {
    let scheme = prop_oneof![
        prop::sample::select(vec!["file", "project", "java+class", "java+method", "class", "cwd"])
            .prop_map(String::from),
        "[a-z][a-z0-9+.-]{0,8}",
    ];
    (
        scheme,
        SEGMENT,
        prop::collection::vec(SEGMENT, 0..4),
        prop::collection::btree_map("[a-z&=|]{1,4}", SEGMENT, 0..3),
        prop::option::of((0u64..100_000, 0u64..100_000)),
    )
        .prop_map(|(scheme, auth, path, query, region)| {
            let mut l = SourceLocation::new(&scheme, &auth, path).unwrap();
            for (k, v) in query {
                l = l.with_query(&k, &v);
            }
            match region {
                Some((o, n)) => l.with_region(Region::new(o, n)),
                None => l,
            }
        })
}

/// Locations drawn from a small pool so that relations share elements.
pub fn arb_node(pool: usize) -> impl Strategy<Value = SourceLocation> {
    (0..pool).prop_map(|i| SourceLocation::new("java+class", "p", [format!("N{i}")]).unwrap())
}

pub fn arb_relation(max_pairs: usize, pool: usize) -> impl Strategy<Value = Relation> {
    prop::collection::vec((arb_node(pool), arb_node(pool)), 0..=max_pairs).prop_map(|pairs| pairs.into_iter().collect())
}

fn arb_logical() -> impl Strategy<Value = SourceLocation> {
    (
        prop::sample::select(vec!["java+class", "java+interface", "java+method", "java+field"]),
        prop::sample::select(vec!["a", "b"]),
        prop::collection::vec("[A-Za-z(),]{1,5}", 1..3),
    )
        .prop_map(|(s, a, p)| SourceLocation::new(s, a, p).unwrap())
}

pub fn arb_typesym() -> impl Strategy<Value = TypeSymbol> {
    let leaf = prop_oneof![
        Just(TypeSymbol::int()),
        Just(TypeSymbol::boolean()),
        Just(TypeSymbol::str()),
        Just(TypeSymbol::void()),
        "[ -~é]{0,5}".prop_map(TypeSymbol::unresolved),
        arb_logical().prop_map(TypeSymbol::TypeParameter),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (arb_logical(), prop::collection::vec(inner.clone(), 0..3))
                .prop_map(|(decl, args)| TypeSymbol::Class { decl, args }),
            (arb_logical(), prop::collection::vec(inner.clone(), 0..3))
                .prop_map(|(decl, args)| TypeSymbol::Interface { decl, args }),
            (arb_logical(), inner.clone(), prop::collection::vec(inner.clone(), 0..3)).prop_map(
                |(decl, ret, params)| TypeSymbol::Method {
                    decl,
                    ret: Box::new(ret),
                    params
                }
            ),
            inner.prop_map(TypeSymbol::array),
        ]
    })
}

fn arb_pairs() -> impl Strategy<Value = Relation> {
    prop::collection::vec((arb_logical(), arb_logical()), 0..6).prop_map(|v| v.into_iter().collect())
}

pub fn arb_model() -> impl Strategy<Value = M3Model> {
    let physical = (arb_location(), 0u64..500, 0u64..50).prop_map(|(l, o, n)| {
        SourceLocation::new("file", l.authority(), l.path().to_vec())
            .unwrap()
            .with_region(Region::new(o, n))
    });
    (
        arb_location(),
        prop::collection::vec(arb_pairs(), 5..=5),
        prop::collection::vec((arb_logical(), physical), 0..5),
        prop::collection::btree_map(arb_logical(), arb_typesym(), 0..4),
    )
        .prop_map(|(id, rels, decls, types): (_, Vec<Relation>, Vec<_>, BTreeMap<_, _>)| {
            let mut m = M3Model::empty(id);
            m.containment = rels[0].clone();
            m.uses = rels[1].clone();
            m.inheritance = rels[2].clone();
            m.overrides = rels[3].clone();
            m.invocations = rels[4].clone();
            m.declarations = decls.into_iter().collect();
            m.declared_types = types;
            m
        })
}
