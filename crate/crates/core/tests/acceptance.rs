//! Acceptance suite: runs every criterion and prints one PASS/FAIL line each.
//! Exits non-zero when any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use m3::extract::{extract_file, extract_sources, parse_file};
use m3::metrics::{self, concrete_callees, cyclomatic_complexity, depth_of_inheritance, fan_out};
use m3::serial::{read_model, write_model};
use m3::source::{FsResolver, SourceResolver};
use m3::{M3Model, Relation, SourceLocation};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn within(start: Instant, limit: Duration) -> Outcome {
    let took = start.elapsed();
    if took <= limit {
        Ok(format!("{:.2}s", took.as_secs_f64()))
    } else {
        Err(format!("took {:.2}s, limit {}s", took.as_secs_f64(), limit.as_secs()))
    }
}

fn location_round_trip() -> Outcome {
    let start = Instant::now();
    runner(10_000)
        .run(&arb_location(), |l| {
            let printed = l.to_string();
            let back = SourceLocation::parse(&printed)
                .map_err(|e| proptest::test_runner::TestCaseError::fail(e.to_string()))?;
            proptest::prop_assert_eq!(&back, &l);
            proptest::prop_assert_eq!(back.to_string(), printed);
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    let hello = loc("|file:///tmp/Hello.java|");
    assert_eq!(
        (hello.scheme(), hello.authority(), hello.path()),
        ("file", "", &["tmp".to_string(), "Hello.java".to_string()][..])
    );
    assert!(hello.query().is_empty() && hello.region().is_none());
    let list = loc("|java+class://myProject/java/util/List|");
    assert_eq!(
        (list.scheme(), list.authority(), list.path()),
        (
            "java+class",
            "myProject",
            &["java".to_string(), "util".to_string(), "List".to_string()][..]
        )
    );
    let pinned = loc("|class://myPrj/java/util/List?svn=4242|");
    assert_eq!(
        pinned.query(),
        &BTreeMap::from([("svn".to_string(), "4242".to_string())])
    );
    within(start, Duration::from_secs(5))
}

/// Closure by iterating `r ∪ r∘r` over plain index pairs until stable.
fn fixpoint_oracle(pairs: &BTreeSet<(String, String)>) -> BTreeSet<(String, String)> {
    let mut acc = pairs.clone();
    loop {
        let mut next = acc.clone();
        for (a, b) in &acc {
            for (c, d) in &acc {
                if b == c {
                    next.insert((a.clone(), d.clone()));
                }
            }
        }
        if next == acc {
            return acc;
        }
        acc = next;
    }
}

fn as_strings(r: &Relation) -> BTreeSet<(String, String)> {
    r.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

fn relation_algebra() -> Outcome {
    let start = Instant::now();
    let strategy = (arb_relation(20, 12), arb_relation(20, 12), arb_relation(20, 12));
    runner(500)
        .run(&strategy, |(r, s, t)| {
            proptest::prop_assert_eq!(as_strings(&r.transitive_closure()), fixpoint_oracle(&as_strings(&r)));
            proptest::prop_assert_eq!(r.compose(&s).compose(&t), r.compose(&s.compose(&t)));
            proptest::prop_assert_eq!(r.union(&s), s.union(&r));
            proptest::prop_assert_eq!(r.union(&s).union(&t), r.union(&s.union(&t)));
            proptest::prop_assert_eq!(r.union(&r), r.clone());
            proptest::prop_assert_eq!(r.union(&Relation::new()), r.clone());
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    within(start, Duration::from_secs(10))
}

fn golden_corpus() -> Outcome {
    let (result, _) = corpus();
    let written = write_model(&result.model);
    if written != golden("corpus.m3") {
        return Err("extracted model differs from golden corpus.m3".into());
    }
    if !result.diagnostics.is_empty() {
        return Err(format!("unexpected diagnostics: {:?}", result.diagnostics));
    }
    let m = &result.model;
    // <contained, container>
    assert!(m.containment.contains(
        &loc("|java+class://corpus/shapes/Rect|"),
        &loc("|java+package://corpus/shapes|")
    ));
    // <overridden, overriding>
    assert!(m.overrides.contains(
        &loc("|java+method://corpus/shapes/Shape/area()|"),
        &loc("|java+method://corpus/shapes/Rect/area()|")
    ));
    // Calls through an interface stay on the interface method.
    let total = loc("|java+method://corpus/app/Main/total(Shape%5B%5D)|");
    assert_eq!(
        m.invocations.image(&total),
        BTreeSet::from([loc("|java+method://corpus/shapes/Shape/area()|")])
    );
    Ok(format!("{} bytes identical", written.len()))
}

fn concrete_callee_idiom() -> Outcome {
    let (result, _) = corpus();
    let m = &result.model;
    let mut oracle = BTreeSet::new();
    for (caller, callee) in &m.invocations {
        for (overridden, overriding) in &m.overrides {
            if callee == overridden {
                oracle.insert((caller.clone(), overriding.clone()));
            }
        }
    }
    let got: BTreeSet<_> = concrete_callees(m).iter().cloned().collect();
    let mismatches = got.symmetric_difference(&oracle).count();
    if mismatches != 0 {
        return Err(format!("{mismatches} mismatches"));
    }
    let expected: BTreeSet<(SourceLocation, SourceLocation)> = [
        ("app/Main/total(Shape%5B%5D)", "shapes/Rect/area()"),
        ("app/Main/total(Shape%5B%5D)", "app/Square/area()"),
        ("app/Main/describe()", "shapes/Rect/name()"),
        ("app/Main/describe()", "shapes/Rect/area()"),
        ("app/Main/describe()", "app/Square/area()"),
        ("shapes/Rect/size()", "app/Square/area()"),
    ]
    .iter()
    .map(|(a, b)| {
        (
            loc(&format!("|java+method://corpus/{a}|")),
            loc(&format!("|java+method://corpus/{b}|")),
        )
    })
    .collect();
    assert_eq!(got, expected);
    Ok(format!("{} concrete callees, 0 mismatches", got.len()))
}

fn fusion_algebra() -> Outcome {
    let (result, resolver) = corpus();
    let root = project("corpus");
    let mut rng = StdRng::seed_from_u64(7);
    let mut parts = result.file_models.clone();
    for _ in 0..10 {
        parts.shuffle(&mut rng);
        let fused = parts
            .iter()
            .try_fold(M3Model::empty(root.clone()), |acc, m| acc.compose(m, root.clone()))
            .map_err(|e| e.to_string())?;
        if !fused.relation_eq(&result.model) {
            return Err("a fold order disagrees with whole-directory extraction".into());
        }
    }
    // Discovery order does not matter either.
    let mut sources: Vec<(SourceLocation, String)> = resolver
        .list_java_files(&root)
        .unwrap()
        .into_iter()
        .map(|f| {
            let t = resolver.read(&f).unwrap();
            (f, t)
        })
        .collect();
    sources.reverse();
    assert!(extract_sources(&root, "corpus", sources)
        .model
        .relation_eq(&result.model));

    let ms = &result.file_models;
    for a in ms {
        for b in ms {
            let ab = a.compose(b, root.clone()).unwrap();
            let ba = b.compose(a, root.clone()).unwrap();
            assert!(ab.relation_eq(&ba));
            for c in ms {
                let left = ab.compose(c, root.clone()).unwrap();
                let right = a.compose(&b.compose(c, root.clone()).unwrap(), root.clone()).unwrap();
                assert!(left.relation_eq(&right));
            }
        }
    }
    Ok(format!("10 fold orders, {} file models", ms.len()))
}

/// Location with the authority blanked out.
fn sans_authority(l: &SourceLocation) -> SourceLocation {
    l.with_authority("")
}

fn link_semantics() -> Outcome {
    let dir = data_dir().join("link");
    let (a, _) = extract_project(&dir.join("projA"), "projA");
    let (b, _) = extract_project(&dir.join("projB"), "projB");
    let id = loc("|file:///linked.m3|");
    let linked = a.model.link(&b.model, id.clone()).map_err(|e| e.to_string())?;
    let plain = a.model.compose(&b.model, id).map_err(|e| e.to_string())?;

    let declared_in = |m: &M3Model| -> BTreeSet<(String, Vec<String>)> {
        m.declarations
            .domain()
            .iter()
            .map(|d| (d.scheme().to_string(), d.path().to_vec()))
            .collect()
    };
    let (in_a, in_b) = (declared_in(&a.model), declared_in(&b.model));
    let mut checked = 0;
    for (user, used) in &linked.uses {
        let key = (used.scheme().to_string(), used.path().to_vec());
        let owner = if user.authority() == "projA" { &in_b } else { &in_a };
        if owner.contains(&key) {
            let want = if user.authority() == "projA" { "projB" } else { "projA" };
            if used.authority() != want {
                return Err(format!("{used} used by {user} was not rebound to {want}"));
            }
            checked += 1;
        }
    }
    if checked == 0 {
        return Err("fixture has no cross-project uses".into());
    }
    for ((name, l), (_, p)) in linked.relations().iter().zip(plain.relations().iter()) {
        if l.map(sans_authority) != p.map(sans_authority) {
            return Err(format!("{name}: a component other than the authority changed"));
        }
    }
    let keys = |m: &M3Model| -> BTreeSet<SourceLocation> { m.declared_types.keys().map(sans_authority).collect() };
    assert_eq!(keys(&linked), keys(&plain));
    assert!(linked.uses.contains(
        &loc("|java+class://projA/app/Client|"),
        &loc("|java+class://projB/java/util/List|")
    ));
    Ok(format!("{checked} cross-project uses rebound"))
}

fn metric_oracles() -> Outcome {
    let (result, resolver) = corpus();
    let m = &result.model;
    let cc = |s: &str| cyclomatic_complexity(m, &loc(s), &resolver).unwrap();
    assert_eq!(cc("|java+method://corpus/shapes/Rect/area()|"), 1);
    assert_eq!(cc("|java+method://corpus/app/Main/describe()|"), 1);
    assert_eq!(cc("|java+method://corpus/app/Main/total(Shape%5B%5D)|"), 3);
    assert_eq!(cc("|java+method://corpus/app/Main/countDown(int%2Cboolean)|"), 4);

    let (chain, _) = extract_project(&data_dir().join("chain"), "chain");
    let dit: Vec<u64> = ["A", "B", "C"]
        .iter()
        .map(|t| {
            depth_of_inheritance(&chain.model, &loc(&format!("|java+class://chain/chain/{t}|")))
                .unwrap()
                .depth
        })
        .collect();
    assert_eq!(dit, [0, 1, 2]);

    // `total` calls `s.area()` at two sites.
    let total = loc("|java+method://corpus/app/Main/total(Shape%5B%5D)|");
    let tree = m3::ast::get_ast(m, &total, &resolver).unwrap();
    assert_eq!(tree.visit_count(|n| n.constructor == "invoke"), 2);
    assert_eq!(fan_out(m, &total), 1);

    let volume = metrics::volume(m, &resolver).unwrap();
    let hand = [
        ("app/Main.java", 39),
        ("shapes/Named.java", 4),
        ("shapes/Rect.java", 22),
        ("shapes/Shape.java", 8),
        ("util/Box.java", 14),
    ];
    for (f, n) in hand {
        assert_eq!(volume.value(&loc(&format!("|project://corpus/{f}|"))), Some(n), "{f}");
    }
    assert_eq!(volume.value(&m.id), Some(87));
    Ok("cc 1/1/3/4, dit 0/1/2, fan-out 1, volume 87".into())
}

fn pre_post_fusion() -> Outcome {
    let (result, resolver) = corpus();
    let main = loc("|project://corpus/app/Main.java|");
    let text = resolver.read(&main).unwrap();
    let alone = extract_file(&parse_file(&text, main).unwrap(), "corpus");
    let square = loc("|java+class://corpus/app/Square|");
    let before = depth_of_inheritance(&alone.model, &square).unwrap();
    let after = depth_of_inheritance(&result.model, &square).unwrap();
    if before.incomplete != vec![loc("|java+class://corpus/shapes/Rect|")] {
        return Err(format!(
            "expected an incomplete-hierarchy warning, got {:?}",
            before.incomplete
        ));
    }
    if !after.incomplete.is_empty() || before.depth > after.depth {
        return Err(format!("per-file {} vs fused {}", before.depth, after.depth));
    }

    let by_file = |f: &str| result.file_models.iter().find(|m| m.id == loc(f)).unwrap().clone();
    let a = by_file("|project://corpus/shapes/Rect.java|");
    let b = by_file("|project://corpus/util/Box.java|");
    let total = |m: &M3Model| metrics::volume(m, &resolver).unwrap().value(&m.id).unwrap();
    let fused = a.compose(&b, loc("|file:///fused|")).unwrap();
    assert_eq!(total(&fused), total(&a) + total(&b));
    Ok(format!(
        "dit per-file {} <= fused {}; volume {} = {} + {}",
        before.depth,
        after.depth,
        total(&fused),
        total(&a),
        total(&b)
    ))
}

fn serialization() -> Outcome {
    let (chain, _) = extract_project(&data_dir().join("chain"), "chain");
    for text in [golden("corpus.m3"), write_model(&chain.model)] {
        let m = read_model(&text).map_err(|e| e.to_string())?;
        if write_model(&m) != text {
            return Err("golden does not survive a read/write cycle".into());
        }
    }
    runner(200)
        .run(&arb_model(), |m| {
            let text = write_model(&m);
            proptest::prop_assert_eq!(&text, &write_model(&m));
            let back = read_model(&text).map_err(|e| proptest::test_runner::TestCaseError::fail(e.to_string()))?;
            proptest::prop_assert_eq!(back, m);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("goldens + 200 generated models".into())
}

fn stability() -> Outcome {
    let (result, _) = corpus();
    let tmp = tempfile::tempdir().unwrap();
    let moved = tmp.path().join("elsewhere/deeper");
    copy_tree(&corpus_dir(), &moved);
    let root = SourceLocation::new(
        "file",
        "",
        moved.components().filter_map(|c| match c {
            std::path::Component::Normal(s) => Some(s.to_string_lossy().into_owned()),
            _ => None,
        }),
    )
    .unwrap();
    let again = m3::extract::extract_directory(&root, "corpus", &FsResolver::new(None)).unwrap();
    let (a, b) = (&result.model, &again.model);
    if a.declarations == b.declarations {
        return Err("physical locations did not change".into());
    }
    if a.declarations.domain() != b.declarations.domain() {
        return Err("declared logical locations changed".into());
    }
    for ((name, x), (_, y)) in a.relations().iter().zip(b.relations().iter()) {
        if *name != "declarations" && x != y {
            return Err(format!("{name} changed"));
        }
    }
    if a.declared_types != b.declared_types {
        return Err("declared types changed".into());
    }
    Ok(format!("{} declarations re-rooted", b.declarations.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("location round trip", location_round_trip),
        ("relation algebra", relation_algebra),
        ("golden corpus", golden_corpus),
        ("concrete-callee idiom", concrete_callee_idiom),
        ("fusion algebra", fusion_algebra),
        ("link semantics", link_semantics),
        ("metric oracles", metric_oracles),
        ("pre/post-fusion behavior", pre_post_fusion),
        ("serialization", serialization),
        ("stability under re-rooting", stability),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
