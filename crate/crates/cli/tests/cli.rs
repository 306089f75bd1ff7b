use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data")
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(data().join("golden").join(name)).unwrap()
}

fn m3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_m3")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Extracts `dir` as project `name` into `out`.
fn extract(dir: &Path, name: &str, out: &Path) -> Output {
    m3(&[
        "extract",
        path(dir),
        "--authority",
        name,
        "--project",
        name,
        "-o",
        path(out),
    ])
}

#[test]
fn extract_corpus_matches_golden() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("corpus.m3");
    let o = extract(&data().join("corpus"), "corpus", &out);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), golden("corpus.m3"));

    let o = m3(&[
        "extract",
        path(&data().join("corpus")),
        "--authority",
        "corpus",
        "--project",
        "corpus",
    ]);
    assert_eq!(stdout(&o), golden("corpus.m3"));
}

#[test]
fn extract_exit_codes() {
    let o = m3(&["extract", "/definitely/not/here", "--authority", "x"]);
    assert_eq!(code(&o), 2);

    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("Broken.java"), "class Broken {").unwrap();
    std::fs::write(tmp.path().join("Fine.java"), "class Fine {}").unwrap();
    let o = m3(&["extract", path(tmp.path()), "--authority", "x"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).starts_with("error file:///"), "{}", stderr(&o));
    assert!(stdout(&o).contains("|java+class://x/Fine|"));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&m3(&[])), 64);
    assert_eq!(code(&m3(&["compose", "only-one.m3"])), 64);
    assert_eq!(code(&m3(&["metric", "m.m3", "bogus"])), 64);
    assert_eq!(code(&m3(&["--help"])), 0);

    let model = data().join("golden/corpus.m3");
    let o = m3(&["query", path(&model), "uses", "not a location"]);
    assert_eq!(code(&o), 64);
}

#[test]
fn query_images() {
    let model = data().join("golden/corpus.m3");
    let o = m3(&[
        "query",
        path(&model),
        "inheritance",
        "|java+class://corpus/app/Square|",
        "--closure",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "|java+class://corpus/shapes/Rect|\n\
         |java+interface://corpus/shapes/Named|\n\
         |java+interface://corpus/shapes/Shape|\n\
         |java+interface://corpus/shapes/Sized|\n"
    );
    let o = m3(&[
        "query",
        path(&model),
        "overrides",
        "|java+method://corpus/app/Square/area()|",
        "--inverse",
    ]);
    assert_eq!(
        stdout(&o),
        "|java+method://corpus/shapes/Rect/area()|\n|java+method://corpus/shapes/Shape/area()|\n"
    );
    let o = m3(&["query", path(&model), "flow", "|java+class://corpus/app/Square|"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("unknown relation `flow`"));
}

#[test]
fn compose_and_link() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a.m3"), tmp.path().join("b.m3"));
    assert_eq!(code(&extract(&data().join("link/projA"), "projA", &a)), 0);
    assert_eq!(code(&extract(&data().join("link/projB"), "projB", &b)), 0);

    let linked = tmp.path().join("linked.m3");
    let o = m3(&["link", path(&a), path(&b), "-o", path(&linked)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(&linked).unwrap();
    assert!(text.starts_with(&format!("m3 |file://{}|", path(&linked))));
    assert!(text.contains("<|java+class://projA/app/Client|,|java+class://projB/java/util/List|>"));

    let o = m3(&["compose", path(&a), path(&b)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("m3 |unknown:///|"));
    assert!(stdout(&o).contains("<|java+class://projA/app/Client|,|java+class://projA/java/util/List|>"));

    let o = m3(&["compose", path(&a), path(&tmp.path().join("missing.m3"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn metrics() {
    let tmp = tempfile::tempdir().unwrap();
    let chain = tmp.path().join("chain.m3");
    assert_eq!(code(&extract(&data().join("chain"), "chain", &chain)), 0);
    let o = m3(&["metric", path(&chain), "dit"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "subject,value\n|java+class://chain/chain/A|,0\n|java+class://chain/chain/B|,1\n|java+class://chain/chain/C|,2\n"
    );

    let corpus = data().join("golden/corpus.m3");
    let src = data().join("corpus");
    let o = m3(&["metric", path(&corpus), "cc", "--src", path(&src)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), golden("cc.csv"));

    let o = m3(&[
        "metric",
        path(&corpus),
        "volume",
        "--src",
        path(&src),
        "--format",
        "table",
    ]);
    assert!(stdout(&o)
        .lines()
        .any(|l| l.starts_with("|project://corpus|") && l.ends_with(" 87")));

    // Sources are needed for cc.
    let o = m3(&["metric", path(&corpus), "cc", "--src", path(tmp.path())]);
    assert_eq!(code(&o), 2);

    let a = tmp.path().join("a.m3");
    extract(&data().join("link/projA"), "projA", &a);
    let o = m3(&["metric", path(&a), "dit"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning: incomplete hierarchy"));
}

#[test]
fn ast_dump() {
    let corpus = data().join("golden/corpus.m3");
    let src = data().join("corpus");
    let o = m3(&[
        "ast",
        path(&corpus),
        "|java+method://corpus/shapes/Rect/area()|",
        "--src",
        path(&src),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), golden("rect_area.ast"));

    let o = m3(&[
        "ast",
        path(&corpus),
        "|java+method://corpus/shapes/Rect/nope()|",
        "--src",
        path(&src),
    ]);
    assert_eq!(code(&o), 1);
}
