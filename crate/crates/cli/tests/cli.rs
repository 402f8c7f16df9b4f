use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn wtbc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wtbc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = wtbc(args);
    assert!(
        out.status.success(),
        "wtbc {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const DOCS: [&str; 6] = [
    "The cat sat on the mat.\n",
    "A dog, a cat and a bird.\n",
    "Birds sing; dogs bark; cats   sleep.\n",
    "Nothing in common here\n",
    "the the the cat\n",
    "dog\n",
];

struct Fixture {
    _dir: TempDir,
    corpus: PathBuf,
    plain: PathBuf,
    drb: PathBuf,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("docs");
    fs::create_dir(&corpus).unwrap();
    for (i, d) in DOCS.iter().enumerate() {
        fs::write(corpus.join(format!("{i:03}.txt")), d).unwrap();
    }
    let plain = dir.path().join("plain.idx");
    let drb = dir.path().join("drb.idx");
    ok(&["build", s(&corpus), s(&plain)]);
    ok(&["build", s(&corpus), s(&drb), "--drb", "--epsilon", "0"]);
    Fixture {
        _dir: dir,
        corpus,
        plain,
        drb,
    }
}

#[test]
fn build_is_deterministic() {
    let f = fixture();
    let again = f.plain.with_extension("again");
    let report = ok(&["build", s(&f.corpus), s(&again)]);
    assert!(report.contains("compression_ratio\t"));
    assert!(report.contains("build_seconds\t"));
    assert_eq!(fs::read(&f.plain).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn documents_concatenate_to_the_corpus() {
    let f = fixture();
    let mut all = String::new();
    for d in 1..=DOCS.len() {
        all += &ok(&["extract", s(&f.plain), "--doc", &d.to_string()]);
    }
    assert_eq!(all, DOCS.concat());
}

#[test]
fn engines_print_identical_rows() {
    let f = fixture();
    for mode in ["and", "or"] {
        for q in ["cat", "cat dog", "the cat mat", "bird dog zebra", "common"] {
            let dr = ok(&["query", s(&f.drb), q, "--mode", mode, "--algo", "dr", "-k", "10"]);
            let drb = ok(&["query", s(&f.drb), q, "--mode", mode, "--algo", "drb", "-k", "10"]);
            let oracle = ok(&[
                "query", s(&f.drb), q, "--mode", mode, "--algo", "oracle", "-k", "10", "--corpus", s(&f.corpus),
            ]);
            assert_eq!(dr, drb, "{mode} {q}");
            assert_eq!(dr, oracle, "{mode} {q}");
        }
    }
}

#[test]
fn query_output_format() {
    let f = fixture();
    let rows = ok(&["query", s(&f.plain), "dog", "-k", "5"]);
    let lines: Vec<&str> = rows.lines().collect();
    // "dog" is in documents 2 and 6, once each; ties go to the smaller id
    let score = format!("{:.6}", (6.0f64 / 2.0).ln());
    assert_eq!(lines, vec![format!("1\t2\t{score}"), format!("2\t6\t{score}")]);
    assert!(!rows.contains('\r'));

    assert_eq!(ok(&["query", s(&f.plain), "dog", "-k", "0"]), "");
    assert_eq!(ok(&["query", s(&f.plain), "dog zebra", "--mode", "and"]), "");
}

#[test]
fn drb_without_bitmaps_is_an_error() {
    let f = fixture();
    let out = wtbc(&["query", s(&f.plain), "cat", "--algo", "drb"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bitmaps"));
    let out = wtbc(&["query", s(&f.plain), "cat", "--algo", "oracle"]);
    assert!(!out.status.success());
}

#[test]
fn usage_errors() {
    let f = fixture();
    assert!(!wtbc(&["query", s(&f.plain), "cat", "--mode", "xor"]).status.success());
    assert!(!wtbc(&["extract", s(&f.plain), "--doc", "1", "--pos", "1..2"]).status.success());
    assert!(!wtbc(&["extract", s(&f.plain), "--doc", "99"]).status.success());
    assert!(!wtbc(&["extract", s(&f.plain), "--hit", "zebra,1"]).status.success());
    assert!(!wtbc(&["stats", "/nonexistent/index"]).status.success());
}

#[test]
fn snippet_on_the_textbook_sentence() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("one.txt");
    let index = dir.path().join("one.idx");
    fs::write(&input, "MAKE EVERYTHING AS SIMPLE AS POSSIBLE BUT NOT SIMPLER").unwrap();
    ok(&["build", s(&input), s(&index)]);
    assert_eq!(
        ok(&["extract", s(&index), "--hit", "BUT,1", "--window", "2"]),
        "AS POSSIBLE BUT NOT SIMPLER"
    );
    assert_eq!(ok(&["extract", s(&index), "--pos", "9..9"]), "SIMPLER");
    assert_eq!(ok(&["extract", s(&index), "--pos", "7..9"]), "BUT NOT SIMPLER");
    // the window is clipped at the document edges
    assert_eq!(
        ok(&["extract", s(&index), "--hit", "MAKE,1", "--window", "100"]),
        "MAKE EVERYTHING AS SIMPLE AS POSSIBLE BUT NOT SIMPLER"
    );
}

#[test]
fn delimited_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("all.txt");
    let index = dir.path().join("all.idx");
    fs::write(&input, "first doc\n##\nsecond doc\n##\nthird\n").unwrap();
    let report = ok(&["build", s(&input), s(&index), "--delimiter", "##"]);
    assert!(report.starts_with("documents\t3\n"));
    assert_eq!(ok(&["extract", s(&index), "--doc", "2"]), "second doc\n");
    let rows = ok(&[
        "query", s(&index), "doc", "--algo", "oracle", "--corpus", s(&input), "--delimiter", "##",
    ]);
    assert_eq!(rows, ok(&["query", s(&index), "doc"]));
}

#[test]
fn sentinel_collision_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("money.txt");
    fs::write(&input, "costs 5 $ today").unwrap();
    let out = wtbc(&["build", s(&input), s(&dir.path().join("x.idx"))]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("money.txt"), "{err}");
    ok(&["build", s(&input), s(&dir.path().join("x.idx")), "--sentinel", "\u{1}"]);
}

fn stat(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix('\t'))
        .unwrap_or_else(|| panic!("no {key} in {report}"))
        .parse()
        .unwrap()
}

#[test]
fn stats_sections_add_up() {
    let f = fixture();
    for (idx, bitmaps) in [(&f.plain, false), (&f.drb, true)] {
        let report = ok(&["stats", s(idx)]);
        let sections: f64 = ["header_bytes", "vocab_bytes", "tree_bytes", "bounds_bytes", "bitmap_bytes"]
            .iter()
            .map(|k| stat(&report, k))
            .sum();
        assert_eq!(sections, fs::metadata(idx).unwrap().len() as f64);
        assert_eq!(stat(&report, "file_bytes"), sections);
        assert_eq!(stat(&report, "documents"), 6.0);
        assert_eq!(stat(&report, "tokens") - stat(&report, "tokens_without_sentinels"), 6.0);
        assert_eq!(stat(&report, "s") + stat(&report, "c"), 256.0);
        assert_eq!(stat(&report, "bitmap_bytes") > 0.0, bitmaps);
    }
}

#[test]
fn stored_counters_load_the_same() {
    let f = fixture();
    let stored = f.plain.with_extension("stored");
    ok(&["build", s(&f.corpus), s(&stored), "--store-counters", "--block-size", "4"]);
    assert!(fs::metadata(&stored).unwrap().len() > fs::metadata(&f.plain).unwrap().len());
    assert_eq!(ok(&["query", s(&stored), "cat dog"]), ok(&["query", s(&f.plain), "cat dog"]));
    let a = ok(&["stats", s(&stored)]);
    let b = ok(&["stats", s(&f.plain)]);
    assert!(stat(&a, "cr_pct") > stat(&b, "cr_pct"));
}

#[test]
fn bench_writes_csv() {
    let f = fixture();
    let queries = f.plain.with_extension("queries");
    fs::write(&queries, "cat\n\ncat dog\nthe\n").unwrap();
    let csv = ok(&["bench", s(&f.drb), s(&queries), "--algo", "drb", "--repeat", "3", "-k", "2"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "query,n_words,mode,algo,k,mean_ms,results_count");
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("cat dog,2,or,drb,2,"));
    assert!(lines[2].ends_with(",2"));
    assert!(!wtbc(&["bench", s(&f.drb), "/nonexistent"]).status.success());
    assert!(!wtbc(&["bench", s(&f.drb), s(&queries), "--repeat", "0"]).status.success());
}
