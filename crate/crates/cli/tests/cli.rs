use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selfidx")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn build_and_query_every_kind() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("t.txt");
    std::fs::write(&text, "abracadabra").unwrap();
    for kind in ["plain_sa", "ssa", "af", "fmi2", "csa", "lz"] {
        let out = dir.path().join(kind);
        stdout(&run(&["build", "-i", kind, "-p", "s_a=4,k_max=1", p(&text), p(&out)]));
        assert_eq!(stdout(&run(&["query", "locate", p(&out), "abra"])), "1\n8\n");
        assert_eq!(stdout(&run(&["query", "count", p(&out), "a", "cad", "zz"])), "5\n1\n0\n");
        assert_eq!(stdout(&run(&["query", "extract", p(&out), "4", "7"])), "acad\n");
    }
}

#[test]
fn stats_table() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("t.txt");
    std::fs::write(&text, "aabb").unwrap();
    let s = stdout(&run(&["stats", p(&text), "-k", "1"]));
    assert!(s.contains("size\t4"));
    assert!(s.contains("sigma\t2"));
    assert!(s.contains("0\t1.000\t1"));
    assert!(s.contains("1\t0.500\t2"));
}

#[test]
fn bench_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.cfg");
    std::fs::write(
        &cfg,
        "text = synth:uniform:3000:4\nkinds = ssa,csa\ncount_m = 4\ncount_patterns = 20\n\
         locate_patterns = 5\nextract_count = 5\nvalidate = true\n",
    )
    .unwrap();
    let s = stdout(&run(&["bench", p(&cfg)]));
    assert!(s.contains("ssa") && s.contains("csa"));
}

#[test]
fn selftest_passes() {
    let s = stdout(&run(&["selftest", "-n", "8"]));
    assert!(s.starts_with("selftest: 8 trials ok"));
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bogus = dir.path().join("bogus");
    std::fs::write(&bogus, "not an index").unwrap();
    assert!(!run(&["query", "count", p(&bogus), "a"]).status.success());
    assert!(!run(&["build", "-i", "suffixtree", p(&bogus), p(&bogus)]).status.success());
    assert!(!run(&["build", "-i", "ssa", "-p", "s_a=0", p(&bogus), p(&dir.path().join("o"))]).status.success());
}
