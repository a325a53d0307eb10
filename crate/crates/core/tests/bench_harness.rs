use selfidx::bench::{run_bench, BenchConfig};
use selfidx::IndexKind;

#[test]
fn synthetic_run_with_validation_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let cfg = BenchConfig::parse(&format!(
        "# small smoke run\n\
         text = synth:markov:20000:8\n\
         kinds = ssa, af, fmi2, csa, lz\n\
         params = s_a=8,k_max=2,lb=128,lsb=8\n\
         count_m = 6\ncount_patterns = 50\n\
         locate_m = 3\nlocate_patterns = 20\n\
         extract_len = 64\nextract_count = 10\n\
         reps = 5\nthreads = 2\nseed = 5\nvalidate = true\n\
         csv = {}\n",
        csv.display()
    ))
    .unwrap();
    let report = run_bench(&cfg).unwrap();
    assert_eq!(report.rows.len(), 5);
    for row in &report.rows {
        assert_eq!(row.mismatches, 0, "{}", row.index);
        assert_eq!(row.text_len, 20000);
        assert!(row.space_fraction > 0.0);
        assert!(row.occ_total > 0);
        if row.index != IndexKind::Lz {
            assert!(row.max_locate_steps <= 8, "{}", row.index);
        }
    }
    let table = report.table();
    assert!(table.lines().count() >= 6);
    let written = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(written.lines().count(), 6);
}

#[test]
fn prebuilt_index_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let text_path = dir.path().join("t.txt");
    let text = selfidx::synth::generate("uniform", 5000, 4, 1).unwrap();
    std::fs::write(&text_path, &text).unwrap();
    let ix_path = dir.path().join("t.csa");
    selfidx::AnyIndex::build(IndexKind::Csa, &text, &Default::default())
        .unwrap()
        .save(&ix_path)
        .unwrap();
    let cfg = BenchConfig::parse(&format!(
        "text = {}\nindex = {}\ncount_m = 4\ncount_patterns = 20\nlocate_patterns = 5\nextract_count = 5\nvalidate = yes\n",
        text_path.display(),
        ix_path.display()
    ))
    .unwrap();
    let report = run_bench(&cfg).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.rows[0].index, IndexKind::Csa);
    assert_eq!(report.rows[0].mismatches, 0);
}

#[test]
fn config_errors() {
    assert!(BenchConfig::parse("reps = 2").is_err());
    assert!(BenchConfig::parse("threads = 0").is_err());
    assert!(BenchConfig::parse("colour = blue").is_err());
    assert!(BenchConfig::parse("text = synth:markov:10").is_err());
    assert!(BenchConfig::parse("kinds = ssa, suffixtree").is_err());
}
