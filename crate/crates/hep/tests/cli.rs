use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hep"))
        .args(args)
        .output()
        .expect("run hep")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn five_edge(dir: &Path) -> PathBuf {
    let txt = dir.join("g.txt");
    std::fs::write(&txt, "0 1\n0 2\n1 2\n2 3\n3 4\n").unwrap();
    let bin = dir.join("g.bin");
    let out = hep(&["convert", "-i", s(&txt), "-o", s(&bin)]);
    assert!(out.status.success());
    bin
}

fn stats_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn five_edge_example_has_rf_1_2() {
    let dir = tempfile::tempdir().unwrap();
    let g = five_edge(dir.path());
    let a = dir.path().join("a.hep");
    let st = dir.path().join("s.json");
    let out = hep(&[
        "partition",
        "-i",
        s(&g),
        "-k",
        "2",
        "--tau",
        "inf",
        "-o",
        s(&a),
        "--stats",
        s(&st),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stats_json(&st);
    assert_eq!(doc["replication_factor"], 1.2);
    assert_eq!(doc["tau"], "inf");
    assert_eq!(doc["sizes"], serde_json::json!([3, 2]));
    assert!(doc["timings"]["total_s"].is_number());
    let mem = &doc["hep"]["memory"];
    assert_eq!(mem["measured_column_bytes"], mem["estimated_column_bytes"]);

    let out = hep(&["validate", "-i", s(&g), "-a", s(&a)]);
    assert!(out.status.success());

    let out = hep(&["stats", "-a", s(&a), "-i", s(&g)]);
    assert!(out.status.success());
    let again: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(again["replication_factor"], 1.2);
    assert_eq!(again["num_edges"], 5);
}

#[test]
fn tampered_assignment_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let g = five_edge(dir.path());
    let a = dir.path().join("a.hep");
    assert!(hep(&["partition", "-i", s(&g), "-k", "2", "-o", s(&a)])
        .status
        .success());
    let mut bytes = std::fs::read(&a).unwrap();
    // first record's u
    bytes[28] = 9;
    std::fs::write(&a, &bytes).unwrap();
    let out = hep(&["validate", "-i", s(&g), "-a", s(&a)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alien 1"));

    // drop the last record but keep the header count
    bytes.truncate(bytes.len() - 12);
    std::fs::write(&a, &bytes).unwrap();
    let out = hep(&["validate", "-i", s(&g), "-a", s(&a)]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let g = five_edge(dir.path());
    let a = dir.path().join("a.hep");

    let out = hep(&["plan-tau", "-i", s(&g), "-k", "2", "--memory", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let out = hep(&[
        "partition",
        "-i",
        s(&g),
        "-k",
        "2",
        "--tau",
        "auto",
        "--memory",
        "64",
        "-o",
        s(&a),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.path().join("missing.bin");
    assert_eq!(
        hep(&["partition", "-i", s(&missing), "-k", "2", "-o", s(&a)])
            .status
            .code(),
        Some(3)
    );

    let bad = dir.path().join("bad.bin");
    std::fs::write(&bad, [0u8; 21]).unwrap();
    let out = hep(&["partition", "-i", s(&bad), "-k", "2", "-o", s(&a)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte offset 16"));

    assert_eq!(
        hep(&["partition", "-i", s(&g), "-k", "0", "-o", s(&a)]).status.code(),
        Some(64)
    );
    assert_eq!(
        hep(&["partition", "-i", s(&g), "-k", "2", "--tau", "auto", "-o", s(&a)])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(
        hep(&["partition", "-i", s(&g), "-k", "2", "--alpha", "0.5", "-o", s(&a)])
            .status
            .code(),
        Some(64)
    );
    assert!(hep(&["--help"]).status.success());
}

#[test]
fn plan_tau_prints_table_and_choice() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("pruned.bin");
    let edges: Vec<(u32, u32)> = vec![
        (4, 5),
        (0, 4),
        (1, 4),
        (2, 4),
        (3, 5),
        (5, 6),
        (7, 5),
        (5, 8),
        (0, 7),
        (1, 2),
        (3, 6),
    ];
    hep::write_edge_list(&g, edges).unwrap();
    let out = hep(&["plan-tau", "-i", s(&g), "-k", "2", "--memory", "272"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("max_low_degree\ttau\tcolumn_entries\tbytes"));
    assert!(text.contains("\t13\t272\n"), "{text}");
    assert!(text.contains("chosen tau 1.6"), "{text}");
    assert!(text.contains("planning time"));
}

#[test]
fn spill_file_retention() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.bin");
    assert!(hep(&[
        "gen",
        "--shape",
        "power-law",
        "-n",
        "500",
        "-m",
        "3000",
        "--seed",
        "1",
        "-o",
        s(&g)
    ])
    .status
    .success());
    let a = dir.path().join("a.hep");
    let spill = dir.path().join("h2h.bin");
    let st = dir.path().join("s.json");
    let run = |keep: bool| {
        let mut args = vec![
            "partition",
            "-i",
            s(&g),
            "-k",
            "4",
            "--tau",
            "1",
            "-o",
            s(&a),
            "--spill",
            s(&spill),
            "--stats",
            s(&st),
        ];
        if keep {
            args.push("--keep-spill");
        }
        assert!(hep(&args).status.success());
    };
    run(false);
    assert!(!spill.exists());
    run(true);
    let spilled = stats_json(&st)["hep"]["spilled_edges"].as_u64().unwrap();
    assert!(spilled > 0);
    assert_eq!(std::fs::metadata(&spill).unwrap().len(), spilled * 8);
    assert!(hep(&["validate", "-i", s(&g), "-a", s(&a)]).status.success());
}

#[test]
fn reference_mode_matches_unpruned_hep() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.bin");
    assert!(
        hep(&["gen", "--shape", "grid", "--width", "9", "--height", "7", "-o", s(&g)])
            .status
            .success()
    );
    let a = dir.path().join("a.hep");
    let b = dir.path().join("b.hep");
    assert!(hep(&["partition", "-i", s(&g), "-k", "3", "--tau", "inf", "-o", s(&a)])
        .status
        .success());
    assert!(hep(&[
        "partition",
        "-i",
        s(&g),
        "-k",
        "3",
        "--mode",
        "reference-ne",
        "-o",
        s(&b)
    ])
    .status
    .success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn baselines_and_wide_ids() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.bin");
    let gen = hep(&[
        "gen",
        "--shape",
        "uniform",
        "-n",
        "300",
        "-m",
        "2000",
        "--id-bytes",
        "8",
        "-o",
        s(&g),
    ]);
    assert!(gen.status.success());
    assert_eq!(std::fs::metadata(&g).unwrap().len(), 2000 * 16);
    for mode in ["hep", "random", "degree-hash", "reference-ne"] {
        let a = dir.path().join(format!("{mode}.hep"));
        let st = dir.path().join(format!("{mode}.json"));
        let out = hep(&[
            "partition",
            "-i",
            s(&g),
            "-k",
            "8",
            "--tau",
            "1",
            "--id-bytes",
            "8",
            "--mode",
            mode,
            "--debug",
            "-o",
            s(&a),
            "--stats",
            s(&st),
        ]);
        assert!(out.status.success(), "{mode}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(hep(&["validate", "-i", s(&g), "-a", s(&a)]).status.success(), "{mode}");
        let doc = stats_json(&st);
        assert_eq!(doc["id_bytes"], 8);
        assert_eq!(doc["num_edges"], 2000);
    }
    let hep_doc = stats_json(&dir.path().join("hep.json"));
    assert_eq!(hep_doc["hep"]["sealed_core_reads"], 0);
}
