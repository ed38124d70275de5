//! End-to-end tests of the command-line interface and its exit codes.

use std::process::{Command, Output};

fn stbc(dir: &std::path::Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stbc"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

#[test]
fn construct_then_verify_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec![
            "construct",
            "--family",
            "ag",
            "--g",
            "2",
            "--n",
            "6",
            "--out",
            "ag.json",
        ],
        vec![
            "construct",
            "--family",
            "ag",
            "--g",
            "3",
            "--n",
            "12",
            "--out",
            "ag3.json",
        ],
        vec![
            "construct",
            "--family",
            "ag-stacked",
            "--g",
            "3",
            "--n",
            "4",
            "--out",
            "st.json",
        ],
        vec![
            "construct",
            "--family",
            "fgd",
            "--n",
            "4",
            "--r",
            "5/4",
            "--out",
            "fgd.json",
        ],
        vec![
            "construct",
            "--family",
            "fgd",
            "--n",
            "8",
            "--r",
            "1",
            "--out",
            "fgd1.json",
        ],
        vec![
            "construct",
            "--family",
            "dast",
            "--n",
            "5",
            "--out",
            "dast.json",
        ],
        vec![
            "construct",
            "--family",
            "fd",
            "--n",
            "6",
            "--r",
            "2",
            "--out",
            "fd.json",
        ],
        vec![
            "construct",
            "--family",
            "fd",
            "--n",
            "4",
            "--r",
            "2",
            "--base",
            "fgd",
            "--out",
            "fdb.json",
        ],
        vec![
            "construct",
            "--family",
            "fd",
            "--n",
            "8",
            "--r",
            "2",
            "--base",
            "ag",
            "--g",
            "2",
            "--out",
            "fdp.json",
        ],
        vec![
            "construct",
            "--family",
            "fd",
            "--n",
            "8",
            "--r",
            "1",
            "--out",
            "fd1.json",
        ],
    ] {
        let out = stbc(dir.path(), &args);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let file = args.last().unwrap();
        let verify = stbc(dir.path(), &["verify", "--in", file]);
        assert_eq!(verify.status.code(), Some(0), "{file} failed verification");
        let text = String::from_utf8_lossy(&verify.stdout);
        assert!(text.contains("overall: PASS"), "{text}");
    }
}

#[test]
fn verify_flags_bad_declarations_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    // Declare the wrong partition on the coordinate-interleaved preset.
    let src = stbc_core::catalog::preset("ciod2").unwrap();
    let wrong = stbc_core::Design::new(
        "ciod2-wrong",
        2,
        2,
        src.weights().to_vec(),
        stbc_core::GroupStructure::flat(vec![vec![0, 2], vec![1, 3]]),
        Default::default(),
    )
    .unwrap();
    let path = dir.path().join("wrong.json");
    stbc_core::design::save(&wrong, &path).unwrap();
    let out = stbc(dir.path(), &["verify", "--in", "wrong.json"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("violating pair"), "{text}");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    // Unknown flag.
    let out = stbc(dir.path(), &["construct", "--nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    // Invalid antenna count for the requested family.
    let out = stbc(
        dir.path(),
        &[
            "construct",
            "--family",
            "ag",
            "--g",
            "4",
            "--n",
            "6",
            "--out",
            "x.json",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n >= g"));
    // Rates are exact fractions, not floats.
    let out = stbc(
        dir.path(),
        &[
            "construct",
            "--family",
            "fd",
            "--n",
            "4",
            "--r",
            "1.5",
            "--out",
            "x.json",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    // Missing input file.
    let out = stbc(dir.path(), &["verify", "--in", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_exhaustion_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = stbc(
        dir.path(),
        &[
            "construct",
            "--family",
            "fgd",
            "--n",
            "8",
            "--out",
            "big.json",
        ],
    );
    assert!(out.status.success());
    let out = stbc(
        dir.path(),
        &[
            "diversify",
            "--in",
            "big.json",
            "--q",
            "4",
            "--pool",
            "integers",
            "--budget",
            "10",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn analyze_matches_published_cells() {
    let dir = tempfile::tempdir().unwrap();
    let out = stbc(dir.path(), &["analyze", "--n", "6", "--r", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("exponent 6.5"), "{text}");
    assert!(text.contains("F_2AG"), "{text}");

    let out = stbc(
        dir.path(),
        &["analyze", "--n", "4", "--r", "5/4", "--csv", "p.csv"],
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("p.csv")).unwrap();
    assert!(csv.contains("4,5,4,1.5,F_FGD,base,10,10"), "{csv}");
}

#[test]
fn tables_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    for which in ["1", "2", "3"] {
        let out = stbc(
            dir.path(),
            &["tables", "--which", which, "--out-dir", "reports"],
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let grid = std::fs::read_to_string(dir.path().join("reports/table_exponents.csv")).unwrap();
    assert_eq!(grid.lines().count(), 55, "header plus 54 cells");
    assert!(grid.contains("10,10,1,86.5,F_2AG,extended,200,52"));
    let cmp = std::fs::read_to_string(dir.path().join("reports/table_comparison.txt")).unwrap();
    assert!(cmp.contains("12.5") && cmp.contains("14.5"));
    let rates = std::fs::read_to_string(dir.path().join("reports/table_rates.txt")).unwrap();
    assert!(rates.contains("N=12: 5/4") || rates.contains("5/4"));
}

#[test]
fn diversify_then_simulate_uses_stored_scalings() {
    let dir = tempfile::tempdir().unwrap();
    let out = stbc(
        dir.path(),
        &[
            "construct",
            "--family",
            "fgd",
            "--n",
            "2",
            "--out",
            "d.json",
        ],
    );
    assert!(out.status.success());
    let out = stbc(dir.path(), &["diversify", "--in", "d.json", "--q", "2"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(dir.path().join("d.json")).unwrap();
    assert!(
        text.contains("\"pam\""),
        "scalings stored in the design file"
    );
    // The file still loads and verifies.
    let out = stbc(dir.path(), &["verify", "--in", "d.json"]);
    assert_eq!(out.status.code(), Some(0));
    let out = stbc(
        dir.path(),
        &[
            "simulate", "--in", "d.json", "--q", "2", "--n-rx", "1", "--snr", "0:10:20",
            "--trials", "2000", "--seed", "3", "--out", "ber.csv",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("ber.csv")).unwrap();
    assert!(csv.starts_with("snr_db,ber,bits,frame_errors,frames"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn simulate_accepts_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = stbc(
        dir.path(),
        &[
            "construct",
            "--family",
            "fgd",
            "--n",
            "2",
            "--out",
            "d.json",
        ],
    );
    assert!(out.status.success());
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"q": 2, "n_rx": 2, "snr_db_grid": [0.0, 8.0], "trials_per_point": 1500, "seed": 11, "decoder": "structured"}"#,
    )
    .unwrap();
    let out = stbc(
        dir.path(),
        &[
            "simulate", "--in", "d.json", "--config", "cfg.json", "--out", "ber.csv",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("ber.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}
