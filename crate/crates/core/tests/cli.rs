use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn twosource(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twosource"))
        .args(args)
        .env_remove("TWOSOURCE_WORKERS")
        .output()
        .expect("run twosource")
}

fn stdout(args: &[&str]) -> String {
    let out = twosource(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn record(text: &str) -> Vec<(String, String)> {
    text.lines()
        .map(|l| {
            let (k, v) = l.split_once(',').unwrap();
            (k.to_owned(), v.to_owned())
        })
        .collect()
}

fn field(text: &str, key: &str) -> String {
    record(text).into_iter().find(|(k, _)| k == key).unwrap().1
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn bound_beats_guess_at_unit_separation() {
    let text = stdout(&["bound", "--scenario", "asymmetric", "--k", "1", "--q", "0.5", "--p1", "0.5"]);
    let e: f64 = field(&text, "e_min").parse().unwrap();
    assert!(e < 0.5 && e > 0.3, "{e}");
    assert_eq!(field(&text, "forbidden"), "false");
}

#[test]
fn bound_rejects_negative_separation() {
    let out = twosource(&["bound", "--scenario", "asymmetric", "--k", "-1", "--q", "0.5", "--p1", "0.5"]);
    assert!(!out.status.success());
    assert!(out.stdout.is_empty());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("k must be ≥ 0"), "{err}");
}

#[test]
fn bound_coincident_sources_are_forbidden() {
    let text = stdout(&["bound", "--scenario", "symmetric", "--k", "0", "--p1", "0.3", "--q", "0.5"]);
    assert_eq!(field(&text, "e_min"), "0.3");
    assert_eq!(field(&text, "forbidden"), "true");
}

#[test]
fn bound_multi_detection() {
    let one = stdout(&["bound", "--scenario", "symmetric", "--k", "1"]);
    let many = stdout(&["bound", "--scenario", "symmetric", "--k", "1", "--m", "50"]);
    let e1: f64 = field(&one, "e_min").parse().unwrap();
    let e50: f64 = field(&many, "e_min").parse().unwrap();
    assert_eq!(field(&many, "m"), "50");
    assert!(e50 < e1 / 10.0);
}

#[test]
fn advantage_tables_for_three_weightings() {
    for q in ["0.1", "0.5", "0.9"] {
        let text = stdout(&[
            "advantage", "--scenario", "asymmetric", "--q", q, "--axis", "k:0:2:5", "--axis", "p1:0.05:0.95:10",
        ]);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "scenario,q,k,p1,e_guess,e_min,advantage_pct,forbidden");
        let rows = rows(&text);
        assert_eq!(rows.len(), 50);
        let qf: f64 = q.parse().unwrap();
        for r in &rows {
            assert_eq!(r[0], "asymmetric");
            assert_eq!(r[1], q);
            let k: f64 = r[2].parse().unwrap();
            let p1: f64 = r[3].parse().unwrap();
            let forbidden = r[7] == "true";
            assert_eq!(forbidden, k == 0.0 || p1 <= qf / (1.0 + qf), "{r:?}");
            if forbidden {
                assert_eq!(r[6], "0");
                assert_eq!(r[4], r[5]);
            } else {
                assert!(r[6].parse::<f64>().unwrap() > 0.0);
            }
        }
    }
}

#[test]
fn json_mirrors_csv() {
    let args = ["chernoff", "--scenario", "symmetric", "--axis", "k:0:3:4", "--axis", "q:0.2:0.8:2"];
    let csv = stdout(&args);
    let json = stdout(&[&args[..], &["--format", "json"]].concat());
    let records: serde_json::Value = serde_json::from_str(&json).unwrap();
    let records = records.as_array().unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let rows = rows(&csv);
    assert_eq!(records.len(), rows.len());
    for (rec, row) in records.iter().zip(&rows) {
        let keys: Vec<&str> = rec.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, header);
        for (h, cell) in header.iter().zip(row) {
            match &rec[*h] {
                serde_json::Value::String(s) => assert_eq!(s, cell),
                v => assert_eq!(v.as_f64().unwrap(), cell.parse::<f64>().unwrap()),
            }
        }
    }
}

#[test]
fn chernoff_rows() {
    let text = stdout(&["chernoff", "--scenario", "symmetric", "--axis", "k:0:4:5", "--axis", "q:0.1:0.9:5"]);
    for r in rows(&text) {
        let k: f64 = r[2].parse().unwrap();
        let analytic: f64 = r[4].parse().unwrap();
        let numeric: f64 = r[3].parse().unwrap();
        assert!((analytic - k * k / 16.0).abs() < 1e-12);
        assert!((numeric - analytic).abs() < 1e-10);
        if k == 0.0 {
            assert_eq!(&r[3..], ["0", "0", "0", "0"]);
        }
    }
}

#[test]
fn minimal_m_examples() {
    let text = stdout(&[
        "minimal-m", "--scenario", "asymmetric", "--q", "0.5", "--k", "1", "--axis", "p1:0.2:0.5:4",
    ]);
    let m: Vec<String> = rows(&text).into_iter().map(|r| r[4].clone()).collect();
    // p1 = 0.2, 0.3 are one-shot forbidden; q^m < p1/(1-p1) gives m = 3, 2.
    assert_eq!(m, ["3", "2", "1", "1"]);
    let capped = stdout(&[
        "minimal-m", "--scenario", "asymmetric", "--q", "0.5", "--k", "1", "--axis", "p1:0.2:0.2:1", "--m-cap", "2",
    ]);
    assert_eq!(rows(&capped)[0][4], "-1");
}

#[test]
fn sliver_rows() {
    let text = stdout(&["sliver", "--scenario", "asymmetric", "--axis", "k:0:1:3"]);
    assert_eq!(
        text.lines().next().unwrap(),
        "scenario,k,pr_even_h2,pr_odd_h2,p_err_1shot,e_min_1shot,saturation,xi_sliver,xi_q"
    );
    let r = rows(&text);
    assert_eq!(&r[0][2..], ["1", "0", "0.5", "0.5", "1", "0", "0"]);
    let sat: f64 = r[2][6].parse().unwrap();
    assert!(sat > 0.84 && sat < 0.85);
}

#[test]
fn simulate_is_byte_identical() {
    let args = [
        "simulate", "--scenario", "symmetric", "--axis", "k:0.5:1.5:3", "--axis", "m:1:50:2", "--trials", "3000",
        "--seed", "9",
    ];
    let a = stdout(&args);
    let b = stdout(&args);
    assert_eq!(a, b);
    let one_worker = Command::new(env!("CARGO_BIN_EXE_twosource"))
        .args(args)
        .env("TWOSOURCE_WORKERS", "1")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(one_worker.stdout).unwrap(), a);
    for r in rows(&a) {
        assert_eq!(r[5], "0");
        assert_eq!(r[3], "3000");
        assert_eq!(r[4], "9");
    }
}

#[test]
fn config_file_with_flag_override() {
    let cfg = scratch("sweep.json");
    fs::write(
        &cfg,
        r#"{"scenario": "symmetric", "q": 0.3, "axis": ["k:0.5:1:2"], "format": "json", "m-cap": 5}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let json = stdout(&["advantage", "--config", cfg]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["q"], 0.3);
    let csv = stdout(&["advantage", "--config", cfg, "--format", "csv", "--q", "0.6"]);
    assert!(csv.lines().nth(1).unwrap().starts_with("symmetric,0.6,0.5,"));

    let bad = scratch("bad.json");
    fs::write(&bad, r#"{"colour": "blue"}"#).unwrap();
    assert!(!twosource(&["bound", "--config", bad.to_str().unwrap()]).status.success());
}

#[test]
fn output_file_and_unwritable_path() {
    let path = scratch("adv.csv");
    let text = stdout(&[
        "advantage", "--scenario", "symmetric", "--axis", "p1:0.1:0.9:3", "--k", "1", "--output", path.to_str().unwrap(),
    ]);
    assert!(text.is_empty());
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 4);

    let out = twosource(&[
        "advantage", "--scenario", "symmetric", "--axis", "p1:0.1:0.9:3", "--k", "1", "--output", "/nonexistent/dir/x.csv",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}

#[test]
fn usage_errors() {
    for args in [
        vec!["advantage", "--scenario", "symmetric", "--k", "1"],
        vec!["sliver", "--scenario", "symmetric", "--axis", "q:0:1:3"],
        vec!["bound", "--k", "1"],
        vec!["advantage", "--scenario", "symmetric", "--axis", "k:0:1:0"],
        vec!["bound", "--scenario", "symmetric", "--k", "1", "--workers", "0"],
    ] {
        let out = twosource(&args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn certify_record() {
    let text = stdout(&["certify", "--axis", "k:0.5:3:6", "--axis", "q:0.1:0.9:5", "--axis", "p1:0.1:0.9:5"]);
    assert_eq!(field(&text, "points"), "150");
    assert_eq!(field(&text, "certified"), "true");
}
