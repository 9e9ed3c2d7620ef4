use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nli(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nli"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("running nli")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = r#"{
  "spans": [
    {"length_km": 100, "nf_db": 5,
     "fiber": {"alpha_db_per_km": 0.2, "beta2_ps2_per_km": -21.27, "beta3_ps3_per_km": 0.1431, "gamma_per_W_km": 1.3}},
    {"length_km": 90, "nf_db": 5.5,
     "fiber": {"alpha_db_per_km": 0.2, "beta2_ps2_per_km": -21.27, "beta3_ps3_per_km": 0.1431, "gamma_per_W_km": 1.3}}
  ],
  "channels": [
    {"f_THz": 193.35, "rate_GBaud": 32, "rolloff": 0.1, "format": "PM-16QAM", "power_dBm": 0},
    {"f_THz": 193.40, "rate_GBaud": 32, "rolloff": 0.1, "format": "PM-QPSK", "power_dBm": 0},
    {"f_THz": 193.45, "rate_GBaud": 32, "rolloff": 0.1, "format": "PM-64QAM", "power_dBm": 1}
  ],
  "cut_index": 1
}
"#;

#[test]
fn estimate_writes_one_row_per_channel() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.json"), SMALL).unwrap();
    let out = nli(
        &["estimate", "s.json", "--mode", "gn", "--coherence", "off"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "channel_index,f_Hz,R_baud,format,P_launch_W,P_ASE_W,P_NLI_W,OSNR_NL_dB,warnings"
    );
    assert_eq!(lines.len(), 4);
    assert!(!text.contains('\r'));
    assert!(stderr(&out).contains(" ms"));

    // the EGN correction changes every channel's NLI
    let egn = nli(
        &["estimate", "s.json", "--mode", "egn", "--out", "egn.csv"],
        dir.path(),
    );
    assert!(egn.status.success());
    let egn_text = fs::read_to_string(dir.path().join("egn.csv")).unwrap();
    let nli_col = |t: &str, row: usize| -> f64 {
        t.lines()
            .nth(row)
            .unwrap()
            .split(',')
            .nth(6)
            .unwrap()
            .parse()
            .unwrap()
    };
    for row in 1..=3 {
        assert!(nli_col(&egn_text, row) != nli_col(&text, row));
    }
}

#[test]
fn coefficient_file_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.json"), SMALL).unwrap();
    fs::write(dir.path().join("short.json"), "[1, 2, 3]").unwrap();
    let out = nli(
        &["estimate", "s.json", "--coeffs", "short.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("24"));
}

#[test]
fn schema_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("bad.json"),
        SMALL.replace("\"nf_db\": 5,", "\"nf\": 5,"),
    )
    .unwrap();
    let out = nli(&["estimate", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("spans[0]"), "{}", stderr(&out));

    fs::write(
        dir.path().join("neg.json"),
        SMALL.replace("\"length_km\": 90", "\"length_km\": -90"),
    )
    .unwrap();
    let out = nli(&["estimate", "neg.json"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(nli(&["estimate"], dir.path()).status.code(), Some(2));
    assert_eq!(
        nli(&["estimate", "x.json", "--mode", "fast"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn generate_is_deterministic_in_both_layouts() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["generate", "--seed", "9", "--count", "6", "--spans", "2"];
    let a = nli(&[&args[..], &["--out", "a"]].concat(), dir.path());
    assert!(a.status.success(), "{}", stderr(&a));
    assert!(stdout(&a).contains("scenarios 6"));
    let b = nli(&[&args[..], &["--out", "b.jsonl"]].concat(), dir.path());
    assert!(b.status.success());

    let lines = fs::read_to_string(dir.path().join("b.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 6);
    for (i, line) in lines.lines().enumerate() {
        let file =
            fs::read_to_string(dir.path().join("a").join(format!("scenario_{i:05}.json"))).unwrap();
        let x: serde_json::Value = serde_json::from_str(line).unwrap();
        let y: serde_json::Value = serde_json::from_str(&file).unwrap();
        assert_eq!(x, y);
    }
    let again = nli(&[&args[..], &["--out", "c.jsonl"]].concat(), dir.path());
    assert!(again.status.success());
    assert_eq!(
        lines,
        fs::read_to_string(dir.path().join("c.jsonl")).unwrap()
    );
}

#[test]
fn generate_config_file_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"seed": 3, "system_count": 2, "span_count": 1}"#,
    )
    .unwrap();
    let out = nli(
        &["generate", "--config", "cfg.json", "--out", "g.jsonl"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        fs::read_to_string(dir.path().join("g.jsonl"))
            .unwrap()
            .lines()
            .count(),
        2
    );

    fs::write(dir.path().join("typo.json"), r#"{"sead": 3}"#).unwrap();
    let out = nli(
        &["generate", "--config", "typo.json", "--out", "g.jsonl"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));

    fs::write(
        dir.path().join("range.json"),
        r#"{"span_length_range_km": [120, 80]}"#,
    )
    .unwrap();
    let out = nli(
        &["generate", "--config", "range.json", "--out", "g.jsonl"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));

    let out = nli(
        &["generate", "--count", "0", "--out", "empty.jsonl"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(stderr(&out).contains("no statistics"));
}

#[test]
fn validate_writes_records_and_histograms() {
    let dir = tempfile::tempdir().unwrap();
    let gen = nli(
        &[
            "generate",
            "--seed",
            "2",
            "--count",
            "3",
            "--spans",
            "1",
            "--out",
            "batch.jsonl",
        ],
        dir.path(),
    );
    assert!(gen.status.success());
    let out = nli(
        &["validate", "batch.jsonl", "--out", "v", "--bins", "0.05"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let summary = stdout(&out);
    assert!(summary.starts_with("gn: n=3"), "{summary}");
    assert!(summary.contains("egn: n=3"));

    let records = fs::read_to_string(dir.path().join("v").join("validation.csv")).unwrap();
    let rows: Vec<&str> = records.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    // input order, GN before EGN for each scenario
    for (i, pair) in rows.chunks(2).enumerate() {
        assert!(pair[0].starts_with(&format!("batch:{},", i + 1)));
        assert!(pair[0].contains(",gn,off,"));
        assert!(pair[1].contains(",egn,off,"));
    }
    for name in ["histogram_gn.csv", "histogram_egn.csv"] {
        let h = fs::read_to_string(dir.path().join("v").join(name)).unwrap();
        assert!(h.starts_with("bin_center_dB,count\n"));
        let total: usize = h
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap())
            .sum();
        assert_eq!(total, 3);
    }
}

#[test]
fn validate_rejects_bad_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.json"), SMALL).unwrap();
    let out = nli(
        &["validate", "s.json", "--out", "v", "--tolerance", "0"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn max_reach_trace_and_unreachable_target() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.json"), SMALL).unwrap();
    let out = nli(
        &[
            "max-reach",
            "s.json",
            "--target",
            "14",
            "--out",
            "trace.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let spans: usize = stdout(&out).trim().parse().unwrap();
    assert!(spans >= 1);
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("N,OSNR_NL_dB"));
    let values: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), spans + 1);
    assert!(values[spans - 1] >= 14.0 && values[spans] < 14.0);

    let out = nli(&["max-reach", "s.json", "--target", "60"], dir.path());
    assert_eq!(out.status.code(), Some(6));
    assert_eq!(stdout(&out).trim(), "0");
}
