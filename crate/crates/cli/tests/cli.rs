use std::process::{Command, Output};

use corr_are_cli::{run, Command as Cmd, Format, RunConfig};

fn corr_are(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corr-are"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["reduce", "--pair", "ts"][..],
        &["reduce", "--pair", "all"],
        &["verify", "--grid", "3"],
        &["mc", "--reps", "50"],
        &["mc", "--n", "5"],
        &["mc", "--rho", "1.0"],
        &["table", "--grid", "1"],
        &["table", "--pair", "xy"],
    ] {
        assert_eq!(corr_are(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn default_verify_passes() {
    let o = corr_are(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8_lossy(&o.stderr).into_owned();
    assert!(err.contains("theorem1.q_monotone.RS.1: pass"), "{err}");
    let out = stdout(&o);
    assert!(out.starts_with("check,status,worst_margin,detail\n"));
    assert!(!out.contains(",fail,"));
}

#[test]
fn table_rows_factorize() {
    let o = corr_are(&["table", "--grid", "5"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(!out.contains('\r'));
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["x", "are_rt", "are_ts", "are_rs"]);
    let rows: Vec<Vec<f64>> = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    for (j, r) in rows.iter().enumerate() {
        assert!((r[0] - (j + 1) as f64 / 6.0).abs() < 1e-15);
        assert!((r[3] - r[1] * r[2]).abs() < 1e-9);
    }
}

#[test]
fn bounds_emit_quadratics_and_crossovers() {
    let o = corr_are(&["bounds", "--pair", "ts", "--anchor", "1"]);
    let out = stdout(&o);
    let quads = out.lines().filter(|l| l.starts_with("quad,")).count();
    let roots = out.lines().filter(|l| l.starts_with("crossover,")).count();
    assert_eq!((quads, roots), (1, 2));

    let all = stdout(&corr_are(&["bounds"]));
    for pair in ["RT", "TS", "RS"] {
        let n = all.lines().filter(|l| l.starts_with(&format!("quad,{pair},"))).count();
        assert_eq!(n, 2, "{pair}");
    }
}

#[test]
fn json_mirrors_csv_fields() {
    let csv_out = stdout(&corr_are(&["reduce", "--anchor", "0"]));
    let header: Vec<&str> = csv_out.lines().next().unwrap().split(',').collect();
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&corr_are(&["reduce", "--anchor", "0", "--format", "json"])))
            .unwrap();
    let rows = json.as_array().unwrap();
    assert_eq!(rows.len(), csv_out.lines().count() - 1);
    let keys: Vec<&str> = rows[0].as_object().unwrap().keys().map(String::as_str).collect();
    let mut sorted = header.clone();
    sorted.sort_unstable();
    let mut keys_sorted = keys.clone();
    keys_sorted.sort_unstable();
    assert_eq!(sorted, keys_sorted);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("corr-are-table-{}.csv", std::process::id()));
    let o = corr_are(&["table", "--grid", "3", "--out", path.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn library_run_matches_binary() {
    let mut cfg = RunConfig::new(Cmd::Table);
    cfg.grid = 7;
    cfg.format = Format::Json;
    let mut buf = Vec::new();
    assert!(run(&cfg, &mut buf).unwrap().passed);
    let bin = corr_are(&["table", "--grid", "7", "--format", "json"]);
    assert_eq!(buf, bin.stdout);
}

#[test]
fn reduce_reports_end_state() {
    let out = stdout(&corr_are(&["reduce"]));
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let h = rdr.headers().unwrap().clone();
    let col = |name: &str| h.iter().position(|c| c == name).unwrap();
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 10);
    for r in rows.iter().filter(|r| &r[col("node")] == "4") {
        assert_eq!(&r[col("f_pattern")], "−");
        assert_eq!(&r[col("g_pattern")], "−");
        assert_eq!(&r[col("r_pattern")], "↗");
    }
}
