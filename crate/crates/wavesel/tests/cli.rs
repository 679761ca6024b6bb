//! End-to-end runs of the `wavesel` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wavesel_core::nls::builtin_catalog;
use wavesel_core::select::CandidateModel;
use wavesel_core::sim::{generate_nls, nls_generator};

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

fn wavesel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavesel")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_csv(dir: &Path, name: &str, header: &str, rows: impl IntoIterator<Item = String>) -> PathBuf {
    let mut text = format!("{header}\n");
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn noiseless_f3_is_selected() {
    let dir = tempfile::tempdir().unwrap();
    let sample = generate_nls(&nls_generator("f3").unwrap(), 200, 0.0, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
    let csv = write_csv(
        dir.path(),
        "f3.csv",
        "dose,response",
        sample.x.iter().zip(&sample.y).map(|(x, y)| format!("{x},{y}")),
    );

    let cands: Vec<CandidateModel> = builtin_catalog().into_iter().map(CandidateModel::nonlinear).collect();
    assert_eq!(oracle::brute_force_winners(&sample.x, &sample.y, &cands), ("f3".into(), "f3".into()));

    let report = dir.path().join("report.json");
    let table = dir.path().join("ranking.csv");
    let out = wavesel(&[
        "select",
        "--input",
        s(&csv),
        "--y",
        "response",
        "--x",
        "dose",
        "--out",
        s(&report),
        "--table",
        s(&table),
        "--fixed-timestamp",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("winner (rmse): f3"), "{text}");
    assert!(text.contains("winner (mae): f3"), "{text}");
    let ranking = std::fs::read_to_string(&table).unwrap();
    assert!(ranking.starts_with("candidate,fit_ok,converged,rmse,rank_rmse,mae,rank_mae,error\n"));
    assert_eq!(ranking.lines().count(), 1 + 5);
    assert!(ranking.lines().any(|l| l.starts_with("f3,true,true,") && l.contains(",1,")));

    let plot = dir.path().join("plot.csv");
    let out = wavesel(&["plotdata", "--report", s(&report), "--out", s(&plot)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let plot = std::fs::read_to_string(&plot).unwrap();
    let header: Vec<&str> = plot.lines().next().unwrap().split(',').collect();
    for column in ["x", "observed", "wavelet", "winner"] {
        assert!(header.contains(&column), "{header:?}");
    }
    assert_eq!(plot.lines().count(), 201);
}

#[test]
fn selection_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let rows = (0..64).map(|i| {
        let x = 1.0 + 3.0 * i as f64 / 63.0;
        format!("{x},{}", 0.25 + (-x).exp() + 0.01 * ((i * 7 % 11) as f64 - 5.0) / 5.0)
    });
    let csv = write_csv(dir.path(), "d.csv", "x,y", rows);
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = wavesel(&[
            "select",
            "--input",
            s(&csv),
            "--y",
            "y",
            "--x",
            "x",
            "--candidates",
            "f2,f24,glm:gamma",
            "--out",
            s(&path),
            "--fixed-timestamp",
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        (stdout(&out), std::fs::read(&path).unwrap())
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn missing_rows_are_dropped_and_counted() {
    let dir = tempfile::tempdir().unwrap();
    let rows = (0..40).map(|i| {
        let x = i as f64 / 39.0 * 4.0;
        if i % 10 == 3 {
            format!("{x},NA")
        } else {
            format!("{x},{}", 4.0 * (-x).exp())
        }
    });
    let csv = write_csv(dir.path(), "d.csv", "x,y", rows);
    let report = dir.path().join("r.json");
    let out = wavesel(&["select", "--input", s(&csv), "--y", "y", "--x", "x", "--out", s(&report)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(json["body"]["dataset"]["rows_read"], 40);
    assert_eq!(json["body"]["dataset"]["rows_dropped"], 4);
    assert_eq!(json["body"]["y"].as_array().unwrap().len(), 36);
}

#[test]
fn constant_predictor_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_csv(dir.path(), "c.csv", "x,y", (0..32).map(|i| format!("2.0,{}", 1.0 + i as f64 * 0.1)));
    let out = wavesel(&["select", "--input", s(&csv), "--y", "y", "--x", "x"]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn too_few_rows_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_csv(dir.path(), "t.csv", "x,y", (0..10).map(|i| format!("{i},{}", i * 2)));
    let out = wavesel(&["select", "--input", s(&csv), "--y", "y", "--x", "x"]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("16"));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    assert_eq!(code(&wavesel(&["select", "--input", s(&missing), "--y", "y", "--x", "x"])), 2);
    let csv = write_csv(dir.path(), "d.csv", "x,y", (0..20).map(|i| format!("{i},{}", i + 1)));
    assert_eq!(code(&wavesel(&["select", "--input", s(&csv), "--y", "nope", "--x", "x"])), 2);
    assert_eq!(code(&wavesel(&["select", "--input", s(&csv), "--y", "y", "--x", "x", "--candidates", "f2,f99"])), 2);
    assert_eq!(code(&wavesel(&["select", "--input", s(&csv), "--y", "y", "--x", "x", "--wavelet", "daub9"])), 2);
}

#[test]
fn no_candidate_fits_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_csv(dir.path(), "neg.csv", "x,y", (0..32).map(|i| format!("{i},{}", -1.0 - i as f64)));
    let out = wavesel(&["select", "--input", s(&csv), "--y", "y", "--x", "x", "--candidates", "glm:gamma"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn unknown_config_keys_exit_2_and_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "seeds = 3\n[wavelet]\nlevel = 2\n[[scenario]]\nkind = \"s2\"\nsize = [64]\n").unwrap();
    let out = wavesel(&["simulate", "--config", s(&cfg), "--out-dir", s(&dir.path().join("o"))]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    for key in ["seeds", "wavelet.level", "scenario[0].size"] {
        assert!(err.contains(key), "{err}");
    }
}

#[test]
fn empty_scenario_list_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    std::fs::write(&cfg, "seed = 1\nreplications = 5\n").unwrap();
    let out = wavesel(&["simulate", "--config", s(&cfg), "--out-dir", s(&dir.path().join("o"))]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

const SMALL_CONFIG: &str = r#"
seed = 99
replications = 6

[[scenario]]
kind = "s1"
truth = ["f4"]
dependence = ["strong"]
n = [64]

[[scenario]]
kind = "s3"
truth = ["gamma:log"]
dependence = ["moderate"]
n = [64]

[[scenario]]
kind = "s4"
truth = ["gaussian:identity"]
dependence = ["strong"]
n = [64]
gap = true
"#;

const OUTPUTS: [&str; 5] = [
    "classification_rates.csv",
    "classification_table.csv",
    "null_fractions.csv",
    "glm_win_proportions.csv",
    "summary.json",
];

#[test]
fn simulate_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SMALL_CONFIG).unwrap();
    let run = |name: &str| {
        let out_dir = dir.path().join(name);
        let out = wavesel(&["simulate", "--config", s(&cfg), "--out-dir", s(&out_dir), "--fixed-timestamp"]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        OUTPUTS.map(|f| std::fs::read(out_dir.join(f)).unwrap())
    };
    let first = run("a");
    assert_eq!(first, run("b"));

    let rates = String::from_utf8(first[0].clone()).unwrap();
    assert_eq!(rates.lines().count(), 1 + 2 * 2);
    let wins = String::from_utf8(first[3].clone()).unwrap();
    assert!(wins.lines().nth(1).unwrap().starts_with("glm:gaussian:identity,strong,64,0.3,"));

    let plot = wavesel(&["plotdata", "--report", s(&dir.path().join("a/summary.json"))]);
    assert_eq!(code(&plot), 0, "{}", stderr(&plot));
    let text = stdout(&plot);
    assert!(text.starts_with("label,scenario,truth,dependence,n,criterion,metric,value\n"));
    assert_eq!(text.lines().filter(|l| l.contains("true_classification_rate")).count(), 4);
    assert_eq!(text.lines().filter(|l| l.contains("glm_win_proportion")).count(), 2);
}

#[test]
fn corrupted_report_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"metadata\": {\"tool\": \"wavesel\"").unwrap();
    assert_eq!(code(&wavesel(&["plotdata", "--report", s(&bad)])), 3);
    assert_eq!(code(&wavesel(&["plotdata", "--report", s(&dir.path().join("none.json"))])), 3);
}

#[test]
fn bundled_profiles_parse() {
    let profiles = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../profiles");
    for (name, cells) in [("table2-quick.toml", 24), ("smoke.toml", 4)] {
        let loaded = wavesel::config::load_config(&profiles.join(name)).unwrap();
        assert_eq!(loaded.cells.len(), cells, "{name}");
    }
    let full = wavesel::config::load_config(&profiles.join("full.toml")).unwrap();
    assert!(full.cells.iter().all(|c| c.replications == 1000));
}
