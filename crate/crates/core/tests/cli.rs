mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::data_dir;

fn elocast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elocast"))
        .args(args)
        .output()
        .expect("run elocast")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

#[test]
fn missing_data_path_exits_2_and_names_it() {
    let out = elocast(&["simulate", "--preset", "2018", "--data", "/no/such/dir", "--n", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/dir"));
    let out = elocast(&["report", "--distribution", "/no/such/file.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/file.json"));
}

#[test]
fn bad_arguments_fail() {
    assert!(!elocast(&["simulate", "--model", "quadratic"]).status.success());
    let data = data_dir();
    let out = elocast(&["simulate", "--preset", "1998", "--data", data.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_is_deterministic_and_writes_all_outputs() {
    let data = data_dir();
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for (dir, workers) in [(&a, "1"), (&b, "3")] {
        ok(&elocast(&[
            "simulate",
            "--preset",
            "2018",
            "--model",
            "independent",
            "--data",
            data.to_str().unwrap(),
            "--n",
            "3000",
            "--seed",
            "5",
            "--workers",
            workers,
            "--out",
            dir.to_str().unwrap(),
        ]));
    }
    for f in ["stages.csv", "stages_exclusive.csv", "sankey.json", "sankey.svg", "distribution.json"] {
        assert_eq!(read(&a.join(f)), read(&b.join(f)), "{f}");
    }
    let csv = read(&a.join("stages.csv"));
    assert!(csv.starts_with("# model=independent seed=5 n=3000 elo_update=true preset=2018\n"));
    assert!(csv.contains("team,champion,final,semi,quarter,r16,prelim"));
    assert!(read(&a.join("sankey.svg")).starts_with("<svg"));
}

#[test]
fn fit_then_simulate_from_coefficients_matches_refit() {
    let data = data_dir();
    let data = data.to_str().unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let fit_dir = tmp.path().join("fit");
    ok(&elocast(&["fit", "--preset", "2014", "--data", data, "--out", fit_dir.to_str().unwrap()]));
    let coeffs = fit_dir.join("coefficients.json");
    assert!(read(&fit_dir.join("diagnostics.csv")).lines().count() > 32);
    let (x, y) = (tmp.path().join("x"), tmp.path().join("y"));
    let common = ["--preset", "2014", "--data", data, "--model", "nested", "--n", "2000"];
    let mut with_coeffs = vec!["simulate"];
    with_coeffs.extend(common);
    with_coeffs.extend(["--coefficients", coeffs.to_str().unwrap(), "--out", x.to_str().unwrap()]);
    ok(&elocast(&with_coeffs));
    let mut refit = vec!["simulate"];
    refit.extend(common);
    refit.extend(["--out", y.to_str().unwrap()]);
    ok(&elocast(&refit));
    assert_eq!(read(&x.join("stages.csv")), read(&y.join("stages.csv")));
}

#[test]
fn validate_and_report_score_the_same_distribution() {
    let data = data_dir();
    let tmp = tempfile::tempdir().unwrap();
    let v = tmp.path().join("v");
    let out = elocast(&[
        "validate",
        "--preset",
        "2014",
        "--data",
        data.to_str().unwrap(),
        "--n",
        "2000",
        "--out",
        v.to_str().unwrap(),
    ]);
    ok(&out);
    let scores = read(&v.join("scores.csv"));
    assert!(scores.contains("model,E1,E2,Brier,RPS"));
    for label in [
        "Independent Poisson regression",
        "Nested Poisson regression",
        "Bivariate Poisson regression",
        "Diagonal Inflated Bivariate Poisson regression",
    ] {
        assert!(scores.contains(label), "{label}");
    }
    let r = tmp.path().join("r");
    ok(&elocast(&[
        "report",
        "--distribution",
        v.join("nested_distribution.json").to_str().unwrap(),
        "--preset",
        "2014",
        "--out",
        r.to_str().unwrap(),
    ]));
    assert_eq!(read(&v.join("nested_stages.csv")), read(&r.join("stages.csv")));
    let nested_line = |s: &str| s.lines().find(|l| l.starts_with("Nested")).unwrap().to_string();
    assert_eq!(nested_line(&scores), nested_line(&read(&r.join("scores.csv"))));
}

#[test]
fn unplayed_preset_cannot_be_validated_without_a_record() {
    let data = data_dir();
    let tmp = tempfile::tempdir().unwrap();
    let out = elocast(&[
        "validate",
        "--preset",
        "2018",
        "--data",
        data.to_str().unwrap(),
        "--n",
        "10",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--realized"));
}
