//! End-to-end runs of the `torus-crit` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torus-crit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = run(&all);
    let v = serde_json::from_str(&stdout(&o)).expect("valid json");
    (v, o.status.code().unwrap())
}

#[test]
fn solve_third_order() {
    let o = run(&["solve", "--degree", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("constraint: a^2/r^2 = 6/5"), "{text}");
    assert!(text.contains("a2 = 15/2 a1"));
    assert!(text.contains("p = 3 a1 - a3"));
    assert!(text.contains("exact residual zero: true"));
}

#[test]
fn solve_json_coefficients_are_exact_fractions() {
    let (v, code) = json(&["solve", "--degree", "5", "--r", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["constraint"], "20/19");
    assert_eq!(v["coefficients"]["a4"]["a1"], "715045/126");
    assert_eq!(v["coefficients"]["p"]["a5"], "-1");
    assert_eq!(v["residuals"]["exact"], true);
}

#[test]
fn energy_of_the_clifford_torus() {
    let (v, code) = json(&["energy", "--degree", "2", "--ratio", "2"]);
    assert_eq!(code, 0);
    let e = v["energy"]["total"].as_f64().unwrap();
    assert!(
        (e - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12,
        "{e}"
    );
    assert!(stdout(&run(&["energy", "--degree", "2", "--ratio", "2"])).contains("19.7392088021787"));
}

#[test]
fn identities_pass_on_a_resolved_grid() {
    let o = run(&["identities", "--a2", "2", "--r", "1", "--grid", "256"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn identities_fail_on_an_unresolved_grid() {
    let o = run(&["identities", "--a2", "2", "--r", "1", "--grid", "32"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_sixth_order() {
    let (v, code) = json(&["verify", "--degree", "6", "--r", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["residuals"]["exact"], true);
    assert!(v["residuals"]["numeric_max"].as_f64().unwrap() < 1e-8);
}

#[test]
fn verify_off_the_critical_ratio_breaches_tolerance() {
    let (v, code) = json(&["verify", "--degree", "2", "--ratio", "3"]);
    assert_eq!(code, 3);
    assert_eq!(v["residuals"]["exact"], false);
}

#[test]
fn forced_leading_coefficient_exits_two() {
    let (v, code) = json(&[
        "solve",
        "--degree",
        "2",
        "--with-gauss",
        "--a2",
        "3",
        "--r",
        "1",
    ]);
    assert_eq!(code, 2);
    assert_eq!(v["consistent"], false);
    assert_eq!(v["coefficients"]["a1"], serde_json::json!({}));
}

#[test]
fn fourth_order_with_gauss_terms_reports_degeneracy() {
    let (v, code) = json(&[
        "solve",
        "--degree",
        "4",
        "--with-gauss",
        "--a2",
        "3",
        "--r",
        "1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["free_parameters"].as_array().unwrap().len(), 4);
    assert_eq!(v["coefficients"]["a8"]["a1"], "-21/16");
    assert_eq!(v["degeneracy"]["value"], "4");
    assert_eq!(v["degeneracy"]["degenerate"], false);
    let (v, _) = json(&[
        "solve",
        "--degree",
        "4",
        "--with-gauss",
        "--a2",
        "2",
        "--r",
        "1",
    ]);
    assert_eq!(v["degeneracy"]["degenerate"], true);
    assert_eq!(v["degeneracy"]["vanished_factor"], "a^2 - 2 r^2");
}

#[test]
fn report_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n3.json");
    let p = path.to_str().unwrap();
    let o = run(&["solve", "--degree", "3", "--format", "json", "--out", p]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["verify", "--report", p]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let tampered = std::fs::read_to_string(&path)
        .unwrap()
        .replace("\"15/2\"", "\"7\"");
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, tampered).unwrap();
    let o = run(&["verify", "--report", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn input_errors() {
    assert_eq!(run(&["solve", "--degree", "0"]).status.code(), Some(4));
    assert_eq!(
        run(&["solve", "--degree", "2", "--r", "x"]).status.code(),
        Some(4)
    );
    assert_eq!(run(&["bogus"]).status.code(), Some(4));
    assert_eq!(
        run(&["verify", "--report", "/nonexistent/report.json"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn second_variation_and_scan() {
    let (v, code) = json(&["second-variation", "--degree", "2", "--modes", "c1:1.0"]);
    assert_eq!(code, 0);
    assert!(v["second_variation"].as_f64().unwrap().is_finite());
    let (v, code) = json(&["scan", "--from", "1.5", "--to", "2.5", "--steps", "4"]);
    assert_eq!(code, 0);
    let rows = v["scan"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    // the Willmore energy is smallest at the Clifford ratio
    let min = rows
        .iter()
        .min_by(|a, b| {
            a["energy"]
                .as_f64()
                .partial_cmp(&b["energy"].as_f64())
                .unwrap()
        })
        .unwrap();
    assert_eq!(min["ratio"].as_f64(), Some(2.0));
}
