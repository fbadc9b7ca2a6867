use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn weingarten(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weingarten"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn atlas_of_cgc_lists_sphere_football_bracelet() {
    let out = weingarten(&["atlas", "--preset", "cgc:1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["schema"], 1);
    let labels: Vec<&str> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["label"].as_str().unwrap())
        .collect();
    assert_eq!(labels, ["Sphere", "Football", "Bracelet"]);
}

#[test]
fn halfspace_exit_codes() {
    let out = weingarten(&["halfspace", "--g", "-x"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["verdict"], "HoldsSufficient");

    let out = weingarten(&["halfspace", "--preset", "cmc:1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["reason"], "G0Nonzero");

    // Tangency of infinite order at 0 and a sign change of t + g(t).
    let out = weingarten(&["halfspace", "--g", "-x + 0.1*x^2.5*(x-0.0005)/(1+x^4)"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["verdict"], "Undetermined");
}

#[test]
fn errors_exit_with_one() {
    let out = weingarten(&["halfspace", "--g", "x +"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let out = weingarten(&["classify", "--preset", "cmc:1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_errors_report_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    fs::write(&path, "[class]\npreset = cmc:1\n\n[start]\nlambda0 = 2.5\ntypo = 1\n").unwrap();
    let out = weingarten(&["classify", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 6"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    fs::write(&path, "[class]\npreset = cmc:1\n[start]\nlambda0 = 2.5\n").unwrap();
    let cfg = path.to_str().unwrap();
    let v = json_of(&weingarten(&["classify", "--config", cfg]));
    assert_eq!(v["label"], "SpecialUnduloid");
    assert!((v["parameter"].as_f64().unwrap() - 0.4).abs() < 1e-8);
    let v = json_of(&weingarten(&["classify", "--config", cfg, "--preset", "cgc:1", "--x0", "0.5", "--lambda0", "2"]));
    assert_eq!(v["label"], "Football");
    assert!((v["parameter"].as_f64().unwrap() - 0.5).abs() < 1e-8);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = weingarten(&[
            "profile", "--preset", "cgc:1", "--x0", "0.5", "--lambda0", "2", "--out", p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert!(String::from_utf8_lossy(&ta).starts_with("s,x,z,lambda,mu,epsilon\n"));

    let r1 = weingarten(&["atlas", "--preset", "two_h_eq_k"]).stdout;
    let r2 = weingarten(&["atlas", "--preset", "two_h_eq_k"]).stdout;
    assert_eq!(r1, r2);
}

#[test]
fn profile_mesh_and_phase_outputs() {
    let out = weingarten(&[
        "profile", "--preset", "cgc:1", "--x0", "0.5", "--lambda0", "2", "--format", "obj", "--n-angular", "12",
        "--n-profile", "40",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let verts = text.lines().filter(|l| l.starts_with("v ")).count();
    let faces = text.lines().filter(|l| l.starts_with("f ")).count();
    // Two apexes and 38 rings of 12.
    assert_eq!(verts, 2 + 38 * 12);
    assert_eq!(faces, 2 * 12 * 39 - 2 * 12);

    let out = weingarten(&["phase", "--preset", "cmc:1", "--lambda0", "2.5", "--n-profile", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 11);
    // The orbit stays inside the region and touches the boundary at both ends.
    for r in &rows {
        assert!(r[1] <= r[2] * (1.0 + 1e-9));
    }
    assert!((rows[0][1] - rows[0][2]).abs() < 1e-7);
    assert!((rows[10][1] - rows[10][2]).abs() < 1e-7);
}

#[test]
fn yau_report() {
    let out = weingarten(&["yau", "--c", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!((v["r0"].as_f64().unwrap() - 2f64.powf(1.5)).abs() < 1e-12);
    assert!(v["residual"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["mesh"]["euler_characteristic"], 2);
    assert_eq!(v["mesh"]["closed"], true);
    let out = weingarten(&["yau", "--c", "-1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(weingarten(&["nonsense"]).status.code(), Some(1));
    assert_eq!(weingarten(&["atlas", "--bogus"]).status.code(), Some(1));
    assert_eq!(weingarten(&["--help"]).status.code(), Some(0));
}
