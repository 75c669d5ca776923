#![allow(clippy::excessive_precision)]

use std::path::Path;
use std::process::{Command, Output};

fn kaleido(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kaleido"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn family_prints_masses() {
    let out = kaleido(&["family", "--family", "h3", "--xi", "2", "--m2", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let j = stdout_json(&out);
    assert_eq!(j["label"], "H3");
    let masses: Vec<f64> = j["masses"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!((masses[0] - 53.832815729997476).abs() < 1e-11);
    assert_eq!(&masses[1..], &[1.0, 2.0, 6.0]);
    // Seventeen significant digits in scientific notation.
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1.0000000000000000e0"), "{text}");

    let out = kaleido(&["family", "--family", "h4", "--xi", "1.9"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["masses"].as_array().unwrap().len(), 5);
}

#[test]
fn family_domain_errors_exit_2() {
    let out = kaleido(&["family", "--family", "h3", "--xi", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("m4"), "{}", stderr(&out));
    let out = kaleido(&["family", "--family", "h4", "--xi", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("m1"));
    let out = kaleido(&["family", "--family", "h3", "--xi", "2", "--m2", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    // Usage errors also exit 2.
    let out = kaleido(&["family", "--family", "e8", "--xi", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn limits_lists_four_cases() {
    let out = kaleido(&["limits"]);
    assert_eq!(out.status.code(), Some(0));
    let j = stdout_json(&out);
    let cases = j.as_array().unwrap();
    assert_eq!(cases.len(), 4);
    assert_eq!(cases[1]["family"], "H3");
    assert_eq!(cases[1]["end"], "right");
    assert_eq!(cases[1]["wall_particle"], 4);
    let out = kaleido(&["limits", "--family", "h4", "--end", "right", "--m2", "2"]);
    let j = stdout_json(&out);
    let masses = j[0]["spectrum"]["masses"].as_array().unwrap();
    assert_eq!(masses[3].as_f64(), Some(12.0));
}

#[test]
fn roots_and_group_commands() {
    let out = kaleido(&["roots", "--family", "h4", "--xi", "1.95"]);
    assert_eq!(out.status.code(), Some(0));
    let j = stdout_json(&out);
    assert_eq!(j["diagram"]["text"], "5 - 3 - 3");
    assert_eq!(j["roots"]["simple_roots"].as_array().unwrap().len(), 4);

    let out = kaleido(&["group", "--family", "h3", "--xi", "2.5"]);
    assert_eq!(out.status.code(), Some(0));
    let j = stdout_json(&out);
    assert_eq!(j["order"], 120);
    assert_eq!(j["n_reflections"], 15);
    assert_eq!(j["counting_check"]["contact_planes"], 6);
    assert_eq!(j["counting_check"]["equal"], false);

    let out = kaleido(&["group", "--family", "h3", "--xi", "2.5", "--dump-matrices"]);
    let j = stdout_json(&out);
    let els = j["elements"].as_array().unwrap();
    assert_eq!(els.len(), 120);
    assert_eq!(els[0]["word_length"], 0);
    assert_eq!(els[0]["matrix"].as_array().unwrap().len(), 4);
}

#[test]
fn non_kaleidoscopic_exit_3() {
    let out = kaleido(&["group", "--masses", "1,1,1,2.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("not kaleidoscopic"));
    let out = kaleido(&["roots", "--masses", "1,1,1,2.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout_json(&out)["diagram"].is_null());
    // H3 spectrum at xi = 2 with the last mass nudged.
    let out = kaleido(&["verify", "--masses", "53.832815729997476,1,2,6.01"]);
    assert_eq!(out.status.code(), Some(3));
    let out = kaleido(&["group", "--family", "h3", "--xi", "2", "--max-order", "100"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("closure"));
}

#[test]
fn masses_json_source() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let spectrum = kaleido(&["family", "--family", "h3", "--xi", "2.2"]).stdout;
    std::fs::write(&path, &spectrum).unwrap();
    let out = kaleido(&["group", "--masses-json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["order"], 120);

    std::fs::write(&path, r#"{"label":"Custom","masses":[1,1,1,1]}"#).unwrap();
    let out = kaleido(&["group", "--masses-json", path.to_str().unwrap()]);
    assert_eq!(stdout_json(&out)["order"], 24);

    std::fs::write(&path, r#"{"label":"Custom","masses":[1,-1]}"#).unwrap();
    let out = kaleido(&["group", "--masses-json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = kaleido(&["group", "--masses-json", "/nonexistent/x.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = kaleido(&["group"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports_and_exit_codes() {
    let out = kaleido(&["verify", "--family", "h3", "--xi", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let j = stdout_json(&out);
    assert_eq!(j["overall"], "pass");
    assert!(j["checks"].as_array().unwrap().len() > 20);
    assert!(stderr(&out).contains("overall: pass"));

    // A huge wavevector breaks the second-order Helmholtz bound: exit 1.
    let spectrum = kaleido::Family::H3.spectrum(2.0, 1.0).unwrap();
    let frame = kaleido::JacobiFrame::new(spectrum);
    let roots = kaleido::RootSet::simple_roots(&frame);
    let k = -roots.interior_point().unwrap() * 400.0;
    let k_arg = k
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let out = kaleido(&["verify", "--family", "h3", "--xi", "2", "--k", &k_arg]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    assert_eq!(stdout_json(&out)["overall"], "fail");
    // k outside the incident cone is a domain error.
    let neg = k
        .iter()
        .map(|x| (-x).to_string())
        .collect::<Vec<_>>()
        .join(",");
    let out = kaleido(&["verify", "--family", "h3", "--xi", "2", "--k", &neg]);
    assert_eq!(out.status.code(), Some(2));
    let out = kaleido(&["verify", "--family", "h3", "--xi", "2", "--k", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_across_threads() {
    let a = kaleido(&[
        "verify",
        "--family",
        "h3",
        "--xi",
        "2.3",
        "--seed",
        "7",
        "--threads",
        "1",
    ]);
    let b = kaleido(&[
        "verify",
        "--family",
        "h3",
        "--xi",
        "2.3",
        "--seed",
        "7",
        "--threads",
        "3",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let c = kaleido(&["verify", "--family", "h3", "--xi", "2.3", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

fn density(args: &[&str], out: &Path) -> Output {
    let mut all = vec!["density"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--output", out.to_str().unwrap()]);
    kaleido(&all)
}

#[test]
fn density_csv_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let out = density(&["--family", "h3", "--xi", "2", "--resolution", "32"], &a);
    assert_eq!(out.status.code(), Some(0));
    let out = density(
        &[
            "--family",
            "h3",
            "--xi",
            "2",
            "--resolution",
            "32",
            "--threads",
            "2",
        ],
        &b,
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,phi,density,in_chamber"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 4);
    assert!(row[0].ends_with("e-2") || row[0].contains('e'));
    assert_eq!(text.lines().count(), 32 * 32 + 1);

    let out = density(
        &["--family", "h4", "--xi", "1.95", "--resolution", "32"],
        &a,
    );
    assert_eq!(out.status.code(), Some(2));
    let out = density(
        &[
            "--family",
            "h4",
            "--xi",
            "1.95",
            "--resolution",
            "32",
            "--slice",
            "0.9",
        ],
        &a,
    );
    assert_eq!(out.status.code(), Some(0));
    let out = density(&["--family", "h3", "--xi", "2", "--resolution", "8"], &a);
    assert_eq!(out.status.code(), Some(2));
}
