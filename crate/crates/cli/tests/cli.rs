//! End-to-end checks of the binary: pipeline wiring, JSON shapes, exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn ilab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ilab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn pipeline_gen_rich_incidence_verify() {
    let dir = std::env::temp_dir().join("ilab-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let t_path = dir.join("t.json");
    let s_path = dir.join("s.json");

    let gen = ilab(&[
        "gen",
        "--family",
        "lines_in_flats",
        "--field",
        "11",
        "--ambient-dim",
        "3",
        "--flat-dim",
        "2",
        "--flats",
        "2",
        "--lines-per-flat",
        "3",
        "--seed",
        "3",
        "--out",
        t_path.to_str().unwrap(),
    ]);
    assert!(gen.status.success());

    let rich = stdout_json(&ilab(&[
        "rich",
        "--t",
        t_path.to_str().unwrap(),
        "--r",
        "2",
    ]));
    assert_eq!(rich["rich"]["r"], 2);
    std::fs::write(&s_path, serde_json::to_string(&rich["points"]).unwrap()).unwrap();

    let frag = stdout_json(&ilab(&[
        "incidence",
        "--s",
        s_path.to_str().unwrap(),
        "--t",
        t_path.to_str().unwrap(),
        "--rich",
        "2",
        "--k-free",
        "2",
    ]));
    assert!(frag["incidence_total"].as_u64().unwrap() > 0);
    assert_eq!(frag["k_free"], true);

    let vanish = stdout_json(&ilab(&["vanish", "--t", t_path.to_str().unwrap()]));
    assert_eq!(vanish["degree"], 2);
    assert!(vanish["polynomial"].is_object());

    let conc = stdout_json(&ilab(&[
        "conc",
        "--t",
        t_path.to_str().unwrap(),
        "--m",
        "2",
        "--oracle",
        "spanned",
    ]));
    assert_eq!(conc["value"], "3");

    let verify = stdout_json(&ilab(&[
        "verify",
        "--theorem",
        "i1",
        "--t",
        t_path.to_str().unwrap(),
    ]));
    assert_eq!(verify["theorem"], "i1");
    assert!(verify["ratio"].as_f64().unwrap() <= 8.0);

    let partition = stdout_json(&ilab(&[
        "partition",
        "--s",
        s_path.to_str().unwrap(),
        "--t",
        t_path.to_str().unwrap(),
        "--tau",
        "0.4",
        "--budget",
        "relative",
    ]));
    assert_eq!(partition["global_inequality_holds"], true);
    assert_eq!(partition["pieces"].as_array().unwrap().len(), 2);
}

#[test]
fn exit_codes() {
    // missing input file is an input error
    let missing = ilab(&["conc", "--t", "/nonexistent/x.json", "--m", "2"]);
    assert_eq!(missing.status.code(), Some(2));

    // composite modulus rejected at generation
    let composite = ilab(&["gen", "--family", "grid", "--field", "9", "--side", "2"]);
    assert_eq!(composite.status.code(), Some(2));

    // the single-step suite on a clean run exits 0
    let cii = ilab(&[
        "verify",
        "--theorem",
        "cii",
        "--instances",
        "25",
        "--seed",
        "7",
    ]);
    assert_eq!(cii.status.code(), Some(0));
}

#[test]
fn gen_is_deterministic_and_canonical() {
    let dir = std::env::temp_dir().join("ilab-cli-det");
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    for path in [&a, &b] {
        let out = ilab(&[
            "gen",
            "--family",
            "generic_lines",
            "--field",
            "101",
            "--ambient-dim",
            "3",
            "--count",
            "12",
            "--seed",
            "99",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(read(&a), read(&b));
}

fn read(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap()
}
