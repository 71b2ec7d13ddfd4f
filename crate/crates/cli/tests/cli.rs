use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use num_bigint::BigInt;
use quadcantor::ideals::factor_element;
use quadcantor::FieldSpec;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadcantor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn factor_matches_library() {
    let v = json(&["factor", "10"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["norm"], "100");
    let lib = factor_element(&FieldSpec::gaussian().small::<BigInt>(10, 0)).unwrap();
    let factors = v["factors"].as_array().unwrap();
    assert_eq!(factors.len(), lib.factors.len());
    for (f, (q, b)) in factors.iter().zip(&lib.factors) {
        assert_eq!(f["ideal"], q.to_string());
        assert_eq!(f["exponent"], b.to_string());
    }
    assert_eq!(strings(&v["product_hnf"]), ["10", "0", "10"]);
}

#[test]
fn wall_intersection() {
    let v = json(&[
        "intersect",
        "--alpha",
        "2",
        "--beta",
        "3",
        "--digits",
        "0,2",
        "--mode",
        "bounded",
        "--nmax",
        "4",
    ]);
    let values: Vec<&str> = v["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["value"].as_str().unwrap())
        .collect();
    assert_eq!(values, ["0", "1/4", "3/4", "1"]);
    assert_eq!(v["preconditions"]["applicable_case"], "case_i");
    assert_eq!(v["exhausted"], false);
}

#[test]
fn certified_mode_falls_back_past_the_cap() {
    let v = json(&[
        "intersect",
        "--alpha",
        "2",
        "--beta",
        "3",
        "--digits",
        "0,2",
        "--mode",
        "certified",
        "--nmax",
        "2",
    ]);
    assert_eq!(v["n0"], "45");
    assert_eq!(v["level"], "2");
    assert_eq!(v["exhausted"], false);
}

#[test]
fn bound_on_example() {
    let v = json(&["bound", "--alpha=-4+w", "--beta=-2+w", "--digits", "0,1,2,3"]);
    assert_eq!(v["schema"], 1);
    let text = v.to_string();
    assert!(text.contains("case_ii"), "{text}");
    assert!(text.contains("\"111\""), "{text}");
}

#[test]
fn membership_queries() {
    let v = json(&["member", "--beta", "3", "--digits", "0,2", "--point", "1/2"]);
    assert_eq!(v["member"], false);
    let v = json(&["member", "--beta", "3", "--digits", "0,2", "--point", "1/4"]);
    assert_eq!(v["member"], true);
    assert_eq!(strings(&v["period"]), ["0", "2"]);
}

#[test]
fn order_reports_closed_form() {
    let v = json(&["order", "--beta", "3", "--p", "2", "--n", "9", "--brute"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["used_closed_form"], true);
    assert_eq!(v["order"], v["brute_force"]);
}

#[test]
fn cns_prints_raw_values() {
    let out = run(&["cns", "--n", "2", "--expand", "5"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "[0,1,3,1]");
    let out = run(&["cns", "--n", "2", "--evaluate", "0,1,3,1"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "5");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["factor", "3+*w"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(
        run(&["member", "--beta", "3", "--digits", "0,0", "--point", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["factor", "1", "-d", "-4"]).status.code(), Some(2));
    let capped = run(&[
        "intersect",
        "--alpha",
        "2",
        "--beta",
        "3",
        "--digits",
        "0,2",
        "--nmax",
        "40",
        "--cap",
        "10",
    ]);
    assert_eq!(capped.status.code(), Some(3));
    assert!(capped.stdout.is_empty());
}

#[test]
fn config_file_supplies_flags() {
    let path = scratch("wall.cfg");
    fs::write(&path, "# Wall set\nbeta = 3\ndigits = 0,2\nalpha = 2\nnmax = 2\n").unwrap();
    let cfg = path.to_str().unwrap();
    let from_file = run(&["intersect", "--config", cfg]);
    let inline = run(&[
        "intersect",
        "--alpha",
        "2",
        "--beta",
        "3",
        "--digits",
        "0,2",
        "--nmax",
        "2",
    ]);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, inline.stdout);
    let overridden = json(&["--config", cfg, "intersect", "--nmax", "4"]);
    assert_eq!(overridden["level"], "4");
}

#[test]
fn output_is_reproducible() {
    for args in [
        &[
            "intersect",
            "--alpha",
            "10",
            "--beta",
            "3",
            "--digits",
            "0,2",
            "--nmax",
            "2",
        ][..],
        &["dim", "--beta", "3", "--digits", "0,2", "--depths", "4,6,8"][..],
        &["factor", "-d", "-5", "6"][..],
    ] {
        let (a, b) = (run(args), run(args));
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn render_writes_csv_and_svg() {
    let (csv, svg) = (scratch("cantor.csv"), scratch("cantor.svg"));
    let out = run(&[
        "render",
        "--beta",
        "3",
        "--digits",
        "0,2",
        "--depth",
        "5",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re,im"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (re, im) = l.split_once(',').unwrap();
            (re.parse().unwrap(), im.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 32);
    assert!(rows.iter().all(|&(re, im)| (0.0..=1.0).contains(&re) && im == 0.0));
    let image = fs::read_to_string(&svg).unwrap();
    assert!(image.starts_with("<svg") && image.trim_end().ends_with("</svg>"));
    assert_eq!(image.matches("<circle").count(), 32);
}
