use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_projspec"));
    c.env_remove("PROJSPEC_THREADS").env_remove("RUST_LOG");
    c
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

/// `(w, z)` pairs from a curve CSV.
fn csv_points(text: &str) -> Vec<(f64, f64, f64, f64)> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("w_re,w_im,z_re,z_im,residual,multiple_flag"));
    lines
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            assert_eq!(f.len(), 6);
            (f[0], f[1], f[2], f[3])
        })
        .collect()
}

#[test]
fn exit_code_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let commuting = fixture("commuting_normal_3x3.json");
    let sec8 = fixture("sec8_counterexample.json");
    let nilpotent = fixture("nilpotent_pair.json");
    let malformed = write_temp(&dir, "bad.json", "{\"N\": 2, \"n\": ");
    let mismatch = write_temp(&dir, "mismatch.json", r#"{"N": 2, "n": 2, "matrices": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#);
    let triple = write_temp(
        &dir,
        "triple.json",
        r#"{"N": 1, "n": 3, "matrices": [[[[1,0]]], [[[2,0]]], [[[3,0]]]]}"#,
    );
    let big = run(&["generate", "--kind", "random", "--dim", "15", "--arity", "5"]);
    assert_eq!(code(&big), 0);
    let big = write_temp(&dir, "big.json", std::str::from_utf8(&big.stdout).unwrap());

    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["analyze", commuting.to_str().unwrap()], 0),
        (vec!["analyze", sec8.to_str().unwrap()], 1),
        (vec!["analyze", nilpotent.to_str().unwrap()], 0),
        (vec!["charpoly", sec8.to_str().unwrap()], 0),
        (vec!["spectrum", sec8.to_str().unwrap()], 0),
        (vec!["analyze", &malformed], 2),
        (vec!["charpoly", &mismatch], 2),
        (vec!["charpoly", "/nonexistent/tuple.json"], 2),
        (vec!["spectrum", &triple], 2),
        (vec!["analyze", "--format", "csv", commuting.to_str().unwrap()], 2),
        (vec!["analyze", "--tol", "0", commuting.to_str().unwrap()], 2),
        (vec!["generate", "--kind", "counterexample", "--dim", "3"], 2),
        (vec!["generate", "--kind", "random", "--dim", "0"], 2),
        (vec!["generate", "--kind", "sideways"], 2),
        (vec!["frobnicate"], 2),
        // (15 + 1)⁵ interpolation points exceed the grid cap
        (vec!["charpoly", &big], 3),
    ];
    for (args, want) in cases {
        let out = run(&args);
        assert_eq!(code(&out), want, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }

    let out = bin()
        .env("PROJSPEC_THREADS", "many")
        .args(["charpoly", sec8.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn analyze_reports() {
    let out = run(&["analyze", fixture("sec8_counterexample.json").to_str().unwrap()]);
    let v = json(&out);
    assert_eq!(v["flagged"], true);
    let r = &v["report"];
    assert_eq!(r["reducible"], true);
    assert_eq!(r["commute"], false);
    assert_eq!(r["non_normal_gap"], true);
    assert_eq!(r["violation"], false);

    let v = json(&run(&["analyze", fixture("commuting_normal_3x3.json").to_str().unwrap()]));
    for key in ["commute", "reducible", "hyperplane_spectrum", "consistent", "all_normal"] {
        assert_eq!(v["report"][key], true, "{key}");
    }

    // det(I + zA + wB) = 1 − zw
    let v = json(&run(&["analyze", fixture("nilpotent_pair.json").to_str().unwrap()]));
    assert_eq!(v["report"]["reducible"], false);
    assert!(v["report"]["residual"].as_f64().is_none_or(|r| r > 1e-3));
}

#[test]
fn generated_commuting_tuples_analyze_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    for seed in ["1", "7", "19", "123"] {
        let doc = run(&["generate", "--kind", "commuting-normal", "--dim", "4", "--arity", "3", "--seed", seed]);
        let path = write_temp(&dir, &format!("t{seed}.json"), std::str::from_utf8(&doc.stdout).unwrap());
        let out = run(&["analyze", &path]);
        assert_eq!(code(&out), 0, "seed {seed}");
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["generate", "--kind", "commuting-normal", "--dim", "4", "--arity", "3", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, run(&["generate", "--kind", "commuting-normal", "--dim", "4", "--arity", "3", "--seed", "8"]).stdout);

    let path = fixture("commuting_normal_3x3.json");
    for cmd in ["analyze", "charpoly", "spectrum"] {
        let first = run(&[cmd, path.to_str().unwrap()]);
        let serial = bin()
            .env("PROJSPEC_THREADS", "1")
            .args([cmd, path.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(first.stdout, serial.stdout, "{cmd}");
        assert_eq!(first.stdout, run(&[cmd, path.to_str().unwrap()]).stdout, "{cmd}");
    }
}

#[test]
fn shipped_fixtures_match_the_generator() {
    let counter = run(&["generate", "--kind", "counterexample"]);
    assert_eq!(counter.stdout, std::fs::read(fixture("sec8_counterexample.json")).unwrap());
    let commuting = run(&["generate", "--kind", "commuting-normal", "--dim", "3", "--arity", "2", "--seed", "42"]);
    assert_eq!(commuting.stdout, std::fs::read(fixture("commuting_normal_3x3.json")).unwrap());
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("doc.json");
    let out = run(&["generate", "--kind", "counterexample", "--out", target.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&target).unwrap(), std::fs::read(fixture("sec8_counterexample.json")).unwrap());
}

#[test]
fn charpoly_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let id = write_temp(
        &dir,
        "id.json",
        r#"{"N": 3, "n": 1, "matrices": [[[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]]}"#,
    );
    let v = json(&run(&["charpoly", &id]));
    assert_eq!(v["arity"], 1);
    let terms = v["terms"].as_array().unwrap();
    let want = [1.0, 3.0, 3.0, 1.0];
    assert_eq!(terms.len(), 4);
    for t in terms {
        let k = t["exp"][0].as_u64().unwrap() as usize;
        assert!((t["re"].as_f64().unwrap() - want[k]).abs() < 1e-12);
        assert!(t["im"].as_f64().unwrap().abs() < 1e-12);
    }

    // (1 + z + 3w)(1 + 2z + 5w)
    let v = json(&run(&["charpoly", fixture("sec8_counterexample.json").to_str().unwrap()]));
    let want = [([0, 0], 1.0), ([1, 0], 3.0), ([0, 1], 8.0), ([2, 0], 2.0), ([1, 1], 11.0), ([0, 2], 15.0)];
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), want.len());
    for (exp, c) in want {
        let t = terms
            .iter()
            .find(|t| t["exp"][0] == exp[0] && t["exp"][1] == exp[1])
            .unwrap_or_else(|| panic!("missing {exp:?}"));
        assert!((t["re"].as_f64().unwrap() - c).abs() < 1e-10);
        assert!(t["im"].as_f64().unwrap().abs() < 1e-10);
    }

    let csv = run(&["charpoly", "--format", "csv", fixture("sec8_counterexample.json").to_str().unwrap()]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("e1,e2,re,im"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn spectrum_of_the_counterexample_lies_on_two_lines() {
    let out = run(&["spectrum", "--grid", "11", fixture("sec8_counterexample.json").to_str().unwrap()]);
    let pts = csv_points(std::str::from_utf8(&out.stdout).unwrap());
    // two roots per w, fewer where they coincide
    assert!(pts.len() >= 20);
    for (w, wi, z, zi) in pts {
        assert!((-1.0..=1.0).contains(&w) && wi == 0.0 && zi.abs() < 1e-9);
        let l1 = (1.0 + z + 3.0 * w).abs();
        let l2 = (1.0 + 2.0 * z + 5.0 * w).abs();
        assert!(l1.min(l2) < 1e-9, "({w}, {z}) is on neither line");
    }
}

#[test]
fn spectrum_with_zero_second_member_has_constant_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(
        &dir,
        "b0.json",
        r#"{"N": 2, "n": 2, "matrices": [[[[1,0],[0,0]],[[0,0],[2,0]]], [[[0,0],[0,0]],[[0,0],[0,0]]]]}"#,
    );
    let out = run(&["spectrum", "--grid", "5", &path]);
    assert_eq!(code(&out), 0);
    let pts = csv_points(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(pts.len(), 10);
    let mut zs: Vec<f64> = pts.iter().map(|p| p.2).collect();
    zs.sort_by(f64::total_cmp);
    assert!(zs[..5].iter().all(|z| (z + 1.0).abs() < 1e-12));
    assert!(zs[5..].iter().all(|z| (z + 0.5).abs() < 1e-12));
}

#[test]
fn hermitian_spectrum_is_closed_under_conjugation() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(
        &dir,
        "herm.json",
        r#"{"N": 3, "n": 2, "matrices": [
            [[[2,0],[1,1],[0,0]], [[1,-1],[0,0],[0,2]], [[0,0],[0,-2],[-1,0]]],
            [[[0,0],[0,1],[1,0]], [[0,-1],[1,0],[0,0]], [[1,0],[0,0],[3,0]]]
        ]}"#,
    );
    let out = run(&["spectrum", "--grid", "9", &path]);
    assert_eq!(code(&out), 0);
    let pts = csv_points(std::str::from_utf8(&out.stdout).unwrap());
    assert!(!pts.is_empty());
    for &(w, _, z, zi) in &pts {
        let mirrored = pts
            .iter()
            .any(|&(w2, _, z2, zi2)| w2 == w && (z2 - z).abs() < 1e-7 && (zi2 + zi).abs() < 1e-7);
        assert!(mirrored, "no conjugate for ({w}, {z}{zi:+}i)");
    }
}

#[test]
fn stdin_input() {
    use std::io::Write;
    let mut child = bin()
        .args(["charpoly", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(br#"{"N": 1, "n": 1, "matrices": [[[[2, 0]]]]}"#)
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["terms"].as_array().unwrap().len(), 2);
}
