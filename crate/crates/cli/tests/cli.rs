use std::path::PathBuf;
use std::process::Command;

use proptest::prelude::*;
use serde_json::Value;

use spinc_cli::format::PresentationFile;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(format!("{name}.json"))
}

fn spinc(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_spinc")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn invariants_text_and_json() {
    let (code, out, _) = spinc(&["invariants", &path("rp3")]);
    assert_eq!(code, 0);
    assert!(out.contains("torsion: [2]"));
    assert!(out.contains("gauss sum: 1+ζ₄"));

    let (code, out, _) = spinc(&["invariants", &path("rp3"), "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["torsion"], serde_json::json!([2]));
    assert_eq!(v["gauss"]["text"], "1+ζ₄");
    assert_eq!(v["gauss"]["approx"]["display_only"], true);

    let (code, out, _) = spinc(&["invariants", &path("e8"), "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["torsion"], serde_json::json!([]));
    assert_eq!(v["gauss"]["text"], "1");
}

#[test]
fn validation_and_cap_exit_codes() {
    let (code, _, err) = spinc(&["invariants", &path("bad_parity")]);
    assert_eq!(code, 1);
    assert!(err.contains("chern[1]"), "{err}");
    let (code, _, _) = spinc(&["invariants", "/nonexistent/file.json"]);
    assert_eq!(code, 1);
    let (code, _, err) = spinc(&["invariants", &path("lens_9_1"), "--cap", "4"]);
    assert_eq!(code, 2);
    assert!(err.contains("cap"));
    let (code, _, _) = spinc(&["frobnicate"]);
    assert_eq!(code, 1);
}

#[test]
fn compare_verdicts() {
    let (code, out, _) = spinc(&["compare", &path("rp3"), &path("rp3_s2")]);
    assert_eq!(code, 3);
    assert!(out.contains("reason: gauss_sum"));

    let (code, out, _) = spinc(&["compare", &path("s2xs1"), &path("s2xs1_neg"), "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "Equivalent");
    assert_eq!(v["witness"]["free"], serde_json::json!([[-1]]));

    let (code, out, _) = spinc(&["compare", &path("lens_5_2"), &path("lens_5_2"), "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["witness"]["torsion"], serde_json::json!([[1]]));
}

#[test]
fn compare_unknown_on_tiny_budget() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    std::fs::write(&a, r#"{"matrix": [[0,0,0],[0,4,0],[0,0,4]], "chern": [2,0,2]}"#).unwrap();
    std::fs::write(&b, r#"{"matrix": [[0,0,0],[0,4,0],[0,0,4]], "chern": [-2,2,0]}"#).unwrap();
    let (code, out, _) = spinc(&["compare", a.to_str().unwrap(), b.to_str().unwrap(), "--budget", "1"]);
    assert_eq!(code, 4, "{out}");
    assert!(out.starts_with("Unknown"));
}

#[test]
fn walk_writes_file_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.json");
    let (code, _, err) = spinc(&["walk", &path("rp3"), "--steps", "20", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(err.contains("invariants preserved"));
    let (code, stdout, _) = spinc(&["compare", &path("rp3"), out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");

    let (_, a, _) = spinc(&["walk", &path("a2"), "--steps", "30", "--seed", "9"]);
    let (_, b, _) = spinc(&["walk", &path("a2"), "--steps", "30", "--seed", "9"]);
    assert_eq!(a, b);
}

#[test]
fn spins_lens_and_classes() {
    let (code, out, _) = spinc(&["spins", &path("s2xs1"), "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["count"], 2);
    for s in v["spin_structures"].as_array().unwrap() {
        assert_eq!(s["chern"], serde_json::json!([0]));
    }

    let (code, out, _) = spinc(&["lens-census", "--p", "15", "--q1", "1", "--q2", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains(": 8") && out.contains(": 6"), "{out}");
    let (code, _, err) = spinc(&["lens-census", "--p", "8"]);
    assert_eq!(code, 5);
    assert!(err.contains("odd p"));

    let (code, out, _) = spinc(&["classes", "--matrix", "[[9]]", "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["count"], 5);
    let (code, _, _) = spinc(&["classes", "--matrix", "[[0]]"]);
    assert_eq!(code, 1);
    let (code, out, _) = spinc(&["classes", &path("s2xs1"), "--radius", "6"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("Y^c classes: 4"));
}

#[test]
fn fixtures_round_trip_byte_stable() {
    for entry in std::fs::read_dir(fixture("s3").parent().unwrap()).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let f = PresentationFile::parse(&text).unwrap();
        let again = f.to_json();
        assert_eq!(PresentationFile::parse(&again).unwrap(), f);
        assert_eq!(PresentationFile::parse(&again).unwrap().to_json(), again);
    }
}

fn presentation_file() -> impl Strategy<Value = PresentationFile> {
    (1usize..5).prop_flat_map(|n| {
        (
            proptest::collection::vec(-1000i64..1000, n * n),
            proptest::collection::vec(-1000i64..1000, n),
            proptest::option::of("[a-z_]{1,8}"),
        )
            .prop_map(move |(m, s, name)| {
                let entry = |i: usize, j: usize| m[i.min(j) * n + i.max(j)];
                let matrix = (0..n).map(|i| (0..n).map(|j| entry(i, j).into()).collect()).collect();
                let chern = (0..n).map(|i| (s[i] * 2 + entry(i, i).rem_euclid(2)).into()).collect();
                PresentationFile { matrix, chern, name }
            })
    })
}

proptest! {
    #[test]
    fn round_trip(f in presentation_file()) {
        let p = f.to_presentation().unwrap();
        let json = f.to_json();
        let back = PresentationFile::parse(&json).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(back.to_json(), json);
        prop_assert_eq!(PresentationFile::from_presentation(&p, f.name.clone()), f);
    }
}
