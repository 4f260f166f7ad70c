use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn tlw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tlw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn proof_checking_round_trip() {
    let out = tlw(&["check-proof", fixture("refl.prf").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("a = a"));
}

#[test]
fn eval_exit_codes_follow_the_verdict() {
    let mdl = fixture("point.mdl");
    let thy = fixture("x.thy");
    let sat = tlw(&["eval", mdl.to_str().unwrap(), "a = a", "--theory", thy.to_str().unwrap()]);
    assert_eq!(sat.status.code(), Some(0));
    let ref_ = tlw(&["eval", mdl.to_str().unwrap(), "a = b", "--theory", thy.to_str().unwrap()]);
    assert_eq!(ref_.status.code(), Some(1));
}

#[test]
fn json_reports_are_versioned_and_deterministic() {
    let mdl = fixture("point.mdl");
    let thy = fixture("x.thy");
    let args = [
        "--json",
        "eval",
        mdl.to_str().unwrap(),
        "a = a",
        "--theory",
        thy.to_str().unwrap(),
    ];
    let first = tlw(&args);
    let second = tlw(&args);
    assert_eq!(first.stdout, second.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["verdict"], "satisfied");
}

#[test]
fn countermodel_search_refutes_excluded_middle_in_omega() {
    let thy = fixture("prop.thy");
    let out = tlw(&[
        "--json",
        "countermodel",
        thy.to_str().unwrap(),
        "p() \\/ ~p()",
        "--flavor",
        "omega",
        "--max-points",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "found");
    assert!(v["witness"].as_str().unwrap().contains("rel p"));
}

#[test]
fn max_points_cap_is_enforced() {
    let thy = fixture("prop.thy");
    let out = Command::new(env!("CARGO_BIN_EXE_tlw"))
        .args([
            "countermodel",
            thy.to_str().unwrap(),
            "p() \\/ ~p()",
            "--max-points",
            "2",
        ])
        .env("TLW_MAX_POINTS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_errors_exit_two() {
    let missing = tlw(&["parse", "no-such-file.thy"]);
    assert_eq!(missing.status.code(), Some(2));
    let bad = tlw(&["frobnicate"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn fuzz_soundness_smoke() {
    let out = tlw(&[
        "--json",
        "fuzz-soundness",
        "--count",
        "10",
        "--seed",
        "7",
        "--mode",
        "lambda",
        "--models",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "sound");
    assert_eq!(v["satisfied"], v["checks"]);
}

#[test]
fn space_and_sheaf_subcommands() {
    let sp = tlw(&["space", "check", fixture("sierpinski.space").to_str().unwrap()]);
    assert_eq!(sp.status.code(), Some(0));
    let sheaf = fixture("two.sheaf");
    for sub in ["check", "sections", "decidable", "etale"] {
        let out = tlw(&["sheaf", sub, sheaf.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "sheaf {}", sub);
    }
}

#[test]
fn henkin_subcommands() {
    let hk = fixture("m2.hk");
    let thy = fixture("xc.thy");
    let inside = tlw(&[
        "henkin", "open", hk.to_str().unwrap(), "(z : X) = c", "3",
        "--theory", thy.to_str().unwrap(),
    ]);
    assert_eq!(inside.status.code(), Some(0));
    let outside = tlw(&[
        "henkin", "open", hk.to_str().unwrap(), "(z : X) = c", "4",
        "--theory", thy.to_str().unwrap(),
    ]);
    assert_eq!(outside.status.code(), Some(1));
    let fiber = tlw(&[
        "henkin", "fiber", "--theory", thy.to_str().unwrap(), "--type", "X",
        hk.to_str().unwrap(), hk.to_str().unwrap(),
    ]);
    assert_eq!(fiber.status.code(), Some(0));
    let closure = tlw(&[
        "henkin", "check-closure", hk.to_str().unwrap(),
        "--theory", thy.to_str().unwrap(), "--witness", "{x:X | x = c}",
    ]);
    assert_eq!(closure.status.code(), Some(0));
}

#[test]
fn corpus_passes_and_flags_stale_goldens() {
    let corpus = fixture("corpus");
    let ok = tlw(&["corpus", corpus.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));

    // A copy with one corrupted golden must fail and name the entry.
    let root = std::env::temp_dir().join(format!("tlw-corpus-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&root);
    let stale = root.join("corpus");
    std::fs::create_dir_all(&stale).unwrap();
    for entry in std::fs::read_dir(&corpus).unwrap() {
        let p = entry.unwrap().path();
        std::fs::copy(&p, stale.join(p.file_name().unwrap())).unwrap();
    }
    // Entries reference ../x.thy etc., so mirror the fixture files too.
    for name in [
        "x.thy", "xc.thy", "prop.thy", "refl.prf", "point.mdl", "point.space", "x2.sheaf", "m2.hk",
    ] {
        std::fs::copy(fixture(name), root.join(name)).unwrap();
    }
    std::fs::write(stale.join("parse-x.json"), "{}\n").unwrap();
    let out = tlw(&["corpus", stale.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("parse-x"));
    let _ = std::fs::remove_dir_all(&root);
}
