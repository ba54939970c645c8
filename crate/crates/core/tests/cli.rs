use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SHIFT_DOUBLE: &str = "letters 2\nsamples 20\nseed 4\ntarget shift\n  breaks\n  segment 1 1\ntarget double\n  breaks\n  segment 2 0\n";

fn autq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_autq")).args(args).output().unwrap()
}

fn build(dir: &Path, spec: &str, extra: &[&str]) -> Output {
    let spec_path = dir.join("spec.in");
    fs::write(&spec_path, spec).unwrap();
    let out = dir.join("out");
    let mut args = vec!["build", spec_path.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    autq(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn identity_spec() {
    let tmp = tempfile::tempdir().unwrap();
    let o = build(tmp.path(), "target id\n", &["--samples", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("verdict all-equal"));
    let o = autq(&["eval", tmp.path().join("out").to_str().unwrap(), "--word", "F", "--point", "0"]);
    assert_eq!(stdout(&o).trim(), "1/1");
}

#[test]
fn shift_and_double_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let o = build(tmp.path(), SHIFT_DOUBLE, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = tmp.path().join("out");
    let d = dir.to_str().unwrap();
    for f in ["spec.txt", "words.txt", "generators.txt", "manifest.json", "report.json"] {
        assert!(dir.join(f).exists(), "{f}");
    }

    // same seed, byte-identical reports
    let a = autq(&["verify", d, "--seed", "11", "--format", "json"]);
    let b = autq(&["verify", d, "--seed", "11", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let more = autq(&["verify", d, "--samples", "40"]);
    assert_eq!(more.status.code(), Some(0));

    let f = autq(&["eval", d, "--word", "F", "--point", "0", "--tamed"]);
    assert_eq!(stdout(&f).trim(), "1/1");
    let f = autq(&["eval", d, "--word", "F", "--point", "-3/2"]);
    let h = autq(&["eval", d, "--word", "H", "--point", stdout(&f).trim()]);
    let fh = autq(&["eval", d, "--word", "F H", "--point", "-3/2"]);
    assert_eq!(stdout(&fh), stdout(&h));

    let empty = autq(&["eval", d, "--word", "", "--point", "0"]);
    assert_eq!(empty.status.code(), Some(2));

    // a corrupted generator table is caught at the recorded point
    let path = dir.join("generators.txt");
    let text = fs::read_to_string(&path).unwrap();
    let line = text.lines().find(|l| l.trim_start().starts_with("at 1/2 ->")).unwrap().to_string();
    fs::write(&path, text.replacen(&line, "  at 1/2 -> 9999/7", 1)).unwrap();
    let bad = autq(&["verify", d]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("at 1/2"), "{}", stdout(&bad));
}

#[test]
fn builds_are_deterministic() {
    let one = tempfile::tempdir().unwrap();
    let two = tempfile::tempdir().unwrap();
    let spec = "letters 8\nsamples 15\nseed 2\ntarget kink\n  breaks 0\n  segment 1 0\n  segment 3 0\ntarget id\n";
    assert_eq!(build(one.path(), spec, &[]).status.code(), Some(0));
    assert_eq!(build(two.path(), spec, &[]).status.code(), Some(0));
    for f in ["spec.txt", "words.txt", "generators.txt", "manifest.json", "report.json"] {
        assert_eq!(fs::read(one.path().join("out").join(f)).unwrap(), fs::read(two.path().join("out").join(f)).unwrap(), "{f}");
    }
}

#[test]
fn input_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = build(tmp.path(), "target t\n  breaks\n  segment 1/0 1\n", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert_eq!(build(tmp.path(), "target t\n", &["--letters", "5"]).status.code(), Some(2));
    assert_eq!(autq(&["verify", tmp.path().join("missing").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn words_listing() {
    let o = autq(&["words", "--letters", "2", "--n-max", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next().unwrap(), "word 1 length 304452288 nodes 8068 depth 10 letters 2");
    let o = autq(&["words", "--letters", "8", "--n-max", "1", "--full"]);
    assert!(stdout(&o).contains("[a^(b^-1), a^(b^2 c)]^(f^2)"));
}
