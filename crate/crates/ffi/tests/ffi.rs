use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use autq_ffi::*;

fn take(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { autq_string_free(p) };
    s
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(autq_last_error()) }.to_str().unwrap().to_string()
}

fn parse(text: &str) -> Result<*mut AutqSpec, AutqStatus> {
    let c = CString::new(text).unwrap();
    let mut spec = ptr::null_mut();
    match unsafe { autq_spec_parse(c.as_ptr(), &mut spec) } {
        AutqStatus::Ok => Ok(spec),
        s => Err(s),
    }
}

#[test]
fn parse_errors_report_the_line() {
    assert_eq!(parse("target t\n  breaks\n  segment 1/0 1\n").unwrap_err(), AutqStatus::Parse);
    assert!(last_error().contains("line 3"), "{}", last_error());
    let mut spec = ptr::null_mut();
    assert_eq!(unsafe { autq_spec_parse(ptr::null(), &mut spec) }, AutqStatus::NullArgument);
}

#[test]
fn build_eval_verify() {
    let spec = parse("letters 8\ntarget shift\n  breaks\n  segment 1 1\ntarget id\n").unwrap();
    let mut n = 0usize;
    assert_eq!(unsafe { autq_spec_targets(spec, &mut n) }, AutqStatus::Ok);
    assert_eq!(n, 2);
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { autq_build(spec, &mut b) }, AutqStatus::Ok);
    unsafe { autq_spec_free(spec) };

    let mut verdict = 0;
    assert_eq!(unsafe { autq_verify(b, 20, 3, &mut verdict) }, AutqStatus::Ok);
    assert_eq!(verdict, 1);

    let f = CString::new("f").unwrap();
    let x = CString::new("-5/3").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { autq_eval(b, f.as_ptr(), x.as_ptr(), 1, &mut out) }, AutqStatus::Ok);
    assert_eq!(take(out), "-2/3");

    let bad = CString::new("zz").unwrap();
    assert_eq!(unsafe { autq_eval(b, bad.as_ptr(), x.as_ptr(), 0, &mut out) }, AutqStatus::Parse);
    let empty = CString::new("").unwrap();
    assert_eq!(unsafe { autq_eval(b, empty.as_ptr(), x.as_ptr(), 0, &mut out) }, AutqStatus::Parse);
    unsafe { autq_build_free(b) };
}

#[test]
fn universal_words() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { autq_word_length(2, 1, &mut out) }, AutqStatus::Ok);
    assert_eq!(take(out), "304452288");
    assert_eq!(unsafe { autq_word(8, 1, &mut out) }, AutqStatus::Ok);
    assert!(take(out).starts_with("[a^(b^-1), a^(b^2 c)]^(f^2)"));
    assert_eq!(unsafe { autq_word(3, 1, &mut out) }, AutqStatus::Parse);
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include").join("autq.h")
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in ["autq_spec_parse", "autq_build", "autq_eval", "autq_verify", "autq_word_length", "autq_last_error", "typedef struct AutqBuild AutqBuild"] {
        assert!(h.contains(name), "{name}");
    }
}

/// Compiles a C program against the header and the shared library, if a C compiler is present.
#[test]
fn c_program_links() {
    let Ok(cc) = Command::new("cc").arg("--version").output() else { return };
    if !cc.status.success() {
        return;
    }
    // the test binary lives in target/<profile>/deps; the cdylib one level up
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap().to_path_buf();
    if !lib_dir.join("libautq_ffi.so").exists() {
        eprintln!("no shared library in {}; skipped", lib_dir.display());
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("t.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <string.h>
#include "autq.h"
int main(void) {
    AutqSpec *spec = NULL;
    if (autq_spec_parse("letters 8\ntarget shift\n  breaks\n  segment 1 1\n", &spec) != AUTQ_STATUS_OK) return 2;
    AutqBuild *b = NULL;
    if (autq_build(spec, &b) != AUTQ_STATUS_OK) { puts(autq_last_error()); return 3; }
    autq_spec_free(spec);
    char *y = NULL;
    if (autq_eval(b, "f", "0", 1, &y) != AUTQ_STATUS_OK) return 4;
    int ok = strcmp(y, "1/1") == 0;
    autq_string_free(y);
    int verdict = 0;
    if (autq_verify(b, 10, 1, &verdict) != AUTQ_STATUS_OK || !verdict) return 5;
    autq_build_free(b);
    return ok ? 0 : 6;
}
"#,
    )
    .unwrap();
    let bin = tmp.path().join("t");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg("-L")
        .arg(&lib_dir)
        .arg("-lautq_ffi")
        .arg("-o")
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&bin).env("LD_LIBRARY_PATH", &lib_dir).status().unwrap();
    assert_eq!(run.code(), Some(0));
}
