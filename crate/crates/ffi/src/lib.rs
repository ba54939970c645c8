//! C ABI over `autq`: opaque handles, status codes, and a thread-local error message.
//!
//! Every function returns an [`AutqStatus`]. Strings handed out must be released with
//! [`autq_string_free`]; handles with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use autq::cli::{build, sample_points, universal_word, Built};
use autq::order::rational::{fmt_rational, parse_rational};
use autq::spec::SequenceSpec;
use autq::word::{evaluate, Word};
use autq::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AutqStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Construction = 4,
    Evaluation = 5,
    Panic = 6,
}

/// A parsed sequence spec.
pub struct AutqSpec(SequenceSpec);

/// Generators and words built from a spec.
pub struct AutqBuild {
    spec: SequenceSpec,
    built: Built,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: AutqStatus, msg: &str) -> AutqStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> AutqStatus {
    match e {
        Error::Parse { .. } | Error::Unassigned(_) => AutqStatus::Parse,
        Error::Stage { source, .. } => status_of(source),
        Error::Construction(_) | Error::Certificate { .. } | Error::Invalid(_) => AutqStatus::Construction,
        _ => AutqStatus::Evaluation,
    }
}

fn guarded(f: impl FnOnce() -> AutqStatus) -> AutqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(AutqStatus::Panic, "internal panic"),
    }
}

unsafe fn arg_str<'a>(p: *const c_char) -> Result<&'a str, AutqStatus> {
    if p.is_null() {
        return Err(fail(AutqStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(AutqStatus::InvalidUtf8, "argument is not UTF-8"))
}

fn hand_out(s: String, out: *mut *mut c_char) -> AutqStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            AutqStatus::Ok
        }
        Err(_) => fail(AutqStatus::Evaluation, "result contains a nul byte"),
    }
}

/// Message of the last failure on this thread; owned by the library, valid until the next call.
#[no_mangle]
pub extern "C" fn autq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn autq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses spec text; `*out` receives a handle.
///
/// # Safety
/// `spec_text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn autq_spec_parse(spec_text: *const c_char, out: *mut *mut AutqSpec) -> AutqStatus {
    guarded(|| {
        if out.is_null() {
            return fail(AutqStatus::NullArgument, "null out pointer");
        }
        let t = match arg_str(spec_text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match SequenceSpec::parse(t) {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(AutqSpec(spec)));
                AutqStatus::Ok
            }
            Err(e) => fail(status_of(&e), &e.to_string()),
        }
    })
}

/// Number of targets in the spec.
///
/// # Safety
/// `spec` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn autq_spec_targets(spec: *const AutqSpec, out: *mut usize) -> AutqStatus {
    if spec.is_null() || out.is_null() {
        return fail(AutqStatus::NullArgument, "null argument");
    }
    *out = (*spec).0.targets.len();
    AutqStatus::Ok
}

/// # Safety
/// `spec` must come from [`autq_spec_parse`], or be null.
#[no_mangle]
pub unsafe extern "C" fn autq_spec_free(spec: *mut AutqSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Runs the construction for the spec.
///
/// # Safety
/// `spec` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn autq_build(spec: *const AutqSpec, out: *mut *mut AutqBuild) -> AutqStatus {
    guarded(|| {
        if spec.is_null() || out.is_null() {
            return fail(AutqStatus::NullArgument, "null argument");
        }
        let spec = (*spec).0.clone();
        match build(&spec) {
            Ok(built) => {
                *out = Box::into_raw(Box::new(AutqBuild { spec, built }));
                AutqStatus::Ok
            }
            Err(e) => fail(AutqStatus::Construction, &e.to_string()),
        }
    })
}

/// # Safety
/// `b` must come from [`autq_build`], or be null.
#[no_mangle]
pub unsafe extern "C" fn autq_build_free(b: *mut AutqBuild) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Evaluates `word` at the rational `point` ("p/q"); `*out` receives "p/q".
/// `tamed` nonzero uses the letters before the final taming conjugation.
///
/// # Safety
/// Pointers must be valid; strings nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn autq_eval(
    b: *const AutqBuild,
    word: *const c_char,
    point: *const c_char,
    tamed: i32,
    out: *mut *mut c_char,
) -> AutqStatus {
    guarded(|| {
        if b.is_null() || out.is_null() {
            return fail(AutqStatus::NullArgument, "null argument");
        }
        let (w, x) = match (arg_str(word), arg_str(point)) {
            (Ok(w), Ok(x)) => (w, x),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let run = || -> autq::Result<String> {
            let w = Word::parse(w)?;
            if w.is_empty() {
                return Err(Error::parse(1, "the empty word is not a semigroup element"));
            }
            let x = parse_rational(x)?;
            let y = evaluate(&w, (*b).built.assignment(tamed != 0))?.apply_q(&x)?;
            Ok(fmt_rational(&y))
        };
        match run() {
            Ok(s) => hand_out(s, out),
            Err(e) => fail(status_of(&e), &e.to_string()),
        }
    })
}

/// Sampled check of every word against its target; `*verdict` is 1 when all agree.
/// `samples` and `seed` replace the spec's options.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn autq_verify(b: *const AutqBuild, samples: usize, seed: u64, verdict: *mut i32) -> AutqStatus {
    guarded(|| {
        if b.is_null() || verdict.is_null() {
            return fail(AutqStatus::NullArgument, "null argument");
        }
        let mut spec = (*b).spec.clone();
        spec.options.samples = samples;
        spec.options.seed = seed;
        match (*b).built.verify(&sample_points(&spec), seed) {
            Ok(r) => {
                *verdict = r.verdict as i32;
                if !r.verdict {
                    let first = r.failures().next().map(|c| format!("{} at {}", c.label, c.point)).unwrap_or_default();
                    set_error(&first);
                }
                AutqStatus::Ok
            }
            Err(e) => fail(status_of(&e), &e.to_string()),
        }
    })
}

/// The `n`-th universal word (`n >= 1`) for 2 or 8 letters, in compact text form.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn autq_word(letters: u32, n: u64, out: *mut *mut c_char) -> AutqStatus {
    guarded(|| {
        if out.is_null() {
            return fail(AutqStatus::NullArgument, "null out pointer");
        }
        if n == 0 || !matches!(letters, 2 | 8) {
            return fail(AutqStatus::Parse, "need n >= 1 and letters 2 or 8");
        }
        hand_out(universal_word(letters as u8, n).to_string(), out)
    })
}

/// Length of the `n`-th universal word, as decimal text (it can exceed 64 bits).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn autq_word_length(letters: u32, n: u64, out: *mut *mut c_char) -> AutqStatus {
    guarded(|| {
        if out.is_null() {
            return fail(AutqStatus::NullArgument, "null out pointer");
        }
        if n == 0 || !matches!(letters, 2 | 8) {
            return fail(AutqStatus::Parse, "need n >= 1 and letters 2 or 8");
        }
        hand_out(universal_word(letters as u8, n).length().to_string(), out)
    })
}
