//! C ABI over `cbpv-core`.
//!
//! Signatures, models and glued models live behind opaque handles created by
//! `*_from_json` and released by the matching `*_free`. Every fallible call returns a
//! [`CbpvStatus`]; after a failure `cbpv_last_error_message` describes it. Strings
//! handed to the caller are owned by the caller and released with `cbpv_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cbpv_core::eval::{eval_comp, eval_value};
use cbpv_core::lindcheck::{check_fibration_property, check_lind_axioms, parse_lind_input, LindInput};
use cbpv_core::logrel::{check_basic_lemma, load_glue, parse_corpus, GluedModel};
use cbpv_core::semcore::{load_model, ModelRef};
use cbpv_core::syntax::{parse_program, Signature, Term};
use cbpv_core::typecheck::{self, Context};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CbpvStatus {
    Ok = 0,
    /// The check ran and found a counterexample or violation.
    CheckFailed = 1,
    NullArgument = 2,
    InvalidUtf8 = 3,
    /// Malformed input: JSON, syntax, types or configuration.
    InvalidInput = 4,
    /// A panic was caught at the boundary.
    Internal = 5,
}

/// A parsed signature.
pub struct CbpvSignature(Signature);

/// A model built from a configuration.
pub struct CbpvModel(ModelRef);

/// A glued model built from a gluing configuration.
pub struct CbpvGlue(GluedModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg.into()));
}

struct Fail(CbpvStatus, String);

fn invalid(e: impl std::fmt::Display) -> Fail {
    Fail(CbpvStatus::InvalidInput, e.to_string())
}

/// Runs `f`, recording any error or panic for `cbpv_last_error_message`.
fn guard(f: impl FnOnce() -> Result<CbpvStatus, Fail>) -> CbpvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Fail(s, m))) => {
            set_error(m);
            s
        }
        Err(_) => {
            set_error("internal error: panic caught at the C boundary");
            CbpvStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(CbpvStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(CbpvStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn out_ptr<T>(p: *mut *mut T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail(CbpvStatus::NullArgument, format!("{what} is null")));
    }
    *p = ptr::null_mut();
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(CbpvStatus::NullArgument, format!("{what} is null")))
}

fn c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s).map(CString::into_raw).map_err(|_| Fail(CbpvStatus::Internal, "output contains a NUL byte".into()))
}

/// The last error on this thread as a fresh string, or null if there is none.
#[no_mangle]
pub extern "C" fn cbpv_last_error_message() -> *mut c_char {
    LAST_ERROR
        .with(|e| e.borrow().clone())
        .and_then(|m| CString::new(m).ok())
        .map_or(ptr::null_mut(), CString::into_raw)
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cbpv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbpv_signature_from_json(json: *const c_char, out: *mut *mut CbpvSignature) -> CbpvStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let sig = Signature::from_json(text(json, "json")?).map_err(invalid)?;
        *out = Box::into_raw(Box::new(CbpvSignature(sig)));
        Ok(CbpvStatus::Ok)
    })
}

/// # Safety
/// `sig` must come from `cbpv_signature_from_json` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cbpv_signature_free(sig: *mut CbpvSignature) {
    if !sig.is_null() {
        drop(Box::from_raw(sig));
    }
}

/// Infers the type of a closed program; `out_type` receives it printed.
/// An ill-typed program yields `CheckFailed`.
///
/// # Safety
/// Pointers must be valid as described for the other functions.
#[no_mangle]
pub unsafe extern "C" fn cbpv_typecheck(
    sig: *const CbpvSignature,
    program: *const c_char,
    out_type: *mut *mut c_char,
) -> CbpvStatus {
    guard(|| {
        out_ptr(out_type, "out_type")?;
        let sig = &handle(sig, "sig")?.0;
        let t = parse_program(text(program, "program")?, sig).map_err(invalid)?;
        let ctx = Context::new();
        let ty = match &t {
            Term::Comp(m) => typecheck::infer_comp(&ctx, m, sig).map(|b| b.to_string()),
            Term::Value(v) => typecheck::infer_value(&ctx, v, sig).map(|a| a.to_string()),
        };
        match ty {
            Ok(ty) => {
                *out_type = c_string(ty)?;
                Ok(CbpvStatus::Ok)
            }
            Err(e) => Err(Fail(CbpvStatus::CheckFailed, e.to_string())),
        }
    })
}

/// Builds a model; `sig` may be null when the configuration declares its own signature.
///
/// # Safety
/// Pointers must be valid as described for the other functions.
#[no_mangle]
pub unsafe extern "C" fn cbpv_model_from_json(
    json: *const c_char,
    sig: *const CbpvSignature,
    out: *mut *mut CbpvModel,
) -> CbpvStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let sig = sig.as_ref().map(|s| &s.0);
        let m = load_model(text(json, "json")?, sig).map_err(invalid)?;
        *out = Box::into_raw(Box::new(CbpvModel(m)));
        Ok(CbpvStatus::Ok)
    })
}

/// # Safety
/// `model` must come from `cbpv_model_from_json` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cbpv_model_free(model: *mut CbpvModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Evaluates a closed program; `out_json` receives `{"type": …, "denotation": …}`.
///
/// # Safety
/// Pointers must be valid as described for the other functions.
#[no_mangle]
pub unsafe extern "C" fn cbpv_eval(
    model: *const CbpvModel,
    program: *const c_char,
    out_json: *mut *mut c_char,
) -> CbpvStatus {
    guard(|| {
        out_ptr(out_json, "out_json")?;
        let m = &handle(model, "model")?.0;
        let sig = m.signature();
        let t = parse_program(text(program, "program")?, sig).map_err(invalid)?;
        let (ctx, env) = (Context::new(), Default::default());
        let (ty, v) = match &t {
            Term::Comp(c) => {
                let b = typecheck::infer_comp(&ctx, c, sig).map_err(invalid)?;
                (b.to_string(), eval_comp(m, &env, c, &b).map_err(invalid)?)
            }
            Term::Value(val) => {
                let a = typecheck::infer_value(&ctx, val, sig).map_err(invalid)?;
                (a.to_string(), eval_value(m, &env, val, &a).map_err(invalid)?)
            }
        };
        *out_json = c_string(serde_json::json!({"type": ty, "denotation": v.to_string()}).to_string())?;
        Ok(CbpvStatus::Ok)
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbpv_glue_from_json(json: *const c_char, out: *mut *mut CbpvGlue) -> CbpvStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let g = load_glue(text(json, "json")?).map_err(invalid)?;
        *out = Box::into_raw(Box::new(CbpvGlue(g)));
        Ok(CbpvStatus::Ok)
    })
}

/// # Safety
/// `glue` must come from `cbpv_glue_from_json` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cbpv_glue_free(glue: *mut CbpvGlue) {
    if !glue.is_null() {
        drop(Box::from_raw(glue));
    }
}

/// Checks the basic lemma on a corpus (one term per line, `#` comments). The JSON
/// report is written to `out_json` whether or not the check passes.
///
/// # Safety
/// Pointers must be valid as described for the other functions.
#[no_mangle]
pub unsafe extern "C" fn cbpv_logrel_check(
    glue: *const CbpvGlue,
    corpus: *const c_char,
    out_json: *mut *mut c_char,
) -> CbpvStatus {
    guard(|| {
        out_ptr(out_json, "out_json")?;
        let g = &handle(glue, "glue")?.0;
        let entries = parse_corpus(text(corpus, "corpus")?, g.base().signature()).map_err(invalid)?;
        let r = check_basic_lemma(g, &entries).map_err(invalid)?;
        *out_json = c_string(serde_json::to_string(&r).map_err(invalid)?)?;
        Ok(if r.passed() { CbpvStatus::Ok } else { CbpvStatus::CheckFailed })
    })
}

/// Checks a locally indexed category, or a locally indexed functor for the fibration
/// property, within `budget` search steps. The JSON report goes to `out_json`.
///
/// # Safety
/// Pointers must be valid as described for the other functions.
#[no_mangle]
pub unsafe extern "C" fn cbpv_lind_check(json: *const c_char, budget: u64, out_json: *mut *mut c_char) -> CbpvStatus {
    guard(|| {
        out_ptr(out_json, "out_json")?;
        let (report, ok) = match parse_lind_input(text(json, "json")?).map_err(invalid)? {
            LindInput::Category(l) => {
                let r = check_lind_axioms(&l).map_err(invalid)?;
                (serde_json::to_string(&r).map_err(invalid)?, r.valid())
            }
            LindInput::Functor(f) => {
                let r = check_fibration_property(&f, budget).map_err(invalid)?;
                (serde_json::to_string(&r).map_err(invalid)?, r.is_fibration())
            }
        };
        *out_json = c_string(report)?;
        Ok(if ok { CbpvStatus::Ok } else { CbpvStatus::CheckFailed })
    })
}

/// The library version, as a static string.
#[no_mangle]
pub extern "C" fn cbpv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
