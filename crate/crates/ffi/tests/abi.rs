use std::ffi::{c_char, CStr, CString};
use std::ptr;

use cbpv_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    cbpv_string_free(s);
    out
}

const ND: &str = r#"{"value_bases": ["b"], "operations": [{"name": "or", "arity": 2}, {"name": "fail", "arity": 0}]}"#;

#[test]
fn typecheck_round_trip() {
    unsafe {
        let mut sig = ptr::null_mut();
        assert_eq!(cbpv_signature_from_json(c(ND).as_ptr(), &mut sig), CbpvStatus::Ok);
        let mut ty = ptr::null_mut();
        assert_eq!(cbpv_typecheck(sig, c("or(return (); fail)").as_ptr(), &mut ty), CbpvStatus::Ok);
        assert_eq!(take(ty), "F 1");
        assert_eq!(cbpv_typecheck(sig, c("force ()").as_ptr(), &mut ty), CbpvStatus::CheckFailed);
        assert!(ty.is_null());
        assert!(!take(cbpv_last_error_message()).is_empty());
        cbpv_signature_free(sig);
    }
}

#[test]
fn null_and_bad_input() {
    unsafe {
        let mut sig = ptr::null_mut();
        assert_eq!(cbpv_signature_from_json(ptr::null(), &mut sig), CbpvStatus::NullArgument);
        assert_eq!(take(cbpv_last_error_message()), "json is null");
        assert_eq!(cbpv_signature_from_json(c("{").as_ptr(), &mut sig), CbpvStatus::InvalidInput);
        assert!(sig.is_null());
        assert_eq!(cbpv_signature_from_json(c(ND).as_ptr(), ptr::null_mut()), CbpvStatus::NullArgument);
        let mut out = ptr::null_mut();
        assert_eq!(cbpv_eval(ptr::null(), c("return ()").as_ptr(), &mut out), CbpvStatus::NullArgument);
        let bad = [0xffu8, 0];
        assert_eq!(cbpv_signature_from_json(bad.as_ptr().cast(), &mut sig), CbpvStatus::InvalidUtf8);
        cbpv_string_free(ptr::null_mut());
        cbpv_signature_free(ptr::null_mut());
    }
}

#[test]
fn eval_in_a_model() {
    let model = r#"{"kind": "algebra", "monad": {"kind": "list"}, "bases": {"b": ["a", "c"]}}"#;
    unsafe {
        let mut sig = ptr::null_mut();
        assert_eq!(cbpv_signature_from_json(c(ND).as_ptr(), &mut sig), CbpvStatus::Ok);
        let mut m = ptr::null_mut();
        assert_eq!(cbpv_model_from_json(c(model).as_ptr(), sig, &mut m), CbpvStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(cbpv_eval(m, c("or(return (); or(fail; return ()))").as_ptr(), &mut out), CbpvStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v, serde_json::json!({"type": "F 1", "denotation": "[(), ()]"}));
        // Without a signature the configuration is incomplete.
        let mut m2 = ptr::null_mut();
        assert_eq!(cbpv_model_from_json(c(model).as_ptr(), ptr::null(), &mut m2), CbpvStatus::InvalidInput);
        cbpv_model_free(m);
        cbpv_signature_free(sig);
    }
}

#[test]
fn logrel_and_lind_reports() {
    let glue = r#"{"model": {"kind": "algebra",
        "signature": {"value_bases": ["b"], "constants": [{"name": "throw", "type": "F b"}]},
        "monad": {"kind": "exception", "errors": ["e1", "e2"]},
        "bases": {"b": ["a", "b"]}, "consts": {"throw": "raise e2"}},
      "mode": "unary", "lifting": {"kind": "exception", "errors": ["e1"]},
      "base_rels": {"b": {"members": ["a"]}}}"#;
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(cbpv_glue_from_json(c(glue).as_ptr(), &mut g), CbpvStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(cbpv_logrel_check(g, c("throw\n").as_ptr(), &mut out), CbpvStatus::CheckFailed);
        let r: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(r["counterexamples"][0]["term"], "throw");
        cbpv_glue_free(g);

        let f = cbpv_core::lindcheck::pred_truncation(1).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(cbpv_lind_check(c(&json).as_ptr(), u64::MAX, &mut out), CbpvStatus::Ok);
        let r: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert!(r["failures"].as_array().unwrap().is_empty());
        assert_eq!(cbpv_lind_check(c(&json).as_ptr(), 10, &mut out), CbpvStatus::InvalidInput);
        assert!(take(cbpv_last_error_message()).contains("budget"));
    }
}

#[test]
fn version_and_header() {
    let v = unsafe { CStr::from_ptr(cbpv_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/cbpv.h")).unwrap();
    for name in [
        "cbpv_signature_from_json",
        "cbpv_lind_check",
        "cbpv_string_free",
        "CBPV_STATUS_CHECK_FAILED",
        "typedef struct CbpvGlue CbpvGlue",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
