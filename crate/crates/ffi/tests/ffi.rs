use std::ffi::{c_char, CStr, CString};
use std::ptr;

use hochops_ffi::*;
use serde_json::Value;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = hochops_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

unsafe fn take_json(p: *mut c_char) -> Value {
    let v = serde_json::from_str(CStr::from_ptr(p).to_str().unwrap()).unwrap();
    hochops_string_free(p);
    v
}

#[test]
fn op_shape_and_json() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(hochops_op(c("sh").as_ptr(), 2, 3, ptr::null(), &mut m), HochopsStatus::Ok);
        assert!(hochops_last_error().is_null());
        let (mut terms, mut src, mut tgt) = (0, 0, 0);
        assert_eq!(hochops_morphism_shape(m, &mut terms, &mut src, &mut tgt), HochopsStatus::Ok);
        assert_eq!((terms, src, tgt), (5, 4, 4));
        let mut s = ptr::null_mut();
        assert_eq!(hochops_morphism_to_json(m, &mut s), HochopsStatus::Ok);
        let v = take_json(s);
        assert_eq!(v["terms"].as_array().unwrap().len(), 5);

        // B after sh^1 = B
        let mut id = ptr::null_mut();
        let mut b = ptr::null_mut();
        let mut comp = ptr::null_mut();
        assert_eq!(hochops_op(c("sh").as_ptr(), 1, 3, ptr::null(), &mut id), HochopsStatus::Ok);
        assert_eq!(hochops_op(c("B").as_ptr(), 0, 3, c("fp:7").as_ptr(), &mut b), HochopsStatus::Ok);
        assert_eq!(hochops_morphism_compose(id, b, &mut comp), HochopsStatus::FieldMismatch);
        hochops_morphism_free(b);
        assert_eq!(hochops_op(c("B").as_ptr(), 0, 3, ptr::null(), &mut b), HochopsStatus::Ok);
        assert_eq!(hochops_morphism_compose(id, b, &mut comp), HochopsStatus::Ok);
        hochops_morphism_shape(comp, &mut terms, &mut src, &mut tgt);
        assert_eq!((terms, src, tgt), (4, 4, 5));
        for h in [m, id, b, comp] {
            hochops_morphism_free(h);
        }
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(hochops_op(c("zz").as_ptr(), 1, 1, ptr::null(), &mut m), HochopsStatus::InvalidArgument);
        assert!(last_error().contains("zz"));
        assert!(m.is_null());
        assert_eq!(hochops_op(ptr::null(), 1, 1, ptr::null(), &mut m), HochopsStatus::NullPointer);
        assert_eq!(hochops_op(c("sh").as_ptr(), 1, 1, c("fp:4").as_ptr(), &mut m), HochopsStatus::InvalidArgument);
        assert_eq!(hochops_op(c("sh").as_ptr(), 1, 1, ptr::null(), ptr::null_mut()), HochopsStatus::NullPointer);
        assert_eq!(
            hochops_morphism_shape(ptr::null(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()),
            HochopsStatus::NullPointer
        );
        hochops_morphism_free(ptr::null_mut());
        hochops_string_free(ptr::null_mut());
        let v = CStr::from_ptr(hochops_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn chain_actions() {
    unsafe {
        let mut w = ptr::null_mut();
        assert_eq!(
            hochops_chain_word(c("poly4").as_ptr(), c("1⊗t⊗t^2").as_ptr(), ptr::null(), &mut w),
            HochopsStatus::Ok
        );
        let mut bw = ptr::null_mut();
        assert_eq!(hochops_act(c("B").as_ptr(), w, &mut bw), HochopsStatus::Ok);
        let mut bbw = ptr::null_mut();
        assert_eq!(hochops_act(c("B").as_ptr(), bw, &mut bbw), HochopsStatus::Ok);
        let mut zero = true;
        assert_eq!(hochops_chain_is_zero(bw, &mut zero), HochopsStatus::Ok);
        assert!(!zero);
        // B twice leaves only words with a unit past the first slot
        let mut s = ptr::null_mut();
        assert_eq!(hochops_chain_to_json(bbw, &mut s), HochopsStatus::Ok);
        for t in take_json(s)["terms"].as_array().unwrap() {
            assert!(t["word"].as_array().unwrap()[1..].iter().any(|x| x == "1"), "{t}");
        }

        assert_eq!(hochops_chain_to_json(w, &mut s), HochopsStatus::Ok);
        let j = take_json(s);
        assert_eq!(j["algebra"], "poly4");
        let mut back = ptr::null_mut();
        let js = c(&j.to_string());
        assert_eq!(hochops_chain_from_json(js.as_ptr(), ptr::null(), &mut back), HochopsStatus::Ok);
        let mut sh = ptr::null_mut();
        assert_eq!(hochops_act(c("sh:1").as_ptr(), back, &mut sh), HochopsStatus::Ok);
        assert_eq!(hochops_chain_to_json(sh, &mut s), HochopsStatus::Ok);
        assert_eq!(take_json(s), j);

        let mut bad = ptr::null_mut();
        assert_eq!(hochops_act(c("sh:x").as_ptr(), w, &mut bad), HochopsStatus::Parse);
        assert_eq!(
            hochops_chain_word(c("nope").as_ptr(), c("1").as_ptr(), ptr::null(), &mut bad),
            HochopsStatus::Parse
        );
        for h in [w, bw, bbw, back, sh] {
            hochops_chain_free(h);
        }
    }
}

#[test]
fn homology_and_verify() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(hochops_homology_json(2, 0, 1, ptr::null(), &mut s), HochopsStatus::Ok);
        let h = take_json(s);
        for row in h["rows"].as_array().unwrap() {
            assert_eq!(row["class_rank"], 3);
        }

        let mut r = ptr::null_mut();
        let bounds = c(r#"{"max_n": 4, "field": "fp:5"}"#);
        assert_eq!(hochops_verify(c("prop23").as_ptr(), bounds.as_ptr(), &mut r), HochopsStatus::Ok);
        let (mut passed, mut failures) = (false, 99usize);
        assert_eq!(hochops_report_summary(r, &mut passed, &mut failures), HochopsStatus::Ok);
        assert!(passed);
        assert_eq!(failures, 0);
        assert_eq!(hochops_report_to_json(r, &mut s), HochopsStatus::Ok);
        let v = take_json(s);
        assert_eq!(v["bounds"]["field"], "fp:5");
        hochops_report_free(r);

        let bad = c(r#"{"max_m": 4}"#);
        assert_eq!(hochops_verify(c("prop23").as_ptr(), bad.as_ptr(), &mut r), HochopsStatus::InvalidArgument);
        assert_eq!(hochops_verify(c("prop99").as_ptr(), ptr::null(), &mut r), HochopsStatus::Parse);
    }
}

#[test]
fn header_is_current() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hochops.h")).unwrap();
    for name in [
        "hochops_op",
        "hochops_act",
        "hochops_verify",
        "hochops_report_summary",
        "hochops_last_error",
        "typedef struct HochopsChain HochopsChain",
        "HOCHOPS_STATUS_PANIC = 8",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
}

#[test]
fn c_program_links_and_runs() {
    use std::path::Path;
    use std::process::Command;
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = Path::new(env!("CARGO_TARGET_TMPDIR")).parent().unwrap().join("debug");
    let so = profile_dir.join("libhochops_ffi.so");
    if !so.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or shared library at {}", so.display());
        return;
    }
    let exe = Path::new(env!("CARGO_TARGET_TMPDIR")).join("hochops_smoke");
    let status = Command::new("cc")
        .arg(dir.join("examples/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg("-L")
        .arg(&profile_dir)
        .arg(format!("-Wl,-rpath,{}", profile_dir.display()))
        .args(["-lhochops_ffi", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "terms=5 passed=1 suite=1\n");
}
