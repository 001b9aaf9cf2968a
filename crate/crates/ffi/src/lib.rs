//! C interface to `hochops`.
//!
//! Every function returns a [`HochopsStatus`]; results come back through out
//! pointers. On failure the message is kept per thread and read with
//! [`hochops_last_error`]. Handles are opaque and freed with the matching
//! `_free` function. Strings handed out by the library are released with
//! [`hochops_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use hochops::algebra::{act, ChainJson, GradedCommutativeAlgebra, HochschildChain};
use hochops::homology::nat_homology_report;
use hochops::loday::{b_family, bk_family, connes_b_component, l_op, lambda_family, lambda_op, r_op, sh_family, sh_op};
use hochops::verify::{self, Bounds, Suite, SuiteReport};
use hochops::{Error, Field, Morphism};
use serde_json::Value;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HochopsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    FieldMismatch = 4,
    Size = 5,
    Arithmetic = 6,
    Io = 7,
    Panic = 8,
}

/// A linear combination of finite-set maps.
pub struct HochopsMorphism(Morphism);

/// A Hochschild chain over one of the built-in algebras.
pub struct HochopsChain(HochschildChain);

/// The outcome of a verification suite.
pub struct HochopsReport(SuiteReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Fail {
    Lib(Error),
    Null(&'static str),
    Utf8(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail::Lib(e)
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Fail {
        Fail::Lib(Error::Json(e))
    }
}

fn status_of(e: &Error) -> HochopsStatus {
    match e {
        Error::FieldMismatch(..) => HochopsStatus::FieldMismatch,
        Error::DivisionByZero | Error::NotACycle => HochopsStatus::Arithmetic,
        Error::SizeMismatch(_) | Error::IndexOutOfRange(_) | Error::TruncationExceeded(_) => HochopsStatus::Size,
        Error::InvalidArgument(_) => HochopsStatus::InvalidArgument,
        Error::Parse(_) | Error::Json(_) => HochopsStatus::Parse,
        Error::Io(_) => HochopsStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HochopsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            HochopsStatus::Ok
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            HochopsStatus::NullPointer
        }
        Ok(Err(Fail::Utf8(what))) => {
            set_error(format!("{what} is not valid UTF-8"));
            HochopsStatus::InvalidArgument
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            HochopsStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Utf8(what))
}

/// A null field string means the rationals.
unsafe fn field_arg(p: *const c_char) -> Result<Field, Fail> {
    if p.is_null() {
        return Ok(Field::Rational);
    }
    Ok(text(p, "field")?.parse()?)
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    *out = CString::new(s).map_err(|_| Error::InvalidArgument("interior nul".into()))?.into_raw();
    Ok(())
}

unsafe fn put_json<T: serde::Serialize>(out: *mut *mut c_char, v: &T) -> Result<(), Fail> {
    put_string(out, serde_json::to_string(v)?)
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn hochops_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static version string.
#[no_mangle]
pub extern "C" fn hochops_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn hochops_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Component `n` of an operation: `family` is one of `sh`, `lambda`, `l`,
/// `B`, `Bk` or `R`; `k` is ignored for `B`.
///
/// # Safety
/// String arguments must be nul-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hochops_op(
    family: *const c_char,
    k: usize,
    n: usize,
    field: *const c_char,
    out: *mut *mut HochopsMorphism,
) -> HochopsStatus {
    guard(|| {
        let field = field_arg(field)?;
        let m = match text(family, "family")? {
            "sh" => sh_op(n, k, field),
            "lambda" => lambda_op(n, k, field),
            "l" => l_op(n, k, field),
            "B" => connes_b_component(n, field),
            "Bk" => bk_family(n, k, field).component(n).cloned().unwrap_or_else(|| Morphism::zero(n + 1, n + 2, field)),
            "R" => r_op(n, k, field),
            other => return Err(Error::InvalidArgument(format!("unknown family '{other}'")).into()),
        };
        put(out, HochopsMorphism(m))
    })
}

/// `b ∘ a`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hochops_morphism_compose(
    a: *const HochopsMorphism,
    b: *const HochopsMorphism,
    out: *mut *mut HochopsMorphism,
) -> HochopsStatus {
    guard(|| {
        let c = handle(a, "a")?.0.compose(&handle(b, "b")?.0)?;
        put(out, HochopsMorphism(c))
    })
}

/// Number of terms, plus source and target arities. Any out pointer may be null.
///
/// # Safety
/// `m` must be live.
#[no_mangle]
pub unsafe extern "C" fn hochops_morphism_shape(
    m: *const HochopsMorphism,
    terms: *mut usize,
    source: *mut usize,
    target: *mut usize,
) -> HochopsStatus {
    guard(|| {
        let m = &handle(m, "morphism")?.0;
        for (p, v) in [(terms, m.len()), (source, m.source()), (target, m.target())] {
            if !p.is_null() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `m` must be live; free the string with [`hochops_string_free`].
#[no_mangle]
pub unsafe extern "C" fn hochops_morphism_to_json(m: *const HochopsMorphism, out: *mut *mut c_char) -> HochopsStatus {
    guard(|| put_json(out, &handle(m, "morphism")?.0))
}

/// # Safety
/// `m` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn hochops_morphism_free(m: *mut HochopsMorphism) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// A chain from its JSON form `{"algebra": .., "terms": [{"word": [..], "coeff": ..}]}`.
///
/// # Safety
/// String arguments must be nul-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hochops_chain_from_json(
    json: *const c_char,
    field: *const c_char,
    out: *mut *mut HochopsChain,
) -> HochopsStatus {
    guard(|| {
        let j: ChainJson = serde_json::from_str(text(json, "json")?)?;
        let c = HochschildChain::from_json(&j, field_arg(field)?)?;
        put(out, HochopsChain(c))
    })
}

/// A single word over a built-in algebra; `word` separates labels by
/// spaces, commas or `⊗`.
///
/// # Safety
/// String arguments must be nul-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hochops_chain_word(
    algebra: *const c_char,
    word: *const c_char,
    field: *const c_char,
    out: *mut *mut HochopsChain,
) -> HochopsStatus {
    guard(|| {
        let alg = Arc::new(GradedCommutativeAlgebra::builtin(text(algebra, "algebra")?, field_arg(field)?)?);
        let labels: Vec<&str> =
            text(word, "word")?.split(['⊗', ',', ' ']).map(str::trim).filter(|s| !s.is_empty()).collect();
        put(out, HochopsChain(HochschildChain::word(alg, &labels)?))
    })
}

/// Applies `sh:<k>`, `lambda:<k>`, `Bk:<k>` or `B`, truncated at the
/// chain's longest word.
///
/// # Safety
/// `chain` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hochops_act(
    op: *const c_char,
    chain: *const HochopsChain,
    out: *mut *mut HochopsChain,
) -> HochopsStatus {
    guard(|| {
        let c = &handle(chain, "chain")?.0;
        let op = text(op, "op")?.trim();
        let field = c.field();
        let t = c.max_word_length().saturating_sub(1);
        let (name, k) = match op.split_once(':') {
            Some((n, k)) => (n, Some(k.parse::<usize>().map_err(|_| Error::Parse(format!("bad index in '{op}'")))?)),
            None => (op, None),
        };
        let x = match (name, k) {
            ("sh", Some(k)) => sh_family(t, k, field),
            ("lambda", Some(k)) => lambda_family(t, k, field),
            ("Bk", Some(k)) => bk_family(t, k, field),
            ("B", None) => b_family(t, field),
            _ => return Err(Error::InvalidArgument(format!("unknown operation '{op}'")).into()),
        };
        put(out, HochopsChain(act(&x, c)?))
    })
}

/// # Safety
/// `c` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hochops_chain_is_zero(c: *const HochopsChain, out: *mut bool) -> HochopsStatus {
    guard(|| {
        let z = handle(c, "chain")?.0.is_zero();
        *out.as_mut().ok_or(Fail::Null("out"))? = z;
        Ok(())
    })
}

/// # Safety
/// `c` must be live; free the string with [`hochops_string_free`].
#[no_mangle]
pub unsafe extern "C" fn hochops_chain_to_json(c: *const HochopsChain, out: *mut *mut c_char) -> HochopsStatus {
    guard(|| put_json(out, &handle(c, "chain")?.0.to_json()))
}

/// # Safety
/// `c` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn hochops_chain_free(c: *mut HochopsChain) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Homology table of the truncated natural-operations complex as JSON.
///
/// # Safety
/// `out` must be writable; free the string with [`hochops_string_free`].
#[no_mangle]
pub unsafe extern "C" fn hochops_homology_json(
    truncation: usize,
    lmin: i64,
    lmax: i64,
    field: *const c_char,
    out: *mut *mut c_char,
) -> HochopsStatus {
    guard(|| {
        let r = nat_homology_report(truncation, lmin, lmax, field_arg(field)?, true)?;
        put_json(out, &r)
    })
}

/// Runs a verification suite. `bounds` is null or a JSON object overriding
/// any of `max_n`, `max_k`, `K`, `formal_truncation`, `max_signature`, `field`.
///
/// # Safety
/// String arguments must be nul-terminated or null where allowed; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hochops_verify(
    suite: *const c_char,
    bounds: *const c_char,
    out: *mut *mut HochopsReport,
) -> HochopsStatus {
    guard(|| {
        let suite: Suite = text(suite, "suite")?.parse()?;
        let mut b = serde_json::to_value(Bounds::default())?;
        if !bounds.is_null() {
            let over: Value = serde_json::from_str(text(bounds, "bounds")?)?;
            let Value::Object(over) = over else {
                return Err(Error::InvalidArgument("bounds must be a JSON object".into()).into());
            };
            for (key, v) in over {
                match b.get_mut(&key) {
                    Some(slot) => *slot = v,
                    None => return Err(Error::InvalidArgument(format!("unknown bound '{key}'")).into()),
                }
            }
        }
        let b: Bounds = serde_json::from_value(b)?;
        put(out, HochopsReport(verify::run(suite, &b)?))
    })
}

/// Whether every check passed, and how many failed. Either out pointer may be null.
///
/// # Safety
/// `r` must be live.
#[no_mangle]
pub unsafe extern "C" fn hochops_report_summary(
    r: *const HochopsReport,
    passed: *mut bool,
    failures: *mut usize,
) -> HochopsStatus {
    guard(|| {
        let r = &handle(r, "report")?.0;
        if !passed.is_null() {
            *passed = r.passed();
        }
        if !failures.is_null() {
            *failures = r.failures().count();
        }
        Ok(())
    })
}

/// # Safety
/// `r` must be live; free the string with [`hochops_string_free`].
#[no_mangle]
pub unsafe extern "C" fn hochops_report_to_json(r: *const HochopsReport, out: *mut *mut c_char) -> HochopsStatus {
    guard(|| put_json(out, &handle(r, "report")?.0))
}

/// # Safety
/// `r` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn hochops_report_free(r: *mut HochopsReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
