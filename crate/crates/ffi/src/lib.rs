//! C ABI over `iel-core`.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `*_free` function. Strings returned to C are owned by
//! the caller and released with `iel_string_free`. Every fallible call
//! returns an `IelStatus`; the message for the last failure on the calling
//! thread is available from `iel_last_error`.
//!
//! `include/iel.h` declares everything exported here.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use iel_core::cli;
use iel_core::doc;
use iel_core::formula::{parse, parse_sequent_sides, print, Formula, Language};
use iel_core::realize::{realize, Realization};
use iel_core::sequent::{self, prove, Budget, Node, ProveOutcome, Sequent, SequentSystem};
use iel_core::translate::{forgetful_projection, godel_tr};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IelStatus {
    Ok = 0,
    /// Derivation rejected, or the goal is not provable.
    Rejected = 1,
    /// Search budget exhausted.
    Budget = 2,
    /// Malformed input text.
    Input = 3,
    NullArgument = 4,
    InvalidUtf8 = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IelLanguage {
    Iel = 0,
    Modal = 1,
    Explicit = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IelSequentSystem {
    S4vMinusG = 0,
    S4vG = 1,
}

pub struct IelFormula(Formula);

pub struct IelProof {
    node: Node,
    system: SequentSystem,
}

pub struct IelRealization(Realization);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl ToString) {
    let c = CString::new(msg.to_string().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: IelStatus, msg: impl ToString) -> IelStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> IelStatus) -> IelStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(IelStatus::Internal, "internal error"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, IelStatus> {
    if p.is_null() {
        return Err(fail(IelStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(IelStatus::InvalidUtf8, "string is not UTF-8"))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn out<T>(slot: *mut *mut T, value: T) {
    unsafe { *slot = Box::into_raw(Box::new(value)) };
}

impl From<IelLanguage> for Language {
    fn from(l: IelLanguage) -> Self {
        match l {
            IelLanguage::Iel => Language::Iel,
            IelLanguage::Modal => Language::Modal,
            IelLanguage::Explicit => Language::Explicit,
        }
    }
}

impl From<IelSequentSystem> for SequentSystem {
    fn from(s: IelSequentSystem) -> Self {
        match s {
            IelSequentSystem::S4vMinusG => SequentSystem::S4vMinusG,
            IelSequentSystem::S4vG => SequentSystem::S4vG,
        }
    }
}

/// Message describing the last failure on this thread. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn iel_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn iel_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `text` must be a NUL-terminated string and `out_formula` writable.
#[no_mangle]
pub unsafe extern "C" fn iel_formula_parse(
    text: *const c_char,
    language: IelLanguage,
    out_formula: *mut *mut IelFormula,
) -> IelStatus {
    guard(|| {
        if out_formula.is_null() {
            return fail(IelStatus::NullArgument, "null output pointer");
        }
        let text = match str_arg(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse(text, language.into()) {
            Ok(f) => {
                out(out_formula, IelFormula(f));
                IelStatus::Ok
            }
            Err(e) => fail(IelStatus::Input, e),
        }
    })
}

/// # Safety
/// `f` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn iel_formula_free(f: *mut IelFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Prints a formula in the ASCII syntax. Returns null if `f` is null.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn iel_formula_print(f: *const IelFormula) -> *mut c_char {
    match f.as_ref() {
        Some(f) => into_c_string(print(&f.0)),
        None => {
            set_error("null formula");
            ptr::null_mut()
        }
    }
}

unsafe fn map_formula(
    f: *const IelFormula,
    out_formula: *mut *mut IelFormula,
    op: impl FnOnce(&Formula) -> Result<Formula, String>,
) -> IelStatus {
    guard(|| {
        let Some(f) = f.as_ref() else {
            return fail(IelStatus::NullArgument, "null formula");
        };
        if out_formula.is_null() {
            return fail(IelStatus::NullArgument, "null output pointer");
        }
        match op(&f.0) {
            Ok(g) => {
                out(out_formula, IelFormula(g));
                IelStatus::Ok
            }
            Err(e) => fail(IelStatus::Input, e),
        }
    })
}

/// Goedel translation of an IEL formula.
///
/// # Safety
/// `f` must be a live handle and `out_formula` writable.
#[no_mangle]
pub unsafe extern "C" fn iel_translate(f: *const IelFormula, out_formula: *mut *mut IelFormula) -> IelStatus {
    map_formula(f, out_formula, |f| godel_tr(f).map_err(|e| e.to_string()))
}

/// Forgetful projection of an explicit formula.
///
/// # Safety
/// `f` must be a live handle and `out_formula` writable.
#[no_mangle]
pub unsafe extern "C" fn iel_project(f: *const IelFormula, out_formula: *mut *mut IelFormula) -> IelStatus {
    map_formula(f, out_formula, |f| forgetful_projection(f).map_err(|e| e.to_string()))
}

/// Searches for a proof of `goal`, a sequent `A, B => C` or a single
/// formula. A zero budget field selects the default. On `IelStatus::Ok`
/// `*out_proof` receives the proof.
///
/// # Safety
/// `goal` must be a NUL-terminated string and `out_proof` writable.
#[no_mangle]
pub unsafe extern "C" fn iel_prove(
    goal: *const c_char,
    system: IelSequentSystem,
    max_depth: usize,
    max_nodes: usize,
    out_proof: *mut *mut IelProof,
) -> IelStatus {
    guard(|| {
        if out_proof.is_null() {
            return fail(IelStatus::NullArgument, "null output pointer");
        }
        let text = match str_arg(goal) {
            Ok(t) => t.trim(),
            Err(s) => return s,
        };
        let parsed = if text.contains("=>") {
            parse_sequent_sides(text, Language::Modal).map(|(a, b)| Sequent::new(a, b))
        } else {
            parse(text, Language::Modal).map(|f| Sequent::new(vec![], vec![f]))
        };
        let goal = match parsed {
            Ok(g) => g,
            Err(e) => return fail(IelStatus::Input, e),
        };
        let d = Budget::default();
        let budget = Budget {
            max_depth: if max_depth == 0 { d.max_depth } else { max_depth },
            max_nodes: if max_nodes == 0 { d.max_nodes } else { max_nodes },
        };
        let system = system.into();
        match prove(&goal, system, budget) {
            ProveOutcome::Proved(node) => {
                out(out_proof, IelProof { node, system });
                IelStatus::Ok
            }
            ProveOutcome::SaturatedUnprovable => fail(IelStatus::Rejected, "saturated-unprovable"),
            ProveOutcome::BudgetExhausted => fail(IelStatus::Budget, "budget-exhausted"),
        }
    })
}

/// Reads a sequent derivation document and checks it. `Ok` means accepted.
/// On success and when `out_proof` is not null it receives the proof.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out_proof` null or writable.
#[no_mangle]
pub unsafe extern "C" fn iel_proof_from_json(
    json: *const c_char,
    system: IelSequentSystem,
    out_proof: *mut *mut IelProof,
) -> IelStatus {
    guard(|| {
        let text = match str_arg(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let v: serde_json::Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => return fail(IelStatus::Input, e),
        };
        let body = v.get("derivation").unwrap_or(&v);
        let node = match doc::sequent_derivation_from_json(body) {
            Ok((n, _)) => n,
            Err(e) => return fail(IelStatus::Input, e),
        };
        let system = system.into();
        match sequent::check_derivation(&node, system) {
            Ok(node) => {
                if !out_proof.is_null() {
                    out(out_proof, IelProof { node, system });
                }
                IelStatus::Ok
            }
            Err(e) => fail(IelStatus::Rejected, e),
        }
    })
}

/// The proof as a JSON document.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn iel_proof_to_json(p: *const IelProof) -> *mut c_char {
    match p.as_ref() {
        Some(p) => into_c_string(doc::sequent_derivation_to_json(&p.node, Some(p.system)).to_string()),
        None => {
            set_error("null proof");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `p` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn iel_proof_free(p: *mut IelProof) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Realizes a proof. The witness has already been checked when this
/// returns `Ok`.
///
/// # Safety
/// `p` must be a live handle and `out_realization` writable.
#[no_mangle]
pub unsafe extern "C" fn iel_realize(p: *const IelProof, out_realization: *mut *mut IelRealization) -> IelStatus {
    guard(|| {
        let Some(p) = p.as_ref() else {
            return fail(IelStatus::NullArgument, "null proof");
        };
        if out_realization.is_null() {
            return fail(IelStatus::NullArgument, "null output pointer");
        }
        match realize(&p.node, p.system) {
            Ok(r) => {
                out(out_realization, IelRealization(r));
                IelStatus::Ok
            }
            Err(e) => fail(IelStatus::Rejected, e),
        }
    })
}

/// The realized formula in the ASCII syntax.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn iel_realization_formula(r: *const IelRealization) -> *mut c_char {
    match r.as_ref() {
        Some(r) => into_c_string(print(&r.0.formula)),
        None => {
            set_error("null realization");
            ptr::null_mut()
        }
    }
}

/// The full realization document: formula, witness, families and
/// substitutions.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn iel_realization_to_json(r: *const IelRealization) -> *mut c_char {
    match r.as_ref() {
        Some(r) => into_c_string(doc::realization_to_json(&r.0).to_string()),
        None => {
            set_error("null realization");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `r` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn iel_realization_free(r: *mut IelRealization) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Runs a command-line invocation. `argv` excludes the program name.
/// `stdin_text` may be null. `*out_text` receives what the command line
/// tool would print. Returns the tool's exit code, or -1 on bad arguments.
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings; `out_text` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn iel_run(
    argc: c_int,
    argv: *const *const c_char,
    stdin_text: *const c_char,
    out_text: *mut *mut c_char,
) -> c_int {
    let r = catch_unwind(AssertUnwindSafe(|| {
        if out_text.is_null() || (argc > 0 && argv.is_null()) || argc < 0 {
            set_error("null or negative argument");
            return -1;
        }
        let mut args = vec!["iel".to_string()];
        for i in 0..argc as usize {
            match str_arg(*argv.add(i)) {
                Ok(s) => args.push(s.to_string()),
                Err(_) => return -1,
            }
        }
        let input = if stdin_text.is_null() {
            None
        } else {
            match str_arg(stdin_text) {
                Ok(s) => Some(s.to_string()),
                Err(_) => return -1,
            }
        };
        let mut read = || Ok(input.clone().unwrap_or_default());
        let o = cli::dispatch(&args, &mut read);
        *out_text = into_c_string(o.text);
        o.code
    }));
    r.unwrap_or_else(|_| {
        set_error("internal error");
        -1
    })
}
