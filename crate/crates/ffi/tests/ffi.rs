use std::ffi::{CStr, CString};
use std::ptr;

use iel_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { iel_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(iel_last_error()) }.to_str().unwrap().to_string()
}

#[test]
fn translate_through_handles() {
    let text = CString::new("~(K _|_)").unwrap();
    let mut f = ptr::null_mut();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(iel_formula_parse(text.as_ptr(), IelLanguage::Iel, &mut f), IelStatus::Ok);
        assert_eq!(iel_translate(f, &mut g), IelStatus::Ok);
        assert_eq!(take(iel_formula_print(g)), "[]~[]V[]_|_");
        iel_formula_free(f);
        iel_formula_free(g);
    }
}

#[test]
fn project_and_errors() {
    let text = CString::new("x:(p & y:q)").unwrap();
    let mut f = ptr::null_mut();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(iel_formula_parse(text.as_ptr(), IelLanguage::Explicit, &mut f), IelStatus::Ok);
        assert_eq!(iel_project(f, &mut g), IelStatus::Ok);
        assert_eq!(take(iel_formula_print(g)), "[](p & []q)");
        // translation needs an IEL formula
        let mut h = ptr::null_mut();
        assert_eq!(iel_translate(f, &mut h), IelStatus::Input);
        assert!(h.is_null());
        assert!(!last_error().is_empty());
        iel_formula_free(f);
        iel_formula_free(g);

        let bad = CString::new("p &").unwrap();
        let mut k = ptr::null_mut();
        assert_eq!(iel_formula_parse(bad.as_ptr(), IelLanguage::Iel, &mut k), IelStatus::Input);
        assert!(last_error().contains("offset"));
        assert_eq!(iel_formula_parse(ptr::null(), IelLanguage::Iel, &mut k), IelStatus::NullArgument);
        assert_eq!(iel_formula_parse(text.as_ptr(), IelLanguage::Iel, ptr::null_mut()), IelStatus::NullArgument);
        assert!(iel_formula_print(ptr::null()).is_null());
        iel_formula_free(ptr::null_mut());
    }
}

#[test]
fn prove_realize_round_trip() {
    let goal = CString::new("=> ~[]V _|_").unwrap();
    let mut p = ptr::null_mut();
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(iel_prove(goal.as_ptr(), IelSequentSystem::S4vMinusG, 0, 0, &mut p), IelStatus::Rejected);
        assert_eq!(last_error(), "saturated-unprovable");
        assert_eq!(iel_prove(goal.as_ptr(), IelSequentSystem::S4vG, 50, 0, &mut p), IelStatus::Ok);

        let json = CString::new(take(iel_proof_to_json(p))).unwrap();
        let mut q = ptr::null_mut();
        assert_eq!(iel_proof_from_json(json.as_ptr(), IelSequentSystem::S4vG, &mut q), IelStatus::Ok);
        assert_eq!(iel_proof_from_json(json.as_ptr(), IelSequentSystem::S4vMinusG, ptr::null_mut()), IelStatus::Rejected);

        assert_eq!(iel_realize(q, &mut r), IelStatus::Ok);
        let formula = take(iel_realization_formula(r));
        assert!(formula.starts_with('~'), "{formula}");
        let doc: serde_json::Value = serde_json::from_str(&take(iel_realization_to_json(r))).unwrap();
        assert_eq!(doc["system"], "lpv");
        assert_eq!(doc["formula"], formula.as_str());
        iel_realization_free(r);
        iel_proof_free(p);
        iel_proof_free(q);
    }
}

#[test]
fn budget_status() {
    let goal = CString::new("[]p, [](p -> q) => []q").unwrap();
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(iel_prove(goal.as_ptr(), IelSequentSystem::S4vG, 50, 1, &mut p), IelStatus::Budget);
        assert!(p.is_null());
    }
}

#[test]
fn run_matches_cli() {
    let args: Vec<CString> = ["translate", "--pretty"].iter().map(|s| CString::new(*s).unwrap()).collect();
    let ptrs: Vec<_> = args.iter().map(|a| a.as_ptr()).collect();
    let input = CString::new("~(K _|_)").unwrap();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(iel_run(ptrs.len() as i32, ptrs.as_ptr(), input.as_ptr(), &mut out), 0);
        assert_eq!(take(out), "[]~[]V[]_|_");
        let bad = [CString::new("nope").unwrap()];
        let bp: Vec<_> = bad.iter().map(|a| a.as_ptr()).collect();
        assert_eq!(iel_run(1, bp.as_ptr(), ptr::null(), &mut out), 3);
        assert!(take(out).contains("usage"));
        assert_eq!(iel_run(0, ptr::null(), ptr::null(), ptr::null_mut()), -1);
    }
}

fn exported_names(src: &str) -> Vec<String> {
    let mut names: Vec<String> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap().trim().to_string())
        .collect();
    names.sort();
    names
}

#[test]
fn header_declares_every_export() {
    let root = env!("CARGO_MANIFEST_DIR");
    let src = std::fs::read_to_string(format!("{root}/src/lib.rs")).unwrap();
    let header = std::fs::read_to_string(format!("{root}/include/iel.h")).unwrap();
    let names = exported_names(&src);
    let mut declared: Vec<String> = header
        .split("iel_")
        .skip(1)
        .filter_map(|rest| {
            let id: String = rest.chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect();
            rest[id.len()..].starts_with('(').then(|| format!("iel_{id}"))
        })
        .collect();
    declared.sort();
    assert_eq!(declared, names);
    for tag in ["IelStatus", "IelLanguage", "IelSequentSystem", "IelFormula", "IelProof", "IelRealization"] {
        assert!(header.contains(&format!("typedef struct {tag} {tag};")) || header.contains(&format!("}} {tag};")));
    }
}

#[test]
fn header_compiles_as_c() {
    let Some(cc) = ["cc", "gcc", "clang"].into_iter().find(|c| {
        std::process::Command::new(c).arg("--version").output().map(|o| o.status.success()).unwrap_or(false)
    }) else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let root = env!("CARGO_MANIFEST_DIR");
    let dir = std::env::temp_dir().join(format!("iel-ffi-header-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("use.c");
    std::fs::write(
        &file,
        r#"#include "iel.h"
int use(void) {
    IelFormula *f = 0, *g = 0;
    IelProof *p = 0;
    IelRealization *r = 0;
    char *out = 0;
    const char *args[] = {"translate"};
    IelStatus s = iel_formula_parse("p", IEL_LANGUAGE_IEL, &f);
    s = iel_translate(f, &g);
    s = iel_project(f, &g);
    iel_string_free(iel_formula_print(g));
    s = iel_prove("=> p -> p", IEL_SEQUENT_SYSTEM_S4V_G, 50, 0, &p);
    s = iel_proof_from_json("{}", IEL_SEQUENT_SYSTEM_S4V_MINUS_G, &p);
    iel_string_free(iel_proof_to_json(p));
    s = iel_realize(p, &r);
    iel_string_free(iel_realization_formula(r));
    iel_string_free(iel_realization_to_json(r));
    iel_realization_free(r);
    iel_proof_free(p);
    iel_formula_free(f);
    (void)iel_last_error();
    return iel_run(1, args, 0, &out) + (int)s;
}
"#,
    )
    .unwrap();
    let out = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(format!("{root}/include"))
        .arg(&file)
        .output()
        .unwrap();
    let _ = std::fs::remove_dir_all(&dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
