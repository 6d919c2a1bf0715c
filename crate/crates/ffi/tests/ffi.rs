//! Exercises the C ABI through the Rust linkage of the same symbols.

use std::ffi::{CStr, CString};
use std::ptr;

use torus_crit_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = tc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn constraint_ratio() {
    let (mut num, mut den) = (0i64, 0i64);
    assert_eq!(unsafe { tc_constraint_ratio(4, &mut num, &mut den) }, TC_OK);
    assert_eq!((num, den), (12, 11));
    assert_eq!(
        unsafe { tc_constraint_ratio(1, &mut num, &mut den) },
        TC_DOMAIN
    );
    assert!(last_error().contains("degree 1"));
    assert_eq!(
        unsafe { tc_constraint_ratio(2, ptr::null_mut(), &mut den) },
        TC_NULL_POINTER
    );
}

#[test]
fn pure_family_lifecycle() {
    let mut s = ptr::null_mut();
    let r = c("1");
    assert_eq!(unsafe { tc_solve_pure_h(3, r.as_ptr(), &mut s) }, TC_OK);
    assert!(tc_last_error().is_null());
    unsafe {
        assert_eq!(tc_solution_is_consistent(s), 1);
        assert_eq!(tc_solution_free_count(s), 2);
        let k = tc_solution_constraint(s);
        assert_eq!(CStr::from_ptr(k).to_str().unwrap(), "6/5");
        tc_string_free(k);

        let mut json = ptr::null_mut();
        assert_eq!(tc_solution_to_json(s, &mut json), TC_OK);
        let text = CStr::from_ptr(json).to_str().unwrap().to_string();
        tc_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["coefficients"]["a2"]["a1"], "15/2");

        let (mut exact, mut numeric) = (0, f64::NAN);
        assert_eq!(tc_solution_verify(s, &mut exact, &mut numeric), TC_OK);
        assert_eq!(exact, 1);
        assert!(numeric < 1e-8);
        tc_solution_free(s);
    }
}

#[test]
fn gauss_family_with_explicit_terms() {
    let mut s = ptr::null_mut();
    let (a2, r) = (c("6/5"), c("1"));
    let terms = [0u32, 2, 1, 1];
    let code =
        unsafe { tc_solve_with_gauss(3, a2.as_ptr(), r.as_ptr(), terms.as_ptr(), 2, &mut s) };
    assert_eq!(code, TC_OK);
    unsafe {
        assert_eq!(tc_solution_free_count(s), 3);
        assert!(tc_solution_constraint(s).is_null());
        tc_solution_free(s);
    }
}

#[test]
fn forced_leading_coefficient_still_returns_the_family() {
    let mut s = ptr::null_mut();
    let (a2, r) = (c("3"), c("1"));
    let code = unsafe { tc_solve_with_gauss(2, a2.as_ptr(), r.as_ptr(), ptr::null(), 0, &mut s) };
    assert_eq!(code, TC_INCONSISTENT);
    assert!(!s.is_null());
    unsafe {
        assert_eq!(tc_solution_is_consistent(s), 0);
        let (mut exact, mut numeric) = (0, 0.0);
        assert_eq!(
            tc_solution_verify(s, &mut exact, &mut numeric),
            TC_INCONSISTENT
        );
        tc_solution_free(s);
    }
}

#[test]
fn bad_inputs() {
    let mut s = ptr::null_mut();
    let bad = c("one");
    assert_eq!(
        unsafe { tc_solve_pure_h(2, bad.as_ptr(), &mut s) },
        TC_BAD_INPUT
    );
    assert!(s.is_null());
    assert_eq!(
        unsafe { tc_solve_pure_h(2, ptr::null(), &mut s) },
        TC_NULL_POINTER
    );
    assert_eq!(unsafe { tc_solution_is_consistent(ptr::null()) }, -1);
    unsafe {
        tc_solution_free(ptr::null_mut());
        tc_string_free(ptr::null_mut());
    }
}

#[test]
fn curvatures_and_energy() {
    let (mut h, mut k) = (0.0, 0.0);
    assert_eq!(
        unsafe { tc_curvatures(2.0, 1.0, 0.0, &mut h, &mut k) },
        TC_OK
    );
    assert!((h - (0.5 * (1.0 + 1.0 / 3.0))).abs() < 1e-15);
    assert!((k - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(
        unsafe { tc_curvatures(1.0, 2.0, 0.0, &mut h, &mut k) },
        TC_BAD_INPUT
    );

    let mut e = 0.0;
    let (ratio, r) = (c("2"), c("1"));
    assert_eq!(
        unsafe { tc_family_energy(2, ratio.as_ptr(), r.as_ptr(), 256, &mut e) },
        TC_OK
    );
    assert!((e - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(tc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/torus_crit.h"))
            .expect("build script writes the header");
    for sym in [
        "tc_last_error",
        "tc_version",
        "tc_constraint_ratio",
        "tc_solve_pure_h",
        "tc_solve_with_gauss",
        "tc_solution_is_consistent",
        "tc_solution_free_count",
        "tc_solution_constraint",
        "tc_solution_to_json",
        "tc_solution_verify",
        "tc_curvatures",
        "tc_family_energy",
        "tc_solution_free",
        "tc_string_free",
        "typedef struct TcSolution TcSolution",
        "#define TC_INCONSISTENT 2",
    ] {
        assert!(header.contains(sym), "header lacks {sym}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Some(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        "#include \"torus_crit.h\"\n\
         int main(void) {\n\
             TcSolution *s = 0;\n\
             int rc = tc_solve_pure_h(2, \"1\", &s);\n\
             tc_solution_free(s);\n\
             return rc == TC_OK ? 0 : 1;\n\
         }\n",
    )
    .unwrap();
    let status = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Option<&'static str> {
    ["cc", "gcc", "clang"].into_iter().find(|c| {
        std::process::Command::new(c)
            .arg("--version")
            .output()
            .is_ok()
    })
}
