use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use semispray_ffi::*;

fn cstrings(v: &[&str]) -> (Vec<CString>, Vec<*const c_char>) {
    let owned: Vec<CString> = v.iter().map(|s| CString::new(*s).unwrap()).collect();
    let ptrs = owned.iter().map(|c| c.as_ptr()).collect();
    (owned, ptrs)
}

fn take(p: *mut c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { ss_string_free(p) };
    s
}

fn semispray(g: &[&str]) -> *mut SsSemispray {
    let (_keep, ptrs) = cstrings(g);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ss_semispray_new(g.len(), ptrs.as_ptr(), &mut s) }, SsStatus::Ok);
    s
}

#[test]
fn semispray_handle_lifecycle() {
    let s = semispray(&["y2", "-y2^2/2"]);
    assert_eq!(unsafe { ss_semispray_dim(s) }, 2);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ss_semispray_jacobi(s, 0, 1, &mut out) }, SsStatus::Ok);
    assert_eq!(take(out), "y2");
    assert_eq!(unsafe { ss_semispray_coefficient(s, 1, &mut out) }, SsStatus::Ok);
    assert_eq!(take(out), "-y2^2/2");
    let mut c = SsClassification::default();
    assert_eq!(unsafe { ss_semispray_classify(s, 1, &mut c) }, SsStatus::Ok);
    assert!(!c.is_flat && !c.is_isotropic);
    assert_eq!(unsafe { ss_semispray_jacobi(s, 2, 0, &mut out) }, SsStatus::Dimension);
    unsafe { ss_semispray_free(s) };
    unsafe { ss_semispray_free(ptr::null_mut()) };
}

#[test]
fn error_codes_and_messages() {
    let (_keep, ptrs) = cstrings(&["y1 +"]);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ss_semispray_new(1, ptrs.as_ptr(), &mut s) }, SsStatus::Parse);
    assert!(s.is_null());
    let msg = unsafe { CStr::from_ptr(ss_last_error()) }.to_str().unwrap().to_string();
    assert!(msg.contains("position"), "{msg}");

    assert_eq!(unsafe { ss_semispray_new(1, ptr::null(), &mut s) }, SsStatus::NullPointer);
    assert_eq!(unsafe { ss_semispray_new(1, ptrs.as_ptr(), ptr::null_mut()) }, SsStatus::NullPointer);
    let bad = [b"\xff\0".as_ptr() as *const c_char];
    assert_eq!(unsafe { ss_semispray_new(1, bad.as_ptr(), &mut s) }, SsStatus::InvalidUtf8);
    let mut v = SsVerdict::Inconclusive;
    assert_eq!(unsafe { ss_check_theta(ptr::null(), ptr::null(), 0, &mut v) }, SsStatus::NullPointer);

    let l = CString::new("y1").unwrap();
    assert_eq!(
        unsafe { ss_semispray_from_lagrangian(1, l.as_ptr(), 0, &mut s) },
        SsStatus::SingularMetric
    );
}

#[test]
fn verdicts() {
    let l = CString::new("(y1^2 + y2^2)/2 - x1*x2").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ss_semispray_from_lagrangian(2, l.as_ptr(), 3, &mut s) }, SsStatus::Ok);
    let mut v = SsVerdict::Inconclusive;
    assert_eq!(unsafe { ss_verify_lagrangian(s, l.as_ptr(), 3, &mut v) }, SsStatus::Ok);
    assert_eq!(v, SsVerdict::LagrangianConfirmed);

    let t0 = CString::new("(y1^2 + y2^2)/2 - x1*x2").unwrap();
    let (_keep, t) = cstrings(&["y1", "y2"]);
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { ss_form_new(2, t0.as_ptr(), t.as_ptr(), &mut f) }, SsStatus::Ok);
    assert_eq!(unsafe { ss_check_theta(s, f, 3, &mut v) }, SsStatus::Ok);
    assert_eq!(v, SsVerdict::LagrangianConfirmed);
    unsafe { ss_form_free(f) };

    let (_keep, t) = cstrings(&["y2", "x1"]);
    assert_eq!(unsafe { ss_form_new(2, t0.as_ptr(), t.as_ptr(), &mut f) }, SsStatus::Ok);
    assert_eq!(unsafe { ss_check_theta(s, f, 3, &mut v) }, SsStatus::Ok);
    assert_eq!(v, SsVerdict::HelmholtzFails);
    unsafe { ss_form_free(f) };

    let flat = semispray(&["0", "sin(t)"]);
    assert_eq!(unsafe { ss_check_theta(flat, ptr::null(), 3, &mut v) }, SsStatus::Ok);
    assert_eq!(v, SsVerdict::FormallyIntegrableClass);
    unsafe {
        ss_semispray_free(flat);
        ss_semispray_free(s);
    }
}

#[test]
fn symbol_and_geodesic() {
    let mut d = SsSymbolDims::default();
    assert_eq!(unsafe { ss_symbol_dims(2, &mut d) }, SsStatus::Ok);
    assert_eq!((d.dim_g1, d.dim_g2, d.dim_k), (9, 18, 3));
    assert!(d.exact && d.all_match);
    assert_eq!(unsafe { ss_symbol_dims(0, &mut d) }, SsStatus::Dimension);

    let s = semispray(&["x1/2"]);
    let start = [0.0, 1.0, 0.0];
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ss_geodesic(s, start.as_ptr(), 0.01, 10, &mut out) }, SsStatus::Ok);
    let text = take(out);
    assert!(text.starts_with("# method=rk4 n=1"));
    assert_eq!(text.lines().count(), 13);
    assert_eq!(unsafe { ss_geodesic(s, start.as_ptr(), -1.0, 10, &mut out) }, SsStatus::InvalidArgument);
    unsafe { ss_semispray_free(s) };
}

fn has_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok_and(|o| o.status.success())
}

#[test]
fn c_program_links_against_header() {
    if !has_cc() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libsemispray_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <string.h>
#include "semispray.h"
int main(void) {
    const char *g[2] = {"y2", "-y2^2/2"};
    SsSemispray *s = NULL;
    if (ss_semispray_new(2, g, &s) != SS_STATUS_OK) return 1;
    char *phi = NULL;
    if (ss_semispray_jacobi(s, 0, 1, &phi) != SS_STATUS_OK) return 2;
    int ok = strcmp(phi, "y2") == 0;
    ss_string_free(phi);
    ss_semispray_free(s);
    const char *bad[1] = {"sin("};
    if (ss_semispray_new(1, bad, &s) != SS_STATUS_PARSE || ss_last_error() == NULL) return 3;
    SsSymbolDims d;
    if (ss_symbol_dims(1, &d) != SS_STATUS_OK || d.dim_g2 != 6) return 4;
    printf("ok\n");
    return ok ? 0 : 5;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("main");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
