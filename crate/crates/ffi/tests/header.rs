//! Compiles and runs a small C program against the generated header and the
//! static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "circulant_clt.h"

int main(void) {
    double coeffs[] = {0.0, 0.0, 1.0, 1.0};
    CcltPolynomial *poly = NULL;
    double v = 0.0;
    char *count = NULL;
    CcltSample *s = NULL;
    double tr = 0.0;

    if (cclt_polynomial_new(coeffs, 4, &poly) != CCLT_STATUS_OK) return 1;
    if (cclt_limiting_variance(poly, &v) != CCLT_STATUS_OK || v != 8.0) return 2;
    if (cclt_slice_count(3, 1, 3, &count) != CCLT_STATUS_OK || strcmp(count, "7") != 0) return 3;
    cclt_string_free(count);
    if (cclt_sample_new(CCLT_FAMILY_RADEMACHER, 0.0, 32, 1, 0, &s) != CCLT_STATUS_OK) return 4;
    if (cclt_sample_trace_polynomial(s, poly, &tr) != CCLT_STATUS_OK) return 5;
    if (cclt_sample_trace_power_direct(s, 5, 10, &tr) != CCLT_STATUS_BUDGET_EXCEEDED) return 6;
    if (cclt_last_error() == NULL) return 7;
    cclt_sample_free(s);
    cclt_polynomial_free(poly);
    printf("ok %s\n", cclt_version());
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests/../../../target/<profile>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let lib_dir = target_dir();
    let staticlib = lib_dir.join("libcirculant_clt_ffi.a");
    assert!(staticlib.exists(), "missing {}", staticlib.display());

    let work = tempfile_dir();
    let src = work.join("main.c");
    let bin = work.join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&staticlib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
    std::fs::remove_dir_all(work).ok();
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cclt-header-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
