//! The generated header must compile as C and as C++, and a C program linked
//! against the static library must run.

use std::path::{Path, PathBuf};
use std::process::Command;

fn header_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

fn compiler(name: &str) -> Option<String> {
    Command::new(name).arg("--version").output().ok().filter(|o| o.status.success()).map(|_| name.to_string())
}

#[test]
fn header_declares_every_entry_point() {
    let h = std::fs::read_to_string(header_dir().join("uncertainty.h")).unwrap();
    for f in [
        "uc_grid_new",
        "uc_grid_free",
        "uc_field_gaussian",
        "uc_field_from_values",
        "uc_field_values",
        "uc_field_free",
        "uc_field_inner",
        "uc_verify",
        "uc_algebraic_check",
        "uc_report_list_get",
        "uc_report_list_free",
        "uc_last_error_message",
        "uc_version",
    ] {
        assert!(h.contains(&format!("{f}(")), "missing {f}");
    }
}

#[test]
fn header_parses_as_c_and_cpp() {
    let Some(cc) = compiler("cc") else {
        eprintln!("no C compiler; skipped");
        return;
    };
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("probe.c");
    std::fs::write(&src, "#include \"uncertainty.h\"\nint main(void) { return 0; }\n").unwrap();
    let st = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Wextra", "-Werror", "-fsyntax-only", "-I"])
        .arg(header_dir())
        .arg(&src)
        .status()
        .unwrap();
    assert!(st.success());
    if let Some(cxx) = compiler("c++") {
        let st = Command::new(cxx)
            .args(["-std=c++11", "-Wall", "-Werror", "-fsyntax-only", "-x", "c++", "-I"])
            .arg(header_dir())
            .arg(&src)
            .status()
            .unwrap();
        assert!(st.success());
    }
}

fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("libuncertainty_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_and_runs() {
    let (Some(cc), Some(lib)) = (compiler("cc"), static_lib()) else {
        eprintln!("no C compiler or static library; skipped");
        return;
    };
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "uncertainty.h"
int main(void) {
    UcGrid *g = NULL;
    UcField *f = NULL;
    UcReportList *l = NULL;
    if (uc_grid_new(1, 256, 12.0, 0.5, UC_SCHEME_SPECTRAL_PERIODIC, &g) != UC_STATUS_OK) return 1;
    if (uc_field_gaussian(g, UC_GAUSSIAN_KIND_COHERENT, 1.0, 1.0, 0.0, -1.0, 0.0, &f) != UC_STATUS_OK) return 2;
    if (uc_verify(f, UC_IDENTITY_POSITION_MOMENTUM, 1e-8, &l) != UC_STATUS_OK) return 3;
    for (size_t k = 0; k < uc_report_list_len(l); k++) {
        UcReport r;
        uc_report_list_get(l, k, &r);
        printf("%s %.3e %d\n", r.identity_id, r.rel_residual, r.passed);
    }
    int ok = uc_report_list_all_passed(l);
    if (uc_grid_new(1, 15, 1.0, 0.5, UC_SCHEME_SPECTRAL_PERIODIC, &g) != UC_STATUS_INVALID_GRID) return 4;
    printf("error: %s\n", uc_last_error_message());
    uc_report_list_free(l);
    uc_field_free(f);
    return ok ? 0 : 5;
}
"#,
    )
    .unwrap();
    let bin = tmp.path().join("main");
    let st = Command::new(&cc)
        .arg("-I")
        .arg(header_dir())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(st.success());
    let out = Command::new(&bin).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("pm.trace"));
}
