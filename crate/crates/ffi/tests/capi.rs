use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use kstab_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    kstab_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(kstab_last_error()).to_string_lossy().into_owned()
}

unsafe fn variety(json: &str) -> *mut KstabVariety {
    let mut v = ptr::null_mut();
    assert_eq!(kstab_variety_from_json(c(json).as_ptr(), &mut v), KstabStatus::Ok);
    v
}

unsafe fn flag(v: *const KstabVariety, json: &str) -> *mut KstabFlagIdeal {
    let mut f = ptr::null_mut();
    assert_eq!(kstab_flag_ideal_from_json(v, c(json).as_ptr(), &mut f), KstabStatus::Ok, "{}", last_error());
    f
}

#[test]
fn variety_queries() {
    unsafe {
        let v = variety(r#"{"type":"projective_space","n":2,"d":2}"#);
        let mut n = 0usize;
        assert_eq!(kstab_variety_dim(v, &mut n), KstabStatus::Ok);
        assert_eq!(n, 2);
        let mut count = 0u64;
        assert_eq!(kstab_ehrhart_count(v, 1, &mut count), KstabStatus::Ok);
        assert_eq!(count, 6);
        let (mut top, mut canon) = (0i64, 0i64);
        assert_eq!(kstab_intersection_numbers(v, &mut top, &mut canon), KstabStatus::Ok);
        assert_eq!((top, canon), (4, -6));
        kstab_variety_free(v);
    }
}

#[test]
fn df_through_both_routes() {
    unsafe {
        let v = variety(r#"{"type":"projective_space","n":1,"d":2}"#);
        let f = flag(v, r#"{"N":1,"ideals":[{"gens":[[1]]}]}"#);
        let mut is_cox = -1;
        assert_eq!(kstab_flag_ideal_is_cox(f, &mut is_cox), KstabStatus::Ok);
        assert_eq!(is_cox, 0);

        let mut s = ptr::null_mut();
        assert_eq!(kstab_df_counting(v, f, 1, &mut s), KstabStatus::Ok);
        let counting = take(s);

        let mut j = ptr::null_mut();
        assert_eq!(kstab_df_intersection_json(v, f, 1, &mut j), KstabStatus::Ok);
        let rep: serde_json::Value = serde_json::from_str(&take(j)).unwrap();
        assert_eq!(rep["DF"].as_str(), Some(counting.as_str()));

        kstab_flag_ideal_free(f);
        kstab_variety_free(v);
    }
}

#[test]
fn compute_job_round_trip() {
    let job = r#"{"variety":{"type":"projective_space","n":1,"d":2},
                  "flag_ideal":{"N":1,"ideals":[{"gens":[[2]]}]},"r":1}"#;
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(kstab_compute_json(c(job).as_ptr(), &mut out), KstabStatus::Ok);
        let rep: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(rep["DF"], "1");
        assert_eq!(rep["consistent"], true);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut v = ptr::null_mut();
        assert_eq!(kstab_variety_from_json(c("{not json").as_ptr(), &mut v), KstabStatus::InvalidInput);
        assert!(v.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(kstab_variety_from_json(ptr::null(), &mut v), KstabStatus::NullPointer);
        assert_eq!(kstab_variety_dim(ptr::null(), ptr::null_mut()), KstabStatus::NullPointer);

        let line = variety(r#"{"type":"projective_space","n":1,"d":1}"#);
        assert!(last_error().is_empty());
        let mut f = ptr::null_mut();
        let bad = r#"{"N":1,"ideals":[{"gens":[[1,1]]}]}"#;
        assert_eq!(kstab_flag_ideal_from_json(line, c(bad).as_ptr(), &mut f), KstabStatus::InvalidInput);

        // (x^2) + (t) on the line with O(1) needs r = 2 before the fit stabilizes
        let f = flag(line, r#"{"N":1,"ideals":[{"gens":[[2]]}]}"#);
        let mut s = ptr::null_mut();
        assert_eq!(kstab_df_counting(line, f, 1, &mut s), KstabStatus::NotStabilized);
        assert!(s.is_null());
        assert_eq!(kstab_df_counting(line, f, 2, &mut s), KstabStatus::Ok);
        take(s);
        kstab_flag_ideal_free(f);
        kstab_variety_free(line);

        let job = r#"{"variety":{"type":"projective_space","n":1,"d":1},
                      "flag_ideal":{"N":1,"ideals":[{"gens":[[2]]}]},"r":1}"#;
        let mut out = ptr::null_mut();
        assert_eq!(kstab_compute_json(c(job).as_ptr(), &mut out), KstabStatus::NotStabilized);
        let payload: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert!(payload["error"]["kind"].is_string());

        kstab_string_free(ptr::null_mut());
        kstab_variety_free(ptr::null_mut());
        kstab_flag_ideal_free(ptr::null_mut());
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(kstab_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/kstab.h")).unwrap()
}

#[test]
fn header_declares_the_api() {
    let h = header();
    assert!(h.starts_with("#ifndef KSTAB_H"));
    for sym in [
        "typedef struct KstabVariety KstabVariety;",
        "typedef struct KstabFlagIdeal KstabFlagIdeal;",
        "KSTAB_STATUS_OK = 0",
        "KSTAB_STATUS_NOT_STABILIZED = 2",
        "KSTAB_STATUS_CROSS_CHECK_FAILED = 3",
        "kstab_variety_from_json",
        "kstab_flag_ideal_from_json",
        "kstab_df_counting",
        "kstab_df_intersection_json",
        "kstab_compute_json",
        "kstab_last_error",
        "kstab_string_free",
    ] {
        assert!(h.contains(sym), "header lacks {sym}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found, skipping syntax check");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        "#include \"kstab.h\"\nint main(void) { KstabVariety *v = 0; \
         KstabStatus s = kstab_variety_from_json(\"{}\", &v); kstab_variety_free(v); return (int)s; }\n",
    )
    .unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new(cc).arg("-fsyntax-only").arg("-Wall").arg("-I").arg(include).arg(&src).status().unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}
