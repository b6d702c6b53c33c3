use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use serde_json::Value;
use solverfolio_ffi::*;

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/fixture.csv")
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = sf_last_error_message();
    assert!(!p.is_null(), "no error message recorded");
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

/// Takes ownership of a library string.
fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { sf_string_free(p) };
    s
}

struct Handle(*mut SfDataset);

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { sf_dataset_free(self.0) };
    }
}

fn open() -> Handle {
    let path = c(fixture().to_str().unwrap());
    let mut ds = ptr::null_mut();
    assert_eq!(unsafe { sf_dataset_open(path.as_ptr(), &mut ds) }, SfStatus::Ok);
    assert!(!ds.is_null());
    Handle(ds)
}

fn json(call: impl FnOnce(*mut *mut c_char) -> SfStatus) -> Value {
    let mut out = ptr::null_mut();
    let status = call(&mut out);
    assert_eq!(status, SfStatus::Ok, "{}", last_error());
    serde_json::from_str(&take(out)).unwrap()
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(sf_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn counts_and_ids() {
    let ds = open();
    let (mut solvers, mut instances) = (0usize, 0usize);
    unsafe {
        assert_eq!(sf_dataset_solver_count(ds.0, &mut solvers), SfStatus::Ok);
        assert_eq!(sf_dataset_instance_count(ds.0, &mut instances), SfStatus::Ok);
    }
    assert_eq!((solvers, instances), (3, 4));
    let ids: Vec<String> = (0..solvers)
        .map(|k| {
            let mut out = ptr::null_mut();
            assert_eq!(unsafe { sf_dataset_solver_id(ds.0, k, &mut out) }, SfStatus::Ok);
            take(out)
        })
        .collect();
    assert_eq!(ids, ["a", "b", "c"]);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { sf_dataset_solver_id(ds.0, 3, &mut out) }, SfStatus::Validation);
    assert!(out.is_null());
    assert!(last_error().contains("out of range"));
}

#[test]
fn perf_exact_and_float() {
    let ds = open();
    let ab = c("a,b");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { sf_perf_exact(ds.0, ab.as_ptr(), ptr::null(), &mut out) }, SfStatus::Ok);
    assert_eq!(take(out), "3/5");

    let mut x = 0.0;
    assert_eq!(unsafe { sf_perf(ds.0, c(" b , c ").as_ptr(), ptr::null(), &mut x) }, SfStatus::Ok);
    assert!((x - 7.0 / 9.0).abs() < 1e-12);
    assert_eq!(unsafe { sf_perf(ds.0, ptr::null(), ptr::null(), &mut x) }, SfStatus::Ok);
    assert_eq!(x, 1.0);
}

#[test]
fn borda_ranking() {
    let ds = open();
    let v = json(|out| unsafe { sf_borda_json(ds.0, ptr::null(), out) });
    let order: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["solver"].as_str().unwrap()).collect();
    assert_eq!(order, ["b", "a", "c"]);
    assert_eq!(v[0]["total"], "23/4");
}

#[test]
fn min_cover_and_tradeoff() {
    let ds = open();
    let cover = json(|out| unsafe { sf_min_cover_json(ds.0, ptr::null(), 0, 1000, out) });
    assert_eq!(cover["solution"]["portfolios"], serde_json::json!([["a", "b", "c"]]));
    assert_eq!(cover["solution"]["is_unique"], true);

    let curve = json(|out| unsafe { sf_tradeoff_json(ds.0, ptr::null(), ptr::null(), out) });
    let picks: Vec<Value> = curve["entries"].as_array().unwrap().iter().map(|e| e["best_subset"].clone()).collect();
    assert_eq!(picks, [serde_json::json!(["b"]), serde_json::json!(["b", "c"]), serde_json::json!(["a", "b", "c"])]);
}

#[test]
fn shapley_modes() {
    let ds = open();
    let exact = json(|out| unsafe {
        sf_shapley_json(ds.0, ptr::null(), ptr::null(), SfShapleyMode::ExactWeighted, 0, 0, out)
    });
    assert_eq!(exact["values"]["a"], "2969/10395");
    assert_eq!(exact["values"]["b"], "4523/10395");
    assert_eq!(exact["values"]["c"], "2903/10395");

    let run = |seed| {
        json(|out| unsafe { sf_shapley_json(ds.0, ptr::null(), ptr::null(), SfShapleyMode::Sampled, 200, seed, out) })
    };
    assert_eq!(run(4), run(4));

    let mut out = ptr::null_mut();
    let status = unsafe { sf_shapley_json(ds.0, ptr::null(), ptr::null(), SfShapleyMode::Sampled, 0, 1, &mut out) };
    assert_eq!(status, SfStatus::Validation);
    assert!(out.is_null());
}

#[test]
fn csv_text_round_trip() {
    let text = std::fs::read_to_string(fixture()).unwrap();
    let text = c(&text);
    let mut ds = ptr::null_mut();
    assert_eq!(unsafe { sf_dataset_from_csv(text.as_ptr(), &mut ds) }, SfStatus::Ok);
    let ds = Handle(ds);
    let mut n = 0usize;
    assert_eq!(unsafe { sf_dataset_instance_count(ds.0, &mut n) }, SfStatus::Ok);
    assert_eq!(n, 4);
}

#[test]
fn error_codes() {
    let mut ds = ptr::null_mut();
    assert_eq!(unsafe { sf_dataset_open(ptr::null(), &mut ds) }, SfStatus::NullArgument);
    assert!(last_error().contains("path"));

    let missing = c("/nonexistent/runs.csv");
    assert_eq!(unsafe { sf_dataset_open(missing.as_ptr(), &mut ds) }, SfStatus::Io);
    assert!(ds.is_null());

    let bad = c("solver,instance,kind,status,time,objective,participant,timeout\na,i,DECISION,COMPLETE,-1,,true,10\n");
    assert_eq!(unsafe { sf_dataset_from_csv(bad.as_ptr(), &mut ds) }, SfStatus::Validation);
    assert!(!last_error().is_empty());

    let invalid = [0xffu8, 0xfe, 0];
    assert_eq!(unsafe { sf_dataset_from_csv(invalid.as_ptr().cast(), &mut ds) }, SfStatus::InvalidUtf8);

    let mut x = 0.0;
    assert_eq!(unsafe { sf_perf(ptr::null(), ptr::null(), ptr::null(), &mut x) }, SfStatus::NullArgument);

    let h = open();
    assert_eq!(unsafe { sf_perf(h.0, c("a,zzz").as_ptr(), ptr::null(), &mut x) }, SfStatus::Validation);
    assert!(last_error().contains("zzz"), "{}", last_error());
    assert_eq!(unsafe { sf_perf(h.0, ptr::null(), ptr::null(), ptr::null_mut()) }, SfStatus::NullArgument);

    // A successful call clears the previous message.
    assert_eq!(unsafe { sf_perf(h.0, ptr::null(), ptr::null(), &mut x) }, SfStatus::Ok);
    assert!(sf_last_error_message().is_null());
}

#[test]
fn free_accepts_null() {
    unsafe {
        sf_dataset_free(ptr::null_mut());
        sf_string_free(ptr::null_mut());
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"solverfolio.h\"\nint main(void) { SfDataset *d = 0; SfStatus s = sf_dataset_open(\"x\", &d); \
         sf_dataset_free(d); return s == SF_STATUS_OK ? 0 : (int)SF_SHAPLEY_MODE_SAMPLED; }\n",
    )
    .unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .status()
        .expect("a C compiler named `cc` on PATH");
    assert!(status.success());
}
