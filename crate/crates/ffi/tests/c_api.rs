use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use optsynth_ffi::*;

const TOY: &str = "{\"features\": [[101],[65]], \"labels\": [false,true]}\n";

fn toy() -> *mut OsDataset {
    let text = CString::new(TOY).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { os_dataset_from_jsonl(text.as_ptr(), OsDsl::Near, &mut d) }, OsStatus::Ok);
    d
}

#[test]
fn synthesizes_the_toy_task() {
    let d = toy();
    assert_eq!(unsafe { os_dataset_len(d) }, 1);
    let sketch = CString::new("map(-1*z1 + [0,100])").unwrap();
    let cfg = OsConfig {
        objective: OsObjective::Accuracy,
        sketch: sketch.as_ptr(),
        ..os_config_default(OsDsl::Near)
    };
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { os_synthesize(d, &cfg, &mut r) }, OsStatus::Ok);
    unsafe {
        assert!(os_result_converged(r));
        assert_eq!(os_result_lower(r), 1.0);
        assert_eq!(os_result_upper(r), 1.0);
        assert!(os_result_nodes_expanded(r) <= 3);
        let prog = CStr::from_ptr(os_result_program(r)).to_str().unwrap();
        assert!(prog.starts_with("map(-1*z1 + "));
        let json = os_result_json(r);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v["converged"], true);
        os_string_free(json);
        os_result_free(r);
        os_dataset_free(d);
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut d = ptr::null_mut();
    let bad = CString::new("{\"features\": [[1]], \"labels\": [true, false]}").unwrap();
    let s = unsafe { os_dataset_from_jsonl(bad.as_ptr(), OsDsl::Near, &mut d) };
    assert_eq!(s, OsStatus::Data);
    assert!(d.is_null());
    let msg = unsafe { CStr::from_ptr(os_last_error()) }.to_str().unwrap().to_string();
    assert!(msg.starts_with("<memory>:1:"), "{msg}");

    assert_eq!(unsafe { os_dataset_load(ptr::null(), OsDsl::Near, &mut d) }, OsStatus::NullPointer);
    let missing = CString::new("/nonexistent/x.jsonl").unwrap();
    assert_eq!(unsafe { os_dataset_load(missing.as_ptr(), OsDsl::Near, &mut d) }, OsStatus::Io);

    let d = toy();
    let sketch = CString::new("map(-1*z1 + ").unwrap();
    let cfg = OsConfig {
        sketch: sketch.as_ptr(),
        ..os_config_default(OsDsl::Near)
    };
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { os_synthesize(d, &cfg, &mut r) }, OsStatus::Parse);
    let cfg = OsConfig {
        epsilon: -1.0,
        ..os_config_default(OsDsl::Near)
    };
    assert_eq!(unsafe { os_synthesize(d, &cfg, &mut r) }, OsStatus::Config);
    assert_eq!(unsafe { os_synthesize(ptr::null(), &cfg, &mut r) }, OsStatus::NullPointer);
    unsafe { os_dataset_free(d) };
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        assert_eq!(os_dataset_len(ptr::null()), 0);
        assert!(!os_result_converged(ptr::null()));
        assert!(os_result_lower(ptr::null()).is_nan());
        assert!(os_result_program(ptr::null()).is_null());
        assert!(os_result_json(ptr::null()).is_null());
        os_dataset_free(ptr::null_mut());
        os_result_free(ptr::null_mut());
        os_string_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(os_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include").join("optsynth.h")
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header()).unwrap();
    for sym in [
        "OsDataset",
        "OsResult",
        "OsConfig",
        "OS_STATUS_OK",
        "OS_STATUS_PANIC",
        "OS_DSL_QUIVR",
        "os_last_error",
        "os_dataset_load",
        "os_dataset_from_jsonl",
        "os_dataset_free",
        "os_config_default",
        "os_synthesize",
        "os_result_program",
        "os_result_json",
        "os_result_free",
        "os_string_free",
    ] {
        assert!(text.contains(sym), "header lacks {sym}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c", "-std=c99", "-Wall", "-Werror"]).arg(header()).output() else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
