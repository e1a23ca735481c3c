use std::ffi::{c_char, c_int, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use catswap_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(cs_last_error()) }.to_string_lossy().into_owned()
}

fn basis(n: usize, bits: &str) -> *mut CsState {
    let bits = CString::new(bits).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cs_state_new_basis(n, bits.as_ptr(), &mut out) }, CsStatus::Ok);
    out
}

fn amplitudes(s: *const CsState) -> Vec<(f64, f64)> {
    let n = unsafe { cs_state_num_qubits(s) };
    let (mut re, mut im) = (vec![0.0; 1 << n], vec![0.0; 1 << n]);
    assert_eq!(unsafe { cs_state_amplitudes(s, re.as_mut_ptr(), im.as_mut_ptr(), re.len()) }, CsStatus::Ok);
    re.into_iter().zip(im).collect()
}

#[test]
fn basis_state_layout() {
    let s = basis(3, "001");
    let amps = amplitudes(s);
    assert_eq!(amps[1], (1.0, 0.0));
    assert_eq!(amps.iter().filter(|a| a.0 != 0.0).count(), 1);
    unsafe { cs_state_free(s) };
}

#[test]
fn gates_and_entropy() {
    let s = basis(2, "00");
    unsafe {
        assert_eq!(cs_state_apply_h(s, 0), CsStatus::Ok);
        assert_eq!(cs_state_apply_cnot(s, 0, 1), CsStatus::Ok);
        assert_eq!(cs_state_apply_z(s, 1), CsStatus::Ok);
        assert_eq!(cs_state_apply_x(s, 1), CsStatus::Ok);
        let mut e = 0.0;
        let q = [0usize];
        assert_eq!(cs_state_entropy(s, q.as_ptr(), 1, &mut e), CsStatus::Ok);
        assert!((e - 1.0).abs() < 1e-12);
        cs_state_free(s);
    }
}

#[test]
fn cat_projection_and_identification() {
    unsafe {
        let pattern = CString::new("000").unwrap();
        let mut ghz = ptr::null_mut();
        assert_eq!(cs_state_new_cat(pattern.as_ptr(), 1, &mut ghz), CsStatus::Ok);
        let pattern = CString::new("00").unwrap();
        let mut bell = ptr::null_mut();
        assert_eq!(cs_state_new_cat(pattern.as_ptr(), -1, &mut bell), CsStatus::Ok);
        let q = [0usize, 1];
        let (mut p, mut residual) = (0.0, ptr::null_mut());
        assert_eq!(cs_state_project(ghz, q.as_ptr(), 2, bell, &mut p, &mut residual), CsStatus::Ok);
        assert!((p - 0.5).abs() < 1e-12);
        assert_eq!(cs_state_num_qubits(residual), 1);

        let (mut found, mut sign) = (0, 0);
        let mut buf = [0 as c_char; 8];
        assert_eq!(cs_state_identify_cat(ghz, &mut found, buf.as_mut_ptr(), 8, &mut sign), CsStatus::Ok);
        assert_eq!((found, sign), (1, 1));
        assert_eq!(CStr::from_ptr(buf.as_ptr()).to_str().unwrap(), "000");

        let zero = CString::new("0").unwrap();
        let mut one_qubit = ptr::null_mut();
        assert_eq!(cs_state_new_basis(1, zero.as_ptr(), &mut one_qubit), CsStatus::Ok);
        // an orthogonal projection gives probability 0 and no residual
        let flipped = CString::new("01").unwrap();
        let mut odd = ptr::null_mut();
        assert_eq!(cs_state_new_cat(flipped.as_ptr(), 1, &mut odd), CsStatus::Ok);
        let mut none = ptr::null_mut();
        assert_eq!(cs_state_project(ghz, q.as_ptr(), 2, odd, &mut p, &mut none), CsStatus::Ok);
        assert_eq!(p, 0.0);
        assert!(none.is_null());

        for s in [ghz, bell, residual, one_qubit, odd] {
            cs_state_free(s);
        }
    }
}

#[test]
fn seeded_measurement_is_reproducible() {
    let s = basis(2, "00");
    unsafe {
        cs_state_apply_h(s, 0);
        cs_state_apply_cnot(s, 0, 1);
        let mut bits = Vec::new();
        for _ in 0..2 {
            let (mut bit, mut rest) = (0 as c_int, ptr::null_mut());
            assert_eq!(cs_state_measure(s, 0, 99, &mut bit, &mut rest), CsStatus::Ok);
            let amps = amplitudes(rest);
            assert_eq!(amps[bit as usize].0.abs(), 1.0);
            bits.push(bit);
            cs_state_free(rest);
        }
        assert_eq!(bits[0], bits[1]);
        cs_state_free(s);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut out = ptr::null_mut();
        let bits = CString::new("0".repeat(30)).unwrap();
        assert_eq!(cs_state_new_basis(30, bits.as_ptr(), &mut out), CsStatus::TooManyQubits);
        assert!(last_error().contains("30"));
        assert_eq!(cs_state_new_basis(2, ptr::null(), &mut out), CsStatus::NullPointer);
        let bad = CString::new("0x").unwrap();
        assert_eq!(cs_state_new_basis(2, bad.as_ptr(), &mut out), CsStatus::InvalidArgument);

        let s = basis(2, "00");
        assert_eq!(cs_state_apply_h(s, 5), CsStatus::OutOfRange);
        assert_eq!(cs_state_apply_cnot(s, 1, 1), CsStatus::InvalidArgument);
        assert_eq!(cs_state_apply_x(ptr::null_mut(), 0), CsStatus::NullPointer);
        let mut re = [0.0; 2];
        let mut im = [0.0; 2];
        assert_eq!(cs_state_amplitudes(s, re.as_mut_ptr(), im.as_mut_ptr(), 2), CsStatus::BufferTooSmall);
        assert_eq!(cs_state_apply_x(s, 0), CsStatus::Ok);
        assert_eq!(last_error(), "");
        cs_state_free(s);
        cs_state_free(ptr::null_mut());
        assert_eq!(cs_state_num_qubits(ptr::null()), 0);
    }
}

#[test]
fn scenario_round_trip() {
    let config = CString::new("name = \"t\"\nseed = 3\n[scenario]\nkind = \"amplitude\"\ntheta = 0.4\n").unwrap();
    unsafe {
        let (mut report, mut passed) = (ptr::null_mut(), 0);
        assert_eq!(cs_run_scenario(config.as_ptr(), 0, &mut report, &mut passed), CsStatus::Ok);
        assert_eq!(passed, 1);
        let json: serde_json::Value = serde_json::from_str(CStr::from_ptr(report).to_str().unwrap()).unwrap();
        assert_eq!(json["scenario"], "t");
        cs_string_free(report);

        let bad = CString::new("name = \"t\"\n[scenario]\nkind = \"grow\"\nn = 99\n").unwrap();
        assert_eq!(cs_run_scenario(bad.as_ptr(), 0, &mut report, &mut passed), CsStatus::InvalidConfig);
        assert!(last_error().contains("scenario.n"));
        assert_eq!(cs_run_scenario(config.as_ptr(), 7, &mut report, &mut passed), CsStatus::InvalidArgument);
    }
}

#[test]
fn timing_functions() {
    unsafe {
        let mut t = 0.0;
        assert_eq!(cs_direct_time(4.0, 1.0, 2.0, 0.5, &mut t), CsStatus::Ok);
        assert_eq!(t, 2.0);
        let mut adv = 0;
        assert_eq!(cs_relay_time(4.0, 1.0, 2.0, 0.5, false, &mut t, &mut adv), CsStatus::Ok);
        assert_eq!((t, adv), (1.5, 1));
        assert_eq!(cs_hierarchical_time(8.0, 1.0, 2.0, 0.0, 2, false, &mut t), CsStatus::Ok);
        assert_eq!(t, 1.0);
        assert_eq!(cs_direct_time(-1.0, 1.0, 2.0, 0.5, &mut t), CsStatus::InvalidArgument);
        assert_eq!(cs_hierarchical_time(8.0, 1.0, 2.0, 0.0, 0, false, &mut t), CsStatus::OutOfRange);
    }
}

#[test]
fn header_is_current_and_c_program_links() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(crate_dir.join("include/catswap.h")).unwrap();
    for name in ["cs_state_new_basis", "cs_run_scenario", "cs_last_error", "CS_STATUS_TOO_MANY_QUBITS", "typedef struct CsState CsState"] {
        assert!(header.contains(name), "{name} missing from header");
    }

    // target/<profile>/deps/<test> -> target/<profile>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libcatswap_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let out_dir = tempfile::tempdir().unwrap();
    let exe = out_dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(crate_dir.join("c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ok"));
}
