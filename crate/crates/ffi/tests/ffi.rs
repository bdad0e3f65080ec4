use std::ffi::{CStr, CString};
use std::ptr;

use sdqc_ffi::*;

fn last_error() -> String {
    let p = sdqc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn planar(json: &str) -> (SdqcStatus, *mut SdqcPlanarSet) {
    let c = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    let s = unsafe { sdqc_planar_set_from_json(c.as_ptr(), &mut out) };
    (s, out)
}

#[test]
fn phi_and_tartar() {
    let m = [1.0, 0.0, 0.0, 0.0, 0.25, 0.0, 0.0, 0.0, 0.25];
    let (mut p, mut q) = (0.0, 0.0);
    assert_eq!(unsafe { sdqc_phi(m.as_ptr(), 3, &mut p, &mut q) }, SdqcStatus::Ok);
    assert!((p - 0.5).abs() < 1e-15 && (q - 3f64.sqrt() / 4.0).abs() < 1e-15);

    let id = [1.0, 0.0, 0.0, 1.0];
    let mut t = f64::NAN;
    assert_eq!(unsafe { sdqc_tartar(id.as_ptr(), 2, &mut t) }, SdqcStatus::Ok);
    assert_eq!(t, 2.0 - 4.0);
}

#[test]
fn rejects_bad_matrices() {
    let asym = [1.0, 2.0, 0.0, 1.0];
    let (mut p, mut q) = (0.0, 0.0);
    assert_eq!(unsafe { sdqc_phi(asym.as_ptr(), 2, &mut p, &mut q) }, SdqcStatus::InvalidArgument);
    assert!(last_error().contains("symmetric"));
    assert_eq!(unsafe { sdqc_phi(asym.as_ptr(), 4, &mut p, &mut q) }, SdqcStatus::InvalidArgument);
    assert_eq!(unsafe { sdqc_phi(ptr::null(), 2, &mut p, &mut q) }, SdqcStatus::NullPointer);
}

#[test]
fn planar_set_errors() {
    let (s, h) = planar("{}");
    assert_eq!(s, SdqcStatus::EmptySet);
    assert!(h.is_null());
    let (s, _) = planar("{\"points\": 3}");
    assert_eq!(s, SdqcStatus::Parse);
    assert!(!last_error().is_empty());
    unsafe { sdqc_planar_set_free(ptr::null_mut()) };
}

#[test]
fn hull_roundtrip() {
    let (s, set) = planar(r#"{"points":[[-0.5,1],[0.5,1]]}"#);
    assert_eq!(s, SdqcStatus::Ok);
    let mut hull = ptr::null_mut();
    assert_eq!(unsafe { sdqc_hull_new(set, 513, 0.0, &mut hull) }, SdqcStatus::Ok);
    unsafe { sdqc_planar_set_free(set) };

    let mut len = 0;
    assert_eq!(unsafe { sdqc_hull_len(hull, &mut len) }, SdqcStatus::Ok);
    assert_eq!(len, 513);
    let (mut p, mut psi, mut def) = (0.0, 0.0, false);
    assert_eq!(unsafe { sdqc_hull_node(hull, 256, &mut p, &mut psi, &mut def) }, SdqcStatus::Ok);
    assert!(def && p.abs() < 1e-15);
    assert!((psi - (1.0f64 - 0.75 * 0.25).sqrt()).abs() < 1e-9);
    assert_eq!(unsafe { sdqc_hull_node(hull, len, &mut p, &mut psi, &mut def) }, SdqcStatus::OutOfRange);

    let (mut conn, mut slope) = (false, false);
    assert_eq!(unsafe { sdqc_hull_connected(hull, &mut conn) }, SdqcStatus::Ok);
    assert_eq!(unsafe { sdqc_hull_slope_condition(hull, &mut slope) }, SdqcStatus::Ok);
    assert!(conn && slope);

    let zero = [0.0; 9];
    let far = [10.0, 0.0, 0.0, 0.0, 10.0, 0.0, 0.0, 0.0, 10.0];
    let mut v = SdqcVerdict::NotMember;
    assert_eq!(unsafe { sdqc_hull_membership(hull, zero.as_ptr(), 3, &mut v) }, SdqcStatus::Ok);
    assert_eq!(v, SdqcVerdict::Member);
    assert_eq!(unsafe { sdqc_hull_membership(hull, far.as_ptr(), 3, &mut v) }, SdqcStatus::Ok);
    assert_eq!(v, SdqcVerdict::NotMember);
    unsafe { sdqc_hull_free(hull) };
}

#[test]
fn non_cylindrical_verdict() {
    let (_, set) = planar(r#"{"points":[[0,0],[1,0.8660254037844386]]}"#);
    let mut hull = ptr::null_mut();
    assert_eq!(unsafe { sdqc_hull_new(set, 256, 1e-9, &mut hull) }, SdqcStatus::Ok);
    let m = [1.0, 0.0, 0.0, 0.0, 0.25, 0.0, 0.0, 0.0, 0.25];
    let mut v = SdqcVerdict::Member;
    assert_eq!(unsafe { sdqc_hull_membership(hull, m.as_ptr(), 3, &mut v) }, SdqcStatus::Ok);
    assert_eq!(v, SdqcVerdict::PhiMemberOnly);
    unsafe {
        sdqc_hull_free(hull);
        sdqc_planar_set_free(set);
    }
}

#[test]
fn status_messages_are_static() {
    for s in [SdqcStatus::Ok, SdqcStatus::Parse, SdqcStatus::Panic] {
        let m = unsafe { CStr::from_ptr(sdqc_status_message(s)) };
        assert!(!m.to_bytes().is_empty());
    }
}

#[test]
fn header_declares_entry_points() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/sdqc.h")).unwrap();
    for f in [
        "sdqc_phi",
        "sdqc_tartar",
        "sdqc_planar_set_from_json",
        "sdqc_planar_set_free",
        "sdqc_hull_new",
        "sdqc_hull_free",
        "sdqc_hull_membership",
        "sdqc_last_error_message",
        "SDQC_STATUS_OK",
        "typedef struct SdqcHull SdqcHull",
    ] {
        assert!(h.contains(f), "{f} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which("cc") else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"sdqc.h\"\nint main(void) { SdqcStatus s = SDQC_STATUS_OK; (void)s; return 0; }\n",
    )
    .unwrap();
    let status = std::process::Command::new(cc)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which(name: &str) -> Result<std::path::PathBuf, ()> {
    let path = std::env::var_os("PATH").ok_or(())?;
    std::env::split_paths(&path).map(|d| d.join(name)).find(|p| p.is_file()).ok_or(())
}
