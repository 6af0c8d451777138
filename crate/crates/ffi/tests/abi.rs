use std::ffi::CStr;
use std::ptr;

use nilcone_ffi::*;

fn bp(mu: &[u32], nu: &[u32]) -> *mut NilconeBipartition {
    let mut out = ptr::null_mut();
    let st = unsafe { nilcone_bipartition_new(mu.as_ptr(), mu.len(), nu.as_ptr(), nu.len(), &mut out) };
    assert_eq!(st, NilconeStatus::Ok);
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(nilcone_last_error()) }.to_str().unwrap().to_string()
}

fn take_string(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { nilcone_string_free(s) };
    out
}

#[test]
fn bipartition_round_trip() {
    let b = bp(&[1], &[1, 1]);
    unsafe {
        assert_eq!(nilcone_bipartition_weight(b), 3);
        assert_eq!(take_string(nilcone_bipartition_to_string(b)), "(1;1,1)");
        let mut buf = [0u32; 4];
        let mut len = 0;
        assert_eq!(nilcone_bipartition_parts(b, 1, buf.as_mut_ptr(), 4, &mut len), NilconeStatus::Ok);
        assert_eq!(&buf[..len], &[1, 1]);
        assert_eq!(nilcone_bipartition_parts(b, 2, buf.as_mut_ptr(), 4, &mut len), NilconeStatus::InvalidArgument);
        nilcone_bipartition_free(b);
    }
}

#[test]
fn invalid_input_and_errors() {
    let mut out = ptr::null_mut();
    let mu = [1u32, 2];
    let st = unsafe { nilcone_bipartition_new(mu.as_ptr(), 2, ptr::null(), 0, &mut out) };
    assert_eq!(st, NilconeStatus::InvalidArgument);
    assert!(out.is_null());
    assert!(!last_error().is_empty());
    let st = unsafe { nilcone_bipartition_new(ptr::null(), 1, ptr::null(), 0, &mut out) };
    assert_eq!(st, NilconeStatus::NullPointer);
    let b = bp(&[1], &[]);
    assert!(last_error().is_empty());
    unsafe {
        assert_eq!(nilcone_bipartition_weight(ptr::null()), 0);
        assert!(nilcone_bipartition_to_string(ptr::null()).is_null());
        nilcone_bipartition_free(ptr::null_mut());
        nilcone_bipartition_free(b);
    }
}

#[test]
fn maps_through_the_abi() {
    let b = bp(&[1], &[1]);
    let mut buf = [0u32; 8];
    let mut len = 0;
    unsafe {
        assert_eq!(nilcone_phi_c(b, buf.as_mut_ptr(), 8, &mut len), NilconeStatus::Ok);
        assert_eq!(&buf[..len], &[2, 2]);
        assert_eq!(nilcone_phi_b(b, buf.as_mut_ptr(), 8, &mut len), NilconeStatus::Ok);
        assert_eq!(&buf[..len], &[3, 1, 1]);
        assert_eq!(nilcone_phi_b2(b, buf.as_mut_ptr(), 8, &mut len), NilconeStatus::Ok);
        assert_eq!(&buf[..len], &[2, 2, 1]);
        assert_eq!(nilcone_phi_b(b, buf.as_mut_ptr(), 1, &mut len), NilconeStatus::BufferTooSmall);
        assert_eq!(len, 3);
        nilcone_bipartition_free(b);

        let b = bp(&[], &[3]);
        let mut c = ptr::null_mut();
        assert_eq!(nilcone_collapse(b, NilconeCollapse::Special, &mut c), NilconeStatus::Ok);
        assert_eq!(take_string(nilcone_bipartition_to_string(c)), "(1;2)");
        nilcone_bipartition_free(c);
        nilcone_bipartition_free(b);
    }
}

#[test]
fn polynomials_through_the_abi() {
    let b = bp(&[1], &[1, 1]);
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(nilcone_point_poly(NilconePiece::Special, b, &mut p), NilconeStatus::Ok);
        assert_eq!(nilcone_polynomial_degree(p), 10);
        let mut coeffs = [0i64; 16];
        let mut len = 0;
        assert_eq!(nilcone_polynomial_coefficients(p, coeffs.as_mut_ptr(), 16, &mut len), NilconeStatus::Ok);
        assert_eq!(&coeffs[..len], &[-1, 0, -1, 0, -1, 0, 1, 0, 1, 0, 1]);
        let mut v = 0;
        assert_eq!(nilcone_polynomial_eval(p, 2, &mut v), NilconeStatus::Ok);
        assert_eq!(v, (16 + 4 + 1) * 63);
        assert_eq!(nilcone_polynomial_eval(p, 1 << 40, &mut v), NilconeStatus::InvalidArgument);
        assert_eq!(take_string(nilcone_polynomial_to_string(p)), "t^10 + t^8 + t^6 - t^4 - t^2 - 1");
        nilcone_polynomial_free(p);

        let d = bp(&[], &[2]);
        let mut q = ptr::null_mut();
        assert_eq!(nilcone_point_poly(NilconePiece::TypeC, d, &mut q), NilconeStatus::InvalidArgument);
        assert!(q.is_null());
        nilcone_bipartition_free(d);
        nilcone_bipartition_free(b);

        let (mut passed, mut failures) = (false, 1);
        assert_eq!(nilcone_verify_identities(4, &mut passed, &mut failures), NilconeStatus::Ok);
        assert!(passed);
        assert_eq!(failures, 0);
    }
}

#[test]
fn census_through_the_abi() {
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(nilcone_census_run(NilconeCone::Exotic, 2, 2, false, &mut r), NilconeStatus::Ok);
        assert!(nilcone_census_passed(r));
        assert_eq!(nilcone_census_points(r), 256);
        assert!(nilcone_census_line_count(r) > 5);
        let json: serde_json::Value = serde_json::from_str(&take_string(nilcone_census_to_json(r))).unwrap();
        assert_eq!(json["points"], 256);
        assert!(take_string(nilcone_census_to_csv(r)).starts_with("kind,"));
        nilcone_census_free(r);

        let mut r = ptr::null_mut();
        assert_eq!(nilcone_census_run(NilconeCone::Sp2, 2, 3, false, &mut r), NilconeStatus::Unsupported);
        assert_eq!(nilcone_census_run(NilconeCone::Sp2, 4, 2, false, &mut r), NilconeStatus::BudgetExceeded);
        assert!(last_error().contains("limit"));
        assert!(r.is_null());
    }
}
