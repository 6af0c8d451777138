//! C ABI over the `nilcone` library.
//!
//! Objects are opaque heap handles released with the matching `_free`
//! function. Every fallible call returns a [`NilconeStatus`]; on failure the
//! message is available from [`nilcone_last_error`] on the same thread.
//! Strings returned to the caller are released with [`nilcone_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nilcone::combinatorics::{Bipartition, Partition};
use nilcone::cones::{run_census, Cone, ConeError, CensusReport};
use nilcone::finitefield::FieldError;
use nilcone::maps::{collapse, phi_b, phi_b2, phi_c, CollapseKind};
use nilcone::polycount::{
    exotic_point_poly, piece_poly, type_b_point_poly, type_c_point_poly, verify_identities,
    IntPolynomial, PieceKind,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NilconeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unsupported = 3,
    BudgetExceeded = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NilconeCollapse {
    B = 0,
    C = 1,
    Special = 2,
    Tilde = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NilconePiece {
    Orbit = 0,
    TypeB = 1,
    TypeC = 2,
    Special = 3,
    Tilde = 4,
    E = 5,
    ScriptE = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NilconeCone {
    Exotic = 0,
    Sp2 = 1,
    O2 = 2,
    SpOdd = 3,
    OOdd = 4,
}

/// Opaque bipartition handle.
pub struct NilconeBipartition(Bipartition);

/// Opaque integer polynomial handle.
pub struct NilconePolynomial(IntPolynomial);

/// Opaque census report handle.
pub struct NilconeCensusReport(CensusReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).expect("no interior nul"));
}

type FfiResult = Result<(), (NilconeStatus, String)>;

fn guard(f: impl FnOnce() -> FfiResult) -> NilconeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            NilconeStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            NilconeStatus::Internal
        }
    }
}

fn null() -> (NilconeStatus, String) {
    (NilconeStatus::NullPointer, "null pointer argument".into())
}

fn invalid(msg: impl ToString) -> (NilconeStatus, String) {
    (NilconeStatus::InvalidArgument, msg.to_string())
}

fn cone_err(e: ConeError) -> (NilconeStatus, String) {
    let status = match e {
        ConeError::Budget { .. } => NilconeStatus::BudgetExceeded,
        ConeError::Unsupported { .. } | ConeError::Field(FieldError::Unsupported(_) | FieldError::NeedsCharTwo) => {
            NilconeStatus::Unsupported
        }
        ConeError::Rank(_) => NilconeStatus::InvalidArgument,
        _ => NilconeStatus::Internal,
    };
    (status, e.to_string())
}

unsafe fn slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], (NilconeStatus, String)> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null())
    } else {
        Ok(std::slice::from_raw_parts(p, len))
    }
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, (NilconeStatus, String)> {
    p.as_ref().ok_or_else(null)
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> FfiResult {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Copies `data` into `buf` (capacity `cap`) and stores the full length in `len`.
unsafe fn write_array<T: Copy>(data: &[T], buf: *mut T, cap: usize, len: *mut usize) -> FfiResult {
    if len.is_null() {
        return Err(null());
    }
    *len = data.len();
    if data.len() > cap {
        return Err((NilconeStatus::BufferTooSmall, format!("need {} entries", data.len())));
    }
    if !data.is_empty() {
        if buf.is_null() {
            return Err(null());
        }
        ptr::copy_nonoverlapping(data.as_ptr(), buf, data.len());
    }
    Ok(())
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Message for the most recent failed call on this thread; empty after a
/// success. Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn nilcone_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nilcone_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a bipartition from two weakly decreasing part arrays.
///
/// # Safety
/// Array pointers must be valid for their lengths; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilcone_bipartition_new(
    mu: *const u32,
    mu_len: usize,
    nu: *const u32,
    nu_len: usize,
    out: *mut *mut NilconeBipartition,
) -> NilconeStatus {
    guard(|| {
        let (mu, nu) = (slice(mu, mu_len)?, slice(nu, nu_len)?);
        let bp = Bipartition::from_parts(mu, nu).map_err(invalid)?;
        write_out(out, NilconeBipartition(bp))
    })
}

/// # Safety
/// `bp` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nilcone_bipartition_free(bp: *mut NilconeBipartition) {
    if !bp.is_null() {
        drop(Box::from_raw(bp));
    }
}

/// Total size |μ| + |ν|; 0 for a null handle.
///
/// # Safety
/// `bp` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nilcone_bipartition_weight(bp: *const NilconeBipartition) -> u32 {
    bp.as_ref().map_or(0, |b| b.0.weight())
}

/// Text form such as `(1;1,1)`; release with `nilcone_string_free`.
///
/// # Safety
/// `bp` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nilcone_bipartition_to_string(bp: *const NilconeBipartition) -> *mut c_char {
    match bp.as_ref() {
        Some(b) => to_c_string(b.0.to_string()),
        None => ptr::null_mut(),
    }
}

/// Copies μ (`which` = 0) or ν (`which` = 1) into `buf`.
///
/// # Safety
/// `buf` must be valid for `cap` entries; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilcone_bipartition_parts(
    bp: *const NilconeBipartition,
    which: u32,
    buf: *mut u32,
    cap: usize,
    len: *mut usize,
) -> NilconeStatus {
    guard(|| {
        let b = &deref(bp)?.0;
        let p = match which {
            0 => &b.mu,
            1 => &b.nu,
            _ => return Err(invalid("which must be 0 or 1")),
        };
        write_array(p.parts(), buf, cap, len)
    })
}

unsafe fn partition_map(
    bp: *const NilconeBipartition,
    f: fn(&Bipartition) -> Partition,
    buf: *mut u32,
    cap: usize,
    len: *mut usize,
) -> NilconeStatus {
    guard(|| write_array(f(&deref(bp)?.0).parts(), buf, cap, len))
}

/// Jordan type Φ^C.
///
/// # Safety
/// `buf` must be valid for `cap` entries; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilcone_phi_c(bp: *const NilconeBipartition, buf: *mut u32, cap: usize, len: *mut usize) -> NilconeStatus {
    partition_map(bp, phi_c, buf, cap, len)
}

/// Jordan type Φ^B.
///
/// # Safety
/// As [`nilcone_phi_c`].
#[no_mangle]
pub unsafe extern "C" fn nilcone_phi_b(bp: *const NilconeBipartition, buf: *mut u32, cap: usize, len: *mut usize) -> NilconeStatus {
    partition_map(bp, phi_b, buf, cap, len)
}

/// Jordan type Φ^{B,2}.
///
/// # Safety
/// As [`nilcone_phi_c`].
#[no_mangle]
pub unsafe extern "C" fn nilcone_phi_b2(bp: *const NilconeBipartition, buf: *mut u32, cap: usize, len: *mut usize) -> NilconeStatus {
    partition_map(bp, phi_b2, buf, cap, len)
}

/// Minimal element of the chosen sub-poset above `bp`.
///
/// # Safety
/// `bp` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilcone_collapse(
    bp: *const NilconeBipartition,
    kind: NilconeCollapse,
    out: *mut *mut NilconeBipartition,
) -> NilconeStatus {
    guard(|| {
        let kind = match kind {
            NilconeCollapse::B => CollapseKind::B,
            NilconeCollapse::C => CollapseKind::C,
            NilconeCollapse::Special => CollapseKind::Special,
            NilconeCollapse::Tilde => CollapseKind::Tilde,
        };
        let image = collapse(kind, &deref(bp)?.0);
        write_out(out, NilconeBipartition(image))
    })
}

/// Point-count polynomial of an orbit (`Orbit`), a type-B or type-C
/// nilpotent piece, or a union of orbits of the given kind.
///
/// # Safety
/// `bp` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilcone_point_poly(
    kind: NilconePiece,
    bp: *const NilconeBipartition,
    out: *mut *mut NilconePolynomial,
) -> NilconeStatus {
    guard(|| {
        let b = &deref(bp)?.0;
        let poly = match kind {
            NilconePiece::Orbit => Ok(exotic_point_poly(b)),
            NilconePiece::TypeB => type_b_point_poly(b),
            NilconePiece::TypeC => type_c_point_poly(b),
            NilconePiece::Special => piece_poly(PieceKind::Special, b),
            NilconePiece::Tilde => piece_poly(PieceKind::Tilde, b),
            NilconePiece::E => piece_poly(PieceKind::E, b),
            NilconePiece::ScriptE => piece_poly(PieceKind::ScriptE, b),
        }
        .map_err(invalid)?;
        write_out(out, NilconePolynomial(poly))
    })
}

/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nilcone_polynomial_free(p: *mut NilconePolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Degree, or -1 for the zero polynomial or a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nilcone_polynomial_degree(p: *const NilconePolynomial) -> i64 {
    p.as_ref().and_then(|p| p.0.degree()).map_or(-1, i64::from)
}

/// Dense coefficients, constant term first.
///
/// # Safety
/// `buf` must be valid for `cap` entries; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilcone_polynomial_coefficients(
    p: *const NilconePolynomial,
    buf: *mut i64,
    cap: usize,
    len: *mut usize,
) -> NilconeStatus {
    guard(|| {
        let p = &deref(p)?.0;
        let dense: Vec<i64> = match p.degree() {
            Some(d) => (0..=d).map(|e| p.coefficient(e)).collect(),
            None => Vec::new(),
        };
        write_array(&dense, buf, cap, len)
    })
}

/// Value at `q`; fails with `InvalidArgument` if it does not fit in 64 bits.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilcone_polynomial_eval(p: *const NilconePolynomial, q: i64, out: *mut i64) -> NilconeStatus {
    guard(|| {
        let v = deref(p)?.0.evaluate(q);
        let v = i64::try_from(v).map_err(|_| invalid("value does not fit in 64 bits"))?;
        if out.is_null() {
            return Err(null());
        }
        *out = v;
        Ok(())
    })
}

/// Text form such as `t^4 - 1`; release with `nilcone_string_free`.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nilcone_polynomial_to_string(p: *const NilconePolynomial) -> *mut c_char {
    match p.as_ref() {
        Some(p) => to_c_string(p.0.to_string()),
        None => ptr::null_mut(),
    }
}

/// Runs all polynomial identity checks for rank `n`.
///
/// # Safety
/// `passed` and `failures` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilcone_verify_identities(n: u32, passed: *mut bool, failures: *mut usize) -> NilconeStatus {
    guard(|| {
        if passed.is_null() || failures.is_null() {
            return Err(null());
        }
        if n > 12 {
            return Err((NilconeStatus::BudgetExceeded, format!("n = {n} is above 12")));
        }
        let r = verify_identities(n);
        *passed = r.passed();
        *failures = r.failures.len();
        Ok(())
    })
}

/// Enumerates a nilpotent cone over F_q and compares tallies with polynomials.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nilcone_census_run(
    cone: NilconeCone,
    n: u32,
    q: u32,
    override_budget: bool,
    out: *mut *mut NilconeCensusReport,
) -> NilconeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let cone = match cone {
            NilconeCone::Exotic => Cone::Exotic,
            NilconeCone::Sp2 => Cone::Sp2,
            NilconeCone::O2 => Cone::O2,
            NilconeCone::SpOdd => Cone::SpOdd,
            NilconeCone::OOdd => Cone::OOdd,
        };
        let report = run_census(cone, n, q, override_budget).map_err(cone_err)?;
        write_out(out, NilconeCensusReport(report))
    })
}

/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nilcone_census_free(r: *mut NilconeCensusReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Whether every tally matched; false for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nilcone_census_passed(r: *const NilconeCensusReport) -> bool {
    r.as_ref().is_some_and(|r| r.0.passed)
}

/// Number of nilpotent points found.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nilcone_census_points(r: *const NilconeCensusReport) -> u64 {
    r.as_ref().map_or(0, |r| r.0.points)
}

/// Number of report lines.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nilcone_census_line_count(r: *const NilconeCensusReport) -> usize {
    r.as_ref().map_or(0, |r| r.0.lines.len())
}

/// Report as JSON; release with `nilcone_string_free`.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nilcone_census_to_json(r: *const NilconeCensusReport) -> *mut c_char {
    match r.as_ref() {
        Some(r) => to_c_string(serde_json::to_string(&r.0).expect("serializable")),
        None => ptr::null_mut(),
    }
}

/// Report as CSV; release with `nilcone_string_free`.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nilcone_census_to_csv(r: *const NilconeCensusReport) -> *mut c_char {
    match r.as_ref() {
        Some(r) => to_c_string(r.0.to_csv()),
        None => ptr::null_mut(),
    }
}
