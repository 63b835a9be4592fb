//! C ABI over `toda-tau`.
//!
//! Every entry point returns a [`TodaStatus`]; results come back through out
//! pointers. Handles are opaque and owned by the caller, who releases them with
//! the matching `*_free`. On failure the message of the most recent error on the
//! calling thread is available from [`toda_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use toda_tau::contour::{build_domain, ContourGrid};
use toda_tau::flow::{hierarchy_element, symbol_of_q, toda_apply, toda_trajectory, FlowError, FlowSpec, Trajectory};
use toda_tau::jacobi::{JacobiCoefficients, Tail};
use toda_tau::symbol::GroupElement;
use toda_tau::tau::tau_det;
use toda_tau::Complex64;

/// Status codes, aligned with the CLI exit codes where they overlap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TodaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Contour grid and truncation.
pub struct TodaGrid {
    inner: ContourGrid,
}

/// Eventually-free Jacobi coefficients.
pub struct TodaCoefficients {
    inner: JacobiCoefficients,
}

/// Coefficients on a window at a list of flow times.
pub struct TodaTrajectory {
    inner: Trajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(TodaStatus, String);

impl From<FlowError> for Failure {
    fn from(e: FlowError) -> Self {
        let status = if matches!(e, FlowError::Spec(_)) { TodaStatus::InvalidArgument } else { TodaStatus::Numerical };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(TodaStatus::InvalidArgument, msg.into())
}

fn numerical(e: impl std::fmt::Display) -> Failure {
    Failure(TodaStatus::Numerical, e.to_string())
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> TodaStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TodaStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            TodaStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(TodaStatus::NullPointer, format!("{name} is null")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure(TodaStatus::NullPointer, format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut T, v: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(TodaStatus::NullPointer, format!("{name} is null")));
    }
    out.write(v);
    Ok(())
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(TodaStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|e| invalid(format!("{name}: {e}")))
}

/// Copies the last error message on this thread into `buf` (NUL-terminated)
/// and stores the full length, without the terminator, in `len_out`.
///
/// Returns `BufferTooSmall` when `buf_len` cannot hold the message; `len_out`
/// is still set. An empty message means no error is recorded.
///
/// # Safety
/// `buf` must point to `buf_len` writable bytes or be null with `buf_len == 0`;
/// `len_out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn toda_last_error_message(buf: *mut c_char, buf_len: usize, len_out: *mut usize) -> TodaStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone()).unwrap_or_default();
    let bytes = msg.as_bytes_with_nul();
    if !len_out.is_null() {
        len_out.write(bytes.len() - 1);
    }
    if buf_len < bytes.len() || buf.is_null() {
        return TodaStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, bytes.len());
    TodaStatus::Ok
}

/// Builds a grid; `m` nodes per circle, truncation `|n| <= n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toda_grid_new(lambda0: f64, radius: f64, m: usize, n: usize, out: *mut *mut TodaGrid) -> TodaStatus {
    guard(|| {
        let grid = build_domain(lambda0, radius, m, n).map_err(|e| invalid(e.to_string()))?;
        put(out, Box::into_raw(Box::new(TodaGrid { inner: grid })), "out")
    })
}

/// # Safety
/// `grid` must come from [`toda_grid_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn toda_grid_free(grid: *mut TodaGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Coefficients `a[i], b[i]` at sites `n_min + i`, with the constant tail outside.
///
/// # Safety
/// `a` and `b` must each point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toda_coefficients_new(
    n_min: i64,
    a: *const f64,
    b: *const f64,
    len: usize,
    tail_a: f64,
    tail_b: f64,
    out: *mut *mut TodaCoefficients,
) -> TodaStatus {
    guard(|| {
        if len == 0 {
            return Err(invalid("len must be positive"));
        }
        let q = JacobiCoefficients {
            n_min,
            n_max: n_min + len as i64 - 1,
            a: slice(a, len, "a")?.to_vec(),
            b: slice(b, len, "b")?.to_vec(),
            tail: Tail { a: tail_a, b: tail_b },
        };
        q.validate().map_err(|e| invalid(e.to_string()))?;
        put(out, Box::into_raw(Box::new(TodaCoefficients { inner: q })), "out")
    })
}

/// Parses coefficients from the JSON form used by the CLI config's `q` key.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toda_coefficients_from_json(json: *const c_char, out: *mut *mut TodaCoefficients) -> TodaStatus {
    guard(|| {
        let q: JacobiCoefficients = serde_json::from_str(str_arg(json, "json")?).map_err(|e| invalid(e.to_string()))?;
        q.validate().map_err(|e| invalid(e.to_string()))?;
        put(out, Box::into_raw(Box::new(TodaCoefficients { inner: q })), "out")
    })
}

/// # Safety
/// `q` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn toda_coefficients_free(q: *mut TodaCoefficients) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// `a_n` and `b_n` at any site, tail included.
///
/// # Safety
/// `q` must be a live handle; `a` and `b` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toda_coefficients_get(q: *const TodaCoefficients, n: i64, a: *mut f64, b: *mut f64) -> TodaStatus {
    guard(|| {
        let q = &borrow(q, "q")?.inner;
        put(a, q.a(n), "a")?;
        put(b, q.b(n), "b")
    })
}

/// Tau of the m-symbol of `q` at a group element given as JSON.
///
/// # Safety
/// Handles must be live, `g_json` NUL-terminated, `re` and `im` writable.
#[no_mangle]
pub unsafe extern "C" fn toda_tau(
    grid: *const TodaGrid,
    q: *const TodaCoefficients,
    g_json: *const c_char,
    re: *mut f64,
    im: *mut f64,
) -> TodaStatus {
    guard(|| {
        let grid = &borrow(grid, "grid")?.inner;
        let q = &borrow(q, "q")?.inner;
        let g: GroupElement = serde_json::from_str(str_arg(g_json, "g_json")?).map_err(|e| invalid(e.to_string()))?;
        g.validate(grid.domain()).map_err(|e| invalid(e.to_string()))?;
        let sym = symbol_of_q(grid, q)?;
        let v = tau_det(grid, &sym, &g).map_err(numerical)?.value;
        put(re, v.re, "re")?;
        put(im, v.im, "im")
    })
}

/// Tau at `q_ζ` for `ζ = zeta_re + i·zeta_im`.
///
/// # Safety
/// As for [`toda_tau`].
#[no_mangle]
pub unsafe extern "C" fn toda_tau_qzeta(
    grid: *const TodaGrid,
    q: *const TodaCoefficients,
    zeta_re: f64,
    zeta_im: f64,
    re: *mut f64,
    im: *mut f64,
) -> TodaStatus {
    guard(|| {
        let grid = &borrow(grid, "grid")?.inner;
        let q = &borrow(q, "q")?.inner;
        let g = GroupElement::q_zeta(Complex64::new(zeta_re, zeta_im));
        g.validate(grid.domain()).map_err(|e| invalid(e.to_string()))?;
        let sym = symbol_of_q(grid, q)?;
        let v = tau_det(grid, &sym, &g).map_err(numerical)?.value;
        put(re, v.re, "re")?;
        put(im, v.im, "im")
    })
}

/// Flows `q` for time `t` along the hierarchy of `p` (ascending coefficients)
/// and returns the coefficients on `[n_lo, n_hi]` with a free tail.
///
/// # Safety
/// Handles must be live, `p` must point to `p_len` doubles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn toda_flow_apply(
    grid: *const TodaGrid,
    q: *const TodaCoefficients,
    p: *const f64,
    p_len: usize,
    t: f64,
    n_lo: i64,
    n_hi: i64,
    out: *mut *mut TodaCoefficients,
) -> TodaStatus {
    guard(|| {
        let grid = &borrow(grid, "grid")?.inner;
        let q = &borrow(q, "q")?.inner;
        let p = slice(p, p_len, "p")?;
        let spec = FlowSpec { p: p.to_vec(), times: vec![t], window: [n_lo, n_hi] };
        spec.validate()?;
        let r = toda_apply(grid, q, &hierarchy_element(p, t), [n_lo, n_hi])?;
        put(out, Box::into_raw(Box::new(TodaCoefficients { inner: r })), "out")
    })
}

/// Runs the flow at every time in `times` from one base symbol.
///
/// # Safety
/// Handles must be live, `p` and `times` must point to `p_len` and
/// `times_len` doubles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn toda_trajectory_new(
    grid: *const TodaGrid,
    q: *const TodaCoefficients,
    p: *const f64,
    p_len: usize,
    times: *const f64,
    times_len: usize,
    n_lo: i64,
    n_hi: i64,
    out: *mut *mut TodaTrajectory,
) -> TodaStatus {
    guard(|| {
        let grid = &borrow(grid, "grid")?.inner;
        let q = &borrow(q, "q")?.inner;
        let spec = FlowSpec {
            p: slice(p, p_len, "p")?.to_vec(),
            times: slice(times, times_len, "times")?.to_vec(),
            window: [n_lo, n_hi],
        };
        let traj = toda_trajectory(grid, q, &spec)?;
        put(out, Box::into_raw(Box::new(TodaTrajectory { inner: traj })), "out")
    })
}

/// # Safety
/// `traj` must come from [`toda_trajectory_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn toda_trajectory_free(traj: *mut TodaTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of time points.
///
/// # Safety
/// `traj` must be a live handle; `len` writable.
#[no_mangle]
pub unsafe extern "C" fn toda_trajectory_len(traj: *const TodaTrajectory, len: *mut usize) -> TodaStatus {
    guard(|| put(len, borrow(traj, "traj")?.inner.points.len(), "len"))
}

/// Time, `a_n` and `b_n` of point `k`.
///
/// # Safety
/// `traj` must be a live handle; out pointers writable.
#[no_mangle]
pub unsafe extern "C" fn toda_trajectory_get(
    traj: *const TodaTrajectory,
    k: usize,
    n: i64,
    t: *mut f64,
    a: *mut f64,
    b: *mut f64,
) -> TodaStatus {
    guard(|| {
        let points = &borrow(traj, "traj")?.inner.points;
        let pt = points.get(k).ok_or_else(|| invalid(format!("point {k} of {}", points.len())))?;
        put(t, pt.t, "t")?;
        put(a, pt.q.a(n), "a")?;
        put(b, pt.q.b(n), "b")
    })
}

/// Smallest tau value used while recovering any point.
///
/// # Safety
/// `traj` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn toda_trajectory_min_tau(traj: *const TodaTrajectory, out: *mut f64) -> TodaStatus {
    guard(|| put(out, borrow(traj, "traj")?.inner.min_tau(), "out"))
}
