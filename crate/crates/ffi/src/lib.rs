//! C ABI over the `cstrain` library.
//!
//! Matrices cross the boundary as opaque [`CstrainMatrix`] handles that the
//! caller frees with [`cstrain_matrix_free`]. Every entry point returns a
//! [`CstrainStatus`]; on failure a human-readable message for the calling
//! thread is available from [`cstrain_last_error_message`]. Panics are caught
//! at the boundary and reported as `CSTRAIN_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use cstrain::dictlearn::{sparse_factorization, FactorOptions};
use cstrain::l1::{basis_pursuit, SolveStatus, SolverOptions};
use cstrain::linalg::{rip_constant, stable_rank};
use cstrain::pipeline::sparse_recovery;
use cstrain::rng::RngStream;
use cstrain::{DenseMatrix, Error};

/// Result code of every exported function. `CSTRAIN_STATUS_OK` is zero.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CstrainStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ZeroColumn = 3,
    ZeroMatrix = 4,
    ShapeMismatch = 5,
    NonFinite = 6,
    TooManySupports = 7,
    InvalidSpec = 8,
    BadSparsity = 9,
    BadShape = 10,
    Infeasible = 11,
    MaxIters = 12,
    DegenerateConstraint = 13,
    TooLarge = 14,
    AllDegenerate = 15,
    NoCandidates = 16,
    FactorizationFailed = 17,
    NotEnoughEasy = 18,
    AllFailed = 19,
    InfeasibleKnobs = 20,
    Parse = 21,
    Io = 22,
    Json = 23,
    Csv = 24,
    BufferTooSmall = 25,
    Panic = 99,
}

impl From<&Error> for CstrainStatus {
    fn from(e: &Error) -> Self {
        use CstrainStatus as S;
        match e {
            Error::ZeroColumn(_) => S::ZeroColumn,
            Error::ZeroMatrix => S::ZeroMatrix,
            Error::ShapeMismatch(_) => S::ShapeMismatch,
            Error::NonFinite { .. } => S::NonFinite,
            Error::TooManySupports { .. } => S::TooManySupports,
            Error::InvalidSpec(_) => S::InvalidSpec,
            Error::BadSparsity { .. } => S::BadSparsity,
            Error::BadShape(_) => S::BadShape,
            Error::Infeasible { .. } => S::Infeasible,
            Error::MaxIters(_) => S::MaxIters,
            Error::DegenerateConstraint(_) => S::DegenerateConstraint,
            Error::TooLarge { .. } => S::TooLarge,
            Error::AllDegenerate => S::AllDegenerate,
            Error::NoCandidates => S::NoCandidates,
            Error::FactorizationFailed(_) => S::FactorizationFailed,
            Error::NotEnoughEasy(_) => S::NotEnoughEasy,
            Error::AllFailed => S::AllFailed,
            Error::InfeasibleKnobs(_) => S::InfeasibleKnobs,
            Error::InvalidArgument(_) => S::InvalidArgument,
            Error::Parse(_) => S::Parse,
            Error::Io(_) => S::Io,
            Error::Json(_) => S::Json,
            Error::Csv(_) => S::Csv,
        }
    }
}

/// Opaque dense matrix handle.
pub struct CstrainMatrix {
    inner: DenseMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    // interior NULs would truncate the C string; replace them
    let msg = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(CstrainStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(CstrainStatus::from(&e), format!("{}: {e}", e.name()))
    }
}

fn null(what: &str) -> Failure {
    Failure(CstrainStatus::NullPointer, format!("NullPointer: {what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CstrainStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CstrainStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("Panic: {msg}"));
            CstrainStatus::Panic
        }
    }
}

unsafe fn matrix_ref<'a>(m: *const CstrainMatrix, what: &str) -> Result<&'a DenseMatrix, Failure> {
    m.as_ref().map(|h| &h.inner).ok_or_else(|| null(what))
}

unsafe fn slice<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn write_out(dst: *mut f64, len: usize, src: &[f64]) -> Result<(), Failure> {
    if len < src.len() {
        return Err(Failure(
            CstrainStatus::BufferTooSmall,
            format!("BufferTooSmall: need {} entries, buffer holds {len}", src.len()),
        ));
    }
    if !src.is_empty() {
        if dst.is_null() {
            return Err(null("output buffer"));
        }
        std::ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    }
    Ok(())
}

unsafe fn put<T>(dst: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if dst.is_null() {
        return Err(null(what));
    }
    dst.write(value);
    Ok(())
}

fn into_handle(m: DenseMatrix) -> *mut CstrainMatrix {
    Box::into_raw(Box::new(CstrainMatrix { inner: m }))
}

unsafe fn path<'a>(p: *const c_char) -> Result<&'a Path, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(CstrainStatus::InvalidArgument, "InvalidArgument: path is not UTF-8".into()))?;
    Ok(Path::new(s))
}

/// Message describing the most recent failure on this thread, or null if the
/// last call succeeded. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cstrain_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cstrain_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a `rows x cols` matrix from `rows * cols` row-major entries.
///
/// # Safety
/// `data` must point to `rows * cols` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstrain_matrix_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut CstrainMatrix,
) -> CstrainStatus {
    guard(|| {
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Failure(CstrainStatus::InvalidArgument, "InvalidArgument: size overflows".into()))?;
        let entries = slice(data, len, "data")?.to_vec();
        let m = DenseMatrix::from_row_major(rows, cols, entries)?;
        put(out, into_handle(m), "out")
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `m` must be null or a handle returned by this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cstrain_matrix_free(m: *mut CstrainMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cstrain_matrix_rows(m: *const CstrainMatrix) -> usize {
    m.as_ref().map_or(0, |h| h.inner.rows())
}

/// Number of columns, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cstrain_matrix_cols(m: *const CstrainMatrix) -> usize {
    m.as_ref().map_or(0, |h| h.inner.cols())
}

/// Copies the entries in row-major order into `buf`, which holds `len` doubles.
///
/// # Safety
/// `m` must be a live handle and `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cstrain_matrix_copy_row_major(
    m: *const CstrainMatrix,
    buf: *mut f64,
    len: usize,
) -> CstrainStatus {
    guard(|| write_out(buf, len, &matrix_ref(m, "matrix")?.to_row_major()))
}

/// Reads a whitespace-separated text matrix.
///
/// # Safety
/// `file` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstrain_matrix_read(file: *const c_char, out: *mut *mut CstrainMatrix) -> CstrainStatus {
    guard(|| {
        let m = cstrain::io::read_matrix_file(path(file)?)?;
        put(out, into_handle(m), "out")
    })
}

/// Writes a matrix in the text format read by [`cstrain_matrix_read`].
///
/// # Safety
/// `m` must be a live handle and `file` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cstrain_matrix_write(m: *const CstrainMatrix, file: *const c_char) -> CstrainStatus {
    guard(|| Ok(cstrain::io::write_matrix_file(path(file)?, matrix_ref(m, "matrix")?)?))
}

/// Minimum ℓ1-norm solution of `M x = b` with default solver options.
///
/// `x_out` receives `cols(M)` entries. When the solver stops at its iteration
/// limit the best iterate is still written and `CSTRAIN_STATUS_MAX_ITERS` is
/// returned. `objective` may be null.
///
/// # Safety
/// `b` must hold `b_len` doubles and `x_out` must hold `x_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cstrain_basis_pursuit(
    m: *const CstrainMatrix,
    b: *const f64,
    b_len: usize,
    x_out: *mut f64,
    x_len: usize,
    objective: *mut f64,
) -> CstrainStatus {
    guard(|| {
        let m = matrix_ref(m, "matrix")?;
        let sol = basis_pursuit(m, slice(b, b_len, "b")?, &SolverOptions::default())?;
        write_out(x_out, x_len, &sol.x)?;
        if !objective.is_null() {
            objective.write(sol.objective);
        }
        match sol.status {
            SolveStatus::Optimal => Ok(()),
            SolveStatus::MaxIters => Err(Error::MaxIters(sol.iterations).into()),
            SolveStatus::Infeasible => Err(Error::Infeasible { residual: sol.feas_residual }.into()),
        }
    })
}

/// Exhaustive restricted isometry constant of `M` at
/// sparsity `t`, enumerating at most `max_supports` supports.
///
/// # Safety
/// `m` must be a live handle and `epsilon` writable.
#[no_mangle]
pub unsafe extern "C" fn cstrain_rip_constant(
    m: *const CstrainMatrix,
    t: usize,
    max_supports: u64,
    epsilon: *mut f64,
) -> CstrainStatus {
    guard(|| {
        let est = rip_constant(matrix_ref(m, "matrix")?, t, max_supports as u128)?;
        put(epsilon, est.epsilon, "epsilon")
    })
}

/// `‖M‖_F² / ‖M‖₂²`.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cstrain_stable_rank(m: *const CstrainMatrix, out: *mut f64) -> CstrainStatus {
    guard(|| put(out, stable_rank(matrix_ref(m, "matrix")?)?, "out"))
}

/// Factors `Y ≈ X̄ Z̄` with sparse `X̄`, using the random stream
/// `(seed, stream)` for row pairings. Both outputs are new handles.
///
/// # Safety
/// `y` must be a live handle; `x_bar` and `z_bar` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstrain_sparse_factorization(
    y: *const CstrainMatrix,
    seed: u64,
    stream: u64,
    x_bar: *mut *mut CstrainMatrix,
    z_bar: *mut *mut CstrainMatrix,
) -> CstrainStatus {
    guard(|| {
        if x_bar.is_null() || z_bar.is_null() {
            return Err(null("output handle"));
        }
        let f = sparse_factorization(matrix_ref(y, "y")?, &RngStream::new(seed, stream), &FactorOptions::default())?;
        x_bar.write(into_handle(f.x_bar));
        z_bar.write(into_handle(f.z_bar));
        Ok(())
    })
}

/// Recovers `x = X̄ S z` from `b = A x` given learned components `X̄`.
///
/// # Safety
/// `b` must hold `b_len` doubles and `x_out` must hold `x_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cstrain_sparse_recovery(
    a: *const CstrainMatrix,
    b: *const f64,
    b_len: usize,
    x_bar: *const CstrainMatrix,
    x_out: *mut f64,
    x_len: usize,
) -> CstrainStatus {
    guard(|| {
        let r = sparse_recovery(
            matrix_ref(a, "a")?,
            slice(b, b_len, "b")?,
            matrix_ref(x_bar, "x_bar")?,
            &SolverOptions::default(),
        )?;
        write_out(x_out, x_len, &r.x)
    })
}
