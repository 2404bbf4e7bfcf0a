//! C ABI for `sepscan`.
//!
//! States and factorizations are opaque heap handles released with the
//! matching `_free` function. Every fallible call returns a
//! [`SepscanStatus`]; on failure the message is kept per thread and can be
//! read with [`sepscan_last_error_message`]. Amplitudes are passed as
//! interleaved `re, im` doubles with qubit 1 as the most significant bit.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use sepscan::classify::{finest_factorization, FactorizationTree};
use sepscan::sepcrit::{
    block_separable, fully_separable, one_part_separable, schmidt_oracle, Thresholds,
};
use sepscan::{Error, PureState, QubitLabel, Subsystem};

/// Default absolute tolerance for separability decisions.
pub const SEPSCAN_DEFAULT_TOLERANCE: f64 = 1e-9;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SepscanStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    TooLarge = 3,
    Disagreement = 4,
    Numerical = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Opaque pure state.
pub struct SepscanState {
    state: PureState,
}

/// Opaque finest factorization.
pub struct SepscanFactorization {
    tree: FactorizationTree,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Fail(SepscanStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::TooManyQubits { .. } => SepscanStatus::TooLarge,
            Error::Disagreement { .. } => SepscanStatus::Disagreement,
            Error::Numerical(_) | Error::NonHermitian(_) => SepscanStatus::Numerical,
            _ => SepscanStatus::InvalidInput,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(SepscanStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SepscanStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SepscanStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            SepscanStatus::Panic
        }
    }
}

fn thresholds(tol: f64) -> Result<Thresholds, Fail> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Fail(
            SepscanStatus::InvalidInput,
            format!("tolerance must be positive, got {tol}"),
        ));
    }
    Ok(Thresholds::with_tolerance(tol))
}

unsafe fn state_ref<'a>(s: *const SepscanState) -> Result<&'a PureState, Fail> {
    s.as_ref().map(|h| &h.state).ok_or_else(|| null("state"))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn block_from(labels: *const usize, count: usize) -> Result<Subsystem, Fail> {
    if labels.is_null() {
        return Err(null("labels"));
    }
    let slice = std::slice::from_raw_parts(labels, count);
    Ok(Subsystem::new(slice.iter().copied())?)
}

/// Builds a state from `len` amplitudes given as `2 * len` interleaved
/// doubles. The vector must have unit norm within 1e-6.
///
/// # Safety
/// `re_im` must point to `2 * len` readable doubles and `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sepscan_state_new(
    re_im: *const f64,
    len: usize,
    out: *mut *mut SepscanState,
) -> SepscanStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if re_im.is_null() {
            return Err(null("re_im"));
        }
        let raw = std::slice::from_raw_parts(re_im, 2 * len);
        let amps = raw
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        let state = PureState::new(amps)?;
        *out = Box::into_raw(Box::new(SepscanState { state }));
        Ok(())
    })
}

/// # Safety
/// `state` must come from [`sepscan_state_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sepscan_state_free(state: *mut SepscanState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sepscan_state_qubits(
    state: *const SepscanState,
    out: *mut usize,
) -> SepscanStatus {
    guard(|| {
        *out_ref(out, "out")? = state_ref(state)?.n();
        Ok(())
    })
}

/// Tests whether qubit `label` (1-based) factors out. Writes the verdict
/// and the squared Bloch-vector norm.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sepscan_one_part_separable(
    state: *const SepscanState,
    label: usize,
    tol: f64,
    separable: *mut bool,
    xi_sq: *mut f64,
) -> SepscanStatus {
    guard(|| {
        let v = one_part_separable(
            state_ref(state)?,
            QubitLabel::new(label)?,
            &thresholds(tol)?,
        )?;
        *out_ref(separable, "separable")? = v.separable;
        *out_ref(xi_sq, "xi_sq")? = v.norm_sq;
        Ok(())
    })
}

/// Tests whether the block of `count` labels factors out. Writes the
/// verdict and the residual `max_norm_sq - norm_sq`.
///
/// # Safety
/// `labels` must point to `count` readable values; other pointers valid.
#[no_mangle]
pub unsafe extern "C" fn sepscan_block_separable(
    state: *const SepscanState,
    labels: *const usize,
    count: usize,
    tol: f64,
    separable: *mut bool,
    residual: *mut f64,
) -> SepscanStatus {
    guard(|| {
        let block = block_from(labels, count)?;
        let v = block_separable(state_ref(state)?, &block, &thresholds(tol)?)?;
        *out_ref(separable, "separable")? = v.separable;
        *out_ref(residual, "residual")? = v.residual;
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sepscan_fully_separable(
    state: *const SepscanState,
    tol: f64,
    separable: *mut bool,
) -> SepscanStatus {
    guard(|| {
        *out_ref(separable, "separable")? =
            fully_separable(state_ref(state)?, &thresholds(tol)?)?.separable;
        Ok(())
    })
}

/// Schmidt coefficients across `block | complement`, descending. `len`
/// receives the count; if `cap` is smaller, nothing is copied and
/// `BufferTooSmall` is returned.
///
/// # Safety
/// `out` must have room for `cap` doubles; other pointers valid.
#[no_mangle]
pub unsafe extern "C" fn sepscan_schmidt_coefficients(
    state: *const SepscanState,
    labels: *const usize,
    count: usize,
    out: *mut f64,
    cap: usize,
    len: *mut usize,
) -> SepscanStatus {
    guard(|| {
        let block = block_from(labels, count)?;
        let v = schmidt_oracle(state_ref(state)?, &block, &Thresholds::default())?;
        let len = out_ref(len, "len")?;
        *len = v.singular_values.len();
        if cap < *len {
            return Err(Fail(
                SepscanStatus::BufferTooSmall,
                format!("need {} values, buffer holds {cap}", *len),
            ));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        std::ptr::copy_nonoverlapping(v.singular_values.as_ptr(), out, *len);
        Ok(())
    })
}

/// Finest tensor factorization of the state.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sepscan_factorize(
    state: *const SepscanState,
    tol: f64,
    out: *mut *mut SepscanFactorization,
) -> SepscanStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let tree = finest_factorization(state_ref(state)?, &thresholds(tol)?)?;
        *out = Box::into_raw(Box::new(SepscanFactorization { tree }));
        Ok(())
    })
}

/// # Safety
/// `f` must come from [`sepscan_factorize`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sepscan_factorization_free(f: *mut SepscanFactorization) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

unsafe fn tree_ref<'a>(f: *const SepscanFactorization) -> Result<&'a FactorizationTree, Fail> {
    f.as_ref()
        .map(|h| &h.tree)
        .ok_or_else(|| null("factorization"))
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sepscan_factorization_block_count(
    f: *const SepscanFactorization,
    out: *mut usize,
) -> SepscanStatus {
    guard(|| {
        *out_ref(out, "out")? = tree_ref(f)?.blocks.len();
        Ok(())
    })
}

/// Labels of block `index`, ascending. Same buffer protocol as
/// [`sepscan_schmidt_coefficients`].
///
/// # Safety
/// `out` must have room for `cap` values; other pointers valid.
#[no_mangle]
pub unsafe extern "C" fn sepscan_factorization_block_labels(
    f: *const SepscanFactorization,
    index: usize,
    out: *mut usize,
    cap: usize,
    len: *mut usize,
) -> SepscanStatus {
    guard(|| {
        let tree = tree_ref(f)?;
        let block = tree.blocks.get(index).ok_or_else(|| {
            Fail(
                SepscanStatus::InvalidInput,
                format!("block index {index} out of range 0..{}", tree.blocks.len()),
            )
        })?;
        let labels = block.labels.indices();
        let len = out_ref(len, "len")?;
        *len = labels.len();
        if cap < labels.len() {
            return Err(Fail(
                SepscanStatus::BufferTooSmall,
                format!("need {} labels, buffer holds {cap}", labels.len()),
            ));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        std::ptr::copy_nonoverlapping(labels.as_ptr(), out, labels.len());
        Ok(())
    })
}

/// Whether block `index` has two or more qubits with no separable part.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sepscan_factorization_block_entangled(
    f: *const SepscanFactorization,
    index: usize,
    out: *mut bool,
) -> SepscanStatus {
    guard(|| {
        let tree = tree_ref(f)?;
        let block = tree.blocks.get(index).ok_or_else(|| {
            Fail(
                SepscanStatus::InvalidInput,
                format!("block index {index} out of range"),
            )
        })?;
        *out_ref(out, "out")? = block.entangled;
        Ok(())
    })
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to `cap`). Returns the full message length
/// including the terminator; 0 means no error was recorded.
///
/// # Safety
/// `buf` must have room for `cap` bytes, or be null with `cap == 0`.
#[no_mangle]
pub unsafe extern "C" fn sepscan_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if msg.is_empty() {
            return 0;
        }
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len() + 1
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sepscan_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
