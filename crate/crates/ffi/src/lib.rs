//! C interface to the `penrose` library.
//!
//! Operators are opaque handles created by `penrose_operator_*` functions
//! and released with `penrose_operator_free`. Every fallible call returns a
//! `PenroseStatus`; on failure `penrose_last_error_message` describes the
//! error for the calling thread.
//!
//! Coefficient buffers use the operator-file layout: entries in row-major
//! order, each entry as its blocks in signature order, each block row-major,
//! and each complex number as two consecutive doubles `re, im`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use penrose::cli::OperatorFile;
use penrose::pinv::RankTol;
use penrose::{
    check_corollary, gen_instance, moore_penrose, AdjointableOp, AlgebraElement, AlgebraSignature, CMatrix, Dims,
    Error, InstanceKind, C64,
};

/// Opaque operator handle.
pub struct PenroseOperator(AdjointableOp);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PenroseStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Conformability = 3,
    Numerical = 4,
    GenerationFailure = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct PenrosePinvSummary {
    /// Rank of the flattening.
    pub rank: usize,
    pub largest_singular_value: f64,
    pub cutoff: f64,
    /// Residuals of TXT = T, XTX = X, (TX)* = TX, (XT)* = XT.
    pub penrose_residuals: [f64; 4],
    pub boundary_flag: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct PenroseCertificate {
    pub tol: f64,
    pub residual_rol: f64,
    pub rol_holds: bool,
    pub thm21_residuals: [f64; 3],
    pub thm21_holds: [bool; 3],
    pub thm22_residuals: [f64; 3],
    pub thm22_holds: [bool; 3],
    /// Ran(T*TS) in Ran(S), then Ran(SS*T*) in Ran(T*).
    pub greville_residuals: [f64; 2],
    pub greville_holds: [bool; 2],
    pub consistent: bool,
    pub boundary_flag: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

type Failure = (PenroseStatus, String);

fn status_of(e: &Error) -> PenroseStatus {
    match e {
        Error::Conformability(_) => PenroseStatus::Conformability,
        Error::InvalidInput(_) | Error::Infeasible(_) => PenroseStatus::InvalidInput,
        Error::GenerationFailure { .. } => PenroseStatus::GenerationFailure,
        Error::Structure { .. }
        | Error::InvalidDecomposition(_)
        | Error::DegenerateDecomposition(_)
        | Error::Singular(_) => PenroseStatus::Numerical,
    }
}

fn lib(e: Error) -> Failure {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> Failure {
    (PenroseStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PenroseStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PenroseStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PenroseStatus::Panic
        }
    }
}

unsafe fn op_ref<'a>(p: *const PenroseOperator, what: &str) -> Result<&'a AdjointableOp, Failure> {
    p.as_ref().map(|o| &o.0).ok_or_else(|| null(what))
}

fn into_handle(op: AdjointableOp) -> *mut PenroseOperator {
    Box::into_raw(Box::new(PenroseOperator(op)))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn coefficient_count(op: &AdjointableOp) -> usize {
    op.rows() * op.cols() * op.signature().dim() * 2
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn penrose_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn penrose_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds an operator from `signature[0..sig_len]` block sizes and
/// `data[0..data_len]` coefficients.
///
/// # Safety
/// `signature` and `data` must be readable for the given lengths and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn penrose_operator_new(
    signature: *const usize,
    sig_len: usize,
    rows: usize,
    cols: usize,
    data: *const f64,
    data_len: usize,
    out: *mut *mut PenroseOperator,
) -> PenroseStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let sig = AlgebraSignature::new(slice(signature, sig_len, "signature")?).map_err(lib)?;
        let data = slice(data, data_len, "data")?;
        let needed = rows * cols * sig.dim() * 2;
        if data_len != needed {
            return Err((
                PenroseStatus::InvalidInput,
                format!("data has {data_len} doubles, a {rows}x{cols} operator over {sig} needs {needed}"),
            ));
        }
        let mut off = 0;
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let mut blocks = Vec::new();
            for &n in sig.block_sizes() {
                let z: Vec<C64> = (0..n * n).map(|i| C64::new(data[off + 2 * i], data[off + 2 * i + 1])).collect();
                if z.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err((PenroseStatus::InvalidInput, "data contains a non-finite value".into()));
                }
                blocks.push(CMatrix::from_row_major(n, n, &z));
                off += 2 * n * n;
            }
            entries.push(AlgebraElement::new(&sig, blocks).map_err(lib)?);
        }
        let op = AdjointableOp::from_entries(&sig, rows, cols, &entries).map_err(lib)?;
        *out = into_handle(op);
        Ok(())
    })
}

/// Parses an operator file held in a NUL-terminated string.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn penrose_operator_from_json(json: *const c_char, out: *mut *mut PenroseOperator) -> PenroseStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (PenroseStatus::InvalidInput, format!("json is not UTF-8: {e}")))?;
        let op = OperatorFile::parse(text).and_then(|f| f.to_op()).map_err(lib)?;
        *out = into_handle(op);
        Ok(())
    })
}

/// Renders an operator in the operator-file format. Release the string
/// with `penrose_string_free`.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn penrose_operator_to_json(op: *const PenroseOperator, out: *mut *mut c_char) -> PenroseStatus {
    guard(|| {
        let op = op_ref(op, "op")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = OperatorFile::from_op(op).to_json();
        *out = CString::new(text).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// # Safety
/// `op` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn penrose_operator_free(op: *mut PenroseOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn penrose_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Module rows; 0 for NULL.
///
/// # Safety
/// `op` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn penrose_operator_rows(op: *const PenroseOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.rows())
}

/// Module columns; 0 for NULL.
///
/// # Safety
/// `op` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn penrose_operator_cols(op: *const PenroseOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.cols())
}

/// Copies the coefficients into `buf`. `needed` (if not NULL) receives the
/// required number of doubles; a short buffer yields `BufferTooSmall`.
///
/// # Safety
/// `op` must be a live handle, `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn penrose_operator_data(
    op: *const PenroseOperator,
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> PenroseStatus {
    guard(|| {
        let op = op_ref(op, "op")?;
        let n = coefficient_count(op);
        if let Some(w) = needed.as_mut() {
            *w = n;
        }
        if len < n {
            return Err((PenroseStatus::BufferTooSmall, format!("buffer holds {len} doubles, {n} needed")));
        }
        if n > 0 && buf.is_null() {
            return Err(null("buf"));
        }
        let mut k = 0;
        for e in op.entries() {
            for b in e.blocks() {
                for z in b.to_row_major() {
                    *buf.add(k) = z.re;
                    *buf.add(k + 1) = z.im;
                    k += 2;
                }
            }
        }
        Ok(())
    })
}

/// Copies the flattened complex matrix, row-major with interleaved
/// `re, im`, into `buf`; `flat_rows` and `flat_cols` receive its shape.
///
/// # Safety
/// `op` must be a live handle, `buf` writable for `len` doubles and the
/// shape pointers NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn penrose_operator_flatten(
    op: *const PenroseOperator,
    buf: *mut f64,
    len: usize,
    flat_rows: *mut usize,
    flat_cols: *mut usize,
) -> PenroseStatus {
    guard(|| {
        let op = op_ref(op, "op")?;
        let m = op.flat();
        if let Some(r) = flat_rows.as_mut() {
            *r = m.rows();
        }
        if let Some(c) = flat_cols.as_mut() {
            *c = m.cols();
        }
        let n = 2 * m.rows() * m.cols();
        if len < n {
            return Err((PenroseStatus::BufferTooSmall, format!("buffer holds {len} doubles, {n} needed")));
        }
        if n > 0 && buf.is_null() {
            return Err(null("buf"));
        }
        for (k, z) in m.to_row_major().iter().enumerate() {
            *buf.add(2 * k) = z.re;
            *buf.add(2 * k + 1) = z.im;
        }
        Ok(())
    })
}

/// Moore-Penrose inverse. `rank_tol <= 0` selects the automatic cutoff,
/// otherwise singular values above `rank_tol` are kept. `summary` and
/// `out_pinv` may each be NULL when not wanted.
///
/// # Safety
/// `op` must be a live handle; the out pointers NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn penrose_pinv(
    op: *const PenroseOperator,
    rank_tol: f64,
    summary: *mut PenrosePinvSummary,
    out_pinv: *mut *mut PenroseOperator,
) -> PenroseStatus {
    guard(|| {
        let op = op_ref(op, "op")?;
        let tol = if rank_tol.is_nan() {
            return Err((PenroseStatus::InvalidInput, "rank_tol is NaN".into()));
        } else if rank_tol > 0.0 {
            RankTol::Absolute(rank_tol)
        } else {
            RankTol::Auto
        };
        let p = moore_penrose(op, tol).map_err(lib)?;
        if let Some(s) = summary.as_mut() {
            *s = PenrosePinvSummary {
                rank: p.rank,
                largest_singular_value: p.singular_values.first().copied().unwrap_or(0.0),
                cutoff: p.cutoff,
                penrose_residuals: p.penrose_residuals,
                boundary_flag: p.boundary_flag,
            };
        }
        if !out_pinv.is_null() {
            *out_pinv = into_handle(p.pseudoinverse);
        }
        Ok(())
    })
}

fn positive_tol(tol: f64) -> Result<f64, Failure> {
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err((PenroseStatus::InvalidInput, format!("tol must be positive, got {tol}")))
    }
}

/// Reverse-order-law certificate for the pair `(T, S)`.
///
/// # Safety
/// `t` and `s` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn penrose_check(
    t: *const PenroseOperator,
    s: *const PenroseOperator,
    tol: f64,
    out: *mut PenroseCertificate,
) -> PenroseStatus {
    guard(|| {
        let (t, s) = (op_ref(t, "t")?, op_ref(s, "s")?);
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let c = check_corollary(t, s, positive_tol(tol)?).map_err(lib)?;
        let g = [c.greville.tstar_t_s_in_ran_s, c.greville.s_sstar_tstar_in_ran_tstar];
        *out = PenroseCertificate {
            tol: c.tol,
            residual_rol: c.residual_rol,
            rol_holds: c.rol_holds,
            thm21_residuals: c.thm21.conditions().map(|x| x.residual),
            thm21_holds: c.thm21.verdicts(),
            thm22_residuals: c.thm22.conditions().map(|x| x.residual),
            thm22_holds: c.thm22.verdicts(),
            greville_residuals: g.map(|x| x.residual),
            greville_holds: g.map(|x| x.holds),
            consistent: c.consistent,
            boundary_flag: c.boundary_flag,
        };
        Ok(())
    })
}

/// The same certificate as JSON. Release with `penrose_string_free`.
///
/// # Safety
/// `t` and `s` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn penrose_check_json(
    t: *const PenroseOperator,
    s: *const PenroseOperator,
    tol: f64,
    out: *mut *mut c_char,
) -> PenroseStatus {
    guard(|| {
        let (t, s) = (op_ref(t, "t")?, op_ref(s, "s")?);
        if out.is_null() {
            return Err(null("out"));
        }
        let c = check_corollary(t, s, positive_tol(tol)?).map_err(lib)?;
        let text = serde_json::to_string_pretty(&c).expect("certificates serialize");
        *out = CString::new(text).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// Seeded random pair of the named kind (`generic`, `rol_holds`,
/// `thm21_only`, `thm22_only`, `s_adjoint`) with `T` of shape `p x m` and
/// `S` of shape `m x k`.
///
/// # Safety
/// `kind` must be a NUL-terminated string, `signature` readable for
/// `sig_len` values and both out pointers writable.
#[no_mangle]
pub unsafe extern "C" fn penrose_gen_instance(
    kind: *const c_char,
    p: usize,
    m: usize,
    k: usize,
    signature: *const usize,
    sig_len: usize,
    seed: u64,
    out_t: *mut *mut PenroseOperator,
    out_s: *mut *mut PenroseOperator,
) -> PenroseStatus {
    guard(|| {
        if kind.is_null() {
            return Err(null("kind"));
        }
        if out_t.is_null() || out_s.is_null() {
            return Err(null("out"));
        }
        let kind: InstanceKind = CStr::from_ptr(kind)
            .to_str()
            .map_err(|e| (PenroseStatus::InvalidInput, e.to_string()))?
            .parse()
            .map_err(lib)?;
        let sig = AlgebraSignature::new(slice(signature, sig_len, "signature")?).map_err(lib)?;
        let (t, s) = gen_instance(kind, Dims::new(p, m, k), None, &sig, seed).map_err(lib)?;
        *out_t = into_handle(t);
        *out_s = into_handle(s);
        Ok(())
    })
}
