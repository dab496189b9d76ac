//! C interface to `linkage_morse`.
//!
//! Every fallible function returns an [`LmStatus`]; on failure the message is
//! available from [`lm_last_error`] on the same thread. Catalogs are opaque
//! handles released with [`lm_catalog_free`], strings with [`lm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use linkage_morse::catalog::{build_catalog, Catalog, CatalogEntry};
use linkage_morse::config::{perturb_lengths, vertices, LengthVector, PerturbationSpec};
use linkage_morse::morse::numeric_index;
use linkage_morse::topology::{betti_decorated, verify_perfect};
use linkage_morse::Error;
use num_traits::ToPrimitive;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LmStatus {
    Ok = 0,
    NullPointer = 1,
    BadParity = 2,
    InvalidArgument = 3,
    OutOfRange = 4,
    BufferTooSmall = 5,
    NumericFailure = 6,
    Internal = 7,
}

/// Opaque catalog handle.
pub struct LmCatalog(Catalog);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let text = CString::new(msg).unwrap_or_else(|e| {
        let nul = e.nul_position();
        CString::new(e.into_vec()[..nul].to_vec()).unwrap()
    });
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn fail(status: LmStatus, msg: impl Into<Vec<u8>>) -> LmStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> LmStatus {
    let status = match e {
        Error::BadParity(_) => LmStatus::BadParity,
        Error::InvalidArgument(_) | Error::InvalidLengths(_) => LmStatus::InvalidArgument,
        Error::Io(_) | Error::Json(_) => LmStatus::Internal,
        _ => LmStatus::NumericFailure,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into `Internal`.
fn guard(f: impl FnOnce() -> LmStatus) -> LmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(LmStatus::Internal, "panic inside linkage_morse"),
    }
}

unsafe fn entry<'a>(catalog: *const LmCatalog, index: usize) -> Result<&'a CatalogEntry, LmStatus> {
    let Some(cat) = catalog.as_ref() else {
        return Err(fail(LmStatus::NullPointer, "catalog is null"));
    };
    cat.0
        .entries
        .get(index)
        .ok_or_else(|| fail(LmStatus::OutOfRange, format!("entry {index} of {}", cat.0.len())))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> LmStatus {
    if out.is_null() {
        return fail(LmStatus::NullPointer, "output pointer is null");
    }
    out.write(value);
    LmStatus::Ok
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lm_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds the catalog of the equilateral `n`-gon.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn lm_catalog_build(n: usize, out: *mut *mut LmCatalog) -> LmStatus {
    guard(
        || match LengthVector::equilateral(n).and_then(|l| build_catalog(n, &l)) {
            Ok(cat) => write_out(out, Box::into_raw(Box::new(LmCatalog(cat)))),
            Err(e) => from_error(e),
        },
    )
}

/// Builds the catalog for lengths `1 + eps_i`, `eps_i` uniform in
/// `[-epsilon, epsilon]` drawn from `seed`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn lm_catalog_build_perturbed(
    n: usize,
    epsilon: f64,
    seed: u64,
    out: *mut *mut LmCatalog,
) -> LmStatus {
    guard(|| {
        let built = PerturbationSpec::new(epsilon, seed)
            .and_then(|spec| perturb_lengths(n, spec))
            .and_then(|l| build_catalog(n, &l));
        match built {
            Ok(cat) => write_out(out, Box::into_raw(Box::new(LmCatalog(cat)))),
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `catalog` must be null or a handle from `lm_catalog_build*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lm_catalog_free(catalog: *mut LmCatalog) {
    if !catalog.is_null() {
        drop(Box::from_raw(catalog));
    }
}

/// Number of entries; 0 for a null handle.
///
/// # Safety
/// `catalog` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lm_catalog_len(catalog: *const LmCatalog) -> usize {
    catalog.as_ref().map_or(0, |c| c.0.len())
}

/// # Safety
/// `catalog` must be a live handle and `omega` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_entry_omega(catalog: *const LmCatalog, index: usize, omega: *mut i64) -> LmStatus {
    guard(|| match entry(catalog, index) {
        Ok(e) => write_out(omega, e.ctype.omega()),
        Err(s) => s,
    })
}

/// Copies the `n` signs (+1/-1) of an entry into `signs`.
///
/// # Safety
/// `catalog` must be a live handle and `signs` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn lm_entry_signs(
    catalog: *const LmCatalog,
    index: usize,
    signs: *mut i8,
    len: usize,
) -> LmStatus {
    guard(|| {
        let e = match entry(catalog, index) {
            Ok(e) => e,
            Err(s) => return s,
        };
        let src = e.ctype.signs();
        if signs.is_null() {
            return fail(LmStatus::NullPointer, "signs buffer is null");
        }
        if len < src.len() {
            return fail(LmStatus::BufferTooSmall, format!("need {} signs, got {len}", src.len()));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), signs, src.len());
        LmStatus::Ok
    })
}

/// # Safety
/// `catalog` must be a live handle and `index_out` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_entry_index(catalog: *const LmCatalog, index: usize, index_out: *mut u32) -> LmStatus {
    guard(|| match entry(catalog, index) {
        Ok(e) => write_out(index_out, e.index_combinatorial),
        Err(s) => s,
    })
}

/// # Safety
/// `catalog` must be a live handle and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_entry_s_value(catalog: *const LmCatalog, index: usize, value: *mut f64) -> LmStatus {
    guard(|| match entry(catalog, index) {
        Ok(e) => write_out(value, e.s_value),
        Err(s) => s,
    })
}

/// # Safety
/// `catalog` must be a live handle and `radius` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_entry_radius(catalog: *const LmCatalog, index: usize, radius: *mut f64) -> LmStatus {
    guard(|| match entry(catalog, index) {
        Ok(e) => write_out(radius, e.radius),
        Err(s) => s,
    })
}

/// Copies the vertices as `n` consecutive `x, y, z` triples.
///
/// # Safety
/// `catalog` must be a live handle and `xyz` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn lm_entry_vertices(
    catalog: *const LmCatalog,
    index: usize,
    xyz: *mut f64,
    len: usize,
) -> LmStatus {
    guard(|| {
        let e = match entry(catalog, index) {
            Ok(e) => e,
            Err(s) => return s,
        };
        let flat: Vec<f64> = vertices(&e.config).iter().flat_map(|p| [p.x, p.y, p.z]).collect();
        if xyz.is_null() {
            return fail(LmStatus::NullPointer, "vertex buffer is null");
        }
        if len < flat.len() {
            return fail(
                LmStatus::BufferTooSmall,
                format!("need {} values, got {len}", flat.len()),
            );
        }
        ptr::copy_nonoverlapping(flat.as_ptr(), xyz, flat.len());
        LmStatus::Ok
    })
}

/// Negative-eigenvalue count of the projected Hessian at an entry.
///
/// # Safety
/// `catalog` must be a live handle and `negatives` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_numeric_index(catalog: *const LmCatalog, index: usize, negatives: *mut u32) -> LmStatus {
    guard(|| {
        let e = match entry(catalog, index) {
            Ok(e) => e,
            Err(s) => return s,
        };
        match numeric_index(e) {
            Ok(r) => write_out(negatives, r.negatives as u32),
            Err(err) => from_error(err),
        }
    })
}

/// Serializes the catalog; free the result with [`lm_string_free`].
///
/// # Safety
/// `catalog` must be a live handle and `json` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_catalog_to_json(catalog: *const LmCatalog, json: *mut *mut c_char) -> LmStatus {
    guard(|| {
        let Some(cat) = catalog.as_ref() else {
            return fail(LmStatus::NullPointer, "catalog is null");
        };
        match linkage_morse::json::to_string(&cat.0.to_json()) {
            Ok(text) => match CString::new(text) {
                Ok(c) => write_out(json, c.into_raw()),
                Err(_) => fail(LmStatus::Internal, "interior NUL in JSON"),
            },
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Sets `*perfect` to whether the Morse census matches the decorated Betti
/// numbers for `n` edges.
///
/// # Safety
/// `perfect` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lm_verify_perfect(n: usize, perfect: *mut bool) -> LmStatus {
    guard(|| match verify_perfect(n) {
        Ok(r) => write_out(perfect, r.verdict),
        Err(e) => from_error(e),
    })
}

/// Writes the decorated Betti numbers `b_0 .. b_dim` into `betti` and the
/// count into `*written`. With `betti` null only `*written` is set.
///
/// # Safety
/// `written` must be writable and `betti` null or valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn lm_betti_decorated(n: usize, betti: *mut u64, len: usize, written: *mut usize) -> LmStatus {
    guard(|| {
        let table = match betti_decorated(n) {
            Ok(t) => t,
            Err(e) => return from_error(e),
        };
        let count = table.betti.len();
        let status = write_out(written, count);
        if status != LmStatus::Ok || betti.is_null() {
            return status;
        }
        if len < count {
            return fail(LmStatus::BufferTooSmall, format!("need {count} values, got {len}"));
        }
        for (i, b) in table.betti.iter().enumerate() {
            match b.to_u64() {
                Some(v) => betti.add(i).write(v),
                None => return fail(LmStatus::OutOfRange, format!("b_{i} exceeds 64 bits")),
            }
        }
        LmStatus::Ok
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn lm_status_str(status: LmStatus) -> *const c_char {
    let s: &'static CStr = match status {
        LmStatus::Ok => c"ok",
        LmStatus::NullPointer => c"null pointer",
        LmStatus::BadParity => c"edge count must be odd and at least 5",
        LmStatus::InvalidArgument => c"invalid argument",
        LmStatus::OutOfRange => c"out of range",
        LmStatus::BufferTooSmall => c"buffer too small",
        LmStatus::NumericFailure => c"numeric failure",
        LmStatus::Internal => c"internal error",
    };
    s.as_ptr()
}
