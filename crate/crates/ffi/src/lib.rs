//! C ABI for `ruby-tcc`.
//!
//! Lattices and Hamiltonians are opaque heap handles created by `*_new`
//! functions and released with the matching `*_free`. Every fallible call
//! returns an [`RtccStatus`]; on failure a message is available from
//! [`rtcc_last_error`] on the same thread. Strings returned through out
//! parameters are owned by the caller and must be released with
//! [`rtcc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ruby_tcc::cli::{run, ErrorReport, RunConfig};
use ruby_tcc::hamiltonian::{build_two_body, Couplings, HamiltonianTerms};
use ruby_tcc::iom::{all_plaquette_ioms, iom_report};
use ruby_tcc::lattice::{build_ruby, RubyLattice};
use ruby_tcc::spectral::{lowest_eigs, SolverOptions};
use ruby_tcc::{Error, PauliOperator};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RtccStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotConverged = 3,
    Invariant = 4,
    InvalidUtf8 = 5,
    BufferTooSmall = 6,
    Io = 7,
    Panic = 8,
}

/// Ruby lattice on the torus.
pub struct RtccLattice {
    lattice: RubyLattice,
}

/// Pauli-sum Hamiltonian.
pub struct RtccHamiltonian {
    terms: HamiltonianTerms,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    let c = CString::new(text).expect("interior NULs were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> RtccStatus {
    match err {
        Error::NotConverged { .. } => RtccStatus::NotConverged,
        Error::Invariant(_) | Error::MinusIdentity { .. } => RtccStatus::Invariant,
        Error::Io(_) => RtccStatus::Io,
        _ => RtccStatus::InvalidArgument,
    }
}

/// Run `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), RtccStatus>) -> RtccStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RtccStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            RtccStatus::Panic
        }
    }
}

fn fail(err: Error) -> RtccStatus {
    set_error(err.to_string());
    status_of(&err)
}

fn null(what: &str) -> RtccStatus {
    set_error(format!("{what} is null"));
    RtccStatus::NullPointer
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, RtccStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and NUL-terminated per the caller's contract.
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        RtccStatus::InvalidUtf8
    })
}

fn into_c_string(text: String) -> *mut c_char {
    CString::new(text.replace('\0', " "))
        .expect("interior NULs were replaced")
        .into_raw()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rtcc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on this thread.
#[no_mangle]
pub extern "C" fn rtcc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn rtcc_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: allocated by `CString::into_raw` in this library.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Build the ruby lattice with `lx x ly` unit cells.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn rtcc_ruby_new(
    lx: usize,
    ly: usize,
    out: *mut *mut RtccLattice,
) -> RtccStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let lattice = build_ruby(lx, ly).map_err(fail)?;
        // SAFETY: `out` is non-null and writable per the contract.
        unsafe { *out = Box::into_raw(Box::new(RtccLattice { lattice })) };
        Ok(())
    })
}

/// # Safety
/// `lat` must be null or a handle from [`rtcc_ruby_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rtcc_lattice_free(lat: *mut RtccLattice) {
    if !lat.is_null() {
        // SAFETY: created by `Box::into_raw` in `rtcc_ruby_new`.
        drop(unsafe { Box::from_raw(lat) });
    }
}

/// Number of qubits (sites); 0 for a null handle.
///
/// # Safety
/// `lat` must be null or a live lattice handle.
#[no_mangle]
pub unsafe extern "C" fn rtcc_lattice_num_sites(lat: *const RtccLattice) -> usize {
    // SAFETY: null or live per the contract.
    unsafe { lat.as_ref() }.map_or(0, |l| l.lattice.sites.len())
}

/// Number of triangles; 0 for a null handle.
///
/// # Safety
/// `lat` must be null or a live lattice handle.
#[no_mangle]
pub unsafe extern "C" fn rtcc_lattice_num_triangles(lat: *const RtccLattice) -> usize {
    // SAFETY: null or live per the contract.
    unsafe { lat.as_ref() }.map_or(0, |l| l.lattice.triangles.len())
}

/// Two-body Hamiltonian with couplings `jx`, `jy`, `jz` on red, green and
/// blue edges.
///
/// # Safety
/// `lat` must be a live lattice handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rtcc_two_body_new(
    lat: *const RtccLattice,
    jx: f64,
    jy: f64,
    jz: f64,
    out: *mut *mut RtccHamiltonian,
) -> RtccStatus {
    guard(|| {
        // SAFETY: null or live per the contract.
        let lat = unsafe { lat.as_ref() }.ok_or_else(|| null("lattice"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = Couplings::new(jx, jy, jz).map_err(fail)?;
        let terms = build_two_body(&lat.lattice, &c);
        // SAFETY: `out` is non-null and writable per the contract.
        unsafe { *out = Box::into_raw(Box::new(RtccHamiltonian { terms })) };
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from [`rtcc_two_body_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rtcc_hamiltonian_free(h: *mut RtccHamiltonian) {
    if !h.is_null() {
        // SAFETY: created by `Box::into_raw` in `rtcc_two_body_new`.
        drop(unsafe { Box::from_raw(h) });
    }
}

/// Number of qubits; 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live Hamiltonian handle.
#[no_mangle]
pub unsafe extern "C" fn rtcc_hamiltonian_num_qubits(h: *const RtccHamiltonian) -> usize {
    // SAFETY: null or live per the contract.
    unsafe { h.as_ref() }.map_or(0, |h| h.terms.n())
}

/// Number of Pauli terms; 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live Hamiltonian handle.
#[no_mangle]
pub unsafe extern "C" fn rtcc_hamiltonian_num_terms(h: *const RtccHamiltonian) -> usize {
    // SAFETY: null or live per the contract.
    unsafe { h.as_ref() }.map_or(0, |h| h.terms.len())
}

/// Write the `m` lowest eigenvalues of `h`, ascending, into `values`.
///
/// # Safety
/// `h` must be a live Hamiltonian handle and `values` must point to at
/// least `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rtcc_lowest_eigenvalues(
    h: *const RtccHamiltonian,
    m: usize,
    tol: f64,
    seed: u64,
    values: *mut f64,
    capacity: usize,
) -> RtccStatus {
    guard(|| {
        // SAFETY: null or live per the contract.
        let h = unsafe { h.as_ref() }.ok_or_else(|| null("hamiltonian"))?;
        if values.is_null() {
            return Err(null("values"));
        }
        if capacity < m {
            set_error(format!(
                "capacity {capacity} is below the {m} requested values"
            ));
            return Err(RtccStatus::BufferTooSmall);
        }
        let opts = SolverOptions {
            tol,
            seed,
            ..SolverOptions::default()
        };
        let report = lowest_eigs(&h.terms, m, &opts).map_err(fail)?;
        // SAFETY: `values` holds at least `capacity >= m` doubles.
        let dst = unsafe { std::slice::from_raw_parts_mut(values, m) };
        dst.copy_from_slice(&report.eigenvalues);
        Ok(())
    })
}

/// Product of two Pauli strings on `n` qubits, e.g. `"X0 Z3"`, written as
/// text with its phase.
///
/// # Safety
/// `a` and `b` must be NUL-terminated strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rtcc_pauli_multiply(
    n: usize,
    a: *const c_char,
    b: *const c_char,
    out: *mut *mut c_char,
) -> RtccStatus {
    guard(|| {
        // SAFETY: per the contract.
        let (a, b) = unsafe { (read_str(a, "a")?, read_str(b, "b")?) };
        if out.is_null() {
            return Err(null("out"));
        }
        let pa = PauliOperator::parse(n, a).map_err(fail)?;
        let pb = PauliOperator::parse(n, b).map_err(fail)?;
        let product = pa.multiply(&pb).map_err(fail)?;
        // SAFETY: `out` is non-null and writable per the contract.
        unsafe { *out = into_c_string(product.to_text()) };
        Ok(())
    })
}

/// Plaquette integrals of motion of `h` on `lat` as a JSON array of
/// per-face reports.
///
/// # Safety
/// `lat` and `h` must be live handles built together and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rtcc_plaquette_ioms_json(
    lat: *const RtccLattice,
    h: *const RtccHamiltonian,
    out: *mut *mut c_char,
) -> RtccStatus {
    guard(|| {
        // SAFETY: null or live per the contract.
        let (lat, h) = unsafe { (lat.as_ref(), h.as_ref()) };
        let lat = lat.ok_or_else(|| null("lattice"))?;
        let h = h.ok_or_else(|| null("hamiltonian"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let plaquettes = all_plaquette_ioms(&lat.lattice, &h.terms).map_err(fail)?;
        let mut reports = Vec::new();
        for p in &plaquettes {
            for iom in [&p.a, &p.b, &p.c] {
                reports.push(iom_report(&h.terms, iom).map_err(fail)?);
            }
        }
        let text = serde_json::to_string(&reports).map_err(|e| fail(e.into()))?;
        // SAFETY: `out` is non-null and writable per the contract.
        unsafe { *out = into_c_string(text) };
        Ok(())
    })
}

/// Execute a JSON run configuration, as accepted by the command-line tool,
/// and return the JSON report. On failure `out` receives the JSON error
/// object instead, when the configuration could be parsed.
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rtcc_run_json(config: *const c_char, out: *mut *mut c_char) -> RtccStatus {
    guard(|| {
        // SAFETY: per the contract.
        let text = unsafe { read_str(config, "config")? };
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = RunConfig::from_json(text).and_then(RunConfig::resolve);
        let (json, status) = match cfg {
            Err(e) => (serde_json::to_string(&ErrorReport::new(&e, None)), fail(e)),
            Ok(cfg) => match run(&cfg) {
                Ok(report) => (serde_json::to_string(&report), RtccStatus::Ok),
                Err(e) => (
                    serde_json::to_string(&ErrorReport::new(&e, Some(cfg))),
                    fail(e),
                ),
            },
        };
        let json = json.map_err(|e| fail(e.into()))?;
        // SAFETY: `out` is non-null and writable per the contract.
        unsafe { *out = into_c_string(json) };
        match status {
            RtccStatus::Ok => Ok(()),
            s => Err(s),
        }
    })
}
