//! C ABI for the narrowcap solvers.
//!
//! Handles are opaque pointers created and destroyed by this library; every
//! fallible call returns an `nc_status` code and leaves a human-readable
//! message retrievable through `nc_last_error_message`.  All functions are
//! panic-safe: a caught panic reports `NC_ERR_PANIC` instead of unwinding
//! across the boundary.

#![allow(non_camel_case_types)]

use libc::{c_char, c_int, size_t};
use narrowcap::capture::{PatchCondition, PatchSpec, Scene, SplittingSolution};
use narrowcap::error::Error;
use narrowcap::geometry::Domain;
use narrowcap::halfplane::{c1_exact, c2_exact, CFunction, IntervalSteklovBasis};
use narrowcap::kappa::KappaOrder;
use narrowcap::oracle::{mc_splitting, McConfig};
use narrowcap::steklov::{sn_spectrum, snd_principal};
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum nc_status {
    NC_OK = 0,
    NC_ERR_INVALID_ARGUMENT = 1,
    NC_ERR_DOMAIN = 2,
    NC_ERR_SINGULARITY = 3,
    NC_ERR_DEGENERATE = 4,
    NC_ERR_POLE = 5,
    NC_ERR_INADMISSIBLE = 6,
    NC_ERR_ROOT = 7,
    NC_ERR_RESONANCE = 8,
    NC_ERR_NUMERICAL = 9,
    NC_ERR_UNSUPPORTED = 10,
    NC_ERR_SCHEMA = 11,
    NC_ERR_IO = 12,
    NC_ERR_TIMEOUT = 13,
    NC_ERR_NULL_POINTER = 14,
    NC_ERR_BUFFER_TOO_SMALL = 15,
    NC_ERR_PANIC = 16,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> nc_status {
    match err {
        Error::Domain(_) | Error::OutsideDomain(..) => nc_status::NC_ERR_DOMAIN,
        Error::Singularity(_) => nc_status::NC_ERR_SINGULARITY,
        Error::DegenerateConfiguration(_) | Error::OverlappingPatches(..) => {
            nc_status::NC_ERR_DEGENERATE
        }
        Error::Pole { .. } => nc_status::NC_ERR_POLE,
        Error::AsymptoticsInadmissible(_) => nc_status::NC_ERR_INADMISSIBLE,
        Error::RootBracket { .. } => nc_status::NC_ERR_ROOT,
        Error::Resonance(..) => nc_status::NC_ERR_RESONANCE,
        Error::Numerical(_) | Error::CollocationResolution => nc_status::NC_ERR_NUMERICAL,
        Error::Unsupported(_) => nc_status::NC_ERR_UNSUPPORTED,
        Error::InvalidArgument(_) => nc_status::NC_ERR_INVALID_ARGUMENT,
        Error::Schema { .. } => nc_status::NC_ERR_SCHEMA,
        Error::McTimeout { .. } => nc_status::NC_ERR_TIMEOUT,
        Error::Cache(_) | Error::Io(_) => nc_status::NC_ERR_IO,
    }
}

fn report(err: Error) -> nc_status {
    set_error(&err.to_string());
    status_of(&err)
}

/// Runs a closure with panic containment.
fn guarded<F: FnOnce() -> nc_status>(f: F) -> nc_status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            nc_status::NC_ERR_PANIC
        }
    }
}

/// Message describing the most recent error on this thread.  The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Interval Steklov eigenbasis handle, bundled with its C(mu) evaluator.
pub struct nc_basis {
    basis: Arc<IntervalSteklovBasis>,
    cfun: CFunction,
}

/// Boundary-patch scene handle under construction.
pub struct nc_scene {
    domain: Domain,
    patches: Vec<PatchSpec>,
}

/// Solved splitting problem handle with a field evaluator.
pub struct nc_splitting {
    sol: SplittingSolution,
}

/// Exact Taylor constants of C(mu) - pi/(2 mu).
#[no_mangle]
pub extern "C" fn nc_c1_exact() -> f64 {
    c1_exact()
}

#[no_mangle]
pub extern "C" fn nc_c2_exact() -> f64 {
    c2_exact()
}

/// Builds the interval Steklov basis with `k` retained modes from an
/// `m`-term truncation (m >= 2k).
#[no_mangle]
pub extern "C" fn nc_basis_build(k: size_t, m: size_t, out: *mut *mut nc_basis) -> nc_status {
    guarded(|| {
        if out.is_null() {
            set_error("out pointer is null");
            return nc_status::NC_ERR_NULL_POINTER;
        }
        match IntervalSteklovBasis::build(k, m) {
            Ok(b) => {
                let basis = Arc::new(b);
                let cfun = CFunction::new(basis.clone());
                unsafe { *out = Box::into_raw(Box::new(nc_basis { basis, cfun })) };
                nc_status::NC_OK
            }
            Err(e) => report(e),
        }
    })
}

/// Builds the basis through the sidecar cache in `dir` (UTF-8 path); pass
/// NULL to skip caching.
#[no_mangle]
pub extern "C" fn nc_basis_load_or_build(
    dir: *const c_char,
    k: size_t,
    m: size_t,
    out: *mut *mut nc_basis,
) -> nc_status {
    guarded(|| {
        if out.is_null() {
            set_error("out pointer is null");
            return nc_status::NC_ERR_NULL_POINTER;
        }
        let path: Option<PathBuf> = if dir.is_null() {
            None
        } else {
            match unsafe { CStr::from_ptr(dir) }.to_str() {
                Ok(s) => Some(PathBuf::from(s)),
                Err(_) => {
                    set_error("cache dir is not valid UTF-8");
                    return nc_status::NC_ERR_INVALID_ARGUMENT;
                }
            }
        };
        match IntervalSteklovBasis::load_or_build(path.as_deref(), k, m) {
            Ok(b) => {
                let basis = Arc::new(b);
                let cfun = CFunction::new(basis.clone());
                unsafe { *out = Box::into_raw(Box::new(nc_basis { basis, cfun })) };
                nc_status::NC_OK
            }
            Err(e) => report(e),
        }
    })
}

#[no_mangle]
pub extern "C" fn nc_basis_free(basis: *mut nc_basis) {
    if !basis.is_null() {
        drop(unsafe { Box::from_raw(basis) });
    }
}

/// Number of retained eigenpairs.
#[no_mangle]
pub extern "C" fn nc_basis_len(basis: *const nc_basis) -> size_t {
    if basis.is_null() {
        return 0;
    }
    unsafe { &*basis }.basis.len()
}

/// Eigenvalue mu_k; NaN when out of range.
#[no_mangle]
pub extern "C" fn nc_basis_mu(basis: *const nc_basis, k: size_t) -> f64 {
    if basis.is_null() {
        return f64::NAN;
    }
    let b = unsafe { &*basis };
    if k < b.basis.len() {
        b.basis.mu(k)
    } else {
        f64::NAN
    }
}

/// Far-field value Psi_k(infinity); NaN when out of range.
#[no_mangle]
pub extern "C" fn nc_basis_psi_inf(basis: *const nc_basis, k: size_t) -> f64 {
    if basis.is_null() {
        return f64::NAN;
    }
    let b = unsafe { &*basis };
    if k < b.basis.len() {
        b.basis.psi_inf(k)
    } else {
        f64::NAN
    }
}

/// Evaluates the constant-term function C(mu) with the tail correction.
#[no_mangle]
pub extern "C" fn nc_c_function(basis: *const nc_basis, mu: f64, out: *mut f64) -> nc_status {
    guarded(|| {
        if basis.is_null() || out.is_null() {
            set_error("null pointer");
            return nc_status::NC_ERR_NULL_POINTER;
        }
        match unsafe { &*basis }.cfun.eval(mu) {
            Ok(v) => {
                unsafe { *out = v };
                nc_status::NC_OK
            }
            Err(e) => report(e),
        }
    })
}

/// Domain kinds accepted by `nc_scene_new`.
pub const NC_DOMAIN_DISK_INTERIOR: c_int = 0;
pub const NC_DOMAIN_DISK_EXTERIOR: c_int = 1;
pub const NC_DOMAIN_ELLIPSE_INTERIOR: c_int = 2;
pub const NC_DOMAIN_ELLIPSE_EXTERIOR: c_int = 3;

/// Boundary conditions accepted by `nc_scene_add_patch`.
pub const NC_BC_DIRICHLET: c_int = 0;
pub const NC_BC_ROBIN: c_int = 1;
pub const NC_BC_STEKLOV: c_int = 2;

/// Creates an empty scene.  `a` and `b` are the semiaxes for ellipse
/// kinds and are ignored for disks (fixed at unit radius).
#[no_mangle]
pub extern "C" fn nc_scene_new(
    kind: c_int,
    a: f64,
    b: f64,
    out: *mut *mut nc_scene,
) -> nc_status {
    guarded(|| {
        if out.is_null() {
            set_error("out pointer is null");
            return nc_status::NC_ERR_NULL_POINTER;
        }
        let domain = match kind {
            NC_DOMAIN_DISK_INTERIOR => Ok(Domain::disk_interior()),
            NC_DOMAIN_DISK_EXTERIOR => Ok(Domain::disk_exterior()),
            NC_DOMAIN_ELLIPSE_INTERIOR => Domain::ellipse_interior(a, b),
            NC_DOMAIN_ELLIPSE_EXTERIOR => Domain::ellipse_exterior(a, b),
            _ => Err(Error::InvalidArgument(format!("unknown domain kind {kind}"))),
        };
        match domain {
            Ok(domain) => {
                unsafe {
                    *out = Box::into_raw(Box::new(nc_scene {
                        domain,
                        patches: Vec::new(),
                    }))
                };
                nc_status::NC_OK
            }
            Err(e) => report(e),
        }
    })
}

#[no_mangle]
pub extern "C" fn nc_scene_free(scene: *mut nc_scene) {
    if !scene.is_null() {
        drop(unsafe { Box::from_raw(scene) });
    }
}

/// Appends a patch centered at boundary parameter `angle` with the given
/// half-length.  `q` is read only for NC_BC_ROBIN.
#[no_mangle]
pub extern "C" fn nc_scene_add_patch(
    scene: *mut nc_scene,
    angle: f64,
    half_length: f64,
    bc: c_int,
    q: f64,
) -> nc_status {
    guarded(|| {
        if scene.is_null() {
            set_error("scene pointer is null");
            return nc_status::NC_ERR_NULL_POINTER;
        }
        let condition = match bc {
            NC_BC_DIRICHLET => PatchCondition::Dirichlet,
            NC_BC_ROBIN => PatchCondition::Robin { q },
            NC_BC_STEKLOV => PatchCondition::Steklov,
            _ => {
                set_error("unknown boundary condition code");
                return nc_status::NC_ERR_INVALID_ARGUMENT;
            }
        };
        let sc = unsafe { &mut *scene };
        let center = sc.domain.boundary_point(angle);
        sc.patches.push(PatchSpec::new(center, half_length, condition));
        nc_status::NC_OK
    })
}

#[no_mangle]
pub extern "C" fn nc_scene_patch_count(scene: *const nc_scene) -> size_t {
    if scene.is_null() {
        return 0;
    }
    unsafe { &*scene }.patches.len()
}

fn build_scene(sc: &nc_scene) -> Result<Scene, Error> {
    Scene::new(sc.domain, sc.patches.clone())
}

/// Solves the splitting problem toward 0-based patch `target` and returns
/// a solution handle.
#[no_mangle]
pub extern "C" fn nc_splitting_solve(
    scene: *const nc_scene,
    basis: *const nc_basis,
    target: size_t,
    out: *mut *mut nc_splitting,
) -> nc_status {
    guarded(|| {
        if scene.is_null() || basis.is_null() || out.is_null() {
            set_error("null pointer");
            return nc_status::NC_ERR_NULL_POINTER;
        }
        let sc = unsafe { &*scene };
        let b = unsafe { &*basis };
        let solved = build_scene(sc)
            .and_then(|validated| narrowcap::capture::solve_splitting(&validated, target, &b.cfun));
        match solved {
            Ok(sol) => {
                unsafe { *out = Box::into_raw(Box::new(nc_splitting { sol })) };
                nc_status::NC_OK
            }
            Err(e) => report(e),
        }
    })
}

#[no_mangle]
pub extern "C" fn nc_splitting_free(sol: *mut nc_splitting) {
    if !sol.is_null() {
        drop(unsafe { Box::from_raw(sol) });
    }
}

/// Volume-averaged splitting probability of a solved problem.
#[no_mangle]
pub extern "C" fn nc_splitting_chi(sol: *const nc_splitting) -> f64 {
    if sol.is_null() {
        return f64::NAN;
    }
    unsafe { &*sol }.sol.chi()
}

/// Copies the coefficient vector A into `buf` (length `len`); writes the
/// required length through `written`.
#[no_mangle]
pub extern "C" fn nc_splitting_coefficients(
    sol: *const nc_splitting,
    buf: *mut f64,
    len: size_t,
    written: *mut size_t,
) -> nc_status {
    guarded(|| {
        if sol.is_null() || written.is_null() {
            set_error("null pointer");
            return nc_status::NC_ERR_NULL_POINTER;
        }
        let a = unsafe { &*sol }.sol.coefficients();
        unsafe { *written = a.len() };
        if buf.is_null() || len < a.len() {
            set_error("coefficient buffer too small");
            return nc_status::NC_ERR_BUFFER_TOO_SMALL;
        }
        let slice = unsafe { std::slice::from_raw_parts_mut(buf, a.len()) };
        for (dst, src) in slice.iter_mut().zip(a.iter()) {
            *dst = *src;
        }
        nc_status::NC_OK
    })
}

/// Outer-field value S_k(x, y); `cap` clamps to [0, 1].
#[no_mangle]
pub extern "C" fn nc_splitting_field(
    sol: *const nc_splitting,
    x: f64,
    y: f64,
    cap: c_int,
    out: *mut f64,
) -> nc_status {
    guarded(|| {
        if sol.is_null() || out.is_null() {
            set_error("null pointer");
            return nc_status::NC_ERR_NULL_POINTER;
        }
        match unsafe { &*sol }.sol.field([x, y], cap != 0) {
            Ok(v) => {
                unsafe { *out = v };
                nc_status::NC_OK
            }
            Err(e) => report(e),
        }
    })
}

/// Solves the MFRT system; writes the volume-averaged time through `u0`.
#[no_mangle]
pub extern "C" fn nc_solve_mfrt(
    scene: *const nc_scene,
    basis: *const nc_basis,
    u0: *mut f64,
) -> nc_status {
    guarded(|| {
        if scene.is_null() || basis.is_null() || u0.is_null() {
            set_error("null pointer");
            return nc_status::NC_ERR_NULL_POINTER;
        }
        let sc = unsafe { &*scene };
        let b = unsafe { &*basis };
        match build_scene(sc).and_then(|v| narrowcap::capture::solve_mfrt(&v, &b.cfun)) {
            Ok(sol) => {
                unsafe { *u0 = sol.u0() };
                nc_status::NC_OK
            }
            Err(e) => report(e),
        }
    })
}

/// First N Steklov-Neumann eigenvalue approximations (ascending), written
/// into `sigmas` (capacity `len`); `written` receives the count.
#[no_mangle]
pub extern "C" fn nc_sn_spectrum(
    scene: *const nc_scene,
    basis: *const nc_basis,
    sigmas: *mut f64,
    len: size_t,
    written: *mut size_t,
) -> nc_status {
    guarded(|| {
        if scene.is_null() || basis.is_null() || written.is_null() {
            set_error("null pointer");
            return nc_status::NC_ERR_NULL_POINTER;
        }
        let sc = unsafe { &*scene };
        let b = unsafe { &*basis };
        match build_scene(sc).and_then(|v| sn_spectrum(&v, &b.basis)) {
            Ok(spec) => {
                unsafe { *written = spec.len() };
                if sigmas.is_null() || len < spec.len() {
                    set_error("sigma buffer too small");
                    return nc_status::NC_ERR_BUFFER_TOO_SMALL;
                }
                let out = unsafe { std::slice::from_raw_parts_mut(sigmas, spec.len()) };
                out.copy_from_slice(spec.sigmas());
                nc_status::NC_OK
            }
            Err(e) => report(e),
        }
    })
}

/// Principal SND eigenvalue and the constant C for a scene with one
/// Steklov patch (listed first) and Dirichlet patches elsewhere.
#[no_mangle]
pub extern "C" fn nc_snd_principal(
    scene: *const nc_scene,
    basis: *const nc_basis,
    sigma0: *mut f64,
    c_const: *mut f64,
) -> nc_status {
    guarded(|| {
        if scene.is_null() || basis.is_null() || sigma0.is_null() {
            set_error("null pointer");
            return nc_status::NC_ERR_NULL_POINTER;
        }
        let sc = unsafe { &*scene };
        let b = unsafe { &*basis };
        match build_scene(sc).and_then(|v| snd_principal(&v, &b.cfun)) {
            Ok(r) => {
                unsafe {
                    *sigma0 = r.sigma0;
                    if !c_const.is_null() {
                        *c_const = r.c;
                    }
                }
                nc_status::NC_OK
            }
            Err(e) => report(e),
        }
    })
}

/// Exact circulant eigenvalue kappa_j for N equally spaced unit-disk
/// patches; NaN on invalid indices.
#[no_mangle]
pub extern "C" fn nc_kappa_exact(n: size_t, j: size_t) -> f64 {
    match catch_unwind(|| narrowcap::kappa::kappa_exact(n, j)) {
        Ok(v) => v,
        Err(_) => f64::NAN,
    }
}

/// Large-N approximation orders for `nc_kappa_asymptotic`.
pub const NC_KAPPA_FULL: c_int = 0;
pub const NC_KAPPA_CUBIC: c_int = 1;
pub const NC_KAPPA_LOWORDER: c_int = 2;
pub const NC_KAPPA_EMPIRICAL: c_int = 3;

#[no_mangle]
pub extern "C" fn nc_kappa_asymptotic(n: size_t, j: size_t, order: c_int) -> f64 {
    let order = match order {
        NC_KAPPA_FULL => KappaOrder::Full,
        NC_KAPPA_CUBIC => KappaOrder::Cubic,
        NC_KAPPA_LOWORDER => KappaOrder::LowOrder,
        NC_KAPPA_EMPIRICAL => KappaOrder::Empirical,
        _ => return f64::NAN,
    };
    match catch_unwind(move || narrowcap::kappa::kappa_asymptotic(n, j, order)) {
        Ok(v) => v,
        Err(_) => f64::NAN,
    }
}

/// Monte Carlo splitting estimate from a fixed start point.
#[no_mangle]
pub extern "C" fn nc_mc_splitting(
    scene: *const nc_scene,
    target: size_t,
    x: f64,
    y: f64,
    walkers: size_t,
    seed: u64,
    dt: f64,
    mean: *mut f64,
    stderr_out: *mut f64,
) -> nc_status {
    guarded(|| {
        if scene.is_null() || mean.is_null() {
            set_error("null pointer");
            return nc_status::NC_ERR_NULL_POINTER;
        }
        let sc = unsafe { &*scene };
        let cfg = McConfig {
            walkers,
            seed,
            dt,
            ..McConfig::default()
        };
        match build_scene(sc).and_then(|v| mc_splitting(&v, target, [x, y], &cfg)) {
            Ok(est) => {
                unsafe {
                    *mean = est.mean;
                    if !stderr_out.is_null() {
                        *stderr_out = est.stderr;
                    }
                }
                nc_status::NC_OK
            }
            Err(e) => report(e),
        }
    })
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn nc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
