//! Exercises the C ABI exactly as an external binding would: through the
//! extern "C" functions, raw pointers and status codes.

use narrowcap_ffi::*;
use std::f64::consts::PI;
use std::ffi::CStr;
use std::ptr;

fn build_basis(k: usize, m: usize) -> *mut nc_basis {
    let mut handle: *mut nc_basis = ptr::null_mut();
    let status = nc_basis_build(k, m, &mut handle);
    assert_eq!(status, nc_status::NC_OK);
    assert!(!handle.is_null());
    handle
}

#[test]
fn basis_and_c_function_roundtrip() {
    let basis = build_basis(21, 100);
    assert_eq!(nc_basis_len(basis), 21);
    assert_eq!(nc_basis_mu(basis, 0), 0.0);
    assert!((nc_basis_mu(basis, 2) - 3.4533).abs() < 5e-4);
    assert!((nc_basis_psi_inf(basis, 0) - 0.5_f64.sqrt()).abs() < 1e-14);
    assert!(nc_basis_mu(basis, 99).is_nan());

    let mut c = 0.0;
    assert_eq!(nc_c_function(basis, 1e6, &mut c), nc_status::NC_OK);
    assert!((c - 2.0_f64.ln()).abs() < 1e-3);

    // pole error surfaces as a status with a message
    let mu2 = nc_basis_mu(basis, 2);
    let status = nc_c_function(basis, -mu2, &mut c);
    assert_eq!(status, nc_status::NC_ERR_POLE);
    let msg = unsafe { CStr::from_ptr(nc_last_error_message()) };
    assert!(msg.to_str().unwrap().contains("pole"));

    nc_basis_free(basis);
}

#[test]
fn exact_constants() {
    assert!((nc_c1_exact() - (1.5 - 2.0_f64.ln())).abs() < 1e-15);
    assert!((nc_c2_exact() - (21.0 - 2.0 * PI * PI) / (18.0 * PI)).abs() < 1e-15);
}

#[test]
fn splitting_through_the_abi() {
    let basis = build_basis(21, 100);
    let mut scene: *mut nc_scene = ptr::null_mut();
    assert_eq!(
        nc_scene_new(NC_DOMAIN_DISK_INTERIOR, 1.0, 1.0, &mut scene),
        nc_status::NC_OK
    );
    assert_eq!(
        nc_scene_add_patch(scene, 0.0, 0.1, NC_BC_DIRICHLET, 0.0),
        nc_status::NC_OK
    );
    assert_eq!(
        nc_scene_add_patch(scene, PI, 0.2, NC_BC_DIRICHLET, 0.0),
        nc_status::NC_OK
    );
    assert_eq!(nc_scene_patch_count(scene), 2);

    let mut sol: *mut nc_splitting = ptr::null_mut();
    assert_eq!(
        nc_splitting_solve(scene, basis, 0, &mut sol),
        nc_status::NC_OK
    );
    let chi = nc_splitting_chi(sol);
    assert!((chi - 0.448153).abs() < 1e-5, "chi = {chi}");

    let mut coeff = [0.0_f64; 2];
    let mut written = 0usize;
    assert_eq!(
        nc_splitting_coefficients(sol, coeff.as_mut_ptr(), 2, &mut written),
        nc_status::NC_OK
    );
    assert_eq!(written, 2);
    assert!((coeff[0] + coeff[1]).abs() < 1e-12);

    // buffer too small is reported, with the needed size
    let mut tiny = [0.0_f64; 1];
    assert_eq!(
        nc_splitting_coefficients(sol, tiny.as_mut_ptr(), 1, &mut written),
        nc_status::NC_ERR_BUFFER_TOO_SMALL
    );
    assert_eq!(written, 2);

    let mut value = 0.0;
    assert_eq!(
        nc_splitting_field(sol, 0.0, 0.0, 0, &mut value),
        nc_status::NC_OK
    );
    assert!(value > 0.0 && value < 1.0);
    // outside the domain
    assert_eq!(
        nc_splitting_field(sol, 2.0, 0.0, 0, &mut value),
        nc_status::NC_ERR_DOMAIN
    );

    nc_splitting_free(sol);
    nc_scene_free(scene);
    nc_basis_free(basis);
}

#[test]
fn mfrt_and_sn_and_snd() {
    let basis = build_basis(21, 100);

    let mut scene: *mut nc_scene = ptr::null_mut();
    nc_scene_new(NC_DOMAIN_DISK_INTERIOR, 1.0, 1.0, &mut scene);
    nc_scene_add_patch(scene, 0.0, 0.1, NC_BC_DIRICHLET, 0.0);
    let mut u0 = 0.0;
    assert_eq!(nc_solve_mfrt(scene, basis, &mut u0), nc_status::NC_OK);
    assert!((u0 - ((2.0_f64 / 0.1).ln() + 0.125)).abs() < 1e-12);
    nc_scene_free(scene);

    let mut sn: *mut nc_scene = ptr::null_mut();
    nc_scene_new(NC_DOMAIN_DISK_INTERIOR, 1.0, 1.0, &mut sn);
    nc_scene_add_patch(sn, 0.0, 0.05, NC_BC_STEKLOV, 0.0);
    nc_scene_add_patch(sn, PI, 0.05, NC_BC_STEKLOV, 0.0);
    let mut sigmas = [0.0_f64; 2];
    let mut written = 0usize;
    assert_eq!(
        nc_sn_spectrum(sn, basis, sigmas.as_mut_ptr(), 2, &mut written),
        nc_status::NC_OK
    );
    assert_eq!(written, 2);
    assert_eq!(sigmas[0], 0.0);
    assert!(sigmas[1] > 0.0);
    nc_scene_free(sn);

    let mut snd: *mut nc_scene = ptr::null_mut();
    nc_scene_new(NC_DOMAIN_DISK_INTERIOR, 1.0, 1.0, &mut snd);
    nc_scene_add_patch(snd, 0.0, PI / 12.0, NC_BC_STEKLOV, 0.0);
    nc_scene_add_patch(snd, PI, PI / 6.0, NC_BC_DIRICHLET, 0.0);
    let mut sigma0 = 0.0;
    let mut c = 0.0;
    assert_eq!(
        nc_snd_principal(snd, basis, &mut sigma0, &mut c),
        nc_status::NC_OK
    );
    assert!(sigma0 > 0.0);
    assert!(c < 0.0);
    nc_scene_free(snd);

    nc_basis_free(basis);
}

#[test]
fn kappa_values_and_nan_contract() {
    assert!((nc_kappa_exact(16, 1) - 5.2321).abs() < 5e-4);
    assert!((nc_kappa_asymptotic(16, 1, NC_KAPPA_FULL) - 5.2362).abs() < 5e-4);
    assert!(nc_kappa_exact(16, 0).is_nan());
    assert!(nc_kappa_asymptotic(16, 9, NC_KAPPA_FULL).is_nan());
    assert!(nc_kappa_asymptotic(16, 1, 99).is_nan());
}

#[test]
fn mc_splitting_smoke() {
    let mut scene: *mut nc_scene = ptr::null_mut();
    nc_scene_new(NC_DOMAIN_DISK_INTERIOR, 1.0, 1.0, &mut scene);
    nc_scene_add_patch(scene, 0.0, 0.1, NC_BC_DIRICHLET, 0.0);
    nc_scene_add_patch(scene, PI, 0.1, NC_BC_DIRICHLET, 0.0);
    let mut mean = 0.0;
    let mut err = 0.0;
    let status = nc_mc_splitting(scene, 0, 0.0, 0.0, 2000, 42, 8e-6, &mut mean, &mut err);
    assert_eq!(status, nc_status::NC_OK);
    assert!((mean - 0.5).abs() < 5.0 * err.max(1e-3), "mean {mean}");
    nc_scene_free(scene);
}

#[test]
fn invalid_inputs_surface_cleanly() {
    let mut handle: *mut nc_basis = ptr::null_mut();
    // M < 2K
    assert_eq!(
        nc_basis_build(50, 20, &mut handle),
        nc_status::NC_ERR_INVALID_ARGUMENT
    );
    assert_eq!(nc_basis_build(5, 20, ptr::null_mut()), nc_status::NC_ERR_NULL_POINTER);

    // overlapping patches are rejected at solve time
    let basis = build_basis(11, 40);
    let mut scene: *mut nc_scene = ptr::null_mut();
    nc_scene_new(NC_DOMAIN_DISK_INTERIOR, 1.0, 1.0, &mut scene);
    nc_scene_add_patch(scene, 0.0, 0.2, NC_BC_DIRICHLET, 0.0);
    nc_scene_add_patch(scene, 0.1, 0.2, NC_BC_DIRICHLET, 0.0);
    let mut sol: *mut nc_splitting = ptr::null_mut();
    assert_eq!(
        nc_splitting_solve(scene, basis, 0, &mut sol),
        nc_status::NC_ERR_DEGENERATE
    );
    nc_scene_free(scene);
    nc_basis_free(basis);

    let version = unsafe { CStr::from_ptr(nc_version()) };
    assert!(!version.to_str().unwrap().is_empty());
}

#[test]
fn generated_header_exists_and_declares_the_api() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("narrowcap.h");
    let text = std::fs::read_to_string(header).expect("header generated by build.rs");
    for symbol in [
        "nc_basis_build",
        "nc_scene_add_patch",
        "nc_splitting_solve",
        "nc_sn_spectrum",
        "nc_snd_principal",
        "nc_last_error_message",
        "NC_ERR_POLE",
    ] {
        assert!(text.contains(symbol), "header misses {symbol}");
    }
}
