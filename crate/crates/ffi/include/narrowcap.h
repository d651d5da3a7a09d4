#ifndef NARROWCAP_H
#define NARROWCAP_H

/* Generated by cbindgen from narrowcap-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Domain kinds accepted by `nc_scene_new`.
 */
#define NC_DOMAIN_DISK_INTERIOR 0

#define NC_DOMAIN_DISK_EXTERIOR 1

#define NC_DOMAIN_ELLIPSE_INTERIOR 2

#define NC_DOMAIN_ELLIPSE_EXTERIOR 3

/**
 * Boundary conditions accepted by `nc_scene_add_patch`.
 */
#define NC_BC_DIRICHLET 0

#define NC_BC_ROBIN 1

#define NC_BC_STEKLOV 2

/**
 * Large-N approximation orders for `nc_kappa_asymptotic`.
 */
#define NC_KAPPA_FULL 0

#define NC_KAPPA_CUBIC 1

#define NC_KAPPA_LOWORDER 2

#define NC_KAPPA_EMPIRICAL 3

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum nc_status {
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
} nc_status;

/**
 * Interval Steklov eigenbasis handle, bundled with its C(mu) evaluator.
 */
typedef struct nc_basis nc_basis;

/**
 * Boundary-patch scene handle under construction.
 */
typedef struct nc_scene nc_scene;

/**
 * Solved splitting problem handle with a field evaluator.
 */
typedef struct nc_splitting nc_splitting;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent error on this thread.  The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *nc_last_error_message(void);

/**
 * Exact Taylor constants of C(mu) - pi/(2 mu).
 */
double nc_c1_exact(void);

double nc_c2_exact(void);

/**
 * Builds the interval Steklov basis with `k` retained modes from an
 * `m`-term truncation (m >= 2k).
 */
enum nc_status nc_basis_build(size_t k, size_t m, struct nc_basis **out);

/**
 * Builds the basis through the sidecar cache in `dir` (UTF-8 path); pass
 * NULL to skip caching.
 */
enum nc_status nc_basis_load_or_build(const char *dir, size_t k, size_t m, struct nc_basis **out);

void nc_basis_free(struct nc_basis *basis);

/**
 * Number of retained eigenpairs.
 */
size_t nc_basis_len(const struct nc_basis *basis);

/**
 * Eigenvalue mu_k; NaN when out of range.
 */
double nc_basis_mu(const struct nc_basis *basis, size_t k);

/**
 * Far-field value Psi_k(infinity); NaN when out of range.
 */
double nc_basis_psi_inf(const struct nc_basis *basis, size_t k);

/**
 * Evaluates the constant-term function C(mu) with the tail correction.
 */
enum nc_status nc_c_function(const struct nc_basis *basis, double mu, double *out);

/**
 * Creates an empty scene.  `a` and `b` are the semiaxes for ellipse
 * kinds and are ignored for disks (fixed at unit radius).
 */
enum nc_status nc_scene_new(int kind, double a, double b, struct nc_scene **out);

void nc_scene_free(struct nc_scene *scene);

/**
 * Appends a patch centered at boundary parameter `angle` with the given
 * half-length.  `q` is read only for NC_BC_ROBIN.
 */
enum nc_status nc_scene_add_patch(struct nc_scene *scene,
                                  double angle,
                                  double half_length,
                                  int bc,
                                  double q);

size_t nc_scene_patch_count(const struct nc_scene *scene);

/**
 * Solves the splitting problem toward 0-based patch `target` and returns
 * a solution handle.
 */
enum nc_status nc_splitting_solve(const struct nc_scene *scene,
                                  const struct nc_basis *basis,
                                  size_t target,
                                  struct nc_splitting **out);

void nc_splitting_free(struct nc_splitting *sol);

/**
 * Volume-averaged splitting probability of a solved problem.
 */
double nc_splitting_chi(const struct nc_splitting *sol);

/**
 * Copies the coefficient vector A into `buf` (length `len`); writes the
 * required length through `written`.
 */
enum nc_status nc_splitting_coefficients(const struct nc_splitting *sol,
                                         double *buf,
                                         size_t len,
                                         size_t *written);

/**
 * Outer-field value S_k(x, y); `cap` clamps to [0, 1].
 */
enum nc_status nc_splitting_field(const struct nc_splitting *sol,
                                  double x,
                                  double y,
                                  int cap,
                                  double *out);

/**
 * Solves the MFRT system; writes the volume-averaged time through `u0`.
 */
enum nc_status nc_solve_mfrt(const struct nc_scene *scene,
                             const struct nc_basis *basis,
                             double *u0);

/**
 * First N Steklov-Neumann eigenvalue approximations (ascending), written
 * into `sigmas` (capacity `len`); `written` receives the count.
 */
enum nc_status nc_sn_spectrum(const struct nc_scene *scene,
                              const struct nc_basis *basis,
                              double *sigmas,
                              size_t len,
                              size_t *written);

/**
 * Principal SND eigenvalue and the constant C for a scene with one
 * Steklov patch (listed first) and Dirichlet patches elsewhere.
 */
enum nc_status nc_snd_principal(const struct nc_scene *scene,
                                const struct nc_basis *basis,
                                double *sigma0,
                                double *c_const);

/**
 * Exact circulant eigenvalue kappa_j for N equally spaced unit-disk
 * patches; NaN on invalid indices.
 */
double nc_kappa_exact(size_t n, size_t j);

double nc_kappa_asymptotic(size_t n, size_t j, int order);

/**
 * Monte Carlo splitting estimate from a fixed start point.
 */
enum nc_status nc_mc_splitting(const struct nc_scene *scene,
                               size_t target,
                               double x,
                               double y,
                               size_t walkers,
                               uint64_t seed,
                               double dt,
                               double *mean,
                               double *stderr_out);

/**
 * Library version as a static C string.
 */
const char *nc_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* NARROWCAP_H */
