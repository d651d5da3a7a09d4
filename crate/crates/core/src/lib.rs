//! Matched-asymptotic solvers for steady-state diffusion toward small
//! targets in planar domains.
//!
//! The crate computes splitting probabilities and mean first-reaction times
//! for perfectly (Dirichlet) and partially (Robin) reactive boundary patches,
//! small-target asymptotics of mixed Steklov–Neumann and
//! Steklov–Neumann–Dirichlet eigenvalue problems, and the interior/exterior
//! variants of these problems.  Everything is built from three ingredients:
//!
//! * analytic Neumann Green's functions for the disk and the ellipse
//!   ([`greens`]),
//! * the half-plane interval Steklov eigenbasis and the constant-term
//!   function `C(mu)` of the Robin half-plane Green's function
//!   ([`halfplane`]),
//! * dense linear algebra on the small interaction matrices coupling the
//!   patches ([`capture`], [`steklov`], [`extensions`]).
//!
//! Two independent desk-scale oracles ([`oracle`]) — a boundary
//! Fourier-collocation solver and a Monte Carlo reflected-walk estimator —
//! validate the asymptotics on the unit disk.

pub mod capture;
pub mod error;
pub mod extensions;
pub mod geometry;
pub mod greens;
pub mod halfplane;
pub mod kappa;
pub mod oracle;
pub mod quad;
pub mod scenefile;
pub mod steklov;

pub use capture::{
    eval_splitting_field, nu_and_effective_length, solve_mfrt, solve_splitting, MfrtSolution,
    PatchCondition, PatchSpec, Scene, SplittingSolution,
};
pub use error::{Error, Result, Warning};
pub use extensions::{
    c_exterior_disk, exterior_scene_support, interior_snd_principal, interior_splitting,
    InteriorSplittingSolution, InteriorTargetSpec, TargetCondition, TargetShape,
};
pub use geometry::{BoundaryPoint, Domain, DomainKind, Point};
pub use greens::{green_matrix, regular_part, surface_green, GreenMatrix, GreenMode};
pub use halfplane::{
    c1_exact, c2_exact, g_dirichlet, g_robin, taylor_coeffs, CFunction, IntervalSteklovBasis,
    TaylorCoeffs,
};
pub use kappa::{circulant_splitting_check, kappa_asymptotic, kappa_exact, KappaOrder};
pub use steklov::{
    single_patch_sigma, sn_eigenfunction_restriction, sn_spectrum, snd_constant,
    snd_equally_spaced, snd_principal, snd_restriction, snd_roots, SnSpectrum, SndResult,
    SndSpacedMode,
};
