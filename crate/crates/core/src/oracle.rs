//! Desk-scale verification engines for the unit disk, independent of the
//! asymptotic solvers: a boundary Fourier-collocation solver for mixed
//! boundary value problems and eigenproblems, and a Monte Carlo
//! reflected-random-walk estimator.

pub mod collocation;
pub mod mc;

pub use collocation::{
    collocation_interior_snd, collocation_mfrt, collocation_splitting, collocation_steklov,
    collocation_steklov_annulus, CollocationConfig, CollocationField, SteklovOracle,
};
pub use mc::{mc_mfpt, mc_splitting, mc_splitting_interior, Estimate, McConfig};

use crate::error::Result;
use crate::geometry::{dist, Domain, Point};
use crate::greens::{bulk_green, surface_green, GreenMode};
use crate::quad::gauss_legendre_nodes;

/// Integral of the Green's function over the domain for a fixed source,
/// in polar coordinates centered at the source so the log singularity
/// integrates cleanly; the defining normalization makes it zero.
pub fn green_domain_integral(domain: &Domain, xi: Point, mode: GreenMode) -> Result<f64> {
    let (a, b) = domain.semiaxes();
    let n_phi = 256;
    let radial = gauss_legendre_nodes(48);
    let mut total = 0.0;
    let bp = match mode {
        GreenMode::Surface => Some(crate::geometry::BoundaryPoint::from_xy(domain, xi)?),
        GreenMode::Bulk => None,
    };
    for i in 0..n_phi {
        let phi = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n_phi as f64;
        let (c, s) = (phi.cos(), phi.sin());
        // distance from xi to the ellipse boundary along direction phi
        let qa = (c / a).powi(2) + (s / b).powi(2);
        let qb = 2.0 * (xi[0] * c / (a * a) + xi[1] * s / (b * b));
        let qc = (xi[0] / a).powi(2) + (xi[1] / b).powi(2) - 1.0;
        let rho_max = (-qb + (qb * qb - 4.0 * qa * qc).sqrt()) / (2.0 * qa);
        if !(rho_max > 0.0) {
            continue;
        }
        // graded radial substitution rho = rho_max t^2 resolves the
        // rho ln(rho) integrand near the source
        let mut radial_sum = 0.0;
        for &(t, w) in &radial {
            let t = 0.5 * (t + 1.0);
            let w = 0.5 * w;
            let rho = rho_max * t * t;
            let jac = 2.0 * rho_max * t;
            let x = [xi[0] + rho * c, xi[1] + rho * s];
            if dist(x, xi) < 1e-14 {
                continue;
            }
            let g = match mode {
                GreenMode::Surface => surface_green(domain, x, bp.as_ref().unwrap())?,
                GreenMode::Bulk => bulk_green(domain, x, xi)?,
            };
            radial_sum += w * jac * rho * g;
        }
        total += radial_sum * 2.0 * std::f64::consts::PI / n_phi as f64;
    }
    Ok(total)
}
