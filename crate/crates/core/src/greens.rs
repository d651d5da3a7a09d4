//! Neumann Green's functions for the disk and the ellipse (interior and
//! exterior), their regular parts, and the assembled interaction matrix.
//!
//! Surface functions have the boundary singularity -(1/pi) ln|x-xi|, bulk
//! functions the interior singularity -(1/2pi) ln|x-xi|.  Ellipse formulas
//! are rapidly converging image series in confocal elliptic coordinates;
//! the geometric ratio is beta = (a-b)/(a+b) < 1 and sums are truncated
//! once beta^(2n) < 1e-16.

use crate::error::{Error, Result};
use crate::geometry::{dist, norm, BoundaryPoint, Domain, DomainKind, Point};
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Where the source point sits: on the boundary (surface) or inside the
/// domain (bulk).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenMode {
    Surface,
    Bulk,
}

const SERIES_EPS: f64 = 1e-16;
/// Bulk sources closer than this to the boundary are rejected: the bulk
/// regular part diverges logarithmically there.
const BULK_CLEARANCE: f64 = 1e-6;
const COINCIDENT_TOL: f64 = 1e-14;

/// Surface Neumann Green's function G(x, xi) with xi on the boundary.
pub fn surface_green(domain: &Domain, x: Point, xi: &BoundaryPoint) -> Result<f64> {
    if !domain.contains_closure(x) {
        return Err(Error::OutsideDomain(x[0], x[1]));
    }
    let xxi = xi.xy();
    if dist(x, xxi) < COINCIDENT_TOL {
        return Err(Error::Singularity(
            "surface Green's function evaluated at its source point".into(),
        ));
    }
    Ok(match domain.kind() {
        DomainKind::DiskInterior => {
            -(1.0 / PI) * dist(x, xxi).ln() + (x[0] * x[0] + x[1] * x[1]) / (4.0 * PI)
                - 1.0 / (8.0 * PI)
        }
        DomainKind::DiskExterior => {
            -(1.0 / PI) * dist(x, xxi).ln() + (1.0 / (2.0 * PI)) * norm(x).ln()
        }
        DomainKind::EllipseInterior => ellipse_surface_green(domain, x, xi),
        DomainKind::EllipseExterior => ellipse_exterior_surface_green(domain, x, xi),
    })
}

/// Bulk Neumann Green's function G_b(x, xi) with xi inside the domain.
pub fn bulk_green(domain: &Domain, x: Point, xi: Point) -> Result<f64> {
    if !domain.contains_closure(x) {
        return Err(Error::OutsideDomain(x[0], x[1]));
    }
    check_bulk_source(domain, xi)?;
    if dist(x, xi) < COINCIDENT_TOL {
        return Err(Error::Singularity(
            "bulk Green's function evaluated at its source point".into(),
        ));
    }
    Ok(match domain.kind() {
        DomainKind::DiskInterior => {
            let r = dist(x, xi);
            let xx = x[0] * x[0] + x[1] * x[1];
            let ss = xi[0] * xi[0] + xi[1] * xi[1];
            let dot = x[0] * xi[0] + x[1] * xi[1];
            -(1.0 / (2.0 * PI)) * r.ln() - (1.0 / (4.0 * PI)) * (xx * ss + 1.0 - 2.0 * dot).ln()
                + (xx + ss) / (4.0 * PI)
                - 3.0 / (8.0 * PI)
        }
        DomainKind::DiskExterior => {
            let ss = xi[0] * xi[0] + xi[1] * xi[1];
            let image = [xi[0] / ss, xi[1] / ss];
            -(1.0 / (2.0 * PI)) * (dist(x, xi).ln() + dist(x, image).ln() - norm(x).ln())
        }
        DomainKind::EllipseInterior => ellipse_bulk_green(domain, x, xi),
        DomainKind::EllipseExterior => ellipse_exterior_bulk_green(domain, x, xi),
    })
}

/// Regular part of the Green's function: the finite remainder after
/// subtracting the logarithmic singularity at xi.
pub fn regular_part(domain: &Domain, xi: Point, mode: GreenMode) -> Result<f64> {
    match mode {
        GreenMode::Surface => {
            let bp = BoundaryPoint::from_xy(domain, xi)?;
            Ok(match domain.kind() {
                DomainKind::DiskInterior => 1.0 / (8.0 * PI),
                DomainKind::DiskExterior => 0.0,
                DomainKind::EllipseInterior => ellipse_surface_regular(domain, &bp),
                DomainKind::EllipseExterior => ellipse_exterior_surface_regular(domain, &bp),
            })
        }
        GreenMode::Bulk => {
            check_bulk_source(domain, xi)?;
            Ok(match domain.kind() {
                DomainKind::DiskInterior => {
                    let ss = xi[0] * xi[0] + xi[1] * xi[1];
                    -(1.0 / (2.0 * PI)) * (1.0 - ss).ln() + ss / (2.0 * PI) - 3.0 / (8.0 * PI)
                }
                DomainKind::DiskExterior => {
                    let ss = xi[0] * xi[0] + xi[1] * xi[1];
                    -(1.0 / (2.0 * PI)) * (1.0 - 1.0 / ss).ln()
                }
                DomainKind::EllipseInterior => ellipse_bulk_regular(domain, xi),
                DomainKind::EllipseExterior => ellipse_exterior_bulk_regular(domain, xi),
            })
        }
    }
}

fn check_bulk_source(domain: &Domain, xi: Point) -> Result<()> {
    let gap = match domain.kind() {
        DomainKind::DiskInterior => 1.0 - norm(xi),
        DomainKind::DiskExterior => norm(xi) - 1.0,
        DomainKind::EllipseInterior => domain.alpha_boundary() - domain.elliptic_coords(xi).0,
        DomainKind::EllipseExterior => domain.elliptic_coords(xi).0 - domain.alpha_boundary(),
    };
    if gap < BULK_CLEARANCE {
        return Err(Error::Singularity(format!(
            "bulk source at ({}, {}) is within {BULK_CLEARANCE:e} of the boundary where R_b diverges",
            xi[0], xi[1]
        )));
    }
    Ok(())
}

/// ln |1 - c e^{s + i phi}| for real c, s, phi.
fn ln_abs_one_minus(c: f64, s: f64, phi: f64) -> f64 {
    let r = c * s.exp();
    0.5 * (1.0 - 2.0 * r * phi.cos() + r * r).ln()
}

fn ellipse_surface_green(domain: &Domain, x: Point, xi: &BoundaryPoint) -> f64 {
    let (a, b) = domain.semiaxes();
    let ab = domain.alpha_boundary();
    let beta = domain.beta();
    let (alpha, theta) = domain.elliptic_coords(x);
    let theta0 = xi.param();
    let xx = x[0] * x[0] + x[1] * x[1];
    let ss = xi.xy()[0] * xi.xy()[0] + xi.xy()[1] * xi.xy()[1];

    let mut sum = 0.0;
    let mut bp = 1.0; // beta^(2n)
    loop {
        sum += ln_abs_one_minus(bp, -(ab - alpha), theta - theta0)
            + ln_abs_one_minus(bp, -3.0 * ab - alpha, theta - theta0)
            + ln_abs_one_minus(bp, -3.0 * ab + alpha, theta + theta0)
            + ln_abs_one_minus(bp, -ab - alpha, theta + theta0);
        bp *= beta * beta;
        if bp < SERIES_EPS {
            break;
        }
    }
    (xx + ss) / (4.0 * PI * a * b) - 3.0 * (a * a + b * b) / (16.0 * PI * a * b) - sum / PI
}

fn ellipse_surface_regular(domain: &Domain, xi: &BoundaryPoint) -> f64 {
    let (a, b) = domain.semiaxes();
    let ab = domain.alpha_boundary();
    let beta = domain.beta();
    let ae = domain.focal_distance();
    let theta0 = xi.param();
    let ss = xi.xy()[0] * xi.xy()[0] + xi.xy()[1] * xi.xy()[1];

    let mut sum = 0.0;
    let mut bp = beta; // beta^(2n-1) for n = 1, 2, ...
    loop {
        sum += (1.0 - bp * beta).ln() + ln_abs_one_minus(bp, 0.0, 2.0 * theta0);
        bp *= beta * beta;
        if bp < SERIES_EPS {
            break;
        }
    }
    let sh = ab.sinh();
    ss / (2.0 * PI * a * b) - 3.0 * (a * a + b * b) / (16.0 * PI * a * b)
        + (ae * (sh * sh + theta0.sin().powi(2)).sqrt()).ln() / PI
        - 2.0 * sum / PI
}

fn ellipse_bulk_green(domain: &Domain, x: Point, xi: Point) -> f64 {
    let (a, b) = domain.semiaxes();
    let ab = domain.alpha_boundary();
    let beta = domain.beta();
    let (alpha, theta) = domain.elliptic_coords(x);
    let (alpha0, theta0) = domain.elliptic_coords(xi);
    let amax = alpha.max(alpha0);
    let adiff = (alpha - alpha0).abs();
    let xx = x[0] * x[0] + x[1] * x[1];
    let ss = xi[0] * xi[0] + xi[1] * xi[1];

    let dm = theta - theta0;
    let dp = theta + theta0;
    let mut sum = 0.0;
    let mut bp = 1.0;
    loop {
        sum += ln_abs_one_minus(bp, -adiff, dm)
            + ln_abs_one_minus(bp, -4.0 * ab + adiff, dm)
            + ln_abs_one_minus(bp, -2.0 * ab - alpha - alpha0, dm)
            + ln_abs_one_minus(bp, -2.0 * ab + alpha + alpha0, dm)
            + ln_abs_one_minus(bp, -4.0 * ab + alpha + alpha0, dp)
            + ln_abs_one_minus(bp, -alpha - alpha0, dp)
            + ln_abs_one_minus(bp, -2.0 * ab + adiff, dp)
            + ln_abs_one_minus(bp, -2.0 * ab - adiff, dp);
        bp *= beta * beta;
        if bp < SERIES_EPS {
            break;
        }
    }
    (xx + ss) / (4.0 * PI * a * b) - 3.0 * (a * a + b * b) / (16.0 * PI * a * b)
        + (ab - amax) / (2.0 * PI)
        - sum / (2.0 * PI)
}

/// Regular part of the interior ellipse bulk Green's function, obtained by
/// subtracting the n = 0, j = 1 image at x = xi from the series and adding
/// the local factor of the elliptic metric.
fn ellipse_bulk_regular(domain: &Domain, xi: Point) -> f64 {
    let (a, b) = domain.semiaxes();
    let ab = domain.alpha_boundary();
    let beta = domain.beta();
    let ae = domain.focal_distance();
    let (alpha0, theta0) = domain.elliptic_coords(xi);
    let ss = xi[0] * xi[0] + xi[1] * xi[1];

    let dp = 2.0 * theta0;
    let mut sum = 0.0;
    let mut bp = 1.0;
    let mut first = true;
    loop {
        // The image j = 1 contributes ln(1 - beta^(2n)) only for n >= 1;
        // its n = 0 term is the singularity that the regular part removes.
        if !first {
            sum += ln_abs_one_minus(bp, 0.0, 0.0);
        }
        sum += ln_abs_one_minus(bp, -4.0 * ab, 0.0)
            + ln_abs_one_minus(bp, -2.0 * ab - 2.0 * alpha0, 0.0)
            + ln_abs_one_minus(bp, -2.0 * ab + 2.0 * alpha0, 0.0)
            + ln_abs_one_minus(bp, -4.0 * ab + 2.0 * alpha0, dp)
            + ln_abs_one_minus(bp, -2.0 * alpha0, dp)
            + 2.0 * ln_abs_one_minus(bp, -2.0 * ab, dp);
        first = false;
        bp *= beta * beta;
        if bp < SERIES_EPS {
            break;
        }
    }
    let sh = alpha0.sinh();
    ss / (2.0 * PI * a * b) - 3.0 * (a * a + b * b) / (16.0 * PI * a * b)
        + (ab - alpha0) / (2.0 * PI)
        + (ae * (sh * sh + theta0.sin().powi(2)).sqrt()).ln() / (2.0 * PI)
        - sum / (2.0 * PI)
}

fn ellipse_exterior_bulk_green(domain: &Domain, x: Point, xi: Point) -> f64 {
    let ab = domain.alpha_boundary();
    let ae = domain.focal_distance();
    let (alpha, theta) = domain.elliptic_coords(x);
    let (alpha0, theta0) = domain.elliptic_coords(xi);
    let amax = alpha.max(alpha0);
    let adiff = (alpha - alpha0).abs();
    let dm = theta - theta0;
    ((2.0 / ae).ln() - amax) / (2.0 * PI)
        - (ln_abs_one_minus(1.0, -adiff, dm)
            + ln_abs_one_minus(1.0, -(alpha + alpha0 - 2.0 * ab), dm))
            / (2.0 * PI)
}

fn ellipse_exterior_bulk_regular(domain: &Domain, xi: Point) -> f64 {
    let ab = domain.alpha_boundary();
    let (alpha0, theta0) = domain.elliptic_coords(xi);
    let sh = alpha0.sinh();
    (0.5 * (sh * sh + theta0.sin().powi(2)).ln() + 2.0_f64.ln() - alpha0
        - (1.0 - (-2.0 * (alpha0 - ab)).exp()).ln())
        / (2.0 * PI)
}

fn ellipse_exterior_surface_green(domain: &Domain, x: Point, xi: &BoundaryPoint) -> f64 {
    let ab = domain.alpha_boundary();
    let ae = domain.focal_distance();
    let (alpha, theta) = domain.elliptic_coords(x);
    let theta0 = xi.param();
    ((2.0 / ae).ln() - alpha) / (2.0 * PI)
        - ln_abs_one_minus(1.0, -(alpha - ab), theta - theta0) / PI
}

fn ellipse_exterior_surface_regular(domain: &Domain, xi: &BoundaryPoint) -> f64 {
    let ab = domain.alpha_boundary();
    let ae = domain.focal_distance();
    let theta0 = xi.param();
    let sh = ab.sinh();
    ((2.0 * ae).ln() - ab + (sh * sh + theta0.sin().powi(2)).ln()) / (2.0 * PI)
}

/// The N x N interaction matrix with diagonal c*R(x_j) and off-diagonal
/// c*G(x_j, x_i), where c = pi for surface mode and 2*pi for bulk mode.
#[derive(Debug, Clone)]
pub struct GreenMatrix {
    entries: DMatrix<f64>,
    scale: f64,
    mode: GreenMode,
}

impl GreenMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// The scale constant c (pi for surface, 2*pi for bulk).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mode(&self) -> GreenMode {
        self.mode
    }
}

/// Assembles the interaction matrix for the given centers.  Surface mode
/// expects boundary points, bulk mode interior (or exterior) sources.
/// The upper triangle is computed and mirrored.
pub fn green_matrix(domain: &Domain, centers: &[Point], mode: GreenMode) -> Result<GreenMatrix> {
    let n = centers.len();
    if n == 0 {
        return Err(Error::InvalidArgument("no centers given".into()));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if dist(centers[i], centers[j]) < 1e-12 {
                return Err(Error::DegenerateConfiguration(format!(
                    "centers {i} and {j} coincide"
                )));
            }
        }
    }
    let scale = match mode {
        GreenMode::Surface => PI,
        GreenMode::Bulk => 2.0 * PI,
    };
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        m[(j, j)] = scale * regular_part(domain, centers[j], mode)?;
        for i in (j + 1)..n {
            let g = match mode {
                GreenMode::Surface => {
                    let bp = BoundaryPoint::from_xy(domain, centers[i])?;
                    surface_green(domain, centers[j], &bp)?
                }
                GreenMode::Bulk => bulk_green(domain, centers[j], centers[i])?,
            };
            let v = scale * g;
            m[(j, i)] = v;
            m[(i, j)] = v;
        }
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(
            "non-finite entry in the interaction matrix".into(),
        ));
    }
    Ok(GreenMatrix {
        entries: m,
        scale,
        mode,
    })
}
