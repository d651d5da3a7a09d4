//! Planar domains (unit disk and ellipse, interior and exterior) and points
//! on their boundaries.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Cartesian point in the plane.
pub type Point = [f64; 2];

pub fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

pub fn norm(p: Point) -> f64 {
    (p[0] * p[0] + p[1] * p[1]).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    DiskInterior,
    DiskExterior,
    EllipseInterior,
    EllipseExterior,
}

impl DomainKind {
    pub fn is_exterior(self) -> bool {
        matches!(self, DomainKind::DiskExterior | DomainKind::EllipseExterior)
    }

    pub fn is_ellipse(self) -> bool {
        matches!(
            self,
            DomainKind::EllipseInterior | DomainKind::EllipseExterior
        )
    }
}

/// An analytic planar domain.  Disk kinds are pinned to the unit radius;
/// callers rescale lengths externally.  Ellipse kinds require `a > b > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    kind: DomainKind,
    a: f64,
    b: f64,
}

impl Domain {
    pub fn disk_interior() -> Self {
        Domain {
            kind: DomainKind::DiskInterior,
            a: 1.0,
            b: 1.0,
        }
    }

    pub fn disk_exterior() -> Self {
        Domain {
            kind: DomainKind::DiskExterior,
            a: 1.0,
            b: 1.0,
        }
    }

    pub fn ellipse_interior(a: f64, b: f64) -> Result<Self> {
        Self::ellipse(DomainKind::EllipseInterior, a, b)
    }

    pub fn ellipse_exterior(a: f64, b: f64) -> Result<Self> {
        Self::ellipse(DomainKind::EllipseExterior, a, b)
    }

    fn ellipse(kind: DomainKind, a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > 0.0) {
            return Err(Error::Domain(format!(
                "ellipse semiaxes must be finite and positive, got a = {a}, b = {b}"
            )));
        }
        if a <= b {
            return Err(Error::Domain(format!(
                "ellipse requires a > b (got a = {a}, b = {b}); use a disk kind for a = b"
            )));
        }
        Ok(Domain { kind, a, b })
    }

    pub fn new(kind: DomainKind, a: f64, b: f64) -> Result<Self> {
        match kind {
            DomainKind::DiskInterior | DomainKind::DiskExterior => {
                if (a - 1.0).abs() > 1e-12 || (b - 1.0).abs() > 1e-12 {
                    return Err(Error::Domain(
                        "disk kinds are fixed at unit radius (a = b = 1)".into(),
                    ));
                }
                Ok(Domain { kind, a: 1.0, b: 1.0 })
            }
            _ => Self::ellipse(kind, a, b),
        }
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn semiaxes(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Area |Omega| of the confining region; rejected for exterior kinds.
    pub fn area(&self) -> Result<f64> {
        if self.kind.is_exterior() {
            return Err(Error::Unsupported(
                "|Omega| is infinite for exterior domains".into(),
            ));
        }
        Ok(std::f64::consts::PI * self.a * self.b)
    }

    /// Focal half-distance of the confocal elliptic coordinates.
    pub fn focal_distance(&self) -> f64 {
        (self.a * self.a - self.b * self.b).max(0.0).sqrt()
    }

    /// Radial elliptic coordinate of the boundary: tanh(alpha_b) = b/a.
    pub fn alpha_boundary(&self) -> f64 {
        0.5 * ((self.a + self.b) / (self.a - self.b)).ln()
    }

    /// Image-series ratio beta = (a-b)/(a+b) = exp(-2 alpha_b).
    pub fn beta(&self) -> f64 {
        (self.a - self.b) / (self.a + self.b)
    }

    /// Point on the compact boundary at parameter `t`: the polar angle for
    /// the disk, the elliptic angle for the ellipse.
    pub fn boundary_point(&self, t: f64) -> BoundaryPoint {
        let xy = [self.a * t.cos(), self.b * t.sin()];
        BoundaryPoint { param: t, xy }
    }

    /// Signed "inside the confining region" test for the compact curve:
    /// negative inside the ellipse/disk curve, positive outside.
    fn level(&self, p: Point) -> f64 {
        (p[0] / self.a).powi(2) + (p[1] / self.b).powi(2) - 1.0
    }

    /// True if `p` belongs to the open domain.
    pub fn contains(&self, p: Point) -> bool {
        let l = self.level(p);
        if self.kind.is_exterior() {
            l > 0.0
        } else {
            l < 0.0
        }
    }

    /// True if `p` belongs to the domain closure (tolerance on the curve).
    pub fn contains_closure(&self, p: Point) -> bool {
        let l = self.level(p);
        if self.kind.is_exterior() {
            l > -1e-10
        } else {
            l < 1e-10
        }
    }

    /// Boundary speed |d(boundary)/dt| at parameter `t`.
    pub fn boundary_speed(&self, t: f64) -> f64 {
        ((self.a * t.sin()).powi(2) + (self.b * t.cos()).powi(2)).sqrt()
    }

    /// Arc length from parameter 0 to `t` along the compact boundary,
    /// by Gauss-Legendre quadrature (exact constant speed for the disk).
    pub fn arc_length(&self, t: f64) -> f64 {
        if !self.kind.is_ellipse() {
            return t;
        }
        crate::quad::gauss_legendre(0.0, t, 64, |s| self.boundary_speed(s))
    }

    /// Total perimeter of the compact boundary.
    pub fn perimeter(&self) -> f64 {
        self.arc_length(2.0 * std::f64::consts::PI)
    }

    /// Elliptic coordinates (alpha, theta) of `p` in the confocal system of
    /// this ellipse, with alpha >= 0 and theta in (-pi, pi].
    ///
    /// Uses the two-radii construction r+- = sqrt((x1 +- aE)^2 + x2^2) with
    /// clamping of |cos theta| <= 1 against rounding.
    pub fn elliptic_coords(&self, p: Point) -> (f64, f64) {
        let ae = self.focal_distance();
        elliptic_coords_focal(p, ae)
    }
}

/// Elliptic coordinates for focal half-distance `ae`.
pub fn elliptic_coords_focal(p: Point, ae: f64) -> (f64, f64) {
    debug_assert!(ae > 0.0);
    let rp = ((p[0] + ae).powi(2) + p[1] * p[1]).sqrt();
    let rm = ((p[0] - ae).powi(2) + p[1] * p[1]).sqrt();
    let ch = ((rp + rm) / (2.0 * ae)).max(1.0);
    let ct = ((rp - rm) / (2.0 * ae)).clamp(-1.0, 1.0);
    let alpha = ch.acosh();
    let theta = ct.acos();
    // acos gives [0, pi]; restore the sign from the half-plane of p.
    let theta = if p[1] < 0.0 { -theta } else { theta };
    (alpha, theta)
}

/// A point on the compact boundary, carrying both its parameter and the
/// cartesian coordinates derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    param: f64,
    xy: Point,
}

impl BoundaryPoint {
    /// Validates that `xy` lies on the boundary of `domain` to within 1e-12
    /// relative tolerance and recovers the parameter.
    pub fn from_xy(domain: &Domain, xy: Point) -> Result<Self> {
        let (a, b) = domain.semiaxes();
        let level = ((xy[0] / a).powi(2) + (xy[1] / b).powi(2) - 1.0).abs();
        if level > 1e-12 * 4.0 {
            return Err(Error::Domain(format!(
                "point ({}, {}) is not on the boundary (constraint residual {level:e})",
                xy[0], xy[1]
            )));
        }
        let param = (xy[1] / b).atan2(xy[0] / a);
        Ok(domain.boundary_point(param))
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    pub fn xy(&self) -> Point {
        self.xy
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn disk_is_unit() {
        let d = Domain::disk_interior();
        assert_eq!(d.semiaxes(), (1.0, 1.0));
        assert_relative_eq!(d.area().unwrap(), std::f64::consts::PI);
        assert!(Domain::new(DomainKind::DiskInterior, 2.0, 2.0).is_err());
    }

    #[test]
    fn ellipse_requires_a_gt_b() {
        assert!(Domain::ellipse_interior(1.0, 1.0).is_err());
        assert!(Domain::ellipse_interior(1.0, 2.0).is_err());
        let e = Domain::ellipse_interior(2.0, 1.0).unwrap();
        assert_relative_eq!(e.area().unwrap(), 2.0 * std::f64::consts::PI);
        assert_relative_eq!(e.beta(), 1.0 / 3.0);
        assert_relative_eq!(e.focal_distance(), 3.0_f64.sqrt());
    }

    #[test]
    fn exterior_area_rejected() {
        assert!(Domain::disk_exterior().area().is_err());
    }

    #[test]
    fn boundary_point_roundtrip() {
        let e = Domain::ellipse_interior(2.0, 1.0).unwrap();
        for &t in &[0.0, 0.7, -2.1, 3.0] {
            let bp = e.boundary_point(t);
            let back = BoundaryPoint::from_xy(&e, bp.xy()).unwrap();
            assert_relative_eq!(back.param(), t, epsilon = 1e-12);
        }
        // cartesian point on boundary to 1e-12:
        let bp = e.boundary_point(0.9);
        let level = (bp.xy()[0] / 2.0).powi(2) + bp.xy()[1].powi(2);
        assert_relative_eq!(level, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn off_boundary_point_rejected() {
        let d = Domain::disk_interior();
        assert!(BoundaryPoint::from_xy(&d, [0.5, 0.0]).is_err());
    }

    #[test]
    fn elliptic_coords_invert() {
        let e = Domain::ellipse_interior(2.0, 1.0).unwrap();
        let ae = e.focal_distance();
        for &(alpha, theta) in &[(0.3, 0.5), (1.0, -2.0), (0.0, 1.2), (2.0, 3.1)] {
            let p = [
                ae * f64::cosh(alpha) * f64::cos(theta),
                ae * f64::sinh(alpha) * f64::sin(theta),
            ];
            let (a2, t2) = e.elliptic_coords(p);
            assert_relative_eq!(a2, alpha, epsilon = 1e-9);
            if alpha > 0.0 {
                assert_relative_eq!(t2, theta, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn ellipse_boundary_has_constant_alpha() {
        let e = Domain::ellipse_interior(2.0, 1.0).unwrap();
        for &t in &[0.0, 0.5, 1.5, 3.0] {
            let bp = e.boundary_point(t);
            let (alpha, theta) = e.elliptic_coords(bp.xy());
            assert_relative_eq!(alpha, e.alpha_boundary(), epsilon = 1e-10);
            assert_relative_eq!(theta, t, epsilon = 1e-10);
        }
    }

    #[test]
    fn disk_arc_length_is_angle() {
        let d = Domain::disk_interior();
        assert_relative_eq!(d.arc_length(1.3), 1.3);
    }

    #[test]
    fn ellipse_perimeter_matches_series() {
        // Ramanujan's approximation is good to ~1e-6 for a/b = 2.
        let e = Domain::ellipse_interior(2.0, 1.0).unwrap();
        let (a, b) = (2.0_f64, 1.0_f64);
        let h = ((a - b) / (a + b)).powi(2);
        let ramanujan =
            std::f64::consts::PI * (a + b) * (1.0 + 3.0 * h / (10.0 + (4.0 - 3.0 * h).sqrt()));
        assert_relative_eq!(e.perimeter(), ramanujan, epsilon = 1e-4);
    }
}
