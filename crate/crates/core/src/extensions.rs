//! Interior (bulk) targets with logarithmic capacities, the exterior-disk
//! C function, and the interior Steklov-Neumann-Dirichlet principal
//! eigenvalue.
//!
//! Interior targets reuse the boundary-patch algebra with two changes: the
//! gauge becomes nu_j = -1/ln(eps_j d_j) with d_j the logarithmic capacity
//! of the rescaled target, and the interaction matrix is built from the
//! bulk Neumann Green's function with scale 2 pi.

use crate::capture::splitting_from_parts;
use crate::error::{Error, Result, Warning};
use crate::geometry::{dist, norm, Domain, DomainKind, Point};
use crate::greens::{bulk_green, green_matrix, regular_part, GreenMatrix, GreenMode};
use nalgebra::DVector;
use std::f64::consts::PI;

/// Shape of an interior target; the capacity feeds the gauge function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetShape {
    /// Unit-disk cross-section; logarithmic capacity 1, exact C(mu) = 1/mu.
    Disk,
    /// Arbitrary shape with a user-supplied logarithmic capacity (e.g. from
    /// published tables).
    Custom { capacity: f64 },
}

impl TargetShape {
    pub fn capacity(&self) -> f64 {
        match *self {
            TargetShape::Disk => 1.0,
            TargetShape::Custom { capacity } => capacity,
        }
    }
}

/// Boundary condition on an interior target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetCondition {
    Dirichlet,
    Robin { q: f64 },
    Steklov,
}

/// A small interior target of size `eps` centered strictly inside the
/// domain.
#[derive(Debug, Clone)]
pub struct InteriorTargetSpec {
    pub center: Point,
    pub eps: f64,
    pub shape: TargetShape,
    pub condition: TargetCondition,
}

impl InteriorTargetSpec {
    pub fn disk(center: Point, eps: f64, condition: TargetCondition) -> Self {
        InteriorTargetSpec {
            center,
            eps,
            shape: TargetShape::Disk,
            condition,
        }
    }
}

fn boundary_clearance(domain: &Domain, p: Point) -> f64 {
    match domain.kind() {
        DomainKind::DiskInterior => 1.0 - norm(p),
        _ => {
            // distance to the boundary along the local normal direction of
            // the confocal coordinate; adequate for clearance checks
            let ab = domain.alpha_boundary();
            let (alpha, theta) = domain.elliptic_coords(p);
            let ae = domain.focal_distance();
            (ab - alpha) * ae * (alpha.sinh().powi(2) + theta.sin().powi(2)).sqrt()
        }
    }
}

fn validate_targets(
    domain: &Domain,
    targets: &[InteriorTargetSpec],
) -> Result<Vec<Warning>> {
    if domain.kind().is_exterior() {
        return Err(Error::Unsupported(
            "interior targets require an interior domain".into(),
        ));
    }
    if targets.is_empty() {
        return Err(Error::InvalidArgument("no interior targets given".into()));
    }
    let mut warnings = Vec::new();
    for (i, t) in targets.iter().enumerate() {
        if !(t.eps > 0.0 && t.eps.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "target {i}: size must be positive"
            )));
        }
        if !(t.shape.capacity() > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "target {i}: logarithmic capacity must be positive"
            )));
        }
        if !domain.contains(t.center) {
            return Err(Error::OutsideDomain(t.center[0], t.center[1]));
        }
        let clearance = boundary_clearance(domain, t.center);
        if clearance < 2.0 * t.eps {
            return Err(Error::DegenerateConfiguration(format!(
                "target {i} overlaps the outer boundary (clearance {clearance:.4})"
            )));
        }
        if clearance < 0.25 {
            warnings.push(Warning::BoundaryClearance {
                target: i,
                clearance,
            });
        }
        if let TargetCondition::Robin { q } = t.condition {
            if !(q > 0.0 && q.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "target {i}: Robin reactivity must be positive and finite"
                )));
            }
            if t.shape != TargetShape::Disk {
                return Err(Error::Unsupported(format!(
                    "target {i}: Robin condition is supported for disk-shaped targets only \
                     (C(mu) is unknown for other shapes)"
                )));
            }
        }
        if t.condition == TargetCondition::Steklov && t.shape != TargetShape::Disk {
            return Err(Error::Unsupported(format!(
                "target {i}: Steklov condition is supported for disk-shaped targets only"
            )));
        }
    }
    for i in 0..targets.len() {
        for j in (i + 1)..targets.len() {
            let d = dist(targets[i].center, targets[j].center);
            if d < targets[i].eps + targets[j].eps {
                return Err(Error::OverlappingPatches(i, j));
            }
            if d < 4.0 * targets[i].eps.max(targets[j].eps) {
                warnings.push(Warning::WellSeparatedViolated {
                    i,
                    j,
                    separation: d,
                });
            }
        }
    }
    Ok(warnings)
}

/// Gauge value for an interior target.
fn interior_nu(t: &InteriorTargetSpec, index: usize) -> Result<f64> {
    let d = t.shape.capacity();
    let eps_eff = match t.condition {
        TargetCondition::Dirichlet => t.eps,
        TargetCondition::Robin { q } => {
            // disk shape only: C_disk(mu) = 1/mu gives
            // eps_eff = eps exp(-ln d - C(eps q)) with d = 1.
            t.eps * (-1.0 / (t.eps * q)).exp()
        }
        TargetCondition::Steklov => t.eps,
    };
    let nu = -1.0 / (eps_eff * d).ln();
    if !(nu > 0.0 && nu < crate::capture::NU_ADMISSIBLE) {
        return Err(Error::AsymptoticsInadmissible(format!(
            "target {index}: gauge nu = {nu:.4} outside the admissible range"
        )));
    }
    Ok(nu)
}

/// Splitting solution for interior targets; mirrors
/// [`crate::capture::SplittingSolution`] with the bulk Green's function.
#[derive(Debug, Clone)]
pub struct InteriorSplittingSolution {
    target: usize,
    chi: f64,
    a: DVector<f64>,
    domain: Domain,
    centers: Vec<Point>,
    warnings: Vec<Warning>,
}

impl InteriorSplittingSolution {
    pub fn target(&self) -> usize {
        self.target
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn coefficients(&self) -> &DVector<f64> {
        &self.a
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    /// S_k(x) = chi_k - sum_i 2 pi A_i G_b(x, x_i).
    pub fn field(&self, x: Point, cap: bool) -> Result<f64> {
        let mut s = self.chi;
        for (i, c) in self.centers.iter().enumerate() {
            s -= 2.0 * PI * self.a[i] * bulk_green(&self.domain, x, *c)?;
        }
        Ok(if cap { s.clamp(0.0, 1.0) } else { s })
    }
}

/// Splitting probability toward interior target `k` among Dirichlet/Robin
/// targets.
pub fn interior_splitting(
    domain: &Domain,
    targets: &[InteriorTargetSpec],
    k: usize,
) -> Result<InteriorSplittingSolution> {
    let mut warnings = validate_targets(domain, targets)?;
    let n = targets.len();
    if k >= n {
        return Err(Error::InvalidArgument(format!(
            "target index {k} out of range for {n} targets"
        )));
    }
    for (i, t) in targets.iter().enumerate() {
        if t.condition == TargetCondition::Steklov {
            return Err(Error::Unsupported(format!(
                "target {i} is Steklov; interior splitting covers Dirichlet/Robin targets"
            )));
        }
    }
    if n == 1 {
        warnings.push(Warning::SingleTarget);
        return Ok(InteriorSplittingSolution {
            target: k,
            chi: 1.0,
            a: DVector::zeros(1),
            domain: *domain,
            centers: vec![targets[0].center],
            warnings,
        });
    }
    let nu = DVector::from_iterator(
        n,
        targets
            .iter()
            .enumerate()
            .map(|(i, t)| interior_nu(t, i))
            .collect::<Result<Vec<_>>>()?,
    );
    let centers: Vec<Point> = targets.iter().map(|t| t.center).collect();
    let gm = green_matrix(domain, &centers, GreenMode::Bulk)?;
    let (a, chi) = splitting_from_parts(&nu, gm.entries(), k)?;
    Ok(InteriorSplittingSolution {
        target: k,
        chi,
        a,
        domain: *domain,
        centers,
        warnings,
    })
}

/// Constant-term function of the exterior-of-a-disk Robin problem:
/// C_disk(mu) = 1/mu exactly (and by analytic continuation for mu < 0).
pub fn c_exterior_disk(mu: f64) -> Result<f64> {
    if mu == 0.0 {
        return Err(Error::Pole {
            mu,
            pole_index: 0,
            radius: 0.0,
        });
    }
    Ok(1.0 / mu)
}

/// Principal eigenvalue of the interior SND problem with a disk-shaped
/// Steklov target and one Dirichlet target:
/// 1/(eps1 sigma0) = -ln(d2 eps1 eps2) + 2 pi [R_b(x1) + R_b(x2) - 2 G_b(x1, x2)].
pub fn interior_snd_principal(
    domain: &Domain,
    steklov: &InteriorTargetSpec,
    dirichlet: &InteriorTargetSpec,
) -> Result<f64> {
    if steklov.condition != TargetCondition::Steklov || steklov.shape != TargetShape::Disk {
        return Err(Error::Unsupported(
            "the interior SND formula needs a disk-shaped Steklov target".into(),
        ));
    }
    if dirichlet.condition != TargetCondition::Dirichlet {
        return Err(Error::Unsupported(
            "the second interior target must be Dirichlet".into(),
        ));
    }
    validate_targets(domain, &[steklov.clone(), dirichlet.clone()])?;
    let d2 = dirichlet.shape.capacity();
    let r1 = regular_part(domain, steklov.center, GreenMode::Bulk)?;
    let r2 = regular_part(domain, dirichlet.center, GreenMode::Bulk)?;
    let g12 = bulk_green(domain, steklov.center, dirichlet.center)?;
    let inv = -(d2 * steklov.eps * dirichlet.eps).ln() + 2.0 * PI * (r1 + r2 - 2.0 * g12);
    if !(inv > 0.0) {
        return Err(Error::AsymptoticsInadmissible(format!(
            "1/(eps1 sigma0) = {inv} is not positive"
        )));
    }
    Ok(1.0 / (steklov.eps * inv))
}

/// Interaction matrix for boundary patches on the obstacle of an exterior
/// domain; downstream solvers consume it unchanged.  The MFRT problem is
/// rejected for exterior domains (infinite area).
pub fn exterior_scene_support(domain: &Domain, centers: &[Point]) -> Result<GreenMatrix> {
    if !domain.kind().is_exterior() {
        return Err(Error::InvalidArgument(
            "exterior_scene_support expects an exterior domain".into(),
        ));
    }
    green_matrix(domain, centers, GreenMode::Surface)
}
