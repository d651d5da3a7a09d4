//! Matched-asymptotic solutions for boundary patches: splitting
//! probabilities for Dirichlet and Robin patches, effective patch lengths,
//! and the mean first-reaction time system.
//!
//! All solvers assemble the same N x N system around the interaction matrix
//! G (scaled Green values) and the gauge vector nu, and differ only in the
//! right-hand side:
//!
//!   M0 = I + (I - nu E / nubar) nu G.

use crate::error::{Error, Result, Warning};
use crate::geometry::{dist, BoundaryPoint, Domain, Point};
use crate::greens::{green_matrix, surface_green, GreenMatrix, GreenMode};
use crate::halfplane::CFunction;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// Boundary condition carried by a patch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PatchCondition {
    Dirichlet,
    Robin { q: f64 },
    Steklov,
}

/// A reactive arc of half-length `half_length` centered at a boundary point.
#[derive(Debug, Clone)]
pub struct PatchSpec {
    pub center: BoundaryPoint,
    pub half_length: f64,
    pub condition: PatchCondition,
}

impl PatchSpec {
    pub fn new(center: BoundaryPoint, half_length: f64, condition: PatchCondition) -> Self {
        PatchSpec {
            center,
            half_length,
            condition,
        }
    }
}

/// A domain plus an ordered list of disjoint boundary patches.
#[derive(Debug, Clone)]
pub struct Scene {
    domain: Domain,
    patches: Vec<PatchSpec>,
    warnings: Vec<Warning>,
}

impl Scene {
    /// Validates patch parameters and pairwise arc disjointness.  Close
    /// pairs (arc separation below 4 max eps) get a well-separated warning,
    /// overlap is an error.
    pub fn new(domain: Domain, patches: Vec<PatchSpec>) -> Result<Self> {
        if patches.is_empty() {
            return Err(Error::InvalidArgument("scene needs at least one patch".into()));
        }
        for (i, p) in patches.iter().enumerate() {
            if !(p.half_length > 0.0 && p.half_length.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "patch {i}: half-length must be positive"
                )));
            }
            if let PatchCondition::Robin { q } = p.condition {
                if !(q > 0.0 && q.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "patch {i}: Robin reactivity must satisfy 0 < q < infinity (inert \
                         patches belong to the reflecting boundary)"
                    )));
                }
            }
        }
        let mut warnings = Vec::new();
        let perimeter = domain.perimeter();
        let two_pi = 2.0 * PI;
        let pos: Vec<f64> = patches
            .iter()
            .map(|p| domain.arc_length(p.center.param().rem_euclid(two_pi)))
            .collect();
        let max_eps = patches
            .iter()
            .map(|p| p.half_length)
            .fold(0.0_f64, f64::max);
        for i in 0..patches.len() {
            for j in (i + 1)..patches.len() {
                let d = (pos[i] - pos[j]).abs();
                let d = d.min(perimeter - d);
                if d < patches[i].half_length + patches[j].half_length {
                    return Err(Error::OverlappingPatches(i, j));
                }
                if d < 4.0 * max_eps {
                    warnings.push(Warning::WellSeparatedViolated {
                        i,
                        j,
                        separation: d,
                    });
                }
            }
        }
        Ok(Scene {
            domain,
            patches,
            warnings,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn patches(&self) -> &[PatchSpec] {
        &self.patches
    }

    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn centers(&self) -> Vec<Point> {
        self.patches.iter().map(|p| p.center.xy()).collect()
    }

    pub(crate) fn interaction_matrix(&self) -> Result<GreenMatrix> {
        green_matrix(&self.domain, &self.centers(), GreenMode::Surface)
    }
}

/// Upper bound on the gauge values accepted by the capture solvers; beyond
/// it the logarithmic asymptotics has no accuracy left.
pub const NU_ADMISSIBLE: f64 = 0.6;

/// Gauge value nu and effective length for one patch.
///
/// Dirichlet: nu = -1/ln(eps/2) and eps_eff = eps.  Robin: nu =
/// 1/(-ln eps + C(eps q)) and eps_eff = eps exp(ln 2 - C(eps q)), strictly
/// decreasing in 1/q.  Steklov patches use nu = -1/ln(eps) and keep their
/// length.
pub fn nu_and_effective_length(patch: &PatchSpec, cfun: &CFunction) -> Result<(f64, f64)> {
    let eps = patch.half_length;
    match patch.condition {
        PatchCondition::Dirichlet => Ok((-1.0 / (eps / 2.0).ln(), eps)),
        PatchCondition::Robin { q } => {
            let c = cfun.eval(eps * q)?;
            let nu = 1.0 / (-eps.ln() + c);
            let eps_eff = eps * (2.0_f64.ln() - c).exp();
            Ok((nu, eps_eff))
        }
        PatchCondition::Steklov => Ok((-1.0 / eps.ln(), eps)),
    }
}

fn admissible_nu(patch: &PatchSpec, i: usize, cfun: &CFunction) -> Result<f64> {
    let (nu, _) = nu_and_effective_length(patch, cfun)?;
    if !(nu > 0.0 && nu < NU_ADMISSIBLE) {
        return Err(Error::AsymptoticsInadmissible(format!(
            "patch {i}: gauge nu = {nu:.4} outside (0, {NU_ADMISSIBLE}); the patch is too large \
             for the small-target expansion"
        )));
    }
    Ok(nu)
}

/// M0 = I + (I - nu E / nubar) diag(nu) G.
pub(crate) fn build_m0(nu: &DVector<f64>, g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = nu.len();
    let nubar: f64 = nu.sum();
    let nug = DMatrix::from_fn(n, n, |i, j| nu[i] * g[(i, j)]);
    let col_sums = DVector::from_fn(n, |j, _| nug.column(j).sum());
    let mut m0 = nug;
    for i in 0..n {
        for j in 0..n {
            m0[(i, j)] -= nu[i] / nubar * col_sums[j];
        }
        m0[(i, i)] += 1.0;
    }
    m0
}

/// Splitting probability toward one target patch: the coefficient vector A,
/// the volume-averaged probability chi, and everything needed to evaluate
/// the outer field.
#[derive(Debug, Clone)]
pub struct SplittingSolution {
    target: usize,
    chi: f64,
    a: DVector<f64>,
    scale: f64,
    domain: Domain,
    patches: Vec<PatchSpec>,
    warnings: Vec<Warning>,
}

impl SplittingSolution {
    pub fn target(&self) -> usize {
        self.target
    }

    /// Volume-averaged splitting probability.
    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn coefficients(&self) -> &DVector<f64> {
        &self.a
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    /// Outer-field value S_k(x) = chi - sum_i scale A_i G(x, x_i), clamped
    /// to [0, 1] when `cap` is set.
    pub fn field(&self, x: Point, cap: bool) -> Result<f64> {
        let mut s = self.chi;
        for (i, p) in self.patches.iter().enumerate() {
            s -= self.scale * self.a[i] * surface_green(&self.domain, x, &p.center)?;
        }
        Ok(if cap { s.clamp(0.0, 1.0) } else { s })
    }
}

/// Solves the Dirichlet/Robin splitting system for target `k` (0-based).
pub fn solve_splitting(scene: &Scene, k: usize, cfun: &CFunction) -> Result<SplittingSolution> {
    let n = scene.len();
    if k >= n {
        return Err(Error::InvalidArgument(format!(
            "target index {k} out of range for {n} patches"
        )));
    }
    for (i, p) in scene.patches().iter().enumerate() {
        if p.condition == PatchCondition::Steklov {
            return Err(Error::Unsupported(format!(
                "patch {i} is Steklov; splitting probabilities are defined for \
                 Dirichlet/Robin patches"
            )));
        }
    }
    let mut warnings = scene.warnings().to_vec();
    if n == 1 {
        warnings.push(Warning::SingleTarget);
        return Ok(SplittingSolution {
            target: k,
            chi: 1.0,
            a: DVector::zeros(1),
            scale: PI,
            domain: *scene.domain(),
            patches: scene.patches().to_vec(),
            warnings,
        });
    }
    let nu = DVector::from_iterator(
        n,
        scene
            .patches()
            .iter()
            .enumerate()
            .map(|(i, p)| admissible_nu(p, i, cfun))
            .collect::<Result<Vec<_>>>()?,
    );
    let gm = scene.interaction_matrix()?;
    let sol = splitting_from_parts(&nu, gm.entries(), k)?;
    Ok(SplittingSolution {
        target: k,
        chi: sol.1,
        a: sol.0,
        scale: gm.scale(),
        domain: *scene.domain(),
        patches: scene.patches().to_vec(),
        warnings,
    })
}

/// The bare matrix solve shared with the interior-target variant:
/// A = (nu_k / nubar) M0^{-1} (nu e - nubar e_k), chi = (e' nu G A)/nubar
/// + nu_k/nubar.
pub(crate) fn splitting_from_parts(
    nu: &DVector<f64>,
    g: &DMatrix<f64>,
    k: usize,
) -> Result<(DVector<f64>, f64)> {
    let n = nu.len();
    let nubar = nu.sum();
    let m0 = build_m0(nu, g);
    let mut rhs = nu.clone();
    rhs[k] -= nubar;
    rhs *= nu[k] / nubar;
    let a = m0
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::AsymptoticsInadmissible("singular M0 matrix".into()))?;
    let nuga: f64 = (0..n)
        .map(|i| nu[i] * (0..n).map(|j| g[(i, j)] * a[j]).sum::<f64>())
        .sum();
    let chi = nuga / nubar + nu[k] / nubar;
    Ok((a, chi))
}

/// Evaluates the splitting outer field, attaching a near-field warning when
/// `x` is within one patch half-length of a patch center.
pub fn eval_splitting_field(
    sol: &SplittingSolution,
    x: Point,
    cap: bool,
) -> Result<(f64, Option<Warning>)> {
    if !sol.domain.contains(x) {
        return Err(Error::OutsideDomain(x[0], x[1]));
    }
    let mut warning = None;
    for (i, p) in sol.patches.iter().enumerate() {
        let d = dist(x, p.center.xy());
        if d < p.half_length {
            warning = Some(Warning::NearField {
                patch: i,
                distance: d,
            });
            break;
        }
    }
    Ok((sol.field(x, cap)?, warning))
}

/// Mean first-reaction time solution: coefficients A with
/// sum A_j = |Omega|/pi, and the volume-averaged MFRT u0.
#[derive(Debug, Clone)]
pub struct MfrtSolution {
    u0: f64,
    a: DVector<f64>,
    scale: f64,
    domain: Domain,
    patches: Vec<PatchSpec>,
    warnings: Vec<Warning>,
}

impl MfrtSolution {
    /// Volume-averaged mean first-reaction time.
    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn coefficients(&self) -> &DVector<f64> {
        &self.a
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    /// Pointwise MFRT u(x) = u0 - sum_i scale A_i G(x, x_i).
    pub fn field(&self, x: Point) -> Result<f64> {
        if !self.domain.contains(x) {
            return Err(Error::OutsideDomain(x[0], x[1]));
        }
        let mut u = self.u0;
        for (i, p) in self.patches.iter().enumerate() {
            u -= self.scale * self.a[i] * surface_green(&self.domain, x, &p.center)?;
        }
        Ok(u)
    }
}

/// Solves the mean first-reaction time system for Dirichlet/Robin patches.
pub fn solve_mfrt(scene: &Scene, cfun: &CFunction) -> Result<MfrtSolution> {
    let n = scene.len();
    for (i, p) in scene.patches().iter().enumerate() {
        if p.condition == PatchCondition::Steklov {
            return Err(Error::Unsupported(format!(
                "patch {i} is Steklov; the MFRT system covers Dirichlet/Robin patches"
            )));
        }
    }
    let area = scene.domain().area()?;
    let nu = DVector::from_iterator(
        n,
        scene
            .patches()
            .iter()
            .enumerate()
            .map(|(i, p)| admissible_nu(p, i, cfun))
            .collect::<Result<Vec<_>>>()?,
    );
    let nubar = nu.sum();
    let gm = scene.interaction_matrix()?;
    let g = gm.entries();
    let m0 = build_m0(&nu, g);
    let rhs = &nu * (area / (PI * nubar));
    let a = m0
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::AsymptoticsInadmissible("singular M0 matrix".into()))?;
    let nuga: f64 = (0..n)
        .map(|i| nu[i] * (0..n).map(|j| g[(i, j)] * a[j]).sum::<f64>())
        .sum();
    let u0 = area / (PI * nubar) + nuga / nubar;
    if !(u0 > 0.0) {
        return Err(Error::AsymptoticsInadmissible(format!(
            "volume-averaged MFRT came out non-positive ({u0}); patches too large"
        )));
    }
    Ok(MfrtSolution {
        u0,
        a,
        scale: gm.scale(),
        domain: *scene.domain(),
        patches: scene.patches().to_vec(),
        warnings: scene.warnings().to_vec(),
    })
}

/// Builds the nu vector for a steklov-module scene without the capture
/// admissibility bound (those systems carry their own regime warnings).
pub(crate) fn nu_vector_unbounded(scene: &Scene, cfun: &CFunction) -> Result<DVector<f64>> {
    let vals = scene
        .patches()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (nu, _) = nu_and_effective_length(p, cfun)?;
            if !(nu > 0.0 && nu.is_finite()) {
                return Err(Error::AsymptoticsInadmissible(format!(
                    "patch {i}: gauge nu = {nu} is not positive"
                )));
            }
            Ok(nu)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DVector::from_vec(vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfplane::IntervalSteklovBasis;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn cfun() -> CFunction {
        CFunction::new(Arc::new(IntervalSteklovBasis::build(21, 100).unwrap()))
    }

    fn disk_scene(specs: &[(f64, f64, PatchCondition)]) -> Scene {
        let d = Domain::disk_interior();
        let patches = specs
            .iter()
            .map(|&(angle, eps, bc)| PatchSpec::new(d.boundary_point(angle), eps, bc))
            .collect();
        Scene::new(d, patches).unwrap()
    }

    #[test]
    fn nu_dirichlet_value() {
        let d = Domain::disk_interior();
        let p = PatchSpec::new(d.boundary_point(0.0), 0.1, PatchCondition::Dirichlet);
        let (nu, eps_eff) = nu_and_effective_length(&p, &cfun()).unwrap();
        assert_relative_eq!(nu, -1.0 / 0.05_f64.ln(), epsilon = 1e-15);
        assert!((nu - 0.33381).abs() < 1e-5);
        assert_eq!(eps_eff, 0.1);
    }

    #[test]
    fn robin_effective_length_weak_limit() {
        // eps q << 1: eps_eff ~ eps exp(-pi/(2 q eps)) to leading order in
        // the exponent.  eps*q is kept above ~2e-3 so eps_eff stays
        // representable in f64.
        let d = Domain::disk_interior();
        let c = cfun();
        let (eps, q) = (0.1, 0.05);
        let p = PatchSpec::new(d.boundary_point(0.0), eps, PatchCondition::Robin { q });
        let (_, eps_eff) = nu_and_effective_length(&p, &c).unwrap();
        let log_ratio = (eps_eff / eps).ln();
        let leading = -PI / (2.0 * q * eps);
        assert_relative_eq!(log_ratio / leading, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn robin_strong_limit_recovers_dirichlet_length() {
        let d = Domain::disk_interior();
        let p = PatchSpec::new(
            d.boundary_point(0.0),
            0.1,
            PatchCondition::Robin { q: 1e6 },
        );
        let (_, eps_eff) = nu_and_effective_length(&p, &cfun()).unwrap();
        assert!((eps_eff - 0.1).abs() / 0.1 < 0.01, "eps_eff = {eps_eff}");
    }

    #[test]
    fn effective_length_decreasing_in_inverse_reactivity() {
        let d = Domain::disk_interior();
        let c = cfun();
        let mut prev = f64::INFINITY;
        for &q in &[100.0, 10.0, 1.0, 0.1, 0.01] {
            let p = PatchSpec::new(d.boundary_point(0.0), 0.1, PatchCondition::Robin { q });
            let (_, eps_eff) = nu_and_effective_length(&p, &c).unwrap();
            assert!(eps_eff < prev, "eps_eff not decreasing at q = {q}");
            prev = eps_eff;
        }
    }

    #[test]
    fn two_identical_patches_split_evenly() {
        let scene = disk_scene(&[
            (0.0, 0.1, PatchCondition::Dirichlet),
            (PI, 0.1, PatchCondition::Dirichlet),
        ]);
        let sol = solve_splitting(&scene, 0, &cfun()).unwrap();
        assert_relative_eq!(sol.chi(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(sol.coefficients().sum(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn equally_spaced_patches_split_equally() {
        for n in [3usize, 5, 8] {
            let specs: Vec<_> = (0..n)
                .map(|i| {
                    (
                        2.0 * PI * i as f64 / n as f64,
                        0.05,
                        PatchCondition::Dirichlet,
                    )
                })
                .collect();
            let scene = disk_scene(&specs);
            for k in 0..n {
                let sol = solve_splitting(&scene, k, &cfun()).unwrap();
                assert_relative_eq!(sol.chi(), 1.0 / n as f64, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn two_patch_closed_form() {
        // eps1 = 0.1, eps2 = 0.2 antipodal on the unit disk.
        let scene = disk_scene(&[
            (0.0, 0.1, PatchCondition::Dirichlet),
            (PI, 0.2, PatchCondition::Dirichlet),
        ]);
        let sol = solve_splitting(&scene, 0, &cfun()).unwrap();
        let nu1 = -1.0 / 0.05_f64.ln();
        let nu2 = -1.0 / 0.1_f64.ln();
        let interaction = 2.0 * 2.0_f64.ln(); // R1 + R2 - 2 G12 on the disk, |x1-x2| = 2
        let chi_expect =
            (1.0 / nu2 + 2.0_f64.ln()) / (1.0 / nu1 + 1.0 / nu2 + interaction);
        assert_relative_eq!(sol.chi(), chi_expect, epsilon = 1e-12);
        let a2_expect = 1.0 / (1.0 / nu1 + 1.0 / nu2 + interaction);
        assert_relative_eq!(sol.coefficients()[1], a2_expect, epsilon = 1e-12);
        assert_relative_eq!(sol.coefficients()[0], -a2_expect, epsilon = 1e-12);
    }

    #[test]
    fn field_two_equal_patches_explicit() {
        // S_1(x) = 1/2 [1 + nu/(1 + nu ln|x1-x2|) ln(|x-x2|/|x-x1|)]
        let eps = 0.1;
        let scene = disk_scene(&[
            (0.0, eps, PatchCondition::Dirichlet),
            (PI, eps, PatchCondition::Dirichlet),
        ]);
        let sol = solve_splitting(&scene, 0, &cfun()).unwrap();
        let nu = -1.0 / (eps / 2.0_f64).ln();
        let x1 = [1.0, 0.0];
        let x2 = [-1.0, 0.0];
        for &x in &[[0.3, 0.2], [-0.5, 0.1], [0.0, -0.8]] {
            let expect = 0.5
                * (1.0
                    + nu / (1.0 + nu * 2.0_f64.ln())
                        * (dist(x, x2) / dist(x, x1)).ln());
            let (got, warn) = eval_splitting_field(&sol, x, false).unwrap();
            assert!(warn.is_none());
            assert_relative_eq!(got, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn fields_sum_to_one_and_center_symmetry() {
        let scene = disk_scene(&[
            (0.0, 0.08, PatchCondition::Dirichlet),
            (2.0, 0.05, PatchCondition::Robin { q: 2.0 }),
            (4.0, 0.12, PatchCondition::Dirichlet),
        ]);
        let c = cfun();
        let x = [0.25, -0.4];
        let total: f64 = (0..3)
            .map(|k| {
                solve_splitting(&scene, k, &c)
                    .unwrap()
                    .field(x, false)
                    .unwrap()
            })
            .sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-9);

        let sym = disk_scene(&[
            (0.0, 0.1, PatchCondition::Dirichlet),
            (PI, 0.1, PatchCondition::Dirichlet),
        ]);
        let sol = solve_splitting(&sym, 0, &c).unwrap();
        assert_relative_eq!(sol.field([0.0, 0.0], false).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn near_field_warning_and_capping() {
        let scene = disk_scene(&[
            (0.0, 0.1, PatchCondition::Dirichlet),
            (PI, 0.3, PatchCondition::Dirichlet),
        ]);
        let sol = solve_splitting(&scene, 0, &cfun()).unwrap();
        let x = [0.95, 0.01];
        let (_, warn) = eval_splitting_field(&sol, x, false).unwrap();
        assert!(matches!(warn, Some(Warning::NearField { patch: 0, .. })));
        let (capped, _) = eval_splitting_field(&sol, x, true).unwrap();
        assert!((0.0..=1.0).contains(&capped));
        assert!(eval_splitting_field(&sol, [1.5, 0.0], false).is_err());
    }

    #[test]
    fn single_patch_splitting_is_trivial() {
        let scene = disk_scene(&[(0.0, 0.1, PatchCondition::Dirichlet)]);
        let sol = solve_splitting(&scene, 0, &cfun()).unwrap();
        assert_eq!(sol.chi(), 1.0);
        assert!(sol
            .warnings()
            .iter()
            .any(|w| matches!(w, Warning::SingleTarget)));
    }

    #[test]
    fn robin_dirichlet_limit() {
        let c = cfun();
        let strong = disk_scene(&[
            (0.0, 0.1, PatchCondition::Robin { q: 1e8 }),
            (PI, 0.2, PatchCondition::Robin { q: 1e8 }),
        ]);
        let dirichlet = disk_scene(&[
            (0.0, 0.1, PatchCondition::Dirichlet),
            (PI, 0.2, PatchCondition::Dirichlet),
        ]);
        let chi_s = solve_splitting(&strong, 0, &c).unwrap().chi();
        let chi_d = solve_splitting(&dirichlet, 0, &c).unwrap().chi();
        assert!((chi_s - chi_d).abs() < 1e-3, "{chi_s} vs {chi_d}");
    }

    #[test]
    fn robin_weak_limit_is_reactivity_weighted() {
        let c = cfun();
        let (e1, q1) = (0.05, 0.004);
        let (e2, q2) = (0.08, 0.01);
        let scene = disk_scene(&[
            (0.0, e1, PatchCondition::Robin { q: q1 }),
            (2.5, e2, PatchCondition::Robin { q: q2 }),
        ]);
        let chi = solve_splitting(&scene, 0, &c).unwrap().chi();
        let expect = e1 * q1 / (e1 * q1 + e2 * q2);
        assert!(
            (chi - expect).abs() / expect < 0.01,
            "chi = {chi}, weighted = {expect}"
        );
    }

    #[test]
    fn mfrt_single_patch_narrow_escape_constant() {
        let scene = disk_scene(&[(0.0, 0.1, PatchCondition::Dirichlet)]);
        let sol = solve_mfrt(&scene, &cfun()).unwrap();
        // N = 1 collapses M0 to the identity: u0 = ln(2/eps) + 1/8.
        assert_relative_eq!(sol.u0(), (2.0_f64 / 0.1).ln() + 0.125, epsilon = 1e-12);
        assert_relative_eq!(sol.coefficients().sum(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mfrt_decreasing_in_reactivity() {
        let c = cfun();
        let mut prev = f64::INFINITY;
        for &q in &[0.1, 0.5, 2.0, 10.0, 100.0] {
            let scene = disk_scene(&[
                (0.0, 0.1, PatchCondition::Robin { q }),
                (PI, 0.1, PatchCondition::Robin { q: 1.0 }),
            ]);
            let u0 = solve_mfrt(&scene, &c).unwrap().u0();
            assert!(u0 < prev, "u0 not decreasing at q = {q}");
            prev = u0;
        }
    }

    #[test]
    fn mfrt_coefficient_sum_rule() {
        let scene = disk_scene(&[
            (0.0, 0.07, PatchCondition::Dirichlet),
            (1.8, 0.1, PatchCondition::Robin { q: 3.0 }),
            (4.1, 0.05, PatchCondition::Dirichlet),
        ]);
        let sol = solve_mfrt(&scene, &cfun()).unwrap();
        // |Omega|/pi = 1 on the unit disk.
        assert_relative_eq!(sol.coefficients().sum(), 1.0, epsilon = 1e-10);
        assert!(sol.u0() > 0.0);
        // field at the center stays positive and finite
        assert!(sol.field([0.0, 0.0]).unwrap() > 0.0);
    }

    #[test]
    fn mfrt_rejected_for_exterior_domain() {
        let d = Domain::disk_exterior();
        let scene = Scene::new(
            d,
            vec![PatchSpec::new(
                d.boundary_point(0.0),
                0.1,
                PatchCondition::Dirichlet,
            )],
        )
        .unwrap();
        assert!(matches!(
            solve_mfrt(&scene, &cfun()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn overlap_rejected_and_separation_warned() {
        let d = Domain::disk_interior();
        let mk = |a: f64, e: f64| PatchSpec::new(d.boundary_point(a), e, PatchCondition::Dirichlet);
        assert!(matches!(
            Scene::new(d, vec![mk(0.0, 0.2), mk(0.3, 0.2)]),
            Err(Error::OverlappingPatches(0, 1))
        ));
        // separation 0.35 < 4 * 0.1 but no overlap
        let close = Scene::new(d, vec![mk(0.0, 0.1), mk(0.35, 0.1)]).unwrap();
        assert!(close
            .warnings()
            .iter()
            .any(|w| matches!(w, Warning::WellSeparatedViolated { .. })));
        let far = Scene::new(d, vec![mk(0.0, 0.1), mk(PI, 0.1)]).unwrap();
        assert!(far.warnings().is_empty());
    }

    #[test]
    fn oversized_patch_rejected() {
        // nu = -1/ln(eps/2) exceeds 0.6 for eps > 2 exp(-5/3) ~ 0.378.
        let scene = disk_scene(&[
            (0.0, 0.5, PatchCondition::Dirichlet),
            (PI, 0.1, PatchCondition::Dirichlet),
        ]);
        assert!(matches!(
            solve_splitting(&scene, 0, &cfun()),
            Err(Error::AsymptoticsInadmissible(_))
        ));
    }

    #[test]
    fn robin_patch_with_zero_q_rejected() {
        let d = Domain::disk_interior();
        assert!(Scene::new(
            d,
            vec![PatchSpec::new(
                d.boundary_point(0.0),
                0.1,
                PatchCondition::Robin { q: 0.0 },
            )],
        )
        .is_err());
    }

    #[test]
    fn chi_stays_in_unit_interval_across_reactivities() {
        let c = cfun();
        for &q in &[0.01, 0.1, 1.0, 10.0, 1e3] {
            let scene = disk_scene(&[
                (0.0, 0.1, PatchCondition::Robin { q }),
                (PI, 0.1, PatchCondition::Dirichlet),
            ]);
            let chi = solve_splitting(&scene, 0, &c).unwrap().chi();
            assert!(chi > 0.0 && chi < 1.0, "chi = {chi} at q = {q}");
        }
    }

    #[test]
    fn exterior_splitting_far_field_tends_to_chi() {
        let d = Domain::disk_exterior();
        let scene = Scene::new(
            d,
            vec![
                PatchSpec::new(d.boundary_point(0.0), 0.1, PatchCondition::Dirichlet),
                PatchSpec::new(d.boundary_point(PI), 0.2, PatchCondition::Dirichlet),
            ],
        )
        .unwrap();
        let sol = solve_splitting(&scene, 0, &cfun()).unwrap();
        let far = sol.field([7.0e3, 7.0e3], false).unwrap();
        assert!(
            (far - sol.chi()).abs() < 1e-3,
            "far field {far} vs chi {}",
            sol.chi()
        );
    }
}
