//! Small-target eigenvalue and eigenfunction asymptotics for the mixed
//! Steklov-Neumann problem (N Steklov patches) and the
//! Steklov-Neumann-Dirichlet problem (one Steklov patch, N-1 Dirichlet
//! patches).
//!
//! The SN eigenvalues are those of M1^{-1} B1 with
//!   M1 = I + (I - nu E/nubar) nu (G + C1 I),
//!   B1 = (I - nu E/nubar) nu eta,     eta = diag(pi / (2 eps_j)),
//! always computed through the symmetric similarity
//! eta^{1/2} M1^{-1} B1 eta^{-1/2}, which is symmetric and guarantees real
//! output.  The SND problem reduces to the scalar equation C(mu) = C with
//! the constant C assembled from M0.

use crate::capture::{build_m0, nu_vector_unbounded, PatchCondition, Scene};
use crate::error::{Error, Result, Warning};
use crate::halfplane::{c1_exact, CFunction, IntervalSteklovBasis, Parity, POLE_EXCLUSION};
use crate::quad;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// First N eigenvalues of the mixed Steklov-Neumann problem with the
/// coefficient vectors of the associated outer fields.
#[derive(Debug, Clone)]
pub struct SnSpectrum {
    sigmas: Vec<f64>,
    coeffs: Vec<DVector<f64>>,
    eps: Vec<f64>,
    warnings: Vec<Warning>,
}

impl SnSpectrum {
    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }

    /// Eigenvalue approximations, ascending; sigma_0 = 0 exactly.
    pub fn sigma(&self, j: usize) -> f64 {
        self.sigmas[j]
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    /// Coefficient vector of mode `j`, normalized so that
    /// sum_i A_i^2 / eps_i = 2 sigma_j^2 / pi^2.
    pub fn coefficients(&self, j: usize) -> &DVector<f64> {
        &self.coeffs[j]
    }

    pub fn patch_half_lengths(&self) -> &[f64] {
        &self.eps
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }
}

/// Solves the small-target SN eigenproblem for a scene of Steklov patches.
pub fn sn_spectrum(scene: &Scene, basis: &IntervalSteklovBasis) -> Result<SnSpectrum> {
    let n = scene.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "the SN asymptotics needs at least two patches".into(),
        ));
    }
    for (i, p) in scene.patches().iter().enumerate() {
        if p.condition != PatchCondition::Steklov {
            return Err(Error::Unsupported(format!(
                "patch {i} is not Steklov; sn_spectrum expects all-Steklov scenes"
            )));
        }
    }
    if basis.len() < 3 {
        return Err(Error::InvalidArgument(
            "basis too small for SN eigenfunction work; build with K >= 3".into(),
        ));
    }
    // nu_j = -1/ln(eps_j)
    let eps: Vec<f64> = scene.patches().iter().map(|p| p.half_length).collect();
    let nu = DVector::from_iterator(
        n,
        eps.iter()
            .enumerate()
            .map(|(i, &e)| {
                let nu = -1.0 / e.ln();
                if !(nu > 0.0 && nu.is_finite()) {
                    return Err(Error::AsymptoticsInadmissible(format!(
                        "patch {i}: half-length {e} leaves no small parameter"
                    )));
                }
                Ok(nu)
            })
            .collect::<Result<Vec<_>>>()?,
    );
    let gm = scene.interaction_matrix()?;

    let c1 = c1_exact();
    let nubar = nu.sum();
    // bhat = (I - nu E/nubar) nu  (symmetric), M1 = I + bhat (G + C1 I)
    let bhat = {
        let mut m = DMatrix::from_fn(n, n, |i, j| -nu[i] * nu[j] / nubar);
        for i in 0..n {
            m[(i, i)] += nu[i];
        }
        m
    };
    let g_shift = {
        let mut g = gm.entries().clone();
        for i in 0..n {
            g[(i, i)] += c1;
        }
        g
    };
    let m1 = DMatrix::identity(n, n) + &bhat * &g_shift;
    let x = m1
        .lu()
        .solve(&bhat)
        .ok_or_else(|| Error::AsymptoticsInadmissible("singular M1 matrix".into()))?;

    // dhat = eta^{1/2} X eta^{1/2} with eta = diag(pi/(2 eps)).
    let sqrt_eta: Vec<f64> = eps.iter().map(|&e| (PI / (2.0 * e)).sqrt()).collect();
    let dhat = DMatrix::from_fn(n, n, |i, j| sqrt_eta[i] * x[(i, j)] * sqrt_eta[j]);
    let scale = dhat.amax().max(1.0);
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((dhat[(i, j)] - dhat[(j, i)]).abs());
        }
    }
    if asym > 1e-8 * scale {
        return Err(Error::Numerical(format!(
            "similarity-transformed SN matrix asymmetric by {asym:e}"
        )));
    }
    let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (dhat[(i, j)] + dhat[(j, i)]));
    let eig = sym.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    // The constant mode is structurally zero (B1 annihilates e); pin it.
    let zero_slot = *order
        .iter()
        .min_by(|&&a, &&b| {
            eig.eigenvalues[a]
                .abs()
                .total_cmp(&eig.eigenvalues[b].abs())
        })
        .unwrap();

    let mut sigmas = Vec::with_capacity(n);
    let mut coeffs = Vec::with_capacity(n);
    for &idx in &order {
        let sigma = if idx == zero_slot {
            0.0
        } else {
            eig.eigenvalues[idx]
        };
        if sigma < -1e-8 * scale {
            return Err(Error::Numerical(format!(
                "negative SN eigenvalue {sigma}"
            )));
        }
        let sigma = sigma.max(0.0);
        let v = eig.eigenvectors.column(idx);
        // A = eta^{-1/2} v, rescaled to sum A_i^2/eps_i = 2 sigma^2/pi^2.
        let mut a = DVector::from_fn(n, |i, _| v[i] / sqrt_eta[i]);
        if sigma == 0.0 {
            a.fill(0.0);
        } else {
            let norm: f64 = (0..n).map(|i| a[i] * a[i] / eps[i]).sum();
            let t = (2.0 * sigma * sigma / (PI * PI * norm)).sqrt();
            a *= t;
            let lead = a.iter().cloned().fold(0.0_f64, |m, x| {
                if x.abs() > m.abs() {
                    x
                } else {
                    m
                }
            });
            if lead < 0.0 {
                a.neg_mut();
            }
        }
        sigmas.push(sigma);
        coeffs.push(a);
    }

    let mut warnings = scene.warnings().to_vec();
    let max_eps = eps.iter().cloned().fold(0.0_f64, f64::max);
    let top = sigmas.last().copied().unwrap_or(0.0);
    if max_eps * top > 0.5 {
        warnings.push(Warning::LinearizedRegimeExceeded {
            value: max_eps * top,
        });
    }
    Ok(SnSpectrum {
        sigmas,
        coeffs,
        eps,
        warnings,
    })
}

/// Restriction of the SN eigenfunction of mode `j` onto patch `i`, sampled
/// at local coordinates y1 in (-1, 1):
/// V(y1) = pi A_i sum_k Psi_{2k}(inf) Psi_{2k}(y1, 0) / (mu_{2k} - sigma eps_i).
pub fn sn_eigenfunction_restriction(
    spectrum: &SnSpectrum,
    j: usize,
    patch: usize,
    basis: &IntervalSteklovBasis,
    samples: &[f64],
) -> Result<Vec<f64>> {
    if j == 0 || j >= spectrum.len() {
        return Err(Error::InvalidArgument(format!(
            "mode index {j} out of 1..{}",
            spectrum.len()
        )));
    }
    if patch >= spectrum.eps.len() {
        return Err(Error::InvalidArgument(format!("patch {patch} out of range")));
    }
    let sigma_eps = spectrum.sigma(j) * spectrum.eps[patch];
    let amp = PI * spectrum.coefficients(j)[patch];
    restriction_series(basis, sigma_eps, amp, samples)
}

/// Shared evaluator of pi * amp * sum_k Psi_{2k}(inf) Psi_{2k}(y1)/(mu_{2k} - shift).
fn restriction_series(
    basis: &IntervalSteklovBasis,
    shift: f64,
    amp: f64,
    samples: &[f64],
) -> Result<Vec<f64>> {
    for k in 0..basis.len() {
        if basis.parity(k) == Parity::Even && (basis.mu(k) - shift).abs() < POLE_EXCLUSION {
            return Err(Error::Resonance(shift, k / 2));
        }
    }
    samples
        .iter()
        .map(|&y1| {
            let mut v = 0.0;
            for k in 0..basis.len() {
                if basis.parity(k) != Parity::Even {
                    continue;
                }
                v += basis.psi_inf(k) * basis.psi_eval(k, [y1, 0.0])? / (basis.mu(k) - shift);
            }
            Ok(amp * v)
        })
        .collect()
}

/// Checks the SND patch layout: patch 0 Steklov, all others Dirichlet.
fn check_snd_layout(scene: &Scene) -> Result<()> {
    if scene.len() < 2 {
        return Err(Error::InvalidArgument(
            "the SND problem needs one Steklov and at least one Dirichlet patch".into(),
        ));
    }
    let steklov_count = scene
        .patches()
        .iter()
        .filter(|p| p.condition == PatchCondition::Steklov)
        .count();
    if steklov_count != 1 || scene.patches()[0].condition != PatchCondition::Steklov {
        return Err(Error::Unsupported(
            "SND layout requires exactly one Steklov patch listed first; mixed layouts with \
             several Steklov patches among Dirichlet ones are not covered"
                .into(),
        ));
    }
    for (i, p) in scene.patches().iter().enumerate().skip(1) {
        if p.condition != PatchCondition::Dirichlet {
            return Err(Error::Unsupported(format!(
                "patch {i} must be Dirichlet in the SND layout"
            )));
        }
    }
    Ok(())
}

/// The constant C = -(1/nu_1) (e_1' M0^{-1} [e_1 - nu e / nubar])^{-1}
/// governing the SND eigenvalue equation C(mu) = C.  Negative and large in
/// the admissible regime.
pub fn snd_constant(scene: &Scene, cfun: &CFunction) -> Result<f64> {
    check_snd_layout(scene)?;
    let n = scene.len();
    let nu = nu_vector_unbounded(scene, cfun)?;
    let nubar = nu.sum();
    let gm = scene.interaction_matrix()?;
    let m0 = build_m0(&nu, gm.entries());
    let mut rhs = DVector::from_fn(n, |i, _| -nu[i] / nubar);
    rhs[0] += 1.0;
    let z = m0
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::AsymptoticsInadmissible("singular M0 matrix".into()))?;
    let c = -1.0 / (nu[0] * z[0]);
    if !(c < 0.0) {
        return Err(Error::AsymptoticsInadmissible(format!(
            "SND constant C = {c} is not negative; patches outside the asymptotic regime"
        )));
    }
    Ok(c)
}

/// Solves C(-mu) = C on each inter-pole interval: the j-th root satisfies
/// mu_{2j} <= mu_hat_{2j} <= mu_{2j+2}.  Bisection down to floating-point
/// resolution (C varies by orders of magnitude across an interval, so a
/// fixed bisection width cannot reach the residual tolerance near the
/// poles) followed by a short secant polish.
pub fn snd_roots(cfun: &CFunction, c: f64, count: usize) -> Result<Vec<f64>> {
    if !c.is_finite() {
        return Err(Error::InvalidArgument("C must be finite".into()));
    }
    let poles = cfun.pole_mus();
    if count + 1 > poles.len() {
        return Err(Error::InvalidArgument(format!(
            "requested {count} roots but only {} pole intervals are resolved by the basis",
            poles.len().saturating_sub(1)
        )));
    }
    let mut roots = Vec::with_capacity(count);
    for j in 0..count {
        // C(mu) decreases from +inf to -inf on (-mu_{2j+2}, -mu_{2j}).
        let hi = -poles[j] - POLE_EXCLUSION * 10.0;
        let lo = -poles[j + 1] + POLE_EXCLUSION * 10.0;
        let f = |mu: f64| cfun.eval(mu).map(|v| v - c);
        let (mut a, mut b) = (lo, hi);
        let mut fa = f(a)?;
        let fb = f(b)?;
        if fa < 0.0 || fb > 0.0 {
            return Err(Error::RootBracket {
                lo,
                hi,
                message: format!(
                    "C(mu) - C has values ({fa:.3e}, {fb:.3e}) at the bracket ends for root {j}"
                ),
            });
        }
        for _ in 0..100 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let fm = f(mid)?;
            if fm >= 0.0 {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        // Secant polish from the bisection endpoints.
        let mut x0 = a;
        let mut f0 = fa;
        let mut x1 = b;
        let mut f1 = f(b)?;
        for _ in 0..5 {
            let denom = f1 - f0;
            if denom == 0.0 {
                break;
            }
            let x2 = (x1 - f1 * (x1 - x0) / denom).clamp(lo, hi);
            x0 = x1;
            f0 = f1;
            x1 = x2;
            f1 = f(x1)?;
        }
        let root = if f1.abs() <= f0.abs() { x1 } else { x0 };
        let resid = f(root)?.abs();
        // Close to a pole the slope can exceed 1/ulp, so a sign-change
        // bracket of one or two representable floats is the best possible
        // localization and is accepted as converged.
        let machine_width = (b - a) <= 4.0 * f64::EPSILON * a.abs().max(b.abs());
        if resid > 1e-10 * c.abs().max(1.0) && !machine_width {
            return Err(Error::RootBracket {
                lo,
                hi,
                message: format!("root {j} polished to residual {resid:e} only"),
            });
        }
        roots.push(-root);
    }
    Ok(roots)
}

/// Output of the SND principal-eigenvalue asymptotics.
#[derive(Debug, Clone)]
pub struct SndResult {
    /// The constant C (negative, large in magnitude).
    pub c: f64,
    /// Principal eigenvalue from the explicit small-mu inversion.
    pub sigma0: f64,
    /// Roots mu_hat_{2j} of C(-mu) = C, interlacing the interval spectrum.
    pub mu_hat: Vec<f64>,
    /// Higher eigenvalues sigma_j ~ mu_j / eps_1 for j = 1, 2, ...
    pub higher: Vec<f64>,
    /// Coefficient vector of the principal outer field, scaled so the
    /// eigenfunction restriction to the Steklov patch is L2-normalized.
    pub a: DVector<f64>,
    pub warnings: Vec<Warning>,
}

/// Principal SND eigenvalue: 1/(eps_1 sigma_0) = (2/pi)(C_1 - C), plus the
/// interlacing root list and single-patch approximations of higher modes.
pub fn snd_principal(scene: &Scene, cfun: &CFunction) -> Result<SndResult> {
    let c = snd_constant(scene, cfun)?;
    let eps1 = scene.patches()[0].half_length;
    let inv = 2.0 / PI * (c1_exact() - c);
    if !(inv > 0.0) {
        return Err(Error::AsymptoticsInadmissible(format!(
            "explicit inversion produced non-positive 1/(eps1 sigma0) = {inv}"
        )));
    }
    let sigma0 = 1.0 / (eps1 * inv);

    let basis = cfun.basis();
    let available = cfun.pole_mus().len().saturating_sub(1);
    let roots = snd_roots(cfun, c, available.min(8))?;
    let higher: Vec<f64> = (1..basis.len()).map(|j| basis.mu(j) / eps1).collect();

    // Principal coefficient vector: A proportional to M0^{-1}(e1 - nu e/nubar),
    // scaled so that the restriction onto the Steklov patch is normalized:
    // 1 = -pi eps1 A_1^2 C'(-sigma0 eps1).
    let n = scene.len();
    let nu = nu_vector_unbounded(scene, cfun)?;
    let nubar = nu.sum();
    let gm = scene.interaction_matrix()?;
    let m0 = build_m0(&nu, gm.entries());
    let mut rhs = DVector::from_fn(n, |i, _| -nu[i] / nubar);
    rhs[0] += 1.0;
    let mut a = m0
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::AsymptoticsInadmissible("singular M0 matrix".into()))?;
    let mu0 = -sigma0 * eps1;
    let dc = cfun.derivative(mu0)?;
    let a1 = 1.0 / (-PI * eps1 * dc).sqrt();
    a *= a1 / a[0];

    let mut warnings = scene.warnings().to_vec();
    let eps_max = scene
        .patches()
        .iter()
        .map(|p| p.half_length)
        .fold(0.0_f64, f64::max);
    let mu_hat0 = roots.first().copied().unwrap_or(sigma0 * eps1);
    if mu_hat0 * eps_max / eps1 > 0.3 {
        warnings.push(Warning::LinearizedRegimeExceeded {
            value: mu_hat0 * eps_max / eps1,
        });
    }
    Ok(SndResult {
        c,
        sigma0,
        mu_hat: roots,
        higher,
        a,
        warnings,
    })
}

/// Restriction of the SND eigenfunction of mode `j` onto the Steklov patch,
/// sampled at local coordinates y1 in (-1, 1).  Mode 0 uses the resolvent
/// series at mu = -sigma0 eps1; higher modes reduce to Psi_j / sqrt(eps1).
pub fn snd_restriction(
    result: &SndResult,
    scene: &Scene,
    basis: &IntervalSteklovBasis,
    j: usize,
    samples: &[f64],
) -> Result<Vec<f64>> {
    let eps1 = scene.patches()[0].half_length;
    if j == 0 {
        let shift = result.sigma0 * eps1;
        // normalize: 1 = eps1 amp^2 sum [Psi(inf)]^2/(mu - shift)^2
        let mut norm = 0.0;
        for k in 0..basis.len() {
            if basis.parity(k) != Parity::Even {
                continue;
            }
            norm += basis.psi_inf(k).powi(2) / (basis.mu(k) - shift).powi(2);
        }
        let amp = 1.0 / (eps1 * norm).sqrt() / PI;
        restriction_series(basis, shift, PI * amp, samples)
    } else {
        if j >= basis.len() {
            return Err(Error::InvalidArgument(format!(
                "mode {j} beyond the basis ({} modes)",
                basis.len()
            )));
        }
        samples
            .iter()
            .map(|&y1| Ok(basis.psi_eval(j, [y1, 0.0])? / eps1.sqrt()))
            .collect()
    }
}

/// Leading-order law for a single Steklov patch: sigma_j ~ mu_j / eps1.
pub fn single_patch_sigma(basis: &IntervalSteklovBasis, eps1: f64, j: usize) -> f64 {
    basis.mu(j) / eps1
}

/// Which form of the equally-spaced SND estimate to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SndSpacedMode {
    /// Discrete sum over the exact circulant eigenvalues kappa_j.
    Discrete,
    /// Riemann-integral approximation S(zeta) of the discrete sum.
    LargeN,
    /// Explicit form with S = (zeta - ln(1+zeta))/zeta^2.
    LowOrder,
}

/// Equally-spaced SND configuration on the unit disk: N - 1 Dirichlet
/// patches of half-length eps and one Steklov patch of half-length
/// eps_1 = l1 eps / 2.  Returns 1/(eps_1 sigma_0) in the selected
/// approximation, with a small-N warning for the large-N modes.
pub fn snd_equally_spaced(
    n: usize,
    eps: f64,
    l1: f64,
    mode: SndSpacedMode,
) -> Result<(f64, Vec<Warning>)> {
    if n < 3 {
        return Err(Error::InvalidArgument(
            "equally-spaced SND estimate needs N >= 3".into(),
        ));
    }
    if !(eps > 0.0 && l1 > 0.0) {
        return Err(Error::InvalidArgument(
            "patch lengths must be positive".into(),
        ));
    }
    let nf = n as f64;
    if nf * eps >= PI {
        return Err(Error::AsymptoticsInadmissible(format!(
            "well-separated condition violated: N*eps = {} >= pi",
            nf * eps
        )));
    }
    let eps1 = l1 * eps / 2.0;
    let shift = c1_exact() - (2.0 * eps1 / eps).ln();
    let mut warnings = Vec::new();
    let value = match mode {
        SndSpacedMode::Discrete => {
            let s: f64 = (1..n)
                .map(|j| 1.0 / ((2.0 / eps).ln() + crate::kappa::kappa_exact(n, j)))
                .sum();
            2.0 / PI * (nf / s + shift)
        }
        SndSpacedMode::LargeN | SndSpacedMode::LowOrder => {
            if n < 16 {
                warnings.push(Warning::SmallN { n });
            }
            let b = 4.0 * PI * (-11.0_f64 / 6.0).exp();
            let zeta = -(nf * eps / b).ln();
            let s = match mode {
                SndSpacedMode::LargeN => {
                    let a = crate::kappa::KAPPA_EMPIRICAL_A;
                    quad::adaptive_simpson(
                        &|xi: f64| {
                            4.0 * xi / (1.0 + 2.0 * xi * (zeta + a * PI * PI * xi * xi / 9.0))
                        },
                        0.0,
                        0.5,
                        1e-12,
                    )
                }
                _ => (zeta - (1.0 + zeta).ln()) / (zeta * zeta),
            };
            2.0 / PI * (1.0 / s + shift)
        }
    };
    Ok((value, warnings))
}
