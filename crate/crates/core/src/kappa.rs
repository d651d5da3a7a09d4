//! Eigenvalues kappa_j of the circulant interaction matrix for N identical
//! equally-spaced patches on the unit circle, their large-N asymptotics,
//! and the spectral-vs-dense consistency check for the splitting solve.

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::greens::{green_matrix, GreenMode};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// Closed-form eigenvalue of the circulant Green matrix:
/// kappa_j = ln 2 - sum_m cos(2 pi j m / N) ln sin(pi m / N) for j < N,
/// and kappa_N = N/8 - ln N.
///
/// Indices follow the circulant convention 1 <= j <= N.
pub fn kappa_exact(n: usize, j: usize) -> f64 {
    assert!(n >= 2, "kappa_exact needs N >= 2");
    assert!((1..=n).contains(&j), "index j = {j} out of 1..=N");
    if j == n {
        return n as f64 / 8.0 - (n as f64).ln();
    }
    let nf = n as f64;
    let jf = j as f64;
    let mut sum = 0.0;
    for m in 1..n {
        let mf = m as f64;
        sum += (2.0 * PI * jf * mf / nf).cos() * (PI * mf / nf).sin().ln();
    }
    2.0_f64.ln() - sum
}

/// Which large-N approximation of kappa_j to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KappaOrder {
    /// Euler-Maclaurin form with the sine-integral and endpoint terms.
    Full,
    /// N/(2j) + ln(2 pi e^(-11/6) / N) + pi^2 j^2 / (9 N^2).
    Cubic,
    /// N/(2j) + ln(2 pi e^(-11/6) / N).
    LowOrder,
    /// Cubic form with the empirically adjusted coefficient a = 1.25.
    Empirical,
}

/// Default empirical coefficient in the cubic correction term.
pub const KAPPA_EMPIRICAL_A: f64 = 1.25;

/// Large-N approximations of kappa_j for 1 <= j <= N/2.
pub fn kappa_asymptotic(n: usize, j: usize, order: KappaOrder) -> f64 {
    kappa_asymptotic_with(n, j, order, KAPPA_EMPIRICAL_A)
}

/// Same with a configurable empirical coefficient.
pub fn kappa_asymptotic_with(n: usize, j: usize, order: KappaOrder, a: f64) -> f64 {
    assert!(n >= 2 && j >= 1 && 2 * j <= n, "need 1 <= j <= N/2");
    let nf = n as f64;
    let jf = j as f64;
    let xi = jf / nf;
    let base = nf / (2.0 * jf) + (2.0 * PI * (-11.0_f64 / 6.0).exp() / nf).ln();
    match order {
        KappaOrder::LowOrder => base,
        KappaOrder::Cubic => base + PI * PI * xi * xi / 9.0,
        KappaOrder::Empirical => base + a * PI * PI * xi * xi / 9.0,
        KappaOrder::Full => {
            let two_pi_xi = 2.0 * PI * xi;
            let b = if xi < 1e-8 {
                1.0
            } else {
                two_pi_xi.sin() / (PI * xi) - two_pi_xi.cos() - PI * xi / 3.0 * two_pi_xi.sin()
            };
            nf / (2.0 * jf) + (PI / nf).ln() * b + 2.0_f64.ln() + two_pi_xi.cos() / 6.0
                - sine_integral(two_pi_xi) / (PI * xi)
        }
    }
}

/// Sine integral Si(x) = int_0^x sin(t)/t dt by its Maclaurin series;
/// adequate on the range |x| <= pi used here.
fn sine_integral(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    for k in 1..40 {
        let kf = 2.0 * k as f64;
        term *= -x2 / (kf * (kf + 1.0));
        let contrib = term / (kf + 1.0);
        sum += contrib;
        if contrib.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Splitting coefficients for N equally-spaced identical Dirichlet patches
/// on the unit disk, computed along two independent routes: the circulant
/// spectral inverse and the dense matrix solve.  Returns (spectral, dense)
/// for the first patch as target.
pub fn circulant_splitting_check(n: usize, eps: f64) -> Result<(DVector<f64>, DVector<f64>)> {
    if n < 2 {
        return Err(Error::InvalidArgument("need N >= 2 patches".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(
            "patch half-length must be positive".into(),
        ));
    }
    let nu = -1.0 / (eps / 2.0).ln();
    let nf = n as f64;

    // Spectral route: A_i = -(nu/N) sum_{j<N} cos(2 pi j i / N) / (1 + nu kappa_j)
    // for target k = first patch.
    let mut spectral = DVector::zeros(n);
    for i in 0..n {
        let mut s = 0.0;
        for j in 1..n {
            let kappa = kappa_exact(n, j);
            s += (2.0 * PI * (j as f64) * (i as f64) / nf).cos() / (1.0 + nu * kappa);
        }
        spectral[i] = -(nu / nf) * s;
    }

    // Dense route: M0 A = (nu_k / nubar) (nu e - nubar e_k).
    let domain = Domain::disk_interior();
    let centers: Vec<[f64; 2]> = (0..n)
        .map(|i| domain.boundary_point(2.0 * PI * i as f64 / nf).xy())
        .collect();
    let g = green_matrix(&domain, &centers, GreenMode::Surface)?;
    let nubar = nf * nu;
    let ident = DMatrix::identity(n, n);
    let ee = DMatrix::from_element(n, n, 1.0);
    let m0 = &ident + (&ident - &ee * (nu / nubar)) * g.entries() * nu;
    let mut rhs = DVector::from_element(n, nu * nu / nubar);
    rhs[0] -= nu;
    let dense = m0
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::AsymptoticsInadmissible("singular M0".into()))?;

    Ok((spectral, dense))
}
