//! Boundary Fourier-collocation solvers on the unit disk.
//!
//! Everything is built on the nodal Dirichlet-to-Neumann matrix of the
//! disk under trigonometric interpolation on a uniform boundary grid (a
//! symmetric circulant with symbol |m|).  Mixed boundary value problems
//! (splitting, MFRT) collocate the boundary conditions at the nodes and
//! solve the square system; mixed Steklov eigenproblems eliminate
//! Dirichlet nodes, take the Schur complement over the Neumann nodes, and
//! eigensolve the resulting symmetric matrix on the Steklov nodes.
//! Interior two-hole eigenvalues use a fundamental-solutions least-squares
//! scan instead.

use crate::capture::{PatchCondition, Scene};
use crate::error::{Error, Result};
use crate::geometry::{norm, DomainKind, Point};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// Resolution of the collocation solvers.
#[derive(Debug, Clone, Copy)]
pub struct CollocationConfig {
    /// Number of Fourier harmonics retained in the reconstructed field.
    pub harmonics: usize,
    /// Number of boundary collocation nodes (the DtN grid size).
    pub nodes: usize,
    /// Tikhonov ridge applied to near-degenerate systems.
    pub ridge: f64,
    /// Number of sub-spacing grid shifts averaged per solve.  Patch
    /// endpoints quantize to whole grid cells; averaging over shifted grids
    /// removes the resulting O(h) oscillation of integral outputs.
    pub offsets: usize,
}

impl Default for CollocationConfig {
    fn default() -> Self {
        CollocationConfig {
            harmonics: 256,
            nodes: 2048,
            ridge: 1e-12,
            offsets: 4,
        }
    }
}

impl CollocationConfig {
    fn validate(&self) -> Result<()> {
        if self.nodes < 2 * (2 * self.harmonics + 1) {
            return Err(Error::InvalidArgument(format!(
                "need at least 2(2M+1) collocation nodes, got {} for M = {}",
                self.nodes, self.harmonics
            )));
        }
        if self.offsets == 0 {
            return Err(Error::InvalidArgument("offsets must be >= 1".into()));
        }
        Ok(())
    }

    fn node_angle(&self, i: usize, offset: usize) -> f64 {
        2.0 * PI * (i as f64 + 0.5 + offset as f64 / self.offsets as f64) / self.nodes as f64
    }
}

/// Truncated Fourier representation of a harmonic function on the disk,
/// plus the quadratic particular term used by the MFRT variant:
/// u = part * r^2 + a0 + sum_m r^m (a_m cos m th + b_m sin m th).
#[derive(Debug, Clone)]
pub struct CollocationField {
    pub a0: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub particular: f64,
}

impl CollocationField {
    pub fn eval(&self, x: Point) -> f64 {
        let r = norm(x);
        let th = x[1].atan2(x[0]);
        let mut u = self.particular * r * r + self.a0;
        let mut rm = 1.0;
        for m in 0..self.a.len() {
            rm *= r;
            let arg = (m as f64 + 1.0) * th;
            u += rm * (self.a[m] * arg.cos() + self.b[m] * arg.sin());
        }
        u
    }

    /// Volume average over the unit disk; the oscillatory modes drop out.
    pub fn volume_average(&self) -> f64 {
        self.a0 + self.particular / 2.0
    }
}

fn require_unit_disk(scene: &Scene) -> Result<()> {
    if scene.domain().kind() != DomainKind::DiskInterior {
        return Err(Error::Unsupported(
            "the collocation oracle covers the unit disk only".into(),
        ));
    }
    Ok(())
}

fn wrap_angle(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    }
    if d < -PI {
        d += 2.0 * PI;
    }
    d
}

/// Which patch covers boundary angle `th`, if any.
fn patch_at(scene: &Scene, th: f64) -> Option<usize> {
    scene
        .patches()
        .iter()
        .position(|p| wrap_angle(th - p.center.param()).abs() <= p.half_length)
}

/// Solves the nodal mixed BVP on one shifted grid: Dirichlet rows pin u_i,
/// Robin rows read (L u)_i + q u_i = rhs, Neumann rows (L u)_i = rhs.  The
/// per-node right hand sides come from `data`, which sees the owning patch
/// (or none).
fn solve_nodal_bvp<F>(
    scene: &Scene,
    cfg: &CollocationConfig,
    offset: usize,
    l: &DMatrix<f64>,
    data: F,
) -> Result<Vec<f64>>
where
    F: Fn(Option<usize>) -> f64,
{
    let n = cfg.nodes;
    let mut a = l.clone();
    let mut rhs = DVector::zeros(n);
    for i in 0..n {
        let th = cfg.node_angle(i, offset);
        let owner = patch_at(scene, th);
        match owner.map(|j| scene.patches()[j].condition) {
            Some(PatchCondition::Dirichlet) => {
                for k in 0..n {
                    a[(i, k)] = 0.0;
                }
                a[(i, i)] = 1.0;
            }
            Some(PatchCondition::Robin { q }) => {
                a[(i, i)] += q;
            }
            Some(PatchCondition::Steklov) => {
                return Err(Error::Unsupported(
                    "Steklov patches belong to collocation_steklov".into(),
                ))
            }
            None => {}
        }
        rhs[i] = data(owner);
    }
    // optional ridge keeps near-degenerate layouts solvable
    if cfg.ridge > 0.0 {
        for k in 0..n {
            a[(k, k)] += cfg.ridge;
        }
    }
    let u = a.lu().solve(&rhs).ok_or(Error::CollocationResolution)?;
    Ok(u.iter().copied().collect())
}

/// Offset-averaged boundary solve: runs the nodal BVP on each shifted grid
/// and averages the Fourier coefficients of the traces.
fn solve_bvp_averaged<F>(
    scene: &Scene,
    cfg: &CollocationConfig,
    particular: f64,
    data: F,
) -> Result<CollocationField>
where
    F: Fn(Option<usize>) -> f64 + Copy,
{
    let l = dtn_matrix(cfg.nodes);
    let mut acc: Option<CollocationField> = None;
    for offset in 0..cfg.offsets {
        let values = solve_nodal_bvp(scene, cfg, offset, &l, data)?;
        let f = field_from_nodes(&values, cfg, offset, particular);
        acc = Some(match acc {
            None => f,
            Some(mut g) => {
                g.a0 += f.a0;
                for (ga, fa) in g.a.iter_mut().zip(&f.a) {
                    *ga += fa;
                }
                for (gb, fb) in g.b.iter_mut().zip(&f.b) {
                    *gb += fb;
                }
                g
            }
        });
    }
    let mut f = acc.expect("offsets >= 1");
    let w = 1.0 / cfg.offsets as f64;
    f.a0 *= w;
    for v in f.a.iter_mut().chain(f.b.iter_mut()) {
        *v *= w;
    }
    Ok(f)
}

/// Fourier coefficients of the nodal boundary trace; the harmonic
/// extension into the disk is then evaluated mode by mode.
fn field_from_nodes(
    values: &[f64],
    cfg: &CollocationConfig,
    offset: usize,
    particular: f64,
) -> CollocationField {
    let n = values.len();
    let mmax = cfg.harmonics.min(n / 2 - 1);
    let a0 = values.iter().sum::<f64>() / n as f64;
    let mut a = Vec::with_capacity(mmax);
    let mut b = Vec::with_capacity(mmax);
    for m in 1..=mmax {
        let mut ca = 0.0;
        let mut cb = 0.0;
        for (i, &u) in values.iter().enumerate() {
            let th = cfg.node_angle(i, offset);
            ca += u * (m as f64 * th).cos();
            cb += u * (m as f64 * th).sin();
        }
        a.push(2.0 * ca / n as f64);
        b.push(2.0 * cb / n as f64);
    }
    CollocationField {
        a0,
        a,
        b,
        particular,
    }
}

/// Splitting probability toward patch `k` by boundary collocation.
/// Returns the volume-averaged probability and the field.
pub fn collocation_splitting(
    scene: &Scene,
    k: usize,
    cfg: &CollocationConfig,
) -> Result<(f64, CollocationField)> {
    require_unit_disk(scene)?;
    cfg.validate()?;
    if k >= scene.len() {
        return Err(Error::InvalidArgument("target index out of range".into()));
    }
    let field = solve_bvp_averaged(scene, cfg, 0.0, |owner| match owner {
        Some(j) if j == k => match scene.patches()[j].condition {
            PatchCondition::Dirichlet => 1.0,
            PatchCondition::Robin { q } => q,
            PatchCondition::Steklov => 0.0,
        },
        _ => 0.0,
    })?;
    Ok((field.volume_average(), field))
}

/// Mean first-reaction time by boundary collocation: u = -r^2/4 + harmonic
/// (u_p(1) = -1/4 and its radial derivative is -1/2 on the circle).
/// Returns the volume-averaged MFRT and the field.
pub fn collocation_mfrt(
    scene: &Scene,
    cfg: &CollocationConfig,
) -> Result<(f64, CollocationField)> {
    require_unit_disk(scene)?;
    cfg.validate()?;
    let field = solve_bvp_averaged(scene, cfg, -0.25, |owner| match owner {
        Some(j) => match scene.patches()[j].condition {
            PatchCondition::Dirichlet => 0.25,
            PatchCondition::Robin { q } => 0.5 + 0.25 * q,
            PatchCondition::Steklov => 0.0,
        },
        None => 0.5,
    })?;
    Ok((field.volume_average(), field))
}

/// Eigenpairs of a mixed Steklov problem on the unit disk from the nodal
/// DtN reduction.
#[derive(Debug, Clone)]
pub struct SteklovOracle {
    sigmas: Vec<f64>,
    /// Node angles of the boundary grid.
    thetas: Vec<f64>,
    /// Nodal boundary traces, one row per returned mode, L2-normalized
    /// over the Steklov arcs.
    traces: Vec<Vec<f64>>,
}

impl SteklovOracle {
    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }

    pub fn sigma(&self, j: usize) -> f64 {
        self.sigmas[j]
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn trace(&self, j: usize) -> &[f64] {
        &self.traces[j]
    }

    /// Trigonometric interpolation of the boundary trace of mode `j` at an
    /// arbitrary angle.
    pub fn trace_at(&self, j: usize, th: f64) -> f64 {
        let n = self.thetas.len() as f64;
        let mut v = 0.0;
        for (u, &ti) in self.traces[j].iter().zip(&self.thetas) {
            let d = wrap_angle(th - ti);
            let w = if d.abs() < 1e-9 {
                1.0
            } else {
                (n * d / 2.0).sin() / (d / 2.0).tan() / n
            };
            v += u * w;
        }
        v
    }
}

/// Nodal DtN matrix of the unit disk on `n` uniform nodes: a symmetric
/// circulant with symbol |m| under trigonometric interpolation.
fn dtn_matrix(n: usize) -> DMatrix<f64> {
    let half = n / 2;
    let mut first = vec![0.0; n];
    for (k, f) in first.iter_mut().enumerate() {
        let mut s = 0.0;
        for m in 1..half {
            s += 2.0 * m as f64 * (2.0 * PI * (m * k) as f64 / n as f64).cos();
        }
        if n % 2 == 0 {
            s += half as f64 * (PI * k as f64).cos();
        }
        *f = s / n as f64;
    }
    DMatrix::from_fn(n, n, |i, j| first[(n + i - j) % n])
}

/// Mixed Steklov(-Neumann-Dirichlet) eigenvalues and boundary traces on the
/// unit disk: the `count` smallest eigenpairs.  Eigenvalues are averaged
/// over the shifted grids; the traces come from the first grid.
pub fn collocation_steklov(
    scene: &Scene,
    count: usize,
    cfg: &CollocationConfig,
) -> Result<SteklovOracle> {
    require_unit_disk(scene)?;
    if cfg.offsets == 0 {
        return Err(Error::InvalidArgument("offsets must be >= 1".into()));
    }
    let l = dtn_matrix(cfg.nodes);
    let mut avg: Vec<f64> = Vec::new();
    let mut first: Option<SteklovOracle> = None;
    for offset in 0..cfg.offsets {
        let oracle = steklov_single_grid(scene, count, cfg, offset, &l)?;
        if avg.is_empty() {
            avg = oracle.sigmas.clone();
        } else {
            if oracle.sigmas.len() != avg.len() {
                return Err(Error::CollocationResolution);
            }
            for (a, s) in avg.iter_mut().zip(&oracle.sigmas) {
                *a += s;
            }
        }
        if first.is_none() {
            first = Some(oracle);
        }
    }
    let mut oracle = first.expect("offsets >= 1");
    for (s, a) in oracle.sigmas.iter_mut().zip(&avg) {
        *s = a / cfg.offsets as f64;
    }
    Ok(oracle)
}

fn steklov_single_grid(
    scene: &Scene,
    count: usize,
    cfg: &CollocationConfig,
    offset: usize,
    l: &DMatrix<f64>,
) -> Result<SteklovOracle> {
    let n = cfg.nodes;
    let thetas: Vec<f64> = (0..n).map(|i| cfg.node_angle(i, offset)).collect();
    let mut steklov = Vec::new();
    let mut neumann = Vec::new();
    let mut dirichlet = Vec::new();
    for (i, &th) in thetas.iter().enumerate() {
        match patch_at(scene, th) {
            Some(j) => match scene.patches()[j].condition {
                PatchCondition::Steklov => steklov.push(i),
                PatchCondition::Dirichlet => dirichlet.push(i),
                PatchCondition::Robin { .. } => {
                    return Err(Error::Unsupported(
                        "Robin patches are not part of the Steklov oracle".into(),
                    ))
                }
            },
            None => neumann.push(i),
        }
    }
    if steklov.is_empty() {
        return Err(Error::InvalidArgument(
            "no Steklov nodes; enlarge the grid or the patch".into(),
        ));
    }
    let pick = |rows: &[usize], cols: &[usize]| {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| l[(rows[i], cols[j])])
    };
    let l_ss = pick(&steklov, &steklov);
    let t = if neumann.is_empty() {
        l_ss
    } else {
        let l_nn = pick(&neumann, &neumann);
        let l_ns = pick(&neumann, &steklov);
        let l_sn = pick(&steklov, &neumann);
        let solved = l_nn
            .clone()
            .cholesky()
            .map(|ch| ch.solve(&l_ns))
            .or_else(|| l_nn.lu().solve(&l_ns))
            .ok_or(Error::CollocationResolution)?;
        &l_ss - l_sn * solved
    };
    // Symmetrize against roundoff before the eigensolve.
    let ns = steklov.len();
    let t = DMatrix::from_fn(ns, ns, |i, j| 0.5 * (t[(i, j)] + t[(j, i)]));
    let eig = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..ns).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let count = count.min(ns);

    // Recover the Neumann-node values for the returned traces.
    let l_nn_chol = if neumann.is_empty() {
        None
    } else {
        Some(
            pick(&neumann, &neumann)
                .cholesky()
                .ok_or(Error::CollocationResolution)?,
        )
    };
    let l_ns = pick(&neumann, &steklov);

    let ds = 2.0 * PI / n as f64;
    let mut sigmas = Vec::with_capacity(count);
    let mut traces = Vec::with_capacity(count);
    for &idx in order.iter().take(count) {
        sigmas.push(eig.eigenvalues[idx]);
        let v = eig.eigenvectors.column(idx);
        let mut full = vec![0.0; n];
        for (si, &node) in steklov.iter().enumerate() {
            full[node] = v[si];
        }
        if let Some(ch) = &l_nn_chol {
            let vn = -ch.solve(&(&l_ns * DVector::from_column_slice(v.as_slice())));
            for (ni, &node) in neumann.iter().enumerate() {
                full[node] = vn[ni];
            }
        }
        // Dirichlet nodes stay zero.  Normalize over the Steklov arcs.
        let norm2: f64 = steklov.iter().map(|&i| full[i] * full[i]).sum::<f64>() * ds;
        let scale = 1.0 / norm2.sqrt();
        for u in full.iter_mut() {
            *u *= scale;
        }
        traces.push(full);
    }
    Ok(SteklovOracle {
        sigmas,
        thetas,
        traces,
    })
}

/// Concentric-annulus variant: Steklov on the outer unit circle, Dirichlet
/// on the inner circle of radius `inner_radius`.  The DtN symbol is exact,
/// so the returned eigenvalues are exact up to the harmonic cutoff.
pub fn collocation_steklov_annulus(
    inner_radius: f64,
    count: usize,
    cfg: &CollocationConfig,
) -> Result<Vec<f64>> {
    if !(inner_radius > 0.0 && inner_radius < 1.0) {
        return Err(Error::InvalidArgument(
            "annulus needs 0 < inner radius < 1".into(),
        ));
    }
    let mut sigmas = vec![1.0 / (1.0 / inner_radius).ln()];
    for m in 1..=cfg.harmonics {
        let rm = inner_radius.powi(2 * m as i32);
        let s = m as f64 * (1.0 + rm) / (1.0 - rm);
        sigmas.push(s);
        sigmas.push(s);
    }
    sigmas.sort_by(f64::total_cmp);
    sigmas.truncate(count);
    Ok(sigmas)
}

/// Principal eigenvalue of the interior Steklov-Neumann-Dirichlet problem
/// with two circular holes in the unit disk, by a fundamental-solutions
/// collocation and a smallest-singular-value scan in sigma.
///
/// `bracket` must enclose exactly one eigenvalue; the asymptotic estimate
/// times (0.5, 2) is a good default.
pub fn collocation_interior_snd(
    steklov_center: Point,
    steklov_radius: f64,
    dirichlet_center: Point,
    dirichlet_radius: f64,
    bracket: (f64, f64),
    cfg: &CollocationConfig,
) -> Result<f64> {
    let mharm = cfg.harmonics.min(24);
    let n_outer = 8 * mharm;
    let n_hole = 8 * mharm;

    // Unknowns: a0; r^m cos/sin (regular part, m <= mharm); per hole:
    // ln rho_j and rho_j^-m cos/sin of the local angle (m <= mharm).
    let unknowns = 1 + 2 * mharm + 2 * (1 + 2 * mharm);
    let holes = [
        (steklov_center, steklov_radius),
        (dirichlet_center, dirichlet_radius),
    ];

    let fill_row = |x: Point, normal: Option<Point>| -> (Vec<f64>, Vec<f64>) {
        // returns (u row, dn row); dn row only valid when normal given
        let mut u = Vec::with_capacity(unknowns);
        let mut dn = Vec::with_capacity(unknowns);
        let nrm = normal.unwrap_or([0.0, 0.0]);
        let r = norm(x);
        let th = x[1].atan2(x[0]);
        u.push(1.0);
        dn.push(0.0);
        for m in 1..=mharm {
            let mf = m as f64;
            let rm = r.powi(m as i32 - 1);
            let (c, s) = ((mf * th).cos(), (mf * th).sin());
            u.push(rm * r * c);
            u.push(rm * r * s);
            // gradients of Re/Im z^m from the complex derivative m z^(m-1)
            let a1 = ((mf - 1.0) * th).cos();
            let b1 = ((mf - 1.0) * th).sin();
            let gx = mf * rm * a1;
            let gy = -mf * rm * b1;
            dn.push(gx * nrm[0] + gy * nrm[1]);
            let gx_im = mf * rm * b1;
            let gy_im = mf * rm * a1;
            dn.push(gx_im * nrm[0] + gy_im * nrm[1]);
        }
        for (cc, _rad) in holes {
            let dx = [x[0] - cc[0], x[1] - cc[1]];
            let rho = norm(dx);
            let phi = dx[1].atan2(dx[0]);
            u.push(rho.ln());
            dn.push((dx[0] * nrm[0] + dx[1] * nrm[1]) / (rho * rho));
            for m in 1..=mharm {
                let mf = m as f64;
                let rm = rho.powi(-(m as i32) - 1);
                let (c, s) = ((mf * phi).cos(), (mf * phi).sin());
                u.push(rm * rho * c);
                u.push(rm * rho * s);
                // grad(rho^-m cos m phi) = -m rho^-(m+1) (cos((m+1)phi), -sin((m+1)phi)) style
                let a1 = ((mf + 1.0) * phi).cos();
                let b1 = ((mf + 1.0) * phi).sin();
                let gx = -mf * rm * a1;
                let gy = -mf * rm * b1;
                dn.push(gx * nrm[0] + gy * nrm[1]);
                let gx_im = -mf * rm * b1;
                let gy_im = mf * rm * a1;
                dn.push(gx_im * nrm[0] + gy_im * nrm[1]);
            }
        }
        (u, dn)
    };

    let assemble = |sigma: f64| -> DMatrix<f64> {
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n_outer + 2 * n_hole);
        for i in 0..n_outer {
            let th = 2.0 * PI * (i as f64 + 0.5) / n_outer as f64;
            let x = [th.cos(), th.sin()];
            let (_, dn) = fill_row(x, Some(x));
            rows.push(dn);
        }
        for (hi, (cc, rad)) in holes.iter().enumerate() {
            for i in 0..n_hole {
                let phi = 2.0 * PI * (i as f64 + 0.5) / n_hole as f64;
                let x = [cc[0] + rad * phi.cos(), cc[1] + rad * phi.sin()];
                // outward normal of the fluid domain points into the hole
                let nrm = [-phi.cos(), -phi.sin()];
                let (u, dn) = fill_row(x, Some(nrm));
                if hi == 0 {
                    rows.push(
                        dn.iter()
                            .zip(&u)
                            .map(|(d, v)| d - sigma * v)
                            .collect(),
                    );
                } else {
                    rows.push(u);
                }
            }
        }
        let mut m = DMatrix::zeros(rows.len(), unknowns);
        for (i, row) in rows.into_iter().enumerate() {
            let scale = row.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
            for (k, v) in row.into_iter().enumerate() {
                m[(i, k)] = v / scale;
            }
        }
        m
    };

    let smallest_sv = |sigma: f64| -> f64 {
        let m = assemble(sigma);
        let svd = m.svd(false, false);
        svd.singular_values
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    };

    // Golden-section minimization of the smallest singular value.
    let (mut a, mut b) = bracket;
    if !(a > 0.0 && b > a) {
        return Err(Error::InvalidArgument("bad sigma bracket".into()));
    }
    let gr = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - gr * (b - a);
    let mut x2 = a + gr * (b - a);
    let mut f1 = smallest_sv(x1);
    let mut f2 = smallest_sv(x2);
    for _ in 0..70 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = smallest_sv(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = smallest_sv(x2);
        }
        if (b - a) < 1e-10 * b {
            break;
        }
    }
    Ok(0.5 * (a + b))
}
