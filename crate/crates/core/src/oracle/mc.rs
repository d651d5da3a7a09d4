//! Monte Carlo reflected-random-walk estimator for splitting probabilities
//! and mean first-passage times on the unit disk.
//!
//! Walkers take Gaussian increments with a step size that shrinks
//! quadratically near boundaries: the base step `dt` applies within the
//! absorbing layers, a 100x coarser cap near the reflecting circle, and a
//! 2500x cap in the bulk, so halving `dt` halves every layer consistently.
//! Reflection is specular at the circle; absorption is detected on the
//! linearly interpolated boundary crossing of each step.

use crate::capture::{PatchCondition, Scene};
use crate::error::{Error, Result};
use crate::extensions::{InteriorTargetSpec, TargetCondition};
use crate::geometry::{norm, Domain, DomainKind, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Monte Carlo walker configuration.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub walkers: usize,
    /// Base time step inside the absorbing layers; the adaptive scheme
    /// grows it quadratically with the distance to the nearest feature.
    pub dt: f64,
    /// When false, every step uses `dt` (used by bias-control tests).
    pub adaptive: bool,
    pub seed: u64,
    /// Per-walker step budget before the run aborts with diagnostics.
    pub max_steps: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            walkers: 100_000,
            dt: 2.5e-7,
            adaptive: true,
            seed: 0x6e61_7272,
            max_steps: 20_000_000,
        }
    }
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        if self.walkers < 1_000 {
            return Err(Error::InvalidArgument(
                "Monte Carlo needs at least 1000 walkers".into(),
            ));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument("dt must be positive".into()));
        }
        Ok(())
    }
}

/// Sample estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

#[derive(Debug, Clone)]
struct Arc {
    center_angle: f64,
    half_length: f64,
}

#[derive(Debug, Clone)]
struct Circle {
    center: Point,
    radius: f64,
}

/// Internal walk geometry: absorbing arcs on the unit circle plus interior
/// absorbing circles.
#[derive(Debug, Clone)]
struct WalkGeometry {
    arcs: Vec<Arc>,
    circles: Vec<Circle>,
}

impl WalkGeometry {
    fn distance_to_absorbers(&self, x: Point) -> f64 {
        let r = norm(x);
        let mut d = f64::INFINITY;
        for arc in &self.arcs {
            let dth = wrap(x[1].atan2(x[0]) - arc.center_angle).abs();
            let da = if dth <= arc.half_length {
                1.0 - r
            } else {
                // distance to the nearer arc endpoint
                let end = arc.center_angle
                    + arc.half_length * (wrap(x[1].atan2(x[0]) - arc.center_angle)).signum();
                let p = [end.cos(), end.sin()];
                ((x[0] - p[0]).powi(2) + (x[1] - p[1]).powi(2)).sqrt()
            };
            d = d.min(da);
        }
        for c in &self.circles {
            let dc = ((x[0] - c.center[0]).powi(2) + (x[1] - c.center[1]).powi(2)).sqrt()
                - c.radius;
            d = d.min(dc);
        }
        d
    }

    /// Index of the arc containing boundary angle `th`, offset by the
    /// number of interior circles.
    fn arc_hit(&self, th: f64) -> Option<usize> {
        self.arcs
            .iter()
            .position(|a| wrap(th - a.center_angle).abs() <= a.half_length)
            .map(|i| i + self.circles.len())
    }
}

fn wrap(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    }
    if d < -PI {
        d += 2.0 * PI;
    }
    d
}

enum StepOutcome {
    Alive(Point),
    Absorbed { target: usize, fraction: f64 },
}

/// One Gaussian step with crossing detection: interior circles first (the
/// earliest crossing wins), then the unit circle with absorption on arcs or
/// specular reflection elsewhere.  `fraction` is the cumulative share of
/// the step consumed before absorption, across reflections.
fn advance(geom: &WalkGeometry, x: Point, step: Point) -> StepOutcome {
    let mut from = x;
    let mut delta = step;
    let mut consumed = 0.0;
    let mut remaining = 1.0;
    for _ in 0..32 {
        // earliest interior-circle crossing along [from, from + delta]
        let mut hit: Option<(f64, usize)> = None;
        for (ci, c) in geom.circles.iter().enumerate() {
            if let Some(t) = segment_circle_entry(from, delta, c.center, c.radius) {
                if hit.map_or(true, |(tb, _)| t < tb) {
                    hit = Some((t, ci));
                }
            }
        }
        let t_outer = segment_circle_exit(from, delta);
        let circle_first = match (hit, t_outer) {
            (Some((t, _)), Some(tw)) => t <= tw,
            (Some(_), None) => true,
            _ => false,
        };
        if circle_first {
            let (t, ci) = hit.unwrap();
            return StepOutcome::Absorbed {
                target: ci,
                fraction: consumed + remaining * t,
            };
        }
        match t_outer {
            Some(t) => {
                let p = [from[0] + t * delta[0], from[1] + t * delta[1]];
                let th = p[1].atan2(p[0]);
                if let Some(arc_idx) = geom.arc_hit(th) {
                    return StepOutcome::Absorbed {
                        target: arc_idx,
                        fraction: consumed + remaining * t,
                    };
                }
                // specular reflection of the remaining displacement
                consumed += remaining * t;
                remaining *= 1.0 - t;
                let rest = [(1.0 - t) * delta[0], (1.0 - t) * delta[1]];
                let nlen = norm(p).max(1e-300);
                let n = [p[0] / nlen, p[1] / nlen];
                let dot = rest[0] * n[0] + rest[1] * n[1];
                delta = [rest[0] - 2.0 * dot * n[0], rest[1] - 2.0 * dot * n[1]];
                from = p;
                if delta[0] == 0.0 && delta[1] == 0.0 {
                    break;
                }
            }
            None => {
                return StepOutcome::Alive([from[0] + delta[0], from[1] + delta[1]]);
            }
        }
    }
    // repeated grazing reflections: settle just inside the crossing point
    let r = norm(from).min(1.0 - 1e-12);
    let th = from[1].atan2(from[0]);
    StepOutcome::Alive([r * th.cos(), r * th.sin()])
}

/// Smallest t in (0, 1] with |from + t delta| = 1, if any.
fn segment_circle_exit(from: Point, delta: Point) -> Option<f64> {
    let a = delta[0] * delta[0] + delta[1] * delta[1];
    if a == 0.0 {
        return None;
    }
    let b = 2.0 * (from[0] * delta[0] + from[1] * delta[1]);
    let c = from[0] * from[0] + from[1] * from[1] - 1.0;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let t = (-b + disc.sqrt()) / (2.0 * a);
    (t > 0.0 && t <= 1.0).then_some(t)
}

/// Smallest t in (0, 1] at which the segment enters the circle, if any.
fn segment_circle_entry(from: Point, delta: Point, center: Point, radius: f64) -> Option<f64> {
    let f = [from[0] - center[0], from[1] - center[1]];
    let a = delta[0] * delta[0] + delta[1] * delta[1];
    if a == 0.0 {
        return None;
    }
    let b = 2.0 * (f[0] * delta[0] + f[1] * delta[1]);
    let c = f[0] * f[0] + f[1] * f[1] - radius * radius;
    if c <= 0.0 {
        return Some(0.0); // already inside the absorber
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let t = (-b - disc.sqrt()) / (2.0 * a);
    (t > 0.0 && t <= 1.0).then_some(t)
}

struct WalkResult {
    target: usize,
    time: f64,
}

fn walk(
    geom: &WalkGeometry,
    start: Point,
    cfg: &McConfig,
    rng: &mut ChaCha8Rng,
) -> Option<WalkResult> {
    let mut x = start;
    let mut t = 0.0;
    for _ in 0..cfg.max_steps {
        let dt = if cfg.adaptive {
            // four-sigma margin toward absorbers keeps the probability of
            // hopping across a patch endpoint negligible; the reflecting
            // wall needs less margin but its own floor
            let d_abs = geom.distance_to_absorbers(x).max(0.0);
            let d_wall = (1.0 - norm(x)).max(0.0);
            let dt_abs = (d_abs / 4.0).powi(2) / 2.0;
            let dt_wall = ((d_wall / 2.5).powi(2) / 2.0).max(100.0 * cfg.dt);
            dt_abs.min(dt_wall).clamp(cfg.dt, 2500.0 * cfg.dt)
        } else {
            cfg.dt
        };
        let sigma = (2.0 * dt).sqrt();
        let gx: f64 = rng.sample(StandardNormal);
        let gy: f64 = rng.sample(StandardNormal);
        match advance(geom, x, [sigma * gx, sigma * gy]) {
            StepOutcome::Alive(nx) => {
                x = nx;
                t += dt;
            }
            StepOutcome::Absorbed { target, fraction } => {
                return Some(WalkResult {
                    target,
                    time: t + fraction * dt,
                });
            }
        }
    }
    None
}

const CHUNK: usize = 512;

/// Runs the walkers in deterministic chunks (rayon order-preserving map,
/// per-chunk rng seeded from the config seed) and reduces sequentially.
fn run_walkers<S: Fn(&mut ChaCha8Rng) -> Point + Sync>(
    geom: &WalkGeometry,
    sample_start: S,
    cfg: &McConfig,
) -> Result<Vec<WalkResult>> {
    cfg.validate()?;
    let chunks = cfg.walkers.div_ceil(CHUNK);
    let per_chunk: Vec<Result<Vec<Option<WalkResult>>>> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x9e37 * ci as u64));
            let lo = ci * CHUNK;
            let hi = ((ci + 1) * CHUNK).min(cfg.walkers);
            let mut out = Vec::with_capacity(hi - lo);
            for _ in lo..hi {
                let start = sample_start(&mut rng);
                out.push(walk(geom, start, cfg, &mut rng));
            }
            Ok(out)
        })
        .collect();
    let mut results = Vec::with_capacity(cfg.walkers);
    let mut stuck = 0u64;
    for chunk in per_chunk {
        for r in chunk? {
            match r {
                Some(v) => results.push(v),
                None => stuck += 1,
            }
        }
    }
    if stuck > 0 {
        return Err(Error::McTimeout {
            max_steps: cfg.max_steps,
            stuck,
            total: cfg.walkers as u64,
        });
    }
    Ok(results)
}

fn scene_geometry(scene: &Scene) -> Result<WalkGeometry> {
    if scene.domain().kind() != DomainKind::DiskInterior {
        return Err(Error::Unsupported(
            "the Monte Carlo oracle covers the unit disk only".into(),
        ));
    }
    let arcs = scene
        .patches()
        .iter()
        .map(|p| {
            if p.condition != PatchCondition::Dirichlet {
                return Err(Error::Unsupported(
                    "Monte Carlo walkers handle Dirichlet absorbers only".into(),
                ));
            }
            Ok(Arc {
                center_angle: p.center.param(),
                half_length: p.half_length,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WalkGeometry {
        arcs,
        circles: Vec::new(),
    })
}

fn splitting_estimate(results: &[WalkResult], target: usize) -> Estimate {
    let n = results.len();
    let hits = results.iter().filter(|r| r.target == target).count();
    let p = hits as f64 / n as f64;
    Estimate {
        mean: p,
        stderr: (p * (1.0 - p) / n as f64).sqrt(),
        samples: n,
    }
}

/// Probability that a walker from `start` is absorbed on patch `k` before
/// any other patch.
pub fn mc_splitting(scene: &Scene, k: usize, start: Point, cfg: &McConfig) -> Result<Estimate> {
    let geom = scene_geometry(scene)?;
    if k >= scene.len() {
        return Err(Error::InvalidArgument("target index out of range".into()));
    }
    if !scene.domain().contains(start) {
        return Err(Error::OutsideDomain(start[0], start[1]));
    }
    let results = run_walkers(&geom, |_| start, cfg)?;
    Ok(splitting_estimate(&results, k))
}

/// Splitting probability among interior absorbing disks.
pub fn mc_splitting_interior(
    domain: &Domain,
    targets: &[InteriorTargetSpec],
    k: usize,
    start: Point,
    cfg: &McConfig,
) -> Result<Estimate> {
    if domain.kind() != DomainKind::DiskInterior {
        return Err(Error::Unsupported(
            "the Monte Carlo oracle covers the unit disk only".into(),
        ));
    }
    if k >= targets.len() {
        return Err(Error::InvalidArgument("target index out of range".into()));
    }
    let circles = targets
        .iter()
        .map(|t| {
            if t.condition != TargetCondition::Dirichlet {
                return Err(Error::Unsupported(
                    "Monte Carlo walkers handle Dirichlet absorbers only".into(),
                ));
            }
            Ok(Circle {
                center: t.center,
                radius: t.eps,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let geom = WalkGeometry {
        arcs: Vec::new(),
        circles,
    };
    if !domain.contains(start) || geom.distance_to_absorbers(start) <= 0.0 {
        return Err(Error::OutsideDomain(start[0], start[1]));
    }
    let results = run_walkers(&geom, |_| start, cfg)?;
    Ok(splitting_estimate(&results, k))
}

/// Mean first-passage time to the union of Dirichlet patches, from a fixed
/// start or the uniform distribution over the disk.
pub fn mc_mfpt(scene: &Scene, start: Option<Point>, cfg: &McConfig) -> Result<Estimate> {
    let geom = scene_geometry(scene)?;
    if let Some(s) = start {
        if !scene.domain().contains(s) {
            return Err(Error::OutsideDomain(s[0], s[1]));
        }
    }
    let results = run_walkers(
        &geom,
        |rng| match start {
            Some(s) => s,
            None => {
                let r = rng.gen::<f64>().sqrt();
                let th = 2.0 * PI * rng.gen::<f64>();
                [r * th.cos(), r * th.sin()]
            }
        },
        cfg,
    )?;
    let n = results.len() as f64;
    let mean = results.iter().map(|r| r.time).sum::<f64>() / n;
    let var = results
        .iter()
        .map(|r| (r.time - mean).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    Ok(Estimate {
        mean,
        stderr: (var / n).sqrt(),
        samples: results.len(),
    })
}
