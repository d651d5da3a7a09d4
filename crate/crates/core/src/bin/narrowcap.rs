//! Command-line front end: scene ingestion, one subcommand per solver
//! family, JSON run reports, and CSV field grids.

use clap::{Args, Parser, Subcommand, ValueEnum};
use narrowcap::capture::{eval_splitting_field, solve_mfrt, solve_splitting};
use narrowcap::error::{Error, Result};
use narrowcap::extensions::{interior_snd_principal, interior_splitting, TargetCondition};
use narrowcap::geometry::{Domain, Point};
use narrowcap::halfplane::{CFunction, IntervalSteklovBasis, DEFAULT_K, DEFAULT_M};
use narrowcap::kappa::{kappa_asymptotic, kappa_exact, KappaOrder};
use narrowcap::oracle::{
    collocation_splitting, collocation_steklov, collocation_steklov_annulus, mc_mfpt,
    mc_splitting, CollocationConfig, McConfig,
};
use narrowcap::scenefile::{round_sig, LoadedScene, RunReport, SceneFile};
use narrowcap::steklov::{sn_spectrum, snd_principal};
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "narrowcap",
    about = "Matched-asymptotic solvers for diffusion toward small targets in planar domains",
    version
)]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Basis cache directory (default: the NARROWCAP_CACHE_DIR variable).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Retained eigenpairs of the interval Steklov basis.
    #[arg(long, global = true, default_value_t = DEFAULT_K)]
    basis_k: usize,

    /// Truncation order of the interval Steklov eigenproblem.
    #[arg(long, global = true, default_value_t = DEFAULT_M)]
    basis_m: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GridArgs {
    /// Emit a CSV of field samples on an nx-by-ny grid over the domain
    /// bounding box (empty value outside the domain).
    #[arg(long, num_args = 2, value_names = ["NX", "NY"])]
    grid: Option<Vec<usize>>,

    /// CSV destination for --grid.
    #[arg(long, default_value = "field.csv")]
    grid_out: PathBuf,

    /// Emit the raw outer field instead of capping it to [0, 1].
    #[arg(long)]
    no_cap: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Splitting probability toward one boundary patch.
    Splitting {
        #[arg(long)]
        scene: PathBuf,
        /// Target patch, 1-based.
        #[arg(long)]
        target: usize,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Mean first-reaction time for Dirichlet/Robin patches.
    Mfrt {
        #[arg(long)]
        scene: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Mixed Steklov-Neumann eigenvalues for an all-Steklov scene.
    Sn {
        #[arg(long)]
        scene: PathBuf,
    },
    /// Steklov-Neumann-Dirichlet principal eigenvalue and roots.
    Snd {
        #[arg(long)]
        scene: PathBuf,
        /// Number of interlacing roots to report.
        #[arg(long, default_value_t = 5)]
        roots: usize,
    },
    /// Interval Steklov eigenvalue table.
    Basis {
        #[arg(long, default_value_t = 21)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        m: usize,
    },
    /// The constant-term function C(mu).
    Cfun {
        /// Single evaluation point.
        #[arg(long, conflicts_with_all = ["from", "to"], allow_negative_numbers = true)]
        mu: Option<f64>,
        #[arg(long, requires = "to", allow_negative_numbers = true)]
        from: Option<f64>,
        #[arg(long, requires = "from", allow_negative_numbers = true)]
        to: Option<f64>,
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// Disable the large-k tail correction.
        #[arg(long)]
        no_tail: bool,
    },
    /// Circulant eigenvalues kappa_j and their approximations.
    Kappa {
        #[arg(long)]
        n: usize,
        /// Single index; defaults to the full 1..=N/2 table.
        #[arg(long)]
        j: Option<usize>,
        #[arg(long, value_enum, default_value_t = KappaMode::All)]
        mode: KappaMode,
    },
    /// Splitting among interior targets (or the interior SND eigenvalue).
    Interior {
        #[arg(long)]
        scene: PathBuf,
        /// Target index, 1-based; ignored for the SND layout.
        #[arg(long, default_value_t = 1)]
        target: usize,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Splitting on an exterior domain scene.
    Exterior {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        target: usize,
    },
    /// Desk-scale verification oracles.
    Oracle {
        #[arg(long)]
        scene: Option<PathBuf>,
        #[arg(long, value_enum)]
        what: OracleKind,
        #[arg(long, default_value_t = 1)]
        target: usize,
        #[arg(long, default_value_t = 100_000)]
        walkers: usize,
        #[arg(long, default_value_t = 0x6e617272)]
        seed: u64,
        #[arg(long, default_value_t = 2.5e-7)]
        dt: f64,
        #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true)]
        start: Option<Vec<f64>>,
        #[arg(long, default_value_t = 6)]
        modes: usize,
        /// Inner radius for the annulus exact-law check.
        #[arg(long)]
        annulus: Option<f64>,
        #[arg(long, default_value_t = 1024)]
        nodes: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KappaMode {
    Exact,
    Full,
    Cubic,
    Loworder,
    Empirical,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Splitting,
    Mfpt,
    Steklov,
}

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let started = std::time::Instant::now();
    match run(&cli) {
        Ok((outputs, warnings, digest)) => {
            let report = RunReport {
                command: argv,
                inputs_digest: digest,
                outputs: round_value(outputs, 12),
                warnings,
                timing_ms: started.elapsed().as_secs_f64() * 1e3,
            };
            let text = serde_json::to_string_pretty(&report).expect("report serialization");
            match &cli.out {
                Some(path) => std::fs::write(path, text).unwrap_or_else(|e| fail_io(&e)),
                None => println!("{text}"),
            }
        }
        Err(err) => {
            let payload = json!({ "error": { "code": err.code(), "message": err.to_string() } });
            eprintln!("{}", serde_json::to_string_pretty(&payload).unwrap());
            std::process::exit(1);
        }
    }
}

fn fail_io(e: &std::io::Error) -> ! {
    eprintln!("{{\"error\":{{\"code\":\"io\",\"message\":\"{e}\"}}}}");
    std::process::exit(1);
}

type RunOutput = (Value, Vec<String>, String);

fn run(cli: &Cli) -> Result<RunOutput> {
    let cache = cli
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("NARROWCAP_CACHE_DIR").map(PathBuf::from));
    let basis = || -> Result<Arc<IntervalSteklovBasis>> {
        Ok(Arc::new(IntervalSteklovBasis::load_or_build(
            cache.as_deref(),
            cli.basis_k,
            cli.basis_m,
        )?))
    };

    match &cli.command {
        Command::Splitting {
            scene,
            target,
            grid,
        } => {
            let file = SceneFile::load(scene)?;
            let digest = RunReport::digest_of(&file.to_canonical_json());
            let loaded = file.build()?;
            let LoadedScene::Boundary(sc) = loaded else {
                return Err(Error::InvalidArgument(
                    "splitting expects a boundary-patch scene; use the interior subcommand".into(),
                ));
            };
            let k = index_1based(*target, sc.len())?;
            let cfun = CFunction::new(basis()?);
            let sol = solve_splitting(&sc, k, &cfun)?;
            let warnings = sol.warnings().iter().map(|w| w.to_string()).collect();
            if let Some(dims) = &grid.grid {
                write_grid(&grid.grid_out, sc.domain(), dims[0], dims[1], |x| {
                    eval_splitting_field(&sol, x, !grid.no_cap)
                        .ok()
                        .map(|(v, _)| v)
                })?;
            }
            let outputs = json!({
                "target": target,
                "chi": sol.chi(),
                "coefficients": sol.coefficients().iter().copied().collect::<Vec<f64>>(),
            });
            Ok((outputs, warnings, digest))
        }
        Command::Mfrt { scene, grid } => {
            let file = SceneFile::load(scene)?;
            let digest = RunReport::digest_of(&file.to_canonical_json());
            let LoadedScene::Boundary(sc) = file.build()? else {
                return Err(Error::InvalidArgument(
                    "mfrt expects a boundary-patch scene".into(),
                ));
            };
            let cfun = CFunction::new(basis()?);
            let sol = solve_mfrt(&sc, &cfun)?;
            let warnings = sol.warnings().iter().map(|w| w.to_string()).collect();
            if let Some(dims) = &grid.grid {
                write_grid(&grid.grid_out, sc.domain(), dims[0], dims[1], |x| {
                    sol.field(x).ok()
                })?;
            }
            let outputs = json!({
                "u0": sol.u0(),
                "coefficients": sol.coefficients().iter().copied().collect::<Vec<f64>>(),
            });
            Ok((outputs, warnings, digest))
        }
        Command::Sn { scene } => {
            let file = SceneFile::load(scene)?;
            let digest = RunReport::digest_of(&file.to_canonical_json());
            let LoadedScene::Boundary(sc) = file.build()? else {
                return Err(Error::InvalidArgument("sn expects a boundary scene".into()));
            };
            let b = basis()?;
            let spec = sn_spectrum(&sc, &b)?;
            let warnings = spec.warnings().iter().map(|w| w.to_string()).collect();
            let coeffs: Vec<Vec<f64>> = (0..spec.len())
                .map(|j| spec.coefficients(j).iter().copied().collect())
                .collect();
            Ok((
                json!({ "sigma": spec.sigmas(), "coefficients": coeffs }),
                warnings,
                digest,
            ))
        }
        Command::Snd { scene, roots } => {
            let file = SceneFile::load(scene)?;
            let digest = RunReport::digest_of(&file.to_canonical_json());
            let LoadedScene::Boundary(sc) = file.build()? else {
                return Err(Error::InvalidArgument("snd expects a boundary scene".into()));
            };
            let cfun = CFunction::new(basis()?);
            let mut r = snd_principal(&sc, &cfun)?;
            r.mu_hat.truncate(*roots);
            let warnings = r.warnings.iter().map(|w| w.to_string()).collect();
            let eps1 = sc.patches()[0].half_length;
            Ok((
                json!({
                    "constant_c": r.c,
                    "sigma0": r.sigma0,
                    "inv_eps1_sigma0": 1.0 / (eps1 * r.sigma0),
                    "mu_hat": r.mu_hat,
                    "higher_sigma": r.higher,
                    "coefficients": r.a.iter().copied().collect::<Vec<f64>>(),
                }),
                warnings,
                digest,
            ))
        }
        Command::Basis { k, m } => {
            let b = IntervalSteklovBasis::load_or_build(cache.as_deref(), *k, *m)?;
            let digest = RunReport::digest_of(&format!("basis K={k} M={m}"));
            let rows: Vec<Value> = (0..b.len())
                .map(|i| {
                    json!({
                        "k": i,
                        "mu": b.mu(i),
                        "psi_inf_sq": b.psi_inf(i) * b.psi_inf(i),
                        "parity": if i % 2 == 0 { "even" } else { "odd" },
                    })
                })
                .collect();
            Ok((json!({ "K": k, "M": m, "modes": rows }), vec![], digest))
        }
        Command::Cfun {
            mu,
            from,
            to,
            points,
            no_tail,
        } => {
            let b = basis()?;
            let cfun = CFunction::with_tail(b, !*no_tail);
            let digest = RunReport::digest_of(&format!("cfun {mu:?} {from:?} {to:?} {points}"));
            let eval_points: Vec<f64> = match (mu, from, to) {
                (Some(m), _, _) => vec![*m],
                (None, Some(a), Some(b)) => {
                    if *points < 2 {
                        return Err(Error::InvalidArgument("need at least 2 points".into()));
                    }
                    (0..*points)
                        .map(|i| a + (b - a) * i as f64 / (*points as f64 - 1.0))
                        .collect()
                }
                _ => {
                    return Err(Error::InvalidArgument(
                        "give either --mu or --from/--to".into(),
                    ))
                }
            };
            let values: Vec<Value> = eval_points
                .iter()
                .map(|&m| match cfun.eval(m) {
                    Ok(v) => json!({ "mu": m, "c": v }),
                    Err(e) => json!({ "mu": m, "error": e.code() }),
                })
                .collect();
            Ok((
                json!({ "tail": !*no_tail, "values": values, "poles": cfun.pole_mus() }),
                vec![],
                digest,
            ))
        }
        Command::Kappa { n, j, mode } => {
            let digest = RunReport::digest_of(&format!("kappa {n} {j:?}"));
            let indices: Vec<usize> = match j {
                Some(j) => vec![*j],
                None => (1..=*n / 2).collect(),
            };
            let mut warnings = Vec::new();
            if *n < 8 {
                warnings.push(format!("asymptotic kappa formulas assume N >= 8, got {n}"));
            }
            let rows: Vec<Value> = indices
                .iter()
                .map(|&jj| kappa_row(*n, jj, *mode))
                .collect();
            Ok((json!({ "n": n, "rows": rows }), warnings, digest))
        }
        Command::Interior {
            scene,
            target,
            grid,
        } => {
            let file = SceneFile::load(scene)?;
            let digest = RunReport::digest_of(&file.to_canonical_json());
            let LoadedScene::Interior { domain, targets } = file.build()? else {
                return Err(Error::InvalidArgument(
                    "interior expects a scene with targets".into(),
                ));
            };
            // SND layout: one Steklov disk plus one Dirichlet target.
            if targets.len() == 2 && targets[0].condition == TargetCondition::Steklov {
                let sigma0 = interior_snd_principal(&domain, &targets[0], &targets[1])?;
                return Ok((
                    json!({ "sigma0": sigma0,
                            "inv_eps1_sigma0": 1.0 / (targets[0].eps * sigma0) }),
                    vec![],
                    digest,
                ));
            }
            let k = index_1based(*target, targets.len())?;
            let sol = interior_splitting(&domain, &targets, k)?;
            let warnings = sol.warnings().iter().map(|w| w.to_string()).collect();
            if let Some(dims) = &grid.grid {
                write_grid(&grid.grid_out, &domain, dims[0], dims[1], |x| {
                    sol.field(x, !grid.no_cap).ok()
                })?;
            }
            Ok((
                json!({
                    "target": target,
                    "chi": sol.chi(),
                    "coefficients": sol.coefficients().iter().copied().collect::<Vec<f64>>(),
                }),
                warnings,
                digest,
            ))
        }
        Command::Exterior { scene, target } => {
            let file = SceneFile::load(scene)?;
            let digest = RunReport::digest_of(&file.to_canonical_json());
            let LoadedScene::Boundary(sc) = file.build()? else {
                return Err(Error::InvalidArgument(
                    "exterior expects a boundary scene on an exterior domain".into(),
                ));
            };
            if !sc.domain().kind().is_exterior() {
                return Err(Error::InvalidArgument(
                    "exterior expects domain kind disk-exterior or ellipse-exterior".into(),
                ));
            }
            let k = index_1based(*target, sc.len())?;
            let cfun = CFunction::new(basis()?);
            let sol = solve_splitting(&sc, k, &cfun)?;
            let warnings = sol.warnings().iter().map(|w| w.to_string()).collect();
            Ok((
                json!({
                    "target": target,
                    "chi": sol.chi(),
                    "coefficients": sol.coefficients().iter().copied().collect::<Vec<f64>>(),
                }),
                warnings,
                digest,
            ))
        }
        Command::Oracle {
            scene,
            what,
            target,
            walkers,
            seed,
            dt,
            start,
            modes,
            annulus,
            nodes,
        } => {
            if let Some(inner) = annulus {
                let cfg = CollocationConfig::default();
                let sigmas = collocation_steklov_annulus(*inner, *modes, &cfg)?;
                let digest = RunReport::digest_of(&format!("annulus {inner}"));
                return Ok((json!({ "sigma": sigmas }), vec![], digest));
            }
            let path = scene.as_ref().ok_or_else(|| {
                Error::InvalidArgument("oracle needs --scene (or --annulus)".into())
            })?;
            let file = SceneFile::load(path)?;
            let digest = RunReport::digest_of(&file.to_canonical_json());
            let LoadedScene::Boundary(sc) = file.build()? else {
                return Err(Error::InvalidArgument(
                    "the oracles cover boundary scenes on the unit disk".into(),
                ));
            };
            match what {
                OracleKind::Splitting => {
                    let k = index_1based(*target, sc.len())?;
                    let s = parse_start(start)?.unwrap_or([0.0, 0.0]);
                    let cfg = McConfig {
                        walkers: *walkers,
                        seed: *seed,
                        dt: *dt,
                        ..McConfig::default()
                    };
                    let mc = mc_splitting(&sc, k, s, &cfg)?;
                    let coll = collocation_splitting(
                        &sc,
                        k,
                        &CollocationConfig {
                            nodes: *nodes,
                            ..CollocationConfig::default()
                        },
                    )?;
                    Ok((
                        json!({
                            "mc": { "mean": mc.mean, "stderr": mc.stderr,
                                    "samples": mc.samples, "start": s },
                            "collocation_chi": coll.0,
                        }),
                        vec![],
                        digest,
                    ))
                }
                OracleKind::Mfpt => {
                    let cfg = McConfig {
                        walkers: *walkers,
                        seed: *seed,
                        dt: *dt,
                        ..McConfig::default()
                    };
                    let mc = mc_mfpt(&sc, parse_start(start)?, &cfg)?;
                    Ok((
                        json!({ "mean": mc.mean, "stderr": mc.stderr, "samples": mc.samples }),
                        vec![],
                        digest,
                    ))
                }
                OracleKind::Steklov => {
                    let oracle = collocation_steklov(
                        &sc,
                        *modes,
                        &CollocationConfig {
                            nodes: *nodes,
                            ..CollocationConfig::default()
                        },
                    )?;
                    Ok((json!({ "sigma": oracle.sigmas() }), vec![], digest))
                }
            }
        }
    }
}

fn kappa_row(n: usize, j: usize, mode: KappaMode) -> Value {
    let mut row = serde_json::Map::new();
    row.insert("j".into(), json!(j));
    let asym_ok = j >= 1 && 2 * j <= n;
    let put_asym = |row: &mut serde_json::Map<String, Value>, name: &str, ord: KappaOrder| {
        if asym_ok {
            row.insert(name.into(), json!(kappa_asymptotic(n, j, ord)));
        }
    };
    match mode {
        KappaMode::Exact => {
            row.insert("exact".into(), json!(kappa_exact(n, j)));
        }
        KappaMode::Full => put_asym(&mut row, "full", KappaOrder::Full),
        KappaMode::Cubic => put_asym(&mut row, "cubic", KappaOrder::Cubic),
        KappaMode::Loworder => put_asym(&mut row, "loworder", KappaOrder::LowOrder),
        KappaMode::Empirical => put_asym(&mut row, "empirical", KappaOrder::Empirical),
        KappaMode::All => {
            row.insert("exact".into(), json!(kappa_exact(n, j)));
            put_asym(&mut row, "full", KappaOrder::Full);
            put_asym(&mut row, "cubic", KappaOrder::Cubic);
            put_asym(&mut row, "loworder", KappaOrder::LowOrder);
            put_asym(&mut row, "empirical", KappaOrder::Empirical);
        }
    }
    Value::Object(row)
}

fn index_1based(target: usize, len: usize) -> Result<usize> {
    if target == 0 || target > len {
        return Err(Error::InvalidArgument(format!(
            "target {target} out of 1..={len}"
        )));
    }
    Ok(target - 1)
}

fn parse_start(start: &Option<Vec<f64>>) -> Result<Option<Point>> {
    match start {
        None => Ok(None),
        Some(v) if v.len() == 2 => Ok(Some([v[0], v[1]])),
        _ => Err(Error::InvalidArgument("--start takes X Y".into())),
    }
}

/// Writes the row-major CSV grid over the domain bounding box.
fn write_grid<F>(path: &PathBuf, domain: &Domain, nx: usize, ny: usize, f: F) -> Result<()>
where
    F: Fn(Point) -> Option<f64>,
{
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidArgument("grid needs nx, ny >= 2".into()));
    }
    let (a, b) = domain.semiaxes();
    let (half_x, half_y) = if domain.kind().is_exterior() {
        (2.0 * a, 2.0 * a.max(b))
    } else {
        (a, b)
    };
    let mut out = String::from("x,y,value\n");
    for iy in 0..ny {
        let y = -half_y + 2.0 * half_y * iy as f64 / (ny as f64 - 1.0);
        for ix in 0..nx {
            let x = -half_x + 2.0 * half_x * ix as f64 / (nx as f64 - 1.0);
            let val = if domain.contains([x, y]) { f([x, y]) } else { None };
            match val {
                Some(v) => out.push_str(&format!(
                    "{},{},{}\n",
                    round_sig(x, 9),
                    round_sig(y, 9),
                    round_sig(v, 9)
                )),
                None => out.push_str(&format!("{},{},\n", round_sig(x, 9), round_sig(y, 9))),
            }
        }
    }
    let mut fh = std::fs::File::create(path)?;
    fh.write_all(out.as_bytes())?;
    Ok(())
}

/// Rounds every number in the report to the given significant digits.
fn round_value(v: Value, digits: i32) -> Value {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(f) = n.as_f64() {
                    return serde_json::Number::from_f64(round_sig(f, digits))
                        .map(Value::Number)
                        .unwrap_or(Value::Null);
                }
            }
            Value::Number(n)
        }
        Value::Array(items) => {
            Value::Array(items.into_iter().map(|x| round_value(x, digits)).collect())
        }
        Value::Object(map) => Value::Object(
            map.into_iter()
                .map(|(k, x)| (k, round_value(x, digits)))
                .collect(),
        ),
        other => other,
    }
}
