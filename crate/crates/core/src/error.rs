//! Error and warning types shared by all solvers.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    Domain(String),

    #[error("point ({0}, {1}) lies outside the domain closure")]
    OutsideDomain(f64, f64),

    #[error("evaluation at a Green's function singularity: {0}")]
    Singularity(String),

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("patches {0} and {1} overlap on the boundary")]
    OverlappingPatches(usize, usize),

    #[error("mu = {mu} is within {radius:e} of the pole -mu_{{2k}} with k = {pole_index}")]
    Pole {
        mu: f64,
        pole_index: usize,
        radius: f64,
    },

    #[error("asymptotics inadmissible: {0}")]
    AsymptoticsInadmissible(String),

    #[error("root bracketing failed on ({lo}, {hi}): {message}")]
    RootBracket { lo: f64, hi: f64, message: String },

    #[error("sigma*eps = {0} is within 1e-9 of the interval eigenvalue mu_{{2k}} with k = {1}")]
    Resonance(f64, usize),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("scene schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("monte carlo walker exceeded {max_steps} steps ({stuck} of {total} walkers)")]
    McTimeout {
        max_steps: u64,
        stuck: u64,
        total: u64,
    },

    #[error("collocation system too ill-conditioned; increase the harmonic order")]
    CollocationResolution,

    #[error("basis cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code, used by the CLI report and the C ABI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::OutsideDomain(..) => "outside_domain",
            Error::Singularity(_) => "singularity",
            Error::DegenerateConfiguration(_) => "degenerate_configuration",
            Error::OverlappingPatches(..) => "overlapping_patches",
            Error::Pole { .. } => "pole",
            Error::AsymptoticsInadmissible(_) => "asymptotics_inadmissible",
            Error::RootBracket { .. } => "root_bracket",
            Error::Resonance(..) => "resonance",
            Error::Numerical(_) => "numerical",
            Error::Unsupported(_) => "unsupported",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Schema { .. } => "schema",
            Error::McTimeout { .. } => "mc_timeout",
            Error::CollocationResolution => "collocation_resolution",
            Error::Cache(_) => "cache",
            Error::Io(_) => "io",
        }
    }
}

/// Non-fatal diagnostics attached to solver outputs.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// Pairwise arc separation below 4*max(eps); the well-separated
    /// assumption behind the asymptotics is violated.
    WellSeparatedViolated { i: usize, j: usize, separation: f64 },
    /// Field evaluated inside the inner region of a patch where the outer
    /// solution is not accurate.
    NearField { patch: usize, distance: f64 },
    /// N = 1 splitting is trivially chi = 1.
    SingleTarget,
    /// Interior target too close to the outer boundary.
    BoundaryClearance { target: usize, clearance: f64 },
    /// eps*sigma left the range where the linearization C(mu) ~ pi/(2 mu) + C1
    /// is accurate.
    LinearizedRegimeExceeded { value: f64 },
    /// Asymptotic kappa formulas are derived for N >> 1.
    SmallN { n: usize },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::WellSeparatedViolated { i, j, separation } => write!(
                f,
                "well-separated assumption violated: patches {i} and {j} at arc separation {separation:.4}"
            ),
            Warning::NearField { patch, distance } => write!(
                f,
                "outer solution evaluated at distance {distance:.4} from patch {patch}; use with care"
            ),
            Warning::SingleTarget => write!(f, "single target: splitting probability is trivially 1"),
            Warning::BoundaryClearance { target, clearance } => write!(
                f,
                "interior target {target} has boundary clearance {clearance:.4}; asymptotics assume O(1) clearance"
            ),
            Warning::LinearizedRegimeExceeded { value } => write!(
                f,
                "linearized C(mu) regime exceeded (eps*sigma = {value:.4})"
            ),
            Warning::SmallN { n } => write!(f, "large-N approximation used with N = {n} < 8"),
        }
    }
}
