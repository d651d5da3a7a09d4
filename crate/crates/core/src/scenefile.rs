//! Scene JSON schema, validation, and the CLI run report.
//!
//! A scene file looks like
//!
//! ```json
//! {
//!   "version": 1,
//!   "domain": { "kind": "disk-interior" },
//!   "patches": [
//!     { "center_angle": 0.0, "half_length": 0.1, "bc": { "type": "dirichlet" } },
//!     { "center_angle": 3.14159, "half_length": 0.2, "bc": { "type": "robin", "q": 5.0 } }
//!   ]
//! }
//! ```
//!
//! Interior targets go into `targets` instead of `patches`; mixing both in
//! one scene is rejected.  Angles are in radians, unknown keys are errors.

use crate::capture::{PatchCondition, PatchSpec, Scene};
use crate::error::{Error, Result};
use crate::extensions::{InteriorTargetSpec, TargetCondition, TargetShape};
use crate::geometry::{Domain, DomainKind};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCENE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub version: u32,
    pub domain: DomainSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub patches: Vec<PatchEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<TargetEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub kind: DomainKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_xy: Option<[f64; 2]>,
    pub half_length: f64,
    pub bc: BcSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum BcSpec {
    Dirichlet,
    Robin { q: f64 },
    Steklov,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetEntry {
    pub center: [f64; 2],
    pub size: f64,
    #[serde(default)]
    pub shape: ShapeSpec,
    pub bc: BcSpec,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ShapeSpec {
    #[default]
    Disk,
    Custom {
        capacity: f64,
    },
}

/// A parsed scene: either boundary patches or interior targets.
#[derive(Debug, Clone)]
pub enum LoadedScene {
    Boundary(Scene),
    Interior {
        domain: Domain,
        targets: Vec<InteriorTargetSpec>,
    },
}

impl SceneFile {
    pub fn from_str(text: &str) -> Result<Self> {
        let file: SceneFile = serde_json::from_str(text).map_err(|e| Error::Schema {
            path: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        if file.version != SCENE_FORMAT_VERSION {
            return Err(Error::Schema {
                path: "version".into(),
                message: format!(
                    "unsupported scene version {} (expected {SCENE_FORMAT_VERSION})",
                    file.version
                ),
            });
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str(&text)
    }

    pub fn domain(&self) -> Result<Domain> {
        let a = self.domain.a.unwrap_or(1.0);
        let b = self.domain.b.unwrap_or(1.0);
        Domain::new(self.domain.kind, a, b)
    }

    /// Validates the document into a boundary scene or an interior target
    /// list.
    pub fn build(&self) -> Result<LoadedScene> {
        let domain = self.domain()?;
        match (self.patches.is_empty(), self.targets.is_empty()) {
            (false, false) => Err(Error::Unsupported(
                "mixed boundary-patch and interior-target scenes are not covered by the \
                 asymptotics; split them into separate scenes"
                    .into(),
            )),
            (true, true) => Err(Error::Schema {
                path: "patches".into(),
                message: "scene has neither patches nor targets".into(),
            }),
            (false, true) => {
                let patches = self
                    .patches
                    .iter()
                    .enumerate()
                    .map(|(i, p)| p.build(&domain, i))
                    .collect::<Result<Vec<_>>>()?;
                Ok(LoadedScene::Boundary(Scene::new(domain, patches)?))
            }
            (true, false) => {
                let targets = self
                    .targets
                    .iter()
                    .map(|t| t.build())
                    .collect::<Result<Vec<_>>>()?;
                Ok(LoadedScene::Interior { domain, targets })
            }
        }
    }

    /// Canonical serialization used for the report digest and round-trips.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("scene serialization cannot fail")
    }
}

impl PatchEntry {
    fn build(&self, domain: &Domain, index: usize) -> Result<PatchSpec> {
        let center = match (self.center_angle, self.center_xy) {
            (Some(angle), None) => domain.boundary_point(angle),
            (None, Some(xy)) => crate::geometry::BoundaryPoint::from_xy(domain, xy)?,
            _ => {
                return Err(Error::Schema {
                    path: format!("patches[{index}]"),
                    message: "give exactly one of center_angle or center_xy".into(),
                })
            }
        };
        Ok(PatchSpec::new(center, self.half_length, self.bc.clone().into()))
    }
}

impl From<BcSpec> for PatchCondition {
    fn from(bc: BcSpec) -> Self {
        match bc {
            BcSpec::Dirichlet => PatchCondition::Dirichlet,
            BcSpec::Robin { q } => PatchCondition::Robin { q },
            BcSpec::Steklov => PatchCondition::Steklov,
        }
    }
}

impl From<BcSpec> for TargetCondition {
    fn from(bc: BcSpec) -> Self {
        match bc {
            BcSpec::Dirichlet => TargetCondition::Dirichlet,
            BcSpec::Robin { q } => TargetCondition::Robin { q },
            BcSpec::Steklov => TargetCondition::Steklov,
        }
    }
}

impl TargetEntry {
    fn build(&self) -> Result<InteriorTargetSpec> {
        Ok(InteriorTargetSpec {
            center: self.center,
            eps: self.size,
            shape: match self.shape {
                ShapeSpec::Disk => TargetShape::Disk,
                ShapeSpec::Custom { capacity } => TargetShape::Custom { capacity },
            },
            condition: self.bc.clone().into(),
        })
    }
}

/// Loads and validates a scene file.
pub fn load_scene(path: &Path) -> Result<LoadedScene> {
    SceneFile::load(path)?.build()
}

/// Rounds to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(digits - 1 - magnitude);
    (x * factor).round() / factor
}

/// Structured output of one CLI invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs_digest: String,
    pub outputs: serde_json::Value,
    pub warnings: Vec<String>,
    pub timing_ms: f64,
}

impl RunReport {
    pub fn digest_of(text: &str) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}
