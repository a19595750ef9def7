//! Run configuration: a flat `key = value` file, overridden key by key from
//! the command line, resolved against model-dependent defaults and hashed.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::coherent::QuadratureSpec;
use crate::error::{CohqError, Result};
use crate::fock::{CutoffScheme, C64};
use crate::models::{required_margin, ModelKind};

pub const SCHEMA_VERSION: u32 = 1;

/// Every tolerance a suite may consult, with its default.
pub const DEFAULT_TOLERANCES: [(&str, f64); 20] = [
    ("algebra", 1e-11),
    ("casimir", 1e-10),
    ("collapse", 1e-6),
    ("commute", 1e-10),
    ("equality", 1e-10),
    ("flow", 1e-10),
    ("hw_oracle", 1e-9),
    ("kernel_eig", 1e-9),
    ("lambda_oracle", 1e-12),
    ("monotone", 1e-12),
    ("negative_control", 1e-3),
    ("peaking", 1e-9),
    ("projector", 1e-12),
    ("roundtrip", 1e-10),
    ("su11_resolution", 1e-4),
    ("su11_tail_consistency", 1e-10),
    ("su2_resolution", 1e-8),
    ("surface", 1e-12),
    ("tail_eps", 1e-12),
    ("uncertainty", 1e-10),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = CohqError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(CohqError::config("format", format!("unknown format `{other}` (expected json|csv)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    CheckAlgebra,
    CasimirIdentity,
    SelectRep,
    ResolveIdentity,
    KinPhysEquality,
    ProjectHw,
    ClassicalMaps,
    SemiclassicalSweep,
    Full,
}

impl Suite {
    pub const COMPONENTS: [Suite; 8] = [
        Suite::CheckAlgebra,
        Suite::CasimirIdentity,
        Suite::SelectRep,
        Suite::ResolveIdentity,
        Suite::KinPhysEquality,
        Suite::ProjectHw,
        Suite::ClassicalMaps,
        Suite::SemiclassicalSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CheckAlgebra => "check-algebra",
            Suite::CasimirIdentity => "casimir-identity",
            Suite::SelectRep => "select-rep",
            Suite::ResolveIdentity => "resolve-identity",
            Suite::KinPhysEquality => "kin-phys-equality",
            Suite::ProjectHw => "project-hw",
            Suite::ClassicalMaps => "classical-maps",
            Suite::SemiclassicalSweep => "semiclassical-sweep",
            Suite::Full => "full",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CohqError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Suite::COMPONENTS
            .iter()
            .chain(std::iter::once(&Suite::Full))
            .find(|x| x.name() == t)
            .copied()
            .ok_or_else(|| CohqError::config("suite", format!("unknown suite `{t}`")))
    }
}

/// Parameter grid for the peaking sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    pub r_sq: Vec<f64>,
    /// Points along `θ` (A) or `ξ` (B).
    pub radial_points: usize,
    /// Points along `φ₋` (A) or `φ₊` (B).
    pub angular_points: usize,
    /// Largest `ξ` for model B.
    pub xi_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub schema_version: u32,
    pub suite: Suite,
    pub model: ModelKind,
    pub r_sq: f64,
    pub hbar: f64,
    pub scheme: CutoffScheme,
    pub cutoff: usize,
    pub margin: usize,
    pub quadrature: QuadratureSpec,
    pub lambda_nodes: usize,
    pub classical_samples: usize,
    /// Coherent labels for the equality and uncertainty checks.
    pub labels: Vec<C64>,
    pub tolerances: BTreeMap<String, f64>,
    pub sweep: SweepSpec,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub timing: bool,
}

const KEYS: [&str; 21] = [
    "schema_version",
    "suite",
    "model",
    "r_sq",
    "hbar",
    "scheme",
    "cutoff",
    "margin",
    "quadrature.radial_nodes",
    "quadrature.angular_nodes",
    "quadrature.su11_radial_cutoff",
    "lambda_nodes",
    "classical_samples",
    "labels",
    "sweep.r_sq",
    "sweep.radial_points",
    "sweep.angular_points",
    "sweep.xi_max",
    "out",
    "format",
    "timing",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CohqError::config(format!("line {}", n + 1), format!("expected `key = value`, got `{line}`")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_num<T: FromStr>(field: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| CohqError::config(field, format!("cannot parse `{v}`")))
}

fn parse_list(field: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(field, s))
        .collect()
}

fn parse_labels(v: &str) -> Result<Vec<C64>> {
    v.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.replace(' ', "")
                .parse::<C64>()
                .map_err(|_| CohqError::config("labels", format!("cannot parse complex number `{s}`")))
        })
        .collect()
}

fn default_r_sq(model: ModelKind) -> f64 {
    match model {
        ModelKind::OscSum => 6.0,
        ModelKind::OscDiff => 2.0,
        ModelKind::Inverted => 4.0,
    }
}

fn default_cutoff(model: ModelKind, r_sq: f64, hbar: f64) -> usize {
    match model {
        ModelKind::OscSum => {
            let two_j = (r_sq / (2.0 * hbar) - 1.0).round().max(0.0) as usize;
            two_j.max(10)
        }
        ModelKind::OscDiff => 24,
        ModelKind::Inverted => 12,
    }
}

fn default_labels(model: ModelKind) -> Vec<C64> {
    match model {
        ModelKind::OscSum => vec![C64::new(0.0, 0.0), C64::new(0.5, 0.0), C64::new(1.0, 1.0)],
        _ => vec![
            C64::new(0.0, 0.0),
            C64::from_polar(0.3, std::f64::consts::FRAC_PI_4),
            C64::new(0.0, -0.5),
        ],
    }
}

fn default_sweep(model: ModelKind) -> Vec<f64> {
    match model {
        ModelKind::OscSum => vec![6.0, 22.0, 102.0],
        ModelKind::OscDiff => vec![2.0, 4.0, 6.0],
        ModelKind::Inverted => vec![],
    }
}

impl RunConfig {
    /// Resolves raw pairs (file values already overridden by flags).
    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self> {
        for k in pairs.keys() {
            let known = KEYS.contains(&k.as_str())
                || k.strip_prefix("tol.")
                    .is_some_and(|t| DEFAULT_TOLERANCES.iter().any(|(n, _)| *n == t));
            if !known {
                return Err(CohqError::config(k.clone(), "unknown configuration key"));
            }
        }
        let get = |k: &str| pairs.get(k).map(String::as_str);

        let schema_version = match get("schema_version") {
            Some(v) => parse_num::<u32>("schema_version", v)?,
            None => SCHEMA_VERSION,
        };
        if schema_version != SCHEMA_VERSION {
            return Err(CohqError::config(
                "schema_version",
                format!("unsupported version {schema_version} (this build reads {SCHEMA_VERSION})"),
            ));
        }
        let suite = get("suite").map(Suite::from_str).transpose()?.unwrap_or(Suite::Full);
        let model: ModelKind = get("model")
            .ok_or_else(|| CohqError::config("model", "required"))?
            .parse()?;
        let r_sq = match get("r_sq") {
            Some(v) => parse_num::<f64>("r_sq", v)?,
            None => default_r_sq(model),
        };
        if !(r_sq.is_finite() && r_sq > 0.0) {
            return Err(CohqError::config("r_sq", format!("must be positive, got {r_sq}")));
        }
        let hbar = match get("hbar") {
            Some(v) => parse_num::<f64>("hbar", v)?,
            None => 1.0,
        };
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(CohqError::config("hbar", format!("must be positive, got {hbar}")));
        }
        let scheme = match get("scheme") {
            Some(v) => v.parse()?,
            None => model.default_scheme(),
        };
        let cutoff = match get("cutoff") {
            Some(v) => parse_num("cutoff", v)?,
            None => default_cutoff(model, r_sq, hbar),
        };
        let margin = match get("margin") {
            Some(v) => parse_num("margin", v)?,
            None => required_margin(model, scheme),
        };
        if margin > cutoff {
            return Err(CohqError::config("margin", format!("margin {margin} exceeds cutoff {cutoff}")));
        }
        let mut quadrature = QuadratureSpec::default();
        if let Some(v) = get("quadrature.radial_nodes") {
            quadrature.radial_nodes = parse_num("quadrature.radial_nodes", v)?;
        }
        if let Some(v) = get("quadrature.angular_nodes") {
            quadrature.angular_nodes = parse_num("quadrature.angular_nodes", v)?;
        }
        if let Some(v) = get("quadrature.su11_radial_cutoff") {
            quadrature.su11_radial_cutoff = parse_num("quadrature.su11_radial_cutoff", v)?;
        }
        if quadrature.radial_nodes == 0 || quadrature.angular_nodes == 0 {
            return Err(CohqError::config("quadrature", "node counts must be positive"));
        }
        if !(quadrature.su11_radial_cutoff > 0.0 && quadrature.su11_radial_cutoff < 1.0) {
            return Err(CohqError::config("quadrature.su11_radial_cutoff", "must lie in (0, 1)"));
        }
        let lambda_nodes = match get("lambda_nodes") {
            Some(v) => parse_num("lambda_nodes", v)?,
            None => 64,
        };
        if lambda_nodes == 0 {
            return Err(CohqError::config("lambda_nodes", "must be positive"));
        }
        let classical_samples = match get("classical_samples") {
            Some(v) => parse_num("classical_samples", v)?,
            None => 1000,
        };
        let labels = match get("labels") {
            Some(v) => parse_labels(v)?,
            None => default_labels(model),
        };

        let mut tolerances: BTreeMap<String, f64> =
            DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for (k, v) in pairs {
            if let Some(name) = k.strip_prefix("tol.") {
                let val: f64 = parse_num(k, v)?;
                if !(val.is_finite() && val > 0.0) {
                    return Err(CohqError::config(k.clone(), format!("tolerance must be positive, got {val}")));
                }
                tolerances.insert(name.to_string(), val);
            }
        }

        let sweep = SweepSpec {
            r_sq: match get("sweep.r_sq") {
                Some(v) => parse_list("sweep.r_sq", v)?,
                None => default_sweep(model),
            },
            radial_points: match get("sweep.radial_points") {
                Some(v) => parse_num("sweep.radial_points", v)?,
                None => 9,
            },
            angular_points: match get("sweep.angular_points") {
                Some(v) => parse_num("sweep.angular_points", v)?,
                None => 8,
            },
            xi_max: match get("sweep.xi_max") {
                Some(v) => parse_num("sweep.xi_max", v)?,
                None => 0.5,
            },
        };
        if sweep.r_sq.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(CohqError::config("sweep.r_sq", "every entry must be positive"));
        }
        if !(sweep.xi_max.is_finite() && sweep.xi_max >= 0.0) {
            return Err(CohqError::config("sweep.xi_max", "must be non-negative"));
        }

        let format = match get("format") {
            Some(v) => v.parse()?,
            None => Format::Json,
        };
        let timing = match get("timing") {
            Some(v) => parse_num("timing", v)?,
            None => false,
        };
        Ok(RunConfig {
            schema_version,
            suite,
            model,
            r_sq,
            hbar,
            scheme,
            cutoff,
            margin,
            quadrature,
            lambda_nodes,
            classical_samples,
            labels,
            tolerances,
            sweep,
            out: get("out").map(PathBuf::from),
            format,
            timing,
        })
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_pairs(&parse_pairs(text)?)
    }

    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances
            .get(name)
            .copied()
            .unwrap_or_else(|| panic!("tolerance `{name}` has no default"))
    }

    /// Canonical JSON of every result-affecting field.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of [`RunConfig::canonical_json`].
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}
