//! The three quadratic constraints, their commuting Lie-algebra generators,
//! the Casimir operator, and the constraint-selected representation label.
//!
//! | model | constraint (classical)                 | algebra  |
//! |-------|----------------------------------------|----------|
//! | A     | ½(q1²+p1²+q2²+p2² − R²)                | su(2)    |
//! | B     | ½(q1²+p1²−q2²−p2² − R²)                | su(1,1)  |
//! | C     | ½(−q1²+p1²−q2²+p2² − R²)               | su(1,1)  |

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{CohqError, Result};
use crate::fock::{CutoffScheme, FockSpace, LinOp, C64};
use crate::report::{CheckRecord, CheckReport, CheckStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// Two-dimensional oscillator constraint.
    #[serde(rename = "A")]
    OscSum,
    /// Out-of-phase oscillator constraint.
    #[serde(rename = "B")]
    OscDiff,
    /// Two-dimensional inverted oscillator constraint.
    #[serde(rename = "C")]
    Inverted,
}

impl ModelKind {
    pub fn letter(self) -> char {
        match self {
            ModelKind::OscSum => 'A',
            ModelKind::OscDiff => 'B',
            ModelKind::Inverted => 'C',
        }
    }

    /// Truncation that keeps the generator algebra as exact as possible.
    pub fn default_scheme(self) -> CutoffScheme {
        match self {
            ModelKind::OscSum => CutoffScheme::TotalQuanta,
            _ => CutoffScheme::PerMode,
        }
    }

    pub fn generator_names(self) -> [&'static str; 3] {
        match self {
            ModelKind::OscSum => ["J_x", "J_y", "J_z"],
            _ => ["K_x", "K_y", "K_z"],
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for ModelKind {
    type Err = CohqError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" | "osc-sum" | "a_oscsum" => Ok(ModelKind::OscSum),
            "b" | "osc-diff" | "b_oscdiff" => Ok(ModelKind::OscDiff),
            "c" | "inverted" | "c_inverted" => Ok(ModelKind::Inverted),
            other => Err(CohqError::config("model", format!("unknown model `{other}` (expected A|B|C)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub model: ModelKind,
    pub r_sq: f64,
    pub hbar: f64,
    pub space: Arc<FockSpace>,
}

impl ModelSpec {
    pub fn new(model: ModelKind, r_sq: f64, hbar: f64, space: Arc<FockSpace>) -> Result<Self> {
        if !(r_sq.is_finite() && r_sq > 0.0) {
            return Err(CohqError::config("r_sq", format!("R^2 must be positive, got {r_sq}")));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(CohqError::config("hbar", format!("hbar must be positive, got {hbar}")));
        }
        Ok(ModelSpec {
            model,
            r_sq,
            hbar,
            space,
        })
    }

    /// `R²/2ħ`, the dimensionless constraint offset.
    pub fn offset(&self) -> f64 {
        self.r_sq / (2.0 * self.hbar)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Series {
    Su2Spin,
    Su11Discrete,
    Su11Principal,
}

/// Irreducible-representation label selected by the constraint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepIndex {
    pub series: Series,
    pub value: f64,
    /// Set for model B with `R² < 2ħ`, where the Casimir equation has a
    /// second admissible root; the selection between the two is left open.
    #[serde(default)]
    pub alternate_selection: bool,
}

impl RepIndex {
    pub fn su2(j: f64) -> Result<Self> {
        let two_j = 2.0 * j;
        if !(two_j >= 0.0 && two_j.fract() == 0.0) {
            return Err(CohqError::Domain(format!("spin j={j} is not a non-negative half-integer")));
        }
        Ok(RepIndex {
            series: Series::Su2Spin,
            value: j,
            alternate_selection: false,
        })
    }

    pub fn su11_discrete(k: f64) -> Result<Self> {
        if !(k >= 0.5) {
            return Err(CohqError::Domain(format!("discrete-series index k={k} is below 1/2")));
        }
        Ok(RepIndex {
            series: Series::Su11Discrete,
            value: k,
            alternate_selection: false,
        })
    }

    pub fn su11_principal(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(CohqError::Domain(format!("principal-series label λ={lambda} must be positive")));
        }
        Ok(RepIndex {
            series: Series::Su11Principal,
            value: lambda,
            alternate_selection: false,
        })
    }

    /// `2j` for spin labels.
    pub fn twice(&self) -> usize {
        (2.0 * self.value).round() as usize
    }

    /// Casimir eigenvalue in units of ħ²: `j(j+1)`, `k(k−1)`, or `−(λ²+¼)`.
    pub fn casimir_value(&self) -> f64 {
        let v = self.value;
        match self.series {
            Series::Su2Spin => v * (v + 1.0),
            Series::Su11Discrete => v * (v - 1.0),
            Series::Su11Principal => -(v * v + 0.25),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Signature {
    /// su(2): `[X,Y] = iħZ`.
    Compact,
    /// su(1,1): `[X,Y] = −iħZ`.
    NonCompact,
}

#[derive(Clone, Debug)]
pub struct GeneratorTriple {
    pub x: LinOp,
    pub y: LinOp,
    pub z: LinOp,
    pub signature: Signature,
    pub model: ModelKind,
}

impl GeneratorTriple {
    pub fn as_array(&self) -> [&LinOp; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn names(&self) -> [&'static str; 3] {
        self.model.generator_names()
    }

    pub fn space(&self) -> &Arc<FockSpace> {
        self.x.space()
    }

    /// Lowering operator `X − iY` of the triple.
    pub fn lowering(&self) -> LinOp {
        LinOp::combination(&[(C64::new(1.0, 0.0), &self.x), (C64::new(0.0, -1.0), &self.y)])
            .expect("generators share a space")
    }
}

/// Smallest interior margin on which the algebra and Casimir identities are
/// exact for this model under the given truncation.
pub fn required_margin(model: ModelKind, scheme: CutoffScheme) -> usize {
    match (model, scheme) {
        (ModelKind::OscSum, CutoffScheme::TotalQuanta) => 0,
        (ModelKind::OscSum, CutoffScheme::PerMode) => 2,
        _ => 4,
    }
}

fn re(v: f64) -> C64 {
    C64::new(v, 0.0)
}

pub fn build_constraint(spec: &ModelSpec) -> LinOp {
    let h = spec.hbar;
    let off = spec.offset();
    let space = spec.space.clone();
    match spec.model {
        ModelKind::OscSum => LinOp::diagonal(space, |a, b| re(h * (a as f64 + b as f64 + 1.0 - off))),
        ModelKind::OscDiff => LinOp::diagonal(space, |a, b| re(h * (a as f64 - b as f64 - off))),
        ModelKind::Inverted => {
            let c1 = LinOp::normal_ordered(space.clone(), [2, 0], [0, 0]);
            let c2 = LinOp::normal_ordered(space.clone(), [0, 2], [0, 0]);
            let a1 = LinOp::normal_ordered(space.clone(), [0, 0], [2, 0]);
            let a2 = LinOp::normal_ordered(space.clone(), [0, 0], [0, 2]);
            let id = LinOp::identity(space);
            LinOp::combination(&[
                (re(-h / 2.0), &c1),
                (re(-h / 2.0), &c2),
                (re(-h / 2.0), &a1),
                (re(-h / 2.0), &a2),
                (re(-spec.r_sq / 2.0), &id),
            ])
            .expect("same space")
        }
    }
}

pub fn build_generators(spec: &ModelSpec) -> GeneratorTriple {
    let h = spec.hbar;
    let s = spec.space.clone();
    let mono = |c: [usize; 2], a: [usize; 2]| LinOp::normal_ordered(s.clone(), c, a);
    let lc = |terms: &[(C64, &LinOp)]| LinOp::combination(terms).expect("same space");
    let i = C64::new(0.0, 1.0);
    match spec.model {
        ModelKind::OscSum => {
            let c1a2 = mono([1, 0], [0, 1]);
            let c2a1 = mono([0, 1], [1, 0]);
            let x = lc(&[(re(h / 2.0), &c1a2), (re(h / 2.0), &c2a1)]);
            let y = lc(&[(i * (h / 2.0), &c2a1), (-i * (h / 2.0), &c1a2)]);
            let z = LinOp::diagonal(s.clone(), |a, b| re(h / 2.0 * (a as f64 - b as f64)));
            GeneratorTriple {
                x,
                y,
                z,
                signature: Signature::Compact,
                model: spec.model,
            }
        }
        ModelKind::OscDiff => {
            let raise = mono([1, 1], [0, 0]);
            let lower = mono([0, 0], [1, 1]);
            let x = lc(&[(i * (h / 2.0), &raise), (-i * (h / 2.0), &lower)]);
            let y = lc(&[(re(h / 2.0), &raise), (re(h / 2.0), &lower)]);
            let z = LinOp::diagonal(s.clone(), |a, b| re(h / 2.0 * (a as f64 + b as f64 + 1.0)));
            GeneratorTriple {
                x,
                y,
                z,
                signature: Signature::NonCompact,
                model: spec.model,
            }
        }
        ModelKind::Inverted => {
            let c11 = mono([2, 0], [0, 0]);
            let c22 = mono([0, 2], [0, 0]);
            let a11 = mono([0, 0], [2, 0]);
            let a22 = mono([0, 0], [0, 2]);
            let x = lc(&[
                (re(h / 4.0), &c11),
                (re(-h / 4.0), &c22),
                (re(h / 4.0), &a11),
                (re(-h / 4.0), &a22),
            ]);
            let raise = mono([1, 1], [0, 0]);
            let lower = mono([0, 0], [1, 1]);
            let y = lc(&[(re(h / 2.0), &raise), (re(h / 2.0), &lower)]);
            let c2a1 = mono([0, 1], [1, 0]);
            let c1a2 = mono([1, 0], [0, 1]);
            let z = lc(&[(i * (h / 2.0), &c2a1), (-i * (h / 2.0), &c1a2)]);
            GeneratorTriple {
                x,
                y,
                z,
                signature: Signature::NonCompact,
                model: spec.model,
            }
        }
    }
}

fn margin_status(margin: usize, needed: usize, boundary_expected: bool) -> Result<bool> {
    if margin >= needed {
        return Ok(false);
    }
    if boundary_expected {
        Ok(true)
    } else {
        Err(CohqError::Usage(format!(
            "margin {margin} is below the {needed} this model and truncation need"
        )))
    }
}

fn interior_record(name: String, deviation: f64, tol: f64, at_boundary: bool) -> CheckRecord {
    let rec = CheckRecord::at_most(name, deviation, tol);
    if at_boundary && rec.status == CheckStatus::Fail {
        CheckRecord {
            status: CheckStatus::BoundaryExpected,
            note: Some("deviation located on truncation-boundary rows".into()),
            ..rec
        }
    } else {
        rec
    }
}

/// Structure-constant identities of the triple, restricted to interior vectors.
///
/// With `boundary_expected`, a margin below [`required_margin`] is accepted
/// and deviations are reported with status `BoundaryExpected` instead of
/// failing.
pub fn check_algebra(
    gen: &GeneratorTriple,
    hbar: f64,
    margin: usize,
    tol: f64,
    boundary_expected: bool,
) -> Result<CheckReport> {
    let needed = required_margin(gen.model, gen.space().scheme());
    let at_boundary = margin_status(margin, needed, boundary_expected)?;
    let [nx, ny, nz] = gen.names();
    let ih = C64::new(0.0, hbar);
    let sign_xy = match gen.signature {
        Signature::Compact => ih,
        Signature::NonCompact => -ih,
    };
    let relations = [
        (format!("[{nx},{ny}]"), &gen.x, &gen.y, &gen.z, sign_xy),
        (format!("[{ny},{nz}]"), &gen.y, &gen.z, &gen.x, ih),
        (format!("[{nz},{nx}]"), &gen.z, &gen.x, &gen.y, ih),
    ];
    let mut report = CheckReport::new("check-algebra");
    for (name, a, b, c, coeff) in relations {
        let lhs = a.commutator(b)?;
        let defect = lhs.sub(&c.scale(coeff))?;
        report.push(interior_record(name, defect.interior_norm(margin)?, tol, at_boundary));
    }
    for (op, name) in gen.as_array().into_iter().zip(gen.names()) {
        report.push(CheckRecord::at_most(format!("hermitian {name}"), op.hermiticity_defect(), tol));
    }
    report.env("margin", margin);
    report.env("signature", gen.signature);
    Ok(report)
}

/// Quadratic Casimir: `X²+Y²+Z²` (compact) or `Z²−X²−Y²` (non-compact).
pub fn casimir(gen: &GeneratorTriple) -> LinOp {
    let sq = |op: &LinOp| op.mul(op).expect("same space");
    let (x2, y2, z2) = (sq(&gen.x), sq(&gen.y), sq(&gen.z));
    let (sx, sz) = match gen.signature {
        Signature::Compact => (1.0, 1.0),
        Signature::NonCompact => (-1.0, 1.0),
    };
    LinOp::combination(&[(re(sx), &x2), (re(sx), &y2), (re(sz), &z2)]).expect("same space")
}

/// The Casimir written as a function of the constraint:
/// `±¼(φ + R²/2)² − ħ²/4` (plus sign for A and B, minus for C).
pub fn casimir_from_constraint(spec: &ModelSpec, phi: &LinOp) -> Result<LinOp> {
    let id = LinOp::identity(spec.space.clone());
    let shifted = phi.add(&id.scale(re(spec.r_sq / 2.0)))?;
    let sq = shifted.mul(&shifted)?;
    let sign = match spec.model {
        ModelKind::Inverted => -0.25,
        _ => 0.25,
    };
    LinOp::combination(&[(re(sign), &sq), (re(-spec.hbar * spec.hbar / 4.0), &id)])
}

pub fn casimir_constraint_identity(
    spec: &ModelSpec,
    gen: &GeneratorTriple,
    margin: usize,
    tol: f64,
) -> Result<CheckReport> {
    let needed = required_margin(spec.model, spec.space.scheme());
    margin_status(margin, needed, false)?;
    let lhs = casimir(gen);
    let rhs = casimir_from_constraint(spec, &build_constraint(spec))?;
    let mut report = CheckReport::new("casimir-identity");
    report.push(CheckRecord::at_most(
        format!("C2 = f(phi) [model {}]", spec.model),
        lhs.sub(&rhs)?.interior_norm(margin)?,
        tol,
    ));
    Ok(report)
}

/// Physical observables commute with the constraint, and the Casimir is central.
pub fn check_invariance(spec: &ModelSpec, gen: &GeneratorTriple, margin: usize, tol: f64) -> Result<CheckReport> {
    let needed = required_margin(spec.model, spec.space.scheme());
    margin_status(margin, needed, false)?;
    let phi = build_constraint(spec);
    let c2 = casimir(gen);
    let mut report = CheckReport::new("invariance");
    for (op, name) in gen.as_array().into_iter().zip(gen.names()) {
        report.push(CheckRecord::at_most(
            format!("[{name},phi]"),
            op.commutator(&phi)?.interior_norm(margin)?,
            tol,
        ));
        report.push(CheckRecord::at_most(
            format!("[C2,{name}]"),
            c2.commutator(op)?.interior_norm(margin)?,
            tol,
        ));
    }
    report.push(CheckRecord::at_most(
        "hermitian phi",
        phi.hermiticity_defect(),
        tol,
    ));
    Ok(report)
}

/// Representation picked out by the constraint.
///
/// * A: `j = (R²/2ħ − 1)/2`, which must be a non-negative half-integer.
/// * B: `k = (1 + R²/2ħ)/2`; `R² < 2ħ` sets the alternate-selection flag.
/// * C: principal series with `λ = R²/4ħ`.
pub fn rep_index_from_r(model: ModelKind, r_sq: f64, hbar: f64) -> Result<RepIndex> {
    if !(r_sq.is_finite() && r_sq > 0.0) {
        return Err(CohqError::config("r_sq", format!("R^2 must be positive, got {r_sq}")));
    }
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(CohqError::config("hbar", format!("hbar must be positive, got {hbar}")));
    }
    let off = r_sq / (2.0 * hbar);
    match model {
        ModelKind::OscSum => {
            let two_j = off - 1.0;
            let rounded = two_j.round();
            let tol = 1e-9 * off.max(1.0);
            if (two_j - rounded).abs() > tol || rounded < 0.0 {
                return Err(CohqError::NoPhysicalStates(format!(
                    "R^2/2hbar - 1 = {two_j} is not a non-negative integer 2j; the oscillator \
                     constraint has physical states only for quantized R^2, so neither the \
                     kinematical space nor its dual contains any"
                )));
            }
            RepIndex::su2(rounded / 2.0)
        }
        ModelKind::OscDiff => {
            let mut rep = RepIndex::su11_discrete((1.0 + off) / 2.0)?;
            rep.alternate_selection = r_sq < 2.0 * hbar;
            Ok(rep)
        }
        ModelKind::Inverted => RepIndex::su11_principal(r_sq / (4.0 * hbar)),
    }
}
