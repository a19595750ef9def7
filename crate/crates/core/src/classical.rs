//! Classical side: constraint-surface charts, gauge flow, reduced
//! coordinates, their maps to coherent-state labels, and quantum/classical
//! peaking comparisons.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::coherent::{embed_irrep, expectation, su11_state, su2_state, CoherentLabel, IrrepEmbedding};
use crate::error::{CohqError, Result};
use crate::fock::C64;
use crate::models::{build_generators, GeneratorTriple, ModelKind, ModelSpec};
use crate::report::{Cell, CheckRecord, CheckReport, Table};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q1: f64,
    pub p1: f64,
    pub q2: f64,
    pub p2: f64,
}

impl PhasePoint {
    pub fn new(q1: f64, p1: f64, q2: f64, p2: f64) -> Self {
        PhasePoint { q1, p1, q2, p2 }
    }

    pub fn max_abs_diff(&self, other: &PhasePoint) -> f64 {
        [
            self.q1 - other.q1,
            self.p1 - other.p1,
            self.q2 - other.q2,
            self.p2 - other.p2,
        ]
        .iter()
        .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Connected components of the model-C reduced phase space, told apart by
/// the signs of `p1² − q1²` and `q2² − p2²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvertedBranch {
    /// Both positive.
    Case1,
    /// Both negative.
    Case2,
    /// First positive, second negative.
    Case3,
}

impl InvertedBranch {
    pub const ALL: [InvertedBranch; 3] = [InvertedBranch::Case1, InvertedBranch::Case2, InvertedBranch::Case3];

    pub fn number(self) -> u8 {
        match self {
            InvertedBranch::Case1 => 1,
            InvertedBranch::Case2 => 2,
            InvertedBranch::Case3 => 3,
        }
    }
}

/// Sign pattern of `(p1² − q1², q2² − p2²)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignPattern {
    Branch(InvertedBranch),
    /// First negative, second positive.
    Fourth,
    /// One of the two quantities vanishes.
    Degenerate,
}

pub fn sign_pattern(pt: &PhasePoint) -> SignPattern {
    let a = pt.p1 * pt.p1 - pt.q1 * pt.q1;
    let b = pt.q2 * pt.q2 - pt.p2 * pt.p2;
    match (a.partial_cmp(&0.0), b.partial_cmp(&0.0)) {
        (Some(std::cmp::Ordering::Greater), Some(std::cmp::Ordering::Greater)) => SignPattern::Branch(InvertedBranch::Case1),
        (Some(std::cmp::Ordering::Less), Some(std::cmp::Ordering::Less)) => SignPattern::Branch(InvertedBranch::Case2),
        (Some(std::cmp::Ordering::Greater), Some(std::cmp::Ordering::Less)) => SignPattern::Branch(InvertedBranch::Case3),
        (Some(std::cmp::Ordering::Less), Some(std::cmp::Ordering::Greater)) => SignPattern::Fourth,
        _ => SignPattern::Degenerate,
    }
}

/// Parameterizations of the constraint surfaces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "chart", rename_all = "snake_case")]
pub enum SurfaceChart {
    /// Model A: `q1 = R cosθ cosφ1`, `q2 = R sinθ cosφ2`, ...
    Sphere { theta: f64, phi1: f64, phi2: f64 },
    /// Model B: `q1 = R coshξ cosφ1`, `q2 = R sinhξ cosφ2`, ...
    Hyperboloid { xi: f64, phi1: f64, phi2: f64 },
    /// Model C group chart: `p1 = R coshμ cosγ1`, `p2 = R coshμ sinγ1`,
    /// `q1 = R sinhμ sinγ2`, `q2 = R sinhμ cosγ2`.
    InvertedGroup { mu: f64, gamma1: f64, gamma2: f64 },
    /// Model C branch charts in `(ξ, η1, η2)`.
    InvertedBranch {
        branch: InvertedBranch,
        xi: f64,
        eta1: f64,
        eta2: f64,
    },
}

/// Gauge-reduced coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model")]
pub enum ReducedCoords {
    /// `θ ∈ [0, π/2)`, `φ₋ ∈ [0, π)`.
    A { theta: f64, phi_minus: f64 },
    /// `ξ ≥ 0`, `φ₊ ∈ [0, π)`.
    B { xi: f64, phi_plus: f64 },
    C { branch: InvertedBranch, xi: f64, eta: f64 },
}

impl ReducedCoords {
    pub fn model(&self) -> ModelKind {
        match self {
            ReducedCoords::A { .. } => ModelKind::OscSum,
            ReducedCoords::B { .. } => ModelKind::OscDiff,
            ReducedCoords::C { .. } => ModelKind::Inverted,
        }
    }
}

fn check_r_sq(r_sq: f64) -> Result<f64> {
    if !(r_sq.is_finite() && r_sq > 0.0) {
        return Err(CohqError::config("r_sq", format!("R^2 must be positive, got {r_sq}")));
    }
    Ok(r_sq.sqrt())
}

fn chart_mismatch(model: ModelKind, what: &str) -> CohqError {
    CohqError::Usage(format!("{what} does not parameterize the model {model} surface"))
}

pub fn surface_point(model: ModelKind, r_sq: f64, chart: &SurfaceChart) -> Result<PhasePoint> {
    let r = check_r_sq(r_sq)?;
    match (model, *chart) {
        (ModelKind::OscSum, SurfaceChart::Sphere { theta, phi1, phi2 }) => Ok(PhasePoint::new(
            r * theta.cos() * phi1.cos(),
            r * theta.cos() * phi1.sin(),
            r * theta.sin() * phi2.cos(),
            r * theta.sin() * phi2.sin(),
        )),
        (ModelKind::OscDiff, SurfaceChart::Hyperboloid { xi, phi1, phi2 }) => Ok(PhasePoint::new(
            r * xi.cosh() * phi1.cos(),
            r * xi.cosh() * phi1.sin(),
            r * xi.sinh() * phi2.cos(),
            r * xi.sinh() * phi2.sin(),
        )),
        (ModelKind::Inverted, SurfaceChart::InvertedGroup { mu, gamma1, gamma2 }) => Ok(PhasePoint::new(
            r * mu.sinh() * gamma2.sin(),
            r * mu.cosh() * gamma1.cos(),
            r * mu.sinh() * gamma2.cos(),
            r * mu.cosh() * gamma1.sin(),
        )),
        (ModelKind::Inverted, SurfaceChart::InvertedBranch { branch, xi, eta1, eta2 }) => {
            let (f1, f2) = match branch {
                InvertedBranch::Case1 => (xi.cosh(), xi.sinh()),
                InvertedBranch::Case2 => (xi.sinh(), xi.cosh()),
                InvertedBranch::Case3 => {
                    if xi == 0.0 {
                        return Err(CohqError::Domain(
                            "xi = 0 puts a case-(iii) point on q2 = p2 = 0, outside the open branch".into(),
                        ));
                    }
                    (1.0 / xi.cosh(), xi.tanh())
                }
            };
            let (s1, c1, s2, c2) = (eta1.sinh(), eta1.cosh(), eta2.sinh(), eta2.cosh());
            Ok(match branch {
                InvertedBranch::Case1 => PhasePoint::new(r * f1 * s1, r * f1 * c1, r * f2 * c2, r * f2 * s2),
                InvertedBranch::Case2 => PhasePoint::new(r * f1 * c1, r * f1 * s1, r * f2 * s2, r * f2 * c2),
                InvertedBranch::Case3 => PhasePoint::new(r * f1 * s1, r * f1 * c1, r * f2 * s2, r * f2 * c2),
            })
        }
        (m, c) => Err(chart_mismatch(m, &format!("{c:?}"))),
    }
}

/// Classical constraint value at `pt`.
pub fn constraint_residual(model: ModelKind, r_sq: f64, pt: &PhasePoint) -> f64 {
    let PhasePoint { q1, p1, q2, p2 } = *pt;
    match model {
        ModelKind::OscSum => 0.5 * (q1 * q1 + p1 * p1 + q2 * q2 + p2 * p2 - r_sq),
        ModelKind::OscDiff => 0.5 * (q1 * q1 + p1 * p1 - q2 * q2 - p2 * p2 - r_sq),
        ModelKind::Inverted => 0.5 * (-q1 * q1 + p1 * p1 - q2 * q2 + p2 * p2 - r_sq),
    }
}

/// Classical values of the three gauge-invariant generators.
pub fn classical_observables(model: ModelKind, pt: &PhasePoint) -> [f64; 3] {
    let PhasePoint { q1, p1, q2, p2 } = *pt;
    match model {
        ModelKind::OscSum => [
            0.5 * (q1 * q2 + p1 * p2),
            0.5 * (q1 * p2 - q2 * p1),
            0.25 * (q1 * q1 + p1 * p1 - q2 * q2 - p2 * p2),
        ],
        ModelKind::OscDiff => [
            0.5 * (q1 * p2 + q2 * p1),
            0.5 * (q1 * q2 - p1 * p2),
            0.25 * (q1 * q1 + p1 * p1 + q2 * q2 + p2 * p2),
        ],
        ModelKind::Inverted => [
            0.25 * (q1 * q1 - p1 * p1 - q2 * q2 + p2 * p2),
            0.5 * (q1 * q2 - p1 * p2),
            0.5 * (q1 * p2 - q2 * p1),
        ],
    }
}

/// `X²+Y²+Z²` for model A, `Z²−X²−Y²` otherwise.
pub fn classical_casimir(model: ModelKind, pt: &PhasePoint) -> f64 {
    let [x, y, z] = classical_observables(model, pt);
    match model {
        ModelKind::OscSum => x * x + y * y + z * z,
        _ => z * z - x * x - y * y,
    }
}

/// Value of [`classical_casimir`] on the constraint surface.
pub fn classical_casimir_on_surface(model: ModelKind, r_sq: f64) -> f64 {
    let v = r_sq * r_sq / 16.0;
    match model {
        ModelKind::Inverted => -v,
        _ => v,
    }
}

/// Hamiltonian flow generated by the classical constraint, in closed form.
pub fn gauge_flow(model: ModelKind, pt: &PhasePoint, lambda: f64) -> PhasePoint {
    let PhasePoint { q1, p1, q2, p2 } = *pt;
    match model {
        ModelKind::OscSum | ModelKind::OscDiff => {
            let (s, c) = lambda.sin_cos();
            let s2 = if model == ModelKind::OscSum { s } else { -s };
            PhasePoint::new(q1 * c + p1 * s, p1 * c - q1 * s, q2 * c + p2 * s2, p2 * c - q2 * s2)
        }
        ModelKind::Inverted => {
            let (s, c) = (lambda.sinh(), lambda.cosh());
            PhasePoint::new(q1 * c + p1 * s, p1 * c + q1 * s, q2 * c + p2 * s, p2 * c + q2 * s)
        }
    }
}

fn wrap(angle: f64, period: f64) -> f64 {
    let w = angle.rem_euclid(period);
    if w >= period {
        0.0
    } else {
        w
    }
}

/// Gauge-fixed surface point: `φ₊ = 0` (A), `φ₋ = 0` (B), `η₊ = 0` (C).
pub fn reduced_to_surface(r_sq: f64, rc: &ReducedCoords) -> Result<PhasePoint> {
    match *rc {
        ReducedCoords::A { theta, phi_minus } => surface_point(
            ModelKind::OscSum,
            r_sq,
            &SurfaceChart::Sphere {
                theta,
                phi1: phi_minus,
                phi2: -phi_minus,
            },
        ),
        ReducedCoords::B { xi, phi_plus } => surface_point(
            ModelKind::OscDiff,
            r_sq,
            &SurfaceChart::Hyperboloid {
                xi,
                phi1: phi_plus,
                phi2: phi_plus,
            },
        ),
        ReducedCoords::C { branch, xi, eta } => surface_point(
            ModelKind::Inverted,
            r_sq,
            &SurfaceChart::InvertedBranch {
                branch,
                xi,
                eta1: eta,
                eta2: -eta,
            },
        ),
    }
}

/// `(sinh2μ sin γ, sinh2μ cos γ)` with `γ = γ1 + γ2`, read off from a point
/// on the model-C surface through the group chart.
pub fn group_chart_pair(r_sq: f64, pt: &PhasePoint) -> (f64, f64) {
    let s_sin = 2.0 * (pt.p1 * pt.q1 + pt.p2 * pt.q2) / r_sq;
    let s_cos = 2.0 * (pt.p1 * pt.q2 - pt.p2 * pt.q1) / r_sq;
    (s_sin, s_cos)
}

fn disk_label(s_sin: f64, s_cos: f64) -> C64 {
    let s = s_sin.hypot(s_cos);
    let mu = 0.5 * s.asinh();
    if s == 0.0 {
        return C64::new(0.0, 0.0);
    }
    C64::from_polar(mu.tanh(), s_sin.atan2(s_cos))
}

/// Coset label of a model-C surface point through the group chart
/// (`τ/2 → μ`, `−ν → γ1 + γ2`).
pub fn group_chart_label(r_sq: f64, pt: &PhasePoint) -> C64 {
    let (s_sin, s_cos) = group_chart_pair(r_sq, pt);
    disk_label(s_sin, s_cos)
}

/// Coherent-state label of a reduced point.
///
/// * A: `ζ = −tanθ e^{2iφ₋}`. Shifting `φ₋` by π is a gauge move, so the
///   phase carries `2φ₋`; `θ = π/2` is the chart's missing point.
/// * B: `ζ = tanhξ e^{2iφ₊}`.
/// * C: `sinh2μ sin γ = sinh2η`, `sinh2μ cos γ = sinh2ξ cosh2η`,
///   `ζ = tanhμ e^{iγ}`. On case (ii) the group chart reverses both sides,
///   so the label is negated there.
pub fn reduced_to_coset(rc: &ReducedCoords) -> Result<CoherentLabel> {
    match *rc {
        ReducedCoords::A { theta, phi_minus } => {
            if !(0.0..PI / 2.0).contains(&theta) {
                return Err(CohqError::Domain(format!(
                    "theta = {theta} is outside [0, pi/2); theta = pi/2 maps to the point at infinity"
                )));
            }
            Ok(CoherentLabel::Su2 {
                zeta: -C64::from_polar(theta.tan(), 2.0 * phi_minus),
            })
        }
        ReducedCoords::B { xi, phi_plus } => {
            if !(xi >= 0.0 && xi.is_finite()) {
                return Err(CohqError::Domain(format!("xi = {xi} must be finite and non-negative")));
            }
            Ok(CoherentLabel::Su11 {
                zeta: C64::from_polar(xi.tanh(), 2.0 * phi_plus),
            })
        }
        ReducedCoords::C { branch, xi, eta } => {
            let zeta = disk_label((2.0 * eta).sinh(), (2.0 * xi).sinh() * (2.0 * eta).cosh());
            let zeta = if branch == InvertedBranch::Case2 { -zeta } else { zeta };
            Ok(CoherentLabel::Su11 { zeta })
        }
    }
}

/// Inverse of [`reduced_to_coset`]. Model C needs its branch, which is never
/// inferred from the label.
pub fn coset_to_reduced(model: ModelKind, label: &CoherentLabel, branch: Option<InvertedBranch>) -> Result<ReducedCoords> {
    match (model, *label) {
        (ModelKind::OscSum, CoherentLabel::Su2 { zeta }) => {
            let r = zeta.norm();
            if !r.is_finite() {
                return Err(CohqError::Domain("zeta at infinity has no chart preimage".into()));
            }
            let phi_minus = if r == 0.0 { 0.0 } else { wrap(0.5 * (-zeta).arg(), PI) };
            Ok(ReducedCoords::A {
                theta: r.atan(),
                phi_minus,
            })
        }
        (ModelKind::OscDiff, CoherentLabel::Su11 { zeta }) => {
            let r = zeta.norm();
            if !(r < 1.0) {
                return Err(CohqError::Domain(format!("|zeta| = {r} is outside the unit disk")));
            }
            let phi_plus = if r == 0.0 { 0.0 } else { wrap(0.5 * zeta.arg(), PI) };
            Ok(ReducedCoords::B {
                xi: r.atanh(),
                phi_plus,
            })
        }
        (ModelKind::Inverted, CoherentLabel::Su11 { zeta }) => {
            let branch = branch.ok_or_else(|| {
                CohqError::Usage("model C needs an explicit branch; it is fixed classically, never inferred".into())
            })?;
            let r = zeta.norm();
            if !(r < 1.0) {
                return Err(CohqError::Domain(format!("|zeta| = {r} is outside the unit disk")));
            }
            let z = if branch == InvertedBranch::Case2 { -zeta } else { zeta };
            let s = (2.0 * r.atanh()).sinh();
            let gamma = z.arg();
            let eta = 0.5 * (s * gamma.sin()).asinh();
            let xi = 0.5 * (s * gamma.cos() / (2.0 * eta).cosh()).asinh();
            if branch == InvertedBranch::Case3 && xi == 0.0 {
                return Err(CohqError::Domain("label lies on the xi = 0 edge excluded from case (iii)".into()));
            }
            Ok(ReducedCoords::C { branch, xi, eta })
        }
        (m, l) => Err(CohqError::Usage(format!("label {l:?} does not belong to model {m}"))),
    }
}

/// Distance between two reduced points, with angles compared modulo their period.
pub fn reduced_distance(a: &ReducedCoords, b: &ReducedCoords) -> f64 {
    let ang = |x: f64, y: f64, period: f64| {
        let d = (x - y).rem_euclid(period);
        d.min(period - d)
    };
    match (*a, *b) {
        (ReducedCoords::A { theta: t1, phi_minus: f1 }, ReducedCoords::A { theta: t2, phi_minus: f2 }) => {
            (t1 - t2).abs().max(ang(f1, f2, PI) * t1.sin().max(t2.sin()))
        }
        (ReducedCoords::B { xi: x1, phi_plus: f1 }, ReducedCoords::B { xi: x2, phi_plus: f2 }) => {
            (x1 - x2).abs().max(ang(f1, f2, PI) * x1.sinh().max(x2.sinh()))
        }
        (ReducedCoords::C { branch: b1, xi: x1, eta: e1 }, ReducedCoords::C { branch: b2, xi: x2, eta: e2 }) if b1 == b2 => {
            (x1 - x2).abs().max((e1 - e2).abs())
        }
        _ => f64::INFINITY,
    }
}

/// Quantum expectations of the generators in the coherent state labeled by
/// `reduced_to_coset(rc)`, set against the classical observables at the
/// gauge-fixed surface point.
pub struct SemiclassicalProbe {
    spec: ModelSpec,
    emb: IrrepEmbedding,
    gen: GeneratorTriple,
    tail_eps: f64,
    sign: f64,
}

/// One quantum/classical comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakingRow {
    pub component: usize,
    pub quantum: f64,
    pub classical: f64,
    /// `|⟨G⟩ − s·G_cl|` with the global sign `s`.
    pub deviation: f64,
    /// `| |⟨G⟩| − |G_cl| |`.
    pub magnitude_deviation: f64,
    /// `(ħ/2)·max(1, |Z_cl|/(R²/4))`.
    pub bound: f64,
}

impl SemiclassicalProbe {
    pub fn new(spec: &ModelSpec, tail_eps: f64) -> Result<Self> {
        if spec.model == ModelKind::Inverted {
            return Err(CohqError::UnsupportedModel("model C has no discrete coherent states to compare".into()));
        }
        let emb = embed_irrep(spec)?;
        let gen = build_generators(spec);
        let mut probe = SemiclassicalProbe {
            spec: spec.clone(),
            emb,
            gen,
            tail_eps,
            sign: 1.0,
        };
        // orientation fixed once, at the chart origin
        let origin = match spec.model {
            ModelKind::OscSum => ReducedCoords::A { theta: 0.0, phi_minus: 0.0 },
            _ => ReducedCoords::B { xi: 0.0, phi_plus: 0.0 },
        };
        let (q, c) = probe.values(&origin)?;
        probe.sign = if q[2] * c[2] < 0.0 { -1.0 } else { 1.0 };
        Ok(probe)
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn generators(&self) -> &GeneratorTriple {
        &self.gen
    }

    fn values(&self, rc: &ReducedCoords) -> Result<([f64; 3], [f64; 3])> {
        if rc.model() != self.spec.model {
            return Err(CohqError::Usage(format!("reduced point {rc:?} is not for model {}", self.spec.model)));
        }
        let label = reduced_to_coset(rc)?;
        let ket = match label {
            CoherentLabel::Su2 { zeta } => su2_state(&self.emb, zeta)?,
            CoherentLabel::Su11 { zeta } => su11_state(&self.emb, zeta, self.tail_eps)?.ket,
            CoherentLabel::Hw { .. } => unreachable!("reduced_to_coset never yields oscillator labels"),
        };
        let mut q = [0.0; 3];
        for (slot, op) in q.iter_mut().zip(self.gen.as_array()) {
            *slot = expectation(op, &ket)?.re;
        }
        let pt = reduced_to_surface(self.spec.r_sq, rc)?;
        Ok((q, classical_observables(self.spec.model, &pt)))
    }

    pub fn compare(&self, rc: &ReducedCoords) -> Result<Vec<PeakingRow>> {
        let (q, c) = self.values(rc)?;
        let scale = self.spec.r_sq / 4.0;
        let bound = 0.5 * self.spec.hbar * (c[2].abs() / scale).max(1.0);
        Ok((0..3)
            .map(|i| PeakingRow {
                component: i,
                quantum: q[i],
                classical: c[i],
                deviation: (q[i] - self.sign * c[i]).abs(),
                magnitude_deviation: (q[i].abs() - c[i].abs()).abs(),
                bound,
            })
            .collect())
    }
}

fn coord_cells(rc: &ReducedCoords) -> (f64, f64) {
    match *rc {
        ReducedCoords::A { theta, phi_minus } => (theta, phi_minus),
        ReducedCoords::B { xi, phi_plus } => (xi, phi_plus),
        ReducedCoords::C { xi, eta, .. } => (xi, eta),
    }
}

pub const PEAKING_COLUMNS: [&str; 9] = [
    "r_sq",
    "coord1",
    "coord2",
    "component",
    "quantum",
    "classical",
    "deviation",
    "deviation_over_hbar",
    "deviation_over_scale",
];

/// Compares at `rc` and appends plot-ready rows to `table`.
pub fn peaking_rows(probe: &SemiclassicalProbe, rc: &ReducedCoords, table: &mut Table) -> Result<Vec<PeakingRow>> {
    let spec = &probe.spec;
    let names = probe.gen.names();
    let (c1, c2) = coord_cells(rc);
    let rows = probe.compare(rc)?;
    for row in &rows {
        table.push(vec![
            Cell::Num(spec.r_sq),
            Cell::Num(c1),
            Cell::Num(c2),
            names[row.component].into(),
            Cell::Num(row.quantum),
            Cell::Num(row.classical),
            Cell::Num(row.deviation),
            Cell::Num(row.deviation / spec.hbar),
            Cell::Num(row.deviation / (spec.r_sq / 4.0)),
        ]);
    }
    Ok(rows)
}

/// One record per generator at a single reduced point.
pub fn semiclassical_compare(spec: &ModelSpec, rc: &ReducedCoords, tail_eps: f64) -> Result<CheckReport> {
    let probe = SemiclassicalProbe::new(spec, tail_eps)?;
    let mut report = CheckReport::new("semiclassical");
    let mut table = Table::new(&PEAKING_COLUMNS);
    let names = probe.gen.names();
    for row in peaking_rows(&probe, rc, &mut table)? {
        report.push(CheckRecord::at_most(
            format!("{} deviation", names[row.component]),
            row.deviation,
            row.bound + 1e-10,
        ));
    }
    report.env("orientation_sign", probe.sign);
    report.table("semiclassical", table);
    Ok(report)
}

/// Deterministic low-discrepancy point in `[0,1)²` (golden-ratio Kronecker sequence).
pub fn kronecker_point(i: usize) -> (f64, f64) {
    const A1: f64 = 0.754_877_666_246_692_8;
    const A2: f64 = 0.569_840_290_998_053_2;
    let f = i as f64 + 0.5;
    ((f * A1).fract(), (f * A2).fract())
}

/// Classical-map checks on a deterministic sample: surface residuals, flow
/// invariance and group law, Casimir values, chart roundtrips, and the
/// model-C sign patterns.
pub fn check_classical_maps(
    model: ModelKind,
    r_sq: f64,
    samples: usize,
    tol_surface: f64,
    tol_flow: f64,
    tol_roundtrip: f64,
) -> Result<CheckReport> {
    check_r_sq(r_sq)?;
    let mut report = CheckReport::new("classical-maps");
    let mut worst_res: f64 = 0.0;
    let mut worst_obs: f64 = 0.0;
    let mut worst_res_flow: f64 = 0.0;
    let mut worst_group: f64 = 0.0;
    let mut worst_cas: f64 = 0.0;
    let mut worst_rt: f64 = 0.0;
    let scale = r_sq.max(1.0);
    let cas = classical_casimir_on_surface(model, r_sq);

    let charts: Vec<(SurfaceChart, Option<ReducedCoords>)> = (0..samples)
        .flat_map(|i| {
            let (u, v) = kronecker_point(i);
            let (w, _) = kronecker_point(i + samples);
            match model {
                ModelKind::OscSum => vec![(
                    SurfaceChart::Sphere {
                        theta: u * PI / 2.0 * 0.999,
                        phi1: v * TAU,
                        phi2: w * TAU,
                    },
                    Some(ReducedCoords::A {
                        theta: u * PI / 2.0 * 0.999,
                        phi_minus: v * PI,
                    }),
                )],
                ModelKind::OscDiff => vec![(
                    SurfaceChart::Hyperboloid {
                        xi: 3.0 * u,
                        phi1: v * TAU,
                        phi2: w * TAU,
                    },
                    Some(ReducedCoords::B {
                        xi: 3.0 * u,
                        phi_plus: v * PI,
                    }),
                )],
                ModelKind::Inverted => {
                    let mut out = vec![(
                        SurfaceChart::InvertedGroup {
                            mu: 2.0 * u,
                            gamma1: v * TAU,
                            gamma2: w * TAU,
                        },
                        None,
                    )];
                    for branch in InvertedBranch::ALL {
                        let xi = if branch == InvertedBranch::Case3 { 0.01 + 2.0 * u } else { 4.0 * u - 2.0 };
                        out.push((
                            SurfaceChart::InvertedBranch {
                                branch,
                                xi,
                                eta1: 4.0 * v - 2.0,
                                eta2: 4.0 * w - 2.0,
                            },
                            Some(ReducedCoords::C {
                                branch,
                                xi,
                                eta: 3.0 * v - 1.5,
                            }),
                        ));
                    }
                    out
                }
            }
        })
        .collect();

    for (i, (chart, rc)) in charts.iter().enumerate() {
        let pt = surface_point(model, r_sq, chart)?;
        worst_res = worst_res.max(constraint_residual(model, r_sq, &pt).abs() / r_sq);
        worst_cas = worst_cas.max((classical_casimir(model, &pt) - cas).abs() / (scale * scale));
        let (a, b) = kronecker_point(i + 7 * samples);
        let (la, lb) = (4.0 * a - 2.0, 4.0 * b - 2.0);
        let moved = gauge_flow(model, &pt, la);
        let obs0 = classical_observables(model, &pt);
        let obs1 = classical_observables(model, &moved);
        let mag = obs0.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        for k in 0..3 {
            worst_obs = worst_obs.max((obs0[k] - obs1[k]).abs() / mag);
        }
        worst_res_flow = worst_res_flow.max(
            (constraint_residual(model, r_sq, &moved) - constraint_residual(model, r_sq, &pt)).abs() / scale,
        );
        let twice = gauge_flow(model, &moved, lb);
        let once = gauge_flow(model, &pt, la + lb);
        let pmag = [pt.q1, pt.p1, pt.q2, pt.p2].iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        worst_group = worst_group.max(twice.max_abs_diff(&once) / pmag);
        if let Some(rc) = rc {
            let label = reduced_to_coset(rc)?;
            let branch = match rc {
                ReducedCoords::C { branch, .. } => Some(*branch),
                _ => None,
            };
            let back = coset_to_reduced(model, &label, branch)?;
            worst_rt = worst_rt.max(reduced_distance(rc, &back));
        }
    }
    report.push(CheckRecord::at_most("surface residual / R^2", worst_res, tol_surface));
    report.push(CheckRecord::at_most("observables along gauge flow", worst_obs, tol_flow));
    report.push(CheckRecord::at_most("constraint along gauge flow", worst_res_flow, tol_flow));
    report.push(CheckRecord::at_most("gauge flow group law", worst_group, tol_flow));
    report.push(CheckRecord::at_most("classical Casimir on surface", worst_cas, tol_flow));
    report.push(CheckRecord::at_most("reduced/coset roundtrip", worst_rt, tol_roundtrip));

    if model == ModelKind::Inverted {
        let mut fourth = 0usize;
        let mut mislabeled = 0usize;
        for (chart, _) in &charts {
            let pt = surface_point(model, r_sq, chart)?;
            match (sign_pattern(&pt), chart) {
                (SignPattern::Fourth, _) => fourth += 1,
                (SignPattern::Branch(got), SurfaceChart::InvertedBranch { branch, .. }) if got != *branch => mislabeled += 1,
                _ => {}
            }
        }
        report.push(CheckRecord::at_most("fourth sign pattern occurrences", fourth as f64, 0.0));
        report.push(CheckRecord::at_most("branch charts leaving their branch", mislabeled as f64, 0.0));
    }
    report.env("classical_samples", samples);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{make_space, CutoffScheme};

    #[test]
    fn chart_examples() {
        let p = surface_point(ModelKind::OscSum, 4.0, &SurfaceChart::Sphere { theta: 0.0, phi1: 0.0, phi2: 0.0 }).unwrap();
        assert_eq!(p, PhasePoint::new(2.0, 0.0, 0.0, 0.0));
        let p = surface_point(
            ModelKind::Inverted,
            4.0,
            &SurfaceChart::InvertedBranch {
                branch: InvertedBranch::Case1,
                xi: 0.0,
                eta1: 0.0,
                eta2: 0.0,
            },
        )
        .unwrap();
        assert_eq!(p, PhasePoint::new(0.0, 2.0, 0.0, 0.0));
        assert_eq!(constraint_residual(ModelKind::Inverted, 4.0, &p), 0.0);
        let p = surface_point(ModelKind::OscDiff, 9.0, &SurfaceChart::Hyperboloid { xi: 0.0, phi1: 1.0, phi2: 2.0 }).unwrap();
        assert_eq!((p.q2, p.p2), (0.0, 0.0));
        assert!((p.q1.hypot(p.p1) - 3.0).abs() < 1e-15);
        assert!(matches!(
            surface_point(
                ModelKind::Inverted,
                4.0,
                &SurfaceChart::InvertedBranch {
                    branch: InvertedBranch::Case3,
                    xi: 0.0,
                    eta1: 0.1,
                    eta2: 0.2
                }
            ),
            Err(CohqError::Domain(_))
        ));
        assert!(matches!(
            surface_point(ModelKind::OscSum, 4.0, &SurfaceChart::Hyperboloid { xi: 0.0, phi1: 0.0, phi2: 0.0 }),
            Err(CohqError::Usage(_))
        ));
    }

    #[test]
    fn residual_examples() {
        assert_eq!(constraint_residual(ModelKind::OscSum, 6.0, &PhasePoint::default()), -3.0);
        let r = 6f64.sqrt();
        assert!(constraint_residual(ModelKind::OscSum, 6.0, &PhasePoint::new(r, 0.0, 0.0, 0.0)).abs() < 1e-15);
    }

    #[test]
    fn observables_match_closed_forms() {
        let r_sq = 10.0;
        for (theta, p1, p2) in [(0.0, 0.0, 0.0), (0.4, 1.1, -0.3), (PI / 4.0, 0.7, 0.7)] {
            let pt = surface_point(ModelKind::OscSum, r_sq, &SurfaceChart::Sphere { theta, phi1: p1, phi2: p2 }).unwrap();
            let [jx, jy, jz] = classical_observables(ModelKind::OscSum, &pt);
            let cos: f64 = theta.cos();
            assert!((jz - r_sq / 4.0 * (2.0 * cos * cos - 1.0)).abs() < 1e-13);
            if jx.abs() > 1e-12 {
                assert!((jy / jx - (p2 - p1).tan()).abs() < 1e-12);
            }
        }
        let pt = surface_point(ModelKind::OscSum, r_sq, &SurfaceChart::Sphere { theta: PI / 4.0, phi1: 0.3, phi2: 0.3 }).unwrap();
        assert!(classical_observables(ModelKind::OscSum, &pt)[1].abs() < 1e-15);
        for (xi, p1, p2) in [(0.5, 0.2, 0.1), (1.3, -1.0, 2.0)] {
            let pt = surface_point(ModelKind::OscDiff, r_sq, &SurfaceChart::Hyperboloid { xi, phi1: p1, phi2: p2 }).unwrap();
            let [kx, ky, kz] = classical_observables(ModelKind::OscDiff, &pt);
            let ch: f64 = xi.cosh();
            assert!((kz - r_sq / 4.0 * (2.0 * ch * ch - 1.0)).abs() < 1e-12);
            assert!((kx / ky - (p1 + p2).tan()).abs() < 1e-10);
        }
        for (xi, e1, e2) in [(0.0, 0.0, 0.0), (0.6, 0.3, -0.8)] {
            let chart = SurfaceChart::InvertedBranch {
                branch: InvertedBranch::Case1,
                xi,
                eta1: e1,
                eta2: e2,
            };
            let pt = surface_point(ModelKind::Inverted, r_sq, &chart).unwrap();
            let [kx, ky, kz] = classical_observables(ModelKind::Inverted, &pt);
            let ch: f64 = xi.cosh();
            assert!((kx - r_sq / 4.0 * (1.0 - 2.0 * ch * ch)).abs() < 1e-12);
            if kz.abs() > 1e-12 {
                assert!((ky / kz - (e2 - e1).tanh()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn flow_examples() {
        let pt = PhasePoint::new(0.3, -1.2, 0.8, 0.1);
        assert!(gauge_flow(ModelKind::OscSum, &pt, TAU).max_abs_diff(&pt) < 1e-15);
        // flow only moves phi_plus in model A and phi_minus in model B
        let rc = ReducedCoords::A { theta: 0.5, phi_minus: 0.4 };
        let p = reduced_to_surface(6.0, &rc).unwrap();
        let moved = gauge_flow(ModelKind::OscSum, &p, 0.7);
        let expect = surface_point(ModelKind::OscSum, 6.0, &SurfaceChart::Sphere { theta: 0.5, phi1: 0.4 - 0.7, phi2: -0.4 - 0.7 }).unwrap();
        assert!(moved.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn coset_examples() {
        for phi in [0.0, 1.0, 2.5] {
            let l = reduced_to_coset(&ReducedCoords::A { theta: 0.0, phi_minus: phi }).unwrap();
            assert_eq!(l, CoherentLabel::Su2 { zeta: -C64::from_polar(0.0, 2.0 * phi) });
        }
        let l = reduced_to_coset(&ReducedCoords::C { branch: InvertedBranch::Case1, xi: 0.0, eta: 0.0 }).unwrap();
        assert_eq!(l, CoherentLabel::Su11 { zeta: C64::new(0.0, 0.0) });
        let rc = ReducedCoords::C { branch: InvertedBranch::Case1, xi: 0.3, eta: 0.2 };
        let back = coset_to_reduced(ModelKind::Inverted, &reduced_to_coset(&rc).unwrap(), Some(InvertedBranch::Case1)).unwrap();
        assert!(reduced_distance(&rc, &back) < 1e-12);
        assert!(matches!(
            reduced_to_coset(&ReducedCoords::A { theta: PI / 2.0, phi_minus: 0.0 }),
            Err(CohqError::Domain(_))
        ));
        assert!(matches!(
            coset_to_reduced(ModelKind::Inverted, &CoherentLabel::Su11 { zeta: C64::new(0.1, 0.0) }, None),
            Err(CohqError::Usage(_))
        ));
    }

    #[test]
    fn model_c_coset_agrees_with_group_chart_on_cases_one_and_two() {
        for branch in [InvertedBranch::Case1, InvertedBranch::Case2] {
            for (xi, eta) in [(0.3, 0.2), (-0.7, 1.1), (1.5, -0.4)] {
                let rc = ReducedCoords::C { branch, xi, eta };
                let pt = reduced_to_surface(4.0, &rc).unwrap();
                let CoherentLabel::Su11 { zeta } = reduced_to_coset(&rc).unwrap() else { panic!() };
                assert!((group_chart_label(4.0, &pt) - zeta).norm() < 1e-12, "{branch:?} {xi} {eta}");
            }
        }
    }

    #[test]
    fn antipodal_phi_minus_is_a_gauge_copy() {
        let a = reduced_to_surface(6.0, &ReducedCoords::A { theta: 0.6, phi_minus: 0.3 }).unwrap();
        let b = reduced_to_surface(6.0, &ReducedCoords::A { theta: 0.6, phi_minus: 0.3 + PI }).unwrap();
        assert!(gauge_flow(ModelKind::OscSum, &a, PI).max_abs_diff(&b) < 1e-14);
        let oa = classical_observables(ModelKind::OscSum, &a);
        let ob = classical_observables(ModelKind::OscSum, &b);
        assert!((0..3).all(|i| (oa[i] - ob[i]).abs() < 1e-14));
    }

    #[test]
    fn classical_maps_pass_for_every_model() {
        for (m, r_sq) in [(ModelKind::OscSum, 6.0), (ModelKind::OscDiff, 2.0), (ModelKind::Inverted, 4.0)] {
            let r = check_classical_maps(m, r_sq, 200, 1e-12, 1e-10, 1e-10).unwrap();
            assert!(r.pass(), "model {m}: {}", r.summary());
        }
    }

    #[test]
    fn peaking_closed_forms_for_model_a() {
        let spec = ModelSpec::new(ModelKind::OscSum, 6.0, 1.0, make_space(CutoffScheme::TotalQuanta, 10).unwrap()).unwrap();
        let probe = SemiclassicalProbe::new(&spec, 1e-12).unwrap();
        assert_eq!(probe.sign(), -1.0);
        for theta in [0.0, 0.3, PI / 4.0, 1.2] {
            let rows = probe.compare(&ReducedCoords::A { theta, phi_minus: 0.9 }).unwrap();
            let mu = 2.0 * theta;
            // <J_z> = -hbar j cos mu, classical (R^2/4) cos mu, j = 1
            assert!((rows[2].quantum + mu.cos()).abs() < 1e-12);
            assert!((rows[2].classical - 1.5 * mu.cos()).abs() < 1e-12);
            assert!((rows[2].magnitude_deviation - 0.5 * mu.cos().abs()).abs() < 1e-12);
            assert!(rows.iter().all(|r| r.deviation <= r.bound + 1e-12));
        }
    }

    #[test]
    fn peaking_for_model_b() {
        let spec = ModelSpec::new(ModelKind::OscDiff, 2.0, 1.0, make_space(CutoffScheme::PerMode, 40).unwrap()).unwrap();
        let probe = SemiclassicalProbe::new(&spec, 1e-13).unwrap();
        assert_eq!(probe.sign(), 1.0);
        for (xi, phi) in [(0.0, 0.0), (0.3, 0.4), (0.5, 2.0)] {
            let rows = probe.compare(&ReducedCoords::B { xi, phi_plus: phi }).unwrap();
            let excess = 0.5 * (2.0 * xi).cosh();
            assert!((rows[2].deviation - excess).abs() < 1e-9);
            assert!(rows.iter().all(|r| r.deviation <= r.bound + 1e-10), "{rows:?}");
        }
    }
}
