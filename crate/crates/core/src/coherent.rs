//! Perelomov coherent states of SU(2) and of the SU(1,1) discrete series,
//! Heisenberg–Weyl (oscillator) coherent states, and resolution-of-identity
//! checks by quadrature over the coset.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{DiscreteCDF, Poisson};
use statrs::function::beta::beta_reg;

use crate::error::{CohqError, Result};
use crate::fock::{inner, CutoffScheme, FockSpace, Ket, LinOp, C64};
use crate::models::{build_constraint, build_generators, rep_index_from_r, GeneratorTriple, ModelKind, ModelSpec, RepIndex, Series};
use crate::numerics::{gauss_legendre_on, hermitian_norm, ln_factorial, ln_pochhammer_ratio, pairwise_sum, periodic_trapezoid};
use crate::report::{Cell, CheckRecord, CheckReport, Table};

/// Point on a coherent-state manifold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoherentLabel {
    Su2 { zeta: C64 },
    Su11 { zeta: C64 },
    Hw { z1: C64, z2: C64 },
}

/// Placement of an irreducible representation inside the Fock space.
///
/// Level `i` of the irrep sits at Fock index `fock_indices[i]`:
/// model A puts `|j,m⟩` (level `j+m`) at `(j+m, j−m)`, model B puts `|k,n⟩`
/// at `(n+2k−1, n)`.
#[derive(Clone, Debug)]
pub struct IrrepEmbedding {
    pub rep: RepIndex,
    pub space: Arc<FockSpace>,
    pub fock_indices: Vec<usize>,
    /// `2k − 1` for the discrete series, `2j` for spin.
    pub shift: usize,
}

impl IrrepEmbedding {
    pub fn levels(&self) -> usize {
        self.fock_indices.len()
    }

    /// Lifts irrep coefficients (one per level, extra entries ignored) to a Fock ket.
    pub fn lift(&self, coeffs: &[C64]) -> Ket {
        let mut amps = DVector::zeros(self.space.dim());
        for (&idx, &c) in self.fock_indices.iter().zip(coeffs) {
            amps[idx] = c;
        }
        Ket::from_amplitudes(self.space.clone(), amps).expect("dimension matches")
    }

    /// Cutoff needed to hold `levels` discrete-series levels.
    pub fn cutoff_for_levels(&self, levels: usize) -> usize {
        let top = levels.saturating_sub(1);
        match self.space.scheme() {
            CutoffScheme::PerMode => top + self.shift,
            CutoffScheme::TotalQuanta => 2 * top + self.shift,
        }
    }
}

fn integer_offset(spec: &ModelSpec) -> Result<usize> {
    let off = spec.offset();
    let rounded = off.round();
    if (off - rounded).abs() > 1e-9 * off.max(1.0) {
        return Err(CohqError::NoPhysicalStates(format!(
            "R^2/2hbar = {off} is not an integer, so no Fock vector satisfies n1 - n2 = R^2/2hbar"
        )));
    }
    Ok(rounded as usize)
}

/// Embeds the constraint-selected irrep and validates it: every embedded
/// vector must be annihilated by the constraint and carry the expected
/// third-generator eigenvalue.
pub fn embed_irrep(spec: &ModelSpec) -> Result<IrrepEmbedding> {
    let space = spec.space.clone();
    let (rep, shift, fock): (RepIndex, usize, Vec<(usize, usize)>) = match spec.model {
        ModelKind::OscSum => {
            let rep = rep_index_from_r(spec.model, spec.r_sq, spec.hbar)?;
            let two_j = rep.twice();
            let fock: Vec<_> = (0..=two_j).map(|i| (i, two_j - i)).collect();
            if fock.iter().any(|&(a, b)| !space.contains(a, b)) {
                return Err(CohqError::TruncationTooSmall {
                    required_cutoff: two_j,
                    cutoff: space.cutoff(),
                });
            }
            (rep, two_j, fock)
        }
        ModelKind::OscDiff => {
            let d = integer_offset(spec)?;
            let rep = rep_index_from_r(spec.model, spec.r_sq, spec.hbar)?;
            let fock: Vec<_> = (0..).map(|n| (n + d, n)).take_while(|&(a, b)| space.contains(a, b)).collect();
            if fock.is_empty() {
                return Err(CohqError::TruncationTooSmall {
                    required_cutoff: d,
                    cutoff: space.cutoff(),
                });
            }
            (rep, d, fock)
        }
        ModelKind::Inverted => {
            return Err(CohqError::UnsupportedModel(
                "the principal series has no normalizable vectors in the Fock space; model C is handled classically"
                    .into(),
            ))
        }
    };
    let fock_indices: Vec<usize> = fock.iter().map(|&(a, b)| space.index_of(a, b).expect("checked")).collect();

    let phi = build_constraint(spec);
    let gen = build_generators(spec);
    let h = spec.hbar;
    for (level, &idx) in fock_indices.iter().enumerate() {
        let expected_z = match rep.series {
            Series::Su2Spin => h * (level as f64 - rep.value),
            _ => h * (rep.value + level as f64),
        };
        let phi_val = phi.matrix()[(idx, idx)].norm();
        let z_val = gen.z.matrix()[(idx, idx)].re;
        if phi_val > 1e-9 * h.max(1.0) || (z_val - expected_z).abs() > 1e-9 * h.max(1.0) {
            return Err(CohqError::Domain(format!(
                "embedding check failed at level {level}: phi={phi_val}, Z={z_val}, expected {expected_z}"
            )));
        }
    }
    Ok(IrrepEmbedding {
        rep,
        space,
        fock_indices,
        shift,
    })
}

/// SU(2) coherent-state coefficients `c_i`, `i = j+m = 0..2j`:
/// `√C(2j,i) (1+|ζ|²)^{-j} ζ^i`, evaluated in log space.
pub fn su2_coefficients(two_j: usize, zeta: C64) -> Vec<C64> {
    let r = zeta.norm();
    let arg = zeta.arg();
    let j = two_j as f64 / 2.0;
    let ln_norm = -j * (1.0 + r * r).ln();
    (0..=two_j)
        .map(|i| {
            if r == 0.0 {
                return if i == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            }
            let ln_binom = ln_factorial(two_j) - ln_factorial(i) - ln_factorial(two_j - i);
            let ln_mag = 0.5 * ln_binom + ln_norm + i as f64 * r.ln();
            C64::from_polar(ln_mag.exp(), i as f64 * arg)
        })
        .collect()
}

/// Discrete-series coefficients for levels `0..levels`:
/// `(1−|ζ|²)^k √(Γ(n+2k)/(n! Γ(2k))) ζ^n`.
pub fn su11_coefficients(k: f64, zeta: C64, levels: usize) -> Result<Vec<C64>> {
    let r = zeta.norm();
    if !(r < 1.0) {
        return Err(CohqError::Domain(format!("|zeta| = {r} is outside the unit disk")));
    }
    let arg = zeta.arg();
    let ln_norm = k * (1.0 - r * r).ln();
    Ok((0..levels)
        .map(|n| {
            if r == 0.0 {
                return if n == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            }
            let ln_mag = ln_norm + 0.5 * ln_pochhammer_ratio(n, 2.0 * k) + n as f64 * r.ln();
            C64::from_polar(ln_mag.exp(), n as f64 * arg)
        })
        .collect())
}

/// Upper bound on the discrete-series probability beyond the first `levels`
/// levels. Successive probability ratios `x(m+2k)/(m+1)` are nonincreasing
/// for `2k ≥ 1`, so the tail is dominated by a geometric series.
pub fn su11_tail_bound(k: f64, x: f64, levels: usize) -> f64 {
    if x == 0.0 {
        return if levels == 0 { 1.0 } else { 0.0 };
    }
    let l = levels as f64;
    let ratio = x * (l + 2.0 * k) / (l + 1.0);
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    let ln_p = k * 2.0 * (1.0 - x).ln() + ln_pochhammer_ratio(levels, 2.0 * k) + l * x.ln();
    (ln_p.exp() / (1.0 - ratio)).min(1.0)
}

/// Fewest levels whose tail bound is at most `eps`.
pub fn su11_required_levels(k: f64, x: f64, eps: f64) -> usize {
    let mut l = 1;
    while su11_tail_bound(k, x, l) > eps {
        l += 1;
        if l > 1_000_000 {
            break;
        }
    }
    l
}

/// A truncated coherent ket together with the probability it lost.
#[derive(Clone, Debug)]
pub struct CoherentKet {
    pub ket: Ket,
    pub tail: f64,
}

pub fn su2_state(emb: &IrrepEmbedding, zeta: C64) -> Result<Ket> {
    if emb.rep.series != Series::Su2Spin {
        return Err(CohqError::Usage("SU(2) coherent state requested on a non-spin embedding".into()));
    }
    Ok(emb.lift(&su2_coefficients(emb.rep.twice(), zeta)))
}

/// Discrete-series coherent state on the embedded levels. Fails with
/// `TruncationTooSmall` when the omitted probability would exceed `tail_eps`.
pub fn su11_state(emb: &IrrepEmbedding, zeta: C64, tail_eps: f64) -> Result<CoherentKet> {
    if emb.rep.series != Series::Su11Discrete {
        return Err(CohqError::Usage("SU(1,1) coherent state requested on a non-discrete embedding".into()));
    }
    let k = emb.rep.value;
    let x = zeta.norm_sqr();
    let levels = emb.levels();
    let tail = su11_tail_bound(k, x, levels);
    if !(tail <= tail_eps) {
        let need = su11_required_levels(k, x, tail_eps);
        return Err(CohqError::TruncationTooSmall {
            required_cutoff: emb.cutoff_for_levels(need),
            cutoff: emb.space.cutoff(),
        });
    }
    let coeffs = su11_coefficients(k, zeta, levels)?;
    Ok(CoherentKet {
        ket: emb.lift(&coeffs),
        tail,
    })
}

fn poisson_tail(mean: f64, cutoff: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    Poisson::new(mean).map(|p| p.sf(cutoff as u64)).unwrap_or(1.0)
}

/// Product of oscillator coherent states `|z1⟩⊗|z2⟩` restricted to the
/// truncation. `tail` is the exact probability outside it.
pub fn hw_state(space: &Arc<FockSpace>, z1: C64, z2: C64) -> CoherentKet {
    let amp = |z: C64, n: usize| -> C64 {
        if n == 0 {
            return C64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
        }
        if z.norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let ln_mag = -0.5 * z.norm_sqr() + n as f64 * z.norm().ln() - 0.5 * ln_factorial(n);
        C64::from_polar(ln_mag.exp(), n as f64 * z.arg())
    };
    let amps = DVector::from_iterator(
        space.dim(),
        space.basis().iter().map(|&(a, b)| amp(z1, a) * amp(z2, b)),
    );
    let n = space.cutoff();
    let tail = match space.scheme() {
        CutoffScheme::TotalQuanta => poisson_tail(z1.norm_sqr() + z2.norm_sqr(), n),
        CutoffScheme::PerMode => {
            let (t1, t2) = (poisson_tail(z1.norm_sqr(), n), poisson_tail(z2.norm_sqr(), n));
            t1 + t2 - t1 * t2
        }
    };
    CoherentKet {
        ket: Ket::from_amplitudes(space.clone(), amps).expect("dimension matches"),
        tail,
    }
}

/// `⟨ψ|A|ψ⟩ / ⟨ψ|ψ⟩`.
pub fn expectation(op: &LinOp, ket: &Ket) -> Result<C64> {
    let n = ket.norm_sqr();
    if n == 0.0 {
        return Err(CohqError::ZeroNorm);
    }
    Ok(inner(ket, &op.apply(ket)?)? / n)
}

/// `⟨A²⟩ − ⟨A⟩²` for a Hermitian `A`.
pub fn variance(op: &LinOp, ket: &Ket) -> Result<f64> {
    let n = ket.norm_sqr();
    if n == 0.0 {
        return Err(CohqError::ZeroNorm);
    }
    let av = op.apply(ket)?;
    let mean = inner(ket, &av)?.re / n;
    Ok(av.norm_sqr() / n - mean * mean)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    /// Upper end of the radial integration on the unit disk.
    pub su11_radial_cutoff: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            radial_nodes: 64,
            angular_nodes: 64,
            su11_radial_cutoff: 0.999_999_9,
        }
    }
}

const REFINEMENT: [usize; 5] = [4, 8, 16, 32, 64];
/// Thresholds for [`resolution_of_identity_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolutionTolerances {
    /// Bound on `‖Q − I‖`.
    pub deviation: f64,
    /// Largest allowed increase between successive spin refinement grids.
    pub monotone: f64,
    /// Bound on `‖Q + diag(T) − I‖` for the discrete series.
    pub tail_consistency: f64,
}

impl ResolutionTolerances {
    pub fn new(deviation: f64) -> Self {
        ResolutionTolerances {
            deviation,
            monotone: 1e-12,
            tail_consistency: 1e-10,
        }
    }
}

fn outer_weighted(c: &[C64], w: f64) -> DMatrix<C64> {
    let v = DVector::from_column_slice(c);
    &v * v.adjoint() * C64::new(w, 0.0)
}

/// `Σ w |c⟩⟨c|` over the SU(2) coset with `ζ = −tan(μ/2) e^{−iν}`.
pub fn su2_frame_operator(two_j: usize, radial: usize, angular: usize) -> DMatrix<C64> {
    let j2 = two_j as f64;
    let mut parts = Vec::with_capacity(radial * angular);
    for (mu, wmu) in gauss_legendre_on(radial, 0.0, PI) {
        let r = (mu / 2.0).tan();
        let dr = 0.5 / (mu / 2.0).cos().powi(2);
        let measure = (j2 + 1.0) / (PI * (1.0 + r * r).powi(2)) * r * dr;
        for &(nu, wnu) in &periodic_trapezoid(angular) {
            let zeta = -C64::from_polar(r, -nu);
            parts.push(outer_weighted(&su2_coefficients(two_j, zeta), measure * wmu * wnu));
        }
    }
    pairwise_sum(&parts).unwrap_or_else(|| DMatrix::zeros(two_j + 1, two_j + 1))
}

/// `Σ w |c⟩⟨c|` over the disk `|ζ| ≤ r_c` for the first `levels` levels.
pub fn su11_frame_operator(k: f64, levels: usize, quad: &QuadratureSpec) -> Result<DMatrix<C64>> {
    let mut parts = Vec::with_capacity(quad.radial_nodes * quad.angular_nodes);
    for (r, wr) in gauss_legendre_on(quad.radial_nodes, 0.0, quad.su11_radial_cutoff) {
        let measure = (2.0 * k - 1.0) / (PI * (1.0 - r * r).powi(2)) * r;
        for &(nu, wnu) in &periodic_trapezoid(quad.angular_nodes) {
            let c = su11_coefficients(k, C64::from_polar(r, nu), levels)?;
            parts.push(outer_weighted(&c, measure * wr * wnu));
        }
    }
    Ok(pairwise_sum(&parts).unwrap_or_else(|| DMatrix::zeros(levels, levels)))
}

/// Disk mass outside `|ζ| ≤ r_c` for level `n`: `I_{1−r_c²}(2k−1, n+1)`.
pub fn su11_level_tail(k: f64, n: usize, r_c: f64) -> f64 {
    let s = r_c * r_c;
    beta_reg(2.0 * k - 1.0, n as f64 + 1.0, 1.0 - s)
}

fn identity_deviation(q: &DMatrix<C64>) -> f64 {
    let id = DMatrix::<C64>::identity(q.nrows(), q.ncols());
    hermitian_norm(&(q - id))
}

/// Checks `∫ dμ |ζ⟩⟨ζ| = 1` by quadrature on the irrep carried by `emb`.
///
/// For spin the rule is refined through `n×n` grids (4..64) and the
/// deviation sequence must be nonincreasing. For the discrete series the
/// deviation is dominated by the disk excluded beyond the radial cutoff, and
/// the quadrature itself is checked against that analytic tail.
pub fn resolution_of_identity_check(
    emb: &IrrepEmbedding,
    quad: &QuadratureSpec,
    tol: ResolutionTolerances,
) -> Result<CheckReport> {
    let mut report = CheckReport::new("resolve-identity");
    match emb.rep.series {
        Series::Su2Spin => {
            let two_j = emb.rep.twice();
            let mut table = Table::new(&["nodes", "deviation"]);
            let mut seq = Vec::new();
            for n in REFINEMENT {
                let dev = identity_deviation(&su2_frame_operator(two_j, n, n));
                table.push(vec![Cell::Num(n as f64), Cell::Num(dev)]);
                seq.push(dev);
            }
            let dev = identity_deviation(&su2_frame_operator(two_j, quad.radial_nodes, quad.angular_nodes));
            report.push(CheckRecord::at_most(format!("SU2 j={} ||Q-I||", emb.rep.value), dev, tol.deviation));
            let worst_rise = seq.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
            report.push(
                CheckRecord::at_most("SU2 refinement monotone", worst_rise.max(0.0), tol.monotone)
                    .with_note("largest increase between successive grids"),
            );
            report.table("su2_refinement", table);
        }
        Series::Su11Discrete => {
            let k = emb.rep.value;
            if !(k > 0.5) {
                return Err(CohqError::Domain(format!(
                    "the disk measure vanishes for k = {k}; resolution of identity needs k > 1/2"
                )));
            }
            let levels = emb.levels();
            let r_c = quad.su11_radial_cutoff;
            if !(r_c > 0.0 && r_c < 1.0) {
                return Err(CohqError::config("su11_radial_cutoff", format!("must lie in (0, 1), got {r_c}")));
            }
            let q = su11_frame_operator(k, levels, quad)?;
            let tails: Vec<f64> = (0..levels).map(|n| su11_level_tail(k, n, r_c)).collect();
            let dev = identity_deviation(&q);
            let mut compensated = q.clone();
            for (n, t) in tails.iter().enumerate() {
                compensated[(n, n)] += C64::new(*t, 0.0);
            }
            let consistency = identity_deviation(&compensated);
            let max_tail = tails.iter().cloned().fold(0.0, f64::max);
            report.push(CheckRecord::at_most(format!("SU11 k={k} ||Q-I||"), dev, tol.deviation));
            report.push(
                CheckRecord::at_most("SU11 quadrature vs analytic tail", consistency, tol.tail_consistency)
                    .with_note("||Q + diag(T) - I||"),
            );
            report.env("su11_levels", levels);
            report.env("su11_max_radial_tail", max_tail);
            let mut table = Table::new(&["level", "tail"]);
            for (n, t) in tails.iter().enumerate() {
                table.push(vec![Cell::Num(n as f64), Cell::Num(*t)]);
            }
            report.table("su11_tail", table);
        }
        Series::Su11Principal => {
            return Err(CohqError::UnsupportedModel("no coherent-state frame for the principal series".into()))
        }
    }
    report.env("quadrature", quad);
    Ok(report)
}

/// Robertson bound `ΔX·ΔY ≥ (ħ/2)|⟨Z⟩|` at every label, and equality at `ζ = 0`.
pub fn check_uncertainty(
    emb: &IrrepEmbedding,
    gen: &GeneratorTriple,
    hbar: f64,
    zetas: &[C64],
    tol: f64,
    tail_eps: f64,
) -> Result<CheckReport> {
    let [nx, ny, nz] = gen.names();
    let mut report = CheckReport::new("uncertainty");
    let mut all = vec![C64::new(0.0, 0.0)];
    all.extend(zetas.iter().copied().filter(|z| z.norm() != 0.0));
    for zeta in all {
        let ket = match emb.rep.series {
            Series::Su2Spin => su2_state(emb, zeta)?,
            _ => su11_state(emb, zeta, tail_eps)?.ket,
        };
        let prod = (variance(&gen.x, &ket)?.max(0.0) * variance(&gen.y, &ket)?.max(0.0)).sqrt();
        let bound = 0.5 * hbar * expectation(&gen.z, &ket)?.re.abs();
        let tag = format!("{}{:+}i", zeta.re, zeta.im);
        if zeta.norm() == 0.0 {
            report.push(CheckRecord::at_most(
                format!("d{nx} d{ny} = hbar/2 |<{nz}>| at zeta=0"),
                (prod - bound).abs(),
                tol,
            ));
        } else {
            report.push(CheckRecord::at_least(
                format!("d{nx} d{ny} - hbar/2 |<{nz}>| at zeta={tag}"),
                prod - bound,
                -tol,
            ));
        }
    }
    Ok(report)
}
