//! Group averaging realized as a spectral projector onto `ker φ`, plus the
//! checks that kinematical and physical inner products, matrix elements and
//! fluctuations coincide for states inside the selected irrep.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::coherent::{embed_irrep, hw_state, su11_state, su2_coefficients, su2_frame_operator, su2_state, CoherentLabel, IrrepEmbedding};
use crate::error::{CohqError, Result};
use crate::fock::{inner, FockSpace, Ket, LinOp, C64};
use crate::models::{build_constraint, casimir, required_margin, GeneratorTriple, ModelKind, ModelSpec};
use crate::numerics::{expm, hermitian_eigen};
use crate::report::{CheckRecord, CheckReport};

#[derive(Clone, Debug)]
pub struct PhysicalProjector {
    pub p: LinOp,
    pub kernel_dim: usize,
    pub eigen_tolerance: f64,
    /// Orthonormal basis of the kernel, one column per vector.
    pub kernel_basis: DMatrix<C64>,
}

impl PhysicalProjector {
    pub fn space(&self) -> &Arc<FockSpace> {
        self.p.space()
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        self.p.apply(ket)
    }
}

/// Sum of eigenprojectors of `phi` with `|eigenvalue| ≤ tol · max(1, ‖phi‖)`.
///
/// Diagonal input takes an exact 0/1 path; anything else goes through a
/// Hermitian eigendecomposition.
pub fn spectral_kernel_projector(phi: &LinOp, tol: f64) -> Result<PhysicalProjector> {
    let space = phi.space().clone();
    let dim = phi.dim();
    let (p, basis, eigen_tolerance) = if phi.is_diagonal() {
        let diag: Vec<f64> = (0..dim).map(|i| phi.matrix()[(i, i)].re).collect();
        let scale = diag.iter().map(|v| v.abs()).fold(1.0, f64::max);
        let cut = tol * scale;
        let kept: Vec<usize> = (0..dim).filter(|&i| diag[i].abs() <= cut).collect();
        let p = LinOp::diagonal(space.clone(), |a, b| {
            let i = space.index_of(a, b).expect("in space");
            if diag[i].abs() <= cut {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let basis = DMatrix::from_fn(dim, kept.len(), |r, c| {
            if r == kept[c] {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        (p, basis, cut)
    } else {
        let (vals, vecs) = hermitian_eigen(phi.matrix());
        let scale = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
        let cut = tol * scale;
        let kept: Vec<usize> = (0..dim).filter(|&i| vals[i].abs() <= cut).collect();
        let basis = DMatrix::from_fn(dim, kept.len(), |r, c| vecs[(r, kept[c])]);
        let p = LinOp::from_matrix(space.clone(), &basis * basis.adjoint())?;
        (p, basis, cut)
    };
    let kernel_dim = basis.ncols();
    if kernel_dim == 0 {
        return Err(CohqError::NoPhysicalStates(
            "the constraint has no eigenvalue within tolerance of zero on this truncation".into(),
        ));
    }
    Ok(PhysicalProjector {
        p,
        kernel_dim,
        eigen_tolerance,
        kernel_basis: basis,
    })
}

/// Projector onto the physical states of models A and B.
pub fn group_average_projector(spec: &ModelSpec, tol: f64) -> Result<PhysicalProjector> {
    if spec.model == ModelKind::Inverted {
        return Err(CohqError::UnsupportedModel(
            "the inverted-oscillator constraint has continuous spectrum and a non-compact gauge group; \
             no projector is formed"
                .into(),
        ));
    }
    spectral_kernel_projector(&build_constraint(spec), tol)
}

/// `(1/M) Σ_l exp(−i λ_l φ/ħ)` on the periodic trapezoid grid `λ_l = 2πl/M`,
/// using a series exponential rather than the eigendecomposition.
pub fn lambda_average(phi: &LinOp, hbar: f64, nodes: usize) -> Result<LinOp> {
    if nodes == 0 {
        return Err(CohqError::config("nodes", "need at least one quadrature node"));
    }
    let gen = phi.matrix() * C64::new(0.0, -1.0 / hbar);
    let mut acc = DMatrix::<C64>::zeros(phi.dim(), phi.dim());
    for l in 0..nodes {
        let lambda = TAU * l as f64 / nodes as f64;
        acc += expm(&(&gen * C64::new(lambda, 0.0)));
    }
    LinOp::from_matrix(phi.space().clone(), acc / C64::new(nodes as f64, 0.0))
}

/// Minimum trapezoid node count that resolves every frequency of `φ/ħ`.
pub fn lambda_nodes_needed(phi: &LinOp, hbar: f64) -> usize {
    let (vals, _) = hermitian_eigen(phi.matrix());
    let top = vals.iter().map(|v| (v / hbar).abs()).fold(0.0, f64::max);
    2 * top.ceil() as usize + 1
}

/// `⟨ψ|P|ψ'⟩`.
pub fn physical_inner(proj: &PhysicalProjector, bra: &Ket, ket: &Ket) -> Result<C64> {
    inner(bra, &proj.apply(ket)?)
}

fn physical_norm_sqr(proj: &PhysicalProjector, ket: &Ket) -> Result<f64> {
    let n = physical_inner(proj, ket, ket)?.re;
    if !(n > 1e-300) {
        return Err(CohqError::NotPhysical);
    }
    Ok(n)
}

/// `⟨ψ|P A|ψ'⟩`, normalized by the physical norms of both states.
pub fn physical_matrix_element(proj: &PhysicalProjector, op: &LinOp, bra: &Ket, ket: &Ket) -> Result<C64> {
    let nb = physical_norm_sqr(proj, bra)?;
    let nk = physical_norm_sqr(proj, ket)?;
    let val = inner(bra, &proj.apply(&op.apply(ket)?)?)?;
    Ok(val / (nb * nk).sqrt())
}

pub fn physical_expectation(proj: &PhysicalProjector, op: &LinOp, ket: &Ket) -> Result<C64> {
    physical_matrix_element(proj, op, ket, ket)
}

/// Physical `⟨A²⟩ − ⟨A⟩²`, with the state normalized in the physical inner product.
pub fn physical_fluctuation(proj: &PhysicalProjector, op: &LinOp, ket: &Ket) -> Result<f64> {
    let n = physical_norm_sqr(proj, ket)?;
    let a_psi = op.apply(ket)?;
    let mean = inner(ket, &proj.apply(&a_psi)?)?.re / n;
    let second = inner(&a_psi, &proj.apply(&a_psi)?)?.re / n;
    Ok(second - mean * mean)
}

fn kin_matrix_element(op: &LinOp, bra: &Ket, ket: &Ket) -> Result<C64> {
    let nb = bra.norm_sqr();
    let nk = ket.norm_sqr();
    if nb == 0.0 || nk == 0.0 {
        return Err(CohqError::ZeroNorm);
    }
    Ok(inner(bra, &op.apply(ket)?)? / (nb * nk).sqrt())
}

fn kin_fluctuation(op: &LinOp, ket: &Ket) -> Result<f64> {
    crate::coherent::variance(op, ket)
}

/// Group-averaged oscillator coherent state `P |z1, z2⟩`.
pub fn average_hw_state(proj: &PhysicalProjector, z1: C64, z2: C64, tail_eps: f64) -> Result<Ket> {
    let st = hw_state(proj.space(), z1, z2);
    if st.tail > tail_eps {
        return Err(CohqError::TruncationTooSmall {
            required_cutoff: proj.space().cutoff() + 1,
            cutoff: proj.space().cutoff(),
        });
    }
    proj.apply(&st.ket)
}

/// The averaged state written as the explicit gauge integral
/// `(1/2π) ∫ dλ e^{−iλc} |z1 e^{iλ}, z2 e^{±iλ}⟩`, with `c = R²/2ħ − 1` and
/// `+` for model A, `c = R²/2ħ` and `−` for model B.
pub fn average_hw_by_quadrature(spec: &ModelSpec, z1: C64, z2: C64, nodes: usize) -> Result<Ket> {
    let (c, s2) = match spec.model {
        ModelKind::OscSum => (spec.offset() - 1.0, 1.0),
        ModelKind::OscDiff => (spec.offset(), -1.0),
        ModelKind::Inverted => {
            return Err(CohqError::UnsupportedModel("no compact gauge orbit for model C".into()));
        }
    };
    let mut acc = Ket::zeros(spec.space.clone());
    for l in 0..nodes {
        let lambda = TAU * l as f64 / nodes as f64;
        let rot1 = z1 * C64::from_polar(1.0, lambda);
        let rot2 = z2 * C64::from_polar(1.0, s2 * lambda);
        let st = hw_state(&spec.space, rot1, rot2);
        acc = acc.add(&st.ket.scale(C64::from_polar(1.0 / nodes as f64, -lambda * c)))?;
    }
    Ok(acc)
}

/// Kernel facts behind the representation selection.
#[derive(Clone, Debug)]
pub struct KernelSummary {
    pub kernel_dim: usize,
    /// Eigenvalues of the Casimir compressed to interior kernel vectors, in units of ħ².
    pub casimir_eigenvalues: Vec<f64>,
    /// Number of kernel vectors annihilated by the lowering operator.
    pub lowest_weight_count: usize,
}

pub fn kernel_summary(
    spec: &ModelSpec,
    proj: &PhysicalProjector,
    gen: &GeneratorTriple,
    margin: usize,
) -> Result<KernelSummary> {
    let space = &spec.space;
    let interior: Vec<usize> = space.interior_indices(margin)?;
    let basis = &proj.kernel_basis;
    // kernel vectors supported on interior rows only
    let cols: Vec<usize> = (0..basis.ncols())
        .filter(|&c| {
            (0..basis.nrows()).all(|r| basis[(r, c)].norm() < 1e-12 || interior.binary_search(&r).is_ok())
        })
        .collect();
    let k_int = DMatrix::from_fn(basis.nrows(), cols.len(), |r, c| basis[(r, cols[c])]);
    let c2 = casimir(gen);
    let compressed = k_int.adjoint() * c2.matrix() * &k_int;
    let h2 = spec.hbar * spec.hbar;
    let casimir_eigenvalues = if compressed.is_empty() {
        Vec::new()
    } else {
        hermitian_eigen(&compressed).0.into_iter().map(|v| v / h2).collect()
    };
    let lowered = gen.lowering().matrix() * basis;
    let svd = lowered.svd(false, false);
    let scale = svd.singular_values.iter().cloned().fold(spec.hbar, f64::max);
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-9 * scale).count();
    Ok(KernelSummary {
        kernel_dim: proj.kernel_dim,
        casimir_eigenvalues,
        lowest_weight_count: basis.ncols() - rank,
    })
}

/// Kernel dimension, Casimir value on the kernel, and multiplicity one.
pub fn check_rep_selection(spec: &ModelSpec, proj: &PhysicalProjector, gen: &GeneratorTriple, tol: f64) -> Result<CheckReport> {
    let emb = embed_irrep(spec)?;
    let margin = required_margin(spec.model, spec.space.scheme());
    let summary = kernel_summary(spec, proj, gen, margin)?;
    let expected = emb.rep.casimir_value();
    let mut report = CheckReport::new("select-rep");
    report.push(CheckRecord::at_most(
        "kernel dimension matches irrep levels",
        (summary.kernel_dim as f64 - emb.levels() as f64).abs(),
        0.0,
    ));
    let dev = summary
        .casimir_eigenvalues
        .iter()
        .map(|v| (v - expected).abs())
        .fold(0.0, f64::max);
    let rec = CheckRecord::at_most("Casimir on kernel", dev, tol);
    report.push(if summary.casimir_eigenvalues.is_empty() {
        CheckRecord::skipped("Casimir on kernel", "no kernel vector clears the interior margin")
    } else {
        rec
    });
    report.push(CheckRecord::at_most(
        "single lowest-weight vector",
        (summary.lowest_weight_count as f64 - 1.0).abs(),
        0.0,
    ));
    report.env("rep", emb.rep);
    report.env("kernel_dim", summary.kernel_dim);
    report.env("casimir_expected", expected);
    if emb.rep.alternate_selection {
        report.push(
            CheckRecord::skipped("alternate root", "R^2 < 2 hbar admits a second root of the Casimir equation")
                .with_note("selection between the roots is left open"),
        );
    }
    Ok(report)
}

/// Projector structure: idempotent, Hermitian, range inside `ker φ`, commutes
/// with the generators on interior vectors, fixes irrep-supported vectors.
pub fn check_projector(spec: &ModelSpec, proj: &PhysicalProjector, gen: &GeneratorTriple, tol_proj: f64, tol_commute: f64) -> Result<CheckReport> {
    let mut report = CheckReport::new("projector");
    let p = &proj.p;
    report.push(CheckRecord::at_most("P^2 = P", p.mul(p)?.max_abs_diff(p)?, tol_proj));
    report.push(CheckRecord::at_most("P = P^dag", p.hermiticity_defect(), tol_proj));
    let phi = build_constraint(spec);
    let phi_p = phi.mul(p)?.max_abs();
    report.push(CheckRecord::at_most("phi P = 0", phi_p, proj.eigen_tolerance.max(tol_proj)));
    let margin = required_margin(spec.model, spec.space.scheme());
    for (op, name) in gen.as_array().into_iter().zip(gen.names()) {
        report.push(CheckRecord::at_most(
            format!("[P,{name}]"),
            p.commutator(op)?.interior_norm(margin)?,
            tol_commute,
        ));
    }
    if let Ok(emb) = embed_irrep(spec) {
        let ones = vec![C64::new(1.0, 0.0); emb.levels()];
        let psi = emb.lift(&ones);
        let fixed = proj.apply(&psi)?.sub(&psi)?.norm();
        report.push(CheckRecord::at_most("P psi = psi on irrep", fixed, tol_proj));
    }
    Ok(report)
}

/// Spectral projector against the explicit gauge-group average.
pub fn check_lambda_oracle(spec: &ModelSpec, proj: &PhysicalProjector, nodes: usize, tol: f64) -> Result<CheckReport> {
    let phi = build_constraint(spec);
    let needed = lambda_nodes_needed(&phi, spec.hbar);
    let mut report = CheckReport::new("lambda-oracle");
    if nodes < needed {
        report.push(CheckRecord::skipped(
            "P = lambda average",
            format!("{nodes} nodes cannot resolve frequencies up to {}", needed / 2),
        ));
        return Ok(report);
    }
    let avg = lambda_average(&phi, spec.hbar, nodes)?;
    report.push(CheckRecord::at_most("P = lambda average", avg.max_abs_diff(&proj.p)?, tol));
    report.env("lambda_nodes", nodes);
    Ok(report)
}

fn label_state(emb: &IrrepEmbedding, label: &CoherentLabel, tail_eps: f64) -> Result<Ket> {
    match (label, emb.rep.series) {
        (CoherentLabel::Su2 { zeta }, crate::models::Series::Su2Spin) => su2_state(emb, *zeta),
        (CoherentLabel::Su11 { zeta }, crate::models::Series::Su11Discrete) => Ok(su11_state(emb, *zeta, tail_eps)?.ket),
        _ => Err(CohqError::Usage(format!("label {label:?} does not belong to the selected irrep"))),
    }
}

fn label_text(label: &CoherentLabel) -> String {
    match label {
        CoherentLabel::Su2 { zeta } | CoherentLabel::Su11 { zeta } => format!("{}{:+}i", zeta.re, zeta.im),
        CoherentLabel::Hw { z1, z2 } => format!("({}{:+}i,{}{:+}i)", z1.re, z1.im, z2.re, z2.im),
    }
}

/// Pairwise kinematical vs physical comparisons over every label pair and
/// generator: inner products, normalized matrix elements, fluctuations.
pub fn verify_kin_phys_equality(
    spec: &ModelSpec,
    proj: &PhysicalProjector,
    gen: &GeneratorTriple,
    labels: &[CoherentLabel],
    tol: f64,
    tail_eps: f64,
) -> Result<CheckReport> {
    let emb = embed_irrep(spec)?;
    let states: Vec<Ket> = labels.iter().map(|l| label_state(&emb, l, tail_eps)).collect::<Result<_>>()?;
    let names: Vec<String> = labels.iter().map(label_text).collect();
    let mut report = CheckReport::new("kin-phys-equality");
    for (a, sa) in states.iter().enumerate() {
        for (b, sb) in states.iter().enumerate() {
            let kin = inner(sa, sb)?;
            let phy = physical_inner(proj, sa, sb)?;
            report.push(CheckRecord::at_most(
                format!("inner <{}|{}>", names[a], names[b]),
                (kin - phy).norm(),
                tol,
            ));
        }
    }
    for (op, gname) in gen.as_array().into_iter().zip(gen.names()) {
        for (a, sa) in states.iter().enumerate() {
            for (b, sb) in states.iter().enumerate() {
                let kin = kin_matrix_element(op, sa, sb)?;
                let phy = physical_matrix_element(proj, op, sa, sb)?;
                report.push(CheckRecord::at_most(
                    format!("element <{}|{gname}|{}>", names[a], names[b]),
                    (kin - phy).norm(),
                    tol,
                ));
            }
        }
        for (a, sa) in states.iter().enumerate() {
            let kin = kin_fluctuation(op, sa)?;
            let phy = physical_fluctuation(proj, op, sa)?;
            report.push(CheckRecord::at_most(
                format!("fluctuation {gname} @ {}", names[a]),
                (kin - phy).abs(),
                tol,
            ));
        }
    }
    Ok(report)
}

/// An oscillator coherent state lies outside the irrep, so its kinematical
/// norm and its physical norm must differ noticeably.
pub fn negative_control(proj: &PhysicalProjector, z1: C64, z2: C64, threshold: f64) -> Result<CheckRecord> {
    let st = hw_state(proj.space(), z1, z2);
    let kin = inner(&st.ket, &st.ket)?;
    let phy = physical_inner(proj, &st.ket, &st.ket)?;
    Ok(CheckRecord::at_least("negative control: hw state breaks kin = phys", (kin - phy).norm(), threshold))
}

/// Inserting the quadrature frame operator twice between two spin coherent
/// states must give back their overlap.
pub fn check_double_frame_collapse(two_j: usize, zetas: &[C64], nodes: usize, tol: f64) -> CheckReport {
    let q = su2_frame_operator(two_j, nodes, nodes);
    let qq = &q * &q;
    let vecs: Vec<nalgebra::DVector<C64>> = zetas
        .iter()
        .map(|z| nalgebra::DVector::from_vec(su2_coefficients(two_j, *z)))
        .collect();
    let mut worst: f64 = 0.0;
    for a in &vecs {
        for b in &vecs {
            let direct = a.dotc(b);
            let collapsed = a.dotc(&(&qq * b));
            worst = worst.max((direct - collapsed).norm());
        }
    }
    let mut report = CheckReport::new("double-frame-collapse");
    report.push(CheckRecord::at_most("double frame insertion = overlap", worst, tol));
    report
}
