//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use cohq_core::classical::{
    classical_observables, constraint_residual, coset_to_reduced, gauge_flow, reduced_distance, reduced_to_coset,
    sign_pattern, surface_point, InvertedBranch, PhasePoint, ReducedCoords, SemiclassicalProbe, SignPattern,
    SurfaceChart,
};
use cohq_core::coherent::{check_uncertainty, embed_irrep, resolution_of_identity_check, ResolutionTolerances};
use cohq_core::fock::make_space;
use cohq_core::models::{
    build_constraint, build_generators, casimir, check_algebra, required_margin,
};
use cohq_core::rigging::{check_lambda_oracle, group_average_projector, negative_control, verify_kin_phys_equality};
use cohq_core::{
    CheckReport, CheckStatus, CoherentLabel, CohqError, CutoffScheme, FockSpace, Ket, ModelKind, ModelSpec,
    QuadratureSpec, RepIndex, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const HBAR: f64 = 1.0;

type Outcome = Result<String, String>;

fn spec(model: ModelKind, r_sq: f64, scheme: CutoffScheme, cutoff: usize) -> ModelSpec {
    ModelSpec::new(model, r_sq, HBAR, make_space(scheme, cutoff).unwrap()).unwrap()
}

fn require(report: &CheckReport) -> Result<(), String> {
    let bad: Vec<String> = report.failures().map(|c| format!("{} = {:e}", c.name, c.measured)).collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad.join("; "))
    }
}

fn worst(report: &CheckReport) -> f64 {
    report
        .checks
        .iter()
        .filter(|c| c.status != CheckStatus::Skipped)
        .map(|c| c.measured.abs())
        .fold(0.0, f64::max)
}

fn interior_basis(space: &Arc<FockSpace>, margin: usize) -> Vec<Ket> {
    space
        .basis()
        .iter()
        .filter(|&&(a, b)| match space.scheme() {
            CutoffScheme::TotalQuanta => a + b + margin <= space.cutoff(),
            CutoffScheme::PerMode => a.max(b) + margin <= space.cutoff(),
        })
        .map(|&(a, b)| Ket::basis(space, a, b).unwrap())
        .collect()
}

fn c1_algebra() -> Outcome {
    let a = spec(ModelKind::OscSum, 6.0, CutoffScheme::TotalQuanta, 10);
    let ra = check_algebra(&build_generators(&a), HBAR, 0, 1e-12, false).map_err(|e| e.to_string())?;
    require(&ra)?;
    let mut detail = format!("A global {:.1e}", worst(&ra));
    for (model, r_sq) in [(ModelKind::OscDiff, 2.0), (ModelKind::Inverted, 4.0)] {
        let s = spec(model, r_sq, CutoffScheme::PerMode, 12);
        let r = check_algebra(&build_generators(&s), HBAR, 4, 1e-11, false).map_err(|e| e.to_string())?;
        require(&r)?;
        detail += &format!(", {} interior {:.1e}", model.letter(), worst(&r));
    }
    Ok(detail)
}

/// `C|v⟩` against `±¼(φ+R²/2)²|v⟩ − ħ²/4|v⟩`, evaluated by repeated application.
fn c2_casimir() -> Outcome {
    let cases = [
        (ModelKind::OscSum, 6.0),
        (ModelKind::OscSum, 10.0),
        (ModelKind::OscDiff, 2.0),
        (ModelKind::OscDiff, 4.0),
        (ModelKind::Inverted, 4.0),
    ];
    let mut max_dev: f64 = 0.0;
    for (model, r_sq) in cases {
        let (scheme, cutoff) = match model {
            ModelKind::OscSum => (CutoffScheme::TotalQuanta, 12),
            _ => (CutoffScheme::PerMode, 12),
        };
        let s = spec(model, r_sq, scheme, cutoff);
        let gen = build_generators(&s);
        let cas = casimir(&gen);
        let phi = build_constraint(&s);
        let sign = if model == ModelKind::Inverted { -0.25 } else { 0.25 };
        for v in interior_basis(&s.space, required_margin(model, scheme)) {
            let shifted = phi.apply(&v).unwrap().add(&v.scale(C64::new(r_sq / 2.0, 0.0))).unwrap();
            let sq = phi.apply(&shifted).unwrap().add(&shifted.scale(C64::new(r_sq / 2.0, 0.0))).unwrap();
            let rhs = sq.scale(C64::new(sign, 0.0)).sub(&v.scale(C64::new(HBAR * HBAR / 4.0, 0.0))).unwrap();
            let dev = cas.apply(&v).unwrap().sub(&rhs).unwrap().norm();
            max_dev = max_dev.max(dev);
        }
    }
    if max_dev <= 1e-10 {
        Ok(format!("max deviation {max_dev:.1e} over 5 (model, R^2) pairs"))
    } else {
        Err(format!("max deviation {max_dev:e}"))
    }
}

fn c3_selection() -> Outcome {
    let a = spec(ModelKind::OscSum, 6.0, CutoffScheme::TotalQuanta, 10);
    let pa = group_average_projector(&a, 1e-9).map_err(|e| e.to_string())?;
    if pa.kernel_dim != 3 {
        return Err(format!("model A kernel dimension {}", pa.kernel_dim));
    }
    let j = (-1.0 + 6.0 / (2.0 * HBAR)) / 2.0;
    let cas_a = casimir(&build_generators(&a));
    let mut dev_a: f64 = 0.0;
    for col in 0..pa.kernel_basis.ncols() {
        let v = Ket::from_amplitudes(a.space.clone(), pa.kernel_basis.column(col).into_owned()).unwrap();
        let cv = cas_a.apply(&v).unwrap();
        dev_a = dev_a.max(cv.sub(&v.scale(C64::new(j * (j + 1.0) * HBAR * HBAR, 0.0))).unwrap().norm());
    }
    if dev_a > 1e-10 {
        return Err(format!("model A Casimir off j(j+1) by {dev_a:e}"));
    }

    let b = spec(ModelKind::OscDiff, 2.0, CutoffScheme::PerMode, 12);
    let pb = group_average_projector(&b, 1e-9).map_err(|e| e.to_string())?;
    let k = (1.0 + 2.0 / (2.0 * HBAR)) / 2.0;
    let cas_b = casimir(&build_generators(&b));
    let mut dev_b: f64 = 0.0;
    for n in 0..=12 - required_margin(ModelKind::OscDiff, CutoffScheme::PerMode) {
        let v = Ket::basis(&b.space, n + 1, n).unwrap();
        if (pb.apply(&v).unwrap().sub(&v).unwrap()).norm() > 1e-12 {
            return Err(format!("model B |{},{}> not in the kernel", n + 1, n));
        }
        let cv = cas_b.apply(&v).unwrap();
        dev_b = dev_b.max(cv.sub(&v.scale(C64::new(k * (k - 1.0) * HBAR * HBAR, 0.0))).unwrap().norm());
    }
    if dev_b > 1e-10 {
        return Err(format!("model B Casimir off k(k-1) by {dev_b:e}"));
    }

    let bad = spec(ModelKind::OscSum, 5.0, CutoffScheme::TotalQuanta, 10);
    match group_average_projector(&bad, 1e-9) {
        Err(CohqError::NoPhysicalStates(_)) => {}
        other => return Err(format!("model A R^2=5 gave {:?}", other.map(|p| p.kernel_dim))),
    }
    Ok(format!(
        "A: dim 3, C2 = {} (dev {dev_a:.1e}); B: C2 = {} (dev {dev_b:.1e}); A R^2=5: NoPhysicalStates",
        j * (j + 1.0),
        k * (k - 1.0)
    ))
}

fn c4_kin_phys() -> Outcome {
    let mut detail = Vec::new();
    let cases = [
        (
            spec(ModelKind::OscSum, 6.0, CutoffScheme::TotalQuanta, 10),
            [C64::new(0.0, 0.0), C64::new(0.5, 0.0), C64::new(1.0, 1.0), C64::new(-2.0, 0.3)],
        ),
        (
            spec(ModelKind::OscDiff, 2.0, CutoffScheme::PerMode, 24),
            [C64::new(0.0, 0.0), C64::from_polar(0.3, PI / 4.0), C64::new(0.0, -0.5), C64::new(-0.2, 0.4)],
        ),
    ];
    for (s, zetas) in cases {
        let proj = group_average_projector(&s, 1e-9).map_err(|e| e.to_string())?;
        let labels: Vec<CoherentLabel> = zetas
            .iter()
            .map(|&zeta| match s.model {
                ModelKind::OscSum => CoherentLabel::Su2 { zeta },
                _ => CoherentLabel::Su11 { zeta },
            })
            .collect();
        let r = verify_kin_phys_equality(&s, &proj, &build_generators(&s), &labels, 1e-10, 1e-12)
            .map_err(|e| e.to_string())?;
        require(&r)?;
        let ctl = negative_control(&proj, C64::new(1.0, 0.0), C64::new(1.0, 0.0), 1e-3).map_err(|e| e.to_string())?;
        if !ctl.passed() {
            return Err(format!("model {} negative control only {:e}", s.model.letter(), ctl.measured));
        }
        detail.push(format!(
            "{}: {} checks max {:.1e}, control {:.2}",
            s.model.letter(),
            r.checks.len(),
            worst(&r),
            ctl.measured
        ));
    }
    Ok(detail.join("; "))
}

fn c5_resolution() -> Outcome {
    let quad = QuadratureSpec::default();
    let a = spec(ModelKind::OscSum, 6.0, CutoffScheme::TotalQuanta, 10);
    let ra = resolution_of_identity_check(&embed_irrep(&a).unwrap(), &quad, ResolutionTolerances::new(1e-8)).map_err(|e| e.to_string())?;
    require(&ra)?;
    let b = spec(ModelKind::OscDiff, 2.0, CutoffScheme::PerMode, 24);
    let emb_b = embed_irrep(&b).unwrap();
    let rb = resolution_of_identity_check(&emb_b, &quad, ResolutionTolerances::new(1e-4)).map_err(|e| e.to_string())?;
    require(&rb)?;
    let tail = rb.environment.get("su11_max_radial_tail").and_then(|v| v.as_f64()).ok_or("no tail reported")?;

    let mut half = emb_b.clone();
    half.rep = RepIndex::su11_discrete(0.5).unwrap();
    if !matches!(resolution_of_identity_check(&half, &quad, ResolutionTolerances::new(1e-4)), Err(CohqError::Domain(_))) {
        return Err("k = 1/2 accepted".into());
    }
    if RepIndex::su11_discrete(0.3).is_ok() {
        return Err("k = 0.3 accepted".into());
    }
    Ok(format!(
        "SU2 j=1 {:.1e} (monotone), SU11 k=1 {:.1e} at r_c={} with tail {:.1e}, k<=1/2 rejected",
        ra.find("SU2 j=1 ||Q-I||").unwrap().measured,
        rb.find("SU11 k=1 ||Q-I||").unwrap().measured,
        quad.su11_radial_cutoff,
        tail
    ))
}

fn c6_lambda_oracle() -> Outcome {
    let mut detail = Vec::new();
    for s in [
        spec(ModelKind::OscSum, 6.0, CutoffScheme::TotalQuanta, 6),
        spec(ModelKind::OscSum, 4.0, CutoffScheme::PerMode, 6),
        spec(ModelKind::OscDiff, 2.0, CutoffScheme::PerMode, 6),
        spec(ModelKind::OscDiff, 4.0, CutoffScheme::TotalQuanta, 6),
    ] {
        let proj = group_average_projector(&s, 1e-9).map_err(|e| e.to_string())?;
        let r = check_lambda_oracle(&s, &proj, 64, 1e-12).map_err(|e| e.to_string())?;
        if r.checks.iter().any(|c| c.status != CheckStatus::Pass) {
            return Err(format!("model {} {}: {}", s.model.letter(), s.space.scheme(), r.summary()));
        }
        detail.push(format!("{}/{} {:.1e}", s.model.letter(), s.space.scheme(), worst(&r)));
    }
    Ok(detail.join(", "))
}

/// Hamilton's equations for the classical constraint, integrated by RK4.
fn flow_rk4(model: ModelKind, pt: &PhasePoint, lambda: f64, steps: usize) -> PhasePoint {
    let field = |x: [f64; 4]| -> [f64; 4] {
        let [q1, p1, q2, p2] = x;
        let (dq1, dp1, dq2, dp2) = match model {
            ModelKind::OscSum => (q1, p1, q2, p2),
            ModelKind::OscDiff => (q1, p1, -q2, -p2),
            ModelKind::Inverted => (-q1, p1, -q2, p2),
        };
        [dp1, -dq1, dp2, -dq2]
    };
    let mut x = [pt.q1, pt.p1, pt.q2, pt.p2];
    let h = lambda / steps as f64;
    let axpy = |x: [f64; 4], k: [f64; 4], s: f64| [x[0] + s * k[0], x[1] + s * k[1], x[2] + s * k[2], x[3] + s * k[3]];
    for _ in 0..steps {
        let k1 = field(x);
        let k2 = field(axpy(x, k1, h / 2.0));
        let k3 = field(axpy(x, k2, h / 2.0));
        let k4 = field(axpy(x, k3, h));
        for i in 0..4 {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    PhasePoint::new(x[0], x[1], x[2], x[3])
}

fn random_chart(rng: &mut ChaCha8Rng, model: ModelKind) -> SurfaceChart {
    match model {
        ModelKind::OscSum => SurfaceChart::Sphere {
            theta: rng.random_range(0.0..PI / 2.0),
            phi1: rng.random_range(0.0..TAU),
            phi2: rng.random_range(0.0..TAU),
        },
        ModelKind::OscDiff => SurfaceChart::Hyperboloid {
            xi: rng.random_range(0.0..3.0),
            phi1: rng.random_range(0.0..TAU),
            phi2: rng.random_range(0.0..TAU),
        },
        ModelKind::Inverted => {
            if rng.random_bool(0.5) {
                SurfaceChart::InvertedGroup {
                    mu: rng.random_range(0.0..3.0),
                    gamma1: rng.random_range(0.0..TAU),
                    gamma2: rng.random_range(0.0..TAU),
                }
            } else {
                let branch = InvertedBranch::ALL[rng.random_range(0..3)];
                let xi = if branch == InvertedBranch::Case3 { rng.random_range(0.01..3.0) } else { rng.random_range(-3.0..3.0) };
                SurfaceChart::InvertedBranch {
                    branch,
                    xi,
                    eta1: rng.random_range(-2.0..2.0),
                    eta2: rng.random_range(-2.0..2.0),
                }
            }
        }
    }
}

fn c7_classical() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut res: f64 = 0.0;
    let mut obs: f64 = 0.0;
    let mut oracle: f64 = 0.0;
    for (model, r_sq) in [(ModelKind::OscSum, 6.0), (ModelKind::OscDiff, 2.0), (ModelKind::Inverted, 4.0)] {
        for i in 0..2000 {
            let pt = surface_point(model, r_sq, &random_chart(&mut rng, model)).unwrap();
            res = res.max(constraint_residual(model, r_sq, &pt).abs() / r_sq);
            let lambda = rng.random_range(-1.5..1.5);
            let moved = gauge_flow(model, &pt, lambda);
            let o0 = classical_observables(model, &pt);
            let o1 = classical_observables(model, &moved);
            let mag = o0.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
            for k in 0..3 {
                obs = obs.max((o0[k] - o1[k]).abs() / mag);
            }
            if i < 50 {
                let pmag = [pt.q1, pt.p1, pt.q2, pt.p2].iter().fold(1.0_f64, |m, v| m.max(v.abs()));
                oracle = oracle.max(flow_rk4(model, &pt, lambda, 4000).max_abs_diff(&moved) / pmag);
            }
        }
    }
    if res > 1e-12 || obs > 1e-10 || oracle > 1e-9 {
        return Err(format!("residual {res:e}, flow {obs:e}, RK4 gap {oracle:e}"));
    }

    let mut rt: f64 = 0.0;
    for branch in InvertedBranch::ALL {
        for _ in 0..1000 {
            let xi = if branch == InvertedBranch::Case3 { rng.random_range(0.01..2.5) } else { rng.random_range(-2.5..2.5) };
            let rc = ReducedCoords::C { branch, xi, eta: rng.random_range(-2.0..2.0) };
            let label = reduced_to_coset(&rc).map_err(|e| e.to_string())?;
            let back = coset_to_reduced(ModelKind::Inverted, &label, Some(branch)).map_err(|e| e.to_string())?;
            rt = rt.max(reduced_distance(&rc, &back));
        }
    }
    if rt > 1e-10 {
        return Err(format!("model C roundtrip {rt:e}"));
    }

    // Direct on-surface sampling: draw (q1, p1, q2) and solve the constraint for p2.
    let r_sq: f64 = 4.0;
    let mut fourth = 0usize;
    let mut drawn = 0usize;
    let mut from_charts = 0usize;
    while drawn < 100_000 {
        let pt = if drawn % 2 == 0 {
            let (q1, p1, q2) = (rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
            let p2_sq = r_sq + q1 * q1 - p1 * p1 + q2 * q2;
            if p2_sq <= 0.0 {
                continue;
            }
            let p2 = if rng.random_bool(0.5) { p2_sq.sqrt() } else { -p2_sq.sqrt() };
            PhasePoint::new(q1, p1, q2, p2)
        } else {
            from_charts += 1;
            surface_point(ModelKind::Inverted, r_sq, &random_chart(&mut rng, ModelKind::Inverted)).unwrap()
        };
        drawn += 1;
        if sign_pattern(&pt) == SignPattern::Fourth {
            fourth += 1;
        }
    }
    if fourth > 0 {
        return Err(format!("fourth sign pattern seen {fourth} times"));
    }
    Ok(format!(
        "residual/R^2 {res:.1e}, flow {obs:.1e} (RK4 gap {oracle:.1e}), C roundtrip {rt:.1e} over 3x1000, \
         fourth pattern 0 of {drawn} ({from_charts} from charts)"
    ))
}

fn c8_peaking() -> Outcome {
    let mut scaled = Vec::new();
    for r_sq in [6.0, 22.0, 102.0] {
        let j = (r_sq / (2.0 * HBAR) - 1.0) / 2.0;
        let s = spec(ModelKind::OscSum, r_sq, CutoffScheme::TotalQuanta, (2.0 * j).round() as usize);
        let probe = SemiclassicalProbe::new(&s, 1e-12).map_err(|e| e.to_string())?;
        let mut worst_mag: f64 = 0.0;
        for i in 0..9 {
            for l in 0..8 {
                let rc = ReducedCoords::A {
                    theta: 0.5 * PI * i as f64 / 9.0,
                    phi_minus: PI * l as f64 / 8.0,
                };
                let rows = probe.compare(&rc).map_err(|e| e.to_string())?;
                worst_mag = worst_mag.max(rows[2].magnitude_deviation);
            }
        }
        if worst_mag > HBAR / 2.0 + 1e-12 {
            return Err(format!("R^2={r_sq}: ||<J_z>| - |J_z^cl|| = {worst_mag}"));
        }
        scaled.push((r_sq, worst_mag / (r_sq / 4.0)));
    }
    for w in scaled.windows(2) {
        if w[1].1 >= w[0].1 {
            return Err(format!("relative deviation did not shrink: {scaled:?}"));
        }
    }
    let law = scaled.iter().map(|(r, s)| s * r / HBAR).fold(0.0_f64, f64::max);
    if law > 2.0 + 1e-9 {
        return Err(format!("relative deviation exceeds 2 hbar/R^2: {scaled:?}"));
    }
    Ok(scaled.iter().map(|(r, s)| format!("R^2={r}: dev/scale {s:.3e}")).collect::<Vec<_>>().join(", "))
}

fn c9_uncertainty() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut detail = Vec::new();
    for (s, radius) in [
        (spec(ModelKind::OscSum, 6.0, CutoffScheme::TotalQuanta, 10), 3.0),
        (spec(ModelKind::OscSum, 10.0, CutoffScheme::TotalQuanta, 10), 3.0),
        (spec(ModelKind::OscDiff, 2.0, CutoffScheme::PerMode, 40), 0.6),
        (spec(ModelKind::OscDiff, 4.0, CutoffScheme::PerMode, 40), 0.6),
    ] {
        let emb = embed_irrep(&s).unwrap();
        let zetas: Vec<C64> = (0..12)
            .map(|_| C64::from_polar(rng.random_range(0.0..radius), rng.random_range(0.0..TAU)))
            .collect();
        let r = check_uncertainty(&emb, &build_generators(&s), HBAR, &zetas, 1e-10, 1e-12).map_err(|e| e.to_string())?;
        require(&r)?;
        detail.push(format!("{} R^2={} eq {:.1e}", s.model.letter(), s.r_sq, r.checks[0].measured));
    }
    Ok(detail.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 Lie-algebra closure", c1_algebra),
        ("2 Casimir-constraint identity", c2_casimir),
        ("3 representation selection", c3_selection),
        ("4 kinematical = physical", c4_kin_phys),
        ("5 resolution of identity", c5_resolution),
        ("6 group-averaging oracle", c6_lambda_oracle),
        ("7 classical maps", c7_classical),
        ("8 semiclassical peaking", c8_peaking),
        ("9 minimum uncertainty", c9_uncertainty),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
