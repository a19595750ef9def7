//! Named verification suites and report serialization.

use std::f64::consts::PI;
use std::time::Instant;

use serde::Serialize;

use crate::classical::{check_classical_maps, peaking_rows, ReducedCoords, SemiclassicalProbe, PEAKING_COLUMNS};
use crate::coherent::{
    check_uncertainty, embed_irrep, hw_state, resolution_of_identity_check, su11_required_levels, CoherentLabel,
    ResolutionTolerances,
};
use crate::config::{Format, RunConfig, Suite};
use crate::error::{CohqError, Result};
use crate::fock::{inner, make_space, C64};
use crate::models::{
    build_constraint, build_generators, casimir_constraint_identity, casimir_from_constraint, check_algebra,
    check_invariance, rep_index_from_r, ModelKind, ModelSpec, Series,
};
use crate::report::{CheckRecord, CheckReport, Table};
use crate::rigging::{
    average_hw_by_quadrature, average_hw_state, check_double_frame_collapse, check_lambda_oracle, check_projector,
    check_rep_selection, group_average_projector, lambda_nodes_needed, negative_control, verify_kin_phys_equality,
};

/// Largest cutoff used for the explicit λ-average, which exponentiates
/// dense matrices at every node.
const LAMBDA_ORACLE_CUTOFF: usize = 6;

/// Oscillator labels used by the averaged-state checks.
const HW_LABELS: [(C64, C64); 3] = [
    (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
    (C64::new(0.3, 0.1), C64::new(0.2, -0.2)),
    (C64::new(0.4, 0.0), C64::new(0.0, 0.1)),
];

fn model_spec(cfg: &RunConfig) -> Result<ModelSpec> {
    ModelSpec::new(cfg.model, cfg.r_sq, cfg.hbar, make_space(cfg.scheme, cfg.cutoff)?)
}

fn base_env(report: &mut CheckReport, spec: &ModelSpec) {
    report.env("model", spec.model);
    report.env("r_sq", spec.r_sq);
    report.env("hbar", spec.hbar);
    report.env("space", spec.space.descriptor());
}

fn check_algebra_suite(cfg: &RunConfig, spec: &ModelSpec) -> Result<CheckReport> {
    let gen = build_generators(spec);
    let mut report = CheckReport::new(Suite::CheckAlgebra.name());
    report.absorb(check_algebra(&gen, spec.hbar, cfg.margin, cfg.tol("algebra"), false)?);
    report.absorb(check_invariance(spec, &gen, cfg.margin, cfg.tol("commute"))?);
    Ok(report)
}

fn casimir_suite(cfg: &RunConfig, spec: &ModelSpec) -> Result<CheckReport> {
    let gen = build_generators(spec);
    let mut report = casimir_constraint_identity(spec, &gen, cfg.margin, cfg.tol("casimir"))?;
    report.suite = Suite::CasimirIdentity.name().into();
    Ok(report)
}

fn select_rep_suite(cfg: &RunConfig, spec: &ModelSpec) -> Result<CheckReport> {
    let rep = rep_index_from_r(spec.model, spec.r_sq, spec.hbar)?;
    let mut report = CheckReport::new(Suite::SelectRep.name());
    report.env("rep", rep);
    if rep.series == Series::Su11Principal {
        // f(φ) evaluated on the constraint surface φ = 0
        let zero = crate::fock::LinOp::zeros(spec.space.clone());
        let value = casimir_from_constraint(spec, &zero)?.matrix()[(0, 0)].re / (spec.hbar * spec.hbar);
        report.push(CheckRecord::at_most(
            "principal-series Casimir -(lambda^2 + 1/4)",
            (value - rep.casimir_value()).abs(),
            cfg.tol("casimir"),
        ));
        report.push(CheckRecord::skipped(
            "kernel projector",
            "continuous spectrum: no normalizable kernel in the Fock space",
        ));
        return Ok(report);
    }
    let gen = build_generators(spec);
    let proj = group_average_projector(spec, cfg.tol("kernel_eig"))?;
    report.absorb(check_rep_selection(spec, &proj, &gen, cfg.tol("casimir"))?);
    report.absorb(check_projector(spec, &proj, &gen, cfg.tol("projector"), cfg.tol("commute"))?);

    let small = ModelSpec::new(
        spec.model,
        spec.r_sq,
        spec.hbar,
        make_space(cfg.scheme, cfg.cutoff.min(LAMBDA_ORACLE_CUTOFF))?,
    )?;
    match group_average_projector(&small, cfg.tol("kernel_eig")) {
        Ok(p) => report.absorb(check_lambda_oracle(&small, &p, cfg.lambda_nodes, cfg.tol("lambda_oracle"))?),
        Err(CohqError::NoPhysicalStates(_)) => report.push(CheckRecord::skipped(
            "lambda-oracle/P = lambda average",
            format!("no kernel at cutoff {}", small.space.cutoff()),
        )),
        Err(e) => return Err(e),
    }
    Ok(report)
}

fn resolve_identity_suite(cfg: &RunConfig, spec: &ModelSpec) -> Result<CheckReport> {
    let emb = embed_irrep(spec)?;
    let tol = ResolutionTolerances {
        deviation: match emb.rep.series {
            Series::Su2Spin => cfg.tol("su2_resolution"),
            _ => cfg.tol("su11_resolution"),
        },
        monotone: cfg.tol("monotone"),
        tail_consistency: cfg.tol("su11_tail_consistency"),
    };
    let mut report = resolution_of_identity_check(&emb, &cfg.quadrature, tol)?;
    if emb.rep.series == Series::Su2Spin {
        let zetas: Vec<C64> = cfg.labels.clone();
        let nodes = cfg.quadrature.radial_nodes.min(cfg.quadrature.angular_nodes);
        report.absorb(check_double_frame_collapse(emb.rep.twice(), &zetas, nodes, cfg.tol("collapse")));
    }
    Ok(report)
}

fn coherent_labels(cfg: &RunConfig, series: Series) -> Vec<CoherentLabel> {
    cfg.labels
        .iter()
        .map(|&zeta| match series {
            Series::Su2Spin => CoherentLabel::Su2 { zeta },
            _ => CoherentLabel::Su11 { zeta },
        })
        .collect()
}

fn kin_phys_suite(cfg: &RunConfig, spec: &ModelSpec) -> Result<CheckReport> {
    let proj = group_average_projector(spec, cfg.tol("kernel_eig"))?;
    let gen = build_generators(spec);
    let emb = embed_irrep(spec)?;
    let labels = coherent_labels(cfg, emb.rep.series);
    let mut report = verify_kin_phys_equality(spec, &proj, &gen, &labels, cfg.tol("equality"), cfg.tol("tail_eps"))?;
    report.push(negative_control(&proj, C64::new(1.0, 0.0), C64::new(1.0, 0.0), cfg.tol("negative_control"))?);
    report.absorb(check_uncertainty(&emb, &gen, spec.hbar, &cfg.labels, cfg.tol("uncertainty"), cfg.tol("tail_eps"))?);
    Ok(report)
}

fn project_hw_suite(cfg: &RunConfig, spec: &ModelSpec) -> Result<CheckReport> {
    let proj = group_average_projector(spec, cfg.tol("kernel_eig"))?;
    let phi = build_constraint(spec);
    let nodes = cfg.lambda_nodes.max(lambda_nodes_needed(&phi, spec.hbar));
    let mut report = CheckReport::new(Suite::ProjectHw.name());
    for (z1, z2) in HW_LABELS {
        let tag = format!("({}{:+}i,{}{:+}i)", z1.re, z1.im, z2.re, z2.im);
        let tail = hw_state(&spec.space, z1, z2).tail;
        report.push(CheckRecord::at_most(format!("hw tail {tag}"), tail, cfg.tol("tail_eps")));
        let avg = average_hw_state(&proj, z1, z2, f64::INFINITY)?;
        let quad = average_hw_by_quadrature(spec, z1, z2, nodes)?;
        report.push(CheckRecord::at_most(
            format!("P|z> = gauge integral {tag}"),
            avg.sub(&quad)?.norm(),
            cfg.tol("hw_oracle"),
        ));
        let phi_avg = inner(&avg, &phi.apply(&avg)?)?.norm();
        report.push(CheckRecord::at_most(format!("<avg|phi|avg> {tag}"), phi_avg, cfg.tol("projector")));
    }
    report.env("gauge_nodes", nodes);
    Ok(report)
}

fn classical_suite(cfg: &RunConfig) -> Result<CheckReport> {
    check_classical_maps(
        cfg.model,
        cfg.r_sq,
        cfg.classical_samples,
        cfg.tol("surface"),
        cfg.tol("flow"),
        cfg.tol("roundtrip"),
    )
}

fn sweep_points(cfg: &RunConfig) -> Vec<ReducedCoords> {
    let n1 = cfg.sweep.radial_points;
    let n2 = cfg.sweep.angular_points;
    let mut out = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        for l in 0..n2 {
            let ang = PI * l as f64 / n2 as f64;
            out.push(match cfg.model {
                ModelKind::OscSum => ReducedCoords::A {
                    theta: 0.5 * PI * i as f64 / n1 as f64,
                    phi_minus: ang,
                },
                _ => ReducedCoords::B {
                    xi: if n1 > 1 { cfg.sweep.xi_max * i as f64 / (n1 - 1) as f64 } else { 0.0 },
                    phi_plus: ang,
                },
            });
        }
    }
    out
}

/// Cutoff large enough for the whole sweep at this `R²`.
fn sweep_cutoff(cfg: &RunConfig, r_sq: f64) -> usize {
    let off = r_sq / (2.0 * cfg.hbar);
    match cfg.model {
        ModelKind::OscSum => cfg.cutoff.max((off - 1.0).round().max(0.0) as usize),
        _ => {
            let k = 0.5 * (1.0 + off);
            let x = cfg.sweep.xi_max.tanh().powi(2);
            let levels = su11_required_levels(k, x, cfg.tol("tail_eps"));
            let shift = off.round() as usize;
            let need = match cfg.scheme {
                crate::fock::CutoffScheme::PerMode => levels - 1 + shift,
                crate::fock::CutoffScheme::TotalQuanta => 2 * (levels - 1) + shift,
            };
            cfg.cutoff.max(need)
        }
    }
}

fn semiclassical_suite(cfg: &RunConfig) -> Result<CheckReport> {
    if cfg.model == ModelKind::Inverted {
        return Err(CohqError::UnsupportedModel("no discrete coherent states for model C".into()));
    }
    let mut report = CheckReport::new(Suite::SemiclassicalSweep.name());
    let mut table = Table::new(&PEAKING_COLUMNS);
    let points = sweep_points(cfg);
    let mut scaled = Vec::new();
    for &r_sq in &cfg.sweep.r_sq {
        let spec = ModelSpec::new(cfg.model, r_sq, cfg.hbar, make_space(cfg.scheme, sweep_cutoff(cfg, r_sq))?)?;
        let probe = SemiclassicalProbe::new(&spec, cfg.tol("tail_eps"))?;
        let names = probe.generators().names();
        let mut worst_ratio: f64 = 0.0;
        let mut worst_mag_z: f64 = 0.0;
        let mut worst_scaled: f64 = 0.0;
        for rc in &points {
            for row in peaking_rows(&probe, rc, &mut table)? {
                worst_ratio = worst_ratio.max(row.deviation / row.bound);
                if row.component == 2 {
                    worst_mag_z = worst_mag_z.max(row.magnitude_deviation);
                }
                let scale = (r_sq / 4.0) * (row.bound / (0.5 * cfg.hbar));
                worst_scaled = worst_scaled.max(row.deviation / scale);
            }
        }
        if points.is_empty() {
            continue;
        }
        report.push(
            CheckRecord::at_most(format!("R2={r_sq} deviation / bound"), worst_ratio, 1.0 + cfg.tol("peaking"))
                .with_note("bound is (hbar/2) max(1, |Z_cl|/(R^2/4))"),
        );
        if cfg.model == ModelKind::OscSum {
            report.push(CheckRecord::at_most(
                format!("R2={r_sq} ||<{z}>| - |{z}_cl||", z = names[2]),
                worst_mag_z,
                0.5 * cfg.hbar * (1.0 + cfg.tol("peaking")),
            ));
        }
        report.env(&format!("orientation_sign_r2_{r_sq}"), probe.sign());
        scaled.push((r_sq, worst_scaled));
    }
    if scaled.len() > 1 {
        let mut sorted = scaled.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let rise = sorted
            .windows(2)
            .map(|w| w[1].1 - w[0].1)
            .fold(f64::NEG_INFINITY, f64::max);
        report.push(
            CheckRecord::at_most("relative deviation shrinks with R^2", rise.max(0.0), 0.0)
                .with_note("largest increase of max deviation / classical scale between successive R^2"),
        );
        let ratio_spread = sorted
            .iter()
            .map(|(r, s)| s * r / cfg.hbar)
            .fold(0.0_f64, f64::max);
        report.env("max_relative_deviation_times_r2_over_hbar", ratio_spread);
    }
    report.table("semiclassical", table);
    Ok(report)
}

fn run_component(cfg: &RunConfig, suite: Suite) -> Result<CheckReport> {
    let spec = model_spec(cfg)?;
    let mut report = match suite {
        Suite::CheckAlgebra => check_algebra_suite(cfg, &spec)?,
        Suite::CasimirIdentity => casimir_suite(cfg, &spec)?,
        Suite::SelectRep => select_rep_suite(cfg, &spec)?,
        Suite::ResolveIdentity => resolve_identity_suite(cfg, &spec)?,
        Suite::KinPhysEquality => kin_phys_suite(cfg, &spec)?,
        Suite::ProjectHw => project_hw_suite(cfg, &spec)?,
        Suite::ClassicalMaps => classical_suite(cfg)?,
        Suite::SemiclassicalSweep => semiclassical_suite(cfg)?,
        Suite::Full => unreachable!("expanded by run_suite"),
    };
    report.suite = suite.name().into();
    base_env(&mut report, &spec);
    Ok(report)
}

/// Runs one suite, or every component suite for `Full`. Inside `Full`, a
/// suite that does not apply to the model becomes a single `SKIPPED` record.
pub fn run_suite(cfg: &RunConfig, suite: Suite) -> Result<CheckReport> {
    let started = Instant::now();
    let mut report = if suite == Suite::Full {
        let mut full = CheckReport::new(Suite::Full.name());
        for part in Suite::COMPONENTS {
            match run_component(cfg, part) {
                Ok(r) => full.absorb(r),
                Err(CohqError::UnsupportedModel(why)) => {
                    full.push(CheckRecord::skipped(part.name(), why));
                }
                Err(e) => return Err(e),
            }
        }
        full
    } else {
        run_component(cfg, suite)?
    };
    if cfg.timing {
        report.env("timing_ms", started.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    schema_version: u32,
    config_hash: String,
    suite: &'a str,
    pass: bool,
    config: &'a RunConfig,
    environment: &'a std::collections::BTreeMap<String, serde_json::Value>,
    checks: &'a [CheckRecord],
    tables: &'a std::collections::BTreeMap<String, Table>,
}

/// Serializes a report. JSON carries the full structure; CSV carries the
/// peaking table when present and per-check rows otherwise.
pub fn emit_report(report: &CheckReport, cfg: &RunConfig, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let doc = ReportDocument {
                schema_version: crate::config::SCHEMA_VERSION,
                config_hash: cfg.hash(),
                suite: &report.suite,
                pass: report.pass(),
                config: cfg,
                environment: &report.environment,
                checks: &report.checks,
                tables: &report.tables,
            };
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => Ok(match report.tables.get("semiclassical") {
            Some(t) => t.to_csv(),
            None => report.checks_csv(),
        }),
    }
}
