//! Each subcommand is a suite: it runs library routines and turns their
//! reports into pass/fail checks at the configured tolerances.

use std::time::Instant;

use serde_json::{json, Map, Value};

use qdirac::qscalar::QParam;
use qdirac::spinhilbert::SpinorSpace;
use qdirac::{clifford_su3, dirac_su2, podles, uq2, uqsu2, HalfInt, Hp, Result};

use crate::config::RunConfig;
use crate::report::{CheckReport, Outcome, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SuiteId {
    Infra,
    Su2Spectrum,
    Su2Fundamental,
    Su2Clifford,
    Su2Fredholm,
    Su3Clifford,
    Podles,
    Uq2,
}

impl SuiteId {
    pub const ALL: [SuiteId; 8] = [
        SuiteId::Infra,
        SuiteId::Su2Spectrum,
        SuiteId::Su2Fundamental,
        SuiteId::Su2Clifford,
        SuiteId::Su2Fredholm,
        SuiteId::Su3Clifford,
        SuiteId::Podles,
        SuiteId::Uq2,
    ];
}

#[derive(Default)]
pub struct Suite {
    pub reports: Vec<CheckReport>,
    pub tables: Vec<Table>,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    q: QParam<Hp>,
    params: Map<String, Value>,
    out: Suite,
}

impl Ctx<'_> {
    fn residual(&mut self, check: &str, residual: f64, default_tol: f64, provenance: &'static str) -> &mut CheckReport {
        let tolerance = self.cfg.tolerance(check, default_tol);
        self.push(CheckReport::new(check, &self.params, Outcome::Residual { residual, tolerance }, provenance))
    }

    fn band(&mut self, check: &str, value: f64, lo: f64, hi: f64, r2: Option<f64>, provenance: &'static str) -> &mut CheckReport {
        self.push(CheckReport::new(check, &self.params, Outcome::Band { value, lo, hi, r2 }, provenance))
    }

    fn flag(&mut self, check: &str, holds: bool, provenance: &'static str) -> &mut CheckReport {
        self.push(CheckReport::new(check, &self.params, Outcome::Flag(holds), provenance))
    }

    fn push(&mut self, r: CheckReport) -> &mut CheckReport {
        self.out.reports.push(r);
        self.out.reports.last_mut().unwrap()
    }
}

fn base_params(q: &QParam<Hp>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("q".into(), json!(q.text()));
    m.insert("precision".into(), json!(q.bits()));
    m
}

fn two(h: HalfInt) -> Value {
    json!(h.twice())
}

pub fn run(id: SuiteId, cfg: &RunConfig) -> Result<Suite> {
    let q = cfg.qparam().map_err(|e| qdirac::Error::InvalidArgument(e.0))?;
    let mut ctx = Ctx { cfg, params: base_params(&q), q, out: Suite::default() };
    let start = Instant::now();
    match id {
        SuiteId::Infra => infra(&mut ctx)?,
        SuiteId::Su2Spectrum => su2_spectrum(&mut ctx)?,
        SuiteId::Su2Fundamental => su2_fundamental(&mut ctx)?,
        SuiteId::Su2Clifford => su2_clifford(&mut ctx)?,
        SuiteId::Su2Fredholm => su2_fredholm(&mut ctx)?,
        SuiteId::Su3Clifford => su3(&mut ctx)?,
        SuiteId::Podles => podles_suite(&mut ctx)?,
        SuiteId::Uq2 => uq2_suite(&mut ctx)?,
    }
    if cfg.timings {
        let ms = start.elapsed().as_millis();
        for r in &mut ctx.out.reports {
            r.wall_ms = Some(ms);
        }
    }
    Ok(ctx.out)
}

/// The classical-limit CG comparison always runs at this parameter.
pub const CLASSICAL_Q: &str = "0.9999";

fn infra(ctx: &mut Ctx) -> Result<()> {
    let l = HalfInt::int(3);
    ctx.params.insert("two_l_max".into(), two(l));
    let r = uqsu2::infrastructure_report(l, &ctx.q)?;
    let p = "uqsu2::infrastructure_report";
    ctx.residual("infra.relations", r.relations, 1e-25, p);
    ctx.residual("infra.cg_unitarity", r.cg_unitarity, 1e-25, p);
    ctx.residual("infra.coproduct_blocks", r.block_diagonalization, 1e-25, p);
    let qc = QParam::<Hp>::with_precision(CLASSICAL_Q, ctx.q.bits())?;
    let rc = uqsu2::infrastructure_report(l, &qc)?;
    let mut params = ctx.params.clone();
    params.insert("q".into(), json!(CLASSICAL_Q));
    let tol = ctx.cfg.tolerance("infra.classical_cg", 1e-3);
    ctx.push(CheckReport::new(
        "infra.classical_cg",
        &params,
        Outcome::Residual { residual: rc.classical_cg, tolerance: tol },
        "uqsu2::classical_cg",
    ));
    Ok(())
}

fn su2_space(ctx: &mut Ctx, j_max: HalfInt) -> Result<SpinorSpace<Hp>> {
    ctx.params.insert("two_j_max".into(), two(j_max));
    SpinorSpace::new(j_max, &ctx.q)
}

fn su2_spectrum(ctx: &mut Ctx) -> Result<()> {
    let sp = su2_space(ctx, ctx.cfg.j_max)?;
    let r = dirac_su2::spectrum_check(&sp)?;
    let p = "dirac_su2::spectrum_check";
    ctx.residual("su2.spectrum", r.max_deviation, 1e-20, p)
        .detail = Some(json!({"eigenvalues": r.eigenvalues}));
    ctx.flag("su2.spectrum.multiplicities", r.multiplicities_match, p);
    ctx.residual("su2.spectrum.self_adjoint", r.self_adjoint_defect, 1e-20, p);
    ctx.residual("su2.spectrum.equivariance", r.equivariance, 1e-20, p);
    let mut t = Table::new("su2_spectrum", &["k", "value", "multiplicity", "two_j", "arrow", "isospectral"]);
    for (k, row) in dirac_su2::spectrum_table(ctx.cfg.j_max, &ctx.q).iter().enumerate() {
        let j: HalfInt = row.j.parse()?;
        t.push(vec![
            k.to_string(),
            row.algebraic.to_string(),
            row.multiplicity.to_string(),
            j.twice().to_string(),
            row.arrow.to_string(),
            row.isospectral.to_string(),
        ]);
    }
    ctx.out.tables.push(t);
    Ok(())
}

fn su2_fundamental(ctx: &mut Ctx) -> Result<()> {
    let sp = su2_space(ctx, ctx.cfg.j_max)?;
    let (r, _) = dirac_su2::fundamental_relation(&sp)?;
    let p = "dirac_su2::fundamental_relation";
    let detail = json!({
        "variant": format!("{:?}", r.variant),
        "trials": serde_json::to_value(&r.trials).unwrap_or(Value::Null),
    });
    ctx.residual("su2.fundamental", r.residual, 1e-20, p).detail = Some(detail);
    ctx.residual("su2.fundamental.isospectral", r.isospectral_residual, 1e-20, p);
    Ok(())
}

fn su2_clifford(ctx: &mut Ctx) -> Result<()> {
    let r = dirac_su2::clifford_su2(&ctx.q);
    let detail = serde_json::to_value(&r.relations).unwrap_or(Value::Null);
    ctx.residual("su2.clifford", r.max_residual, 1e-25, "dirac_su2::clifford_su2").detail = Some(detail);
    let sp = su2_space(ctx, ctx.cfg.j_max)?;
    let s = dirac_su2::singlet_reconstruction(&sp)?;
    let p = "dirac_su2::singlet_reconstruction";
    ctx.residual("su2.clifford.singlet_intertwiner", s.intertwiner_residual, 1e-20, p);
    ctx.residual("su2.clifford.singlet", s.residual, 1e-20, p).detail = Some(json!({"c": s.c, "scales": s.scales}));
    Ok(())
}

fn su2_fredholm(ctx: &mut Ctx) -> Result<()> {
    let fj = ctx.cfg.fredholm_j_max;
    let sp = su2_space(ctx, fj)?;
    let r = dirac_su2::summability_report(&sp)?;
    let p = "dirac_su2::summability_report";
    let d = r.algebraic_decay;
    // exponential decay: negative slope of the semilog fit, with a good fit
    ctx.band("su2.fredholm.algebraic_decay.r2", d.r2, ctx.cfg.tolerance("su2.fredholm.algebraic_decay.r2", 0.99), 1.0, None, p)
        .detail = Some(json!({"slope": d.slope, "points": d.points}));
    ctx.band("su2.fredholm.algebraic_decay.slope", d.slope, f64::NEG_INFINITY, 0.0, Some(d.r2), p);
    let f = r.fq_power_law;
    ctx.band("su2.fredholm.fq_power_law", f.slope, -0.8, -0.55, Some(f.r2), p);
    ctx.residual("su2.fredholm.fq_closed_form", r.fq_closed_form_deviation, 1e-20, p);
    let mut levels = Table::new("su2_fredholm_levels", &["k", "value"]);
    for (j, n) in &r.level_norms {
        levels.push(vec![((2.0 * j) as i64).to_string(), n.to_string()]);
    }
    ctx.out.tables.push(levels);

    // homotopy family at J_max and J_max + 1
    let jm = ctx.cfg.j_max;
    ctx.params.insert("two_j_max".into(), two(jm));
    ctx.params.insert("t_grid".into(), json!(ctx.cfg.t_grid));
    let n = ctx.cfg.t_grid;
    let grid: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
    let small = dirac_su2::homotopy_family(&SpinorSpace::new(jm, &ctx.q)?, &grid)?;
    let large = dirac_su2::homotopy_family(&SpinorSpace::new(jm + HalfInt::ONE, &ctx.q)?, &grid)?;
    let p = "dirac_su2::homotopy_family";
    ctx.residual("su2.fredholm.homotopy_endpoint_one", small.endpoint_one, 1e-10, p);
    ctx.residual("su2.fredholm.homotopy_endpoint_zero", small.endpoint_zero, 1e-10, p);
    let drift = small
        .points
        .iter()
        .zip(&large.points)
        .map(|(a, b)| (a.commutator_norm - b.commutator_norm).abs() / a.commutator_norm.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    ctx.residual("su2.fredholm.homotopy_drift", drift, 0.01, p).detail =
        Some(json!({"max_norm": small.max_norm, "max_norm_next": large.max_norm}));
    let mut h = Table::new("su2_homotopy", &["k", "value", "t", "value_next"]);
    for (k, (a, b)) in small.points.iter().zip(&large.points).enumerate() {
        h.push(vec![k.to_string(), a.commutator_norm.to_string(), a.t.to_string(), b.commutator_norm.to_string()]);
    }
    ctx.out.tables.push(h);
    Ok(())
}

fn su3(ctx: &mut Ctx) -> Result<()> {
    ctx.params.insert("samples".into(), json!(ctx.cfg.samples));
    let r = clifford_su3::su3_report(&ctx.q, ctx.cfg.samples)?;
    let p = "clifford_su3::su3_report";
    let rep = r.rep_relations.iter().map(|n| n.residual).fold(0.0, f64::max);
    ctx.residual("su3.rep_relations", rep, 1e-20, p);
    ctx.residual("su3.covariance", r.covariance_closure, 1e-20, p)
        .detail = Some(json!({"perturbed_closure": r.perturbed_closure, "expansion_relations": r.expansion_relations}));
    ctx.residual("su3.intertwiner", r.intertwiner_residual, 1e-20, p);
    ctx.residual("su3.b_minus_oracle", r.b_minus_oracle, 1e-20, p);
    ctx.residual("su3.psi1_square", r.psi1_square, 1e-20, p);
    ctx.flag("su3.omega_rho.four_solutions", r.solutions.len() == 4, p);
    let sols = serde_json::to_value(&r.solutions).unwrap_or(Value::Null);
    ctx.residual("su3.omega_rho.z", r.z_match, 1e-10, p).detail = Some(sols);
    ctx.residual("su3.omega_rho.b_plus_printed", r.printed_match, 1e-10, p);
    ctx.residual("su3.omega_rho.b_plus_vieta", r.corrected_match, 1e-10, p);
    ctx.residual("su3.omega_zero", r.omega_zero_deviation, 1e-20, p);
    Ok(())
}

fn podles_suite(ctx: &mut Ctx) -> Result<()> {
    let l = ctx.cfg.l_max;
    ctx.params.insert("two_l_max".into(), two(l));
    let r = podles::sphere_triple_report(&SpinorSpace::new(l, &ctx.q)?)?;
    let next = podles::sphere_triple_report(&SpinorSpace::new(l + HalfInt::ONE, &ctx.q)?)?;
    let p = "podles::sphere_triple_report";
    let rel = r.relations.iter().map(|n| n.residual).fold(0.0, f64::max);
    ctx.residual("podles.relations", rel, 1e-25, "podles::sphere_relations").detail =
        Some(serde_json::to_value(&r.relations).unwrap_or(Value::Null));
    ctx.residual("podles.forms_agree", r.forms_agree, 1e-20, p);
    ctx.residual("podles.invariant_leakage", r.dirac_leakage, 1e-20, p);
    ctx.residual("podles.gamma_anticommutator", r.gamma_anticommutator, 1e-28, p);
    ctx.residual("podles.equivariance", r.equivariance, 1e-20, p);
    ctx.residual("podles.closed_form_spectrum", r.closed_form_deviation, 1e-20, p);
    ctx.residual("podles.sector_ratio", r.ratio_deviation_q_minus_2, 0.05, p).detail = Some(json!({
        "ratios": r.sector_ratios,
        "deviation_from_q_minus_1": r.ratio_deviation_q_minus_1,
    }));
    // the drift contract is stated for ρ(B); A and A* are reported alongside
    let norms: Vec<Value> = r
        .commutators
        .iter()
        .zip(&next.commutators)
        .map(|(a, b)| json!({"name": a.name, "norm": a.norm, "norm_next": b.norm}))
        .collect();
    let b = |rep: &podles::SphereReport| rep.commutators.iter().find(|c| c.name == "B").map(|c| c.norm).unwrap_or(f64::NAN);
    let drift = (b(&r) - b(&next)).abs() / b(&r);
    ctx.residual("podles.commutator_drift", drift, 0.01, p).detail = Some(json!(norms));
    ctx.residual("podles.heat_trace_drift", (r.heat_trace - next.heat_trace).abs(), 1e-6, p);
    let mut t = Table::new("podles_spectrum", &["k", "value", "closed_form", "multiplicity"]);
    for s in &r.sectors {
        let l: HalfInt = s.l.parse()?;
        t.push(vec![l.twice().to_string(), s.magnitude.to_string(), s.closed_form.to_string(), s.multiplicity.to_string()]);
    }
    ctx.out.tables.push(t);
    Ok(())
}

fn uq2_suite(ctx: &mut Ctx) -> Result<()> {
    let (j, c, order) = (ctx.cfg.j_max, ctx.cfg.c_max, ctx.cfg.probe_order);
    ctx.params.insert("two_j_max".into(), two(j));
    ctx.params.insert("two_c_max".into(), two(c));
    ctx.params.insert("probe_order".into(), json!(order));
    let r = uq2::uq2_report(&ctx.q, j, c, order)?;
    let p = "uq2::uq2_report";
    ctx.flag("uq2.parity", r.parity_violations == 0, p);
    ctx.residual("uq2.abs_spectrum", r.abs_spectrum.deviation.max(r.abs_spectrum.functional_calculus), 1e-20, "uq2::abs_spectrum");
    ctx.residual("uq2.gamma_anticommutator", r.chirality_anticommutator, 1e-20, p);
    ctx.residual("uq2.gamma_commutes", r.chirality_commutes, 1e-20, p);
    ctx.residual("uq2.central_commutator", r.central_commutator, 1e-20, p);
    ctx.residual("uq2.central_isometry", r.central_isometry, 1e-20, p);
    ctx.residual("uq2.c_commutes_with_a", r.c_commutes_with_a, 1e-20, p);
    ctx.residual("uq2.sector_blocks", r.sector_symmetry, 1e-20, p);
    ctx.residual("uq2.equivariance", r.equivariance, 1e-20, p);
    ctx.residual("uq2.delta_dirac_commute", r.delta_d_commute, 1e-20, p);
    let cdrift = r.commutator_norms.iter().map(|x| x.3).fold(0.0, f64::max);
    ctx.residual("uq2.commutator_drift", cdrift, 0.01, p).detail = Some(json!(r.commutator_norms));
    let pdrift = r.probes.iter().map(|x| x.drift).fold(0.0, f64::max);
    ctx.residual("uq2.probe_drift", pdrift, 0.01, p).detail = Some(serde_json::to_value(&r.probes).unwrap_or(Value::Null));
    let shown = r.probes.iter().map(|x| x.display_residual).fold(0.0, f64::max);
    ctx.residual("uq2.probe_same_arrow_form", shown, 1e-20, p);
    let dk = r.offdiag_decay;
    ctx.band("uq2.cross_arrow_decay", dk.slope, f64::NEG_INFINITY, 0.0, Some(dk.r2), p);
    let dim = &r.dimension;
    ctx.band("uq2.dimension", dim.exponent, 3.7, 4.3, Some(dim.r2), "uq2::dimension_fit").detail = Some(json!({
        "lambda": dim.lambda,
        "half_lambda_exponent": dim.half_lambda_exponent,
        "su2_exponent": dim.su2_exponent,
    }));
    ctx.residual("uq2.dimension_stability", (dim.exponent - dim.half_lambda_exponent).abs(), 0.2, "uq2::dimension_fit");
    ctx.band("uq2.dimension_su2_control", dim.su2_exponent, 2.7, 3.3, None, "uq2::dimension_fit");
    ctx.flag("uq2.dimension_count_matches_truncation", dim.count_mismatch == 0, "uq2::dimension_fit");
    let mut t = Table::new("uq2_counts", &["k", "value"]);
    for k in 1..=80 {
        let lam = dim.lambda * k as f64 / 80.0;
        t.push(vec![lam.to_string(), uq2::closed_form_count(lam, true).to_string()]);
    }
    ctx.out.tables.push(t);
    Ok(())
}
