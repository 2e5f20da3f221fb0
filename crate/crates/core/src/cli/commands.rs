use std::collections::BTreeMap;
use std::time::Instant;

use clap::ValueEnum;
use serde::Serialize;

use super::input::ProblemFile;
use super::report::{Check, ProblemDigest, Report};
use crate::error::{Error, Result};
use crate::fields::{
    action, excess_identities, geodesic_check, hilbert_integral, hj_primitive, minimum_certificate, weierstrass,
    CertificateOptions,
};
use crate::legendre::{
    hdd_integrate, hdd_residual, hessian_definiteness, legendre_chart, regularity_report, round_trip,
    trajectory_checks, HddSystem,
};
use crate::numerics::{residual_grid, Exec, IntegrationDomain};
use crate::symcore::{CompiledExpr, Coord, Expr, MultiIndex};
use crate::varcalc::{
    euler_lagrange, extended_lagrangian, first_variation_check, hamilton_form, lepagean_defect, momenta,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Derive,
    Legendre,
    Regularity,
    HddSolve,
    FieldCheck,
    Excess,
    Hj,
    VerifyExtremal,
    FirstVariation,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Derive => "derive",
            Command::Legendre => "legendre",
            Command::Regularity => "regularity",
            Command::HddSolve => "hdd-solve",
            Command::FieldCheck => "field-check",
            Command::Excess => "excess",
            Command::Hj => "hj",
            Command::VerifyExtremal => "verify-extremal",
            Command::FirstVariation => "first-variation",
        }
    }
}

/// Default tolerances; every key can be overridden from the file or with
/// `--tol KEY=VAL`.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("compat", 1e-9),
    ("el", 1e-6),
    ("excess", 1e-12),
    ("first_variation", 1e-4),
    ("hilbert", 1e-8),
    ("holonomy", 1e-6),
    ("reference", 1e-6),
    ("residual", 1e-10),
];

/// Flags that refine what the problem file provides.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub at: Option<BTreeMap<Coord, f64>>,
    pub init: Option<BTreeMap<Coord, f64>>,
    pub x0: Option<f64>,
    pub x1: Option<f64>,
    pub step: Option<f64>,
    pub resolution: Option<usize>,
    pub tolerances: BTreeMap<String, f64>,
    pub exec: Exec,
}

fn resolve_tolerances(file: &ProblemFile, opts: &RunOptions) -> Result<BTreeMap<String, f64>> {
    let mut tol: BTreeMap<String, f64> = DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in file.tolerances.iter().chain(&opts.tolerances) {
        if !tol.contains_key(k) {
            let known: Vec<&str> = DEFAULT_TOLERANCES.iter().map(|(k, _)| *k).collect();
            return Err(Error::Invalid(format!("unknown tolerance {k:?}; known: {}", known.join(", "))));
        }
        if !v.is_finite() || *v < 0.0 {
            return Err(Error::Invalid(format!("tolerance {k} must be finite and nonnegative, got {v}")));
        }
        tol.insert(k.clone(), *v);
    }
    Ok(tol)
}

fn text_map<K: ToString>(m: impl IntoIterator<Item = (K, Expr)>) -> BTreeMap<String, String> {
    m.into_iter().map(|(k, e)| (k.to_string(), e.to_string())).collect()
}

fn label(prefix: &str, s: u8, j: &MultiIndex) -> String {
    if j.is_empty() {
        format!("{prefix}({s})")
    } else {
        format!("{prefix}({s};{j})")
    }
}

fn domain(file: &ProblemFile, opts: &RunOptions) -> Result<IntegrationDomain> {
    let d = match &file.domain {
        Some(d) => d.clone(),
        None => IntegrationDomain::unit(file.problem.n() as usize, 101)?,
    };
    match opts.resolution {
        Some(res) => d.with_resolution(res),
        None => Ok(d),
    }
}

/// Runs one command and returns its report; errors are folded into the
/// report with the matching exit code.
pub fn run(cmd: Command, file: &ProblemFile, opts: &RunOptions) -> Report {
    let start = Instant::now();
    let mut rep = Report::new(cmd.name());
    let p = &file.problem;
    rep.problem = Some(ProblemDigest {
        n: p.n(),
        m: p.m(),
        r: p.r(),
        lagrangian: p.lagrangian().to_string(),
        lepagean: if file.g.is_some() { "g-family".into() } else { "poincare-cartan".into() },
    });
    let outcome = resolve_tolerances(file, opts).and_then(|tol| {
        rep.tolerances = tol.clone();
        match cmd {
            Command::Derive => derive(file, &mut rep),
            Command::Legendre => legendre(file, &mut rep),
            Command::Regularity => regularity(file, opts, &mut rep),
            Command::HddSolve => hdd_solve(file, opts, &tol, &mut rep),
            Command::FieldCheck => field_check(file, &mut rep),
            Command::Excess => excess(file, opts, &tol, &mut rep),
            Command::Hj => hj(file, opts, &tol, &mut rep),
            Command::VerifyExtremal => verify_extremal(file, opts, &tol, &mut rep),
            Command::FirstVariation => first_variation(file, opts, &tol, &mut rep),
        }
    });
    match outcome {
        Ok(()) => rep.settle(),
        Err(e) => rep.fail(&e),
    }
    rep.timing.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    rep
}

fn derive(file: &ProblemFile, rep: &mut Report) -> Result<()> {
    let prob = &file.problem;
    rep.put("momenta", text_map(momenta(prob)?.into_iter().map(|((s, j), e)| (label("P", s, &j), e))));
    let el = euler_lagrange(prob)?;
    rep.put("euler_lagrange", text_map(el.iter().map(|(s, e)| (format!("E({s})"), e.clone()))));
    let rho = file.lepagean()?;
    rep.put(
        "lepagean_coefficients",
        text_map(rho.coefficients().iter().map(|((s, i, j), e)| (format!("f({s};{j}|{i})"), e.clone()))),
    );
    let defect = lepagean_defect(&rho.to_form()?, prob)?;
    rep.put(
        "lepagean_defect",
        BTreeMap::from([
            ("contact", text_map(defect.contact.iter().map(|((s, j), e)| (label("w", *s, j), e.clone())))),
            (
                "horizontal_mismatch",
                BTreeMap::from([("h(rho) - L".to_string(), defect.horizontal_mismatch.to_string())]),
            ),
        ]),
    );
    rep.check(Check::flag(
        "lepagean",
        defect.is_lepagean(),
        format!("{} nonzero contact coefficients", defect.contact.len()),
    ));
    let el_match = el.iter().all(|(s, e)| crate::symcore::equivalent(e, &defect.euler_lagrange[s]).holds());
    rep.check(Check::flag("euler-lagrange-from-d-rho", el_match, "p1(d rho) carries the recursion EL expressions"));
    rep.put("extended_lagrangian", extended_lagrangian(&rho).to_string());
    rep.put("hamilton_form", text_map(hamilton_form(&rho)?.into_iter().map(|((s, j), e)| (label("H", s, &j), e))));
    Ok(())
}

fn legendre(file: &ProblemFile, rep: &mut Report) -> Result<()> {
    let data = legendre_chart(&file.problem)?;
    rep.put("coordinates", data.coordinates.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    rep.put("inverse", text_map(data.inverse.clone()));
    rep.put("inverse_complete", data.inverse_complete);
    rep.put("hamiltonian", data.hamiltonian.to_string());
    rep.put("equations", &data.equations);
    let rt = round_trip(&data)?;
    let bad: Vec<&str> = rt.iter().filter(|(_, e)| !e.holds()).map(|(k, _)| k.as_str()).collect();
    rep.check(Check::flag(
        "round-trip",
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} momenta reproduced", rt.len())
        } else {
            format!("failing: {}", bad.join(", "))
        },
    ));
    if let Some(delta) = &file.delta {
        let d = domain(file, &RunOptions::default())?;
        let res = hdd_residual(&data, delta, &d.points(), Exec::default())?;
        rep.put("delta_residual", &res);
    }
    Ok(())
}

fn regularity(file: &ProblemFile, opts: &RunOptions, rep: &mut Report) -> Result<()> {
    let point =
        opts.at.as_ref().or(file.point.as_ref()).ok_or_else(|| {
            Error::Invalid("regularity needs a point: pass --at POINTFILE or add a [point] block".into())
        })?;
    let report = regularity_report(&file.problem, point)?;
    let ranks: Vec<String> = report
        .blocks
        .iter()
        .map(|b| format!("s={}: rank {} of {}", b.s, b.rank, b.rows.len().min(b.cols.len())))
        .collect();
    rep.check(Check::flag("regular", report.regular, ranks.join("; ")).regularity());
    rep.put("regularity", &report);
    rep.put("definiteness", hessian_definiteness(&file.problem, point)?);
    Ok(())
}

#[derive(Serialize)]
struct Row {
    x: f64,
    values: BTreeMap<String, f64>,
}

fn hdd_solve(file: &ProblemFile, opts: &RunOptions, tol: &BTreeMap<String, f64>, rep: &mut Report) -> Result<()> {
    let prob = &file.problem;
    let block = file.hdd.clone().unwrap_or_default();
    let init = opts.init.clone().unwrap_or(block.init.clone());
    let x0 = opts.x0.or(block.x0).unwrap_or(0.0);
    let x1 = opts.x1.or(block.x1).unwrap_or(1.0);
    let step = opts.step.or(block.step).unwrap_or(1e-3);
    let sys = HddSystem::new(prob)?;
    rep.put("system", if sys.is_explicit() { "explicit" } else { "implicit-newton" });
    rep.put("span", [x0, x1]);
    rep.put("step", step);
    let traj = hdd_integrate(&sys, &init, x0, x1, step)?;
    let names: Vec<String> = traj.state_coords.iter().chain(&traj.top_coords).cloned().collect();
    let row = |k: usize| {
        let p = &traj.points[k];
        Row { x: p.x, values: names.iter().cloned().zip(p.state.iter().chain(&p.top).copied()).collect() }
    };
    let every = traj.points.len().div_ceil(100).max(1);
    let mut rows: Vec<Row> = (0..traj.points.len()).step_by(every).map(row).collect();
    if (traj.points.len() - 1) % every != 0 {
        rows.push(row(traj.points.len() - 1));
    }
    rep.put("final", row(traj.points.len() - 1));
    rep.put("trajectory", rows);
    let chk = trajectory_checks(prob, &traj)?;
    rep.check(Check::bound("holonomy", chk.holonomy, tol["holonomy"]));
    rep.check(Check::bound("euler-lagrange", chk.euler_lagrange, tol["el"]));
    rep.put("check_spacing", chk.spacing);
    for (c, e) in &block.reference {
        let col = traj
            .column(&c.to_string())
            .ok_or_else(|| Error::Invalid(format!("reference for {c}, which is not on the trajectory")))?;
        let f = CompiledExpr::compile(e, &[Coord::Base(1)])?;
        let mut worst = 0.0f64;
        for (x, v) in traj.xs().iter().zip(&col) {
            worst = worst.max((v - f.eval(&[*x])?).abs());
        }
        rep.check(Check::bound(&format!("reference {c} = {e}"), worst, tol["reference"]));
    }
    Ok(())
}

fn field_check(file: &ProblemFile, rep: &mut Report) -> Result<()> {
    let w = file.require(&file.field, "field")?;
    let rho = file.lepagean()?;
    let g = geodesic_check(w, &rho)?;
    rep.put("pullback_d_rho", g.pullback.to_text_terms());
    rep.put("status", g.status.label());
    rep.check(Check::flag("geodesic", g.is_geodesic(), format!("w*d(rho): {}", g.pullback)));
    Ok(())
}

fn excess(file: &ProblemFile, opts: &RunOptions, tol: &BTreeMap<String, f64>, rep: &mut Report) -> Result<()> {
    let prob = &file.problem;
    let w = file.require(&file.field, "field")?;
    let rho = file.lepagean()?;
    let data = weierstrass(prob, &rho, w)?;
    rep.put("excess", data.excess.to_string());
    rep.check(Check::flag("h(E) = e w0", data.consistency.holds(), data.consistency.label()));
    let ids = excess_identities(prob, w, &data.excess);
    rep.put("identities", ids.iter().map(|(k, e)| (k.clone(), e.label())).collect::<BTreeMap<_, _>>());
    rep.check(Check::flag(
        "excess-identities",
        ids.iter().all(|(_, e)| e.holds()),
        format!("{} identities", ids.len()),
    ));
    if let Some(gamma) = &file.gamma {
        let opts_c = CertificateOptions { compat_tol: tol["compat"], excess_tol: tol["excess"], ..Default::default() };
        let cert = minimum_certificate(prob, &rho, w, gamma, &domain(file, opts)?, &opts_c, opts.exec)?;
        for c in &cert.conditions {
            rep.check(Check::flag(&format!("certificate {}", c.name), c.pass, c.detail.clone()));
        }
        rep.put("certificate", &cert);
        rep.put("certificate_options", &opts_c);
    }
    Ok(())
}

fn hj(file: &ProblemFile, opts: &RunOptions, tol: &BTreeMap<String, f64>, rep: &mut Report) -> Result<()> {
    let w = file.require(&file.field, "field")?;
    let rho = file.lepagean()?;
    let s = hj_primitive(w, &rho)?;
    rep.put("primitive", s.to_text_terms());
    if let Some(gamma) = &file.gamma {
        let d = domain(file, opts)?;
        let w1 = hilbert_integral(w, &rho, gamma, &d, opts.exec)?;
        rep.put("hilbert", w1);
        rep.put("action", action(&file.problem, gamma, &d, opts.exec)?);
        if let Some(gamma2) = &file.gamma2 {
            let w2 = hilbert_integral(w, &rho, gamma2, &d, opts.exec)?;
            rep.put("hilbert2", w2);
            rep.check(Check::bound("hilbert path independence", (w1 - w2).abs(), tol["hilbert"]));
        }
    }
    Ok(())
}

fn verify_extremal(file: &ProblemFile, opts: &RunOptions, tol: &BTreeMap<String, f64>, rep: &mut Report) -> Result<()> {
    let prob = &file.problem;
    let gamma = file.require(&file.gamma, "gamma")?;
    let el: Vec<(String, Expr)> = euler_lagrange(prob)?.into_iter().map(|(s, e)| (format!("E({s})"), e)).collect();
    let jet = gamma.prolong(2 * prob.r());
    let res = residual_grid(&el, jet.components(), &domain(file, opts)?, opts.exec)?;
    rep.check(Check::bound("euler-lagrange residual", res.max_abs, tol["residual"]));
    rep.put("residual", &res);
    Ok(())
}

fn first_variation(file: &ProblemFile, opts: &RunOptions, tol: &BTreeMap<String, f64>, rep: &mut Report) -> Result<()> {
    let gamma = file.require(&file.gamma, "gamma")?;
    let (xi, eps) = file.require(&file.variation, "variation")?;
    let eps = eps.unwrap_or(1e-5);
    let rho = file.lepagean()?;
    let fv = first_variation_check(&file.problem, &rho, xi, gamma, &domain(file, opts)?, eps, opts.exec)?;
    rep.check(Check::bound("first variation", (fv.lhs - fv.rhs).abs(), tol["first_variation"]));
    rep.put("eps", eps);
    rep.put("first_variation", fv);
    Ok(())
}
