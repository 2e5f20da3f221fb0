//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use jetvar::fields::{
    excess_identities, field_pullback, geodesic_check, hilbert_integral, hj_primitive, weierstrass, Section, SlopeField,
};
use jetvar::forms::{contact_decompose, ext_d, horizontal, interior_product, pullback, HorizontalMode};
use jetvar::legendre::{hdd_integrate, hessian_definiteness, regularity_report, trajectory_checks, HddSystem};
use jetvar::numerics::{Exec, IntegrationDomain};
use jetvar::symcore::{parse_expr, ChartContext, CompiledExpr, Coord, Equivalence, Expr, MultiIndex};
use jetvar::varcalc::{
    euler_lagrange, first_variation_check, hamilton_form, lepagean_defect, lepagean_from_g, momenta, poincare_cartan,
    LagrangianProblem,
};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    ensure(t.elapsed() < limit, || format!("took {:.1?}, limit {limit:?}", t.elapsed()))
}

fn e(text: &str, prob: &LagrangianProblem) -> Expr {
    parse_expr(text, prob.ctx()).unwrap()
}

fn c1_el_oracle() -> Outcome {
    let t = Instant::now();
    for (k, prob) in corpus(11).iter().enumerate() {
        let ours = euler_lagrange(prob).map_err(|e| e.to_string())?;
        let oracle = oracle_euler_lagrange(prob);
        ensure(ours == oracle, || format!("problem {k} (L = {}): {ours:?} vs {oracle:?}", prob.lagrangian()))?;
    }
    within(t, Duration::from_secs(30))?;
    Ok(format!("20 Lagrangians, exact equality, {:.2?}", t.elapsed()))
}

fn c2_lepagean() -> Outcome {
    let t = Instant::now();
    for (k, prob) in corpus(11).iter().enumerate() {
        let theta = poincare_cartan(prob).and_then(|r| r.to_form()).map_err(|e| e.to_string())?;
        let d = lepagean_defect(&theta, prob).map_err(|e| e.to_string())?;
        ensure(d.contact.is_empty(), || format!("problem {k}: contact defect {:?}", d.contact))?;
        ensure(d.horizontal_mismatch.is_zero(), || format!("problem {k}: h(Θ) − λ = {}", d.horizontal_mismatch))?;
    }
    let mut g = rng(22);
    for k in 0..5 {
        let n_m = g.gen_range(1..=2);
        let ctx = ChartContext::new(2, n_m, 2).unwrap();
        let mut atoms = ctx.base_coords();
        atoms.extend(ctx.jets(0, 2));
        let l = Expr::coord(Coord::y(1, [1, 2])).pow(2) + polynomial(&mut g, &atoms, 3, 3);
        let prob = LagrangianProblem::new(2, n_m, 2, l).unwrap();
        let spec = random_gspec(&mut g, &prob);
        let rho = lepagean_from_g(&prob, &spec).and_then(|r| r.to_form()).map_err(|e| e.to_string())?;
        let d = lepagean_defect(&rho, &prob).map_err(|e| e.to_string())?;
        ensure(d.is_lepagean(), || format!("g-family {k}: defect {:?}", d.contact))?;
    }
    within(t, Duration::from_secs(30))?;
    Ok(format!("20 Θ and 5 g-family forms Lepagean, {:.2?}", t.elapsed()))
}

fn c3_worked() -> Outcome {
    let prob = LagrangianProblem::parse(1, 1, 2, "1/2*y(1;1,1)^2").unwrap();
    let p = momenta(&prob).map_err(|e| e.to_string())?;
    ensure(p[&(1, MultiIndex::new([1, 1]))] == e("y(1;1,1)", &prob), || "P^11".into())?;
    ensure(p[&(1, MultiIndex::new([1]))] == e("-y(1;1,1,1)", &prob), || "P^1".into())?;
    let el = euler_lagrange(&prob).map_err(|e| e.to_string())?;
    ensure(el[&1] == e("y(1;1,1,1,1)", &prob), || format!("EL = {}", el[&1]))?;
    let lap = LagrangianProblem::parse(2, 1, 1, "1/2*(y(1;1)^2 + y(1;2)^2)").unwrap();
    let el = euler_lagrange(&lap).map_err(|e| e.to_string())?;
    ensure(el[&1] == e("-(y(1;1,1) + y(1;2,2))", &lap), || format!("Laplace EL = {}", el[&1]))?;
    Ok("P^11, P^1, EL and the Laplace EL match exactly".into())
}

fn c4_hamilton_property() -> Outcome {
    let mut g = rng(44);
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut nontrivial = 0;
    for (k, prob) in corpus(11).iter().enumerate() {
        let rho = poincare_cartan(prob).map_err(|e| e.to_string())?;
        let table = hamilton_form(&rho).map_err(|e| e.to_string())?;
        let d_rho = ext_d(&rho.to_form().map_err(|e| e.to_string())?);
        let ctx = *prob.ctx();
        let jets = ctx.jets(0, ctx.vel_order());
        for _ in 0..10 {
            let xi: BTreeMap<Coord, Expr> =
                jets.iter().map(|c| (c.clone(), Expr::rational(g.gen_range(-20..=20), 10))).collect();
            let rhs =
                horizontal(&interior_product(&xi, &d_rho).map_err(|e| e.to_string())?, &ctx, HorizontalMode::Velocity)
                    .map_err(|e| e.to_string())?
                    .top_coefficient(ctx.n);
            let lhs: Expr = table.iter().map(|((s, p), h)| h * &xi[&Coord::Jet(*s, p.clone())]).sum();
            let mut point = BTreeMap::new();
            for c in lhs.coords().into_iter().chain(rhs.coords()) {
                point.entry(c).or_insert_with(|| g.gen_range(-1.0..1.0));
            }
            let a = lhs.eval(&point).map_err(|e| e.to_string())?;
            let b = rhs.eval(&point).map_err(|e| e.to_string())?;
            let diff = (a - b).abs();
            worst = worst.max(diff);
            nontrivial += usize::from(a.abs() > 1e-6);
            ensure(diff <= 1e-9, || format!("problem {k}: |{a} − {b}| = {diff:e}"))?;
            count += 1;
        }
    }
    ensure(nontrivial * 2 > count, || format!("only {nontrivial} of {count} contractions are nonzero"))?;
    Ok(format!("{count} (ξ, point) pairs ({nontrivial} nonzero), max deviation {worst:e}"))
}

fn c5_hdd() -> Outcome {
    let osc = LagrangianProblem::parse(1, 1, 1, "1/2*y(1;1)^2 - 1/2*y(1)^2").unwrap();
    let sys = HddSystem::new(&osc).map_err(|e| e.to_string())?;
    let init = BTreeMap::from([(Coord::y(1, []), 0.0), (Coord::mom(1, [1]), 1.0)]);
    let t = hdd_integrate(&sys, &init, 0.0, 1.0, 1e-3).map_err(|e| e.to_string())?;
    let (y, p) = (t.column("y(1)").unwrap(), t.column("P(1;1)").unwrap());
    let mut dev = 0.0f64;
    for (k, x) in t.xs().iter().enumerate() {
        dev = dev.max((y[k] - x.sin()).abs()).max((p[k] - x.cos()).abs());
    }
    ensure(dev <= 1e-6, || format!("oscillator deviates by {dev:e}"))?;
    let chk = trajectory_checks(&osc, &t).map_err(|e| e.to_string())?;
    ensure(chk.holonomy <= 1e-6, || format!("oscillator holonomy {:e}", chk.holonomy))?;

    let beam = LagrangianProblem::parse(1, 1, 2, "1/2*y(1;1,1)^2").unwrap();
    let sys = HddSystem::new(&beam).map_err(|e| e.to_string())?;
    let init = BTreeMap::from([
        (Coord::y(1, []), 0.0),
        (Coord::y(1, [1]), 0.0),
        (Coord::mom(1, [1]), -6.0),
        (Coord::mom(1, [1, 1]), 0.0),
    ]);
    let t = hdd_integrate(&sys, &init, 0.0, 1.0, 1e-3).map_err(|e| e.to_string())?;
    let y = t.column("y(1)").unwrap();
    let cubic = t.xs().iter().zip(&y).map(|(x, v)| (v - x.powi(3)).abs()).fold(0.0, f64::max);
    ensure(cubic <= 1e-6, || format!("cubic deviates by {cubic:e}"))?;
    let chk2 = trajectory_checks(&beam, &t).map_err(|e| e.to_string())?;
    ensure(chk2.holonomy <= 1e-6, || format!("cubic holonomy {:e}", chk2.holonomy))?;
    Ok(format!("sin/cos within {dev:e}, cubic within {cubic:e}, holonomy {:e} and {:e}", chk.holonomy, chk2.holonomy))
}

fn c6_regularity() -> Outcome {
    let pd = [
        (1, 1, 1, "1/2*y(1;1)^2 - 1/2*y(1)^2", vec![(Coord::y(1, [1]), 0.3)]),
        (1, 1, 2, "1/2*y(1;1,1)^2", vec![(Coord::y(1, [1, 1]), 0.1)]),
        (2, 1, 1, "1/2*(y(1;1)^2 + y(1;2)^2)", vec![]),
        (1, 2, 1, "1/2*(y(1;1)^2 + y(2;1)^2) + y(1;1)*y(2)", vec![]),
    ];
    let deficient = [(1, 1, 2, "y(1;1,1)*y(1;1)"), (1, 1, 1, "y(1;1)*y(1)"), (2, 1, 1, "y(1;1) + y(1;2)*y(1)")];
    let full_point = |prob: &LagrangianProblem, extra: &[(Coord, f64)]| {
        let mut pt: BTreeMap<Coord, f64> = (1..=prob.m())
            .flat_map(|s| MultiIndex::all_between(prob.n(), 0, 2 * prob.r()).into_iter().map(move |j| Coord::Jet(s, j)))
            .map(|c| (c, 0.25))
            .collect();
        pt.extend(prob.ctx().base_coords().into_iter().map(|c| (c, 0.5)));
        pt.extend(extra.iter().cloned());
        pt
    };
    for (n, m, r, l, extra) in &pd {
        let prob = LagrangianProblem::parse(*n, *m, *r, l).unwrap();
        let rep = regularity_report(&prob, &full_point(&prob, extra)).map_err(|e| e.to_string())?;
        ensure(rep.regular, || format!("{l}: not regular"))?;
    }
    for (n, m, r, l) in &deficient {
        let prob = LagrangianProblem::parse(*n, *m, *r, l).unwrap();
        let rep = regularity_report(&prob, &full_point(&prob, &[])).map_err(|e| e.to_string())?;
        ensure(!rep.regular, || format!("{l}: reported regular"))?;
    }

    let mut g = rng(66);
    let ctx = ChartContext::new(2, 2, 1).unwrap();
    let tops = ctx.jets(1, 1);
    let mut agree = 0;
    let mut definite = 0;
    while agree < 20 {
        let k = tops.len();
        let mut a = vec![vec![0i64; k]; k];
        #[allow(clippy::needless_range_loop)]
        for i in 0..k {
            for j in i..k {
                let v = g.gen_range(-6..=6);
                a[i][j] = v;
                a[j][i] = v;
            }
            a[i][i] += g.gen_range(0..=24);
        }
        let mat = DMatrix::from_fn(k, k, |i, j| a[i][j] as f64 / 4.0);
        let eig = SymmetricEigen::new(mat).eigenvalues;
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        if min.abs() < 1e-3 {
            continue;
        }
        let mut l = Expr::zero();
        for i in 0..k {
            for j in 0..k {
                let term = Expr::coord(tops[i].clone()) * Expr::coord(tops[j].clone());
                l += term.scale(&jetvar::symcore::rat(a[i][j], 8));
            }
        }
        let prob = LagrangianProblem::new(2, 2, 1, l).unwrap();
        let d = hessian_definiteness(&prob, &full_point(&prob, &[])).map_err(|e| e.to_string())?;
        ensure(d.positive_definite == (min > 0.0), || {
            format!("instance {agree}: factorization says {}, eigenvalues {eig:?}", d.positive_definite)
        })?;
        definite += usize::from(min > 0.0);
        agree += 1;
    }
    Ok(format!(
        "{} regular and {} deficient examples; 20 random Hessians agree with eigenvalue signs ({definite} definite)",
        pd.len(),
        deficient.len()
    ))
}

fn c7_first_variation() -> Outcome {
    let prob = LagrangianProblem::parse(1, 1, 1, "1/2*y(1;1)^2 - 1/2*y(1)^2").unwrap();
    let rho = poincare_cartan(&prob).map_err(|e| e.to_string())?;
    let gamma = Section::from_gamma(1, BTreeMap::from([(1, e("sin(x(1))", &prob))])).unwrap();
    let d = IntegrationDomain::unit(1, 10_000).unwrap();
    let xi = BTreeMap::from([(1, Expr::one())]);
    let fv = first_variation_check(&prob, &rho, &xi, &gamma, &d, 1e-5, Exec::default()).map_err(|e| e.to_string())?;
    let gap = (fv.lhs - fv.rhs).abs();
    ensure(gap <= 1e-4, || format!("|{} − {}| = {gap:e}", fv.lhs, fv.rhs))?;
    Ok(format!("finite difference {:.10} vs formula {:.10}, gap {gap:e}", fv.lhs, fv.rhs))
}

fn c8_fields() -> Outcome {
    let prob = LagrangianProblem::parse(1, 1, 1, "1/2*y(1;1)^2").unwrap();
    let rho = poincare_cartan(&prob).map_err(|e| e.to_string())?;
    let c = Expr::rational(3, 2);
    let w = SlopeField::new(&prob, BTreeMap::from([(Coord::y(1, [1]), c.clone())])).map_err(|e| e.to_string())?;
    let geo = geodesic_check(&w, &rho).map_err(|e| e.to_string())?;
    ensure(geo.status == Equivalence::Exact, || format!("w*dρ = {}", geo.pullback))?;
    let s = hj_primitive(&w, &rho).map_err(|e| e.to_string())?;
    ensure(ext_d(&s) == field_pullback(&w, &rho).map_err(|e| e.to_string())?, || "dS ≠ w*ρ".into())?;
    let data = weierstrass(&prob, &rho, &w).map_err(|e| e.to_string())?;
    let want = (Expr::coord(Coord::y(1, [1])) - c).pow(2).scale(&jetvar::symcore::rat(1, 2));
    ensure(data.excess == want, || format!("excess {}", data.excess))?;
    let ids = excess_identities(&prob, &w, &data.excess);
    ensure(ids.iter().all(|(_, e)| *e == Equivalence::Exact), || format!("{ids:?}"))?;
    let d = IntegrationDomain::unit(1, 10_001).unwrap();
    let a = Section::from_gamma(1, BTreeMap::from([(1, e("x(1)", &prob))])).unwrap();
    let b = Section::from_gamma(1, BTreeMap::from([(1, e("x(1) + x(1)*(1 - x(1))", &prob))])).unwrap();
    let wa = hilbert_integral(&w, &rho, &a, &d, Exec::default()).map_err(|e| e.to_string())?;
    let wb = hilbert_integral(&w, &rho, &b, &d, Exec::default()).map_err(|e| e.to_string())?;
    ensure((wa - wb).abs() <= 1e-8, || format!("Hilbert integrals {wa} and {wb}"))?;
    Ok(format!("geodesic, dS = w*ρ, excess = {}, {} identities, |ΔW| = {:e}", data.excess, ids.len(), (wa - wb).abs()))
}

fn c9_forms() -> Outcome {
    let mut g = rng(99);
    let mut forms = 0;
    while forms < 50 {
        let n = g.gen_range(1..=2);
        let ctx = ChartContext::new(n, g.gen_range(1..=2), 2).unwrap();
        let deg = g.gen_range(0..=n as usize + 1);
        let a = random_form(&mut g, &ctx, deg, 1);
        ensure(ext_d(&ext_d(&a)).is_zero(), || format!("d∘d ≠ 0 on {a}"))?;
        let subst: BTreeMap<Coord, Expr> = ctx
            .jets(0, 1)
            .into_iter()
            .map(|c| {
                let atoms = ctx.base_coords();
                (c, polynomial(&mut g, &atoms, 2, 2))
            })
            .collect();
        ensure(pullback(&ext_d(&a), &subst) == ext_d(&pullback(&a, &subst)), || format!("pullback/d on {a}"))?;
        let dec = contact_decompose(&a, &ctx).map_err(|e| e.to_string())?;
        let back = dec.reassemble(&ctx, HorizontalMode::Holonomic).map_err(|e| e.to_string())?;
        ensure(back == a, || format!("reconstruction of {a} gave {back}"))?;
        forms += 1;
    }

    let mut worst = 0.0f64;
    for prob in corpus(11).iter().filter(|p| p.r() <= 2) {
        let rho = poincare_cartan(prob).and_then(|r| r.to_form()).map_err(|e| e.to_string())?;
        let s = 2 * prob.r() - 1;
        let ctx = prob.ctx().with_max_order(s + 1);
        let h = horizontal(&rho, &ctx, HorizontalMode::Holonomic).map_err(|e| e.to_string())?;
        for _ in 0..2 {
            let gamma = random_section(&mut g, prob.n(), prob.m());
            let lhs = pullback(&rho, gamma.prolong(s).components()).top_coefficient(prob.n());
            let rhs = pullback(&h, gamma.prolong(s + 1).components()).top_coefficient(prob.n());
            let base = ctx.base_coords();
            let (cl, cr) = (CompiledExpr::compile(&lhs, &base).unwrap(), CompiledExpr::compile(&rhs, &base).unwrap());
            for pt in sample_points(&mut g, prob.n(), 10) {
                let (a, b) = (cl.eval(&pt).unwrap(), cr.eval(&pt).unwrap());
                let scale = 1.0f64.max(a.abs());
                worst = worst.max((a - b).abs() / scale);
            }
        }
    }
    ensure(worst <= 1e-10, || format!("section pullback identity off by {worst:e}"))?;
    Ok(format!("{forms} random forms; section identity within {worst:e} (relative)"))
}

fn c10_cli() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_jetvar");
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("problems");
    let cases: &[(&str, &str, i32)] = &[
        ("derive", "oscillator.toml", 0),
        ("legendre", "oscillator.toml", 0),
        ("regularity", "oscillator.toml", 0),
        ("hdd-solve", "oscillator.toml", 0),
        ("verify-extremal", "oscillator.toml", 0),
        ("first-variation", "oscillator.toml", 0),
        ("derive", "beam.toml", 0),
        ("legendre", "beam.toml", 0),
        ("hdd-solve", "beam.toml", 0),
        ("hdd-solve", "quartic.toml", 0),
        ("field-check", "free_particle.toml", 0),
        ("excess", "free_particle.toml", 0),
        ("hj", "free_particle.toml", 0),
        ("field-check", "tilted_field.toml", 2),
        ("hj", "tilted_field.toml", 2),
        ("verify-extremal", "laplace.toml", 0),
        ("regularity", "laplace.toml", 0),
        ("derive", "plate_g.toml", 0),
        ("derive", "zero.toml", 0),
        ("legendre", "degenerate.toml", 3),
        ("regularity", "degenerate.toml", 3),
        ("excess", "oscillator.toml", 1),
    ];
    let strip = |out: &[u8]| -> Result<serde_json::Value, String> {
        let mut v: serde_json::Value = serde_json::from_slice(out).map_err(|e| e.to_string())?;
        v.as_object_mut().ok_or("report is not an object")?.remove("timing");
        Ok(v)
    };
    for (cmd, file, code) in cases {
        let mut reports = Vec::new();
        for exec in ["parallel", "sequential", "parallel"] {
            let out = Command::new(exe)
                .args([cmd, dir.join(file).to_str().unwrap(), "--exec", exec])
                .output()
                .map_err(|e| e.to_string())?;
            ensure(out.status.code() == Some(*code), || {
                format!("{cmd} {file}: exit {:?}, expected {code}", out.status.code())
            })?;
            let v = strip(&out.stdout)?;
            ensure(v["exit_code"] == *code, || format!("{cmd} {file}: report exit_code {}", v["exit_code"]))?;
            reports.push(serde_json::to_string(&v).unwrap());
        }
        ensure(reports.windows(2).all(|w| w[0] == w[1]), || format!("{cmd} {file}: reports differ between runs"))?;
    }
    let bad = std::env::temp_dir().join("jetvar-acceptance-malformed.toml");
    std::fs::write(&bad, "[problem]\nn = 1\nm = 1\nr = 1\n[lagrangian]\nL = \"y(1;1)^^2\"\n").unwrap();
    let out = Command::new(exe).args(["derive", bad.to_str().unwrap()]).output().map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(1), || format!("malformed file: exit {:?}", out.status.code()))?;
    ensure(String::from_utf8_lossy(&out.stderr).contains("position"), || {
        "malformed file: error lacks a position".into()
    })?;
    Ok(format!("{} command/file pairs identical across 3 runs with documented exit codes", cases.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("EL-oracle equivalence", c1_el_oracle),
        ("Lepagean conditions", c2_lepagean),
        ("worked derivations", c3_worked),
        ("Hamilton-form defining property", c4_hamilton_property),
        ("Hamilton-de Donder vs Euler-Lagrange", c5_hdd),
        ("regularity and definiteness", c6_regularity),
        ("first variation formula", c7_first_variation),
        ("extremal fields", c8_fields),
        ("forms engine", c9_forms),
        ("CLI determinism", c10_cli),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} [{:.2?}]", k + 1, t.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} [{:.2?}]", k + 1, t.elapsed());
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.2?}",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
