use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::slope::{field_pullback, geodesic_check, SlopeField};
use super::Section;
use crate::error::{Error, Result};
use crate::forms::{horizontal, omega0, DiffForm, HorizontalMode};
use crate::legendre::hessian_definiteness;
use crate::numerics::{residual_grid, Exec, IntegrationDomain};
use crate::symcore::{equivalent, zero_test, CompiledExpr, Coord, Equivalence, Expr};
use crate::varcalc::{LagrangianProblem, LepageanForm};

#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassData {
    /// `E = λ − w*ρ`
    pub form: DiffForm,
    /// `e_w(L)`
    pub excess: Expr,
    /// Outcome of `h(E) = e_w(L) ω₀`.
    pub consistency: Equivalence,
}

/// Weierstrass form and excess function of `L` relative to the field `w`.
///
/// With nondecreasing top indices the excess reads
/// `L − L∘w − Σ_K (∂L/∂y_K ∘ w)(y_K − w_K)`, `|K| = r`, with no extra
/// multiplicity factors since each coordinate `y_K` occurs once.
pub fn weierstrass(prob: &LagrangianProblem, rho: &LepageanForm, w: &SlopeField) -> Result<WeierstrassData> {
    let l = prob.lagrangian();
    let top = w.top_substitution();
    let mut excess = l - &l.substitute(&top);
    for (c, wk) in &top {
        let dl = l.partial(c).substitute(&top);
        excess = excess - dl * (Expr::coord(c.clone()) - wk.clone());
    }
    let form = omega0(prob.n()).scale(l).sub(&field_pullback(w, rho)?);
    let h = horizontal(&form, prob.ctx(), HorizontalMode::Holonomic)?;
    let consistency = equivalent(&h.top_coefficient(prob.n()), &excess);
    Ok(WeierstrassData { form, excess, consistency })
}

/// Symbolic checks of the excess at the field: the function, its base and
/// jet partials vanish, and its top-jet Hessian matches that of `L`.
pub fn excess_identities(prob: &LagrangianProblem, w: &SlopeField, excess: &Expr) -> Vec<(String, Equivalence)> {
    let top = w.top_substitution();
    let at_field = |e: &Expr| e.substitute(&top);
    let mut out = vec![("e".to_string(), zero_test(&at_field(excess)))];
    for x in prob.ctx().base_coords() {
        out.push((format!("de/d{x}"), zero_test(&at_field(&excess.partial(&x)))));
    }
    let jets = prob.ctx().jets(0, prob.r());
    for c in &jets {
        out.push((format!("de/d{c}"), zero_test(&at_field(&excess.partial(c)))));
    }
    let tops: Vec<&Coord> = jets.iter().filter(|c| c.jet_order() == Some(prob.r())).collect();
    for a in &tops {
        for b in &tops {
            let e2 = excess.partial(a).partial(b);
            let l2 = prob.lagrangian().partial(a).partial(b);
            out.push((format!("d2e/d{a}d{b}"), equivalent(&at_field(&e2), &at_field(&l2))));
        }
    }
    out
}

/// Sampling parameters for the minimum certificate.
#[derive(Clone, Debug, Serialize)]
pub struct CertificateOptions {
    pub samples: usize,
    pub radius: f64,
    pub seed: u64,
    pub compat_tol: f64,
    pub excess_tol: f64,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions { samples: 2000, radius: 0.5, seed: 7, compat_tol: 1e-9, excess_tol: 1e-12 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Condition {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub conditions: Vec<Condition>,
    /// Sampled evidence for the strong local minimum (nonnegative excess).
    pub strong: bool,
    /// Sampled evidence for the weak local minimum (positive definite top Hessian).
    pub weak: bool,
    pub min_excess: f64,
    pub caveat: String,
}

/// Sampling certificate for local minimality of `γ₀`; never a proof.
pub fn minimum_certificate(
    prob: &LagrangianProblem,
    rho: &LepageanForm,
    w: &SlopeField,
    gamma0: &Section,
    domain: &IntegrationDomain,
    opts: &CertificateOptions,
    exec: Exec,
) -> Result<CertificateReport> {
    let r = prob.r();
    let jet_r = gamma0.prolong(r);
    let lower = gamma0.prolong(r - 1);

    // π_{2r−1,r} ∘ w ∘ j^{r−1}γ₀ = j^rγ₀
    let compat: Vec<(String, Expr)> = w
        .top_substitution()
        .iter()
        .map(|(c, wk)| {
            (c.to_string(), wk.substitute(lower.components()) - jet_r.component(c).cloned().unwrap_or_default())
        })
        .collect();
    let comp = residual_grid(&compat, &BTreeMap::new(), domain, exec)?;
    if comp.max_abs > opts.compat_tol {
        return Err(Error::Incompatible(format!("max residual {:e} exceeds {:e}", comp.max_abs, opts.compat_tol)));
    }
    let mut conditions = vec![Condition {
        name: "compatibility".into(),
        pass: true,
        detail: format!("max residual {:e}", comp.max_abs),
    }];

    let geo = geodesic_check(w, rho)?;
    conditions.push(Condition { name: "geodesic".into(), pass: geo.is_geodesic(), detail: geo.status.label().into() });

    let data = weierstrass(prob, rho, w)?;
    let ids = excess_identities(prob, w, &data.excess);
    let ids_ok = ids.iter().all(|(_, e)| e.holds());
    let failing: Vec<&str> = ids.iter().filter(|(_, e)| !e.holds()).map(|(k, _)| k.as_str()).collect();
    conditions.push(Condition {
        name: "excess-identities".into(),
        pass: ids_ok,
        detail: if ids_ok { "all hold".into() } else { format!("failing: {}", failing.join(", ")) },
    });

    // excess sampled on a neighborhood of the field
    let jets = prob.ctx().jets(0, r);
    let mut slots = prob.ctx().base_coords();
    slots.extend(jets.iter().cloned());
    let e_c = CompiledExpr::compile(&data.excess, &slots)?;
    let w_top: Vec<(usize, CompiledExpr)> = jets
        .iter()
        .enumerate()
        .filter(|(_, c)| c.jet_order() == Some(r))
        .map(|(k, c)| Ok((k, CompiledExpr::compile(&w.top_substitution()[c], &slots)?)))
        .collect::<Result<_>>()?;
    let low_c: Vec<(usize, CompiledExpr)> = jets
        .iter()
        .enumerate()
        .filter(|(_, c)| c.jet_order().is_some_and(|k| k < r))
        .map(|(k, c)| {
            let comp = lower.component(c).cloned().unwrap_or_default();
            Ok((k, CompiledExpr::compile(&comp, &prob.ctx().base_coords())?))
        })
        .collect::<Result<_>>()?;
    let n = prob.n() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let draws: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = (0..opts.samples)
        .map(|_| {
            let x: Vec<f64> = (0..n).map(|a| rng.gen_range(domain.lower[a]..=domain.upper[a])).collect();
            let dy: Vec<f64> = jets.iter().map(|_| rng.gen_range(-opts.radius..=opts.radius)).collect();
            let dz: Vec<f64> = jets.iter().map(|_| rng.gen_range(-opts.radius..=opts.radius)).collect();
            (x, dy, dz)
        })
        .collect();
    let values = exec.try_map(&draws, |(x, dy, dz)| {
        let mut v = vec![0.0; slots.len()];
        v[..n].copy_from_slice(x);
        for (k, c) in &low_c {
            v[n + k] = c.eval(x)? + dy[*k];
        }
        for (k, c) in &w_top {
            v[n + k] = c.eval(&v)? + dz[*k];
        }
        e_c.eval(&v)
    })?;
    let min_excess = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let min_excess = if min_excess.is_finite() { min_excess } else { 0.0 };
    let nonneg = min_excess >= -opts.excess_tol;
    conditions.push(Condition {
        name: "excess-nonnegative".into(),
        pass: nonneg,
        detail: format!("min {min_excess:e} over {} samples, radius {}", opts.samples, opts.radius),
    });

    // positive definiteness of the top Hessian along j^rγ₀
    let mut definite = true;
    let mut worst = f64::INFINITY;
    for pt in domain.points() {
        let mut at: BTreeMap<Coord, f64> = prob.ctx().base_coords().into_iter().zip(pt.iter().cloned()).collect();
        let bind: BTreeMap<Coord, f64> = at.clone();
        for c in &jets {
            let e = jet_r.component(c).cloned().unwrap_or_default();
            at.insert(c.clone(), e.eval(&bind)?);
        }
        let d = hessian_definiteness(prob, &at)?;
        worst = worst.min(d.min_pivot);
        definite &= d.positive_definite;
    }
    conditions.push(Condition {
        name: "hessian-positive-definite".into(),
        pass: definite,
        detail: format!("smallest pivot {worst:e}"),
    });

    let base_ok = conditions[0].pass && conditions[1].pass;
    let strong = base_ok && nonneg;
    let weak = base_ok && ids_ok && definite;
    Ok(CertificateReport {
        conditions,
        strong,
        weak,
        min_excess,
        caveat: "sampling certificate: conditions were checked at finitely many points and are evidence, not a proof"
            .into(),
    })
}
