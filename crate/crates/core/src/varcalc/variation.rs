use std::collections::BTreeMap;

use serde::Serialize;

use super::{LagrangianProblem, LepageanForm};
use crate::error::{Error, Result};
use crate::fields::{action, Section};
use crate::forms::{ext_d, interior_product, pullback};
use crate::numerics::{boundary_quadrature, quadrature, Exec, IntegrationDomain};
use crate::symcore::{rat, total_derivative, ChartContext, Coord, Expr, MultiIndex, Rational};

/// Components `d_J ξ^σ` of `j^kξ` for a π-vertical field `ξ = ξ^σ ∂/∂y^σ`.
pub fn prolong_vector_field(xi: &BTreeMap<u8, Expr>, k: usize, ctx: &ChartContext) -> Result<BTreeMap<Coord, Expr>> {
    let ctx = ctx.with_max_order(ctx.max_order.max(k));
    for (s, e) in xi {
        ctx.validate(&Coord::y(*s, []))?;
        if let Some(c) = e.coords().into_iter().find(|c| !c.is_base() && c.jet_order() != Some(0)) {
            return Err(Error::Invalid(format!("vector field component ξ^{s} is not vertical: depends on {c}")));
        }
    }
    let mut out = BTreeMap::new();
    for (s, e) in xi {
        let mut layer = BTreeMap::from([(MultiIndex::empty(), e.clone())]);
        out.insert(Coord::y(*s, []), e.clone());
        for _ in 0..k {
            let mut next = BTreeMap::new();
            for (j, c) in &layer {
                for i in j.entries().last().copied().unwrap_or(1)..=ctx.n {
                    if let std::collections::btree_map::Entry::Vacant(e) = next.entry(j.with(i)) {
                        e.insert(total_derivative(c, i, &ctx)?);
                    }
                }
            }
            for (j, c) in &next {
                out.insert(Coord::Jet(*s, j.clone()), c.clone());
            }
            layer = next;
        }
    }
    Ok(out)
}

/// Both sides of the first variation formula on a box.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirstVariation {
    pub lhs: f64,
    pub rhs: f64,
    pub interior: f64,
    pub boundary: f64,
}

/// One RK4 step of `dy/dt = ξ(x, y)` from `y = γ(x)`, done symbolically.
fn flow_step(xi: &BTreeMap<u8, Expr>, gamma: &Section, t: &Rational) -> Result<Section> {
    let y0: BTreeMap<u8, Expr> = gamma.base_components().map(|(s, e)| (s, e.clone())).collect();
    let eval = |y: &BTreeMap<u8, Expr>| -> BTreeMap<u8, Expr> {
        let sub: BTreeMap<Coord, Expr> = y.iter().map(|(s, e)| (Coord::y(*s, []), e.clone())).collect();
        y.keys().map(|s| (*s, xi.get(s).map(|e| e.substitute(&sub)).unwrap_or_default())).collect()
    };
    let shift = |k: &BTreeMap<u8, Expr>, a: &Rational| -> BTreeMap<u8, Expr> {
        y0.iter().map(|(s, e)| (*s, e + &k[s].scale(a))).collect()
    };
    let half = t * &rat(1, 2);
    let k1 = eval(&y0);
    let k2 = eval(&shift(&k1, &half));
    let k3 = eval(&shift(&k2, &half));
    let k4 = eval(&shift(&k3, t));
    let sixth = t * &rat(1, 6);
    let two = rat(2, 1);
    let next = y0
        .iter()
        .map(|(s, e)| {
            let incr = &k1[s] + &k2[s].scale(&two) + k3[s].scale(&two) + k4[s].clone();
            (*s, e + &incr.scale(&sixth))
        })
        .collect();
    Section::from_gamma(gamma.n(), next)
}

/// Finite-difference derivative of the action along the flow of `ξ`
/// against the interior and boundary terms of `ρ`.
pub fn first_variation_check(
    prob: &LagrangianProblem,
    rho: &LepageanForm,
    xi: &BTreeMap<u8, Expr>,
    gamma: &Section,
    domain: &IntegrationDomain,
    eps: f64,
    exec: Exec,
) -> Result<FirstVariation> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::Invalid(format!("finite-difference step must be positive, got {eps}")));
    }
    let r = prob.r();
    let ctx = prob.ctx();
    let t = Rational::from_float(eps).ok_or_else(|| Error::Invalid("step is not representable".into()))?;
    let plus = flow_step(xi, gamma, &t)?;
    let minus = flow_step(xi, gamma, &-t.clone())?;
    let lhs = (action(prob, &plus, domain, exec)? - action(prob, &minus, domain, exec)?) / (2.0 * eps);

    let v = prolong_vector_field(xi, 2 * r - 1, ctx)?;
    let form = rho.to_form()?;
    let jet = gamma.prolong(2 * r).components().clone();
    let inner_d = pullback(&interior_product(&v, &ext_d(&form))?, &jet);
    let interior = quadrature(&inner_d.top_coefficient(prob.n()), domain, exec)?;
    let inner = pullback(&interior_product(&v, &form)?, &jet);
    let boundary = boundary_quadrature(&inner, domain, exec)?;
    Ok(FirstVariation { lhs, rhs: interior + boundary, interior, boundary })
}
