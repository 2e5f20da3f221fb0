use std::collections::BTreeMap;

use super::momenta::{inv_weight, weight};
use super::LagrangianProblem;
use crate::error::{Error, Result};
use crate::forms::{contact_decompose, contact_form, omega0, omega_i, ContactSymbol, DiffForm};
use crate::symcore::{total_derivative, zero_test, Coord, Expr, MultiIndex};

/// Key `(σ, i, J)` of the coefficient of `ω^σ_J ∧ ω_i`.
pub type FKey = (u8, u8, MultiIndex);

/// Lepagean equivalent of contact order one:
/// `ρ = L ω₀ + Σ f_σ^{i,J} ω^σ_J ∧ ω_i`, `0 ≤ |J| ≤ r − 1`, `J` nondecreasing.
#[derive(Clone, Debug, PartialEq)]
pub struct LepageanForm {
    prob: LagrangianProblem,
    f: BTreeMap<FKey, Expr>,
}

impl LepageanForm {
    pub fn problem(&self) -> &LagrangianProblem {
        &self.prob
    }

    /// Nonzero coefficients only.
    pub fn coefficients(&self) -> &BTreeMap<FKey, Expr> {
        &self.f
    }

    pub fn coefficient(&self, sigma: u8, i: u8, j: &MultiIndex) -> Expr {
        self.f.get(&(sigma, i, j.clone())).cloned().unwrap_or_default()
    }

    /// The form itself in the coordinate covector basis.
    pub fn to_form(&self) -> Result<DiffForm> {
        let ctx = self.prob.ctx();
        let mut out = omega0(ctx.n).scale(self.prob.lagrangian());
        for ((s, i, j), c) in &self.f {
            let term = contact_form(*s, j, ctx)?.wedge(&omega_i(*i, ctx.n));
            out = out.add(&term.scale(c));
        }
        Ok(out)
    }
}

/// Free functions `g_σ^{i,J}` (`1 ≤ |J| ≤ r − 1`) parametrizing the
/// Lepagean family.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GSpec {
    entries: BTreeMap<FKey, Expr>,
}

impl GSpec {
    pub fn new() -> Self {
        GSpec::default()
    }

    pub fn insert(&mut self, sigma: u8, i: u8, j: MultiIndex, g: Expr) {
        if g.is_zero() {
            self.entries.remove(&(sigma, i, j));
        } else {
            self.entries.insert((sigma, i, j), g);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<FKey, Expr> {
        &self.entries
    }

    pub fn get(&self, sigma: u8, i: u8, j: &MultiIndex) -> Option<&Expr> {
        self.entries.get(&(sigma, i, j.clone()))
    }

    /// Index ranges, order bounds, and the vanishing of
    /// `Σ_{i ∈ K} N(K∖i) g^{i, K∖i}` for every `K` with `2 ≤ |K| ≤ r`.
    pub fn validate(&self, prob: &LagrangianProblem) -> Result<()> {
        let (ctx, r) = (prob.ctx(), prob.r());
        if r == 1 && !self.is_empty() {
            return Err(Error::Invalid("the Lepagean family has no free functions when r = 1".into()));
        }
        for ((s, i, j), g) in &self.entries {
            let label = format!("g({s};{j}|{i})");
            ctx.validate(&Coord::Jet(*s, j.with(*i)))?;
            if j.is_empty() || j.len() > r - 1 {
                return Err(Error::Invalid(format!("{label}: |J| must lie in 1..={}", r - 1)));
            }
            let bound = 2 * r - 2 - j.len();
            for c in g.coords() {
                ctx.validate(&c)?;
                if c.is_vel() || c.is_mom() {
                    return Err(Error::Invalid(format!("{label} depends on {c}")));
                }
                if c.jet_order().is_some_and(|k| k > bound) {
                    return Err(Error::Invalid(format!("{label} has order above {bound}")));
                }
            }
        }
        for k in 2..=r {
            for s in 1..=ctx.m {
                for kk in MultiIndex::all_of_len(ctx.n, k) {
                    let sum: Expr = kk
                        .distinct()
                        .map(|i| {
                            let j = kk.without(i).expect("i is an entry of K");
                            self.get(s, i, &j).map(|g| g.scale(&weight(&j))).unwrap_or_default()
                        })
                        .sum();
                    if !zero_test(&sum).holds() {
                        return Err(Error::Invalid(format!(
                            "inadmissible g: weighted symmetrization over ({s};{kk}) is {sum}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The local Poincaré–Cartan equivalent `Θ`: the member of the family with
/// `g = 0`, so that `f^{i,J} = N(J) P^{J i}`.
pub fn poincare_cartan(prob: &LagrangianProblem) -> Result<LepageanForm> {
    lepagean_from_g(prob, &GSpec::new())
}

/// Runs the descending relations
/// `f^{i,J} = N(J) [ (1/N(K)) (∂L/∂y_K − Σ_l d_l f^{l,K}) + g^{i,J} ]`,
/// `K = J ∪ {i}`, from `|K| = r` down to `|K| = 1`.
pub fn lepagean_from_g(prob: &LagrangianProblem, g: &GSpec) -> Result<LepageanForm> {
    g.validate(prob)?;
    let ctx = prob.ctx();
    let mut f: BTreeMap<FKey, Expr> = BTreeMap::new();
    for k in (1..=prob.r()).rev() {
        for s in 1..=ctx.m {
            for kk in MultiIndex::all_of_len(ctx.n, k) {
                let mut base = prob.lagrangian().partial(&Coord::Jet(s, kk.clone()));
                if k < prob.r() {
                    for l in 1..=ctx.n {
                        if let Some(c) = f.get(&(s, l, kk.clone())) {
                            base = base - total_derivative(c, l, ctx)?;
                        }
                    }
                }
                let base = base.scale(&inv_weight(&kk));
                for i in kk.distinct() {
                    let j = kk.without(i).expect("i is an entry of K");
                    let mut c = base.clone();
                    if let Some(gv) = g.get(s, i, &j) {
                        c += gv;
                    }
                    let c = c.scale(&weight(&j));
                    if !c.is_zero() {
                        f.insert((s, i, j), c);
                    }
                }
            }
        }
    }
    Ok(LepageanForm { prob: prob.clone(), f })
}

/// `f(g) − f(0)`, the g-induced correction of the coefficients.
pub fn q_table(prob: &LagrangianProblem, g: &GSpec) -> Result<BTreeMap<FKey, Expr>> {
    let with = lepagean_from_g(prob, g)?;
    let without = poincare_cartan(prob)?;
    let mut keys: Vec<&FKey> = with.f.keys().chain(without.f.keys()).collect();
    keys.sort();
    keys.dedup();
    Ok(keys
        .into_iter()
        .filter_map(|k| {
            let d = with.f.get(k).cloned().unwrap_or_default() - without.f.get(k).cloned().unwrap_or_default();
            (!d.is_zero()).then(|| (k.clone(), d))
        })
        .collect())
}

/// Failure of the two Lepagean conditions for a candidate `ρ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LepageanDefect {
    /// Coefficient of `ω^σ ∧ ω₀` in `p₁(dρ)`.
    pub euler_lagrange: BTreeMap<u8, Expr>,
    /// Nonzero coefficients of `ω^σ_J ∧ ω₀` in `p₁(dρ)` with `|J| ≥ 1`.
    pub contact: BTreeMap<(u8, MultiIndex), Expr>,
    /// `h(ρ) − λ`, as the coefficient of `ω₀`.
    pub horizontal_mismatch: Expr,
}

impl LepageanDefect {
    pub fn is_lepagean(&self) -> bool {
        self.contact.values().all(|e| zero_test(e).holds()) && zero_test(&self.horizontal_mismatch).holds()
    }
}

fn max_order_of(a: &DiffForm) -> usize {
    a.terms().flat_map(|(syms, c)| syms.iter().filter_map(Coord::jet_order).chain(c.max_jet_order())).max().unwrap_or(0)
}

pub fn lepagean_defect(rho: &DiffForm, prob: &LagrangianProblem) -> Result<LepageanDefect> {
    let n = prob.n();
    if rho.degree() != n as usize {
        return Err(Error::Invalid(format!("expected an {n}-form, got degree {}", rho.degree())));
    }
    let ctx = prob.ctx().with_max_order(prob.ctx().max_order.max(max_order_of(rho) + 1));
    let dec = contact_decompose(rho, &ctx)?;
    if dec.contact_parts.iter().skip(1).any(|p| !p.is_zero()) {
        return Err(Error::Invalid("form has contact order above one".into()));
    }
    let horizontal_mismatch = dec.horizontal.top_coefficient(n) - prob.lagrangian().clone();

    let d = contact_decompose(&crate::forms::ext_d(rho), &ctx)?;
    let p1 = d.part(1);
    let mut euler_lagrange: BTreeMap<u8, Expr> = (1..=prob.m()).map(|s| (s, Expr::zero())).collect();
    let mut contact = BTreeMap::new();
    for (syms, c) in p1.terms() {
        let omegas: Vec<_> = syms.iter().filter(|s| matches!(s, ContactSymbol::Omega(..))).collect();
        let dxs = syms.len() - omegas.len();
        let ContactSymbol::Omega(s, j) = omegas[0].clone() else { unreachable!() };
        if dxs != n as usize {
            return Err(Error::Internal("1-contact (n+1)-form without a full ω₀ factor".into()));
        }
        // stored tuple is ω₀ ∧ ω; reorder to ω ∧ ω₀
        let coeff = if n % 2 == 1 { -c } else { c.clone() };
        if j.is_empty() {
            euler_lagrange.insert(s, coeff);
        } else {
            contact.insert((s, j), coeff);
        }
    }
    Ok(LepageanDefect { euler_lagrange, contact, horizontal_mismatch })
}
