use std::collections::BTreeMap;

use super::Section;
use crate::error::{Error, Result};
use crate::forms::{ext_d, interior_product, pullback, DiffForm};
use crate::numerics::{quadrature, Exec, IntegrationDomain};
use crate::symcore::{zero_test, Coord, Equivalence, Expr, MultiIndex, Rational};
use crate::varcalc::{LagrangianProblem, LepageanForm};

/// A section `w` of `π_{2r−1,r−1}`: jets of orders `r..=2r−1` as functions
/// of `x` and jets of order below `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeField {
    r: usize,
    components: BTreeMap<Coord, Expr>,
}

impl SlopeField {
    /// Every jet coordinate of order `r..=2r−1` must be assigned.
    pub fn new(prob: &LagrangianProblem, components: BTreeMap<Coord, Expr>) -> Result<Self> {
        let (ctx, r) = (prob.ctx(), prob.r());
        for (c, e) in &components {
            ctx.validate(c)?;
            match c.jet_order() {
                Some(k) if (r..=2 * r - 1).contains(&k) => {}
                _ => {
                    return Err(Error::Invalid(format!(
                        "slope field component {c} is not of order {r}..={}",
                        2 * r - 1
                    )))
                }
            }
            for a in e.coords() {
                ctx.validate(&a)?;
                if !(a.is_base() || a.jet_order().is_some_and(|k| k < r)) {
                    return Err(Error::Invalid(format!("slope field component for {c} depends on {a}")));
                }
            }
        }
        if let Some(missing) = ctx.jets(r, 2 * r - 1).into_iter().find(|c| !components.contains_key(c)) {
            return Err(Error::Invalid(format!("slope field has no component for {missing}")));
        }
        Ok(SlopeField { r, components })
    }

    pub fn components(&self) -> &BTreeMap<Coord, Expr> {
        &self.components
    }

    /// Substitution of all field components.
    pub fn substitution(&self) -> &BTreeMap<Coord, Expr> {
        &self.components
    }

    /// Only the order-`r` components, i.e. `π_{2r−1,r} ∘ w`.
    pub fn top_substitution(&self) -> BTreeMap<Coord, Expr> {
        self.components
            .iter()
            .filter(|(c, _)| c.jet_order() == Some(self.r))
            .map(|(c, e)| (c.clone(), e.clone()))
            .collect()
    }
}

/// `w*ρ`, a form on `J^{r−1}Y`.
pub fn field_pullback(w: &SlopeField, rho: &LepageanForm) -> Result<DiffForm> {
    Ok(pullback(&rho.to_form()?, w.substitution()))
}

fn form_zero_status(a: &DiffForm) -> Equivalence {
    let mut status = Equivalence::Exact;
    for (_, c) in a.terms() {
        match zero_test(c) {
            Equivalence::Different => return Equivalence::Different,
            Equivalence::Probable => status = Equivalence::Probable,
            Equivalence::Exact => {}
        }
    }
    status
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicCheck {
    /// `w*dρ`
    pub pullback: DiffForm,
    pub status: Equivalence,
}

impl GeodesicCheck {
    pub fn is_geodesic(&self) -> bool {
        self.status.holds()
    }
}

/// Tests `w*dρ = 0`.
pub fn geodesic_check(w: &SlopeField, rho: &LepageanForm) -> Result<GeodesicCheck> {
    let pb = pullback(&ext_d(&rho.to_form()?), w.substitution());
    let status = form_zero_status(&pb);
    Ok(GeodesicCheck { pullback: pb, status })
}

/// Radial homotopy primitive of a closed form with polynomial coefficients:
/// `S = Σ_I ∫₀¹ t^{p−1} a_I(t z) dt · i_Z dz^I`, `Z` the Euler field.
pub fn homotopy_primitive(a: &DiffForm) -> Result<DiffForm> {
    if a.degree() == 0 {
        return Err(Error::Invalid("homotopy operator needs a form of positive degree".into()));
    }
    if !form_zero_status(&ext_d(a)).holds() {
        return Err(Error::NotClosed(format!("d of {a} is nonzero")));
    }
    let p = a.degree() as i64;
    let mut out = DiffForm::zero(a.degree() - 1);
    for (syms, coeff) in a.terms() {
        let euler: BTreeMap<Coord, Expr> = syms.iter().map(|c| (c.clone(), Expr::coord(c.clone()))).collect();
        let contracted = interior_product(&euler, &DiffForm::monomial(Expr::one(), syms.clone()))?;
        for (m, c) in coeff.terms() {
            let deg = m.poly_degree().ok_or_else(|| {
                Error::UnsupportedSymbolic(format!("homotopy integral of non-polynomial coefficient {coeff}"))
            })?;
            let factor = c / Rational::from_integer((p + deg as i64).into());
            out = out.add(&contracted.scale(&Expr::from_term(m.clone(), factor)));
        }
    }
    Ok(out)
}

/// `S` with `w*ρ = dS`; verified before returning.
pub fn hj_primitive(w: &SlopeField, rho: &LepageanForm) -> Result<DiffForm> {
    let a = field_pullback(w, rho)?;
    if a.is_zero() {
        return Ok(DiffForm::zero(a.degree().saturating_sub(1)));
    }
    let s = homotopy_primitive(&a)?;
    if !form_zero_status(&ext_d(&s).sub(&a)).holds() {
        return Err(Error::Internal("homotopy primitive failed dS = w*ρ".into()));
    }
    Ok(s)
}

/// `W_Ω(γ) = ∫_Ω j^{r−1}γ* w*ρ`.
pub fn hilbert_integral(
    w: &SlopeField,
    rho: &LepageanForm,
    gamma: &Section,
    domain: &IntegrationDomain,
    exec: Exec,
) -> Result<f64> {
    let prob = rho.problem();
    let jet = gamma.prolong(prob.r() - 1);
    let density = pullback(&field_pullback(w, rho)?, jet.components()).top_coefficient(prob.n());
    quadrature(&density, domain, exec)
}

/// `λ_Ω(γ) = ∫_Ω L ∘ j^rγ`.
pub fn action(prob: &LagrangianProblem, gamma: &Section, domain: &IntegrationDomain, exec: Exec) -> Result<f64> {
    let jet = gamma.prolong(prob.r());
    quadrature(&prob.lagrangian().substitute(jet.components()), domain, exec)
}

/// Maps `(σ, J)` keys to jet coordinates.
pub fn components_from_pairs(pairs: BTreeMap<(u8, MultiIndex), Expr>) -> BTreeMap<Coord, Expr> {
    pairs.into_iter().map(|((s, j), e)| (Coord::Jet(s, j), e)).collect()
}
