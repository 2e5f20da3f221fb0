use std::collections::BTreeMap;
use std::fmt;

use super::form::{Basis, DiffForm, Form};
use crate::error::{Error, Result};
use crate::symcore::{ChartContext, Coord, Expr, MultiIndex};

/// Basis covectors `dx^i` and `ω^σ_J` of the contact frame.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ContactSymbol {
    Dx(u8),
    Omega(u8, MultiIndex),
}

impl fmt::Display for ContactSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContactSymbol::Dx(i) => write!(f, "dx({i})"),
            ContactSymbol::Omega(s, j) if j.is_empty() => write!(f, "w({s})"),
            ContactSymbol::Omega(s, j) => write!(f, "w({s};{j})"),
        }
    }
}

impl Basis for ContactSymbol {}

pub type ContactForm = Form<ContactSymbol>;

/// How `dy^σ_J` is split into horizontal and contact pieces.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum HorizontalMode {
    /// `dy^σ_J = ω^σ_J + y^σ_{J∪l} dx^l`
    #[default]
    Holonomic,
    /// `dy^σ_J = ω^σ_J + v(σ;J|l) dx^l`, the splitting on `J^1(J^{2r-1}Y)`
    Velocity,
}

impl HorizontalMode {
    fn slope(self, sigma: u8, j: &MultiIndex, l: u8, ctx: &ChartContext) -> Result<Coord> {
        match self {
            HorizontalMode::Holonomic => {
                if j.len() >= ctx.max_order {
                    return Err(Error::OrderOverflow(format!(
                        "contact form of dy({sigma};{j}) needs order {} > {}",
                        j.len() + 1,
                        ctx.max_order
                    )));
                }
                Ok(Coord::Jet(sigma, j.with(l)))
            }
            HorizontalMode::Velocity => {
                if !ctx.velocity_enabled || j.len() > ctx.vel_order() {
                    return Err(Error::OrderOverflow(format!("no velocity for dy({sigma};{j})")));
                }
                Ok(Coord::Vel(sigma, j.clone(), l))
            }
        }
    }
}

/// Decomposition `a = h(a) + p_1(a) + ... + p_p(a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactDecomposition {
    /// `h(a)`, in the `dx` basis.
    pub horizontal: DiffForm,
    /// `p_k(a)` at index `k-1`, in the `{dx, ω}` basis.
    pub contact_parts: Vec<ContactForm>,
}

impl ContactDecomposition {
    /// Re-expands every part in the coordinate basis and sums them.
    pub fn reassemble(&self, ctx: &ChartContext, mode: HorizontalMode) -> Result<DiffForm> {
        let mut out = self.horizontal.clone();
        for p in &self.contact_parts {
            out = out.add(&expand_contact(p, ctx, mode)?);
        }
        Ok(out)
    }

    /// `p_k(a)` (k ≥ 1); zero when `k` exceeds the degree.
    pub fn part(&self, k: usize) -> ContactForm {
        self.contact_parts
            .get(k.wrapping_sub(1))
            .cloned()
            .unwrap_or_else(|| ContactForm::zero(self.horizontal.degree()))
    }
}

fn symbol_image(c: &Coord, ctx: &ChartContext, mode: HorizontalMode) -> Result<ContactForm> {
    match c {
        Coord::Base(i) => Ok(ContactForm::basis(ContactSymbol::Dx(*i))),
        Coord::Jet(s, j) => {
            let mut out = ContactForm::basis(ContactSymbol::Omega(*s, j.clone()));
            for l in 1..=ctx.n {
                out.add_term(Expr::coord(mode.slope(*s, j, l, ctx)?), vec![ContactSymbol::Dx(l)]);
            }
            Ok(out)
        }
        _ => Err(Error::Invalid(format!("no contact splitting for d{c}"))),
    }
}

/// Rewrites `a` in the `{dx^i, ω^σ_J}` basis.
pub fn to_contact_basis(a: &DiffForm, ctx: &ChartContext, mode: HorizontalMode) -> Result<ContactForm> {
    let mut images: BTreeMap<&Coord, ContactForm> = BTreeMap::new();
    let mut out = ContactForm::zero(a.degree());
    for (syms, f) in a.terms() {
        let mut acc = ContactForm::scalar(f.clone());
        for c in syms {
            if !images.contains_key(c) {
                images.insert(c, symbol_image(c, ctx, mode)?);
            }
            acc = acc.wedge(&images[c]);
        }
        out = out.add(&acc);
    }
    Ok(out)
}

/// Substitutes `ω^σ_J = dy^σ_J − slope dx^l` back into the coordinate basis.
pub fn expand_contact(a: &ContactForm, ctx: &ChartContext, mode: HorizontalMode) -> Result<DiffForm> {
    let mut out = DiffForm::zero(a.degree());
    for (syms, f) in a.terms() {
        let mut acc = DiffForm::scalar(f.clone());
        for s in syms {
            let img = match s {
                ContactSymbol::Dx(i) => DiffForm::dx(*i),
                ContactSymbol::Omega(sigma, j) => omega_with(*sigma, j, ctx, mode)?,
            };
            acc = acc.wedge(&img);
        }
        out = out.add(&acc);
    }
    Ok(out)
}

fn omega_with(sigma: u8, j: &MultiIndex, ctx: &ChartContext, mode: HorizontalMode) -> Result<DiffForm> {
    let mut out = DiffForm::d(Coord::Jet(sigma, j.clone()));
    for l in 1..=ctx.n {
        out.add_term(-Expr::coord(mode.slope(sigma, j, l, ctx)?), vec![Coord::Base(l)]);
    }
    Ok(out)
}

fn to_horizontal(a: &ContactForm) -> DiffForm {
    let mut out = DiffForm::zero(a.degree());
    for (syms, f) in a.terms() {
        let s = syms
            .iter()
            .map(|s| match s {
                ContactSymbol::Dx(i) => Coord::Base(*i),
                ContactSymbol::Omega(..) => unreachable!("horizontal part carries no contact symbol"),
            })
            .collect();
        out.add_term(f.clone(), s);
    }
    out
}

/// Contact decomposition with the holonomic splitting.
pub fn contact_decompose(a: &DiffForm, ctx: &ChartContext) -> Result<ContactDecomposition> {
    contact_decompose_with(a, ctx, HorizontalMode::Holonomic)
}

pub fn contact_decompose_with(a: &DiffForm, ctx: &ChartContext, mode: HorizontalMode) -> Result<ContactDecomposition> {
    let cf = to_contact_basis(a, ctx, mode)?;
    let p = a.degree();
    let mut parts = vec![ContactForm::zero(p); p + 1];
    for (syms, f) in cf.terms() {
        let k = syms.iter().filter(|s| matches!(s, ContactSymbol::Omega(..))).count();
        parts[k].add_term(f.clone(), syms.clone());
    }
    let horizontal = to_horizontal(&parts[0]);
    parts.remove(0);
    Ok(ContactDecomposition { horizontal, contact_parts: parts })
}

/// `h(a)`.
pub fn horizontal(a: &DiffForm, ctx: &ChartContext, mode: HorizontalMode) -> Result<DiffForm> {
    Ok(contact_decompose_with(a, ctx, mode)?.horizontal)
}

/// `ω₀ = dx^1 ∧ ... ∧ dx^n`.
pub fn omega0(n: u8) -> DiffForm {
    DiffForm::monomial(Expr::one(), (1..=n).map(Coord::Base).collect())
}

/// `ω_i = i_{∂/∂x^i} ω₀ = (−1)^{i−1} dx^1 ∧ ... (omit i) ... ∧ dx^n`.
pub fn omega_i(i: u8, n: u8) -> DiffForm {
    let sign = if i % 2 == 1 { 1 } else { -1 };
    DiffForm::monomial(Expr::int(sign), (1..=n).filter(|&k| k != i).map(Coord::Base).collect())
}

/// `ω^σ_J = dy^σ_J − y^σ_{J∪l} dx^l`.
pub fn contact_form(sigma: u8, j: &MultiIndex, ctx: &ChartContext) -> Result<DiffForm> {
    omega_with(sigma, j, ctx, HorizontalMode::Holonomic)
}

/// The frame `{ω₀, ω_i, ω^σ_J}` for `|J| < max_order`.
#[derive(Clone, Debug)]
pub struct OmegaBasis {
    pub omega0: DiffForm,
    pub omega_i: Vec<DiffForm>,
    pub contact: BTreeMap<(u8, MultiIndex), DiffForm>,
}

pub fn omega_basis(ctx: &ChartContext) -> Result<OmegaBasis> {
    let mut contact = BTreeMap::new();
    for s in 1..=ctx.m {
        for j in MultiIndex::all_between(ctx.n, 0, ctx.max_order - 1) {
            contact.insert((s, j.clone()), contact_form(s, &j, ctx)?);
        }
    }
    Ok(OmegaBasis { omega0: omega0(ctx.n), omega_i: (1..=ctx.n).map(|i| omega_i(i, ctx.n)).collect(), contact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::ext_d;
    use crate::symcore::parse_expr;

    #[test]
    fn frame_examples() {
        assert_eq!(omega_i(1, 1), DiffForm::scalar(Expr::one()));
        assert_eq!(omega0(1), DiffForm::dx(1));
        assert_eq!(omega_i(2, 2), DiffForm::dx(1).scale(&Expr::int(-1)));
        let ctx = ChartContext::new(1, 1, 1).unwrap();
        let w = contact_form(1, &MultiIndex::empty(), &ctx).unwrap();
        let want = DiffForm::d(Coord::y(1, [])).sub(&DiffForm::dx(1).scale(&Expr::coord(Coord::y(1, [1]))));
        assert_eq!(w, want);
        let top = MultiIndex::new([1; 1]);
        assert!(matches!(contact_form(1, &top, &ctx.with_max_order(1)), Err(Error::OrderOverflow(_))));
    }

    #[test]
    fn omega_i_is_contraction() {
        for n in 1..=3u8 {
            for i in 1..=n {
                let v = BTreeMap::from([(Coord::x(i), Expr::one())]);
                assert_eq!(crate::forms::interior_product(&v, &omega0(n)).unwrap(), omega_i(i, n));
            }
        }
    }

    #[test]
    fn decompose_dy() {
        let ctx = ChartContext::new(1, 1, 1).unwrap();
        let d = contact_decompose(&DiffForm::d(Coord::y(1, [])), &ctx).unwrap();
        assert_eq!(d.horizontal, DiffForm::dx(1).scale(&Expr::coord(Coord::y(1, [1]))));
        assert_eq!(d.part(1), ContactForm::basis(ContactSymbol::Omega(1, MultiIndex::empty())));
        let l = parse_expr("1/2*y(1;1)^2", &ctx).unwrap();
        let lw = omega0(1).scale(&l);
        assert_eq!(horizontal(&lw, &ctx, HorizontalMode::Holonomic).unwrap(), lw);
    }

    #[test]
    fn first_order_hand_expansion() {
        // ρ = L dx + f ω, p₁(dρ) = (∂L/∂y − d₁f) ω∧dx + (∂L/∂y₁ − f) ω₁∧dx
        let ctx = ChartContext::new(1, 1, 1).unwrap().with_max_order(2);
        let p = |s| parse_expr(s, &ctx).unwrap();
        let l = p("1/2*y(1;1)^2 - y(1)^3");
        let f = p("y(1;1)");
        let rho = omega0(1).scale(&l).add(&contact_form(1, &MultiIndex::empty(), &ctx).unwrap().scale(&f));
        let dec = contact_decompose(&ext_d(&rho), &ctx).unwrap();
        let p1 = dec.part(1);
        let w = ContactSymbol::Omega(1, MultiIndex::empty());
        let w1 = ContactSymbol::Omega(1, MultiIndex::new([1]));
        let dx = ContactSymbol::Dx(1);
        assert_eq!(p1.coefficient(&[w.clone(), dx.clone()]), p("-3*y(1)^2 - y(1;1,1)"));
        assert!(p1.coefficient(&[w1, dx]).is_zero());
        assert_eq!(dec.reassemble(&ctx, HorizontalMode::Holonomic).unwrap(), ext_d(&rho));
    }
}
