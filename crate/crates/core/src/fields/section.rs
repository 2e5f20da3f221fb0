use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numerics::jet_prolong_section;
use crate::symcore::{Coord, Expr};

/// Closed-form section over the base: jet (and possibly momentum)
/// coordinates assigned to expressions in `x` only.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    n: u8,
    components: BTreeMap<Coord, Expr>,
}

impl Section {
    /// A section `γ` of `π`, given by `σ ↦ γ^σ(x)`.
    pub fn from_gamma(n: u8, gamma: BTreeMap<u8, Expr>) -> Result<Self> {
        Self::from_components(n, gamma.into_iter().map(|(s, e)| (Coord::y(s, []), e)).collect())
    }

    /// A general section; keys must be jet or momentum coordinates.
    pub fn from_components(n: u8, components: BTreeMap<Coord, Expr>) -> Result<Self> {
        for (c, e) in &components {
            if !(c.is_jet() || c.is_mom()) {
                return Err(Error::Invalid(format!("section component keyed by {c}")));
            }
            for a in e.coords() {
                match a {
                    Coord::Base(i) if (1..=n).contains(&i) => {}
                    _ => return Err(Error::Invalid(format!("section component for {c} depends on {a}"))),
                }
            }
        }
        Ok(Section { n, components })
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn components(&self) -> &BTreeMap<Coord, Expr> {
        &self.components
    }

    pub fn component(&self, c: &Coord) -> Option<&Expr> {
        self.components.get(c)
    }

    /// Order-zero components `σ ↦ γ^σ`.
    pub fn base_components(&self) -> impl Iterator<Item = (u8, &Expr)> {
        self.components.iter().filter_map(|(c, e)| match c {
            Coord::Jet(s, j) if j.is_empty() => Some((*s, e)),
            _ => None,
        })
    }

    /// `j^kγ` of the order-zero part.
    pub fn prolong(&self, k: usize) -> Section {
        jet_prolong_section(self, k)
    }

    /// Highest jet order among the components.
    pub fn order(&self) -> usize {
        self.components.keys().filter_map(Coord::jet_order).max().unwrap_or(0)
    }

    /// Substitution for `j^1δ`: the components themselves plus
    /// `v(σ;J|p) ↦ ∂_p δ^σ_J`.
    pub fn velocity_binding(&self) -> BTreeMap<Coord, Expr> {
        let mut out = self.components.clone();
        for (c, e) in &self.components {
            if let Coord::Jet(s, j) = c {
                for p in 1..=self.n {
                    out.insert(Coord::Vel(*s, j.clone(), p), e.partial(&Coord::Base(p)));
                }
            }
        }
        out
    }
}
