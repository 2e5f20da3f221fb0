use std::collections::BTreeMap;

use crate::fields::Section;
use crate::symcore::{Coord, Expr, MultiIndex};

/// `j^kγ`: component at `(σ, J)` is `∂_J γ^σ`.
pub fn jet_prolong_section(gamma: &Section, k: usize) -> Section {
    let n = gamma.n();
    let mut comps: BTreeMap<Coord, Expr> = BTreeMap::new();
    for (sigma, g) in gamma.base_components() {
        comps.insert(Coord::y(sigma, []), g.clone());
        let mut layer: BTreeMap<MultiIndex, Expr> = BTreeMap::from([(MultiIndex::empty(), g.clone())]);
        for _ in 0..k {
            let mut next = BTreeMap::new();
            for (j, e) in &layer {
                for i in (j.entries().last().copied().unwrap_or(1))..=n {
                    next.entry(j.with(i)).or_insert_with(|| e.partial(&Coord::Base(i)));
                }
            }
            for (j, e) in &next {
                comps.insert(Coord::Jet(sigma, j.clone()), e.clone());
            }
            layer = next;
        }
    }
    Section::from_components(n, comps).expect("prolongation of a valid section is valid")
}
