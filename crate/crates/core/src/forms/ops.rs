use std::collections::BTreeMap;

use super::form::DiffForm;
use crate::error::{Error, Result};
use crate::symcore::{Coord, Expr};

/// Exterior derivative, acting coordinate-wise on coefficients.
pub fn ext_d(a: &DiffForm) -> DiffForm {
    let mut out = DiffForm::zero(a.degree() + 1);
    for (syms, f) in a.terms() {
        for c in f.coords() {
            if syms.binary_search(&c).is_ok() {
                continue;
            }
            let mut s = Vec::with_capacity(syms.len() + 1);
            s.push(c.clone());
            s.extend(syms.iter().cloned());
            out.add_term(f.partial(&c), s);
        }
    }
    out
}

/// Pullback by a coordinate substitution. Base coordinates are never
/// substituted; coordinates without an entry map to themselves.
pub fn pullback(a: &DiffForm, subst: &BTreeMap<Coord, Expr>) -> DiffForm {
    let map: BTreeMap<Coord, Expr> =
        subst.iter().filter(|(c, _)| !c.is_base()).map(|(c, e)| (c.clone(), e.clone())).collect();
    let mut cache: BTreeMap<&Coord, DiffForm> = BTreeMap::new();
    let mut out = DiffForm::zero(a.degree());
    for (syms, f) in a.terms() {
        let mut acc = DiffForm::scalar(f.substitute(&map));
        for c in syms {
            let df = cache.entry(c).or_insert_with(|| match map.get(c) {
                Some(e) => DiffForm::differential(e),
                None => DiffForm::d(c.clone()),
            });
            acc = acc.wedge(df);
            if acc.is_zero() {
                break;
            }
        }
        if !acc.is_zero() {
            out = out.add(&acc);
        }
    }
    out
}

/// Contraction `i_v a` with the alternating sign `(−1)^k` for the k-th
/// factor (counting from zero).
pub fn interior_product(v: &BTreeMap<Coord, Expr>, a: &DiffForm) -> Result<DiffForm> {
    if a.degree() == 0 {
        return Err(Error::Invalid("interior product of a 0-form".into()));
    }
    let mut out = DiffForm::zero(a.degree() - 1);
    for (syms, f) in a.terms() {
        for (k, c) in syms.iter().enumerate() {
            let Some(vc) = v.get(c) else { continue };
            if vc.is_zero() {
                continue;
            }
            let mut rest = syms.clone();
            rest.remove(k);
            let coeff = f * vc;
            out.add_term(if k % 2 == 1 { -coeff } else { coeff }, rest);
        }
    }
    Ok(out)
}
