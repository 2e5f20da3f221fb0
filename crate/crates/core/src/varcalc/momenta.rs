use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::LagrangianProblem;
use crate::error::Result;
use crate::symcore::{total_derivative, Coord, Expr, MultiIndex, Rational};

/// `P_σ^J` for `1 ≤ |J| ≤ r`, keyed by `(σ, J)` with `J` nondecreasing.
pub type MomentaTable = BTreeMap<(u8, MultiIndex), Expr>;

/// Where the multinomial weight sits in the descending recursion.
///
/// The two transcribed readings differ only in whether the formal
/// derivatives of the higher momenta are divided by `N(J)`:
///
/// * `Outside`: `P^J = (1/N(J)) ∂L/∂y_J − Σ_i d_i P^{Ji}`
/// * `Inside`:  `P^J = (1/N(J)) (∂L/∂y_J − Σ_i d_i P^{Ji})`
///
/// Only `Outside` makes the Euler–Lagrange expressions agree with the
/// alternating-sum formula (and the Poincaré–Cartan form Lepagean) once
/// `n ≥ 2`; `Inside` is kept so tests can show that it does not.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightPlacement {
    Outside,
    Inside,
}

pub(crate) fn weight(j: &MultiIndex) -> Rational {
    Rational::from_integer(BigInt::from(j.count()))
}

pub(crate) fn inv_weight(j: &MultiIndex) -> Rational {
    Rational::new(BigInt::from(1), BigInt::from(j.count()))
}

pub fn momenta(prob: &LagrangianProblem) -> Result<MomentaTable> {
    momenta_with(prob, WeightPlacement::Outside)
}

pub fn momenta_with(prob: &LagrangianProblem, placement: WeightPlacement) -> Result<MomentaTable> {
    let ctx = prob.ctx();
    let l = prob.lagrangian();
    let mut table = MomentaTable::new();
    for k in (1..=prob.r()).rev() {
        for s in 1..=ctx.m {
            for j in MultiIndex::all_of_len(ctx.n, k) {
                let dl = l.partial(&Coord::Jet(s, j.clone()));
                let mut tail = Expr::zero();
                if k < prob.r() {
                    for i in 1..=ctx.n {
                        tail += total_derivative(&table[&(s, j.with(i))], i, ctx)?;
                    }
                }
                let p = match placement {
                    WeightPlacement::Outside => dl.scale(&inv_weight(&j)) - tail,
                    WeightPlacement::Inside => (dl - tail).scale(&inv_weight(&j)),
                };
                table.insert((s, j), p);
            }
        }
    }
    Ok(table)
}

/// `E_σ = ∂L/∂y^σ − Σ_i d_i P_σ^i`.
pub fn euler_lagrange(prob: &LagrangianProblem) -> Result<BTreeMap<u8, Expr>> {
    euler_lagrange_from(prob, &momenta(prob)?)
}

pub(crate) fn euler_lagrange_from(prob: &LagrangianProblem, p: &MomentaTable) -> Result<BTreeMap<u8, Expr>> {
    let ctx = prob.ctx();
    let mut out = BTreeMap::new();
    for s in 1..=ctx.m {
        let mut e = prob.lagrangian().partial(&Coord::y(s, []));
        for i in 1..=ctx.n {
            e = e - total_derivative(&p[&(s, MultiIndex::new([i]))], i, ctx)?;
        }
        out.insert(s, e);
    }
    Ok(out)
}
