use std::collections::BTreeMap;

use super::LepageanForm;
use crate::error::Result;
use crate::fields::Section;
use crate::numerics::{residual_at_points, Exec, ResidualSummary};
use crate::symcore::{prolonged_total_derivative, Coord, Expr, MultiIndex};

/// `H_ν^P` for nondecreasing `P`, `0 ≤ |P| ≤ 2r − 1`; functions on
/// `J^1(J^{2r−1}Y)`.
pub type HamiltonFormTable = BTreeMap<(u8, MultiIndex), Expr>;

/// `L̃ = L + Σ f_σ^{i,J} (v(σ;J|i) − y^σ_{J i})`.
pub fn extended_lagrangian(rho: &LepageanForm) -> Expr {
    let mut out = rho.problem().lagrangian().clone();
    for ((s, i, j), f) in rho.coefficients() {
        let v = Expr::coord(Coord::Vel(*s, j.clone(), *i)) - Expr::coord(Coord::Jet(*s, j.with(*i)));
        out += f * &v;
    }
    out
}

/// `H_ν^P = ∂L̃/∂y^ν_P − Σ_q D_q f_ν^{q,P}`.
pub fn hamilton_form(rho: &LepageanForm) -> Result<HamiltonFormTable> {
    let prob = rho.problem();
    let ctx = prob.ctx();
    let lt = extended_lagrangian(rho);
    let mut table = HamiltonFormTable::new();
    for s in 1..=ctx.m {
        for p in MultiIndex::all_between(ctx.n, 0, ctx.vel_order()) {
            let mut h = lt.partial(&Coord::Jet(s, p.clone()));
            for q in 1..=ctx.n {
                if let Some(f) = rho.coefficients().get(&(s, q, p.clone())) {
                    h = h - prolonged_total_derivative(f, q, ctx)?;
                }
            }
            table.insert((s, p), h);
        }
    }
    Ok(table)
}

pub(crate) fn hamilton_label(s: u8, p: &MultiIndex) -> String {
    if p.is_empty() {
        format!("H({s})")
    } else {
        format!("H({s};{p})")
    }
}

/// Max |H_ν^P ∘ j¹δ| per entry over the given base points.
pub fn hamilton_extremal_residual(
    rho: &LepageanForm,
    delta: &Section,
    points: &[Vec<f64>],
    exec: Exec,
) -> Result<ResidualSummary> {
    let binding = delta.velocity_binding();
    let exprs: Vec<(String, Expr)> =
        hamilton_form(rho)?.into_iter().map(|((s, p), h)| (hamilton_label(s, &p), h.substitute(&binding))).collect();
    residual_at_points(&exprs, points, exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse_expr;
    use crate::varcalc::{poincare_cartan, LagrangianProblem};

    #[test]
    fn free_particle() {
        let prob = LagrangianProblem::parse(1, 1, 1, "1/2*y(1;1)^2").unwrap();
        let rho = poincare_cartan(&prob).unwrap();
        let p = |s| parse_expr(s, prob.ctx()).unwrap();
        assert_eq!(extended_lagrangian(&rho), p("y(1;1)*v(1;|1) - 1/2*y(1;1)^2"));
        let h = hamilton_form(&rho).unwrap();
        assert_eq!(h[&(1, MultiIndex::empty())], p("-v(1;1|1)"));
        assert_eq!(h[&(1, MultiIndex::new([1]))], p("v(1;|1) - y(1;1)"));
    }

    #[test]
    fn extended_lagrangian_is_h_compatible() {
        let prob = LagrangianProblem::parse(2, 1, 2, "y(1;1,2)^2 + y(1;1)*y(1;2,2) - y(1)^3").unwrap();
        let rho = poincare_cartan(&prob).unwrap();
        let lt = extended_lagrangian(&rho);
        let hol: BTreeMap<Coord, Expr> = lt
            .coords()
            .into_iter()
            .filter_map(|c| match &c {
                Coord::Vel(s, j, i) => Some((c.clone(), Expr::coord(Coord::Jet(*s, j.with(*i))))),
                _ => None,
            })
            .collect();
        assert_eq!(lt.substitute(&hol), prob.lagrangian().clone());
    }

    #[test]
    fn second_order_table_shape() {
        let prob = LagrangianProblem::parse(1, 1, 2, "1/2*y(1;1,1)^2").unwrap();
        let h = hamilton_form(&poincare_cartan(&prob).unwrap()).unwrap();
        let p = |s| parse_expr(s, prob.ctx()).unwrap();
        assert_eq!(h[&(1, MultiIndex::new([1, 1, 1]))], p("y(1;1) - v(1;|1)"));
        let h11 = &h[&(1, MultiIndex::new([1, 1]))];
        assert_eq!(h11.degree_in(Coord::is_vel), Some(1));
        assert!(h.values().all(|e| e.degree_in(Coord::is_vel).is_some_and(|d| d <= 1)));
    }

    #[test]
    fn residual_along_prolonged_extremal() {
        let prob = LagrangianProblem::parse(1, 1, 1, "1/2*y(1;1)^2 - 1/2*y(1)^2").unwrap();
        let rho = poincare_cartan(&prob).unwrap();
        let x = Expr::coord(Coord::x(1));
        let gamma = Section::from_gamma(1, BTreeMap::from([(1, x.sin())])).unwrap().prolong(1);
        let pts: Vec<Vec<f64>> = (0..=10).map(|k| vec![k as f64 / 10.0]).collect();
        let r = hamilton_extremal_residual(&rho, &gamma, &pts, Exec::default()).unwrap();
        assert!(r.max_abs <= 1e-10, "{r:?}");

        let free = LagrangianProblem::parse(1, 1, 1, "1/2*y(1;1)^2").unwrap();
        let bad = Section::from_components(
            1,
            BTreeMap::from([(Coord::y(1, []), Expr::coord(Coord::x(1))), (Coord::y(1, [1]), Expr::int(2))]),
        )
        .unwrap();
        let r = hamilton_extremal_residual(&poincare_cartan(&free).unwrap(), &bad, &pts, Exec::default()).unwrap();
        assert!((r.get("H(1;1)").unwrap().max_abs - 1.0).abs() < 1e-15);
    }
}
