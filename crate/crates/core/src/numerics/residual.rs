use std::collections::BTreeMap;

use serde::Serialize;

use super::{Exec, IntegrationDomain};
use crate::error::Result;
use crate::symcore::{CompiledExpr, Coord, Expr};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualEntry {
    pub label: String,
    pub max_abs: f64,
    pub argmax: Vec<f64>,
}

/// Per-expression maxima of |value| over a point set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualSummary {
    pub entries: Vec<ResidualEntry>,
    pub max_abs: f64,
}

impl ResidualSummary {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_abs <= tol
    }

    pub fn get(&self, label: &str) -> Option<&ResidualEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    pub(crate) fn from_entries(entries: Vec<ResidualEntry>) -> Self {
        let max_abs = entries.iter().map(|e| e.max_abs).fold(0.0, f64::max);
        ResidualSummary { entries, max_abs }
    }
}

/// Evaluates base-coordinate expressions at the given points.
pub fn residual_at_points(exprs: &[(String, Expr)], points: &[Vec<f64>], exec: Exec) -> Result<ResidualSummary> {
    let n = points.first().map_or(0, Vec::len);
    let slots: Vec<Coord> = (1..=n as u8).map(Coord::Base).collect();
    let compiled: Vec<CompiledExpr> =
        exprs.iter().map(|(_, e)| CompiledExpr::compile(e, &slots)).collect::<Result<_>>()?;
    let values = exec.try_map(points, |pt| compiled.iter().map(|c| c.eval(pt)).collect::<Result<Vec<f64>>>())?;
    let mut entries = Vec::with_capacity(exprs.len());
    for (k, (label, _)) in exprs.iter().enumerate() {
        let mut best = (0.0f64, points.first().cloned().unwrap_or_default());
        for (pt, vals) in points.iter().zip(&values) {
            if vals[k].abs() > best.0 || vals[k].is_nan() {
                best = (vals[k].abs(), pt.clone());
            }
        }
        entries.push(ResidualEntry { label: label.clone(), max_abs: best.0, argmax: best.1 });
    }
    Ok(ResidualSummary::from_entries(entries))
}

/// Substitutes `binding` into each expression and summarizes over the grid.
pub fn residual_grid(
    exprs: &[(String, Expr)],
    binding: &BTreeMap<Coord, Expr>,
    domain: &IntegrationDomain,
    exec: Exec,
) -> Result<ResidualSummary> {
    let bound: Vec<(String, Expr)> = exprs.iter().map(|(l, e)| (l.clone(), e.substitute(binding))).collect();
    residual_at_points(&bound, &domain.points(), exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::{parse_expr, ChartContext};

    #[test]
    fn residual_examples() {
        let ctx = ChartContext::new(1, 1, 2).unwrap();
        let e = parse_expr("y(1;1,1) + y(1)", &ctx).unwrap();
        let x = Expr::coord(Coord::x(1));
        let binding = BTreeMap::from([(Coord::y(1, []), x.clone().sin()), (Coord::y(1, [1, 1]), -x.sin())]);
        let d = IntegrationDomain::unit(1, 50).unwrap();
        let s = residual_grid(&[("el".into(), e.clone())], &binding, &d, Exec::default()).unwrap();
        assert!(s.max_abs <= 1e-12);
        let z = residual_grid(&[("zero".into(), Expr::zero())], &binding, &d, Exec::default()).unwrap();
        assert_eq!(z.max_abs, 0.0);
        let partial = BTreeMap::from([(Coord::y(1, []), Expr::coord(Coord::x(1)))]);
        assert!(residual_grid(&[("el".into(), e)], &partial, &d, Exec::default()).is_err());
    }
}
