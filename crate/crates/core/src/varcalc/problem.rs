use crate::error::{Error, Result};
use crate::symcore::{parse_expr, ChartContext, Expr};

/// A Lagrangian `λ = L ω₀` of order `r` on `R^n × R^m`.
///
/// The context registers jets up to order `2r`, enough for the
/// Euler–Lagrange expressions and for splitting `dΘ` into contact parts.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianProblem {
    ctx: ChartContext,
    lagrangian: Expr,
}

impl LagrangianProblem {
    pub fn new(n: u8, m: u8, r: usize, lagrangian: Expr) -> Result<Self> {
        let ctx = ChartContext::new(n, m, r)?.with_max_order(2 * r);
        for c in lagrangian.coords() {
            ctx.validate(&c)?;
            if c.is_vel() || c.is_mom() {
                return Err(Error::Invalid(format!("a Lagrangian cannot depend on {c}")));
            }
            if c.jet_order().is_some_and(|k| k > r) {
                return Err(Error::OrderOverflow(format!("{c} exceeds the Lagrangian order r = {r}")));
            }
        }
        Ok(LagrangianProblem { ctx, lagrangian })
    }

    pub fn parse(n: u8, m: u8, r: usize, text: &str) -> Result<Self> {
        let ctx = ChartContext::new(n, m, r)?;
        Self::new(n, m, r, parse_expr(text, &ctx)?)
    }

    pub fn ctx(&self) -> &ChartContext {
        &self.ctx
    }

    pub fn lagrangian(&self) -> &Expr {
        &self.lagrangian
    }

    pub fn n(&self) -> u8 {
        self.ctx.n
    }

    pub fn m(&self) -> u8 {
        self.ctx.m
    }

    pub fn r(&self) -> usize {
        self.ctx.r
    }
}
