use super::{ChartContext, Coord, Expr};
use crate::error::{Error, Result};

/// `∂e/∂c`, all coordinate atoms independent.
pub fn partial(e: &Expr, c: &Coord) -> Expr {
    e.partial(c)
}

/// Formal derivative `d_i e = ∂e/∂x^i + Σ y^σ_{J∪i} ∂e/∂y^σ_J`.
///
/// The input may only contain base and jet coordinates, all of order below
/// `ctx.max_order`.
pub fn total_derivative(e: &Expr, i: u8, ctx: &ChartContext) -> Result<Expr> {
    if i == 0 || i > ctx.n {
        return Err(Error::IndexOutOfRange(format!("base index {i} not in 1..={}", ctx.n)));
    }
    let mut out = e.partial(&Coord::Base(i));
    for c in e.coords() {
        match &c {
            Coord::Base(_) => {}
            Coord::Jet(s, j) => {
                if j.len() >= ctx.max_order {
                    return Err(Error::OrderOverflow(format!(
                        "d_{i} of an expression containing {c} exceeds max order {}",
                        ctx.max_order
                    )));
                }
                let next = Expr::coord(Coord::Jet(*s, j.with(i)));
                out += &next * &e.partial(&c);
            }
            _ => return Err(Error::Invalid(format!("formal derivative is defined on jet functions only; found {c}"))),
        }
    }
    Ok(out)
}

/// Iterated formal derivative `d_{j_1} ... d_{j_k} e`.
pub fn total_derivative_multi(e: &Expr, j: &[u8], ctx: &ChartContext) -> Result<Expr> {
    let mut out = e.clone();
    for &i in j {
        out = total_derivative(&out, i, ctx)?;
    }
    Ok(out)
}

/// Formal derivative on `J^1(J^{2r-1} Y)`:
/// `D_q e = ∂e/∂x^q + Σ y^ν_{J,q} ∂e/∂y^ν_J`.
///
/// Velocity-dependent input is rejected; momenta are not allowed either.
pub fn prolonged_total_derivative(e: &Expr, q: u8, ctx: &ChartContext) -> Result<Expr> {
    if !ctx.velocity_enabled {
        return Err(Error::Invalid("velocity coordinates are not enabled".into()));
    }
    if q == 0 || q > ctx.n {
        return Err(Error::IndexOutOfRange(format!("base index {q} not in 1..={}", ctx.n)));
    }
    let mut out = e.partial(&Coord::Base(q));
    for c in e.coords() {
        match &c {
            Coord::Base(_) => {}
            Coord::Jet(s, j) => {
                if j.len() > ctx.vel_order() {
                    return Err(Error::OrderOverflow(format!("{c} has no velocity on J^1(J^{}Y)", ctx.vel_order())));
                }
                let v = Expr::coord(Coord::Vel(*s, j.clone(), q));
                out += &v * &e.partial(&c);
            }
            Coord::Vel(..) => {
                return Err(Error::Invalid(format!(
                    "prolonged formal derivative of a velocity-dependent expression ({c})"
                )))
            }
            Coord::Mom(..) => return Err(Error::Invalid(format!("unexpected momentum coordinate {c}"))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse_expr;

    #[test]
    fn partial_examples() {
        let c = ChartContext::new(1, 1, 2).unwrap();
        let e = parse_expr("1/2*y(1;1,1)^2", &c).unwrap();
        assert_eq!(partial(&e, &Coord::y(1, [1, 1])), parse_expr("y(1;1,1)", &c).unwrap());
        assert!(partial(&parse_expr("x(1)", &c).unwrap(), &Coord::y(1, [])).is_zero());
        assert_eq!(
            partial(&parse_expr("sin(y(1))", &c).unwrap(), &Coord::y(1, [])),
            parse_expr("cos(y(1))", &c).unwrap()
        );
    }

    #[test]
    fn formal_derivative_examples() {
        let c = ChartContext::new(1, 1, 2).unwrap();
        let p = |s| parse_expr(s, &c).unwrap();
        assert_eq!(total_derivative(&p("y(1)"), 1, &c).unwrap(), p("y(1;1)"));
        assert_eq!(total_derivative(&p("y(1;1)*y(1;1)"), 1, &c).unwrap(), p("2*y(1;1)*y(1;1,1)"));
        let c2 = ChartContext::new(2, 1, 1).unwrap();
        assert!(total_derivative(&parse_expr("x(1)", &c2).unwrap(), 2, &c2).unwrap().is_zero());
    }

    #[test]
    fn formal_derivative_order_overflow() {
        let c = ChartContext::new(1, 1, 1).unwrap();
        let e = parse_expr("y(1;1)", &c).unwrap();
        assert!(matches!(total_derivative(&e, 1, &c), Err(Error::OrderOverflow(_))));
    }

    #[test]
    fn prolonged_examples() {
        let c = ChartContext::new(1, 1, 2).unwrap();
        let p = |s| parse_expr(s, &c).unwrap();
        assert_eq!(prolonged_total_derivative(&p("y(1;1)"), 1, &c).unwrap(), p("v(1;1|1)"));
        assert_eq!(prolonged_total_derivative(&p("y(1)*y(1;1)"), 1, &c).unwrap(), p("v(1;|1)*y(1;1) + y(1)*v(1;1|1)"));
        assert!(prolonged_total_derivative(&p("v(1;|1)"), 1, &c).is_err());
    }
}
