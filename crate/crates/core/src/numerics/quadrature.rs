use super::{Exec, IntegrationDomain};
use crate::error::{Error, Result};
use crate::forms::DiffForm;
use crate::symcore::{CompiledExpr, Coord, Expr};

fn base_slots(n: usize) -> Vec<Coord> {
    (1..=n as u8).map(Coord::Base).collect()
}

/// Tensor-product trapezoid rule for an integrand over base coordinates.
pub fn quadrature(integrand: &Expr, domain: &IntegrationDomain, exec: Exec) -> Result<f64> {
    let f = CompiledExpr::compile(integrand, &base_slots(domain.dim()))?;
    exec.sum_range(domain.num_points(), |k| Ok(domain.weight(k) * f.eval(&domain.point(k))?))
}

/// Composite trapezoid rule along a segment of `x(t) = a + t (b − a)`,
/// `t ∈ [0, 1]`, integrating `f(x(t)) dt`.
fn segment(f: &CompiledExpr, a: &[f64], b: &[f64], nodes: usize, exec: Exec) -> Result<f64> {
    let h = 1.0 / (nodes - 1) as f64;
    let s = exec.sum_range(nodes, |k| {
        let t = k as f64 * h;
        let x: Vec<f64> = a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect();
        let w = if k == 0 || k + 1 == nodes { 0.5 } else { 1.0 };
        Ok(w * f.eval(&x)?)
    })?;
    Ok(s * h)
}

/// `∫_{∂Ω} a` for an (n−1)-form with base-coordinate coefficients, using the
/// boundary orientation induced by the standard orientation of the box.
pub fn boundary_quadrature(a: &DiffForm, domain: &IntegrationDomain, exec: Exec) -> Result<f64> {
    let n = domain.dim();
    if a.degree() + 1 != n {
        return Err(Error::Invalid(format!("boundary integrand must have degree {}, got {}", n - 1, a.degree())));
    }
    let slots = base_slots(n);
    match n {
        1 => {
            let f = CompiledExpr::compile(&a.coefficient(&[]), &slots)?;
            Ok(f.eval(&domain.upper)? - f.eval(&domain.lower)?)
        }
        2 => {
            let p = CompiledExpr::compile(&a.coefficient(&[Coord::Base(1)]), &slots)?;
            let q = CompiledExpr::compile(&a.coefficient(&[Coord::Base(2)]), &slots)?;
            let (lo, hi) = (&domain.lower, &domain.upper);
            let res = domain.resolution;
            let (w, h) = (hi[0] - lo[0], hi[1] - lo[1]);
            let bottom = w * segment(&p, &[lo[0], lo[1]], &[hi[0], lo[1]], res, exec)?;
            let top = w * segment(&p, &[lo[0], hi[1]], &[hi[0], hi[1]], res, exec)?;
            let right = h * segment(&q, &[hi[0], lo[1]], &[hi[0], hi[1]], res, exec)?;
            let left = h * segment(&q, &[lo[0], lo[1]], &[lo[0], hi[1]], res, exec)?;
            Ok(bottom - top + right - left)
        }
        _ => Err(Error::Invalid(format!("boundary quadrature is implemented for n ≤ 2, got n = {n}"))),
    }
}
