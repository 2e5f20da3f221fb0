use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::expr::{rational_to_f64, Atom, Expr, Func};
use super::Coord;
use crate::error::{Error, Result};

fn apply_func(f: Func, v: f64) -> Result<f64> {
    Ok(match f {
        Func::Sin => v.sin(),
        Func::Cos => v.cos(),
        Func::Exp => v.exp(),
        Func::Ln => {
            if v <= 0.0 {
                return Err(Error::Domain(format!("ln of non-positive value {v}")));
            }
            v.ln()
        }
        Func::Sqrt => {
            if v < 0.0 {
                return Err(Error::Domain(format!("sqrt of negative value {v}")));
            }
            v.sqrt()
        }
    })
}

fn power(base: f64, e: i32) -> Result<f64> {
    if e < 0 && base == 0.0 {
        return Err(Error::DivisionByZero);
    }
    Ok(base.powi(e))
}

impl Expr {
    /// Evaluates with values supplied by `lookup`.
    pub fn eval_with(&self, lookup: &dyn Fn(&Coord) -> Option<f64>) -> Result<f64> {
        let mut total = 0.0;
        for (m, c) in self.terms() {
            let mut t = rational_to_f64(c);
            for (a, e) in m.factors() {
                let base = match a {
                    Atom::Coord(c) => lookup(c).ok_or_else(|| Error::MissingCoordinate(c.to_string()))?,
                    Atom::Func(f, u) => apply_func(*f, u.eval_with(lookup)?)?,
                    Atom::Sum(s) => s.eval_with(lookup)?,
                };
                t *= power(base, *e)?;
            }
            total += t;
        }
        Ok(total)
    }

    pub fn eval(&self, point: &BTreeMap<Coord, f64>) -> Result<f64> {
        self.eval_with(&|c| point.get(c).copied())
    }
}

/// Standard real evaluation of `e` at `point`.
pub fn eval(e: &Expr, point: &BTreeMap<Coord, f64>) -> Result<f64> {
    e.eval(point)
}

#[derive(Debug, Clone)]
enum Factor {
    Slot(usize),
    Func(Func, Box<CompiledExpr>),
    Sum(Box<CompiledExpr>),
}

/// An expression lowered to `f64` coefficients and slot indices, for tight
/// evaluation loops over grids.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    terms: Vec<(f64, Vec<(Factor, i32)>)>,
}

impl CompiledExpr {
    /// Lowers `e` against an ordered slot list; every coordinate of `e` must
    /// have a slot.
    pub fn compile(e: &Expr, slots: &[Coord]) -> Result<Self> {
        let index: HashMap<&Coord, usize> = slots.iter().enumerate().map(|(k, c)| (c, k)).collect();
        Self::compile_indexed(e, &index)
    }

    fn compile_indexed(e: &Expr, index: &HashMap<&Coord, usize>) -> Result<Self> {
        let mut terms = Vec::with_capacity(e.num_terms());
        for (m, c) in e.terms() {
            let mut factors = Vec::with_capacity(m.factors().len());
            for (a, k) in m.factors() {
                let f = match a {
                    Atom::Coord(c) => {
                        Factor::Slot(*index.get(c).ok_or_else(|| Error::MissingCoordinate(c.to_string()))?)
                    }
                    Atom::Func(f, u) => Factor::Func(*f, Box::new(Self::compile_indexed(u, index)?)),
                    Atom::Sum(s) => Factor::Sum(Box::new(Self::compile_indexed(s, index)?)),
                };
                factors.push((f, *k));
            }
            terms.push((rational_to_f64(c), factors));
        }
        Ok(CompiledExpr { terms })
    }

    pub fn eval(&self, values: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for (c, factors) in &self.terms {
            let mut t = *c;
            for (f, k) in factors {
                let base = match f {
                    Factor::Slot(s) => values[*s],
                    Factor::Func(func, u) => apply_func(*func, u.eval(values)?)?,
                    Factor::Sum(s) => s.eval(values)?,
                };
                t *= if *k == 1 { base } else { power(base, *k)? };
            }
            total += t;
        }
        Ok(total)
    }

    /// Sum of absolute term values, a scale for relative comparisons.
    pub fn magnitude(&self, values: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for (c, factors) in &self.terms {
            let single = CompiledExpr { terms: vec![(*c, factors.clone())] };
            total += single.eval(values)?.abs();
        }
        Ok(total)
    }
}

/// Outcome of an equality test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equivalence {
    /// Canonical forms coincide.
    Exact,
    /// Canonical forms differ but the non-polynomial difference vanished at
    /// every random sample point.
    Probable,
    Different,
}

impl Equivalence {
    pub fn holds(self) -> bool {
        !matches!(self, Equivalence::Different)
    }

    pub fn label(self) -> &'static str {
        match self {
            Equivalence::Exact => "exact",
            Equivalence::Probable => "probable-equal",
            Equivalence::Different => "different",
        }
    }
}

const PROBE_POINTS: usize = 8;
const PROBE_TOL: f64 = 1e-9;

/// Decides whether `e` is zero: exactly for polynomials, by random rational
/// probing otherwise.
pub fn zero_test(e: &Expr) -> Equivalence {
    if e.is_zero() {
        return Equivalence::Exact;
    }
    if e.is_polynomial() {
        return Equivalence::Different;
    }
    let slots: Vec<Coord> = e.coords().into_iter().collect();
    let compiled = match CompiledExpr::compile(e, &slots) {
        Ok(c) => c,
        Err(_) => return Equivalence::Different,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a65_7476_6172);
    let mut good = 0;
    for _ in 0..PROBE_POINTS * 8 {
        // rationals k/64 in [1/4, 7/4]
        let values: Vec<f64> = slots.iter().map(|_| rng.gen_range(16..=112) as f64 / 64.0).collect();
        let (Ok(v), Ok(scale)) = (compiled.eval(&values), compiled.magnitude(&values)) else {
            continue;
        };
        if !v.is_finite() {
            continue;
        }
        if v.abs() > PROBE_TOL * scale.max(1.0) {
            return Equivalence::Different;
        }
        good += 1;
        if good == PROBE_POINTS {
            return Equivalence::Probable;
        }
    }
    Equivalence::Different
}

/// Equality of two expressions (see [`zero_test`]).
pub fn equivalent(a: &Expr, b: &Expr) -> Equivalence {
    zero_test(&(a - b))
}
