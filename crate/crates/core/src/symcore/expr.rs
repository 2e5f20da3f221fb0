use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use super::Coord;

pub type Rational = BigRational;

/// Elementary functions kept as opaque atoms.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// Multiplicative building block of a monomial.
///
/// `Sum` holds a normalized multi-term expression (leading coefficient one)
/// and only ever appears with a negative exponent; positive powers are
/// expanded during canonicalization.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Coord(Coord),
    Func(Func, Arc<Expr>),
    Sum(Arc<Expr>),
}

impl Atom {
    fn depends_on(&self, c: &Coord) -> bool {
        match self {
            Atom::Coord(a) => a == c,
            Atom::Func(_, e) | Atom::Sum(e) => e.depends_on(c),
        }
    }

    fn collect_coords(&self, out: &mut BTreeSet<Coord>) {
        match self {
            Atom::Coord(a) => {
                out.insert(a.clone());
            }
            Atom::Func(_, e) | Atom::Sum(e) => e.collect_coords(out),
        }
    }
}

/// Product of atoms with nonzero integer exponents, sorted by atom.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(pub(crate) SmallVec<[(Atom, i32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Atom, i32)] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out: SmallVec<[(Atom, i32); 4]> = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().cloned());
        Monomial(out)
    }

    fn has_positive_sum(&self) -> bool {
        self.0.iter().any(|(a, e)| matches!(a, Atom::Sum(_)) && *e > 0)
    }

    fn with_exponent(&self, idx: usize, e: i32) -> Monomial {
        let mut v = self.0.clone();
        if e == 0 {
            v.remove(idx);
        } else {
            v[idx].1 = e;
        }
        Monomial(v)
    }

    /// Total degree in coordinate atoms; `None` if any non-coordinate atom or
    /// negative exponent is present.
    pub fn poly_degree(&self) -> Option<u32> {
        let mut d = 0u32;
        for (a, e) in &self.0 {
            match a {
                Atom::Coord(_) if *e > 0 => d += *e as u32,
                _ => return None,
            }
        }
        Some(d)
    }
}

/// Canonical symbolic expression: a sparse sum of monomials with exact
/// rational coefficients. Zero coefficients are never stored, so two
/// polynomial expressions are equal iff their term maps are identical.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Expr {
    terms: BTreeMap<Monomial, Rational>,
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::constant(Rational::one())
    }

    pub fn int(v: i64) -> Self {
        Expr::constant(Rational::from_integer(BigInt::from(v)))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Expr::constant(rat(n, d))
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Expr { terms }
    }

    pub fn coord(c: Coord) -> Self {
        Expr::from_monomial(Monomial(SmallVec::from_elem((Atom::Coord(c), 1), 1)), Rational::one())
    }

    /// The single term `c * m`.
    pub fn from_term(m: Monomial, c: Rational) -> Self {
        Expr::from_monomial(m, c)
    }

    fn from_monomial(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Expr { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The value if this expression is a rational constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Polynomial in coordinate atoms (no functions, no negative powers).
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|m| m.poly_degree().is_some())
    }

    pub fn depends_on(&self, c: &Coord) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|(a, _)| a.depends_on(c)))
    }

    fn collect_coords(&self, out: &mut BTreeSet<Coord>) {
        for m in self.terms.keys() {
            for (a, _) in &m.0 {
                a.collect_coords(out);
            }
        }
    }

    /// Every coordinate referenced anywhere in the expression.
    pub fn coords(&self) -> BTreeSet<Coord> {
        let mut out = BTreeSet::new();
        self.collect_coords(&mut out);
        out
    }

    /// Highest jet order among `Jet` atoms (`None` if there are none).
    pub fn max_jet_order(&self) -> Option<usize> {
        self.coords().iter().filter_map(Coord::jet_order).max()
    }

    pub fn scale(&self, c: &Rational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn add_scaled(&mut self, other: &Expr, c: &Rational) {
        for (m, k) in &other.terms {
            self.add_term(m.clone(), k * c);
        }
    }

    fn mul_raw(&self, other: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// Expands any monomial carrying a positive power of a `Sum` atom.
    fn normalize(self) -> Expr {
        if !self.terms.keys().any(Monomial::has_positive_sum) {
            return self;
        }
        let mut out = Expr::zero();
        for (m, c) in self.terms {
            if !m.has_positive_sum() {
                out.add_term(m, c);
                continue;
            }
            let mut rest = Monomial::one();
            let mut expanded = Expr::constant(c);
            for (a, e) in m.0 {
                match (&a, e > 0) {
                    (Atom::Sum(s), true) => expanded = expanded.mul_raw(&s.pow_nonneg(e as u32)),
                    _ => rest.0.push((a, e)),
                }
            }
            let rest_expr = Expr::from_monomial(rest, Rational::one());
            let prod = expanded.mul_raw(&rest_expr).normalize();
            out.add_scaled(&prod, &Rational::one());
        }
        out
    }

    fn pow_nonneg(&self, mut k: u32) -> Expr {
        let mut base = self.clone();
        let mut acc = Expr::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_raw(&base).normalize();
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_raw(&base).normalize();
            }
        }
        acc
    }

    /// Integer power. Negative powers of a multi-term sum become a `Sum`
    /// atom; a negative power of zero yields an atom that fails to evaluate
    /// with a division-by-zero error.
    pub fn pow(&self, k: i32) -> Expr {
        if k >= 0 {
            return self.pow_nonneg(k as u32);
        }
        let inv = self.recip();
        inv.pow_nonneg((-k) as u32)
    }

    /// Multiplicative inverse.
    pub fn recip(&self) -> Expr {
        match self.terms.len() {
            0 => Expr::from_monomial(
                Monomial(SmallVec::from_elem((Atom::Sum(Arc::new(Expr::zero())), -1), 1)),
                Rational::one(),
            ),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                let inv_m = Monomial(m.0.iter().map(|(a, e)| (a.clone(), -e)).collect());
                Expr::from_monomial(inv_m, c.recip()).normalize()
            }
            _ => {
                // normalize to leading coefficient one so equal sums share an atom
                let lead = self.terms.values().next().unwrap().clone();
                let normed = self.scale(&lead.recip());
                Expr::from_monomial(Monomial(SmallVec::from_elem((Atom::Sum(Arc::new(normed)), -1), 1)), lead.recip())
            }
        }
    }

    pub fn div(&self, other: &Expr) -> Expr {
        self * &other.recip()
    }

    /// Applies an elementary function, folding the few cases with exact
    /// rational values.
    pub fn apply(f: Func, arg: Expr) -> Expr {
        if let Some(c) = arg.as_constant() {
            match f {
                Func::Sin if c.is_zero() => return Expr::zero(),
                Func::Cos if c.is_zero() => return Expr::one(),
                Func::Exp if c.is_zero() => return Expr::one(),
                Func::Ln if c.is_one() => return Expr::zero(),
                Func::Sqrt if !c.is_negative() => {
                    let (n, d) = (c.numer(), c.denom());
                    let (sn, sd) = (n.sqrt(), d.sqrt());
                    if &(&sn * &sn) == n && &(&sd * &sd) == d {
                        return Expr::constant(Rational::new(sn, sd));
                    }
                }
                _ => {}
            }
        }
        Expr::from_monomial(Monomial(SmallVec::from_elem((Atom::Func(f, Arc::new(arg)), 1), 1)), Rational::one())
    }

    pub fn sin(self) -> Expr {
        Expr::apply(Func::Sin, self)
    }
    pub fn cos(self) -> Expr {
        Expr::apply(Func::Cos, self)
    }
    pub fn exp(self) -> Expr {
        Expr::apply(Func::Exp, self)
    }
    pub fn ln(self) -> Expr {
        Expr::apply(Func::Ln, self)
    }
    pub fn sqrt(self) -> Expr {
        Expr::apply(Func::Sqrt, self)
    }

    /// Partial derivative treating every coordinate atom as independent.
    pub fn partial(&self, c: &Coord) -> Expr {
        let mut out = Expr::zero();
        for (m, coeff) in &self.terms {
            for (idx, (atom, e)) in m.0.iter().enumerate() {
                if !atom.depends_on(c) {
                    continue;
                }
                let inner = match atom {
                    Atom::Coord(_) => Expr::one(),
                    Atom::Func(f, u) => {
                        let du = u.partial(c);
                        if du.is_zero() {
                            continue;
                        }
                        let u = (**u).clone();
                        let outer = match f {
                            Func::Sin => u.cos(),
                            Func::Cos => -&u.sin(),
                            Func::Exp => u.exp(),
                            Func::Ln => u.recip(),
                            Func::Sqrt => u.sqrt().recip().scale(&rat(1, 2)),
                        };
                        &outer * &du
                    }
                    Atom::Sum(s) => s.partial(c),
                };
                if inner.is_zero() {
                    continue;
                }
                let rest =
                    Expr::from_monomial(m.with_exponent(idx, e - 1), coeff * Rational::from_integer(BigInt::from(*e)));
                let prod = rest.mul_raw(&inner).normalize();
                out.add_scaled(&prod, &Rational::one());
            }
        }
        out
    }

    /// Simultaneous substitution of coordinates by expressions.
    pub fn substitute(&self, map: &BTreeMap<Coord, Expr>) -> Expr {
        if map.is_empty() || !map.keys().any(|c| self.depends_on(c)) {
            return self.clone();
        }
        let mut out = Expr::zero();
        for (m, coeff) in &self.terms {
            let mut prod = Expr::constant(coeff.clone());
            let mut kept = Monomial::one();
            for (atom, e) in &m.0 {
                if !map.keys().any(|c| atom.depends_on(c)) {
                    kept.0.push((atom.clone(), *e));
                    continue;
                }
                let base = match atom {
                    Atom::Coord(c) => map[c].clone(),
                    Atom::Func(f, u) => Expr::apply(*f, u.substitute(map)),
                    Atom::Sum(s) => s.substitute(map),
                };
                prod = prod.mul_raw(&base.pow(*e)).normalize();
            }
            let term = prod.mul_raw(&Expr::from_monomial(kept, Rational::one())).normalize();
            out.add_scaled(&term, &Rational::one());
        }
        out
    }

    /// Degree in the given set of coordinates, if the expression is
    /// polynomial in them (they appear only as plain atoms with
    /// nonnegative exponents).
    pub fn degree_in(&self, pred: impl Fn(&Coord) -> bool) -> Option<u32> {
        let mut deg = 0;
        for m in self.terms.keys() {
            let mut d = 0;
            for (a, e) in &m.0 {
                match a {
                    Atom::Coord(c) if pred(c) => {
                        if *e < 0 {
                            return None;
                        }
                        d += *e as u32;
                    }
                    Atom::Coord(_) => {}
                    Atom::Func(_, u) | Atom::Sum(u) => {
                        if u.coords().iter().any(&pred) {
                            return None;
                        }
                    }
                }
            }
            deg = deg.max(d);
        }
        Some(deg)
    }

    /// Coefficient list view used by the printer: sign-separated terms.
    pub(crate) fn raw_terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }
}

pub(crate) fn rational_to_f64(c: &Rational) -> f64 {
    match (c.numer().to_f64(), c.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // very large numerator/denominator: scale down
            let bits = c.numer().bits().max(c.denom().bits()) as i64;
            let shift = (bits - 900).max(0) as u64;
            let n = (c.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (c.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

impl From<Coord> for Expr {
    fn from(c: Coord) -> Self {
        Expr::coord(c)
    }
}

impl From<i64> for Expr {
    fn from(v: i64) -> Self {
        Expr::int(v)
    }
}

impl From<Rational> for Expr {
    fn from(v: Rational) -> Self {
        Expr::constant(v)
    }
}

impl<'a> Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &'a Expr) -> Expr {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(mut self, rhs: Expr) -> Expr {
        self.add_scaled(&rhs, &Rational::one());
        self
    }
}

impl AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        self.add_scaled(rhs, &Rational::one());
    }
}

impl AddAssign for Expr {
    fn add_assign(&mut self, rhs: Expr) {
        self.add_scaled(&rhs, &Rational::one());
    }
}

impl<'a> Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &'a Expr) -> Expr {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(mut self, rhs: Expr) -> Expr {
        self.add_scaled(&rhs, &-Rational::one());
        self
    }
}

impl<'a> Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &'a Expr) -> Expr {
        self.mul_raw(rhs).normalize()
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        self.mul_raw(&rhs).normalize()
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(&-Rational::one())
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(&-Rational::one())
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        let mut out = Expr::zero();
        for e in iter {
            out += e;
        }
        out
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
