use std::collections::BTreeMap;
use std::fmt;

use crate::symcore::{Coord, Expr};

/// Symbols usable as covector basis elements.
pub trait Basis: Clone + Ord + fmt::Display {
    /// Label used when printing the covector.
    fn label(&self) -> String {
        self.to_string()
    }
}

impl Basis for Coord {
    fn label(&self) -> String {
        format!("d{self}")
    }
}

/// Exterior form with expression coefficients over a totally ordered covector
/// basis. Only strictly increasing basis tuples are stored and zero
/// coefficients are dropped, so the representation is canonical.
#[derive(Clone, PartialEq, Eq)]
pub struct Form<S: Basis> {
    degree: usize,
    terms: BTreeMap<Vec<S>, Expr>,
}

/// A form over the coordinate covectors `dx^i`, `dy^σ_J`, `dy^σ_{J,p}`,
/// `dP_σ^J` (the covector `dc` is represented by the coordinate `c`).
pub type DiffForm = Form<Coord>;

/// Sorts `syms` in place, returning the permutation sign, or `None` when a
/// symbol repeats.
pub(crate) fn sort_with_sign<S: Ord>(syms: &mut [S]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..syms.len() {
        let mut j = i;
        while j > 0 && syms[j - 1] > syms[j] {
            syms.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if syms.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl<S: Basis> Form<S> {
    pub fn zero(degree: usize) -> Self {
        Form { degree, terms: BTreeMap::new() }
    }

    /// The 0-form `f`.
    pub fn scalar(f: Expr) -> Self {
        let mut out = Form::zero(0);
        out.add_term(f, Vec::new());
        out
    }

    /// The 1-form with a single basis covector.
    pub fn basis(s: S) -> Self {
        let mut out = Form::zero(1);
        out.add_term(Expr::one(), vec![s]);
        out
    }

    /// `coeff * s_1 ∧ ... ∧ s_p` with the symbols in any order.
    pub fn monomial(coeff: Expr, syms: Vec<S>) -> Self {
        let mut out = Form::zero(syms.len());
        out.add_term(coeff, syms);
        out
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<S>, &Expr)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of the basis element `syms` (given in any order).
    pub fn coefficient(&self, syms: &[S]) -> Expr {
        let mut v = syms.to_vec();
        match sort_with_sign(&mut v) {
            None => Expr::zero(),
            Some(sign) => match self.terms.get(&v) {
                Some(c) if sign < 0 => -c,
                Some(c) => c.clone(),
                None => Expr::zero(),
            },
        }
    }

    /// Adds `coeff * syms` (any order; repeated symbols vanish).
    pub fn add_term(&mut self, coeff: Expr, mut syms: Vec<S>) {
        assert_eq!(syms.len(), self.degree, "degree mismatch in form term");
        if coeff.is_zero() {
            return;
        }
        let Some(sign) = sort_with_sign(&mut syms) else {
            return;
        };
        let coeff = if sign < 0 { -coeff } else { coeff };
        use std::collections::btree_map::Entry;
        match self.terms.entry(syms) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Form<S>) -> Form<S> {
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(c.clone(), s.clone());
        }
        out
    }

    pub fn sub(&self, other: &Form<S>) -> Form<S> {
        self.add(&other.scale(&Expr::int(-1)))
    }

    /// Multiplies every coefficient by the function `f`.
    pub fn scale(&self, f: &Expr) -> Form<S> {
        let mut out = Form::zero(self.degree);
        for (s, c) in &self.terms {
            out.add_term(c * f, s.clone());
        }
        out
    }

    /// Applies `f` to every coefficient.
    pub fn map_coefficients(&self, f: impl Fn(&Expr) -> Expr) -> Form<S> {
        let mut out = Form::zero(self.degree);
        for (s, c) in &self.terms {
            out.add_term(f(c), s.clone());
        }
        out
    }

    /// Graded-antisymmetric exterior product.
    pub fn wedge(&self, other: &Form<S>) -> Form<S> {
        let mut out = Form::zero(self.degree + other.degree);
        for (sa, ca) in &self.terms {
            for (sb, cb) in &other.terms {
                if sb.iter().any(|s| sa.binary_search(s).is_ok()) {
                    continue;
                }
                let mut syms = sa.clone();
                syms.extend(sb.iter().cloned());
                out.add_term(ca * cb, syms);
            }
        }
        out
    }

    /// Serializable view: `(basis tuple, coefficient text)` pairs.
    pub fn to_text_terms(&self) -> Vec<(Vec<String>, String)> {
        self.terms.iter().map(|(s, c)| (s.iter().map(|x| x.label()).collect(), c.to_string())).collect()
    }
}

impl<S: Basis> fmt::Display for Form<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (s, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for (k, sym) in s.iter().enumerate() {
                f.write_str(if k == 0 { "*" } else { "^" })?;
                f.write_str(&sym.label())?;
            }
        }
        Ok(())
    }
}

impl<S: Basis> fmt::Debug for Form<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.degree, self)
    }
}

impl DiffForm {
    /// `dx^i`
    pub fn dx(i: u8) -> Self {
        Form::basis(Coord::Base(i))
    }

    /// `d⟨c⟩`
    pub fn d(c: Coord) -> Self {
        Form::basis(c)
    }

    /// `df = Σ ∂f/∂c dc`.
    pub fn differential(f: &Expr) -> Self {
        let mut out = Form::zero(1);
        for c in f.coords() {
            out.add_term(f.partial(&c), vec![c]);
        }
        out
    }

    /// Coefficient of `dx^1 ∧ ... ∧ dx^n`.
    pub fn top_coefficient(&self, n: u8) -> Expr {
        let syms: Vec<Coord> = (1..=n).map(Coord::Base).collect();
        self.coefficient(&syms)
    }
}
