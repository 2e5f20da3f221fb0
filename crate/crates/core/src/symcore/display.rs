use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::expr::{Atom, Expr, Monomial, Rational};

fn write_factor(out: &mut String, atom: &Atom, exp: i32) {
    match atom {
        Atom::Coord(c) => write!(out, "{c}").unwrap(),
        Atom::Func(f, u) => write!(out, "{}({})", f.name(), u).unwrap(),
        Atom::Sum(s) => write!(out, "({s})").unwrap(),
    }
    if exp.abs() != 1 {
        write!(out, "^{}", exp.abs()).unwrap();
    }
}

fn write_rational(out: &mut String, c: &Rational) {
    if c.is_integer() {
        write!(out, "{}", c.numer()).unwrap();
    } else {
        write!(out, "{}/{}", c.numer(), c.denom()).unwrap();
    }
}

/// Writes `|coeff| * monomial` without a sign.
fn write_term(out: &mut String, m: &Monomial, coeff: &Rational) {
    let mag = coeff.abs();
    let pos: Vec<_> = m.factors().iter().filter(|(_, e)| *e > 0).collect();
    let neg: Vec<_> = m.factors().iter().filter(|(_, e)| *e < 0).collect();
    let mut wrote = false;
    if !mag.is_one() || pos.is_empty() {
        write_rational(out, &mag);
        wrote = true;
    }
    for (a, e) in pos {
        if wrote {
            out.push('*');
        }
        write_factor(out, a, *e);
        wrote = true;
    }
    for (a, e) in neg {
        out.push('/');
        write_factor(out, a, *e);
    }
}

impl fmt::Display for Expr {
    /// Canonical text; re-parses to an equal expression.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.raw_terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (k, (m, c)) in terms.iter().enumerate() {
            let negative = c.is_negative();
            match (k, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            write_term(&mut out, m, c);
        }
        f.write_str(&out)
    }
}
