use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fields::Section;
use crate::numerics::{residual_at_points, Exec, ResidualEntry, ResidualSummary};
use crate::symcore::{equivalent, Coord, Equivalence, Expr, MultiIndex, Rational};
use crate::varcalc::{momenta, LagrangianProblem};

/// One Hamilton–de Donder equation: `algebraic + Σ c · ∂_i(coord) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct HddEquation {
    /// 1: `∂H/∂y`, 2: `∂H/∂y_J`, 3: `∂H/∂P^K`.
    pub group: u8,
    pub label: String,
    pub algebraic: Expr,
    pub derivatives: Vec<(Rational, Coord, u8)>,
}

impl fmt::Display for HddEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = self.algebraic.is_zero();
        if !first {
            write!(f, "{}", self.algebraic)?;
        }
        for (c, coord, i) in &self.derivatives {
            let sign = if first { "" } else { " + " };
            if c.is_one() {
                write!(f, "{sign}d{i}({coord})")?;
            } else if *c == -Rational::one() {
                write!(f, "{}d{i}({coord})", if first { "-" } else { " - " })?;
            } else {
                write!(f, "{sign}({c})*d{i}({coord})")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " = 0")
    }
}

impl Serialize for HddEquation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("HddEquation", 3)?;
        st.serialize_field("group", &self.group)?;
        st.serialize_field("label", &self.label)?;
        st.serialize_field("equation", &self.to_string())?;
        st.end()
    }
}

/// Legendre coordinates `(x, y_J (|J| < r), P^J (1 ≤ |J| ≤ r))` with the
/// inverse relations, the Hamiltonian and the canonical equations.
#[derive(Clone, Debug)]
pub struct LegendreChartData {
    prob: LagrangianProblem,
    pub coordinates: Vec<Coord>,
    /// Jets of order `r..` expressed in Legendre coordinates.
    pub inverse: BTreeMap<Coord, Expr>,
    /// False when only the order-`r` layer could be inverted.
    pub inverse_complete: bool,
    pub hamiltonian: Expr,
    pub equations: Vec<HddEquation>,
}

impl LegendreChartData {
    pub fn problem(&self) -> &LagrangianProblem {
        &self.prob
    }

    /// Equations of one group, in table order.
    pub fn group(&self, g: u8) -> impl Iterator<Item = &HddEquation> {
        self.equations.iter().filter(move |e| e.group == g)
    }
}

/// Solves the affine system `eqs = 0` for `unknowns` by exact elimination.
/// Coefficients of the unknowns must be rational constants.
#[allow(clippy::needless_range_loop)] // row operations read two rows at once
fn solve_affine(eqs: &[Expr], unknowns: &[Coord], layer: &str) -> Result<BTreeMap<Coord, Expr>> {
    let k = unknowns.len();
    if eqs.len() != k {
        return Err(Error::Internal(format!("{layer}: {} equations for {k} unknowns", eqs.len())));
    }
    let zero_u: BTreeMap<Coord, Expr> = unknowns.iter().map(|u| (u.clone(), Expr::zero())).collect();
    let mut a = vec![vec![Rational::zero(); k]; k];
    let mut b = Vec::with_capacity(k);
    for (i, e) in eqs.iter().enumerate() {
        let mut affine = e.substitute(&zero_u);
        for (j, u) in unknowns.iter().enumerate() {
            let c = e.partial(u).as_constant().ok_or_else(|| {
                Error::UnsupportedSymbolic(format!("{layer}: equation is not affine with constant coefficients in {u}"))
            })?;
            affine += Expr::coord(u.clone()).scale(&c);
            a[i][j] = c;
        }
        if !(e - &affine).is_zero() {
            return Err(Error::UnsupportedSymbolic(format!("{layer}: equation is not affine in the unknown jets")));
        }
        b.push(-e.substitute(&zero_u));
    }
    // Gauss–Jordan over the rationals with expression right-hand sides
    for col in 0..k {
        let piv =
            (col..k).find(|&r| !a[r][col].is_zero()).ok_or_else(|| Error::Degenerate(format!("{layer} singular")))?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for c in col..k {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = b[col].scale(&inv);
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..k {
                    let v = &a[col][c] * &f;
                    a[r][c] -= v;
                }
                let sub = b[col].scale(&f);
                b[r] = &b[r] - &sub;
            }
        }
    }
    Ok(unknowns.iter().cloned().zip(b).collect())
}

/// Builds the Legendre chart by inverting the momenta layer by layer.
///
/// The order-`r` layer is always square. Lower layers relate `m·C(n+k−1, k)`
/// momenta to `m·C(n+2r−k−1, 2r−k)` jets, which is square only for `n = 1`;
/// for `n ≥ 2` the chart keeps the order-`r` inverse only, which is all that
/// `H` and the canonical equations need.
pub fn legendre_chart(prob: &LagrangianProblem) -> Result<LegendreChartData> {
    let ctx = *prob.ctx();
    let (n, m, r) = (ctx.n, ctx.m, prob.r());
    let l = prob.lagrangian();
    let table = momenta(prob)?;
    let mom = |s: u8, j: &MultiIndex| Expr::coord(Coord::Mom(s, j.clone()));

    let mut inverse = BTreeMap::new();
    let layer = |order: usize, known: &BTreeMap<Coord, Expr>, name: &str| -> Result<BTreeMap<Coord, Expr>> {
        let k = 2 * r - order;
        let mut eqs = Vec::new();
        let mut unknowns = Vec::new();
        for s in 1..=m {
            for j in MultiIndex::all_of_len(n, k) {
                eqs.push(table[&(s, j.clone())].substitute(known) - mom(s, &j));
            }
            for j in MultiIndex::all_of_len(n, order) {
                unknowns.push(Coord::Jet(s, j));
            }
        }
        solve_affine(&eqs, &unknowns, name)
    };
    inverse.extend(layer(r, &BTreeMap::new(), "top layer")?);
    let inverse_complete = n == 1 || r == 1;
    if n == 1 {
        for order in r + 1..2 * r {
            let found = layer(order, &inverse, &format!("layer of order {order}"))?;
            inverse.extend(found);
        }
    }

    let top: BTreeMap<Coord, Expr> =
        inverse.iter().filter(|(c, _)| c.jet_order() == Some(r)).map(|(c, e)| (c.clone(), e.clone())).collect();
    let mut h = -l.substitute(&top);
    for s in 1..=m {
        for j in MultiIndex::all_between(n, 1, r) {
            let y = Expr::coord(Coord::Jet(s, j.clone())).substitute(&top);
            h += (mom(s, &j) * y).scale(&Rational::from_integer(j.count().into()));
        }
    }

    let mut coordinates = ctx.base_coords();
    coordinates.extend(ctx.jets(0, r - 1));
    for s in 1..=m {
        coordinates.extend(MultiIndex::all_between(n, 1, r).into_iter().map(|j| Coord::Mom(s, j)));
    }

    let mut equations = Vec::new();
    let weight = |j: &MultiIndex| Rational::from_integer(j.count().into());
    for s in 1..=m {
        let y = Coord::Jet(s, MultiIndex::empty());
        equations.push(HddEquation {
            group: 1,
            label: format!("hdd1({s})"),
            algebraic: h.partial(&y),
            derivatives: (1..=n).map(|i| (Rational::one(), Coord::Mom(s, MultiIndex::new([i])), i)).collect(),
        });
    }
    for s in 1..=m {
        for j in MultiIndex::all_between(n, 1, r - 1) {
            equations.push(HddEquation {
                group: 2,
                label: format!("hdd2({s};{j})"),
                algebraic: h.partial(&Coord::Jet(s, j.clone())),
                derivatives: (1..=n).map(|i| (weight(&j), Coord::Mom(s, j.with(i)), i)).collect(),
            });
        }
    }
    for s in 1..=m {
        for k in MultiIndex::all_between(n, 1, r) {
            let derivatives = k
                .distinct()
                .map(|i| {
                    let rest = k.without(i).expect("index present");
                    (-weight(&rest), Coord::Jet(s, rest), i)
                })
                .collect();
            equations.push(HddEquation {
                group: 3,
                label: format!("hdd3({s};{k})"),
                algebraic: h.partial(&Coord::Mom(s, k.clone())),
                derivatives,
            });
        }
    }

    Ok(LegendreChartData { prob: prob.clone(), coordinates, inverse, inverse_complete, hamiltonian: h, equations })
}

/// Momenta with the inverse relations substituted, compared with the `P`
/// coordinates, for every inverted layer.
pub fn round_trip(data: &LegendreChartData) -> Result<Vec<(String, Equivalence)>> {
    let prob = data.problem();
    let r = prob.r();
    let lowest = if data.inverse_complete { 1 } else { r };
    let mut out = Vec::new();
    for ((s, j), p) in momenta(prob)? {
        if j.len() < lowest {
            continue;
        }
        let back = p.substitute(&data.inverse);
        out.push((format!("P({s};{j})"), equivalent(&back, &Expr::coord(Coord::Mom(s, j)))));
    }
    Ok(out)
}

/// Per-equation residuals plus the maximum of each group.
#[derive(Clone, Debug, Serialize)]
pub struct HddResidual {
    pub groups: [f64; 3],
    pub summary: ResidualSummary,
}

/// Canonical-equation residuals along `δ = (y_J(x), P^J(x))` at `points`.
pub fn hdd_residual(data: &LegendreChartData, delta: &Section, points: &[Vec<f64>], exec: Exec) -> Result<HddResidual> {
    let comp = |c: &Coord| delta.component(c).cloned().ok_or_else(|| Error::MissingCoordinate(c.to_string()));
    let mut exprs = Vec::with_capacity(data.equations.len());
    for eq in &data.equations {
        let mut e = eq.algebraic.substitute(delta.components());
        for (c, coord, i) in &eq.derivatives {
            e += comp(coord)?.partial(&Coord::Base(*i)).scale(c);
        }
        exprs.push((eq.label.clone(), e));
    }
    let summary = residual_at_points(&exprs, points, exec)?;
    let mut groups = [0.0f64; 3];
    for (eq, ResidualEntry { max_abs, .. }) in data.equations.iter().zip(&summary.entries) {
        let g = &mut groups[eq.group as usize - 1];
        *g = g.max(*max_abs);
    }
    Ok(HddResidual { groups, summary })
}
