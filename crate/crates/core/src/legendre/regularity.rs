use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symcore::{rat, Coord, Expr, MultiIndex};
use crate::varcalc::{inv_weight, momenta, LagrangianProblem};

const RANK_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-9;

/// One block `s` (`r ≤ s ≤ 2r−1`): rows `(σ, J)` with `|J| = 2r−s`,
/// columns `(ν, P)` with `|P| = s`.
#[derive(Clone, Debug, Serialize)]
pub struct RegularityBlock {
    pub s: usize,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    #[serde(serialize_with = "serialize_exprs")]
    pub entries: Vec<Vec<Expr>>,
    pub values: Vec<Vec<f64>>,
    pub rank: usize,
    pub full_rank: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub blocks: Vec<RegularityBlock>,
    pub regular: bool,
}

fn serialize_exprs<S: serde::Serializer>(m: &[Vec<Expr>], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    m.iter().map(|row| row.iter().map(|e| e.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>().serialize(s)
}

fn labelled(m: u8, n: u8, k: usize) -> Vec<(u8, MultiIndex)> {
    let mut out = Vec::new();
    for s in 1..=m {
        for j in MultiIndex::all_of_len(n, k) {
            out.push((s, j));
        }
    }
    out
}

fn label(s: u8, j: &MultiIndex) -> String {
    if j.is_empty() {
        format!("({s})")
    } else {
        format!("({s};{j})")
    }
}

/// Distinct orderings of a multiset.
fn arrangements(p: &MultiIndex) -> Vec<Vec<u8>> {
    fn go(rest: &mut Vec<u8>, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        let mut seen = Vec::new();
        for k in 0..rest.len() {
            let v = rest[k];
            if seen.contains(&v) {
                continue;
            }
            seen.push(v);
            rest.remove(k);
            cur.push(v);
            go(rest, cur, out);
            cur.pop();
            rest.insert(k, v);
        }
    }
    let mut out = Vec::new();
    go(&mut p.entries().to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Entry of the block `s` read off the second derivatives of `L`:
/// `1/(N(J p_{r+1}…p_s) N(p_1…p_r)) ∂²L/∂y^σ_{J p_{r+1}…p_s} ∂y^ν_{p_1…p_r}`,
/// averaged over the distinct orderings of `P` so the entry depends on the
/// unordered `P` only.
fn block_entry(l: &Expr, r: usize, row: &(u8, MultiIndex), col: &(u8, MultiIndex)) -> Expr {
    let orders = arrangements(&col.1);
    let mut acc = Expr::zero();
    for o in &orders {
        let head = MultiIndex::new(o[..r].iter().copied());
        let tail = row.1.union(&MultiIndex::new(o[r..].iter().copied()));
        let w = inv_weight(&head) * inv_weight(&tail);
        let d2 = l.partial(&Coord::Jet(row.0, tail)).partial(&Coord::Jet(col.0, head));
        acc += d2.scale(&w);
    }
    acc.scale(&rat(1, orders.len() as i64))
}

/// Fiber index with a multi-index, labelling a row or column.
pub type Key = (u8, MultiIndex);

/// Block order `s`, row keys, column keys and the symbolic entries.
pub type SymbolicBlock = (usize, Vec<Key>, Vec<Key>, Vec<Vec<Expr>>);

/// Row keys, column keys and the symbolic entries.
pub type SymbolicMatrix = (Vec<Key>, Vec<Key>, Vec<Vec<Expr>>);

/// Symbolic blocks for `r ≤ s ≤ 2r−1`, with their row and column keys.
pub fn regularity_blocks(prob: &LagrangianProblem) -> Vec<SymbolicBlock> {
    let (n, m, r) = (prob.n(), prob.m(), prob.r());
    (r..=2 * r - 1)
        .map(|s| {
            let rows = labelled(m, n, 2 * r - s);
            let cols = labelled(m, n, s);
            let entries =
                rows.iter().map(|a| cols.iter().map(|b| block_entry(prob.lagrangian(), r, a, b)).collect()).collect();
            (s, rows, cols, entries)
        })
        .collect()
}

/// The matrix of the linear subsystem for the non-holonomic velocities:
/// rows `y^ν_P` with `r ≤ |P| ≤ 2r−1`, columns `P_σ^J` with `1 ≤ |J| ≤ r`,
/// entries `∂P_σ^J/∂y^ν_P`.
pub fn assembled_matrix(prob: &LagrangianProblem) -> Result<SymbolicMatrix> {
    let (n, m, r) = (prob.n(), prob.m(), prob.r());
    let p = momenta(prob)?;
    let rows: Vec<_> = (r..=2 * r - 1).flat_map(|s| labelled(m, n, s)).collect();
    let cols: Vec<_> = (1..=r).flat_map(|k| labelled(m, n, k)).collect();
    let entries = rows
        .iter()
        .map(|(nu, pp)| cols.iter().map(|key| p[key].partial(&Coord::Jet(*nu, pp.clone()))).collect())
        .collect();
    Ok((rows, cols, entries))
}

fn evaluate(entries: &[Vec<Expr>], point: &BTreeMap<Coord, f64>) -> Result<Vec<Vec<f64>>> {
    entries.iter().map(|row| row.iter().map(|e| e.eval(point)).collect()).collect()
}

/// Numerical rank with relative singular value cutoff `1e−10 · σ_max`.
pub fn numeric_rank(values: &[Vec<f64>]) -> usize {
    let rows = values.len();
    let cols = values.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return 0;
    }
    let mat = DMatrix::from_fn(rows, cols, |i, j| values[i][j]);
    let sv = mat.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&v| v > RANK_TOL * top).count()
}

pub fn regularity_report(prob: &LagrangianProblem, point: &BTreeMap<Coord, f64>) -> Result<RegularityReport> {
    let mut blocks = Vec::new();
    for (s, rows, cols, entries) in regularity_blocks(prob) {
        let values = evaluate(&entries, point)?;
        let rank = numeric_rank(&values);
        let full_rank = rank == rows.len().min(cols.len());
        blocks.push(RegularityBlock {
            s,
            rows: rows.iter().map(|(a, j)| label(*a, j)).collect(),
            cols: cols.iter().map(|(a, j)| label(*a, j)).collect(),
            entries,
            values,
            rank,
            full_rank,
        });
    }
    let regular = blocks.iter().all(|b| b.full_rank);
    Ok(RegularityReport { blocks, regular })
}

#[derive(Clone, Debug, Serialize)]
pub struct Definiteness {
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
    pub positive_definite: bool,
    /// Smallest Cholesky pivot reached (the failing one if not definite).
    pub min_pivot: f64,
}

/// Positive definiteness by Cholesky factorization with an absolute pivot
/// floor of `1e−12`; returns the flag and the smallest pivot.
#[allow(clippy::needless_range_loop)]
pub fn cholesky_positive_definite(a: &[Vec<f64>]) -> Result<(bool, f64)> {
    let n = a.len();
    for i in 0..n {
        if a[i].len() != n {
            return Err(Error::Invalid("matrix is not square".into()));
        }
        for j in 0..i {
            let scale = a[i][j].abs().max(a[j][i].abs()).max(1.0);
            if (a[i][j] - a[j][i]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::Internal(format!("asymmetric Hessian at ({i},{j})")));
            }
        }
    }
    let mut l = vec![vec![0.0; n]; n];
    let mut min_pivot = f64::INFINITY;
    for j in 0..n {
        let d = a[j][j] - (0..j).map(|k| l[j][k] * l[j][k]).sum::<f64>();
        min_pivot = min_pivot.min(d);
        if d <= PIVOT_TOL {
            return Ok((false, d));
        }
        let djj = d.sqrt();
        l[j][j] = djj;
        for i in j + 1..n {
            l[i][j] = (a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>()) / djj;
        }
    }
    Ok((true, if n == 0 { 0.0 } else { min_pivot }))
}

/// `(∂²L/∂y^σ_J ∂y^ν_Q)` over nondecreasing `|J| = |Q| = r`.
pub fn hessian_matrix(prob: &LagrangianProblem) -> (Vec<(u8, MultiIndex)>, Vec<Vec<Expr>>) {
    let keys = labelled(prob.m(), prob.n(), prob.r());
    let l = prob.lagrangian();
    let entries = keys
        .iter()
        .map(|(s, j)| {
            let dj = l.partial(&Coord::Jet(*s, j.clone()));
            keys.iter().map(|(nu, q)| dj.partial(&Coord::Jet(*nu, q.clone()))).collect()
        })
        .collect();
    (keys, entries)
}

pub fn hessian_definiteness(prob: &LagrangianProblem, point: &BTreeMap<Coord, f64>) -> Result<Definiteness> {
    let (keys, entries) = hessian_matrix(prob);
    let matrix = evaluate(&entries, point)?;
    let (positive_definite, min_pivot) = cholesky_positive_definite(&matrix)?;
    Ok(Definiteness { labels: keys.iter().map(|(s, j)| label(*s, j)).collect(), matrix, positive_definite, min_pivot })
}

#[cfg(test)]
mod tests {
    use super::*;
    fn origin(prob: &LagrangianProblem) -> BTreeMap<Coord, f64> {
        let mut pt: BTreeMap<Coord, f64> = prob.ctx().jets(0, prob.r()).into_iter().map(|c| (c, 0.3)).collect();
        pt.extend(prob.ctx().base_coords().into_iter().map(|c| (c, 0.1)));
        pt
    }

    #[test]
    fn block_examples() {
        let prob = LagrangianProblem::parse(1, 1, 2, "1/2*y(1;1,1)^2").unwrap();
        let rep = regularity_report(&prob, &origin(&prob)).unwrap();
        assert_eq!(rep.blocks[0].values, vec![vec![1.0]]);
        assert!(rep.regular);

        let prob = LagrangianProblem::parse(1, 1, 2, "y(1;1,1)*y(1;1)").unwrap();
        let rep = regularity_report(&prob, &origin(&prob)).unwrap();
        assert_eq!(rep.blocks[0].values, vec![vec![0.0]]);
        assert!(!rep.regular);

        let prob = LagrangianProblem::parse(2, 1, 1, "1/2*(y(1;1)^2 + y(1;2)^2)").unwrap();
        let rep = regularity_report(&prob, &origin(&prob)).unwrap();
        assert_eq!(rep.blocks[0].values, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(rep.regular);
    }

    #[test]
    fn blocks_are_diagonal_blocks_of_assembled_matrix() {
        let prob =
            LagrangianProblem::parse(2, 1, 2, "y(1;1,1)^2 + 3*y(1;1,2)*y(1;2,2) + y(1;1,2)^2*y(1) - y(1;2)^2").unwrap();
        let (rows, cols, big) = assembled_matrix(&prob).unwrap();
        for (s, brow, bcol, entries) in regularity_blocks(&prob) {
            let sign = if (s - prob.r()).is_multiple_of(2) { 1 } else { -1 };
            for (a, rkey) in brow.iter().enumerate() {
                for (b, ckey) in bcol.iter().enumerate() {
                    let i = rows.iter().position(|k| k == ckey).unwrap();
                    let j = cols.iter().position(|k| k == rkey).unwrap();
                    let w = rat(sign, ckey.1.count() as i64);
                    assert_eq!(entries[a][b], big[i][j].scale(&w), "s={s} row {rkey:?} col {ckey:?}");
                }
            }
        }
    }

    #[test]
    fn definiteness_examples() {
        let p = LagrangianProblem::parse(1, 1, 1, "1/2*y(1;1)^2").unwrap();
        assert!(hessian_definiteness(&p, &origin(&p)).unwrap().positive_definite);
        let p = LagrangianProblem::parse(2, 1, 1, "1/2*(y(1;1)^2 - y(1;2)^2)").unwrap();
        let d = hessian_definiteness(&p, &origin(&p)).unwrap();
        assert_eq!(d.matrix, vec![vec![1.0, 0.0], vec![0.0, -1.0]]);
        assert!(!d.positive_definite);
        let p = LagrangianProblem::parse(1, 1, 2, "1/2*y(1;1,1)^2").unwrap();
        assert!(hessian_definiteness(&p, &origin(&p)).unwrap().positive_definite);
    }

    #[test]
    fn asymmetric_input_is_internal_error() {
        assert!(matches!(cholesky_positive_definite(&[vec![1.0, 2.0], vec![0.0, 1.0]]), Err(Error::Internal(_))));
    }
}
