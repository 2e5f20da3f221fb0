use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::chart::{legendre_chart, LegendreChartData};
use crate::error::{Error, Result};
use crate::numerics::{rk4_integrate, stencil};
use crate::symcore::{CompiledExpr, Coord, Expr, MultiIndex};
use crate::varcalc::{euler_lagrange, LagrangianProblem};

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 50;
/// Target sample spacing for the finite-difference trajectory checks.
const CHECK_SPACING: f64 = 0.02;

fn ones(k: usize) -> MultiIndex {
    MultiIndex::new(std::iter::repeat_n(1, k))
}

#[derive(Clone, Debug)]
enum Kind {
    /// `state' = rhs(x, state)` read off the canonical equations.
    Explicit { rhs: Vec<CompiledExpr>, top: Vec<CompiledExpr> },
    /// Top jets recovered by Newton from `P^{1^r} = ∂L/∂y_{1^r}`.
    Implicit {
        grad: Vec<CompiledExpr>,
        hess: Vec<Vec<CompiledExpr>>,
        /// `∂L/∂y^σ_{1^k}`, indexed `[σ−1][k]` for `k < r`.
        dl: Vec<Vec<CompiledExpr>>,
    },
}

/// The canonical first-order system of a mechanical (`n = 1`) problem.
#[derive(Clone, Debug)]
pub struct HddSystem {
    r: usize,
    m: u8,
    /// `y^σ_{1^k}` (`k < r`) followed by `P^{σ,1^k}` (`1 ≤ k ≤ r`).
    state: Vec<Coord>,
    /// `y^σ_{1^r}`
    top: Vec<Coord>,
    kind: Kind,
}

impl HddSystem {
    /// Explicit system when the Legendre chart exists, otherwise the
    /// implicit Newton form.
    pub fn new(prob: &LagrangianProblem) -> Result<Self> {
        match legendre_chart(prob) {
            Ok(chart) => Self::explicit(&chart),
            Err(Error::UnsupportedSymbolic(_)) => Self::implicit(prob),
            Err(e) => Err(e),
        }
    }

    fn layout(prob: &LagrangianProblem) -> Result<(Vec<Coord>, Vec<Coord>)> {
        if prob.n() != 1 {
            return Err(Error::Invalid(format!("canonical integration needs n = 1, got n = {}", prob.n())));
        }
        let (m, r) = (prob.m(), prob.r());
        let mut state = prob.ctx().jets(0, r - 1);
        for s in 1..=m {
            state.extend((1..=r).map(|k| Coord::Mom(s, ones(k))));
        }
        let top = (1..=m).map(|s| Coord::Jet(s, ones(r))).collect();
        Ok((state, top))
    }

    pub fn explicit(chart: &LegendreChartData) -> Result<Self> {
        let prob = chart.problem();
        let (state, top) = Self::layout(prob)?;
        let mut slots = vec![Coord::Base(1)];
        slots.extend(state.iter().cloned());
        let mut rates: BTreeMap<Coord, Expr> = BTreeMap::new();
        for eq in &chart.equations {
            let [(c, coord, _)] = eq.derivatives.as_slice() else {
                return Err(Error::Internal(format!("{} has {} derivative terms", eq.label, eq.derivatives.len())));
            };
            rates.insert(coord.clone(), eq.algebraic.scale(&-c.recip()));
        }
        let rhs = state
            .iter()
            .map(|c| {
                let e = rates.get(c).ok_or_else(|| Error::Internal(format!("no canonical equation for {c}")))?;
                CompiledExpr::compile(e, &slots)
            })
            .collect::<Result<_>>()?;
        let top_c = top.iter().map(|c| CompiledExpr::compile(&chart.inverse[c], &slots)).collect::<Result<_>>()?;
        Ok(HddSystem { r: prob.r(), m: prob.m(), state, top, kind: Kind::Explicit { rhs, top: top_c } })
    }

    pub fn implicit(prob: &LagrangianProblem) -> Result<Self> {
        let (state, top) = Self::layout(prob)?;
        let (m, r) = (prob.m(), prob.r());
        let l = prob.lagrangian();
        let mut slots = vec![Coord::Base(1)];
        slots.extend(prob.ctx().jets(0, r - 1));
        slots.extend(top.iter().cloned());
        let compile = |e: &Expr| CompiledExpr::compile(e, &slots);
        let grad = top.iter().map(|u| compile(&l.partial(u))).collect::<Result<_>>()?;
        let hess = top
            .iter()
            .map(|a| top.iter().map(|b| compile(&l.partial(a).partial(b))).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        let dl = (1..=m)
            .map(|s| (0..r).map(|k| compile(&l.partial(&Coord::Jet(s, ones(k))))).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        Ok(HddSystem { r, m, state, top, kind: Kind::Implicit { grad, hess, dl } })
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.kind, Kind::Explicit { .. })
    }

    pub fn state_coords(&self) -> &[Coord] {
        &self.state
    }

    pub fn top_coords(&self) -> &[Coord] {
        &self.top
    }

    fn jet_len(&self) -> usize {
        self.m as usize * self.r
    }

    fn slot(&self, c: &Coord) -> usize {
        self.state.iter().position(|s| s == c).expect("state coordinate")
    }

    /// Solves `∂L/∂y_{1^r} = P^{1^r}` for the top jets, starting at `guess`.
    fn newton(&self, x: f64, state: &[f64], guess: &[f64]) -> Result<Vec<f64>> {
        let Kind::Implicit { grad, hess, .. } = &self.kind else { unreachable!() };
        let mut v = vec![x];
        v.extend_from_slice(&state[..self.jet_len()]);
        v.extend_from_slice(guess);
        let off = 1 + self.jet_len();
        let k = self.top.len();
        let target: Vec<f64> = (1..=self.m).map(|s| state[self.slot(&Coord::Mom(s, ones(self.r)))]).collect();
        for _ in 0..NEWTON_MAX_ITER {
            let f = DVector::from_iterator(
                k,
                (0..k).map(|a| grad[a].eval(&v).map(|g| g - target[a])).collect::<Result<Vec<_>>>()?,
            );
            let scale = 1.0 + target.iter().fold(0.0f64, |m, t| m.max(t.abs()));
            if f.amax() <= NEWTON_TOL * scale {
                return Ok(v[off..].to_vec());
            }
            let mut jac = DMatrix::zeros(k, k);
            for a in 0..k {
                for b in 0..k {
                    jac[(a, b)] = hess[a][b].eval(&v)?;
                }
            }
            let step =
                jac.lu().solve(&f).ok_or_else(|| Error::NewtonFailed(format!("singular Jacobian at x = {x}")))?;
            for a in 0..k {
                v[off + a] -= step[a];
            }
        }
        Err(Error::NewtonFailed(format!("no convergence in {NEWTON_MAX_ITER} iterations at x = {x}")))
    }

    /// Top jets `y_{1^r}` at a state.
    pub fn top_jets(&self, x: f64, state: &[f64], guess: &[f64]) -> Result<Vec<f64>> {
        match &self.kind {
            Kind::Explicit { top, .. } => {
                let v = slots_of(x, state);
                top.iter().map(|c| c.eval(&v)).collect()
            }
            Kind::Implicit { .. } => self.newton(x, state, guess),
        }
    }

    fn rate(&self, x: f64, state: &[f64], guess: &mut Vec<f64>) -> Result<Vec<f64>> {
        match &self.kind {
            Kind::Explicit { rhs, .. } => {
                let v = slots_of(x, state);
                rhs.iter().map(|c| c.eval(&v)).collect()
            }
            Kind::Implicit { dl, .. } => {
                let u = self.newton(x, state, guess)?;
                let mut v = vec![x];
                v.extend_from_slice(&state[..self.jet_len()]);
                v.extend_from_slice(&u);
                let mut out = vec![0.0; state.len()];
                for s in 1..=self.m {
                    let si = s as usize - 1;
                    for k in 0..self.r {
                        let y = self.slot(&Coord::Jet(s, ones(k)));
                        out[y] = if k + 1 < self.r { state[self.slot(&Coord::Jet(s, ones(k + 1)))] } else { u[si] };
                    }
                    out[self.slot(&Coord::Mom(s, ones(1)))] = dl[si][0].eval(&v)?;
                    for k in 1..self.r {
                        let p = self.slot(&Coord::Mom(s, ones(k + 1)));
                        out[p] = dl[si][k].eval(&v)? - state[self.slot(&Coord::Mom(s, ones(k)))];
                    }
                }
                *guess = u;
                Ok(out)
            }
        }
    }
}

fn slots_of(x: f64, state: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(state.len() + 1);
    v.push(x);
    v.extend_from_slice(state);
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryPoint {
    pub x: f64,
    pub state: Vec<f64>,
    /// Reconstructed `y_{1^r}`.
    pub top: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub state_coords: Vec<String>,
    pub top_coords: Vec<String>,
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    /// Values of a state or top coordinate along the trajectory.
    pub fn column(&self, label: &str) -> Option<Vec<f64>> {
        if let Some(i) = self.state_coords.iter().position(|c| c == label) {
            return Some(self.points.iter().map(|p| p.state[i]).collect());
        }
        let i = self.top_coords.iter().position(|c| c == label)?;
        Some(self.points.iter().map(|p| p.top[i]).collect())
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }
}

/// Integrates the canonical system from `x0` to `x1` with classical RK4.
/// `init` must give every state coordinate at `x0`.
pub fn hdd_integrate(sys: &HddSystem, init: &BTreeMap<Coord, f64>, x0: f64, x1: f64, step: f64) -> Result<Trajectory> {
    let start: Vec<f64> = sys
        .state
        .iter()
        .map(|c| init.get(c).copied().ok_or_else(|| Error::MissingCoordinate(c.to_string())))
        .collect::<Result<_>>()?;
    let mut guess = vec![0.0; sys.top.len()];
    let nodes = rk4_integrate(&mut |x, s| sys.rate(x, s, &mut guess), x0, x1, step, &start)?;
    let mut guess = vec![0.0; sys.top.len()];
    let mut points = Vec::with_capacity(nodes.len());
    for (x, state) in nodes {
        let top = sys.top_jets(x, &state, &guess)?;
        guess.clone_from(&top);
        points.push(TrajectoryPoint { x, state, top });
    }
    Ok(Trajectory {
        state_coords: sys.state.iter().map(|c| c.to_string()).collect(),
        top_coords: sys.top.iter().map(|c| c.to_string()).collect(),
        points,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryChecks {
    /// `max |y_{1^k} − (y_{1^{k−1}})'|`, `1 ≤ k ≤ r`.
    pub holonomy: f64,
    /// `max |E_σ|` along the projected curve.
    pub euler_lagrange: f64,
    pub spacing: f64,
    pub samples: usize,
}

/// Finite-difference checks of holonomy and of the Euler–Lagrange equations
/// along a trajectory, on a subsample with spacing near 0.02.
pub fn trajectory_checks(prob: &LagrangianProblem, traj: &Trajectory) -> Result<TrajectoryChecks> {
    let (m, r) = (prob.m(), prob.r());
    if r > 3 {
        return Err(Error::Invalid(format!("trajectory checks need stencils of order {r} > 3")));
    }
    let xs = traj.xs();
    if xs.len() < 2 {
        return Err(Error::Invalid("trajectory has fewer than two nodes".into()));
    }
    let h0 = xs[1] - xs[0];
    let stride = ((CHECK_SPACING / h0).round() as usize).max(1);
    let idx: Vec<usize> = (0..xs.len()).step_by(stride).collect();
    if idx.len() < 7 {
        return Err(Error::Invalid(format!("trajectory too short for seven-point stencils ({} samples)", idx.len())));
    }
    let h = h0 * stride as f64;
    let sub = |col: Vec<f64>| -> Vec<f64> { idx.iter().map(|&i| col[i]).collect() };
    let column =
        |c: &Coord| traj.column(&c.to_string()).map(&sub).ok_or_else(|| Error::MissingCoordinate(c.to_string()));

    // jets[σ][k] = y^σ_{1^k} on the subsample, k ≤ 2r
    let mut jets: Vec<Vec<Vec<f64>>> = Vec::new();
    let inner = 3..idx.len() - 3;
    let mut holonomy = 0.0f64;
    for s in 1..=m {
        let mut cols: Vec<Vec<f64>> = (0..=r).map(|k| column(&Coord::Jet(s, ones(k)))).collect::<Result<_>>()?;
        for k in 1..=r {
            for i in inner.clone() {
                holonomy = holonomy.max((cols[k][i] - stencil::d1(&cols[k - 1], i, h)).abs());
            }
        }
        let top = cols[r].clone();
        for k in 1..=r {
            cols.push(
                (0..top.len())
                    .map(|i| if inner.contains(&i) { stencil::derivative(&top, i, h, k) } else { f64::NAN })
                    .collect(),
            );
        }
        jets.push(cols);
    }

    let mut slots = vec![Coord::Base(1)];
    for s in 1..=m {
        slots.extend((0..=2 * r).map(|k| Coord::Jet(s, ones(k))));
    }
    let el: Vec<CompiledExpr> =
        euler_lagrange(prob)?.values().map(|e| CompiledExpr::compile(e, &slots)).collect::<Result<_>>()?;
    let xsub = sub(xs);
    let mut worst = 0.0f64;
    for i in inner {
        let mut v = vec![xsub[i]];
        for cols in &jets {
            v.extend(cols.iter().map(|c| c[i]));
        }
        for e in &el {
            worst = worst.max(e.eval(&v)?.abs());
        }
    }
    Ok(TrajectoryChecks { holonomy, euler_lagrange: worst, spacing: h, samples: idx.len() })
}
