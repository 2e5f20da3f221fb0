use std::fmt;

use super::MultiIndex;
use crate::error::{Error, Result};

/// A chart coordinate on `J^k Y`, on `J^1(J^{2r-1} Y)`, or a Legendre momentum.
///
/// Indices are 1-based. The derived ordering (base, then jets by
/// `(sigma, |J|, J)`, then velocities, then momenta) is the covector order
/// used by the forms engine.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    /// `x^i`
    Base(u8),
    /// `y^sigma_J`
    Jet(u8, MultiIndex),
    /// `y^sigma_{J,p}` on `J^1(J^{2r-1} Y)`
    Vel(u8, MultiIndex, u8),
    /// `P_sigma^J`
    Mom(u8, MultiIndex),
}

impl Coord {
    pub fn x(i: u8) -> Self {
        Coord::Base(i)
    }

    pub fn y(sigma: u8, j: impl IntoIterator<Item = u8>) -> Self {
        Coord::Jet(sigma, MultiIndex::new(j))
    }

    pub fn vel(sigma: u8, j: impl IntoIterator<Item = u8>, p: u8) -> Self {
        Coord::Vel(sigma, MultiIndex::new(j), p)
    }

    pub fn mom(sigma: u8, j: impl IntoIterator<Item = u8>) -> Self {
        Coord::Mom(sigma, MultiIndex::new(j))
    }

    pub fn is_base(&self) -> bool {
        matches!(self, Coord::Base(_))
    }

    pub fn is_jet(&self) -> bool {
        matches!(self, Coord::Jet(..))
    }

    pub fn is_vel(&self) -> bool {
        matches!(self, Coord::Vel(..))
    }

    pub fn is_mom(&self) -> bool {
        matches!(self, Coord::Mom(..))
    }

    /// Jet order `|J|` for `Jet` coordinates.
    pub fn jet_order(&self) -> Option<usize> {
        match self {
            Coord::Jet(_, j) => Some(j.len()),
            _ => None,
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Base(i) => write!(f, "x({i})"),
            Coord::Jet(s, j) if j.is_empty() => write!(f, "y({s})"),
            Coord::Jet(s, j) => write!(f, "y({s};{j})"),
            Coord::Vel(s, j, p) => write!(f, "v({s};{j}|{p})"),
            Coord::Mom(s, j) => write!(f, "P({s};{j})"),
        }
    }
}

impl fmt::Debug for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The single global chart on the trivial bundle `R^n x R^m`, together with the
/// Lagrangian order and the highest jet order in play.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChartContext {
    pub n: u8,
    pub m: u8,
    pub r: usize,
    pub max_order: usize,
    pub velocity_enabled: bool,
}

impl ChartContext {
    /// Context with `max_order = 2r - 1` and the velocity space enabled.
    pub fn new(n: u8, m: u8, r: usize) -> Result<Self> {
        if n == 0 || m == 0 || r == 0 {
            return Err(Error::Invalid(format!("chart dimensions must be positive (n={n}, m={m}, r={r})")));
        }
        Ok(ChartContext { n, m, r, max_order: 2 * r - 1, velocity_enabled: true })
    }

    /// Same chart with a higher registered jet order.
    pub fn with_max_order(self, max_order: usize) -> Self {
        ChartContext { max_order: max_order.max(self.r), ..self }
    }

    pub fn without_velocities(self) -> Self {
        ChartContext { velocity_enabled: false, ..self }
    }

    /// Highest velocity index order, `2r - 1`.
    pub fn vel_order(&self) -> usize {
        2 * self.r - 1
    }

    fn check_multi(&self, j: &MultiIndex, what: &str) -> Result<()> {
        if let Some(&bad) = j.entries().iter().find(|&&e| e == 0 || e > self.n) {
            return Err(Error::IndexOutOfRange(format!("{what} index {bad} not in 1..={}", self.n)));
        }
        Ok(())
    }

    fn check_sigma(&self, s: u8) -> Result<()> {
        if s == 0 || s > self.m {
            return Err(Error::IndexOutOfRange(format!("fiber index {s} not in 1..={}", self.m)));
        }
        Ok(())
    }

    fn check_base(&self, i: u8) -> Result<()> {
        if i == 0 || i > self.n {
            return Err(Error::IndexOutOfRange(format!("base index {i} not in 1..={}", self.n)));
        }
        Ok(())
    }

    /// Checks that `c` is a registered coordinate of this chart.
    pub fn validate(&self, c: &Coord) -> Result<()> {
        match c {
            Coord::Base(i) => self.check_base(*i),
            Coord::Jet(s, j) => {
                self.check_sigma(*s)?;
                self.check_multi(j, "jet")?;
                if j.len() > self.max_order {
                    return Err(Error::OrderOverflow(format!(
                        "{c} has order {} > max order {}",
                        j.len(),
                        self.max_order
                    )));
                }
                Ok(())
            }
            Coord::Vel(s, j, p) => {
                if !self.velocity_enabled {
                    return Err(Error::Invalid(format!("{c}: velocity coordinates are not enabled")));
                }
                self.check_sigma(*s)?;
                self.check_multi(j, "velocity")?;
                self.check_base(*p)?;
                if j.len() > self.vel_order() {
                    return Err(Error::OrderOverflow(format!("{c} has order {} > {}", j.len(), self.vel_order())));
                }
                Ok(())
            }
            Coord::Mom(s, j) => {
                self.check_sigma(*s)?;
                self.check_multi(j, "momentum")?;
                if j.is_empty() || j.len() > self.r {
                    return Err(Error::IndexOutOfRange(format!("{c}: momentum order must be in 1..={}", self.r)));
                }
                Ok(())
            }
        }
    }

    /// All jet coordinates `y^sigma_J` with `lo <= |J| <= hi`, in coordinate order.
    pub fn jets(&self, lo: usize, hi: usize) -> Vec<Coord> {
        let mut out = Vec::new();
        for s in 1..=self.m {
            for j in MultiIndex::all_between(self.n, lo, hi) {
                out.push(Coord::Jet(s, j));
            }
        }
        out.sort();
        out
    }

    pub fn base_coords(&self) -> Vec<Coord> {
        (1..=self.n).map(Coord::Base).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        assert_eq!(Coord::y(1, []).to_string(), "y(1)");
        assert_eq!(Coord::y(1, [2, 1]).to_string(), "y(1;1,2)");
        assert_eq!(Coord::vel(1, [], 1).to_string(), "v(1;|1)");
        assert_eq!(Coord::vel(2, [1], 2).to_string(), "v(2;1|2)");
        assert_eq!(Coord::mom(1, [1, 1]).to_string(), "P(1;1,1)");
    }

    #[test]
    fn ordering_follows_covector_order() {
        let mut v = [
            Coord::mom(1, [1]),
            Coord::vel(1, [], 1),
            Coord::y(1, [1]),
            Coord::y(2, []),
            Coord::y(1, []),
            Coord::x(2),
            Coord::x(1),
        ];
        v.sort();
        let s: Vec<String> = v.iter().map(|c| c.to_string()).collect();
        assert_eq!(s, ["x(1)", "x(2)", "y(1)", "y(1;1)", "y(2)", "v(1;|1)", "P(1;1)"]);
    }

    #[test]
    fn validation() {
        let ctx = ChartContext::new(2, 1, 2).unwrap();
        assert!(ctx.validate(&Coord::y(1, [1, 2, 2])).is_ok());
        assert!(matches!(ctx.validate(&Coord::y(1, [3])), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(ctx.validate(&Coord::y(1, [1, 1, 1, 1])), Err(Error::OrderOverflow(_))));
        assert!(ctx.validate(&Coord::mom(1, [])).is_err());
        assert!(ctx.validate(&Coord::vel(1, [1, 1, 1], 2)).is_ok());
        assert!(ctx.without_velocities().validate(&Coord::vel(1, [], 1)).is_err());
    }
}
