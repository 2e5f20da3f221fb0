//! Random corpora and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use jetvar::fields::Section;
use jetvar::forms::DiffForm;
use jetvar::symcore::{ChartContext, Coord, Expr, MultiIndex};
use jetvar::varcalc::{GSpec, LagrangianProblem};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_rational(rng: &mut ChaCha8Rng) -> Expr {
    let mut num = rng.gen_range(-4..=4);
    if num == 0 {
        num = 1;
    }
    Expr::rational(num, rng.gen_range(1..=3))
}

/// Product of `deg` atoms drawn from `atoms`, times a small rational.
fn monomial(rng: &mut ChaCha8Rng, atoms: &[Coord], deg: usize) -> Expr {
    let mut e = small_rational(rng);
    for _ in 0..deg {
        e = e * Expr::coord(atoms.choose(rng).expect("atoms").clone());
    }
    e
}

/// Random polynomial in `atoms` with `terms` monomials of degree `1..=max_deg`.
pub fn polynomial(rng: &mut ChaCha8Rng, atoms: &[Coord], terms: usize, max_deg: usize) -> Expr {
    (0..terms)
        .map(|_| {
            let deg = rng.gen_range(1..=max_deg);
            monomial(rng, atoms, deg)
        })
        .sum()
}

/// Random polynomial Lagrangian with `n, m ≤ 2`, `r ≤ r_max`, degree ≤ 3,
/// always containing an order-`r` jet.
pub fn random_problem(rng: &mut ChaCha8Rng, r_max: usize) -> LagrangianProblem {
    let n = rng.gen_range(1..=2);
    let m = rng.gen_range(1..=2);
    let r = rng.gen_range(1..=r_max);
    let ctx = ChartContext::new(n, m, r).unwrap();
    let mut atoms = ctx.base_coords();
    atoms.extend(ctx.jets(0, r));
    let tops = ctx.jets(r, r);
    let lead = Expr::coord(tops.choose(rng).unwrap().clone()).pow(2).scale(&jetvar::symcore::rat(1, 2));
    let terms = rng.gen_range(2..=4);
    let rest = polynomial(rng, &atoms, terms, 3);
    LagrangianProblem::new(n, m, r, lead + rest).unwrap()
}

/// Twenty Lagrangians for the oracle criteria.
pub fn corpus(seed: u64) -> Vec<LagrangianProblem> {
    let mut g = rng(seed);
    (0..20).map(|_| random_problem(&mut g, 3)).collect()
}

/// Formal derivative `d_i`, written out from its definition:
/// `∂/∂x^i + Σ y^σ_{J i} ∂/∂y^σ_J` over the jets present in `e`.
pub fn oracle_total_derivative(e: &Expr, i: u8) -> Expr {
    let mut out = e.partial(&Coord::Base(i));
    for c in e.coords() {
        if let Coord::Jet(s, j) = &c {
            out += Expr::coord(Coord::Jet(*s, j.with(i))) * e.partial(&c);
        }
    }
    out
}

/// Alternating sum `E_σ = Σ_J (−1)^{|J|} d_J ∂L/∂y^σ_J` over nondecreasing
/// `J`, `|J| ≤ r`. Each coordinate `y_J` appears once in `L`, so no
/// multiplicity factors enter.
pub fn oracle_euler_lagrange(prob: &LagrangianProblem) -> BTreeMap<u8, Expr> {
    let (n, m, r) = (prob.n(), prob.m(), prob.r());
    let mut out = BTreeMap::new();
    for s in 1..=m {
        let mut e = Expr::zero();
        for j in MultiIndex::all_between(n, 0, r) {
            let mut t = prob.lagrangian().partial(&Coord::Jet(s, j.clone()));
            for &i in j.entries() {
                t = oracle_total_derivative(&t, i);
            }
            e = if j.len() % 2 == 0 { e + t } else { e - t };
        }
        out.insert(s, e);
    }
    out
}

/// First-order Euler–Lagrange expressions of a Lagrangian on
/// `J¹(J^{2r−1}Y)`, treating each `y_P` as a fiber coordinate with
/// velocities `v(σ;P|i)`: `∂L/∂y_P − Σ_i D_i ∂L/∂v(σ;P|i)`.
pub fn oracle_first_order_el(lt: &Expr, s: u8, p: &MultiIndex, n: u8) -> Expr {
    let mut out = lt.partial(&Coord::Jet(s, p.clone()));
    for i in 1..=n {
        let dv = lt.partial(&Coord::Vel(s, p.clone(), i));
        // D_i on J¹(J^{2r−1}Y): ∂_i + Σ v(τ;Q|i) ∂/∂y_Q; second velocities are absent
        let mut d = dv.partial(&Coord::Base(i));
        for c in dv.coords() {
            match &c {
                Coord::Jet(t, q) => d += Expr::coord(Coord::Vel(*t, q.clone(), i)) * dv.partial(&c),
                Coord::Vel(..) => panic!("velocity-dependent ∂L/∂v in oracle"),
                _ => {}
            }
        }
        out = out - d;
    }
    out
}

/// Admissible `g` for `r = 2`: `g^{1,(2)} = h`, `g^{2,(1)} = −h` per fiber
/// index, `h` of order ≤ 1.
pub fn random_gspec(rng: &mut ChaCha8Rng, prob: &LagrangianProblem) -> GSpec {
    assert_eq!((prob.n(), prob.r()), (2, 2));
    let ctx = prob.ctx();
    let mut atoms = ctx.base_coords();
    atoms.extend(ctx.jets(0, 1));
    let mut g = GSpec::new();
    for s in 1..=prob.m() {
        let h = polynomial(rng, &atoms, 3, 2);
        g.insert(s, 1, MultiIndex::new([2]), h.clone());
        g.insert(s, 2, MultiIndex::new([1]), -h);
    }
    g
}

/// Random polynomial form of the given degree over `dx` and `dy_J`.
pub fn random_form(rng: &mut ChaCha8Rng, ctx: &ChartContext, degree: usize, max_order: usize) -> DiffForm {
    let mut coords = ctx.base_coords();
    coords.extend(ctx.jets(0, max_order));
    let mut out = DiffForm::zero(degree);
    for _ in 0..rng.gen_range(1..=3) {
        let mut syms = coords.clone();
        syms.shuffle(rng);
        syms.truncate(degree);
        let coeff = polynomial(rng, &coords, 2, 2);
        let mut term = DiffForm::scalar(coeff);
        for c in syms {
            term = term.wedge(&DiffForm::d(c));
        }
        out = out.add(&term);
    }
    out
}

/// Random polynomial section `γ^σ(x)` of degree ≤ 3.
pub fn random_section(rng: &mut ChaCha8Rng, n: u8, m: u8) -> Section {
    let base: Vec<Coord> = (1..=n).map(Coord::Base).collect();
    let gamma = (1..=m).map(|s| (s, polynomial(rng, &base, 3, 3) + small_rational(rng))).collect();
    Section::from_gamma(n, gamma).unwrap()
}

pub fn sample_points(rng: &mut ChaCha8Rng, n: u8, count: usize) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
}
