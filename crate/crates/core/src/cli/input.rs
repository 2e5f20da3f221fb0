use std::collections::BTreeMap;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fields::{Section, SlopeField};
use crate::numerics::IntegrationDomain;
use crate::symcore::{parse_coord, parse_expr, Coord, Expr, MultiIndex};
use crate::varcalc::{lepagean_from_g, poincare_cartan, GSpec, LagrangianProblem, LepageanForm};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    n: u8,
    m: u8,
    r: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLagrangian {
    #[serde(rename = "L")]
    l: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawG {
    sigma: u8,
    i: u8,
    #[serde(rename = "J", default)]
    j: Vec<u8>,
    expr: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
    resolution: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHdd {
    #[serde(default)]
    init: BTreeMap<String, f64>,
    x0: Option<f64>,
    x1: Option<f64>,
    step: Option<f64>,
    #[serde(default)]
    reference: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariation {
    xi: BTreeMap<String, String>,
    eps: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    problem: RawProblem,
    lagrangian: RawLagrangian,
    #[serde(default)]
    g: Vec<RawG>,
    gamma: Option<BTreeMap<String, String>>,
    gamma2: Option<BTreeMap<String, String>>,
    delta: Option<BTreeMap<String, String>>,
    field: Option<BTreeMap<String, String>>,
    domain: Option<RawDomain>,
    point: Option<BTreeMap<String, f64>>,
    hdd: Option<RawHdd>,
    variation: Option<RawVariation>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
}

/// Initial-value data for the canonical integrator.
#[derive(Clone, Debug, Default)]
pub struct HddBlock {
    pub init: BTreeMap<Coord, f64>,
    pub x0: Option<f64>,
    pub x1: Option<f64>,
    pub step: Option<f64>,
    pub reference: BTreeMap<Coord, Expr>,
}

/// A validated problem file: the Lagrangian plus optional companions.
#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub problem: LagrangianProblem,
    pub lagrangian_text: String,
    pub g: Option<GSpec>,
    pub gamma: Option<Section>,
    pub gamma2: Option<Section>,
    pub delta: Option<Section>,
    pub field: Option<SlopeField>,
    pub domain: Option<IntegrationDomain>,
    pub point: Option<BTreeMap<Coord, f64>>,
    pub hdd: Option<HddBlock>,
    pub variation: Option<(BTreeMap<u8, Expr>, Option<f64>)>,
    pub tolerances: BTreeMap<String, f64>,
}

fn coord_map<V>(prob: &LagrangianProblem, raw: &BTreeMap<String, V>, what: &str) -> Result<BTreeMap<Coord, V>>
where
    V: Clone,
{
    let ctx = prob.ctx();
    raw.iter()
        .map(|(k, v)| {
            let c = parse_coord(k, ctx).map_err(|e| Error::Invalid(format!("[{what}] key {k:?}: {e}")))?;
            Ok((c, v.clone()))
        })
        .collect()
}

fn expr_map(prob: &LagrangianProblem, raw: &BTreeMap<String, String>, what: &str) -> Result<BTreeMap<Coord, Expr>> {
    coord_map(prob, raw, what)?
        .into_iter()
        .map(|(c, text)| {
            let e = parse_expr(&text, prob.ctx()).map_err(|e| Error::Invalid(format!("[{what}] {c}: {e}")))?;
            Ok((c, e))
        })
        .collect()
}

fn section(prob: &LagrangianProblem, raw: &BTreeMap<String, String>, what: &str) -> Result<Section> {
    Section::from_components(prob.n(), expr_map(prob, raw, what)?)
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawFile =
            toml::from_str(text).map_err(|e| Error::Invalid(format!("problem file: {}", e.message())))?;
        let RawProblem { n, m, r } = raw.problem;
        let lagrangian_text = raw.lagrangian.l;
        let problem = LagrangianProblem::parse(n, m, r, &lagrangian_text)?;

        let g = if raw.g.is_empty() {
            None
        } else {
            let mut spec = GSpec::new();
            for e in &raw.g {
                let expr = parse_expr(&e.expr, problem.ctx())?;
                spec.insert(e.sigma, e.i, MultiIndex::new(e.j.iter().copied()), expr);
            }
            spec.validate(&problem)?;
            Some(spec)
        };
        let gamma = raw.gamma.as_ref().map(|s| section(&problem, s, "gamma")).transpose()?;
        let gamma2 = raw.gamma2.as_ref().map(|s| section(&problem, s, "gamma2")).transpose()?;
        let delta = raw.delta.as_ref().map(|s| section(&problem, s, "delta")).transpose()?;
        let field =
            raw.field.as_ref().map(|f| SlopeField::new(&problem, expr_map(&problem, f, "field")?)).transpose()?;
        let domain = raw.domain.map(|d| IntegrationDomain::new(d.lower, d.upper, d.resolution)).transpose()?;
        if let Some(d) = &domain {
            if d.dim() != n as usize {
                return Err(Error::Invalid(format!("[domain] has dimension {}, expected n = {n}", d.dim())));
            }
        }
        let point = raw.point.as_ref().map(|p| coord_map(&problem, p, "point")).transpose()?;
        let hdd = raw
            .hdd
            .map(|h| {
                Ok::<_, Error>(HddBlock {
                    init: coord_map(&problem, &h.init, "hdd.init")?,
                    x0: h.x0,
                    x1: h.x1,
                    step: h.step,
                    reference: expr_map(&problem, &h.reference, "hdd.reference")?,
                })
            })
            .transpose()?;
        let variation = raw
            .variation
            .map(|v| {
                let xi = expr_map(&problem, &v.xi, "variation.xi")?
                    .into_iter()
                    .map(|(c, e)| match c {
                        Coord::Jet(s, j) if j.is_empty() => Ok((s, e)),
                        other => Err(Error::Invalid(format!("[variation.xi] key {other} is not a fiber coordinate"))),
                    })
                    .collect::<Result<BTreeMap<u8, Expr>>>()?;
                Ok::<_, Error>((xi, v.eps))
            })
            .transpose()?;
        Ok(ProblemFile {
            problem,
            lagrangian_text,
            g,
            gamma,
            gamma2,
            delta,
            field,
            domain,
            point,
            hdd,
            variation,
            tolerances: raw.tolerances,
        })
    }

    /// The Lepagean equivalent in use: from `[[g]]` when given, otherwise
    /// the Poincaré–Cartan form.
    pub fn lepagean(&self) -> Result<LepageanForm> {
        match &self.g {
            Some(g) => lepagean_from_g(&self.problem, g),
            None => poincare_cartan(&self.problem),
        }
    }

    pub fn require<'a, T>(&self, v: &'a Option<T>, block: &str) -> Result<&'a T> {
        v.as_ref().ok_or_else(|| Error::Invalid(format!("problem file has no [{block}] block")))
    }
}

/// Parses `coordinate = value` lines; `#` starts a comment.
pub fn parse_point_file(text: &str, prob: &LagrangianProblem) -> Result<BTreeMap<Coord, f64>> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("line {}: expected `coordinate = value`", no + 1)))?;
        let c = parse_coord(k.trim(), prob.ctx())?;
        let x: f64 =
            v.trim().parse().map_err(|_| Error::Invalid(format!("line {}: {:?} is not a number", no + 1, v.trim())))?;
        if out.insert(c.clone(), x).is_some() {
            return Err(Error::Invalid(format!("line {}: {c} given twice", no + 1)));
        }
    }
    Ok(out)
}
