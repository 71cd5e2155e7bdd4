//! Class-group rank bounds, replayed as chains of exact inequalities.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::enumerate::{self, EnumerateError, LinkRow};
use crate::icalc::degree_drop;
use crate::linkeq::SolveOptions;
use crate::rational::Rational;
use crate::reftable::{RefTableError, ReferenceTable};

/// Class-group rank that the orbit argument forces once `r > 2`.
pub const ORBIT_RANK: i64 = 11;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundsError {
    #[error("bounds are only certified for genus 12, got {0}")]
    UnsupportedGenus(i64),
    #[error("(-K)^2.E must be positive, got {0}")]
    NonPositiveDegree(Rational),
    #[error("surface degree must be positive, got {0}")]
    InvalidSurfaceDegree(i64),
    #[error("reference entry {name} lacks tag {tag}")]
    MissingTag { name: String, tag: String },
    #[error("ledger step {index} fails: {claim}")]
    StepFails { index: usize, claim: String },
    #[error(transparent)]
    Reference(#[from] RefTableError),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Eq => lhs == rhs,
            Relation::Ne => lhs != rhs,
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }
}

/// One logged comparison `lhs rel rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub claim: String,
    pub lhs: Rational,
    pub rel: Relation,
    pub rhs: Rational,
}

impl Step {
    pub fn new(claim: impl Into<String>, lhs: impl Into<Rational>, rel: Relation, rhs: impl Into<Rational>) -> Self {
        Step { claim: claim.into(), lhs: lhs.into(), rel, rhs: rhs.into() }
    }

    pub fn holds(&self) -> bool {
        self.rel.holds(&self.lhs, &self.rhs)
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} {} {}", self.claim, self.lhs, self.rel.symbol(), self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ledger {
    pub name: String,
    pub steps: Vec<Step>,
    pub conclusion: String,
}

impl Ledger {
    fn new(name: &str) -> Self {
        Ledger { name: name.to_string(), steps: Vec::new(), conclusion: String::new() }
    }

    /// Logs the step and fails if it does not hold.
    fn check(&mut self, step: Step) -> Result<(), BoundsError> {
        let ok = step.holds();
        let index = self.steps.len();
        let claim = step.to_string();
        self.steps.push(step);
        if ok {
            Ok(())
        } else {
            Err(BoundsError::StepFails { index, claim })
        }
    }

    /// Re-evaluates every step.
    pub fn verify(&self) -> Result<(), BoundsError> {
        for (index, s) in self.steps.iter().enumerate() {
            if !s.holds() {
                return Err(BoundsError::StepFails { index, claim: s.to_string() });
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.name);
        for (i, s) in self.steps.iter().enumerate() {
            out.push_str(&format!("  {:>2}. {}\n", i + 1, s));
        }
        out.push_str(&format!("  => {}\n", self.conclusion));
        out
    }
}

/// Most components an exceptional divisor `E` can have when every component
/// has degree at least 2.
pub fn max_components(ksq_e: &Rational) -> Result<i64, BoundsError> {
    if !ksq_e.is_positive() {
        return Err(BoundsError::NonPositiveDegree(ksq_e.clone()));
    }
    Ok((ksq_e / 2).floor().to_i64().expect("integral floor"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    #[serde(rename = "e1")]
    E1,
    #[serde(rename = "e2")]
    E2,
    #[serde(rename = "e3-4")]
    E34,
}

/// One divisorial contraction in a run of the MMP.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MmpStep {
    pub kind: StepKind,
    pub ksq_e: Rational,
    pub pa: Option<i64>,
    /// Increase of `(-K)^3`.
    pub delta: Rational,
}

impl MmpStep {
    pub fn e1(ksq_e: Rational, pa: i64) -> Self {
        let delta = degree_drop(&ksq_e, pa);
        MmpStep { kind: StepKind::E1, ksq_e, pa: Some(pa), delta }
    }

    pub fn e2() -> Self {
        MmpStep { kind: StepKind::E2, ksq_e: 4.into(), pa: None, delta: 8.into() }
    }

    pub fn e34() -> Self {
        MmpStep { kind: StepKind::E34, ksq_e: 2.into(), pa: None, delta: 2.into() }
    }

    /// Least possible increase when every contracted surface has degree at
    /// least `d`: a curve blowup with `(-K)^2.E = d`, `p_a = 0`, or a point
    /// blowup whose exceptional degree reaches `d`.
    pub fn min_delta(d: i64) -> Rational {
        let mut best = MmpStep::e1(d.into(), 0).delta;
        for s in [MmpStep::e2(), MmpStep::e34()] {
            if s.ksq_e >= d && s.delta < best {
                best = s.delta;
            }
        }
        best
    }
}

/// Degree-24 case: one row per curve-blowup structure of the smoothing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop24Row {
    pub target: String,
    pub target_kcube: Rational,
    pub pa: i64,
    pub ksq_e: Rational,
    pub rank_cap: i64,
    pub components: i64,
    pub contribution: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop24Report {
    pub rows: Vec<Prop24Row>,
    /// Bounds from the other branches: rank one, non-blowup, products.
    pub branches: Vec<(String, i64)>,
    pub ledger: Ledger,
    pub bound: i64,
}

/// `(-K)^3` of a divisor of bidegree `(a, b)` in `P2 x P2`.
pub fn p2p2_divisor_kcube(a: i64, b: i64) -> i64 {
    let (x, y) = (3 - a, 3 - b);
    // (x H1 + y H2)^3 (a H1 + b H2) with H1^2 H2^2 = 1.
    3 * x * x * y * b + 3 * x * y * y * a
}

fn tag_int(table: &ReferenceTable, name: &str, tag: &str) -> Result<i64, BoundsError> {
    table
        .get(name)?
        .tag_int(tag)
        .ok_or_else(|| BoundsError::MissingTag { name: name.to_string(), tag: tag.to_string() })
}

fn bidegree(table: &ReferenceTable, name: &str) -> Result<(i64, i64), BoundsError> {
    let missing = || BoundsError::MissingTag { name: name.to_string(), tag: "bidegree".into() };
    let v = table.get(name)?.tag_value("bidegree").ok_or_else(missing)?;
    let (a, b) = v.split_once('x').ok_or_else(missing)?;
    Ok((a.parse().map_err(|_| missing())?, b.parse().map_err(|_| missing())?))
}

/// Rank bound for plane-free threefolds with `(-K)^3 = 24`.
pub fn prop24_certify(table: &ReferenceTable) -> Result<Prop24Report, BoundsError> {
    let kcube = Rational::integer(24);
    let mut ledger = Ledger::new("rank bound at (-K)^3 = 24");
    let (a, b) = bidegree(table, "Y21")?;
    let y21 = p2p2_divisor_kcube(a, b);
    ledger.check(Step::new(
        "(-K)^3 of the (2,1) divisor recomputed",
        y21,
        Relation::Eq,
        table.get("Y21")?.kcube.clone(),
    ))?;
    let inputs: [(&str, Rational, i64, i64); 4] = [
        ("Q", table.get("Q")?.kcube.clone(), 1, tag_int(table, "Q", "rcap")?),
        ("V6", table.get("V6")?.kcube.clone(), 1, tag_int(table, "V6", "rcap")?),
        ("Y21", Rational::integer(y21), 0, tag_int(table, "Y21", "rcap")?),
        ("P1xP1xP1", table.get("P1xP1xP1")?.kcube.clone(), 1, tag_int(table, "P1xP1xP1", "rcap")?),
    ];
    let mut rows = Vec::new();
    for (name, target_kcube, pa, cap) in inputs {
        // (-K_Y)^3 = (-K_X)^3 + 2 (-K)^2.E + 2 p_a - 2.
        let ksq_e = (&target_kcube - &kcube - Rational::integer(2 * pa - 2)) / 2;
        ledger.check(Step::new(
            format!("{name}: (-K)^3 jump equals 2(-K)^2.E + 2pa - 2"),
            &target_kcube - &kcube,
            Relation::Eq,
            degree_drop(&ksq_e, pa),
        ))?;
        let components = max_components(&ksq_e)?;
        rows.push(Prop24Row {
            target: name.to_string(),
            target_kcube,
            pa,
            ksq_e,
            rank_cap: cap,
            components,
            contribution: cap + components,
        });
    }
    let y21_row = &rows[2];
    let disc = tag_int(table, "Y21", "disc-degree")?;
    ledger.check(Step::new("Y21 cap: r(P2) + 1 + deg(discriminant)", 1 + 1 + disc, Relation::Eq, y21_row.rank_cap))?;
    let non_blowup = 1 + 1 + tag_int(table, "MM2-18", "disc-degree")?;
    let branches = vec![
        ("rank one".to_string(), tag_int(table, "V3", "rcap")?),
        ("non-blowup (MM2-18)".to_string(), non_blowup),
        ("product".to_string(), tag_int(table, "MM5-products", "rcap")?),
    ];
    let bound = rows.iter().map(|r| r.contribution).chain(branches.iter().map(|b| b.1)).max().unwrap_or(0);
    for r in &rows {
        ledger.check(Step::new(
            format!("{}: r <= {} + {}", r.target, r.rank_cap, r.components),
            r.contribution,
            Relation::Le,
            bound,
        ))?;
    }
    for (name, v) in &branches {
        ledger.check(Step::new(format!("{name}: r <= {v}"), *v, Relation::Le, bound))?;
    }
    ledger.conclusion = format!("r <= {bound}");
    Ok(Prop24Report { rows, branches, ledger, bound })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Le10Report {
    pub ledger: Ledger,
    pub degree24: Prop24Report,
    pub bound: i64,
}

/// `22 + (2d - 2) N`, the least `(-K)^3` after `N` steps contracting surfaces of degree `>= d`.
pub fn chain_value(d: i64, n: i64) -> Rational {
    Rational::integer(22) + MmpStep::min_delta(d) * n
}

/// Rank bound for plane-free genus-12 threefolds, assuming `r >= 11` and deriving a contradiction
/// unless the first contracted surface has degree 2.
pub fn le10_certify(table: &ReferenceTable) -> Result<Le10Report, BoundsError> {
    let mut ledger = Ledger::new("rank bound for plane-free genus 12");
    let r = 11;
    let endpoints: Vec<_> = table.endpoints().collect();
    let max_rho = 3;
    let n_min = r - max_rho;
    ledger.check(Step::new("N >= r - rho(X_N) with rho(X_N) <= 3", n_min, Relation::Ge, 8))?;
    let d = 3;
    let v = chain_value(d, n_min);
    ledger.check(Step::new("d >= 3: (-K_N)^3 >= 22 + (2d-2)N", v.clone(), Relation::Ge, 54))?;

    let at54: Vec<_> = endpoints.iter().filter(|e| e.kcube == 54).collect();
    let rho54 = at54.iter().map(|e| e.rho).max().unwrap_or(0) as i64;
    ledger.check(Step::new("endpoints with (-K)^3 = 54 have rho", rho54, Relation::Le, 2))?;
    let v54 = chain_value(d, r - rho54);
    ledger.check(Step::new("(-K_N)^3 = 54 forces N >= 9, so (-K_N)^3 >=", v54.clone(), Relation::Gt, 54))?;

    let above: Vec<_> = endpoints.iter().filter(|e| e.kcube > 54).collect();
    ledger.check(Step::new("endpoints with (-K)^3 > 54", above.len() as i64, Relation::Eq, 1))?;
    let top = above[0];
    let top_kcube = top.kcube.clone();
    let n_top = r - top.rho as i64;
    ledger.check(Step::new(format!("X_N = {}: N >= r - 1", top.name), n_top, Relation::Eq, 10))?;
    ledger.check(Step::new("22 + 4 N <= (-K_N)^3", chain_value(3, n_top), Relation::Le, top_kcube.clone()))?;
    ledger.check(Step::new("22 + 6 N exceeds (-K_N)^3, so d = 3", chain_value(4, n_top), Relation::Gt, top_kcube))?;

    let pen = chain_value(3, n_top - 1);
    ledger.check(Step::new("(-K_{N-1})^3 >= 22 + 4(N-1)", pen.clone(), Relation::Ge, 58))?;
    let candidates: Vec<_> = table.entries.values().filter(|e| e.rho == 2 && e.kcube >= pen).collect();
    ledger.check(Step::new("rho 2 smooth types with (-K)^3 >= 58", candidates.len() as i64, Relation::Eq, 1))?;
    let planar = candidates.iter().filter(|e| e.has_tag("contains-plane")).count();
    ledger.check(Step::new(format!("{} contains a plane", candidates[0].name), planar as i64, Relation::Eq, 1))?;

    // d = 2: the first step contracts a quadric surface onto a point or a smooth rational curve.
    let e1 = MmpStep::e1(2.into(), 0);
    let e34 = MmpStep::e34();
    ledger.check(Step::new("d = 2, e1 with pa 0: (-K_1)^3", Rational::integer(22) + &e1.delta, Relation::Eq, 24))?;
    ledger.check(Step::new("d = 2, e3-4: (-K_1)^3", Rational::integer(22) + &e34.delta, Relation::Eq, 24))?;
    let degree24 = prop24_certify(table)?;
    let bound = degree24.bound + 1;
    ledger.check(Step::new("r(X) = r(X_1) + 1", bound, Relation::Le, 10))?;
    ledger.conclusion = format!("r <= {bound}");
    Ok(Le10Report { ledger, degree24, bound })
}

/// Steps showing that some surface has degree prime to 11 once `r > 2`.
pub fn surface_degree_ledger(table: &ReferenceTable) -> Result<Ledger, BoundsError> {
    let mut ledger = Ledger::new("a surface of degree prime to 11 exists when r > 2");
    // Every contracted surface has degree >= 11, so every step is a curve blowup.
    let min_deg = 11;
    ledger.check(Step::new("point blowups contract surfaces of degree <=", 4, Relation::Lt, min_deg))?;
    let step = MmpStep::min_delta(min_deg);
    ledger.check(Step::new("each step raises (-K)^3 by at least", step.clone(), Relation::Eq, 20))?;

    let p3 = table.get("P3")?;
    let n = ((&p3.kcube - 22) / &step).floor().to_i64().expect("integral");
    ledger.check(Step::new("rho(X_N) = 1: 64 >= 22 + 20 N gives N <=", n, Relation::Eq, 2))?;
    // The last step blows up a curve in P3; (-K)^2.E = 4 deg B + 2 - 2 pa is even and >= 11.
    let ksq_e = 12;
    ledger.check(Step::new("(-K)^2.E even and >= 11", ksq_e, Relation::Ge, min_deg))?;
    let room = &p3.kcube - 22;
    let first = Rational::integer(20);
    let pa = 0;
    let need = &first + degree_drop(&Rational::integer(ksq_e), pa);
    ledger.check(Step::new("64 - 22 >= 20 + 2(-K)^2.E + 2pa - 2", room.clone(), Relation::Ge, need.clone()))?;
    ledger.check(Step::new("the bound is attained: pa = 0, (-K)^2.E = 12", room, Relation::Eq, need))?;
    let kb = ksq_e - 2 + 2 * pa;
    ledger.check(Step::new("-K_P3 . B = 10 mod 4", kb % 4, Relation::Ne, 0))?;

    // rho(X_N) >= 2: a conic bundle over P2 with index 2, so degrees are even and E is divisible by 22.
    let lower = Rational::integer(22) + degree_drop(&Rational::integer(22), 0);
    ledger.check(Step::new("rho >= 2: (-K)^2.E = 0 mod 22 forces (-K_N)^3 >=", lower.clone(), Relation::Eq, 64))?;
    let index2 = table
        .entries
        .values()
        .filter(|e| e.rho >= 2 && e.tag_int("iota") == Some(2))
        .map(|e| e.kcube.clone())
        .max()
        .unwrap_or_else(Rational::zero);
    ledger.check(Step::new(
        "largest (-K)^3 of index 2, rho >= 2, no birational contraction",
        index2,
        Relation::Lt,
        lower,
    ))?;
    ledger.conclusion = "every branch is contradictory".into();
    Ok(ledger)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OrbitVerdict {
    DivisibleBy11 {
        surface_degree: i64,
        /// Least orbit size `n` with `n d = 0 mod 22`.
        min_orbit: i64,
        n_mod: i64,
        m_mod: i64,
        rank_lower_bound: i64,
    },
    NoConclusion {
        surface_degree: i64,
        reason: String,
    },
}

/// Orbit of a surface of degree `d` summing to a multiple of `-K`: `n d = 22 a`.
pub fn orbit_divisibility(surface_degree: i64) -> Result<OrbitVerdict, BoundsError> {
    if surface_degree < 1 {
        return Err(BoundsError::InvalidSurfaceDegree(surface_degree));
    }
    if surface_degree.gcd(&11) != 1 {
        return Ok(OrbitVerdict::NoConclusion { surface_degree, reason: format!("11 divides {surface_degree}") });
    }
    Ok(OrbitVerdict::DivisibleBy11 {
        surface_degree,
        min_orbit: 22 / surface_degree.gcd(&22),
        n_mod: 11,
        m_mod: 11,
        rank_lower_bound: ORBIT_RANK,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum HigherRank {
    Contradiction { lower: i64, upper: i64 },
    NoConclusion { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MainVerdict {
    pub higher_rank: HigherRank,
    /// Realized link with bases of equal dimension.
    pub rank_two: Vec<LinkRow>,
    pub le10: Option<Ledger>,
    pub surface_degree: Ledger,
}

fn base_dimension(base: &str) -> u32 {
    match base {
        "P1" => 1,
        "P2" => 2,
        _ => 3,
    }
}

/// Combines the orbit bound with the plane-free rank bound. With `planes_allowed`
/// the rank bound does not apply.
pub fn main_theorem_verdict(
    genus: i64,
    planes_allowed: bool,
    table: &ReferenceTable,
) -> Result<MainVerdict, BoundsError> {
    if genus != 12 {
        return Err(BoundsError::UnsupportedGenus(genus));
    }
    let surface_degree = surface_degree_ledger(table)?;
    let orbit = orbit_divisibility(2)?;
    let lower = match orbit {
        OrbitVerdict::DivisibleBy11 { rank_lower_bound, .. } => rank_lower_bound,
        OrbitVerdict::NoConclusion { .. } => unreachable!("2 is prime to 11"),
    };
    let (higher_rank, le10) = if planes_allowed {
        (HigherRank::NoConclusion { reason: "the rank bound needs a plane-free threefold".into() }, None)
    } else {
        let r = le10_certify(table)?;
        let verdict = if lower > r.bound {
            HigherRank::Contradiction { lower, upper: r.bound }
        } else {
            HigherRank::NoConclusion { reason: format!("{lower} <= {}", r.bound) }
        };
        (verdict, Some(r.ledger))
    };
    let links = enumerate::enumerate_links(genus, 2, table, &SolveOptions::default())?;
    let rank_two = links
        .realized()
        .into_iter()
        .filter(|row| base_dimension(&row.left.base) == base_dimension(&row.right.base))
        .cloned()
        .collect();
    Ok(MainVerdict { higher_rank, rank_two, le10, surface_degree })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components() {
        assert_eq!(max_components(&15.into()).unwrap(), 7);
        assert_eq!(max_components(&2.into()).unwrap(), 1);
        assert_eq!(max_components(&4.into()).unwrap(), 2);
        assert!(max_components(&0.into()).is_err());
    }

    #[test]
    fn prop24() {
        let r = prop24_certify(&ReferenceTable::bundled()).unwrap();
        let ksq: Vec<i64> = r.rows.iter().map(|x| x.ksq_e.to_i64().unwrap()).collect();
        assert_eq!(ksq, vec![15, 12, 4, 12]);
        assert_eq!(r.rows[0].contribution, 9);
        assert_eq!(r.rows[2].contribution, 7);
        assert_eq!(r.bound, 9);
        r.ledger.verify().unwrap();
    }

    #[test]
    fn le10() {
        assert_eq!(chain_value(3, 8), 54);
        let r = le10_certify(&ReferenceTable::bundled()).unwrap();
        assert_eq!(r.bound, 10);
        r.ledger.verify().unwrap();
    }

    #[test]
    fn surface_degree() {
        surface_degree_ledger(&ReferenceTable::bundled()).unwrap().verify().unwrap();
    }

    #[test]
    fn orbits() {
        assert!(matches!(orbit_divisibility(2).unwrap(), OrbitVerdict::DivisibleBy11 { min_orbit: 11, .. }));
        assert!(matches!(orbit_divisibility(22).unwrap(), OrbitVerdict::NoConclusion { .. }));
        assert!(matches!(orbit_divisibility(10).unwrap(), OrbitVerdict::DivisibleBy11 { .. }));
        assert!(orbit_divisibility(0).is_err());
    }

    #[test]
    fn verdict() {
        let t = ReferenceTable::bundled();
        let v = main_theorem_verdict(12, false, &t).unwrap();
        assert_eq!(v.higher_rank, HigherRank::Contradiction { lower: 11, upper: 10 });
        assert_eq!(v.rank_two.len(), 1);
        assert_eq!(v.rank_two[0].label, "I");
        assert!(matches!(main_theorem_verdict(12, true, &t).unwrap().higher_rank, HigherRank::NoConclusion { .. }));
        assert_eq!(main_theorem_verdict(10, false, &t).unwrap_err(), BoundsError::UnsupportedGenus(10));
    }
}
