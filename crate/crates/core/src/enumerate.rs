//! Two-ray link enumeration through a genus-12 midpoint.
//!
//! Every unordered pair of extremal contraction kinds becomes one or more
//! cells of a ledger. Each cell is either realized (and then matches one of
//! four known links) or excluded by a named rule with its supporting numbers.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dplattice::bundle_normalizations;
use crate::icalc::{
    blowup_identities, curve_blowup_ring, eval_trilinear, point_blowup_case, projbundle_ring, ChernData, CurveData,
    DivisorClass, IcalcError, IntersectionRing3, PointBlowupKind, PolarizedFano,
};
use crate::linkeq::{self, LinkEqError, SolutionReport, SolveOptions};
use crate::rational::Rational;
use crate::reftable::{RefTableError, ReferenceTable};

/// Possible del Pezzo fiber degrees of a del Pezzo fibration.
pub const FIBER_DEGREES: [u32; 8] = [1, 2, 3, 4, 5, 6, 8, 9];
/// Discriminant degrees of conic bundles over the plane with `(-K)^2 . F > 0`.
pub const MAX_DISCRIMINANT_DEGREE: u32 = 11;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumerateError {
    #[error("enumeration is only implemented for genus 12, got {0}")]
    UnsupportedGenus(i64),
    #[error("enumeration is only implemented for class-group rank 2, got {0}")]
    UnsupportedRank(u32),
    #[error("Castelnuovo bound needs n >= 2 and d >= 1, got d = {d}, n = {n}")]
    InvalidAmbient { d: i64, n: i64 },
    #[error(transparent)]
    Reference(#[from] RefTableError),
    #[error(transparent)]
    Icalc(#[from] IcalcError),
    #[error(transparent)]
    LinkEq(#[from] LinkEqError),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
}

/// Maximal arithmetic genus of a nondegenerate curve of degree `d` in `P^n`.
pub fn castelnuovo_bound(d: i64, n: i64) -> Result<i64, EnumerateError> {
    if n < 2 || d < 1 {
        return Err(EnumerateError::InvalidAmbient { d, n });
    }
    let m = (d - 1) / (n - 1);
    let eps = d - 1 - m * (n - 1);
    Ok(m * (m - 1) / 2 * (n - 1) + m * eps)
}

/// Rank-one Fano threefolds of index at least two that can be the target of a
/// curve blowup from the midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum E1Target {
    P3,
    Q,
    #[serde(rename = "dP4")]
    DP4,
    #[serde(rename = "dP5")]
    DP5,
}

impl E1Target {
    pub const ALL: [E1Target; 4] = [E1Target::P3, E1Target::Q, E1Target::DP4, E1Target::DP5];

    pub fn name(self) -> &'static str {
        match self {
            E1Target::P3 => "P3",
            E1Target::Q => "Q",
            E1Target::DP4 => "dP4",
            E1Target::DP5 => "dP5",
        }
    }

    /// Name of the corresponding reference-table entry.
    pub fn reference_name(self) -> &'static str {
        match self {
            E1Target::P3 => "P3",
            E1Target::Q => "Q",
            E1Target::DP4 => "V4",
            E1Target::DP5 => "V5",
        }
    }

    pub fn polarized(self) -> PolarizedFano {
        match self {
            E1Target::P3 => PolarizedFano::p3(),
            E1Target::Q => PolarizedFano::quadric(),
            E1Target::DP4 => PolarizedFano::del_pezzo(4),
            E1Target::DP5 => PolarizedFano::del_pezzo(5),
        }
    }
}

impl fmt::Display for E1Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One side of a two-ray link. `None` parameters mean "any value".
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum Contraction {
    #[serde(rename = "e1")]
    E1 { target: Option<E1Target>, k: Option<u32> },
    #[serde(rename = "e2")]
    E2,
    #[serde(rename = "e3-4")]
    E34,
    #[serde(rename = "e5")]
    E5,
    #[serde(rename = "c")]
    Conic { deg_delta: Option<u32> },
    #[serde(rename = "d")]
    DelPezzo { fiber_sq: Option<u32> },
}

impl Contraction {
    pub fn tag(&self) -> &'static str {
        match self {
            Contraction::E1 { .. } => "e1",
            Contraction::E2 => "e2",
            Contraction::E34 => "e3-4",
            Contraction::E5 => "e5",
            Contraction::Conic { .. } => "c",
            Contraction::DelPezzo { .. } => "d",
        }
    }

    /// Length: least anticanonical degree of a contracted curve. `None` when it depends
    /// on an unspecified parameter.
    pub fn mu(&self) -> Option<u32> {
        match self {
            Contraction::E2 => Some(2),
            Contraction::Conic { deg_delta: Some(0) } => Some(2),
            Contraction::Conic { deg_delta: Some(_) } => Some(1),
            Contraction::DelPezzo { fiber_sq: Some(8) } => Some(2),
            Contraction::DelPezzo { fiber_sq: Some(9) } => Some(3),
            Contraction::DelPezzo { fiber_sq: Some(_) } => Some(1),
            Contraction::E1 { .. } | Contraction::E34 | Contraction::E5 => Some(1),
            Contraction::Conic { deg_delta: None } | Contraction::DelPezzo { fiber_sq: None } => None,
        }
    }

    pub fn any_e1() -> Self {
        Contraction::E1 { target: None, k: None }
    }

    pub fn any_conic() -> Self {
        Contraction::Conic { deg_delta: None }
    }

    pub fn any_del_pezzo() -> Self {
        Contraction::DelPezzo { fiber_sq: None }
    }

    pub fn params(&self) -> BTreeMap<String, Value> {
        let mut p = BTreeMap::new();
        match self {
            Contraction::E1 { target, k } => {
                if let Some(t) = target {
                    p.insert("target".into(), json!(t.name()));
                }
                if let Some(k) = k {
                    p.insert("k".into(), json!(k));
                }
            }
            Contraction::Conic { deg_delta: Some(d) } => {
                p.insert("deg_delta".into(), json!(d));
            }
            Contraction::DelPezzo { fiber_sq: Some(d) } => {
                p.insert("fiber_sq".into(), json!(d));
            }
            _ => {}
        }
        p
    }

    fn sort_key(&self) -> (String, i64, i64) {
        match self {
            Contraction::E1 { target, k } => {
                (self.tag().to_string(), target.map(|t| t as i64).unwrap_or(-1), k.map(|k| k as i64).unwrap_or(-1))
            }
            Contraction::Conic { deg_delta } => (self.tag().to_string(), deg_delta.map(|d| d as i64).unwrap_or(-1), 0),
            Contraction::DelPezzo { fiber_sq } => (self.tag().to_string(), fiber_sq.map(|d| d as i64).unwrap_or(-1), 0),
            _ => (self.tag().to_string(), 0, 0),
        }
    }
}

impl fmt::Display for Contraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Contraction::E1 { target: Some(t), k: Some(k) } => write!(f, "e1({t},k={k})"),
            Contraction::E1 { target: Some(t), k: None } => write!(f, "e1({t})"),
            Contraction::E1 { .. } => write!(f, "e1(*)"),
            Contraction::Conic { deg_delta: Some(d) } => write!(f, "c(deg={d})"),
            Contraction::Conic { deg_delta: None } => write!(f, "c(*)"),
            Contraction::DelPezzo { fiber_sq: Some(d) } => write!(f, "d({d})"),
            Contraction::DelPezzo { fiber_sq: None } => write!(f, "d(*)"),
            other => f.write_str(other.tag()),
        }
    }
}

/// A named exclusion rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rule {
    pub name: &'static str,
    pub statement: &'static str,
}

pub const R_INDEX: Rule = Rule {
    name: "R-INDEX",
    statement: "a rank-one target with (-K)^3 > 22 has index iota >= 2, and iota^3 must divide (-K)^3",
};
pub const R_TABLE: Rule = Rule {
    name: "R-TABLE",
    statement: "the blowup is a reference-table Fano threefold without the required small contraction",
};
pub const R_CAST: Rule = Rule {
    name: "R-CAST",
    statement: "arithmetic genus exceeds the Castelnuovo bound for a nondegenerate curve in the forced ambient space",
};
pub const R_CUBIC_CAP: Rule = Rule {
    name: "R-CUBIC-CAP",
    statement: "curve lies in a hyperplane, is cut out by cubics there, so has degree at most 6; degree 6 forces a (2,3) complete intersection of the wrong genus",
};
pub const R_SECANT_SPAN: Rule = Rule {
    name: "R-SECANT-SPAN",
    statement: "curve cut out by quadrics spans at least a P4; a P4 span forces an elliptic quintic, larger spans violate Castelnuovo",
};
pub const R_E5: Rule = Rule {
    name: "R-E5",
    statement: "half-point contraction: the link equation 11a^2 - ab - b^2 = delta has no admissible solution",
};
pub const R_CC: Rule =
    Rule { name: "R-CC", statement: "two conic bundles: the link equation has no admissible solution" };
pub const R_DISC_LINE: Rule = Rule {
    name: "R-DISC-LINE",
    statement: "the only solution makes the discriminant a line, whose preimage is reducible",
};
pub const R_CD: Rule = Rule {
    name: "R-CD",
    statement: "conic bundle against del Pezzo fibration: the homogeneous link equation has no positive rational ray",
};
pub const R_FIBER_FORCED: Rule =
    Rule { name: "R-FIBER-FORCED", statement: "the link equation fixes the right fiber degree to a different value" };
pub const R_DD: Rule = Rule {
    name: "R-DD",
    statement: "two del Pezzo fibrations: the right fiber degree would be a positive multiple of 11",
};
pub const R_PARTNER: Rule = Rule {
    name: "R-PARTNER",
    statement: "flop-invariant intersection numbers determine the other side, and it is of a different kind",
};

pub const RULES: [Rule; 12] = [
    R_INDEX,
    R_TABLE,
    R_CAST,
    R_CUBIC_CAP,
    R_SECANT_SPAN,
    R_E5,
    R_CC,
    R_DISC_LINE,
    R_CD,
    R_FIBER_FORCED,
    R_DD,
    R_PARTNER,
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CandidateStatus {
    Survived,
    Excluded { rule: String, detail: String },
}

/// A blowup of a curve on a rank-one target, parametrized by `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Candidate {
    pub target: E1Target,
    pub k: u32,
    pub pa: i64,
    pub h_degree: i64,
    pub ksq_e: Rational,
    pub status: CandidateStatus,
}

impl E1Candidate {
    pub fn curve(&self) -> CurveData {
        CurveData { h_degree: self.h_degree as u32, pa: self.pa }
    }

    pub fn ring(&self) -> Result<IntersectionRing3, IcalcError> {
        curve_blowup_ring(&self.target.polarized(), &self.curve())
    }

    pub fn survived(&self) -> bool {
        self.status == CandidateStatus::Survived
    }

    /// Both blowup relations at `(-K_Y)^3 = kcube_y`.
    pub fn satisfies_relations(&self, kcube_y: &Rational) -> bool {
        let base = self.target.polarized();
        let iota = base.iota() as i64;
        let kz = &base.invariants.kcube;
        let first = kcube_y + &self.ksq_e * 2 + Rational::integer(2 * self.pa - 2) == *kz;
        let second = kcube_y + Rational::integer(2 * iota * self.h_degree - 2 * self.pa + 2) == *kz;
        first && second
    }
}

/// Every curve blowup `Y -> Z` with `(-K_Y)^3 = 22`, `p_a >= 0` and `(-K_Y)^2 . E > 0`.
pub fn e1_candidates(genus: i64) -> Result<Vec<E1Candidate>, EnumerateError> {
    if genus != 12 {
        return Err(EnumerateError::UnsupportedGenus(genus));
    }
    let kcube_y = Rational::integer(2 * genus - 2);
    let mut out = Vec::new();
    for target in E1Target::ALL {
        let base = target.polarized();
        let iota = base.iota() as i64;
        let kz = &base.invariants.kcube;
        // Second relation: p_a = iota deg + (kcube_y + 2 - kz) / 2.
        let offset = (&kcube_y + 2 - kz) / 2;
        let offset = offset.to_i64().ok_or_else(|| EnumerateError::Inconsistent("odd degree offset".into()))?;
        let mut deg0 = None;
        for deg in 1.. {
            let pa = iota * deg + offset;
            if pa < 0 {
                continue;
            }
            let deg0 = *deg0.get_or_insert(deg);
            let nums = blowup_identities(kz, &Rational::integer(-iota * deg), pa);
            if nums.kcube != kcube_y {
                return Err(EnumerateError::Inconsistent(format!("{target} deg {deg} gives {}", nums.kcube)));
            }
            if !nums.ksq_e.is_positive() {
                break;
            }
            out.push(E1Candidate {
                target,
                k: (deg - deg0) as u32,
                pa,
                h_degree: deg,
                ksq_e: nums.ksq_e,
                status: CandidateStatus::Survived,
            });
        }
    }
    Ok(out)
}

/// Applies the exclusion rules in order; the first one that fires is recorded.
pub fn filter_e1(cands: &[E1Candidate], table: &ReferenceTable) -> Result<Vec<E1Candidate>, EnumerateError> {
    let mut out = Vec::with_capacity(cands.len());
    for c in cands {
        let mut c = c.clone();
        c.status = classify_e1(&c, table)?;
        out.push(c);
    }
    Ok(out)
}

fn excluded(rule: Rule, detail: String) -> CandidateStatus {
    CandidateStatus::Excluded { rule: rule.name.to_string(), detail }
}

fn classify_e1(c: &E1Candidate, table: &ReferenceTable) -> Result<CandidateStatus, EnumerateError> {
    let key = format!("e1-{}-k{}", c.target.name(), c.k);
    if let Some(entry) = table.excluder(&key) {
        let kcube = c.ring()?.kcube();
        if kcube != entry.kcube {
            return Err(EnumerateError::Inconsistent(format!(
                "{key}: blowup has (-K)^3 = {kcube} but {} has {}",
                entry.name, entry.kcube
            )));
        }
        return Ok(excluded(R_TABLE, format!("{} ((-K)^3 = {})", entry.name, entry.kcube)));
    }
    if c.k == 0 {
        return Ok(CandidateStatus::Survived);
    }
    let (deg, pa) = (c.h_degree, c.pa);
    match c.target {
        E1Target::P3 => {
            let bound = castelnuovo_bound(deg, 3)?;
            if pa > bound {
                return Ok(excluded(R_CAST, format!("pi({deg},3) = {bound} < pa = {pa}")));
            }
        }
        E1Target::Q => {
            let bound4 = castelnuovo_bound(deg, 4)?;
            if pa <= bound4 {
                return Ok(CandidateStatus::Survived);
            }
            if deg > 6 {
                return Ok(excluded(
                    R_CUBIC_CAP,
                    format!("pi({deg},4) = {bound4} < pa = {pa}, so degenerate; degree {deg} > 6"),
                ));
            }
            if deg == 6 {
                let ci = complete_intersection_genus(2, 3);
                if ci != pa {
                    return Ok(excluded(
                        R_CUBIC_CAP,
                        format!("pi(6,4) = {bound4} < pa = {pa}, so degenerate; degree 6 forces genus {ci} != {pa}"),
                    ));
                }
            }
        }
        E1Target::DP4 | E1Target::DP5 => {
            let d = c.target.polarized().hcube.to_i64().expect("integral degree");
            let mut spans = Vec::new();
            for s in 4..=(d + 1) {
                let possible =
                    if s == 4 { deg == 5 && d == 5 && pa == 1 } else { deg >= s && pa <= castelnuovo_bound(deg, s)? };
                if possible {
                    return Ok(CandidateStatus::Survived);
                }
                if s >= 5 && deg >= s {
                    spans.push(format!("pi({deg},{s}) = {}", castelnuovo_bound(deg, s)?));
                }
            }
            let detail = if spans.is_empty() {
                format!("no span of dimension 4..{} fits degree {deg}, pa {pa}", d + 1)
            } else {
                format!("{} < pa = {pa}", spans.join(", "))
            };
            return Ok(excluded(R_SECANT_SPAN, detail));
        }
    }
    Ok(CandidateStatus::Survived)
}

/// Arithmetic genus of a complete intersection of surfaces of degrees `a`, `b` in `P^3`.
pub fn complete_intersection_genus(a: i64, b: i64) -> i64 {
    1 + a * b * (a + b - 4) / 2
}

/// `(-K_Y)^2 . (a H* - b E)` on the ring of the candidate.
pub fn irreducibility_degree_test(a: i64, b: i64, left: &E1Candidate) -> Result<Rational, EnumerateError> {
    let ring = left.ring()?;
    let k = ring.anticanonical();
    Ok(eval_trilinear(&ring, &k, &k, &DivisorClass::int(a, -b)))
}

/// Structured description of one side of a realized link.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Side {
    /// Base of the contraction: `P3`, `Q`, `V5`, `P2` or `P1`.
    pub base: String,
    pub kind: String,
    pub curve_degree: Option<i64>,
    pub pa: Option<i64>,
    pub deg_delta: Option<i64>,
    pub fiber_degree: Option<i64>,
    pub chern: Option<(i64, i64)>,
}

impl Side {
    fn blank(base: &str, kind: &str) -> Self {
        Side {
            base: base.into(),
            kind: kind.into(),
            curve_degree: None,
            pa: None,
            deg_delta: None,
            fiber_degree: None,
            chern: None,
        }
    }

    pub fn curve_blowup(base: &str, degree: i64, pa: i64) -> Self {
        Side { curve_degree: Some(degree), pa: Some(pa), ..Self::blank(base, "e1") }
    }

    pub fn conic_bundle(deg_delta: i64) -> Self {
        Side { deg_delta: Some(deg_delta), ..Self::blank("P2", "c") }
    }

    pub fn projective_bundle(c1sq: i64, c2: i64) -> Self {
        Side { deg_delta: Some(0), chern: Some((c1sq, c2)), ..Self::blank("P2", "c") }
    }

    pub fn del_pezzo(fiber_degree: i64) -> Self {
        Side { fiber_degree: Some(fiber_degree), ..Self::blank("P1", "d") }
    }

    pub fn describe(&self) -> String {
        match (self.kind.as_str(), self.chern) {
            ("e1", _) => format!(
                "blowup of a curve of degree {} and arithmetic genus {}",
                self.curve_degree.unwrap_or(0),
                self.pa.unwrap_or(0)
            ),
            ("c", Some((c1sq, c2))) => format!("P1-bundle P(E) with c1^2 = {c1sq}, c2 = {c2}"),
            ("c", None) => format!("conic bundle with discriminant of degree {}", self.deg_delta.unwrap_or(0)),
            ("d", _) => format!("del Pezzo fibration of degree {}", self.fiber_degree.unwrap_or(0)),
            (k, _) => k.to_string(),
        }
    }
}

/// One realized link.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkRow {
    pub label: String,
    pub left: Side,
    pub right: Side,
}

pub const TSV_HEADER: &str = "row\tZ\tf\tZ+\tf+";

impl LinkRow {
    pub fn tsv_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.label,
            self.left.base,
            self.left.describe(),
            self.right.base,
            self.right.describe()
        )
    }
}

/// Right-hand side of a link whose left side is a surviving curve blowup,
/// read off from the numbers of `S = (iota - 1) H* - E = -K - H*`, which are
/// preserved by the flop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RightSide {
    /// `(-K) . S^2`.
    pub k_s2: Rational,
    /// `(-K)^2 . S`.
    pub k2_s: Rational,
    pub contraction: Contraction,
    pub side: Side,
}

pub fn right_side_invariants(left: &E1Candidate, table: &ReferenceTable) -> Result<RightSide, EnumerateError> {
    let ring = left.ring()?;
    let iota = left.target.polarized().iota() as i64;
    let k = ring.anticanonical();
    let s = DivisorClass::int(iota - 1, -1);
    let k_s2 = eval_trilinear(&ring, &k, &s, &s);
    let k2_s = eval_trilinear(&ring, &k, &k, &s);
    let int = |x: &Rational| x.to_i64().ok_or_else(|| EnumerateError::Inconsistent(format!("non-integral {x}")));
    if k_s2.is_zero() {
        // Fibers over P1: the fiber degree is (-K)^2 . F.
        let d = int(&k2_s)?;
        return Ok(RightSide {
            contraction: Contraction::DelPezzo { fiber_sq: Some(d as u32) },
            side: Side::del_pezzo(d),
            k_s2,
            k2_s,
        });
    }
    if k_s2 == 2 {
        // Pull-back of a line in P2: (-K)^2 . F = 12 - deg(discriminant).
        let deg = 12 - int(&k2_s)?;
        return Ok(RightSide {
            contraction: Contraction::Conic { deg_delta: Some(deg as u32) },
            side: Side::conic_bundle(deg),
            k_s2,
            k2_s,
        });
    }
    // Pull-back of the ample generator of a rank-one target:
    // (-K) . S^2 = iota H^3 and (-K)^2 . S = iota^2 H^3 - deg B.
    for target in E1Target::ALL {
        let base = target.polarized();
        let entry = table.get(target.reference_name())?;
        if entry.kcube != base.invariants.kcube {
            return Err(EnumerateError::Inconsistent(format!("{} kcube mismatch", entry.name)));
        }
        let i = base.iota() as i64;
        if &base.hcube * i != k_s2 {
            continue;
        }
        let deg = int(&(&base.hcube * (i * i) - &k2_s))?;
        // (-K_Y)^3 = kz - 2 iota deg + 2 pa - 2.
        let pa2 = ring.kcube() - &base.invariants.kcube + Rational::integer(2 * i * deg + 2);
        let pa = int(&(pa2 / 2))?;
        let k_param = deg - first_degree(target)?;
        return Ok(RightSide {
            contraction: Contraction::E1 { target: Some(target), k: Some(k_param as u32) },
            side: Side::curve_blowup(entry.name.as_str(), deg, pa),
            k_s2,
            k2_s,
        });
    }
    Err(EnumerateError::Inconsistent(format!("no target matches (-K).S^2 = {k_s2}")))
}

fn first_degree(target: E1Target) -> Result<i64, EnumerateError> {
    e1_candidates(12)?
        .into_iter()
        .find(|c| c.target == target && c.k == 0)
        .map(|c| c.h_degree)
        .ok_or_else(|| EnumerateError::Inconsistent(format!("no k = 0 candidate for {target}")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum LinkStatus {
    Realized { row: LinkRow },
    Excluded { rule: String, reason: String },
}

/// One cell of the case grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkCandidate {
    pub left: Contraction,
    pub right: Contraction,
    pub status: LinkStatus,
    pub solution: Option<SolutionReport>,
}

impl LinkCandidate {
    fn excluded(left: Contraction, right: Contraction, rule: Rule, reason: impl Into<String>) -> Self {
        LinkCandidate {
            left,
            right,
            status: LinkStatus::Excluded { rule: rule.name.to_string(), reason: reason.into() },
            solution: None,
        }
    }

    fn with_solution(mut self, report: SolutionReport) -> Self {
        self.solution = Some(report);
        self
    }

    pub fn is_realized(&self) -> bool {
        matches!(self.status, LinkStatus::Realized { .. })
    }

    pub fn rule(&self) -> Option<&str> {
        match &self.status {
            LinkStatus::Excluded { rule, .. } => Some(rule),
            LinkStatus::Realized { .. } => None,
        }
    }

    /// `{left, right, params, status, rule, reason, certificate?}`.
    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("left".into(), json!(self.left.to_string()));
        obj.insert("right".into(), json!(self.right.to_string()));
        obj.insert("params".into(), json!({ "left": self.left.params(), "right": self.right.params() }));
        match &self.status {
            LinkStatus::Realized { row } => {
                obj.insert("status".into(), json!("realized"));
                obj.insert("rule".into(), Value::Null);
                obj.insert("row".into(), serde_json::to_value(row).expect("row serializes"));
            }
            LinkStatus::Excluded { rule, reason } => {
                obj.insert("status".into(), json!("excluded"));
                obj.insert("rule".into(), json!(rule));
                obj.insert("reason".into(), json!(reason));
            }
        }
        if let Some(report) = &self.solution {
            obj.insert("certificate".into(), report.audit());
        }
        Value::Object(obj)
    }

    fn sort_key(&self) -> ((String, i64, i64), (String, i64, i64)) {
        (self.left.sort_key(), self.right.sort_key())
    }
}

/// The full case grid together with the curve-blowup candidate list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkLedger {
    pub genus: i64,
    pub cl_rank: u32,
    pub e1_candidates: Vec<E1Candidate>,
    pub cells: Vec<LinkCandidate>,
}

impl LinkLedger {
    pub fn realized(&self) -> Vec<&LinkRow> {
        let mut rows: Vec<&LinkRow> = self
            .cells
            .iter()
            .filter_map(|c| match &c.status {
                LinkStatus::Realized { row } => Some(row),
                _ => None,
            })
            .collect();
        rows.sort_by_key(|r| row_rank(&r.label));
        rows
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from(TSV_HEADER);
        out.push('\n');
        for row in self.realized() {
            out.push_str(&row.tsv_line());
            out.push('\n');
        }
        out
    }

    /// Full serde form plus a flat per-cell summary under `summary`.
    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("ledger serializes");
        let obj = v.as_object_mut().expect("ledger is an object");
        obj.insert("summary".into(), Value::Array(self.cells.iter().map(LinkCandidate::to_json).collect()));
        obj.insert(
            "realized".into(),
            Value::Array(self.realized().iter().map(|r| serde_json::to_value(r).expect("row serializes")).collect()),
        );
        v
    }

    /// Replays every attached certificate and checks the solution points.
    pub fn revalidate(&self) -> Result<(), String> {
        for c in &self.cells {
            let Some(report) = &c.solution else { continue };
            if let Some(cert) = report.certificate() {
                linkeq::verify_certificate(&report.form, cert).map_err(|e| format!("{} | {}: {e}", c.left, c.right))?;
            }
            for (a, b) in report.points() {
                if !report.form.is_solution(a, b) {
                    return Err(format!("{} | {}: ({a}, {b}) does not solve the form", c.left, c.right));
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.cells {
            let status = match &c.status {
                LinkStatus::Realized { row } => format!("realized (row {})", row.label),
                LinkStatus::Excluded { rule, reason } => format!("excluded [{rule}] {reason}"),
            };
            out.push_str(&format!("{:<18} | {:<14} | {}\n", c.left.to_string(), c.right.to_string(), status));
        }
        out.push('\n');
        for row in self.realized() {
            out.push_str(&format!("{}: {} | {}\n", row.label, row.left.describe(), row.right.describe()));
        }
        out
    }
}

fn row_rank(label: &str) -> usize {
    ["I", "II", "III", "IV"].iter().position(|l| *l == label).unwrap_or(usize::MAX)
}

fn birational_order() -> Vec<Contraction> {
    vec![Contraction::E2, Contraction::E34, Contraction::E5, Contraction::any_e1()]
}

fn right_kinds() -> Vec<Contraction> {
    let mut v = birational_order();
    v.push(Contraction::any_conic());
    v.push(Contraction::any_del_pezzo());
    v
}

fn label_for(left: &E1Candidate) -> &'static str {
    match left.target {
        E1Target::P3 => "I",
        E1Target::Q => "II",
        _ => "III",
    }
}

/// The classification ledger at genus `genus` and class-group rank `cl_rank`.
pub fn enumerate_links(
    genus: i64,
    cl_rank: u32,
    table: &ReferenceTable,
    opts: &SolveOptions,
) -> Result<LinkLedger, EnumerateError> {
    if genus != 12 {
        return Err(EnumerateError::UnsupportedGenus(genus));
    }
    if cl_rank != 2 {
        return Err(EnumerateError::UnsupportedRank(cl_rank));
    }
    table.validate()?;
    let kcube = Rational::integer(2 * genus - 2);
    let mut cells = Vec::new();
    let rights = right_kinds();
    // Unordered pairs: the left side is the earlier kind in this order.
    let later = |left: &Contraction| -> Vec<Contraction> {
        let pos = rights.iter().position(|r| r.tag() == left.tag()).expect("known kind");
        rights[pos..].to_vec()
    };

    // Point blowups of index type: the target must have iota^3 | (-K_Z)^3.
    let e2 = point_blowup_case(PointBlowupKind::E2, &(&kcube + PointBlowupKind::E2.delta()));
    let kz_e2 = &kcube + PointBlowupKind::E2.delta();
    debug_assert_eq!(e2.kcube, kcube);
    let e2_reason = index_reason(&kz_e2);
    for right in later(&Contraction::E2) {
        cells.push(LinkCandidate::excluded(Contraction::E2, right, R_INDEX, e2_reason.clone()));
    }

    let kz_e34 = &kcube + PointBlowupKind::E34.delta();
    let e34_entry = table.excluder("e3-4-V3").ok_or_else(|| RefTableError::MissingEntry("excludes:e3-4-V3".into()))?;
    let v3 = table.get("V3")?;
    let indices = admissible_indices(&kz_e34);
    if v3.kcube != kz_e34 || indices != vec![2] {
        return Err(EnumerateError::Inconsistent(format!("e3-4 target: indices {indices:?}, V3 kcube {}", v3.kcube)));
    }
    for right in later(&Contraction::E34) {
        cells.push(LinkCandidate::excluded(
            Contraction::E34,
            right,
            R_TABLE,
            format!("target has (-K)^3 = {kz_e34}, only iota = 2 (cubic threefold); {}", e34_entry.name),
        ));
    }

    // Half-point contraction on the left; the right side fixes delta.
    let e5_cases: [(Contraction, i64, Option<i64>); 3] =
        [(Contraction::E5, -1, Some(1)), (Contraction::any_conic(), 1, None), (Contraction::any_del_pezzo(), 0, None)];
    for (right, delta, beta) in e5_cases {
        let report = linkeq::solve_e5_pair(&kcube, delta, beta, opts)?;
        if !report.is_no_solutions() {
            return Err(EnumerateError::Inconsistent(format!("e5 with delta {delta} has solutions")));
        }
        let kind = report.certificate().map(|c| c.kind()).unwrap_or("none");
        let reason = match beta {
            Some(b) => format!("delta = {delta}, beta = {b}: {kind}"),
            None => format!("delta = {delta}: {kind}"),
        };
        cells.push(LinkCandidate::excluded(Contraction::E5, right, R_E5, reason).with_solution(report));
    }

    // Curve blowups.
    let cands = filter_e1(&e1_candidates(genus)?, table)?;
    let mut partners = Vec::new();
    for c in &cands {
        let left = Contraction::E1 { target: Some(c.target), k: Some(c.k) };
        match &c.status {
            CandidateStatus::Excluded { rule, detail } => {
                let rule = RULES.iter().find(|r| r.name == rule).copied().expect("known rule");
                for right in [Contraction::any_e1(), Contraction::any_conic(), Contraction::any_del_pezzo()] {
                    cells.push(LinkCandidate::excluded(left.clone(), right, rule, detail.clone()));
                }
            }
            CandidateStatus::Survived => {
                let rs = right_side_invariants(c, table)?;
                partners.push(rs.contraction.clone());
                let row = LinkRow {
                    label: label_for(c).to_string(),
                    left: Side::curve_blowup(c.target.reference_name(), c.h_degree, c.pa),
                    right: rs.side.clone(),
                };
                for right in [Contraction::any_e1(), Contraction::any_conic(), Contraction::any_del_pezzo()] {
                    if right.tag() == rs.contraction.tag() {
                        cells.push(LinkCandidate {
                            left: left.clone(),
                            right: rs.contraction.clone(),
                            status: LinkStatus::Realized { row: row.clone() },
                            solution: None,
                        });
                    } else {
                        cells.push(LinkCandidate::excluded(
                            left.clone(),
                            right,
                            R_PARTNER,
                            format!("(-K).S^2 = {}, (-K)^2.S = {}: partner is {}", rs.k_s2, rs.k2_s, rs.contraction),
                        ));
                    }
                }
            }
        }
    }
    if partners.iter().any(|p| p.tag() == "e5") {
        return Err(EnumerateError::Inconsistent("a curve blowup pairs with e5".into()));
    }
    cells.push(LinkCandidate::excluded(
        Contraction::E5,
        Contraction::any_e1(),
        R_PARTNER,
        format!(
            "every surviving curve blowup pairs with one of {}",
            partners.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
        ),
    ));

    // Two conic bundles.
    for deg in 0..=MAX_DISCRIMINANT_DEGREE {
        let left = Contraction::Conic { deg_delta: Some(deg) };
        let beta = if deg == 0 { None } else { Some(1) };
        let report = linkeq::solve_cc(&kcube, deg as i64, beta, opts)?;
        let cell = if report.exclusion.is_some() {
            LinkCandidate::excluded(left, Contraction::any_conic(), R_DISC_LINE, linkeq::DISCRIMINANT_LINE_REASON)
        } else if report.is_no_solutions() {
            let kind = report.certificate().map(|c| c.kind()).unwrap_or("none");
            let what = if deg == 0 { "alpha, beta in (1/2)Z".to_string() } else { "beta = 1".to_string() };
            LinkCandidate::excluded(left, Contraction::any_conic(), R_CC, format!("{what}: {kind}"))
        } else {
            return Err(EnumerateError::Inconsistent(format!("two conic bundles with deg {deg} solve")));
        };
        cells.push(cell.with_solution(report));
    }

    // Conic bundle against del Pezzo fibration.
    for deg in 0..=MAX_DISCRIMINANT_DEGREE {
        let left = Contraction::Conic { deg_delta: Some(deg) };
        let cd = linkeq::solve_cd(&kcube, deg as i64, opts)?;
        match &cd.fiber_degree {
            None => {
                let kind = cd.report.certificate().map(|c| c.kind()).unwrap_or("none");
                cells.push(
                    LinkCandidate::excluded(
                        left,
                        Contraction::any_del_pezzo(),
                        R_CD,
                        format!("discriminant {}: {kind}", cd.discriminant),
                    )
                    .with_solution(cd.report.clone()),
                );
            }
            Some(fiber) => {
                let fiber = fiber.to_i64().ok_or_else(|| EnumerateError::Inconsistent("fractional fiber".into()))?;
                let (c1sq, c2) = pe_bundle(&kcube)?;
                for d in FIBER_DEGREES {
                    let right = Contraction::DelPezzo { fiber_sq: Some(d) };
                    if d as i64 == fiber {
                        cells.push(
                            LinkCandidate {
                                left: left.clone(),
                                right,
                                status: LinkStatus::Realized {
                                    row: LinkRow {
                                        label: "IV".into(),
                                        left: Side::projective_bundle(c1sq, c2),
                                        right: Side::del_pezzo(fiber),
                                    },
                                },
                                solution: None,
                            }
                            .with_solution(cd.report.clone()),
                        );
                    } else {
                        cells.push(LinkCandidate::excluded(
                            left.clone(),
                            right,
                            R_FIBER_FORCED,
                            format!("fiber degree forced to {fiber}"),
                        ));
                    }
                }
            }
        }
    }

    // Two del Pezzo fibrations.
    for d in FIBER_DEGREES {
        let report = linkeq::solve_dd(&kcube, d as i64)?;
        cells.push(
            LinkCandidate::excluded(
                Contraction::DelPezzo { fiber_sq: Some(d) },
                Contraction::any_del_pezzo(),
                R_DD,
                format!("11 a = {d} b would be a fiber degree divisible by 11"),
            )
            .with_solution(report),
        );
    }

    cells.sort_by_key(|c| c.sort_key());
    Ok(LinkLedger { genus, cl_rank, e1_candidates: cands, cells })
}

/// Indices `iota` in `2..=4` with `iota^3 | kz`.
pub fn admissible_indices(kz: &Rational) -> Vec<i64> {
    (2..=4).filter(|i| (kz / Rational::integer(i * i * i)).is_integer()).collect()
}

fn index_reason(kz: &Rational) -> String {
    let parts: Vec<String> =
        (2..=4).map(|i: i64| format!("{kz} mod {} = {}", i * i * i, kz.to_i64().unwrap_or(0) % (i * i * i))).collect();
    format!("target has (-K)^3 = {kz}; {}", parts.join(", "))
}

/// Chern data of the P1-bundle side, normalized by twisting, checked against the ring.
fn pe_bundle(kcube: &Rational) -> Result<(i64, i64), EnumerateError> {
    let found = bundle_normalizations(kcube.to_i64().unwrap_or(0));
    let [(c1sq, c2)] = found.as_slice() else {
        return Err(EnumerateError::Inconsistent(format!("bundle normalizations {found:?}")));
    };
    let ring = projbundle_ring(&ChernData::over_plane(*c1sq, *c2))?;
    if ring.kcube() != *kcube {
        return Err(EnumerateError::Inconsistent("bundle ring cube mismatch".into()));
    }
    Ok((*c1sq, *c2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ledger() -> LinkLedger {
        enumerate_links(12, 2, &ReferenceTable::bundled(), &SolveOptions::default()).unwrap()
    }

    #[test]
    fn castelnuovo_examples() {
        assert_eq!(castelnuovo_bound(5, 3).unwrap(), 2);
        assert_eq!(castelnuovo_bound(6, 3).unwrap(), 4);
        assert_eq!(castelnuovo_bound(3, 2).unwrap(), 1);
        assert_eq!(castelnuovo_bound(7, 3).unwrap(), 6);
        assert!(castelnuovo_bound(5, 1).is_err());
    }

    #[test]
    fn e1_families() {
        let c = e1_candidates(12).unwrap();
        let get = |t: E1Target, k: u32| c.iter().find(|x| x.target == t && x.k == k).unwrap();
        let p = get(E1Target::P3, 0);
        assert_eq!((p.pa, p.h_degree, p.ksq_e.clone()), (0, 5, Rational::integer(22)));
        let q = get(E1Target::Q, 0);
        assert_eq!((q.pa, q.h_degree, q.ksq_e.clone()), (0, 5, Rational::integer(17)));
        let d5 = get(E1Target::DP5, 0);
        assert_eq!((d5.pa, d5.h_degree, d5.ksq_e.clone()), (0, 4, Rational::integer(10)));
        let count = |t| c.iter().filter(|x| x.target == t).count();
        assert_eq!((count(E1Target::P3), count(E1Target::Q), count(E1Target::DP4), count(E1Target::DP5)), (6, 6, 3, 5));
        assert!(c.iter().all(|x| x.satisfies_relations(&Rational::integer(22))));
        assert!(e1_candidates(10).is_err());
    }

    #[test]
    fn filter_survivors_and_rules() {
        let f = filter_e1(&e1_candidates(12).unwrap(), &ReferenceTable::bundled()).unwrap();
        let survivors: Vec<_> = f.iter().filter(|c| c.survived()).map(|c| (c.target, c.k)).collect();
        assert_eq!(survivors, vec![(E1Target::P3, 0), (E1Target::Q, 0), (E1Target::DP5, 0)]);
        let rule = |t: E1Target, k: u32| match &f.iter().find(|x| x.target == t && x.k == k).unwrap().status {
            CandidateStatus::Excluded { rule, .. } => rule.clone(),
            CandidateStatus::Survived => "survived".into(),
        };
        assert_eq!(rule(E1Target::P3, 1), "R-TABLE");
        assert_eq!(rule(E1Target::P3, 2), "R-CAST");
        assert_eq!(rule(E1Target::DP4, 0), "R-TABLE");
        assert_eq!(rule(E1Target::Q, 1), "R-CUBIC-CAP");
        assert_eq!(rule(E1Target::DP5, 3), "R-SECANT-SPAN");
    }

    #[test]
    fn right_sides() {
        let t = ReferenceTable::bundled();
        let f = filter_e1(&e1_candidates(12).unwrap(), &t).unwrap();
        let surv: Vec<_> = f.iter().filter(|c| c.survived()).collect();
        let r1 = right_side_invariants(surv[0], &t).unwrap();
        assert_eq!(r1.side, Side::curve_blowup("P3", 5, 0));
        assert_eq!(r1.contraction, Contraction::E1 { target: Some(E1Target::P3), k: Some(0) });
        assert_eq!(right_side_invariants(surv[1], &t).unwrap().side, Side::conic_bundle(3));
        assert_eq!(right_side_invariants(surv[2], &t).unwrap().side, Side::del_pezzo(6));
    }

    #[test]
    fn irreducibility_degrees() {
        let c = &e1_candidates(12).unwrap()[0];
        assert_eq!(irreducibility_degree_test(3, 1, c).unwrap(), 11);
        assert_eq!(irreducibility_degree_test(2, 1, c).unwrap(), 0);
        assert_eq!(irreducibility_degree_test(3, 2, c).unwrap(), -11);
    }

    #[test]
    fn four_rows() {
        let l = ledger();
        let rows = l.realized();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows.iter().map(|r| r.label.as_str()).collect::<Vec<_>>(), ["I", "II", "III", "IV"]);
        assert_eq!(rows[3].left.chern, Some((0, 4)));
        assert_eq!(rows[3].right.fiber_degree, Some(5));
    }

    #[test]
    fn grid_covers_every_unordered_pair() {
        let l = ledger();
        let tags = ["e2", "e3-4", "e5", "e1", "c", "d"];
        for (i, a) in tags.iter().enumerate() {
            for b in &tags[i..] {
                let hit = l.cells.iter().any(|c| {
                    (c.left.tag() == *a && c.right.tag() == *b) || (c.left.tag() == *b && c.right.tag() == *a)
                });
                assert!(hit, "pair ({a}, {b}) missing");
            }
        }
    }

    #[test]
    fn named_cells() {
        let l = ledger();
        let e5d = l.cells.iter().find(|c| c.left == Contraction::E5 && c.right.tag() == "d").unwrap();
        assert_eq!(e5d.rule(), Some("R-E5"));
        assert!(e5d.solution.is_some());
        assert!(l.cells.iter().filter(|c| c.left.tag() == "d").all(|c| c.rule() == Some("R-DD")));
    }

    #[test]
    fn json_round_trip() {
        let l = ledger();
        let back: LinkLedger = serde_json::from_value(l.to_json()).unwrap();
        assert_eq!(back, l);
        back.revalidate().unwrap();
    }

    #[test]
    fn guards() {
        let t = ReferenceTable::bundled();
        let o = SolveOptions::default();
        assert_eq!(enumerate_links(10, 2, &t, &o).unwrap_err(), EnumerateError::UnsupportedGenus(10));
        assert_eq!(enumerate_links(12, 3, &t, &o).unwrap_err(), EnumerateError::UnsupportedRank(3));
    }
}
