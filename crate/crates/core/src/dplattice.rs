//! Picard lattices of del Pezzo surfaces and the numerics of the surface
//! construction and of the P1-bundle over the plane.
//!
//! A surface of degree `d` is the blowup of `9 - d` points of `P2`. Classes
//! are integer vectors `(a, c_1, ..., c_n)` meaning `a h + sum c_i e_i`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::icalc::{
    curve_blowup_ring, eval_trilinear, projbundle_ring, ChernData, CurveData, DivisorClass, IcalcError, PolarizedFano,
};
use crate::rational::Rational;

pub const MIN_DEGREE: u32 = 3;
pub const MAX_DEGREE: u32 = 7;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DpError {
    #[error("del Pezzo degree must be in {MIN_DEGREE}..={MAX_DEGREE}, got {0}")]
    InvalidDegree(u32),
    #[error("class has {got} coordinates, lattice needs {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("construction violated: {0}")]
    ConstructionViolated(String),
    #[error(transparent)]
    Icalc(#[from] IcalcError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeClass {
    pub coords: Vec<i64>,
}

impl LatticeClass {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticeClass { coords }
    }

    pub fn add(&self, other: &Self) -> Self {
        LatticeClass::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        LatticeClass::new(self.coords.iter().map(|a| a * k).collect())
    }
}

impl fmt::Display for LatticeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let a = self.coords[0];
        if a != 0 {
            out = match a {
                1 => "h".into(),
                -1 => "-h".into(),
                _ => format!("{a}h"),
            };
        }
        for (i, &c) in self.coords.iter().enumerate().skip(1) {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 {
                "-"
            } else if out.is_empty() {
                ""
            } else {
                "+"
            };
            let mag = c.abs();
            if mag == 1 {
                out.push_str(&format!("{sign}e{i}"));
            } else {
                out.push_str(&format!("{sign}{mag}e{i}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DPLattice {
    pub degree: u32,
}

impl DPLattice {
    pub fn new(degree: u32) -> Result<Self, DpError> {
        if !(MIN_DEGREE..=MAX_DEGREE).contains(&degree) {
            return Err(DpError::InvalidDegree(degree));
        }
        Ok(DPLattice { degree })
    }

    /// Number of blown-up points.
    pub fn points(&self) -> usize {
        9 - self.degree as usize
    }

    pub fn rank(&self) -> usize {
        self.points() + 1
    }

    pub fn class(&self, coords: Vec<i64>) -> Result<LatticeClass, DpError> {
        if coords.len() != self.rank() {
            return Err(DpError::WrongLength { expected: self.rank(), got: coords.len() });
        }
        Ok(LatticeClass::new(coords))
    }

    pub fn h(&self) -> LatticeClass {
        self.unit(0)
    }

    /// `e_i`, `1 <= i <= points()`.
    pub fn e(&self, i: usize) -> LatticeClass {
        assert!((1..=self.points()).contains(&i), "e{i} out of range");
        self.unit(i)
    }

    fn unit(&self, i: usize) -> LatticeClass {
        let mut v = vec![0; self.rank()];
        v[i] = 1;
        LatticeClass::new(v)
    }

    /// `a h - sum b_i e_i` from `a` and the multiplicities `b`.
    pub fn curve(&self, a: i64, mults: &[i64]) -> LatticeClass {
        let mut v = vec![0; self.rank()];
        v[0] = a;
        for (i, m) in mults.iter().enumerate() {
            v[i + 1] = -m;
        }
        LatticeClass::new(v)
    }

    pub fn canonical(&self) -> LatticeClass {
        let mut v = vec![1; self.rank()];
        v[0] = -3;
        LatticeClass::new(v)
    }

    pub fn anticanonical(&self) -> LatticeClass {
        self.canonical().scale(-1)
    }

    pub fn dot(&self, x: &LatticeClass, y: &LatticeClass) -> i64 {
        x.coords[0] * y.coords[0] - x.coords[1..].iter().zip(&y.coords[1..]).map(|(a, b)| a * b).sum::<i64>()
    }

    pub fn square(&self, x: &LatticeClass) -> i64 {
        self.dot(x, x)
    }

    /// `-K . x`.
    pub fn anti_degree(&self, x: &LatticeClass) -> i64 {
        self.dot(&self.anticanonical(), x)
    }

    /// `(x^2 + K.x)/2 + 1`.
    pub fn arithmetic_genus(&self, x: &LatticeClass) -> i64 {
        (self.square(x) - self.anti_degree(x)) / 2 + 1
    }

    /// Largest `a` admitting a class with the given square and anticanonical
    /// degree whose `e_i` coefficients are all nonpositive. From Cauchy-Schwarz,
    /// `n (a^2 - s) >= (3a - t)^2`.
    pub fn max_a(&self, square: i64, anti_degree: i64) -> i64 {
        let n = self.points() as i64;
        let mut best = 0;
        for a in 0..=64 {
            if n * (a * a - square) >= (3 * a - anti_degree).pow(2) {
                best = a;
            }
        }
        best
    }

    /// All classes with the given square and anticanonical degree that are
    /// either some `e_i` or have `a >= 1` and `-a <= c_i <= 0`.
    pub fn classes_with(&self, square: i64, anti_degree: i64) -> Vec<LatticeClass> {
        let mut out = Vec::new();
        for i in 1..=self.points() {
            let e = self.e(i);
            if self.square(&e) == square && self.anti_degree(&e) == anti_degree {
                out.push(e);
            }
        }
        let amax = self.max_a(square, anti_degree);
        for a in 1..=amax {
            let budget = a * a - square;
            if budget < 0 {
                continue;
            }
            let mut cur = vec![0; self.points()];
            self.fill(a, 0, budget, &mut cur, square, anti_degree, &mut out);
        }
        out.sort();
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn fill(
        &self,
        a: i64,
        i: usize,
        budget: i64,
        cur: &mut Vec<i64>,
        square: i64,
        anti_degree: i64,
        out: &mut Vec<LatticeClass>,
    ) {
        if i == cur.len() {
            let mut coords = vec![a];
            coords.extend(cur.iter());
            let x = LatticeClass::new(coords);
            if self.square(&x) == square && self.anti_degree(&x) == anti_degree {
                out.push(x);
            }
            return;
        }
        for c in -a..=0 {
            if c * c > budget {
                continue;
            }
            cur[i] = c;
            self.fill(a, i + 1, budget - c * c, cur, square, anti_degree, out);
        }
        cur[i] = 0;
    }

    /// Lines: `C^2 = -1`, `K.C = -1`.
    pub fn exceptional_classes(&self) -> Vec<LatticeClass> {
        self.classes_with(-1, 1)
    }

    /// Conic classes: `C^2 = 0`, `K.C = -2`.
    pub fn conic_classes(&self) -> Vec<LatticeClass> {
        self.classes_with(0, 2)
    }

    /// Simple roots `e_i - e_{i+1}` and `h - e_1 - e_2 - e_3`.
    pub fn simple_roots(&self) -> Vec<LatticeClass> {
        let n = self.points();
        let mut roots: Vec<LatticeClass> = (1..n).map(|i| self.e(i).add(&self.e(i + 1).scale(-1))).collect();
        if n >= 3 {
            roots.push(self.curve(1, &[1, 1, 1]));
        }
        roots
    }

    /// `s_r(x) = x + (x.r) r` for a root `r` with `r^2 = -2`.
    pub fn reflect(&self, x: &LatticeClass, root: &LatticeClass) -> LatticeClass {
        x.add(&root.scale(self.dot(x, root)))
    }

    /// Orbit of `x` under the group generated by the simple reflections.
    pub fn weyl_orbit(&self, x: &LatticeClass) -> BTreeSet<LatticeClass> {
        let roots = self.simple_roots();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([x.clone()]);
        seen.insert(x.clone());
        while let Some(y) = queue.pop_front() {
            for r in &roots {
                let z = self.reflect(&y, r);
                if seen.insert(z.clone()) {
                    queue.push_back(z);
                }
            }
        }
        seen
    }

    /// Nefness tested against lines and conic classes, which generate the
    /// effective cone for degree at most 7.
    pub fn nef_failures(&self, d: &LatticeClass) -> Vec<(LatticeClass, i64)> {
        self.exceptional_classes()
            .into_iter()
            .chain(self.conic_classes())
            .filter_map(|c| {
                let v = self.dot(d, &c);
                (v < 0).then_some((c, v))
            })
            .collect()
    }

    pub fn is_nef(&self, d: &LatticeClass) -> bool {
        self.nef_failures(d).is_empty()
    }
}

/// Targets of the construction: a curve `B` on a smooth surface `S` in
/// `|(iota - 1) H|` of a rank-one Fano threefold of index `iota`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstructionTarget {
    P3,
    Q,
    V5,
}

impl ConstructionTarget {
    pub const ALL: [ConstructionTarget; 3] = [ConstructionTarget::P3, ConstructionTarget::Q, ConstructionTarget::V5];

    pub fn name(self) -> &'static str {
        match self {
            ConstructionTarget::P3 => "P3",
            ConstructionTarget::Q => "Q",
            ConstructionTarget::V5 => "V5",
        }
    }

    pub fn polarized(self) -> PolarizedFano {
        match self {
            ConstructionTarget::P3 => PolarizedFano::p3(),
            ConstructionTarget::Q => PolarizedFano::quadric(),
            ConstructionTarget::V5 => PolarizedFano::del_pezzo(5),
        }
    }

    /// Degree of the surface `S`.
    pub fn surface_degree(self) -> u32 {
        match self {
            ConstructionTarget::P3 => 3,
            ConstructionTarget::Q => 4,
            ConstructionTarget::V5 => 5,
        }
    }

    /// The curve class `B`: `2h - e1` on cubic and quartic surfaces, `2h - e1 - e2` on the quintic.
    pub fn curve_class(self, lattice: &DPLattice) -> LatticeClass {
        match self {
            ConstructionTarget::P3 | ConstructionTarget::Q => lattice.curve(2, &[1]),
            ConstructionTarget::V5 => lattice.curve(2, &[1, 1]),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "P3" | "p3" => Some(ConstructionTarget::P3),
            "Q" | "q" => Some(ConstructionTarget::Q),
            "V5" | "v5" | "dP5" | "dp5" => Some(ConstructionTarget::V5),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionReport {
    pub target: String,
    pub surface_degree: u32,
    pub iota: u32,
    pub curve: LatticeClass,
    pub pa: i64,
    pub anti_degree: i64,
    /// `D = -iota K_S - B`, the restriction of `-K_Y` to the strict transform of `S`.
    pub restricted: LatticeClass,
    pub restricted_square: i64,
    pub trivial_lines: Vec<LatticeClass>,
    /// `(-K_Y)^2 . S` in the blowup ring; equals `D^2`.
    pub ring_k2_s: Rational,
    pub ring_kcube: Rational,
}

/// Lattice verification for `B` on `S`; `curve` overrides the default class.
pub fn construction_check_with(
    target: ConstructionTarget,
    degree: u32,
    curve: Option<LatticeClass>,
) -> Result<ConstructionReport, DpError> {
    let lattice = DPLattice::new(degree)?;
    let b = match curve {
        Some(c) => lattice.class(c.coords)?,
        None => target.curve_class(&lattice),
    };
    let base = target.polarized();
    let iota = base.iota();
    let pa = lattice.arithmetic_genus(&b);
    let anti_degree = lattice.anti_degree(&b);
    let d = lattice.anticanonical().scale(iota as i64).add(&b.scale(-1));
    let d2 = lattice.square(&d);
    if d2 <= 0 {
        return Err(DpError::ConstructionViolated(format!("D = {d} has D^2 = {d2}")));
    }
    let failures = lattice.nef_failures(&d);
    if let Some((c, v)) = failures.first() {
        return Err(DpError::ConstructionViolated(format!("D = {d} is not nef: D.({c}) = {v}")));
    }
    let trivial: Vec<LatticeClass> =
        lattice.exceptional_classes().into_iter().filter(|c| lattice.dot(&d, c) == 0).collect();
    if trivial.len() != 1 {
        let list: Vec<String> = trivial.iter().map(|c| c.to_string()).collect();
        return Err(DpError::ConstructionViolated(format!(
            "D = {d} is trivial on {} lines: [{}]",
            trivial.len(),
            list.join(", ")
        )));
    }
    if pa < 0 || anti_degree <= 0 {
        return Err(DpError::ConstructionViolated(format!("B = {b} has pa {pa}, -K.B = {anti_degree}")));
    }
    let ring = curve_blowup_ring(&base, &CurveData { h_degree: anti_degree as u32, pa })?;
    let k = ring.anticanonical();
    let s = DivisorClass::int(iota as i64 - 1, -1);
    let ring_k2_s = eval_trilinear(&ring, &k, &k, &s);
    if ring_k2_s != d2 {
        return Err(DpError::ConstructionViolated(format!("(-K)^2.S = {ring_k2_s} but D^2 = {d2}")));
    }
    Ok(ConstructionReport {
        target: target.name().to_string(),
        surface_degree: degree,
        iota,
        curve: b,
        pa,
        anti_degree,
        restricted: d,
        restricted_square: d2,
        trivial_lines: trivial,
        ring_k2_s,
        ring_kcube: ring.kcube(),
    })
}

pub fn construction_check(target: ConstructionTarget) -> Result<ConstructionReport, DpError> {
    construction_check_with(target, target.surface_degree(), None)
}

/// A reducible curve given as a sum of lattice classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub components: Vec<LatticeClass>,
    pub total: LatticeClass,
    pub pa: i64,
    pub is_chain: bool,
    pub base_rank: u32,
    /// `r(Y) = r(Z) + number of components`.
    pub rank: u32,
}

/// `components` must be listed in chain order for `is_chain` to hold.
pub fn reducible_construction(
    lattice: &DPLattice,
    components: &[LatticeClass],
    base_rank: u32,
) -> Result<ChainReport, DpError> {
    let mut total = LatticeClass::new(vec![0; lattice.rank()]);
    for c in components {
        let c = lattice.class(c.coords.clone())?;
        total = total.add(&c);
    }
    let mut is_chain = true;
    for i in 0..components.len() {
        for j in (i + 1)..components.len() {
            let expected = if j == i + 1 { 1 } else { 0 };
            if lattice.dot(&components[i], &components[j]) != expected {
                is_chain = false;
            }
        }
    }
    Ok(ChainReport {
        components: components.to_vec(),
        pa: lattice.arithmetic_genus(&total),
        total,
        is_chain,
        base_rank,
        rank: base_rank + components.len() as u32,
    })
}

/// Chain of four lines on the quintic surface summing to `2h - e1 - e2`.
pub fn four_line_chain(lattice: &DPLattice) -> Vec<LatticeClass> {
    vec![lattice.e(3), lattice.curve(1, &[1, 0, 1]), lattice.curve(1, &[0, 1, 0, 1]), lattice.e(4)]
}

/// Pairs `(c1^2, c2)` of rank-2 bundles on `P2` with `c1 = c` times a line,
/// `c in {0, 1}` (every bundle has a twist of this shape), whose
/// projectivization has anticanonical cube `kcube`.
pub fn bundle_normalizations(kcube: i64) -> Vec<(i64, i64)> {
    (0..=1)
        .filter_map(|c: i64| {
            let num = 54 + 2 * c * c - kcube;
            (num % 8 == 0).then_some((c * c, num / 8))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleReport {
    pub c1sq: i64,
    pub c2: i64,
    /// `[M^3, M^2 F, M F^2, F^3]`.
    pub monomials: [Rational; 4],
    pub kcube: Rational,
    /// Riemann-Roch lower bounds `n^2 + 3n - 2` on `h0(E(n))` for `n = 1, 2`.
    pub rr_bounds: [i64; 2],
    /// Resulting lower bounds on `dim |M + nF|`.
    pub dim_bounds: [i64; 2],
    pub mf2_k: Rational,
    pub mf2_f: Rational,
    pub m2f_mf2: Rational,
    /// `2 (-K)^2 . M`.
    pub two_k2_m: Rational,
}

pub fn riemann_roch_bound(n: i64) -> i64 {
    n * n + 3 * n - 2
}

pub fn pe_numerics() -> Result<BundleReport, DpError> {
    let normals = bundle_normalizations(22);
    let [(c1sq, c2)] = normals.as_slice() else {
        return Err(DpError::ConstructionViolated(format!("bundle normalizations {normals:?}")));
    };
    let ring = projbundle_ring(&ChernData::over_plane(*c1sq, *c2))?;
    let minus_k = ring.anticanonical();
    let canon = -&minus_k;
    let m = DivisorClass::int(1, 0);
    let f = DivisorClass::int(0, 1);
    let mf = DivisorClass::int(1, 1);
    let m2f = DivisorClass::int(1, 2);
    let rr_bounds = [riemann_roch_bound(1), riemann_roch_bound(2)];
    Ok(BundleReport {
        c1sq: *c1sq,
        c2: *c2,
        monomials: ring.monomials(),
        kcube: ring.kcube(),
        rr_bounds,
        dim_bounds: [rr_bounds[0] - 1, rr_bounds[1] - 1],
        mf2_k: eval_trilinear(&ring, &mf, &mf, &canon),
        mf2_f: eval_trilinear(&ring, &mf, &mf, &f),
        m2f_mf2: eval_trilinear(&ring, &m2f, &mf, &mf),
        two_k2_m: eval_trilinear(&ring, &minus_k, &minus_k, &m) * 2,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuarticSectionReport {
    /// `(M+F)^2 . (M+2F)`.
    pub gamma_degree: Rational,
    /// `(M+F)^2 . (-K)`.
    pub gamma_k: Rational,
    /// `K_S^2 = (M+F) . (-K - (M+F))^2` by adjunction.
    pub ksq: Rational,
}

pub fn quartic_section_check() -> Result<QuarticSectionReport, DpError> {
    let report = pe_numerics()?;
    let ring = projbundle_ring(&ChernData::over_plane(report.c1sq, report.c2))?;
    let minus_k = ring.anticanonical();
    let s = DivisorClass::int(1, 1);
    let rest = &minus_k - &s;
    Ok(QuarticSectionReport {
        gamma_degree: eval_trilinear(&ring, &s, &s, &DivisorClass::int(1, 2)),
        gamma_k: eval_trilinear(&ring, &s, &s, &minus_k),
        ksq: eval_trilinear(&ring, &s, &rest, &rest),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_counts() {
        let counts: Vec<usize> = (3..=7).map(|d| DPLattice::new(d).unwrap().exceptional_classes().len()).collect();
        assert_eq!(counts, vec![27, 16, 10, 6, 3]);
        assert!(DPLattice::new(2).is_err());
    }

    #[test]
    fn bounds_small_for_lines() {
        for d in 3..=5 {
            let l = DPLattice::new(d).unwrap();
            assert!(l.max_a(-1, 1) <= 3);
            assert_eq!(l.square(&l.canonical()), d as i64);
        }
    }

    #[test]
    fn orbit_of_e1_is_all_lines() {
        let l = DPLattice::new(3).unwrap();
        let orbit = l.weyl_orbit(&l.e(1));
        let lines: BTreeSet<_> = l.exceptional_classes().into_iter().collect();
        assert_eq!(orbit, lines);
    }

    #[test]
    fn construction_cases() {
        let p3 = construction_check(ConstructionTarget::P3).unwrap();
        let l3 = DPLattice::new(3).unwrap();
        assert_eq!(p3.trivial_lines, vec![l3.curve(2, &[0, 1, 1, 1, 1, 1])]);
        assert_eq!((p3.pa, p3.anti_degree, p3.restricted_square), (0, 5, 11));
        let q = construction_check(ConstructionTarget::Q).unwrap();
        assert_eq!((q.pa, q.anti_degree, q.restricted_square), (0, 5, 9));
        let v5 = construction_check(ConstructionTarget::V5).unwrap();
        assert_eq!((v5.pa, v5.anti_degree, v5.restricted_square), (0, 4, 6));
        assert_eq!(v5.ring_kcube, 22);
        let l5 = DPLattice::new(5).unwrap();
        assert_eq!(v5.trivial_lines, vec![l5.curve(1, &[0, 0, 1, 1])]);
    }

    #[test]
    fn wrong_class_violates() {
        let l4 = DPLattice::new(4).unwrap();
        let err = construction_check_with(ConstructionTarget::Q, 4, Some(l4.curve(2, &[1, 1]))).unwrap_err();
        assert!(matches!(err, DpError::ConstructionViolated(_)));
    }

    #[test]
    fn chain_of_four_lines() {
        let l5 = DPLattice::new(5).unwrap();
        let r = reducible_construction(&l5, &four_line_chain(&l5), 4).unwrap();
        assert!(r.is_chain);
        assert_eq!(r.total, l5.curve(2, &[1, 1]));
        assert_eq!((r.pa, r.rank), (0, 8));
    }

    #[test]
    fn bundle() {
        assert_eq!(bundle_normalizations(22), vec![(0, 4)]);
        let b = pe_numerics().unwrap();
        assert_eq!(b.monomials[0], -4);
        assert_eq!(b.kcube, 22);
        assert_eq!(b.rr_bounds, [2, 8]);
        assert_eq!(b.dim_bounds, [1, 7]);
        assert_eq!(b.two_k2_m, -14);
        assert_eq!(b.mf2_k, 0);
        assert_eq!(b.mf2_f, 2);
        assert_eq!(b.m2f_mf2, 1);
        let q = quartic_section_check().unwrap();
        assert_eq!((q.gamma_degree.clone(), q.gamma_k.clone(), q.ksq.clone()), (1.into(), 0.into(), 4.into()));
    }
}
