//! Intersection numbers on rank-2 Picard lattices.
//!
//! Three ambient constructions are covered: the blowup of a curve on a Fano
//! threefold of Picard rank one, the blowup of a point (numbers only), and
//! the projectivization of a rank-2 bundle over the projective plane. All
//! arithmetic is exact.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::rational::{exact_sqrt, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IcalcError {
    #[error("(-K)^3 = {kcube} does not give an integral genus")]
    NonIntegralGenus { kcube: Rational },
    #[error("only the projective plane (K^2 = 9) is supported as a base surface, got K^2 = {base_ksq}")]
    UnsupportedBase { base_ksq: i64 },
    #[error("base data inconsistent: (-K)^3 = {kcube} but iota^3 * H^3 = {expected}")]
    InconsistentBase { kcube: Box<Rational>, expected: Box<Rational> },
    #[error("c1^2 = {c1sq} is not the square of an integer multiple of the line class")]
    InvalidChernData { c1sq: i64 },
    #[error("coordinate {value} has a denominator not dividing 6")]
    InvalidDenominator { value: Rational },
    #[error("invalid Fano invariants: {0}")]
    InvalidInvariants(String),
}

/// `g = (-K)^3 / 2 + 1`.
pub fn genus_of(kcube: &Rational) -> Result<i64, IcalcError> {
    let g = kcube / Rational::integer(2) + 1;
    g.to_i64().ok_or_else(|| IcalcError::NonIntegralGenus { kcube: kcube.clone() })
}

/// Numerical fingerprint of a (generalized) Fano threefold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanoInvariants {
    pub kcube: Rational,
    pub rho: u32,
    pub cl_rank: u32,
    pub iota: u32,
    pub genus: Option<i64>,
}

impl FanoInvariants {
    pub fn new(kcube: Rational, rho: u32, cl_rank: u32, iota: u32) -> Result<Self, IcalcError> {
        if !kcube.is_positive() {
            return Err(IcalcError::InvalidInvariants(format!("(-K)^3 = {kcube} must be positive")));
        }
        if rho == 0 || iota == 0 {
            return Err(IcalcError::InvalidInvariants("rho and iota must be at least 1".into()));
        }
        if cl_rank < rho {
            return Err(IcalcError::InvalidInvariants(format!("class-group rank {cl_rank} below Picard rank {rho}")));
        }
        let genus = genus_of(&kcube).ok();
        Ok(FanoInvariants { kcube, rho, cl_rank, iota, genus })
    }
}

/// A Fano threefold of Picard rank one together with the cube of its ample generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizedFano {
    pub name: String,
    pub invariants: FanoInvariants,
    pub hcube: Rational,
}

impl PolarizedFano {
    pub fn new(name: &str, iota: u32, hcube: i64) -> Self {
        let hcube = Rational::integer(hcube);
        let kcube = &hcube * Rational::integer(iota as i64).pow(3);
        PolarizedFano {
            name: name.to_string(),
            invariants: FanoInvariants::new(kcube, 1, 1, iota).expect("preset invariants are valid"),
            hcube,
        }
    }

    pub fn p3() -> Self {
        Self::new("P3", 4, 1)
    }

    pub fn quadric() -> Self {
        Self::new("Q", 3, 2)
    }

    /// Del Pezzo threefold of degree `d`.
    pub fn del_pezzo(d: i64) -> Self {
        Self::new(&format!("V{d}"), 2, d)
    }

    pub fn iota(&self) -> u32 {
        self.invariants.iota
    }
}

/// A curve to be blown up: its degree against the ample generator and its arithmetic genus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveData {
    pub h_degree: u32,
    pub pa: i64,
}

/// A divisor class in a rank-2 basis. Coordinates have denominators dividing 6.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorClass {
    pub coords: [Rational; 2],
}

impl DivisorClass {
    pub fn new(a: Rational, b: Rational) -> Result<Self, IcalcError> {
        for v in [&a, &b] {
            if !v.denom_divides(6) {
                return Err(IcalcError::InvalidDenominator { value: v.clone() });
            }
        }
        Ok(DivisorClass { coords: [a, b] })
    }

    pub fn int(a: i64, b: i64) -> Self {
        DivisorClass { coords: [Rational::integer(a), Rational::integer(b)] }
    }

    pub fn zero() -> Self {
        Self::int(0, 0)
    }

    pub fn scale(&self, k: i64) -> Self {
        DivisorClass { coords: [&self.coords[0] * k, &self.coords[1] * k] }
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        DivisorClass { coords: [&self.coords[0] + &rhs.coords[0], &self.coords[1] + &rhs.coords[1]] }
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        DivisorClass { coords: [&self.coords[0] - &rhs.coords[0], &self.coords[1] - &rhs.coords[1]] }
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        DivisorClass { coords: [-&self.coords[0], -&self.coords[1]] }
    }
}

/// Symmetric trilinear form on a two-element divisor basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionRing3 {
    pub basis_labels: [String; 2],
    /// `form[i][j][k] = D_i . D_j . D_k`.
    pub form: [[[Rational; 2]; 2]; 2],
    pub canonical_class: DivisorClass,
}

impl IntersectionRing3 {
    /// Builds the ring from the four monomials `x^3, x^2 y, x y^2, y^3`.
    pub fn from_monomials(labels: [&str; 2], monomials: [Rational; 4], canonical_class: DivisorClass) -> Self {
        let mut form: [[[Rational; 2]; 2]; 2] = Default::default();
        for (i, plane) in form.iter_mut().enumerate() {
            for (j, row) in plane.iter_mut().enumerate() {
                for (k, entry) in row.iter_mut().enumerate() {
                    *entry = monomials[i + j + k].clone();
                }
            }
        }
        IntersectionRing3 { basis_labels: [labels[0].to_string(), labels[1].to_string()], form, canonical_class }
    }

    /// The monomial values `x^3, x^2 y, x y^2, y^3`.
    pub fn monomials(&self) -> [Rational; 4] {
        [self.form[0][0][0].clone(), self.form[0][0][1].clone(), self.form[0][1][1].clone(), self.form[1][1][1].clone()]
    }

    pub fn is_symmetric(&self) -> bool {
        let f = &self.form;
        (0..2).all(|i| {
            (0..2).all(|j| {
                (0..2).all(|k| f[i][j][k] == f[j][i][k] && f[i][j][k] == f[i][k][j] && f[i][j][k] == f[k][j][i])
            })
        })
    }

    pub fn anticanonical(&self) -> DivisorClass {
        -&self.canonical_class
    }

    /// Basis divisor `i` as a class.
    pub fn basis(&self, i: usize) -> DivisorClass {
        if i == 0 {
            DivisorClass::int(1, 0)
        } else {
            DivisorClass::int(0, 1)
        }
    }

    /// `(-K)^3`.
    pub fn kcube(&self) -> Rational {
        let k = self.anticanonical();
        eval_trilinear(self, &k, &k, &k)
    }
}

impl fmt::Display for IntersectionRing3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y] = &self.basis_labels;
        let m = self.monomials();
        write!(
            f,
            "{x}^3={}, {x}^2.{y}={}, {x}.{y}^2={}, {y}^3={}; K={}{x}+{}{y}",
            m[0], m[1], m[2], m[3], self.canonical_class.coords[0], self.canonical_class.coords[1]
        )
    }
}

pub fn eval_trilinear(ring: &IntersectionRing3, a: &DivisorClass, b: &DivisorClass, c: &DivisorClass) -> Rational {
    let mut total = Rational::zero();
    for i in 0..2 {
        if a.coords[i].is_zero() {
            continue;
        }
        for j in 0..2 {
            if b.coords[j].is_zero() {
                continue;
            }
            for k in 0..2 {
                let t = &ring.form[i][j][k];
                if t.is_zero() || c.coords[k].is_zero() {
                    continue;
                }
                total += &a.coords[i] * &b.coords[j] * &c.coords[k] * t;
            }
        }
    }
    total
}

/// Ring of the blowup `Y -> Z` of a curve `B` on a rank-one Fano threefold `Z`,
/// on the basis `(H*, E)`.
///
/// `E^3` equals `-deg N_{B/Z} = K_Z.B - 2 p_a(B) + 2`. This is the value for
/// which `(-K_Y)^3`, `(-K_Y)^2.E` and `(-K_Y).E^2` expand to the three blowup
/// identities of [`blowup_identities`].
pub fn curve_blowup_ring(base: &PolarizedFano, curve: &CurveData) -> Result<IntersectionRing3, IcalcError> {
    let iota = base.iota() as i64;
    let expected = &base.hcube * Rational::integer(iota).pow(3);
    if expected != base.invariants.kcube {
        return Err(IcalcError::InconsistentBase {
            kcube: Box::new(base.invariants.kcube.clone()),
            expected: Box::new(expected),
        });
    }
    let hb = curve.h_degree as i64;
    let kz_b = -iota * hb;
    let e_cube = kz_b - 2 * curve.pa + 2;
    Ok(IntersectionRing3::from_monomials(
        ["H*", "E"],
        [base.hcube.clone(), Rational::zero(), Rational::integer(-hb), Rational::integer(e_cube)],
        DivisorClass::int(-iota, 1),
    ))
}

/// `((-K_V)^3, (-K_V)^2.E, (-K_V).E^2)` for the blowup `V -> W` of a curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupNumbers {
    pub kcube: Rational,
    pub ksq_e: Rational,
    pub k_ee: Rational,
}

/// `kb` is `K_W . B`.
pub fn blowup_identities(base_kcube: &Rational, kb: &Rational, pa: i64) -> BlowupNumbers {
    let two_pa_minus_two = Rational::integer(2 * pa - 2);
    BlowupNumbers {
        kcube: base_kcube + kb * 2 + &two_pa_minus_two,
        ksq_e: -kb - &two_pa_minus_two,
        k_ee: two_pa_minus_two,
    }
}

/// `(-K_W)^3 - (-K_V)^3` expressed through `(-K_V)^2.E` and `p_a`.
pub fn degree_drop(ksq_e: &Rational, pa: i64) -> Rational {
    ksq_e * 2 + Rational::integer(2 * pa - 2)
}

/// Divisorial contractions to a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PointBlowupKind {
    #[serde(rename = "e2")]
    E2,
    #[serde(rename = "e3-4")]
    E34,
    #[serde(rename = "e5")]
    E5,
}

impl PointBlowupKind {
    pub const ALL: [PointBlowupKind; 3] = [PointBlowupKind::E2, PointBlowupKind::E34, PointBlowupKind::E5];

    /// `(-K_W)^3 - (-K_V)^3`.
    pub fn delta(self) -> Rational {
        match self {
            PointBlowupKind::E2 => Rational::integer(8),
            PointBlowupKind::E34 => Rational::integer(2),
            PointBlowupKind::E5 => Rational::new(1, 2),
        }
    }

    pub fn ksq_e(self) -> Rational {
        match self {
            PointBlowupKind::E2 => Rational::integer(4),
            PointBlowupKind::E34 => Rational::integer(2),
            PointBlowupKind::E5 => Rational::integer(1),
        }
    }

    pub fn discrepancy(self) -> Rational {
        match self {
            PointBlowupKind::E2 => Rational::integer(2),
            PointBlowupKind::E34 => Rational::integer(1),
            PointBlowupKind::E5 => Rational::new(1, 2),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            PointBlowupKind::E2 => "e2",
            PointBlowupKind::E34 => "e3-4",
            PointBlowupKind::E5 => "e5",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointBlowupNumbers {
    pub kcube: Rational,
    pub ksq_e: Rational,
    pub discrepancy: Rational,
}

/// Numbers of the blowup `V -> W` of a point of the given kind, `base_kcube = (-K_W)^3`.
pub fn point_blowup_case(kind: PointBlowupKind, base_kcube: &Rational) -> PointBlowupNumbers {
    PointBlowupNumbers { kcube: base_kcube - kind.delta(), ksq_e: kind.ksq_e(), discrepancy: kind.discrepancy() }
}

/// Chern data of a rank-2 bundle on a surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernData {
    pub c1sq: i64,
    pub c2: i64,
    pub base_ksq: i64,
}

impl ChernData {
    pub fn over_plane(c1sq: i64, c2: i64) -> Self {
        ChernData { c1sq, c2, base_ksq: 9 }
    }

    /// `6 K_Z^2 + 2 c1^2 - 8 c2`.
    pub fn anticanonical_cube(&self) -> i64 {
        6 * self.base_ksq + 2 * self.c1sq - 8 * self.c2
    }
}

/// Ring of `P(E) -> P^2` on the basis `(M, F)`, `M` tautological and `F` the
/// pull-back of a line. `c1(E)` is taken as `c` times the line with `c >= 0`,
/// `c^2 = c1sq`.
pub fn projbundle_ring(data: &ChernData) -> Result<IntersectionRing3, IcalcError> {
    if data.base_ksq != 9 {
        return Err(IcalcError::UnsupportedBase { base_ksq: data.base_ksq });
    }
    let c = exact_sqrt(data.c1sq as i128).ok_or(IcalcError::InvalidChernData { c1sq: data.c1sq })? as i64;
    // M^2 = c M.F - c2 F^2 on P^2 gives M^2.F = c and M^3 = c^2 - c2; M.F^2 = 1, F^3 = 0.
    let monomials =
        [Rational::integer(data.c1sq - data.c2), Rational::integer(c), Rational::integer(1), Rational::integer(0)];
    // -K = 2M + (3 - c) F.
    let canonical = DivisorClass::int(-2, c - 3);
    Ok(IntersectionRing3::from_monomials(["M", "F"], monomials, canonical))
}
