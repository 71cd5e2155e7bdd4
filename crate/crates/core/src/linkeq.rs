//! Quadratic link equations in two unknowns, solved with certificates.
//!
//! A relation `A a^2 + B ab + C b^2 = D` is solved over the unknowns
//! `(a, b)` = `(alpha, beta)`, each restricted to `(1/q)Z` for some `q` in an
//! allowed denominator set and to a sign condition. Nonexistence is only ever
//! claimed with a certificate that [`verify_certificate`] can replay.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::rational::{exact_sqrt, isqrt, Rational};

pub const DEFAULT_MODULUS_BOUND: u64 = 720;
pub const DEFAULT_SEARCH_BOUND: i64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinkEqError {
    #[error("link equations are only derived for (-K)^3 = 22, got {0}")]
    UnsupportedKcube(Rational),
    #[error("delta must be one of -1, 0, 1, got {0}")]
    InvalidDelta(i64),
    #[error("fiber degree {0} is not a del Pezzo degree (1..9)")]
    InvalidFiberDegree(i64),
    #[error("invalid quadratic form: {0}")]
    InvalidForm(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    NonNegative,
    Any,
}

impl Sign {
    pub fn admits(self, x: &Rational) -> bool {
        match self {
            Sign::Positive => x.is_positive(),
            Sign::NonNegative => !x.is_negative(),
            Sign::Any => true,
        }
    }
}

/// Constraints on one unknown.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarDomain {
    /// The unknown lies in `(1/q)Z` for at least one listed `q`.
    pub denominators: Vec<u32>,
    pub sign: Sign,
    pub fixed: Option<Rational>,
}

impl VarDomain {
    pub fn new(denominators: &[u32], sign: Sign) -> Self {
        VarDomain { denominators: denominators.to_vec(), sign, fixed: None }
    }

    pub fn integers(sign: Sign) -> Self {
        Self::new(&[1], sign)
    }

    pub fn fixed_at(mut self, value: Rational) -> Self {
        self.fixed = Some(value);
        self
    }

    pub fn admits(&self, x: &Rational) -> bool {
        if let Some(v) = &self.fixed {
            if v != x {
                return false;
            }
        }
        self.sign.admits(x) && self.denominators.iter().any(|&q| x.denom_divides(q))
    }
}

/// `A a^2 + B ab + C b^2 = D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
    pub alpha: VarDomain,
    pub beta: VarDomain,
}

impl QuadraticForm {
    pub fn new(coeffs: [Rational; 4], alpha: VarDomain, beta: VarDomain) -> Result<Self, LinkEqError> {
        for dom in [&alpha, &beta] {
            if dom.denominators.is_empty() {
                return Err(LinkEqError::InvalidForm("empty denominator set".into()));
            }
            if dom.denominators.iter().any(|q| !(1..=3).contains(q)) {
                return Err(LinkEqError::InvalidForm("denominators must lie in {1, 2, 3}".into()));
            }
        }
        let [a, b, c, d] = coeffs;
        if a.is_zero() && b.is_zero() && c.is_zero() {
            return Err(LinkEqError::InvalidForm("all quadratic coefficients vanish".into()));
        }
        Ok(QuadraticForm { a, b, c, d, alpha, beta })
    }

    pub fn integer(coeffs: [i64; 4], alpha: VarDomain, beta: VarDomain) -> Result<Self, LinkEqError> {
        Self::new(coeffs.map(Rational::integer), alpha, beta)
    }

    /// Left-hand side at `(x, y)`.
    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    pub fn is_solution(&self, x: &Rational, y: &Rational) -> bool {
        self.alpha.admits(x) && self.beta.admits(y) && self.eval(x, y) == self.d
    }

    /// `B^2 - 4AC`.
    pub fn discriminant(&self) -> Rational {
        &self.b * &self.b - &self.a * &self.c * 4
    }

    pub fn describe(&self) -> String {
        format!("{}*a^2 + {}*a*b + {}*b^2 = {}", self.a, self.b, self.c, self.d)
    }

    fn denominator_cases(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for &p in &self.alpha.denominators {
            for &q in &self.beta.denominators {
                if !out.contains(&(p, q)) {
                    out.push((p, q));
                }
            }
        }
        out
    }

    /// Integer form obtained by substituting `a = x/p`, `b = y/q` and clearing denominators.
    fn cleared(&self, p: u32, q: u32) -> Option<IntForm> {
        let (p, q) = (p as i64, q as i64);
        let terms = [
            &self.a / Rational::integer(p * p),
            &self.b / Rational::integer(p * q),
            &self.c / Rational::integer(q * q),
            self.d.clone(),
        ];
        let mut l: i128 = 1;
        for t in &terms {
            let den = t.denom().to_i128()?;
            l = lcm(l, den);
        }
        let mut ints = [0i128; 4];
        for (slot, t) in ints.iter_mut().zip(&terms) {
            let v = t * Rational::from(num_bigint::BigInt::from(l));
            *slot = v.numer().to_i128()?;
        }
        let g = ints.iter().fold(0i128, |g, &x| gcd(g, x));
        if g > 1 {
            for x in ints.iter_mut() {
                *x /= g;
            }
        }
        Some(IntForm { a: ints[0], b: ints[1], c: ints[2], d: ints[3], p: p as u32, q: q as u32 })
    }

    fn point(&self, f: &IntForm, x: i128, y: i128) -> Option<(Rational, Rational)> {
        let alpha = Rational::new(x.to_i64()?, f.p as i64);
        let beta = Rational::new(y.to_i64()?, f.q as i64);
        Some((alpha, beta))
    }
}

/// `i128` values travel as decimal strings; JSON numbers stop at 64 bits.
mod wide {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &i128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<i128, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

mod wide_pairs {
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[(i128, i128)], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<(String, String)> = v.iter().map(|(x, y)| (x.to_string(), y.to_string())).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(i128, i128)>, D::Error> {
        Vec::<(String, String)>::deserialize(d)?
            .into_iter()
            .map(|(x, y)| Ok((x.parse().map_err(D::Error::custom)?, y.parse().map_err(D::Error::custom)?)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntForm {
    #[serde(with = "wide")]
    pub a: i128,
    #[serde(with = "wide")]
    pub b: i128,
    #[serde(with = "wide")]
    pub c: i128,
    #[serde(with = "wide")]
    pub d: i128,
    /// Denominator substituted for alpha.
    pub p: u32,
    /// Denominator substituted for beta.
    pub q: u32,
}

impl IntForm {
    fn eval(&self, x: i128, y: i128) -> i128 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    fn disc(&self) -> i128 {
        self.b * self.b - 4 * self.a * self.c
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: i128, b: i128) -> i128 {
    if a == 0 || b == 0 {
        0
    } else {
        (a / gcd(a, b) * b).abs()
    }
}

fn prime_powers_up_to(bound: u64) -> Vec<u64> {
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !sieve[p] {
            continue;
        }
        let mut multiple = p * p;
        while multiple <= n {
            sieve[multiple] = false;
            multiple += p;
        }
        let mut pk = p as u64;
        while pk <= bound {
            out.push(pk);
            pk *= p as u64;
        }
    }
    out.sort_unstable();
    out
}

fn divisors(n: i128) -> Vec<i128> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            out.push(i);
            if i * i != n {
                out.push(n / i);
            }
        }
        i += 1;
    }
    out.sort_unstable();
    out
}

/// Residue evidence that one integer form has no solutions modulo `modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularCase {
    pub int_form: IntForm,
    pub modulus: u64,
    pub target: u64,
    /// All values taken by the left-hand side modulo `modulus`.
    pub attained: Vec<u64>,
    pub residues_checked: u64,
}

/// One denominator case of a factorization certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorCase {
    pub int_form: IntForm,
    /// Square root of the discriminant of `int_form`.
    #[serde(with = "wide")]
    pub sqrt_disc: i128,
    /// The product the two linear factors must realize.
    #[serde(with = "wide")]
    pub product: i128,
    pub divisor_pairs: usize,
    /// Every integer solution; none of them meets the sign or value constraints.
    #[serde(with = "wide_pairs")]
    pub integer_solutions: Vec<(i128, i128)>,
}

/// One denominator case of an empty bounded (definite) search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefiniteCase {
    pub int_form: IntForm,
    /// Every solution has `|y| <= y_bound` (resp. `|x|` when the form was swapped).
    #[serde(with = "wide")]
    pub y_bound: i128,
    #[serde(with = "wide_pairs")]
    pub integer_solutions: Vec<(i128, i128)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    ModularObstruction {
        cases: Vec<ModularCase>,
    },
    FiniteFactorization {
        cases: Vec<FactorCase>,
    },
    /// Homogeneous form with negative discriminant (only the origin), or a
    /// definite inhomogeneous form exhausted inside its bounding ellipse.
    NegativeDiscriminant {
        discriminant: Rational,
        cases: Vec<DefiniteCase>,
    },
    /// Homogeneous form whose discriminant is not a rational square: only the origin solves.
    NonSquareDiscriminant {
        discriminant: Rational,
        #[serde(with = "wide")]
        numer_isqrt: i128,
        #[serde(with = "wide")]
        denom_isqrt: i128,
    },
    /// One unknown pinned: every rational root of the resulting univariate polynomial is inadmissible.
    RationalRoots {
        coefficients: [Rational; 3],
        roots: Vec<Rational>,
    },
    /// The right fiber degree `factor * alpha` can never be an integer in `1..=max_value`.
    Divisibility {
        factor: i64,
        max_value: i64,
        alpha_denominators: Vec<u32>,
    },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::ModularObstruction { .. } => "modular_obstruction",
            Certificate::FiniteFactorization { .. } => "finite_factorization",
            Certificate::NegativeDiscriminant { .. } => "negative_discriminant",
            Certificate::NonSquareDiscriminant { .. } => "non_square_discriminant",
            Certificate::RationalRoots { .. } => "rational_roots",
            Certificate::Divisibility { .. } => "divisibility",
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            Certificate::ModularObstruction { cases } => cases.iter().map(|c| c.modulus).max(),
            Certificate::Divisibility { factor, .. } => Some(*factor as u64),
            _ => None,
        }
    }

    pub fn residues_checked(&self) -> u64 {
        match self {
            Certificate::ModularObstruction { cases } => cases.iter().map(|c| c.residues_checked).sum(),
            _ => 0,
        }
    }
}

/// A line of solutions through the origin of a homogeneous form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ray {
    /// Primitive integer direction `(x, y)`.
    pub direction: (i64, i64),
    /// Smallest admissible scalings, one per denominator case; every positive
    /// integer multiple of each is again a solution.
    pub generators: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SolutionStatus {
    Solutions {
        points: Vec<(Rational, Rational)>,
        /// True when `points` (with `rays`) is the whole solution set.
        complete: bool,
        rays: Vec<Ray>,
    },
    NoSolutions {
        certificate: Certificate,
    },
    Unresolved {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub form: QuadraticForm,
    pub status: SolutionStatus,
    /// Set when the arithmetic admits a solution that is ruled out on other grounds.
    pub exclusion: Option<String>,
}

impl SolutionReport {
    pub fn has_solutions(&self) -> bool {
        matches!(self.status, SolutionStatus::Solutions { .. })
    }

    pub fn is_no_solutions(&self) -> bool {
        matches!(self.status, SolutionStatus::NoSolutions { .. })
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match &self.status {
            SolutionStatus::NoSolutions { certificate } => Some(certificate),
            _ => None,
        }
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        match &self.status {
            SolutionStatus::Solutions { points, .. } => points,
            _ => &[],
        }
    }

    pub fn status_name(&self) -> &'static str {
        match self.status {
            SolutionStatus::Solutions { .. } => "solutions",
            SolutionStatus::NoSolutions { .. } => "no_solutions",
            SolutionStatus::Unresolved { .. } => "unresolved",
        }
    }

    /// Reported solutions with `|alpha|, |beta| <= bound`, ray multiples expanded.
    pub fn solutions_in_box(&self, bound: i64) -> BTreeSet<(Rational, Rational)> {
        let mut out = BTreeSet::new();
        if let SolutionStatus::Solutions { points, rays, .. } = &self.status {
            let inside = |x: &Rational, y: &Rational| x.abs() <= bound && y.abs() <= bound;
            for (x, y) in points {
                if inside(x, y) {
                    out.insert((x.clone(), y.clone()));
                }
            }
            for ray in rays {
                let (dx, dy) = ray.direction;
                for g in &ray.generators {
                    let mut k = 1i64;
                    loop {
                        let lambda = g * k;
                        let x = &lambda * dx;
                        let y = &lambda * dy;
                        if !inside(&x, &y) {
                            break;
                        }
                        out.insert((x, y));
                        k += 1;
                    }
                }
            }
        }
        out
    }

    /// Audit record `{form, status, certificate_kind, modulus, residues_checked}`.
    pub fn audit(&self) -> serde_json::Value {
        let cert = self.certificate();
        json!({
            "form": self.form.describe(),
            "status": self.status_name(),
            "certificate_kind": cert.map(|c| c.kind()),
            "modulus": cert.and_then(|c| c.modulus()),
            "residues_checked": cert.map(|c| c.residues_checked()).unwrap_or(0),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub modulus_bound: u64,
    /// Numerator range scanned when the solution set may be infinite.
    pub search_bound: i64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { modulus_bound: DEFAULT_MODULUS_BOUND, search_bound: DEFAULT_SEARCH_BOUND }
    }
}

fn modular_case(f: &IntForm, bound: u64) -> Option<ModularCase> {
    // Solvability modulo m is equivalent to solvability modulo each prime
    // power dividing m, so the least obstructing modulus is a prime power.
    for m in prime_powers_up_to(bound) {
        let mi = m as i128;
        let (a, b, c) = (f.a.rem_euclid(mi), f.b.rem_euclid(mi), f.c.rem_euclid(mi));
        let target = f.d.rem_euclid(mi);
        let hit = (0..mi).any(|x| (0..mi).any(|y| (a * x * x + b * x * y + c * y * y) % mi == target));
        if !hit {
            return Some(ModularCase {
                int_form: *f,
                modulus: m,
                target: target as u64,
                attained: residue_image(f, m),
                residues_checked: m * m,
            });
        }
    }
    None
}

fn residue_image(f: &IntForm, m: u64) -> Vec<u64> {
    let mi = m as i128;
    let mut seen = BTreeSet::new();
    for x in 0..mi {
        for y in 0..mi {
            seen.insert(f.eval(x, y).rem_euclid(mi) as u64);
        }
    }
    seen.into_iter().collect()
}

/// Least modulus `m <= modulus_bound` at which the form has no solution
/// residues, for every denominator case of the unknowns.
pub fn modular_obstruction_search(form: &QuadraticForm, modulus_bound: u64) -> Option<Certificate> {
    let mut cases = Vec::new();
    for (p, q) in form.denominator_cases() {
        let f = form.cleared(p, q)?;
        cases.push(modular_case(&f, modulus_bound)?);
    }
    Some(Certificate::ModularObstruction { cases })
}

fn is_rational_square(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = exact_sqrt(x.numer().to_i128()?)?;
    let d = exact_sqrt(x.denom().to_i128()?)?;
    Some(Rational::from(num_bigint::BigInt::from(n)) / Rational::from(num_bigint::BigInt::from(d)))
}

/// Rational roots of `c2 t^2 + c1 t + c0`, or `None` if the polynomial vanishes identically.
fn rational_roots(c2: &Rational, c1: &Rational, c0: &Rational) -> Option<Vec<Rational>> {
    if c2.is_zero() {
        if c1.is_zero() {
            return if c0.is_zero() { None } else { Some(vec![]) };
        }
        return Some(vec![-c0 / c1]);
    }
    let disc = c1 * c1 - c2 * c0 * 4;
    let mut roots = match is_rational_square(&disc) {
        Some(s) => {
            let two_a = c2 * 2;
            vec![(-c1 - &s) / &two_a, (-c1 + &s) / &two_a]
        }
        None => vec![],
    };
    roots.sort();
    roots.dedup();
    Some(roots)
}

fn solve_fixed(form: &QuadraticForm) -> SolutionStatus {
    // Substitute the pinned unknown and solve for the other.
    let (coeffs, alpha_fixed) = match (&form.alpha.fixed, &form.beta.fixed) {
        (Some(x), Some(y)) => {
            return if form.is_solution(x, y) {
                SolutionStatus::Solutions { points: vec![(x.clone(), y.clone())], complete: true, rays: vec![] }
            } else {
                SolutionStatus::NoSolutions {
                    certificate: Certificate::RationalRoots {
                        coefficients: [Rational::zero(), Rational::zero(), form.eval(x, y) - &form.d],
                        roots: vec![],
                    },
                }
            };
        }
        (Some(x), None) => ([form.c.clone(), &form.b * x, &form.a * x * x - &form.d], Some(x.clone())),
        (None, Some(y)) => ([form.a.clone(), &form.b * y, &form.c * y * y - &form.d], None),
        (None, None) => unreachable!("solve_fixed needs a pinned unknown"),
    };
    let Some(roots) = rational_roots(&coeffs[0], &coeffs[1], &coeffs[2]) else {
        return SolutionStatus::Unresolved { reason: "pinned relation holds identically".into() };
    };
    let mut points = Vec::new();
    for t in &roots {
        let (x, y) = match &alpha_fixed {
            Some(x) => (x.clone(), t.clone()),
            None => (t.clone(), form.beta.fixed.clone().unwrap()),
        };
        if form.is_solution(&x, &y) {
            points.push((x, y));
        }
    }
    if points.is_empty() {
        SolutionStatus::NoSolutions { certificate: Certificate::RationalRoots { coefficients: coeffs, roots } }
    } else {
        SolutionStatus::Solutions { points, complete: true, rays: vec![] }
    }
}

fn ray_generators(form: &QuadraticForm, dx: i64, dy: i64) -> Vec<Rational> {
    if !form.alpha.sign.admits(&Rational::integer(dx)) || !form.beta.sign.admits(&Rational::integer(dy)) {
        return vec![];
    }
    // alpha = lambda*dx in (1/p)Z and beta = lambda*dy in (1/q)Z, with dx, dy
    // coprime, holds exactly for lambda in (1/gcd(p dx, q dy))Z.
    let mut gens: Vec<Rational> = form
        .denominator_cases()
        .into_iter()
        .map(|(p, q)| {
            let m = gcd(p as i128 * dx as i128, q as i128 * dy as i128) as i64;
            Rational::new(1, m)
        })
        .collect();
    gens.sort();
    gens.dedup();
    gens
}

fn solve_homogeneous(form: &QuadraticForm) -> SolutionStatus {
    let disc = form.discriminant();
    let origin = (Rational::zero(), Rational::zero());
    let origin_ok = form.alpha.admits(&origin.0) && form.beta.admits(&origin.1);
    let only_origin = |certificate: Certificate| {
        if origin_ok {
            SolutionStatus::Solutions { points: vec![origin.clone()], complete: true, rays: vec![] }
        } else {
            SolutionStatus::NoSolutions { certificate }
        }
    };
    if disc.is_negative() {
        return only_origin(Certificate::NegativeDiscriminant { discriminant: disc, cases: vec![] });
    }
    let Some(s) = is_rational_square(&disc) else {
        let n = disc.numer().to_i128().unwrap_or(i128::MAX);
        let d = disc.denom().to_i128().unwrap_or(i128::MAX);
        return only_origin(Certificate::NonSquareDiscriminant {
            discriminant: disc,
            numer_isqrt: isqrt(n),
            denom_isqrt: isqrt(d),
        });
    };
    // Directions (x, y) of the rational lines A x^2 + B xy + C y^2 = 0.
    let mut ratios: Vec<Rational> = Vec::new();
    let mut directions: Vec<(i64, i64)> = Vec::new();
    if form.a.is_zero() {
        directions.push((1, 0));
        if !form.b.is_zero() {
            ratios.push(-&form.c / &form.b);
        }
    } else {
        let two_a = &form.a * 2;
        ratios.push((-&form.b - &s) / &two_a);
        ratios.push((-&form.b + &s) / &two_a);
    }
    ratios.sort();
    ratios.dedup();
    for t in &ratios {
        let x = t.numer().to_i64().unwrap_or(0);
        let y = t.denom().to_i64().unwrap_or(1);
        directions.push((x, y));
    }
    let mut signed: Vec<(i64, i64)> = Vec::new();
    for (x, y) in directions {
        for d in [(x, y), (-x, -y)] {
            if !signed.contains(&d) {
                signed.push(d);
            }
        }
    }
    let mut rays = Vec::new();
    let mut points = Vec::new();
    for (dx, dy) in signed {
        let generators = ray_generators(form, dx, dy);
        if let Some(g) = generators.first() {
            points.push((g * dx, g * dy));
            rays.push(Ray { direction: (dx, dy), generators });
        }
    }
    if origin_ok {
        points.insert(0, origin);
    }
    if points.is_empty() {
        return SolutionStatus::NoSolutions {
            certificate: Certificate::RationalRoots {
                coefficients: [form.a.clone(), form.b.clone(), form.c.clone()],
                roots: ratios,
            },
        };
    }
    SolutionStatus::Solutions { points, complete: true, rays }
}

/// `(sqrt(disc), product, divisor pairs tried, integer solutions)`.
type Factorization = (i128, i128, usize, Vec<(i128, i128)>);

/// All integer solutions of `f = d` when the discriminant is a nonzero square
/// and `d != 0`, by splitting `4A f` into two linear factors.
fn factor_solutions(f: &IntForm) -> Option<Factorization> {
    let disc = f.disc();
    let s = exact_sqrt(disc)?;
    if s == 0 || f.d == 0 {
        return None;
    }
    let mut sols = BTreeSet::new();
    let mut pairs = 0usize;
    if f.a == 0 && f.c == 0 {
        // B x y = D.
        if f.d % f.b == 0 {
            let n = f.d / f.b;
            for u in divisors(n) {
                for u in [u, -u] {
                    pairs += 1;
                    sols.insert((u, n / u));
                }
            }
        }
        return Some((s, f.d, pairs, sols.into_iter().collect()));
    }
    let swapped = f.a == 0;
    let (a, b) = if swapped { (f.c, f.b) } else { (f.a, f.b) };
    // 4a(a x^2 + b x y + c y^2) = (2a x + (b + s) y)(2a x + (b - s) y).
    let n = 4 * a * f.d;
    for u in divisors(n) {
        for u in [u, -u] {
            pairs += 1;
            let v = n / u;
            // u - v = 2 s y.
            let num = u - v;
            if num % (2 * s) != 0 {
                continue;
            }
            let y = num / (2 * s);
            let rest = u - (b + s) * y;
            if rest % (2 * a) != 0 {
                continue;
            }
            let x = rest / (2 * a);
            sols.insert(if swapped { (y, x) } else { (x, y) });
        }
    }
    let sols: Vec<(i128, i128)> = sols.into_iter().filter(|&(x, y)| f.eval(x, y) == f.d).collect();
    Some((s, n, pairs, sols))
}

/// All integer solutions of a definite form, with the `|y|` bound used.
fn definite_solutions(f: &IntForm) -> Option<(i128, Vec<(i128, i128)>)> {
    let disc = f.disc();
    if disc >= 0 || f.a == 0 {
        return None;
    }
    // 4A f = (2A x + B y)^2 - disc y^2, so y^2 <= 4A D / (-disc).
    let rhs = 4 * f.a * f.d;
    let y_bound = if rhs < 0 { -1 } else { isqrt(rhs / (-disc)) };
    let mut sols = Vec::new();
    for y in -y_bound..=y_bound {
        sols.extend(solve_for_x(f, y));
    }
    Some((y_bound.max(0), sols))
}

/// Integer `x` with `f(x, y) = d` for a fixed `y`.
fn solve_for_x(f: &IntForm, y: i128) -> Vec<(i128, i128)> {
    let mut out = Vec::new();
    if f.a == 0 {
        let c0 = f.c * y * y - f.d;
        let c1 = f.b * y;
        if c1 != 0 && c0 % c1 == 0 {
            out.push((-c0 / c1, y));
        }
        return out;
    }
    let disc = f.b * f.b * y * y - 4 * f.a * (f.c * y * y - f.d);
    if let Some(s) = exact_sqrt(disc) {
        for num in [-f.b * y - s, -f.b * y + s] {
            if num % (2 * f.a) == 0 {
                let x = num / (2 * f.a);
                if !out.contains(&(x, y)) {
                    out.push((x, y));
                }
            }
        }
    }
    out
}

fn admissible_points(form: &QuadraticForm, f: &IntForm, sols: &[(i128, i128)]) -> Vec<(Rational, Rational)> {
    sols.iter().filter_map(|&(x, y)| form.point(f, x, y)).filter(|(x, y)| form.is_solution(x, y)).collect()
}

fn dedup_points(mut pts: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    pts.sort();
    pts.dedup();
    pts
}

/// Solve a quadratic form, returning solutions or a replayable certificate.
pub fn solve(form: &QuadraticForm, opts: &SolveOptions) -> SolutionReport {
    let status = solve_status(form, opts);
    SolutionReport { form: form.clone(), status, exclusion: None }
}

fn solve_status(form: &QuadraticForm, opts: &SolveOptions) -> SolutionStatus {
    if form.alpha.fixed.is_some() || form.beta.fixed.is_some() {
        return solve_fixed(form);
    }
    if form.d.is_zero() {
        return solve_homogeneous(form);
    }
    if let Some(certificate) = modular_obstruction_search(form, opts.modulus_bound) {
        return SolutionStatus::NoSolutions { certificate };
    }
    let mut forms = Vec::new();
    for (p, q) in form.denominator_cases() {
        match form.cleared(p, q) {
            Some(f) => forms.push(f),
            None => return SolutionStatus::Unresolved { reason: "coefficients exceed 128-bit range".into() },
        }
    }
    let disc = form.discriminant();

    if is_rational_square(&disc).is_some_and(|s| !s.is_zero()) {
        let mut cases = Vec::new();
        let mut points = Vec::new();
        for f in &forms {
            let (sqrt_disc, product, divisor_pairs, sols) =
                factor_solutions(f).expect("square discriminant survives clearing");
            points.extend(admissible_points(form, f, &sols));
            cases.push(FactorCase { int_form: *f, sqrt_disc, product, divisor_pairs, integer_solutions: sols });
        }
        return if points.is_empty() {
            SolutionStatus::NoSolutions { certificate: Certificate::FiniteFactorization { cases } }
        } else {
            SolutionStatus::Solutions { points: dedup_points(points), complete: true, rays: vec![] }
        };
    }

    if disc.is_negative() {
        let mut cases = Vec::new();
        let mut points = Vec::new();
        for f in &forms {
            let (y_bound, sols) = definite_solutions(f).expect("definite form has a nonzero square coefficient");
            points.extend(admissible_points(form, f, &sols));
            cases.push(DefiniteCase { int_form: *f, y_bound, integer_solutions: sols });
        }
        return if points.is_empty() {
            SolutionStatus::NoSolutions { certificate: Certificate::NegativeDiscriminant { discriminant: disc, cases } }
        } else {
            SolutionStatus::Solutions { points: dedup_points(points), complete: true, rays: vec![] }
        };
    }

    // Indefinite with infinitely many candidates: scan numerators of the unknown
    // whose square coefficient lets the other be solved exactly.
    let mut points = Vec::new();
    for f in &forms {
        let n = opts.search_bound as i128;
        let sols: Vec<(i128, i128)> = if f.a != 0 {
            (-n..=n).flat_map(|y| solve_for_x(f, y)).collect()
        } else {
            let t = IntForm { a: f.c, b: f.b, c: f.a, d: f.d, p: f.q, q: f.p };
            (-n..=n).flat_map(|x| solve_for_x(&t, x)).map(|(y, x)| (x, y)).collect()
        };
        points.extend(admissible_points(form, f, &sols));
    }
    if points.is_empty() {
        SolutionStatus::Unresolved {
            reason: format!(
                "no modular obstruction up to {} and no solution with numerators up to {}",
                opts.modulus_bound, opts.search_bound
            ),
        }
    } else {
        SolutionStatus::Solutions { points: dedup_points(points), complete: false, rays: vec![] }
    }
}

/// Replays a certificate from scratch against its form.
pub fn verify_certificate(form: &QuadraticForm, cert: &Certificate) -> Result<(), String> {
    match cert {
        Certificate::ModularObstruction { cases } => {
            let expected = form.denominator_cases();
            if cases.len() != expected.len() {
                return Err("certificate does not cover every denominator case".into());
            }
            for (case, (p, q)) in cases.iter().zip(expected) {
                let f = form.cleared(p, q).ok_or("form out of range")?;
                if f != case.int_form {
                    return Err(format!("cleared form mismatch for denominators ({p}, {q})"));
                }
                let image = residue_image(&f, case.modulus);
                if image != case.attained {
                    return Err(format!("residue table mismatch mod {}", case.modulus));
                }
                if image.contains(&(f.d.rem_euclid(case.modulus as i128) as u64)) {
                    return Err(format!("target residue is attained mod {}", case.modulus));
                }
            }
            Ok(())
        }
        Certificate::FiniteFactorization { cases } => {
            for case in cases {
                let f = case.int_form;
                let (s, n, _, sols) = factor_solutions(&f).ok_or("discriminant is not a nonzero square")?;
                if s != case.sqrt_disc || n != case.product || sols != case.integer_solutions {
                    return Err("factorization replay differs".into());
                }
                if !admissible_points(form, &f, &sols).is_empty() {
                    return Err("an integer solution satisfies the constraints".into());
                }
            }
            Ok(())
        }
        Certificate::NegativeDiscriminant { discriminant, cases } => {
            if &form.discriminant() != discriminant || !discriminant.is_negative() {
                return Err("discriminant is not negative".into());
            }
            if form.d.is_zero() {
                let zero = Rational::zero();
                return if form.alpha.admits(&zero) && form.beta.admits(&zero) {
                    Err("origin is admissible".into())
                } else {
                    Ok(())
                };
            }
            for case in cases {
                let (_, sols) = definite_solutions(&case.int_form).ok_or("form is not definite")?;
                if sols != case.integer_solutions || !admissible_points(form, &case.int_form, &sols).is_empty() {
                    return Err("bounded enumeration replay differs".into());
                }
            }
            Ok(())
        }
        Certificate::NonSquareDiscriminant { discriminant, numer_isqrt, denom_isqrt } => {
            if &form.discriminant() != discriminant || !form.d.is_zero() {
                return Err("discriminant mismatch".into());
            }
            let n = discriminant.numer().to_i128().ok_or("out of range")?;
            let d = discriminant.denom().to_i128().ok_or("out of range")?;
            let brackets = |v: i128, r: i128| r * r <= v && v < (r + 1) * (r + 1);
            let strict_n = numer_isqrt * numer_isqrt != n;
            let strict_d = denom_isqrt * denom_isqrt != d;
            if n < 0 || !brackets(n, *numer_isqrt) || !brackets(d, *denom_isqrt) || !(strict_n || strict_d) {
                return Err("squareness witness invalid".into());
            }
            let zero = Rational::zero();
            if form.alpha.admits(&zero) && form.beta.admits(&zero) {
                return Err("origin is admissible".into());
            }
            Ok(())
        }
        Certificate::RationalRoots { coefficients, roots } => {
            let recomputed = rational_roots(&coefficients[0], &coefficients[1], &coefficients[2]);
            if recomputed.as_ref() != Some(roots) {
                return Err("root replay differs".into());
            }
            match solve_status(form, &SolveOptions::default()) {
                SolutionStatus::NoSolutions { .. } => Ok(()),
                _ => Err("form has admissible solutions".into()),
            }
        }
        Certificate::Divisibility { factor, max_value, alpha_denominators } => {
            for &q in alpha_denominators {
                for n in 1..=(max_value * q as i64) {
                    let alpha = Rational::new(n, q as i64);
                    let value = &alpha * *factor;
                    if value.is_integer() && value <= *max_value {
                        return Err(format!("alpha = {alpha} gives {value}"));
                    }
                }
            }
            Ok(())
        }
    }
}

fn require_22(kcube: &Rational) -> Result<(), LinkEqError> {
    if *kcube != 22 {
        return Err(LinkEqError::UnsupportedKcube(kcube.clone()));
    }
    Ok(())
}

/// `(kcube/2) a^2 - ab - b^2 = delta` for a link ending in a half-point contraction,
/// `a` a positive integer and `b` a nonnegative integer.
pub fn e5_form(kcube: &Rational, delta: i64, beta_constraint: Option<i64>) -> Result<QuadraticForm, LinkEqError> {
    require_22(kcube)?;
    if !(-1..=1).contains(&delta) {
        return Err(LinkEqError::InvalidDelta(delta));
    }
    let mut beta = VarDomain::integers(Sign::NonNegative);
    if let Some(b) = beta_constraint {
        beta = beta.fixed_at(Rational::integer(b));
    }
    QuadraticForm::new(
        [kcube / 2, Rational::integer(-1), Rational::integer(-1), Rational::integer(delta)],
        VarDomain::integers(Sign::Positive),
        beta,
    )
}

pub fn solve_e5_pair(
    kcube: &Rational,
    delta: i64,
    beta_constraint: Option<i64>,
    opts: &SolveOptions,
) -> Result<SolutionReport, LinkEqError> {
    Ok(solve(&e5_form(kcube, delta, beta_constraint)?, opts))
}

/// `kcube a^2 - 2(12 - deg) ab + 2 b^2 = rhs`, halved.
fn conic_form(kcube: &Rational, deg_delta: i64, rhs: i64) -> Result<QuadraticForm, LinkEqError> {
    require_22(kcube)?;
    if deg_delta < 0 {
        return Err(LinkEqError::InvalidForm(format!("negative discriminant degree {deg_delta}")));
    }
    let dens: &[u32] = if deg_delta == 0 { &[2] } else { &[1] };
    QuadraticForm::new(
        [kcube / 2, Rational::integer(deg_delta - 12), Rational::integer(1), Rational::integer(rhs)],
        VarDomain::new(dens, Sign::Positive),
        VarDomain::new(dens, Sign::Positive),
    )
}

/// Conic bundle on both sides.
pub fn cc_form(kcube: &Rational, deg_delta: i64, beta_constraint: Option<i64>) -> Result<QuadraticForm, LinkEqError> {
    let mut form = conic_form(kcube, deg_delta, 1)?;
    if let Some(b) = beta_constraint {
        form.beta = form.beta.fixed_at(Rational::integer(b));
    }
    Ok(form)
}

pub const DISCRIMINANT_LINE_REASON: &str = "discriminant line contradicts extremality";

pub fn solve_cc(
    kcube: &Rational,
    deg_delta: i64,
    beta_constraint: Option<i64>,
    opts: &SolveOptions,
) -> Result<SolutionReport, LinkEqError> {
    let form = cc_form(kcube, deg_delta, beta_constraint)?;
    let mut report = solve(&form, opts);
    // With beta = 1 the relation is linear: 12 = 11 a + deg. Its only positive
    // solution a = 1 makes the discriminant a line.
    if beta_constraint == Some(1) && report.has_solutions() {
        report.exclusion = Some(DISCRIMINANT_LINE_REASON.to_string());
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdReport {
    pub report: SolutionReport,
    /// `(12 - deg)^2 - 44` for the halved form.
    pub discriminant: Rational,
    /// Solution point chosen for the right-hand fibration.
    pub chosen: Option<(Rational, Rational)>,
    /// `K^2` of the right-hand del Pezzo fiber at the chosen point: `22 a - 12 b`.
    pub fiber_degree: Option<Rational>,
    /// Ray points dropped because their fiber degree is not positive.
    pub discarded: Vec<(Rational, Rational)>,
}

/// Conic bundle on the left, del Pezzo fibration on the right.
pub fn cd_form(kcube: &Rational, deg_delta: i64) -> Result<QuadraticForm, LinkEqError> {
    conic_form(kcube, deg_delta, 0)
}

pub fn solve_cd(kcube: &Rational, deg_delta: i64, opts: &SolveOptions) -> Result<CdReport, LinkEqError> {
    let form = cd_form(kcube, deg_delta)?;
    let report = solve(&form, opts);
    let discriminant = form.discriminant();
    let mut chosen = None;
    let mut fiber_degree = None;
    let mut discarded = Vec::new();
    for (a, b) in report.points() {
        let fiber = kcube * a - Rational::integer(12) * b;
        if fiber.is_positive() && chosen.is_none() {
            chosen = Some((a.clone(), b.clone()));
            fiber_degree = Some(fiber);
        } else {
            discarded.push((a.clone(), b.clone()));
        }
    }
    Ok(CdReport { report, discriminant, chosen, fiber_degree, discarded })
}

/// del Pezzo fibrations on both sides: `11 a = d b` where `11 a` is the right fiber degree.
pub fn solve_dd(kcube: &Rational, fiber_sq_left: i64) -> Result<SolutionReport, LinkEqError> {
    require_22(kcube)?;
    if !(1..=9).contains(&fiber_sq_left) {
        return Err(LinkEqError::InvalidFiberDegree(fiber_sq_left));
    }
    // Recorded as the linear relation 11 a^2 - d ab = 0 on the positive quadrant
    // so that the shared report machinery applies; the certificate is the
    // divisibility argument, not the homogeneous ray computation.
    let form = QuadraticForm::new(
        [kcube / 2, Rational::integer(-fiber_sq_left), Rational::zero(), Rational::zero()],
        VarDomain::new(&[1, 2, 3], Sign::Positive),
        VarDomain::new(&[1, 2, 3], Sign::Positive),
    )?;
    let certificate = Certificate::Divisibility { factor: 11, max_value: 9, alpha_denominators: vec![1, 2, 3] };
    Ok(SolutionReport {
        form,
        status: SolutionStatus::NoSolutions { certificate },
        exclusion: Some("right fiber degree must be divisible by 11".to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn k22() -> Rational {
        Rational::integer(22)
    }

    #[test]
    fn e5_minus_one_has_one_three() {
        let r = solve_e5_pair(&k22(), -1, None, &SolveOptions::default()).unwrap();
        assert!(r.points().contains(&(Rational::integer(1), Rational::integer(3))));
        for (a, b) in r.points() {
            assert_eq!(r.form.eval(a, b), -1);
        }
    }

    #[test]
    fn e5_plus_one_obstructed_mod_3() {
        let r = solve_e5_pair(&k22(), 1, None, &SolveOptions::default()).unwrap();
        let cert = r.certificate().unwrap();
        assert_eq!(cert.kind(), "modular_obstruction");
        assert_eq!(cert.modulus(), Some(3));
        verify_certificate(&r.form, cert).unwrap();
    }

    #[test]
    fn e5_zero_nonsquare() {
        let r = solve_e5_pair(&k22(), 0, None, &SolveOptions::default()).unwrap();
        let cert = r.certificate().unwrap();
        assert_eq!(cert.kind(), "non_square_discriminant");
        verify_certificate(&r.form, cert).unwrap();
    }

    #[test]
    fn e5_beta_one() {
        let r = solve_e5_pair(&k22(), -1, Some(1), &SolveOptions::default()).unwrap();
        let cert = r.certificate().unwrap();
        match cert {
            Certificate::RationalRoots { roots, .. } => assert_eq!(roots, &vec![Rational::zero(), rat(1, 11)]),
            other => panic!("unexpected {other:?}"),
        }
        verify_certificate(&r.form, cert).unwrap();
    }

    #[test]
    fn e5_rejects_other_kcube_and_delta() {
        assert!(matches!(
            solve_e5_pair(&Rational::integer(20), 1, None, &SolveOptions::default()),
            Err(LinkEqError::UnsupportedKcube(_))
        ));
        assert!(matches!(e5_form(&k22(), 2, None), Err(LinkEqError::InvalidDelta(2))));
    }

    #[test]
    fn cc_zero_factorization() {
        let r = solve_cc(&k22(), 0, None, &SolveOptions::default()).unwrap();
        let cert = r.certificate().unwrap();
        assert_eq!(cert.kind(), "finite_factorization");
        match cert {
            Certificate::FiniteFactorization { cases } => {
                assert_eq!(cases[0].integer_solutions, vec![(0, -2), (0, 2)]);
            }
            _ => unreachable!(),
        }
        verify_certificate(&r.form, cert).unwrap();
        // No modulus can obstruct, since (0, 1) solves the unconstrained relation.
        assert!(modular_obstruction_search(&r.form, 50).is_none());
    }

    #[test]
    fn cc_beta_one() {
        let r = solve_cc(&k22(), 1, Some(1), &SolveOptions::default()).unwrap();
        assert_eq!(r.points(), &[(Rational::integer(1), Rational::integer(1))]);
        assert_eq!(r.exclusion.as_deref(), Some(DISCRIMINANT_LINE_REASON));
        let r4 = solve_cc(&k22(), 4, Some(1), &SolveOptions::default()).unwrap();
        assert!(r4.is_no_solutions());
        assert_eq!(r4.exclusion, None);
    }

    #[test]
    fn cd_zero_fiber_five() {
        let r = solve_cd(&k22(), 0, &SolveOptions::default()).unwrap();
        assert_eq!(r.discriminant, 100);
        assert_eq!(r.chosen, Some((rat(1, 2), rat(1, 2))));
        assert_eq!(r.fiber_degree, Some(Rational::integer(5)));
        assert_eq!(r.discarded, vec![(rat(1, 2), rat(11, 2))]);
    }

    #[test]
    fn cd_nonsquare_and_negative() {
        let expected = [77, 56, 37, 20, 5];
        for (i, disc) in expected.iter().enumerate() {
            let r = solve_cd(&k22(), i as i64 + 1, &SolveOptions::default()).unwrap();
            assert_eq!(r.discriminant, *disc);
            assert_eq!(r.report.certificate().unwrap().kind(), "non_square_discriminant");
        }
        for deg in 6..=12 {
            let r = solve_cd(&k22(), deg, &SolveOptions::default()).unwrap();
            assert_eq!(r.report.certificate().unwrap().kind(), "negative_discriminant");
            assert!(r.fiber_degree.is_none());
        }
        // Square discriminant but both ratios negative.
        let r = solve_cd(&k22(), 24, &SolveOptions::default()).unwrap();
        assert_eq!(r.discriminant, 100);
        assert!(r.report.is_no_solutions());
    }

    #[test]
    fn dd_always_divisibility() {
        for d in 1..=9 {
            let r = solve_dd(&k22(), d).unwrap();
            let cert = r.certificate().unwrap();
            assert_eq!(cert.kind(), "divisibility");
            verify_certificate(&r.form, cert).unwrap();
        }
        assert!(solve_dd(&k22(), 10).is_err());
    }

    #[test]
    fn sum_of_two_squares_three() {
        let form = QuadraticForm::integer([1, 0, 1, 3], VarDomain::integers(Sign::Any), VarDomain::integers(Sign::Any))
            .unwrap();
        let cert = modular_obstruction_search(&form, 720).unwrap();
        assert_eq!(cert.modulus(), Some(4));
        verify_certificate(&form, &cert).unwrap();
    }

    #[test]
    fn tampered_certificate_fails() {
        let r = solve_e5_pair(&k22(), 1, None, &SolveOptions::default()).unwrap();
        let mut cert = r.certificate().unwrap().clone();
        if let Certificate::ModularObstruction { cases } = &mut cert {
            let target = cases[0].target;
            cases[0].attained.push(target);
        }
        assert!(verify_certificate(&r.form, &cert).is_err());
    }

    #[test]
    fn audit_record_shape() {
        let r = solve_e5_pair(&k22(), 1, None, &SolveOptions::default()).unwrap();
        let audit = r.audit();
        assert_eq!(audit["status"], "no_solutions");
        assert_eq!(audit["certificate_kind"], "modular_obstruction");
        assert_eq!(audit["modulus"], 3);
        assert_eq!(audit["residues_checked"], 9);
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_powers_up_to(10), vec![2, 3, 4, 5, 7, 8, 9]);
    }
}
