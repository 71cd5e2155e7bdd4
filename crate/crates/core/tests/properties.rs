use std::collections::BTreeSet;

use fano12::bounds::max_components;
use fano12::dplattice::{DPLattice, LatticeClass};
use fano12::enumerate::castelnuovo_bound;
use fano12::icalc::{eval_trilinear, DivisorClass, IntersectionRing3};
use fano12::linkeq::{self, Certificate, QuadraticForm, Sign, SolutionStatus, SolveOptions, VarDomain};
use fano12::{rat, Rational};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Positive), Just(Sign::NonNegative), Just(Sign::Any)]
}

fn domain() -> impl Strategy<Value = VarDomain> {
    (prop_oneof![Just(vec![1u32]), Just(vec![1, 2]), Just(vec![1, 3])], sign()).prop_map(|(d, s)| VarDomain::new(&d, s))
}

fn form() -> impl Strategy<Value = QuadraticForm> {
    ([-6i64..=6, -6..=6, -6..=6, -12..=12], domain(), domain())
        .prop_filter("nonzero quadratic part", |(c, _, _)| c[..3].iter().any(|&x| x != 0))
        .prop_map(|(c, a, b)| QuadraticForm::integer(c, a, b).unwrap())
}

fn brute_force(form: &QuadraticForm, bound: i64) -> BTreeSet<(Rational, Rational)> {
    let values = |dom: &VarDomain| {
        let mut v = BTreeSet::new();
        for &q in &dom.denominators {
            let q = q as i64;
            for n in -bound * q..=bound * q {
                let x = rat(n, q);
                if dom.admits(&x) {
                    v.insert(x);
                }
            }
        }
        v
    };
    let ys = values(&form.beta);
    let mut out = BTreeSet::new();
    for x in values(&form.alpha) {
        for y in &ys {
            if form.eval(&x, y) == form.d {
                out.insert((x.clone(), y.clone()));
            }
        }
    }
    out
}

fn ring() -> impl Strategy<Value = IntersectionRing3> {
    ([-20i64..=20, -20..=20, -20..=20, -20..=20], -4i64..=4, -4i64..=4).prop_map(|(m, k0, k1)| {
        IntersectionRing3::from_monomials(["X", "Y"], m.map(Rational::integer), DivisorClass::int(k0, k1))
    })
}

fn class() -> impl Strategy<Value = DivisorClass> {
    (-9i64..=9, -9i64..=9).prop_map(|(a, b)| DivisorClass::int(a, b))
}

proptest! {
    #[test]
    fn rational_field_axioms(a in small_rat(), b in small_rat(), c in small_rat()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Rational::zero());
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a.clone());
        }
        let text = a.to_string();
        prop_assert_eq!(text.parse::<Rational>().unwrap(), a);
    }

    #[test]
    fn trilinear_symmetric_and_linear(r in ring(), x in class(), y in class(), z in class(), w in class(), k in -5i64..=5) {
        let t = |a: &DivisorClass, b: &DivisorClass, c: &DivisorClass| eval_trilinear(&r, a, b, c);
        prop_assert_eq!(t(&x, &y, &z), t(&y, &x, &z));
        prop_assert_eq!(t(&x, &y, &z), t(&z, &y, &x));
        prop_assert_eq!(t(&x, &y, &z), t(&x, &z, &y));
        prop_assert_eq!(t(&(&x + &w), &y, &z), t(&x, &y, &z) + t(&w, &y, &z));
        prop_assert_eq!(t(&x.scale(k), &y, &z), t(&x, &y, &z) * k);
    }

    #[test]
    fn reported_points_solve_the_form(f in form()) {
        let r = linkeq::solve(&f, &SolveOptions::default());
        for (x, y) in r.points() {
            prop_assert!(f.is_solution(x, y), "{} at ({}, {})", f.describe(), x, y);
        }
        for (x, y) in r.solutions_in_box(8) {
            prop_assert!(f.is_solution(&x, &y), "{} at ({}, {})", f.describe(), x, y);
        }
    }

    #[test]
    fn certificates_replay(f in form()) {
        let r = linkeq::solve(&f, &SolveOptions::default());
        if let Some(cert) = r.certificate() {
            prop_assert_eq!(linkeq::verify_certificate(&f, cert), Ok(()), "{}", f.describe());
            let json = serde_json::to_value(cert).unwrap();
            let back: Certificate = serde_json::from_value(json).unwrap();
            prop_assert_eq!(&back, cert);
        }
    }

    #[test]
    fn agrees_with_brute_force(f in form()) {
        let r = linkeq::solve(&f, &SolveOptions::default());
        let oracle = brute_force(&f, 6);
        match &r.status {
            SolutionStatus::NoSolutions { .. } => prop_assert!(oracle.is_empty(), "{}: {:?}", f.describe(), oracle),
            SolutionStatus::Solutions { complete: true, .. } => {
                prop_assert_eq!(r.solutions_in_box(6), oracle, "{}", f.describe());
            }
            _ => {}
        }
    }

    #[test]
    fn tampered_certificates_fail(f in form()) {
        let r = linkeq::solve(&f, &SolveOptions::default());
        let tampered = match r.certificate() {
            Some(Certificate::ModularObstruction { cases }) => {
                let mut cases = cases.clone();
                let target = cases[0].target;
                if cases[0].attained.pop().is_none() {
                    cases[0].attained.push(target);
                }
                Some(Certificate::ModularObstruction { cases })
            }
            Some(Certificate::FiniteFactorization { cases }) => {
                let mut cases = cases.clone();
                cases[0].product += 1;
                Some(Certificate::FiniteFactorization { cases })
            }
            Some(Certificate::NegativeDiscriminant { discriminant, cases }) => Some(Certificate::NegativeDiscriminant {
                discriminant: discriminant + Rational::one(),
                cases: cases.clone(),
            }),
            _ => None,
        };
        if let Some(t) = tampered {
            prop_assert!(linkeq::verify_certificate(&f, &t).is_err(), "{}", f.describe());
        }
    }

    #[test]
    fn max_components_monotone(k in 1i64..500) {
        let a = max_components(&Rational::integer(k)).unwrap();
        let b = max_components(&Rational::integer(k + 1)).unwrap();
        prop_assert!(a <= b);
        prop_assert_eq!(max_components(&Rational::integer(2 * k)).unwrap(), k);
    }

    #[test]
    fn reflections_are_isometries(degree in 3u32..=7, seed in proptest::collection::vec(-4i64..=4, 10), root in 0usize..8) {
        let l = DPLattice::new(degree).unwrap();
        let roots = l.simple_roots();
        let r = &roots[root % roots.len()];
        let x = LatticeClass::new(seed[..l.rank()].to_vec());
        let y = LatticeClass::new(seed.iter().rev().take(l.rank()).cloned().collect());
        let (sx, sy) = (l.reflect(&x, r), l.reflect(&y, r));
        prop_assert_eq!(l.dot(&sx, &sy), l.dot(&x, &y));
        prop_assert_eq!(l.anti_degree(&sx), l.anti_degree(&x));
        prop_assert_eq!(l.reflect(&sx, r), x);
    }

    #[test]
    fn castelnuovo_matches_filtration_sum(d in 1i64..200, n in 2i64..12) {
        let sum: i64 = (1..=d).map(|k| (d - 1 - k * (n - 1)).max(0)).sum();
        prop_assert_eq!(castelnuovo_bound(d, n).unwrap(), sum);
    }
}
