//! Independent oracles for the computed values: brute force, direct
//! formulas and residue tables written without the library's solvers.

use std::collections::BTreeSet;

use fano12::bounds::{self, OrbitVerdict};
use fano12::dplattice::{construction_check, ConstructionTarget, DPLattice, LatticeClass};
use fano12::enumerate::{self, castelnuovo_bound, e1_candidates};
use fano12::icalc::{
    blowup_identities, curve_blowup_ring, eval_trilinear, genus_of, projbundle_ring, ChernData, CurveData,
    PolarizedFano,
};
use fano12::linkeq::{self, QuadraticForm, SolveOptions};
use fano12::reftable::ReferenceTable;
use fano12::{rat, Rational};

fn grid(bound: i64, denominators: &[i64]) -> BTreeSet<Rational> {
    let mut out = BTreeSet::new();
    for &q in denominators {
        for n in -bound * q..=bound * q {
            out.insert(rat(n, q));
        }
    }
    out
}

/// Every admissible solution of `form` with `|a|, |b| <= bound`, by exhaustion.
fn brute_force(form: &QuadraticForm, bound: i64) -> BTreeSet<(Rational, Rational)> {
    let to_i = |d: &[u32]| d.iter().map(|&q| q as i64).collect::<Vec<_>>();
    let xs = grid(bound, &to_i(&form.alpha.denominators));
    let ys = grid(bound, &to_i(&form.beta.denominators));
    let mut out = BTreeSet::new();
    for x in xs.iter().filter(|x| form.alpha.admits(x)) {
        for y in ys.iter().filter(|y| form.beta.admits(y)) {
            if form.eval(x, y) == form.d {
                out.insert((x.clone(), y.clone()));
            }
        }
    }
    out
}

fn kc() -> Rational {
    Rational::integer(22)
}

#[test]
fn castelnuovo_matches_two_oracles() {
    for n in 2..=8i64 {
        for d in 1..=40i64 {
            // Sum over the hyperplane-section filtration.
            let sum: i64 = (1..=d).map(|k| (d - 1 - k * (n - 1)).max(0)).sum();
            // Maximization over decompositions d - 1 = m (n - 1) + eps.
            let best = (0..=d)
                .filter_map(|m| {
                    let eps = d - 1 - m * (n - 1);
                    (0..n - 1).contains(&eps).then(|| m * (m - 1) / 2 * (n - 1) + m * eps)
                })
                .max()
                .unwrap();
            let pi = castelnuovo_bound(d, n).unwrap();
            assert_eq!(pi, sum, "d={d} n={n}");
            assert_eq!(pi, best, "d={d} n={n}");
        }
    }
}

#[test]
fn castelnuovo_monotone() {
    for n in 2..=8i64 {
        for d in 1..40i64 {
            assert!(castelnuovo_bound(d + 1, n).unwrap() >= castelnuovo_bound(d, n).unwrap());
        }
    }
    for n in 2..8i64 {
        for d in (n + 1)..=40 {
            assert!(castelnuovo_bound(d, n + 1).unwrap() <= castelnuovo_bound(d, n).unwrap());
        }
    }
}

fn box_lines(degree: u32) -> BTreeSet<LatticeClass> {
    let n = 9 - degree as usize;
    let mut out = BTreeSet::new();
    let total = 5usize.pow(n as u32);
    for a in -3..=3i64 {
        for code in 0..total {
            let mut c = vec![a];
            let mut k = code;
            for _ in 0..n {
                c.push((k % 5) as i64 - 2);
                k /= 5;
            }
            let sq = a * a - c[1..].iter().map(|x| x * x).sum::<i64>();
            let anti = 3 * a + c[1..].iter().sum::<i64>();
            if sq == -1 && anti == 1 {
                out.insert(LatticeClass::new(c));
            }
        }
    }
    out
}

#[test]
fn lines_match_box_search() {
    for (degree, count) in [(3, 27), (4, 16), (5, 10)] {
        let lib: BTreeSet<_> = DPLattice::new(degree).unwrap().exceptional_classes().into_iter().collect();
        let oracle = box_lines(degree);
        assert_eq!(oracle.len(), count);
        assert_eq!(lib, oracle);
    }
}

#[test]
fn lines_closed_under_weyl_generators() {
    for degree in 3..=5 {
        let l = DPLattice::new(degree).unwrap();
        let lines: BTreeSet<_> = l.exceptional_classes().into_iter().collect();
        for r in l.simple_roots() {
            assert_eq!(l.square(&r), -2);
            assert_eq!(l.anti_degree(&r), 0);
            for x in &lines {
                assert!(lines.contains(&l.reflect(x, &r)));
            }
        }
    }
}

#[test]
fn construction_pa_matches_curve_data() {
    for t in ConstructionTarget::ALL {
        let r = construction_check(t).unwrap();
        let ring = curve_blowup_ring(&t.polarized(), &CurveData { h_degree: r.anti_degree as u32, pa: r.pa }).unwrap();
        assert_eq!(ring.kcube(), 22);
        // Genus formula on the plane model: B = a h - sum m_i e_i.
        let a = r.curve.coords[0];
        let plane_genus = (a - 1) * (a - 2) / 2 - r.curve.coords[1..].iter().map(|c| c * (c + 1) / 2).sum::<i64>();
        assert_eq!(plane_genus, r.pa);
    }
}

#[test]
fn ring_consistency_grid() {
    for hcube in 1..=5 {
        for iota in 1..=4u32 {
            let base = PolarizedFano::new("W", iota, hcube);
            for deg in 1..=12u32 {
                for pa in 0..=6 {
                    let ring = curve_blowup_ring(&base, &CurveData { h_degree: deg, pa }).unwrap();
                    let kb = Rational::integer(-(iota as i64) * deg as i64);
                    let nums = blowup_identities(&base.invariants.kcube, &kb, pa);
                    let k = ring.anticanonical();
                    let e = ring.basis(1);
                    assert_eq!(eval_trilinear(&ring, &k, &k, &k), nums.kcube);
                    assert_eq!(eval_trilinear(&ring, &k, &k, &e), nums.ksq_e);
                    assert_eq!(eval_trilinear(&ring, &k, &e, &e), nums.k_ee);
                    // Degree drop.
                    assert_eq!(&base.invariants.kcube - &nums.kcube, &nums.ksq_e * 2 + Rational::integer(2 * pa - 2));
                }
            }
        }
    }
}

#[test]
fn bundle_consistency_grid() {
    for c1sq in [0, 4] {
        for c2 in -5..=10 {
            let data = ChernData::over_plane(c1sq, c2);
            let ring = projbundle_ring(&data).unwrap();
            assert_eq!(ring.kcube(), 54 + 2 * c1sq - 8 * c2);
        }
    }
}

#[test]
fn three_inputs_have_genus_12() {
    for (base, deg) in [(PolarizedFano::p3(), 5), (PolarizedFano::quadric(), 5), (PolarizedFano::del_pezzo(5), 4)] {
        let ring = curve_blowup_ring(&base, &CurveData { h_degree: deg, pa: 0 }).unwrap();
        assert_eq!(genus_of(&ring.kcube()).unwrap(), 12);
    }
}

#[test]
fn e5_oracles() {
    let o = SolveOptions::default();
    // 4(11a^2 - ab - b^2) = 45a^2 - (a + 2b)^2, so delta = 1 needs a square = 5 mod 9.
    let squares: BTreeSet<i64> = (0..9).map(|x| x * x % 9).collect();
    assert!(!squares.contains(&((45 - 4i64).rem_euclid(9))));
    for delta in [1, 0] {
        let r = linkeq::solve_e5_pair(&kc(), delta, None, &o).unwrap();
        assert!(r.is_no_solutions());
        assert!(brute_force(&r.form, 50).is_empty());
    }
    let r = linkeq::solve_e5_pair(&kc(), -1, None, &o).unwrap();
    assert!(brute_force(&r.form, 10).contains(&(1.into(), 3.into())));
    assert!(r.solutions_in_box(10).contains(&(1.into(), 3.into())));
    let r = linkeq::solve_e5_pair(&kc(), -1, Some(1), &o).unwrap();
    assert!(r.is_no_solutions());
    assert!(brute_force(&r.form, 50).is_empty());
}

#[test]
fn conic_oracles() {
    let o = SolveOptions::default();
    let r = linkeq::solve_cc(&kc(), 0, None, &o).unwrap();
    assert!(r.is_no_solutions());
    assert!(brute_force(&r.form, 50).is_empty());
    // deg >= 1 with beta = 1: 12 = 11 a + deg.
    for deg in 1..=11 {
        let r = linkeq::solve_cc(&kc(), deg, Some(1), &o).unwrap();
        let linear: Vec<i64> = (1..=100).filter(|a| 11 * a + deg == 12).collect();
        assert_eq!(r.exclusion.is_some(), !linear.is_empty(), "deg {deg}");
        assert_eq!(linear.is_empty(), r.is_no_solutions());
    }
    let cd = linkeq::solve_cd(&kc(), 0, &o).unwrap();
    assert_eq!(cd.fiber_degree, Some(5.into()));
    assert_eq!(cd.chosen, Some((rat(1, 2), rat(1, 2))));
    for deg in 1..=11i64 {
        let cd = linkeq::solve_cd(&kc(), deg, &o).unwrap();
        assert!(cd.report.is_no_solutions(), "deg {deg}");
        assert!(brute_force(&cd.report.form, 50).is_empty());
        let disc = (12 - deg).pow(2) - 44;
        assert!(disc < 0 || (disc as f64).sqrt().fract() != 0.0 || (12 - deg) < 0);
    }
}

#[test]
fn dd_oracle() {
    for d in 1..=9i64 {
        let r = linkeq::solve_dd(&kc(), d).unwrap();
        assert!(r.is_no_solutions());
        // Right fiber degree 11 a is an integer in 1..=9 for some a in (1/q)Z, q <= 3.
        let hits = grid(50, &[1, 2, 3]).into_iter().filter(|a| {
            let f = a * 11;
            a.is_positive() && f.is_integer() && f <= 9 && {
                let b = &f / d;
                b.is_positive() && [1, 2, 3].iter().any(|&q| b.denom_divides(q))
            }
        });
        assert_eq!(hits.count(), 0);
    }
}

#[test]
fn orbit_matches_brute_force() {
    for d in 1..=100i64 {
        let least = (1..=10_000i64).find(|n| n * d % 22 == 0).unwrap();
        let verdict = bounds::orbit_divisibility(d).unwrap();
        match verdict {
            OrbitVerdict::DivisibleBy11 { min_orbit, .. } => {
                assert_eq!(least % 11, 0);
                assert_eq!(min_orbit, least);
            }
            OrbitVerdict::NoConclusion { .. } => assert_ne!(least % 11, 0),
        }
    }
}

#[test]
fn prop24_rows_from_inputs() {
    let r = bounds::prop24_certify(&ReferenceTable::bundled()).unwrap();
    for row in &r.rows {
        let expected = (&row.target_kcube - 24 - Rational::integer(2 * row.pa) + 2) / 2;
        assert_eq!(row.ksq_e, expected);
    }
    // (H1 + 2H2)^3 (2H1 + H2) on P2 x P2, expanded by hand.
    assert_eq!(bounds::p2p2_divisor_kcube(2, 1), 3 * 2 + 3 * 4 * 2);
}

#[test]
fn e1_candidates_satisfy_relations() {
    for c in e1_candidates(12).unwrap() {
        let base = c.target.polarized();
        let iota = base.iota() as i64;
        let kz = &base.invariants.kcube;
        assert_eq!(kz - 22, &c.ksq_e * 2 + Rational::integer(2 * c.pa - 2));
        assert_eq!(kz - 22, Rational::integer(2 * iota * c.h_degree - 2 * c.pa + 2));
        assert!(c.ksq_e.is_positive());
    }
}

#[test]
fn bundled_excluders_match_blowup_cubes() {
    let t = ReferenceTable::bundled();
    // Blowup of P3 along a sextic of genus 4 and of V4 along a conic.
    let p3 = curve_blowup_ring(&PolarizedFano::p3(), &CurveData { h_degree: 6, pa: 4 }).unwrap();
    assert_eq!(p3.kcube(), t.excluder("e1-P3-k1").unwrap().kcube);
    let v4 = curve_blowup_ring(&PolarizedFano::del_pezzo(4), &CurveData { h_degree: 2, pa: 0 }).unwrap();
    assert_eq!(v4.kcube(), t.excluder("e1-dP4-k0").unwrap().kcube);
    // P1 x P2 along a curve with -K.B = 16, pa 0.
    let mm35 = blowup_identities(&54.into(), &(-16).into(), 0);
    assert_eq!(mm35.kcube, t.get("MM3-5").unwrap().kcube);
}

#[test]
fn grid_has_no_gaps() {
    let l = enumerate::enumerate_links(12, 2, &ReferenceTable::bundled(), &SolveOptions::default()).unwrap();
    let kinds = ["e2", "e3-4", "e5", "e1", "c", "d"];
    let pairs: BTreeSet<(String, String)> = l
        .cells
        .iter()
        .map(|c| {
            let (a, b) = (c.left.tag().to_string(), c.right.tag().to_string());
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    for (i, a) in kinds.iter().enumerate() {
        for b in &kinds[i..] {
            let key = if a <= b { (a.to_string(), b.to_string()) } else { (b.to_string(), a.to_string()) };
            assert!(pairs.contains(&key), "{a} x {b}");
        }
    }
    l.revalidate().unwrap();
}
