mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::Rng;

use common::*;
use tropkit::cycles::{check_balancing, local_dimension, star, TropicalCycle};
use tropkit::document::CycleDocument;
use tropkit::geometry::lattice::LatticeBasis;
use tropkit::geometry::rational::{format_rational, parse_rational, q, qf};
use tropkit::geometry::{AffineForm, Polyhedron, QVec, Rational};
use tropkit::maxprinciple::copositivity_witness;
use tropkit::plfunc::{corner_locus, psd_witness, refine, restrict, CornerLocus, Mode, PiecewiseFunction};
use tropkit::slicing::{sample_generic_hyperplane, stable_intersect, support_matches};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 32, ..ProptestConfig::default() }
}

fn face_weights(l: &CornerLocus) -> BTreeMap<usize, AffineForm> {
    l.cells().iter().map(|c| (c.face, c.weight.clone())).collect()
}

fn random_polyhedron(seed: u64) -> Polyhedron {
    let mut rng = rng(seed);
    let n = rng.gen_range(2..=3);
    let pts: Vec<QVec> = (0..rng.gen_range(1..=6))
        .map(|_| (0..n).map(|_| q(rng.gen_range(-3..=3))).collect())
        .collect();
    let rays: Vec<QVec> = (0..rng.gen_range(0..=2))
        .map(|_| (0..n).map(|_| q(rng.gen_range(-1..=1))).collect())
        .collect();
    Polyhedron::from_generators(n, &pts, &rays, &[]).expect("polyhedron")
}

fn symmetric(seed: u64, k: usize) -> Vec<QVec> {
    let mut rng = rng(seed);
    let mut m = vec![vec![q(0); k]; k];
    for i in 0..k {
        for j in i..k {
            let x = q(rng.gen_range(-3..=3));
            m[i][j] = x.clone();
            m[j][i] = x;
        }
    }
    m
}

fn quad(m: &[QVec], w: &[Rational]) -> Rational {
    m.iter().zip(w).map(|(row, wi)| wi * row.iter().zip(w).map(|(a, b)| a * b).sum::<Rational>()).sum()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn both_descriptions_give_the_same_polyhedron(seed in any::<u64>()) {
        let p = random_polyhedron(seed);
        let n = p.ambient_dim();
        let from_v = Polyhedron::from_generators(n, p.vertices(), p.rays(), p.lineality()).unwrap();
        prop_assert_eq!(&from_v, &p);
        let from_h = Polyhedron::from_inequalities(n, &p.hrep()).unwrap();
        prop_assert_eq!(&from_h, &p);
    }

    #[test]
    fn polytopes_have_euler_characteristic_one(seed in any::<u64>()) {
        let p = random_polyhedron(seed);
        prop_assume!(p.is_bounded());
        let chi: i64 = p
            .face_lattice()
            .iter()
            .flatten()
            .filter(|f| !f.is_empty())
            .map(|f| if f.dim() % 2 == 0 { 1 } else { -1 })
            .sum();
        prop_assert_eq!(chi, 1);
    }

    #[test]
    fn faces_of_faces_are_faces(seed in any::<u64>()) {
        let p = random_polyhedron(seed);
        for facet in p.facets() {
            prop_assert!(facet.is_face_of(&p));
            prop_assert_eq!(facet.dim(), p.dim() - 1);
            for g in facet.facets() {
                prop_assert!(g.is_face_of(&p));
            }
        }
    }

    #[test]
    fn relative_interior_points_are_relative_interior(seed in any::<u64>()) {
        let p = random_polyhedron(seed);
        let x = p.relative_interior_point().unwrap();
        prop_assert!(p.relative_interior_contains(&x));
        for f in p.facets() {
            prop_assert!(!f.relative_interior_contains(&x) || f == p);
        }
    }

    #[test]
    fn lattice_reduction_is_a_canonical_representative(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(2..=4);
        let span: Vec<QVec> = (0..rng.gen_range(1..n))
            .map(|_| (0..n).map(|_| q(rng.gen_range(-3..=3))).collect())
            .collect();
        let lattice = LatticeBasis::of_span(&span, n);
        prop_assert!(lattice.is_saturated());
        let v: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.gen_range(-9..=9))).collect();
        let r = lattice.reduce(&v);
        prop_assert_eq!(lattice.reduce(&r), r.clone());
        let diff: Vec<BigInt> = v.iter().zip(&r).map(|(a, b)| a - b).collect();
        prop_assert!(lattice.contains(&diff));
        let mut shifted = v.clone();
        for b in lattice.basis() {
            let k = BigInt::from(rng.gen_range(-2..=2));
            shifted.iter_mut().zip(b).for_each(|(s, x)| *s += &k * x);
        }
        prop_assert_eq!(lattice.reduce(&shifted), r);
    }

    #[test]
    fn rationals_round_trip_through_text(num in -10_000i64..10_000, den in 1i64..500) {
        let x = qf(num, den);
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }

    #[test]
    fn generated_cycles_are_balanced_and_pure(seed in any::<u64>()) {
        let c = random_balanced(&mut rng(seed));
        prop_assert!(check_balancing(&c).verdict);
        prop_assert!(c.is_pure());
        for (_, cell, _) in c.maximal_cells() {
            let x = cell.relative_interior_point().unwrap();
            let ld = local_dimension(&c, &x).unwrap();
            prop_assert!(ld.is_pure && ld.max_dim == c.dim());
        }
    }

    #[test]
    fn stars_of_balanced_cycles_are_balanced_fans(seed in any::<u64>()) {
        let c = random_balanced(&mut rng(seed));
        for i in 0..c.complex().len() {
            let x = c.cell(i).relative_interior_point().unwrap();
            let s = star(&c, &x).unwrap();
            prop_assert!(s.is_fan());
            prop_assert!(check_balancing(&s).verdict);
        }
    }

    #[test]
    fn cycles_survive_the_document_format(seed in any::<u64>()) {
        let c = random_balanced(&mut rng(seed));
        let doc = CycleDocument::from_cycle(&c).unwrap();
        let text = serde_json::to_string(&doc).unwrap();
        let back: CycleDocument = tropkit::document::from_json(&text, "memory").unwrap();
        prop_assert_eq!(&*back.load(false).unwrap().cycle, &c);
    }

    #[test]
    fn corner_loci_are_balanced(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let c = random_balanced(&mut rng);
        let f = random_function(&c, &mut rng, Mode::Max);
        let l = corner_locus(&f).unwrap();
        prop_assume!(!l.is_empty());
        let d = l.to_cycle().unwrap();
        prop_assert_eq!(d.dim(), c.dim() - 1);
        prop_assert!(check_balancing(&d).verdict);
    }

    #[test]
    fn corner_loci_do_not_depend_on_normal_representatives(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let c = random_balanced(&mut rng);
        let f = random_function(&c, &mut rng, Mode::Min);
        let canonical = corner_locus(&f).unwrap();
        let mut pick = common::rng(seed ^ 1);
        let shifted = tropkit::plfunc::corner_locus_with(&f, |_, _, u, lattice| {
            let mut v = u.clone();
            for b in lattice.basis() {
                let k = BigInt::from(pick.gen_range(-3..=3));
                v.iter_mut().zip(b).for_each(|(s, x)| *s += &k * x);
            }
            v
        })
        .unwrap();
        prop_assert_eq!(canonical, shifted);
    }

    #[test]
    fn corner_locus_is_linear(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let c = random_balanced(&mut rng);
        let f = random_function(&c, &mut rng, Mode::Max);
        let g = random_function(f.cycle(), &mut rng, Mode::Min);
        prop_assume!(g.cycle().complex().len() <= 60);
        let f = restrict(&f, g.cycle().clone()).unwrap();
        let k = q(rng.gen_range(-3..=3));
        // Both functions live on one complex, so weights compare face by face.
        let sum = face_weights(&corner_locus(&f.add(&g.scaled(&k)).unwrap()).unwrap());
        let mut expected = face_weights(&corner_locus(&f).unwrap());
        for (face, w) in face_weights(&corner_locus(&g).unwrap()) {
            let n = w.ambient_dim();
            let prev = expected.remove(&face).unwrap_or_else(|| AffineForm::zero(n));
            expected.insert(face, prev.add(&w.scaled(&k)));
        }
        expected.retain(|_, w| !w.is_zero());
        prop_assert_eq!(sum, expected);
    }

    #[test]
    fn convex_functions_on_effective_cycles_have_effective_corner_loci(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let c = random_effective_fan(&mut rng);
        let f = random_function(&c, &mut rng, Mode::Max);
        let l = corner_locus(&f).unwrap();
        prop_assert!(l.cells().iter().all(|k| !k.weight.constant.is_negative()));
        prop_assert!(tropkit::plfunc::check_psh(&f).unwrap().verdict);
    }

    #[test]
    fn psh_means_nonnegative_corner_weights_for_affine_pieces(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let c = random_balanced(&mut rng);
        let mode = if rng.gen_bool(0.5) { Mode::Max } else { Mode::Min };
        let f = random_function(&c, &mut rng, mode);
        let nonnegative = corner_locus(&f).unwrap().cells().iter().all(|k| !k.weight.constant.is_negative());
        prop_assert_eq!(tropkit::plfunc::check_psh(&f).unwrap().verdict, nonnegative);
    }

    #[test]
    fn psd_witnesses_are_negative_directions(seed in any::<u64>(), k in 1usize..=4) {
        let m = symmetric(seed, k);
        match psd_witness(&m) {
            Some(w) => prop_assert!(quad(&m, &w).is_negative()),
            None => prop_assert!(principal_minors_nonnegative(&m)),
        }
    }

    #[test]
    fn copositivity_witnesses_are_nonnegative_and_negative(seed in any::<u64>(), k in 1usize..=4) {
        let m = symmetric(seed, k);
        match copositivity_witness(&m) {
            Some(w) => {
                prop_assert!(w.iter().all(|x| !x.is_negative()) && w.iter().any(|x| !x.is_zero()));
                prop_assert!(quad(&m, &w).is_negative());
            }
            None => {
                let mut rng = rng(seed ^ 7);
                for _ in 0..50 {
                    let w: QVec = (0..k).map(|_| q(rng.gen_range(0..=4))).collect();
                    prop_assert!(!quad(&m, &w).is_negative());
                }
            }
        }
    }

    #[test]
    fn stable_intersection_drops_dimension_and_keeps_effectiveness(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let c = random_balanced(&mut rng);
        let n = c.ambient_dim();
        let p: QVec = (0..n).map(|_| q(rng.gen_range(-2..=2))).collect();
        let h = sample_generic_hyperplane(&c, &[p.clone()], seed).unwrap();
        let again = sample_generic_hyperplane(&c, &[p.clone()], seed).unwrap();
        prop_assert_eq!(&h, &again);
        prop_assert!(h.hyperplane.contains_point(&p));
        prop_assert!(h.certificate.verdict);
        let d = stable_intersect(&c, &h.hyperplane).unwrap();
        prop_assert!(support_matches(&c, &h.hyperplane, &d).unwrap());
        if !d.is_zero() {
            prop_assert_eq!(d.dim(), c.dim() - 1);
            prop_assert!(check_balancing(&d).verdict);
            if c.is_effective() {
                prop_assert!(d.is_effective());
            }
        }
    }

    #[test]
    fn refinement_agrees_with_the_polynomial(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let c = random_balanced(&mut rng);
        let n = c.ambient_dim();
        let poly = random_polynomial(n, &mut rng, Mode::Min, false);
        let f = refine(&c, &poly).unwrap();
        prop_assert!(f.check_continuity().unwrap().verdict);
        for (i, cell, _) in f.cycle().maximal_cells() {
            let x = cell.relative_interior_point().unwrap();
            prop_assert_eq!(f.piece(i).unwrap().eval(&x), poly.eval(&x));
        }
    }

    #[test]
    fn global_affine_functions_are_zero_divisors(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let c = Arc::new(random_balanced(&mut rng));
        let g = random_form(c.ambient_dim(), &mut rng, 3, 3);
        prop_assert!(corner_locus(&PiecewiseFunction::global_affine(c, &g)).unwrap().is_empty());
    }
}

#[test]
fn equivalent_cycles_compare_equal_across_subdivisions() {
    let l = tropical_line();
    let g = AffineForm::new(vec![q(1), q(0)], q(-2));
    let f = refine(&l, &tropkit::plfunc::TropicalPolynomial::max_with_zero(g).unwrap()).unwrap();
    let refined: &TropicalCycle = f.cycle();
    assert_ne!(refined, &l);
    assert!(refined.equivalent(&l).unwrap());
}
