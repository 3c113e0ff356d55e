mod common;

use std::collections::BTreeSet;

use common::{all_q, known_idp, oracle_fpp, oracle_generators, KNOWN_NON_IDP};
use idp_core::binning::{bin_of, height_from_bin, hib, relevant_set};
use idp_core::hilbert::{hilbert_basis, is_idp, is_idp_bins, is_reducible};
use idp_core::simplex::{build_generators, coords_in_cone, fpp_points, hstar, QVector};
use proptest::prelude::*;

fn qv(v: &[i64]) -> QVector {
    QVector::new(v.to_vec()).unwrap()
}

#[test]
fn closed_form_matches_box_scan_oracle() {
    for d in 1..=3 {
        for q in all_q(d, 0, 5) {
            let got: BTreeSet<Vec<i64>> = fpp_points(&qv(&q)).into_iter().map(|p| p.coords).collect();
            assert_eq!(got, oracle_fpp(&q), "q={q:?}");
        }
    }
}

#[test]
fn generators_match_oracle_and_volume() {
    for q in all_q(3, 0, 4) {
        let g = build_generators(&qv(&q));
        assert_eq!(g.generators(), oracle_generators(&q).as_slice());
        assert_eq!(g.determinant().abs(), qv(&q).volume());
    }
}

#[test]
fn stored_weights_are_recovered_and_heights_integral() {
    for q in all_q(3, 0, 6) {
        let q = qv(&q);
        let pts = fpp_points(&q);
        assert_eq!(pts.len() as i64, q.volume());
        let distinct: BTreeSet<_> = pts.iter().map(|p| p.coords.clone()).collect();
        assert_eq!(distinct.len(), pts.len());
        for p in &pts {
            assert_eq!(coords_in_cone(&p.coords, &q).as_ref(), Some(&p.weights));
            let s: i64 = p.weights.numerators().iter().sum();
            assert_eq!(s % q.volume(), 0);
            assert_eq!(p.height(), s / q.volume());
            assert!(p.height() >= 0);
        }
        assert_eq!(hstar(&q).iter().sum::<u64>() as i64, q.volume());
        assert_eq!(hstar(&q)[0], 1);
    }
}

#[test]
fn height_formula_from_bins() {
    for d in 1..=3 {
        for q in all_q(d, 0, 10 - 3 * (d as i64 - 1)) {
            for p in fpp_points(&qv(&q)) {
                assert_eq!(p.height() as usize, height_from_bin(&bin_of(&p.weights, d)), "q={q:?}");
            }
        }
    }
}

#[test]
fn dual_criteria_agree_on_small_grids() {
    for d in 2..=3 {
        for q in all_q(d, 0, 6) {
            let q = qv(&q);
            assert_eq!(is_idp(&q), is_idp_bins(&q), "q={q}");
        }
    }
}

#[test]
fn extras_never_exceed_height_d() {
    for d in 2..=3 {
        for q in all_q(d, 0, 6) {
            let hb = hilbert_basis(&qv(&q));
            assert!(hb.extras.iter().all(|z| z.height() as usize <= d), "q={q:?}");
            assert!(hb.extras.iter().all(|z| !z.weights.is_zero()));
            assert!(hb.extras.windows(2).all(|w| (w[0].height(), w[0].b) < (w[1].height(), w[1].b)));
        }
    }
}

#[test]
fn extras_are_irreducible_by_the_reduction_predicate() {
    for q in all_q(3, 1, 5) {
        let q = qv(&q);
        let pts = fpp_points(&q);
        let g = build_generators(&q);
        for z in hilbert_basis(&q).extras {
            assert!(!is_reducible(&z, &pts, &g, &q));
        }
    }
}

#[test]
fn published_idp_list() {
    for s in known_idp() {
        assert!(is_idp(&s.parse().unwrap()), "{s} should be IDP");
    }
    for s in KNOWN_NON_IDP {
        assert!(!is_idp(&s.parse().unwrap()), "{s} should not be IDP");
        assert!(!is_idp_bins(&s.parse().unwrap()));
    }
}

#[test]
fn hib_empty_iff_idp() {
    let rs = relevant_set(3).unwrap();
    for q in all_q(3, 1, 6) {
        let q = qv(&q);
        assert_eq!(hib(&q, &rs).unwrap().positives.is_empty(), is_idp_bins(&q));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_form_matches_oracle_up_to_d5(q in prop::collection::vec(0i64..=3, 4..=5)) {
        let got: BTreeSet<Vec<i64>> = fpp_points(&qv(&q)).into_iter().map(|p| p.coords).collect();
        prop_assert_eq!(got, oracle_fpp(&q));
    }

    #[test]
    fn dual_criteria_agree_d4(q in prop::collection::vec(1i64..=25, 4)) {
        let q = qv(&q);
        prop_assert_eq!(is_idp(&q), is_idp_bins(&q));
    }

    #[test]
    fn cone_membership_of_sums(q in prop::collection::vec(0i64..=12, 1..=5), i in 0usize..64, j in 0usize..64) {
        // the sum of two parallelepiped points is in the cone, with weights summed
        let q = qv(&q);
        let pts = fpp_points(&q);
        let (a, b) = (&pts[i % pts.len()], &pts[j % pts.len()]);
        let s: Vec<i64> = a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect();
        let w = coords_in_cone(&s, &q).unwrap();
        let expect: Vec<i64> = a.weights.numerators().iter().zip(b.weights.numerators()).map(|(x, y)| x + y).collect();
        prop_assert_eq!(w.numerators(), expect.as_slice());
    }
}
