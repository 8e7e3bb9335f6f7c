mod common;

use corrdyn::correspondence::{
    gr_correspondence, intersect, intersect_actions, kunneth_projectors, lieberman_pushforward, Correspondence,
    GradedAction,
};
use corrdyn::exterior::{exterior_powers, pushforward_matrices};
use corrdyn::linalg::{binomial, rat, ratio, Rat};
use proptest::prelude::*;

fn radii() -> Vec<Rat> {
    vec![ratio(1, 2), ratio(2, 1), ratio(3, 5)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn composition_is_functorial(seed in any::<u64>(), which in 0usize..6) {
        let mut rng = common::rng(seed);
        let x = common::variety(which);
        let f = common::random_corr(&mut rng, &x, 2, 2);
        let g = common::random_corr(&mut rng, &x, 2, 2);
        let lhs = g.compose(&x, &f).graded_action(&x);
        let rhs = f.graded_action(&x).mul(&g.graded_action(&x));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn effective_correspondences_have_nonnegative_degrees(seed in any::<u64>(), which in 0usize..6) {
        let mut rng = common::rng(seed);
        let x = common::variety(which);
        let c = common::random_corr(&mut rng, &x, 3, 3);
        let d = c.degree_sequence(&x);
        prop_assert!(d.is_nonnegative());
        prop_assert!(d.values.iter().all(|v| *v > rat(0)));
    }

    #[test]
    fn single_words_are_log_concave(seed in any::<u64>(), which in 0usize..6) {
        let mut rng = common::rng(seed);
        let x = common::variety(which);
        let w = common::random_word(&mut rng, &x, 3);
        let c = Correspondence::word(&x, w, common::coefficient(&mut rng)).unwrap();
        prop_assert_eq!(c.degree_sequence(&x).log_concavity_violation(), None);
    }

    #[test]
    fn gr_scales_each_degree(seed in any::<u64>(), which in 0usize..6) {
        let mut rng = common::rng(seed);
        let x = common::variety(which);
        let f = common::random_corr(&mut rng, &x, 2, 2);
        let a = f.graded_action(&x);
        let degs = f.degree_sequence(&x);
        for r in radii() {
            let g = gr_correspondence(&x, &r).unwrap();
            let composite = g.compose(&x, &f);
            prop_assert_eq!(composite.graded_action(&x), a.mul(&GradedAction::gamma(x.model(), &r)));
            let n = x.n();
            let expected = (0..=n).fold(rat(0), |acc, j| {
                acc + rat(binomial(n, j) as i64) * num_traits::pow(r.clone(), 2 * j) * &degs.values[j]
            });
            prop_assert_eq!(composite.total_degree(&x), expected);
        }
    }

    #[test]
    fn transpose_acts_by_poincare_adjoint(seed in any::<u64>(), which in 0usize..6) {
        let mut rng = common::rng(seed);
        let x = common::variety(which);
        let c = common::random_corr(&mut rng, &x, 2, 2);
        let t = c.transpose(&x).unwrap().graded_action(&x);
        prop_assert_eq!(t.degrees, x.model().poincare_adjoint(&c.graded_action(&x).degrees));
    }

    #[test]
    fn intersection_from_actions_matches(seed in any::<u64>(), which in 0usize..6) {
        let mut rng = common::rng(seed);
        let x = common::variety(which);
        let f = common::random_corr(&mut rng, &x, 2, 2);
        let g = common::random_corr(&mut rng, &x, 2, 2);
        let direct = intersect(&x, &f, &g).unwrap();
        let via = intersect_actions(x.model(), &f.graded_action(&x), &g.graded_action(&x));
        prop_assert_eq!(&direct, &via);
        prop_assert_eq!(direct, intersect(&x, &g, &f).unwrap());
    }

    #[test]
    fn lieberman_pushforward_matches_matrices(seed in any::<u64>(), which in 0usize..6) {
        let mut rng = common::rng(seed);
        let x = common::variety(which);
        let phi = common::random_endo(&mut rng, &x, 2, true);
        let psi = common::random_endo(&mut rng, &x, 2, true);
        let f = common::random_corr(&mut rng, &x, 2, 2);
        let pushed = lieberman_pushforward(&x, &phi, &psi, &f).unwrap().graded_action(&x);
        let push = pushforward_matrices(&phi.realize(&x)).unwrap();
        let pull = exterior_powers(&psi.realize(&x));
        let a = f.graded_action(&x);
        for i in 0..=2 * x.n() {
            prop_assert_eq!(&pushed.degrees[i], &push[i].mul(&a.degrees[i]).mul(&pull[i]), "degree {}", i);
        }
    }
}

#[test]
fn castelnuovo_severi_on_curves() {
    for which in [0, 1] {
        let x = common::variety(which);
        let mut rng = common::rng(11 + which as u64);
        for _ in 0..100 {
            let c = common::random_corr(&mut rng, &x, 3, 3);
            let d = c.degree_sequence(&x);
            let self_int = intersect(&x, &c, &c).unwrap();
            assert!(self_int <= rat(2) * &d.values[0] * &d.values[1], "{c}");
        }
    }
}

#[test]
fn kunneth_projectors_split_the_identity() {
    let radii = [1, 2, 3, 4, 5, 6, 7, 8, 9].map(rat);
    for which in [0, 3] {
        let x = common::variety(which);
        let model = x.model();
        let pis = kunneth_projectors(&x, &radii[..model.rank() + 1]).unwrap();
        let sum = pis.iter().fold(GradedAction::zero(model), |acc, p| acc.add(p));
        assert_eq!(sum, GradedAction::identity(model));
        for (i, p) in pis.iter().enumerate() {
            for (j, m) in p.degrees.iter().enumerate() {
                let expected = if i == j { rat(1) } else { rat(0) };
                assert_eq!(*m, corrdyn::Matrix::scalar(model.dim(j), &expected));
            }
            assert_eq!(p.mul(p), *p);
        }
    }
}

#[test]
fn kunneth_projectors_commute_with_correspondences() {
    let x = common::variety(2);
    let mut rng = common::rng(5);
    let pis = kunneth_projectors(&x, &[1, 2, 3, 4, 5].map(rat)).unwrap();
    let c = common::random_corr(&mut rng, &x, 2, 2).graded_action(&x);
    for p in &pis {
        assert_eq!(p.mul(&c), c.mul(p));
    }
    assert!(kunneth_projectors(&x, &[1, 2, 2, 4, 5].map(rat)).is_err());
    assert!(kunneth_projectors(&x, &[1, 2, 3].map(rat)).is_err());
}
