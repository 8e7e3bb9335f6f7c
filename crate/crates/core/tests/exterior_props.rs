use corrdyn::exterior::{exterior_power_matrix, exterior_powers, pushforward_matrix, CohomologyModel, GradedClass};
use corrdyn::linalg::{binomial, rat, Matrix, Rat};
use proptest::prelude::*;

fn homogeneous(model: &CohomologyModel, degree: usize, coeffs: &[i64]) -> GradedClass {
    let dim = model.dim(degree);
    let v: Vec<Rat> = (0..dim).map(|i| rat(coeffs[i % coeffs.len()])).collect();
    GradedClass::homogeneous(model.rank(), degree, v).unwrap()
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

#[test]
fn top_power_of_theta_is_factorial() {
    for n in 1..=4 {
        let m = CohomologyModel::new(n).unwrap();
        assert_eq!(m.integrate(m.theta_power(n)), rat(factorial(n)), "n = {n}");
    }
}

#[test]
fn poincare_gram_is_a_signed_permutation() {
    for n in 1..=4 {
        let m = CohomologyModel::new(n).unwrap();
        for i in 0..=2 * n {
            let g = m.poincare_gram(i);
            assert_eq!(g.rows(), binomial(2 * n, i));
            for r in 0..g.rows() {
                let nonzero: Vec<&Rat> = g.row(r).iter().filter(|x| **x != rat(0)).collect();
                assert_eq!(nonzero.len(), 1);
                assert!(*nonzero[0] == rat(1) || *nonzero[0] == rat(-1));
            }
            let d = g.det();
            assert!(d == rat(1) || d == rat(-1), "n = {n}, i = {i}");
        }
    }
}

#[test]
fn theta_sits_in_degree_two() {
    let m = CohomologyModel::new(3).unwrap();
    assert_eq!(m.theta().degrees().collect::<Vec<_>>(), vec![2]);
    assert_eq!(m.integrate(&m.a(1)), rat(0));
    assert_eq!(m.integrate(&m.orientation()), rat(1));
}

#[test]
fn theta_cubed_on_threefold() {
    let m = CohomologyModel::new(3).unwrap();
    assert_eq!(m.theta_power(3), &m.orientation().scale(&rat(6)));
}

#[test]
fn pushforward_after_pullback_is_degree() {
    let m = Matrix::from_i64(&[vec![2, 1, 0, 0], vec![0, 1, 1, 0], vec![1, 0, 1, 1], vec![0, 0, -1, 2]]);
    let d = m.det();
    for i in 0..=4 {
        let lhs = pushforward_matrix(&m, i).unwrap().mul(&exterior_power_matrix(&m, i));
        assert_eq!(lhs, Matrix::scalar(binomial(4, i), &d));
    }
}

#[test]
fn adjoint_of_pullback_is_pushforward() {
    let model = CohomologyModel::new(2).unwrap();
    let m = Matrix::from_i64(&[vec![2, 1, 0, 0], vec![0, 1, 1, 0], vec![1, 0, 1, 1], vec![0, 0, -1, 2]]);
    let pulls = exterior_powers(&m);
    let adj = model.poincare_adjoint(&pulls);
    for (i, a) in adj.iter().enumerate() {
        assert_eq!(*a, pushforward_matrix(&m, i).unwrap(), "degree {i}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wedge_is_graded_commutative(n in 1usize..=3, p in 0usize..=3, q in 0usize..=3,
                                   a in prop::collection::vec(-3i64..=3, 1..8),
                                   b in prop::collection::vec(-3i64..=3, 1..8)) {
        let m = CohomologyModel::new(n).unwrap();
        let (p, q) = (p.min(2 * n), q.min(2 * n));
        let x = homogeneous(&m, p, &a);
        let y = homogeneous(&m, q, &b);
        let xy = m.wedge(&x, &y).unwrap();
        let yx = m.wedge(&y, &x).unwrap();
        let sign = if (p * q) % 2 == 1 { rat(-1) } else { rat(1) };
        prop_assert_eq!(xy, yx.scale(&sign));
    }

    #[test]
    fn wedge_is_associative(n in 1usize..=3, degs in (0usize..=2, 0usize..=2, 0usize..=2),
                            a in prop::collection::vec(-2i64..=2, 1..6),
                            b in prop::collection::vec(-2i64..=2, 1..6),
                            c in prop::collection::vec(-2i64..=2, 1..6)) {
        let m = CohomologyModel::new(n).unwrap();
        let x = homogeneous(&m, degs.0, &a);
        let y = homogeneous(&m, degs.1, &b);
        let z = homogeneous(&m, degs.2, &c);
        let left = m.wedge(&m.wedge(&x, &y).unwrap(), &z).unwrap();
        let right = m.wedge(&x, &m.wedge(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn compound_matrices_are_multiplicative(a in prop::collection::vec(-3i64..=3, 16),
                                            b in prop::collection::vec(-3i64..=3, 16),
                                            i in 0usize..=4) {
        let to_m = |v: &[i64]| Matrix::from_i64(&v.chunks(4).map(|r| r.to_vec()).collect::<Vec<_>>());
        let (ma, mb) = (to_m(&a), to_m(&b));
        let lhs = exterior_power_matrix(&ma.mul(&mb), i);
        let rhs = exterior_power_matrix(&ma, i).mul(&exterior_power_matrix(&mb, i));
        prop_assert_eq!(lhs, rhs);
    }
}
