use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qmahg::calculus::{d0, d1, laplacian, scalar_form};
use qmahg::heisenberg::{GroupPoint, LineFrame};
use qmahg::measures::superadditivity_pointwise;
use qmahg::poly::parse_poly;
use qmahg::qma::{horizontal_hessian, horizontal_hessian_direct};
use qmahg::quaternion::{moore_det, moore_det_generic, HyperhermitianMatrix, Quaternion};
use qmahg::random::{
    random_group_poly, random_hyperhermitian, random_nonneg_hyperhermitian, random_poly_form, random_quat_matrix,
    random_quaternion,
};
use qmahg::Rational;

fn rat(v: i8) -> Rational {
    Rational::from_integer(v.into())
}

fn exact_point(c: &[i8]) -> GroupPoint<Rational> {
    GroupPoint::from_coords(&c.iter().map(|&v| rat(v)).collect::<Vec<_>>()).unwrap()
}

fn exact_quaternion(c: [i8; 4]) -> Quaternion<Rational> {
    Quaternion::from_components(c.map(rat))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_law_associative_with_inverses(a in prop::collection::vec(-5i8..5, 5), b in prop::collection::vec(-5i8..5, 5), c in prop::collection::vec(-5i8..5, 5)) {
        let (a, b, c) = (exact_point(&a), exact_point(&b), exact_point(&c));
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(a.mul(&a.inv()).unwrap(), GroupPoint::identity(1));
    }

    #[test]
    fn gauge_is_homogeneous(c in prop::collection::vec(-3.0f64..3.0, 9), r in 0.1f64..10.0) {
        let p = GroupPoint::from_coords(&c).unwrap();
        let scaled = p.dilate(&r).unwrap().koranyi_norm();
        prop_assert!((scaled - r * p.koranyi_norm()).abs() <= 1e-12 * (1.0 + scaled));
    }

    #[test]
    fn quaternion_norm_multiplicative(p in any::<[i8; 4]>(), q in any::<[i8; 4]>()) {
        let (p, q) = (exact_quaternion(p), exact_quaternion(q));
        let pq = &p * &q;
        prop_assert_eq!(pq.norm_sqr(), p.norm_sqr() * q.norm_sqr());
        prop_assert_eq!(pq.conj(), &q.conj() * &p.conj());
    }

    #[test]
    fn printed_polynomials_parse_back(seed in any::<u64>(), n in 1usize..=2) {
        let u = random_group_poly::<Rational, _>(&mut rng(seed), n, 6, 4);
        let back = parse_poly::<Rational>(&u.to_string(), n).unwrap();
        prop_assert_eq!(back, u);
    }

    #[test]
    fn differentials_square_to_zero(seed in any::<u64>(), degree in 0usize..=2) {
        let mut g = rng(seed);
        let f = random_poly_form::<Rational, _>(&mut g, 2, degree, 3);
        prop_assert!(d0(&d0(&f).unwrap()).unwrap().is_zero());
        prop_assert!(d1(&d1(&f).unwrap()).unwrap().is_zero());
        let anti = d0(&d1(&f).unwrap()).unwrap().add(&d1(&d0(&f).unwrap()).unwrap()).unwrap();
        prop_assert!(anti.is_zero());
    }

    #[test]
    fn laplacian_is_closed(seed in any::<u64>()) {
        let u = random_group_poly::<Rational, _>(&mut rng(seed), 2, 5, 3);
        let lap = laplacian(&u).unwrap();
        prop_assert!(d0(&lap).unwrap().is_zero());
        prop_assert!(d1(&lap).unwrap().is_zero());
        prop_assert_eq!(lap, d0(&d1(&scalar_form(&u).unwrap()).unwrap()).unwrap());
    }

    #[test]
    fn hessian_routes_agree(seed in any::<u64>()) {
        let u = random_group_poly::<Rational, _>(&mut rng(seed), 2, 4, 3);
        prop_assert_eq!(horizontal_hessian(&u).unwrap(), horizontal_hessian_direct(&u).unwrap());
    }

    #[test]
    fn moore_determinant_multiplicative_under_congruence(seed in any::<u64>(), n in 1usize..=3) {
        let mut g = rng(seed);
        let m = random_hyperhermitian(&mut g, n);
        let c = random_quat_matrix(&mut g, n, n);
        let lhs = moore_det(&m.congruence(&c).unwrap());
        let rhs = moore_det(&m) * moore_det(&HyperhermitianMatrix::gram(&c).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-8 * lhs.abs().max(rhs.abs()).max(1e-12));
        prop_assert!((moore_det(&m) - moore_det_generic(&m)).abs() <= 1e-9 * (1.0 + moore_det(&m).abs()));
    }

    #[test]
    fn nonnegative_hessians_superadditive(seed in any::<u64>(), n in 1usize..=3) {
        let mut g = rng(seed);
        let a = random_nonneg_hyperhermitian(&mut g, n);
        let b = random_nonneg_hyperhermitian(&mut g, n);
        let (lhs, rhs) = superadditivity_pointwise(&a, &b).unwrap();
        prop_assert!(lhs >= rhs - 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn line_frame_matrix_is_conformal(seed in any::<u64>(), n in 1usize..=3) {
        let mut g = rng(seed);
        let q: Vec<_> = (0..n).map(|_| random_quaternion(&mut g)).collect();
        let f = LineFrame::new(GroupPoint::identity(n), q).unwrap();
        let b = f.b();
        let l2 = *f.lambda_sq();
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((b[i][j] + b[j][i]).abs() < 1e-12);
                let bbt: f64 = (0..4).map(|k| b[i][k] * b[j][k]).sum();
                let expect = if i == j { l2 } else { 0.0 };
                prop_assert!((bbt - expect).abs() < 1e-10 * (1.0 + l2));
            }
        }
        let s = f.s_components();
        prop_assert!((s.iter().map(|v| v * v).sum::<f64>() - l2).abs() < 1e-10 * (1.0 + l2));
    }
}
