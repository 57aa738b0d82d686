use num_traits::{One, Zero};
use proptest::prelude::*;

use prym_core::divclass::{pushforward, DivClass, OmegaSquaredRule, UpstairsClass};
use prym_core::exactla::{
    annihilates, det_exact, matrix_to_csv_string, nullspace, rank_by_left_kernel, rank_certified,
    rank_exact, rank_mod_p, rat, ratio, read_matrix_csv, Field, RatMatrix, RatPoly, Rational,
    Rationals, UniPoly,
};
use prym_core::prymcurve::random_params;
use prym_core::Error;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| ratio(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    small_rational().prop_filter("nonzero", |x| !x.is_zero())
}

fn poly() -> impl Strategy<Value = RatPoly> {
    prop::collection::vec(small_rational(), 0..7).prop_map(|c| UniPoly::from_coeffs(&Rationals, c))
}

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = RatMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        // Narrow entry range so low-rank matrices show up often.
        prop::collection::vec(
            prop::collection::vec((-2i64..=2, 1i64..=3).prop_map(|(n, d)| ratio(n, d)), c),
            r,
        )
        .prop_map(move |rows| RatMatrix::from_rows(&Rationals, c, rows).unwrap())
    })
}

fn square(n: usize) -> impl Strategy<Value = RatMatrix> {
    prop::collection::vec(
        prop::collection::vec((-3i64..=3, 1i64..=3).prop_map(|(n, d)| ratio(n, d)), n),
        n,
    )
    .prop_map(move |rows| RatMatrix::from_rows(&Rationals, n, rows).unwrap())
}

fn square_pair() -> impl Strategy<Value = (RatMatrix, RatMatrix)> {
    (1usize..=4).prop_flat_map(|n| (square(n), square(n)))
}

fn div_class() -> impl Strategy<Value = DivClass> {
    (
        small_rational(),
        small_rational(),
        small_rational(),
        small_rational(),
    )
        .prop_map(|(a, b, c, d)| DivClass::new(a, b, c, d))
}

fn upstairs() -> impl Strategy<Value = UpstairsClass> {
    (
        small_rational(),
        small_rational(),
        small_rational(),
        small_rational(),
    )
        .prop_map(|(a, b, c, d)| UpstairsClass::new(a, b, c, d))
}

proptest! {
    #[test]
    fn evaluation_is_a_ring_homomorphism(p in poly(), q in poly(), x in small_rational()) {
        prop_assert_eq!((&p + &q).eval(&x), p.eval(&x) + q.eval(&x));
        prop_assert_eq!((&p * &q).eval(&x), p.eval(&x) * q.eval(&x));
        prop_assert_eq!((&p - &q).eval(&x), p.eval(&x) - q.eval(&x));
    }

    #[test]
    fn derivative_obeys_leibniz(p in poly(), q in poly()) {
        let lhs = (&p * &q).derivative();
        let rhs = &(&p.derivative() * &q) + &(&p * &q.derivative());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn division_reconstructs(p in poly(), q in poly()) {
        prop_assume!(!q.is_zero());
        let (quot, rem) = p.div_rem(&q).unwrap();
        prop_assert_eq!(&(&quot * &q) + &rem, p);
        prop_assert!(rem.is_zero() || rem.degree() < q.degree());
    }

    #[test]
    fn from_roots_vanishes_at_roots(roots in prop::collection::vec(small_rational(), 0..8)) {
        let p = RatPoly::from_roots(roots.iter());
        prop_assert_eq!(p.degree(), Some(roots.len()));
        for r in &roots {
            prop_assert!(p.eval(r).is_zero());
        }
    }

    #[test]
    fn vandermonde_determinant(xs in prop::collection::btree_set(-30i64..=30, 1..7)) {
        let xs: Vec<Rational> = xs.into_iter().map(rat).collect();
        let n = xs.len();
        let rows = xs.iter().map(|x| (0..n as u32).map(|e| num_traits::pow(x.clone(), e as usize)).collect()).collect();
        let m = RatMatrix::from_rows(&Rationals, n, rows).unwrap();
        let mut expected = Rational::one();
        for i in 0..n {
            for j in i + 1..n {
                expected *= &xs[j] - &xs[i];
            }
        }
        prop_assert_eq!(det_exact(&m).unwrap(), expected);
    }

    #[test]
    fn nullspace_is_annihilated_and_complementary(m in matrix(6, 8)) {
        let ns = nullspace(&m);
        prop_assert_eq!(ns.len() + rank_exact(&m), m.cols());
        for v in &ns {
            prop_assert!(annihilates(&m, v));
        }
        if !ns.is_empty() {
            let basis = RatMatrix::from_rows(&Rationals, m.cols(), ns.clone()).unwrap();
            prop_assert_eq!(rank_exact(&basis), ns.len());
        }
    }

    #[test]
    fn modular_rank_bounded_by_exact(m in matrix(7, 7), p in prop::sample::select(vec![2u64, 3, 5, 7, 131])) {
        match rank_mod_p(&m, p) {
            Ok(r) => prop_assert!(r <= rank_exact(&m)),
            Err(Error::BadPrime { .. }) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn left_kernel_certificate_is_sound(m in matrix(7, 7), p in prop::sample::select(vec![2u64, 3, 5, 131])) {
        match rank_by_left_kernel(&m, p) {
            Ok(Some(r)) => prop_assert_eq!(r, rank_exact(&m)),
            Ok(None) | Err(Error::BadPrime { .. }) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
        prop_assert_eq!(rank_certified(&m, p).unwrap(), rank_exact(&m));
    }

    #[test]
    fn fraction_free_and_field_elimination_agree(m in matrix(7, 7)) {
        prop_assert_eq!(rank_exact(&m), m.rank());
    }

    #[test]
    fn row_scaling_preserves_rank(m in matrix(6, 6), s in nonzero_rational(), r in any::<prop::sample::Index>()) {
        let mut scaled = m.clone();
        scaled.scale_row(r.index(m.rows()), &s);
        prop_assert_eq!(rank_exact(&scaled), rank_exact(&m));
    }

    #[test]
    fn determinant_is_multiplicative((a, b) in square_pair()) {
        let n = a.rows();
        let mut prod = RatMatrix::zeros(&Rationals, n, n);
        for i in 0..n {
            for j in 0..n {
                let v: Rational = (0..n).map(|k| a.get(i, k) * b.get(k, j)).sum();
                prod.set(i, j, v);
            }
        }
        prop_assert_eq!(det_exact(&prod).unwrap(), det_exact(&a).unwrap() * det_exact(&b).unwrap());
    }

    #[test]
    fn csv_round_trip(m in matrix(5, 5)) {
        let back = read_matrix_csv(matrix_to_csv_string(&m).as_bytes()).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn div_class_vector_space(x in div_class(), y in div_class(), z in div_class(), s in small_rational(), t in small_rational()) {
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!((&x + &y).scale(&s), &x.scale(&s) + &y.scale(&s));
        prop_assert_eq!(x.scale(&(&s + &t)), &x.scale(&s) + &x.scale(&t));
        prop_assert_eq!(x.scale(&s).scale(&t), x.scale(&(&s * &t)));
        prop_assert_eq!(&x - &x, DivClass::default());
    }

    #[test]
    fn pushforward_is_linear(u in upstairs(), v in upstairs(), s in small_rational(), t in small_rational()) {
        for rule in [OmegaSquaredRule::Minus, OmegaSquaredRule::Plus] {
            let lhs = pushforward(&(&u.scale(&s) + &v.scale(&t)), rule);
            let rhs = &pushforward(&u, rule).scale(&s) + &pushforward(&v, rule).scale(&t);
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn seed_determines_draw(g in 6usize..14, seed in any::<u64>(), attempt in 0u32..6) {
        let a = random_params(g, seed, attempt).ok().map(|p| p.digest());
        let b = random_params(g, seed, attempt).ok().map(|p| p.digest());
        prop_assert_eq!(a, b);
    }
}

#[test]
fn field_inverse_round_trip() {
    for n in [-7i64, -1, 2, 13] {
        let x = rat(n);
        assert!((x.times(&x.inverse().unwrap()) - Rational::one()).is_zero());
    }
}
