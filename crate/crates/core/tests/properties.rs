use proptest::prelude::*;
use tailsheaf_core::groebner::monomial_ideal_numerator;
use tailsheaf_core::poly::monomials_of_degree;
use tailsheaf_core::{
    binomial, change_coordinates, groebner_ideal, groebner_module, hilbert_binomial, mult_map, DenseMatrix, Field,
    HilbertSeries, Monomial, Poly, PolyRing, Scalar,
};

fn ring(nvars: usize, field: Field) -> PolyRing {
    PolyRing::new(nvars, field).unwrap()
}

fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, cols), rows)
}

/// Homogeneous form of degree `d` with small integer coefficients.
fn form(r: PolyRing, d: i64, coeffs: &[i64]) -> Poly {
    let terms = monomials_of_degree(r.nvars(), d)
        .into_iter()
        .zip(coeffs.iter().cycle())
        .map(|(m, &c)| (m, Scalar::from_int(r.field(), c)))
        .collect();
    Poly::from_terms(r, terms)
}

fn unimodular(field: Field, n: usize, seed: &[i64]) -> DenseMatrix {
    // lower-unitriangular times upper-unitriangular
    let mut l = DenseMatrix::identity(field, n);
    let mut u = DenseMatrix::identity(field, n);
    let mut k = 0;
    for i in 0..n {
        for j in 0..i {
            l.set(i, j, Scalar::from_int(field, seed[k % seed.len()]));
            u.set(j, i, Scalar::from_int(field, seed[(k + 1) % seed.len()]));
            k += 2;
        }
    }
    l.mul(&u)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_is_invariant_under_invertible_multiplication(a in small_matrix(4, 5), s in prop::collection::vec(-3i64..=3, 1..12)) {
        let f = Field::Rationals;
        let m = DenseMatrix::from_ints(f, &a);
        let left = unimodular(f, 4, &s);
        let right = unimodular(f, 5, &s);
        prop_assert_eq!(left.mul(&m).mul(&right).rank(), m.rank());
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn modular_rank_never_exceeds_rational_rank(a in small_matrix(5, 4)) {
        let q = DenseMatrix::from_ints(Field::Rationals, &a).rank();
        let p = DenseMatrix::from_ints(Field::Prime(7), &a).rank();
        prop_assert!(p <= q);
    }

    #[test]
    fn kernel_vectors_are_annihilated(a in small_matrix(3, 6)) {
        let m = DenseMatrix::from_ints(Field::Rationals, &a);
        let ker = m.kernel();
        prop_assert_eq!(ker.len() + m.rank(), 6);
        for v in ker {
            prop_assert!(m.mul_vec(&v).iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn pascal_recurrence(n in 1u32..6, d in -12i64..12) {
        prop_assert_eq!(
            hilbert_binomial(n, d),
            hilbert_binomial(n, d - 1) + hilbert_binomial(n - 1, d)
        );
        if d >= 0 {
            prop_assert_eq!(hilbert_binomial(n, d), binomial(n as u64 + d as u64, n as u64) as i128);
        }
    }

    #[test]
    fn multiplication_maps_compose(c1 in prop::collection::vec(-3i64..=3, 1..6), c2 in prop::collection::vec(-3i64..=3, 1..6), d in 0i64..3) {
        let r = ring(3, Field::Rationals);
        let f = form(r, 1, &c1);
        let g = form(r, 2, &c2);
        prop_assume!(!f.is_zero() && !g.is_zero());
        let fg = &f * &g;
        let composed = mult_map(&g, d + 1).unwrap().mul(&mult_map(&f, d).unwrap());
        prop_assert_eq!(composed, mult_map(&fg, d).unwrap());
    }

    #[test]
    fn coordinate_change_is_a_ring_map(c1 in prop::collection::vec(-3i64..=3, 1..6), c2 in prop::collection::vec(-3i64..=3, 1..6), s in prop::collection::vec(-2i64..=2, 1..8)) {
        let r = ring(3, Field::Rationals);
        let t = unimodular(Field::Rationals, 3, &s);
        let f = form(r, 2, &c1);
        let g = form(r, 1, &c2);
        let lhs = change_coordinates(&(&f * &g), &t).unwrap();
        let rhs = &change_coordinates(&f, &t).unwrap() * &change_coordinates(&g, &t).unwrap();
        prop_assert_eq!(lhs, rhs);
        let sum = change_coordinates(&(&f + &(&g * &r.var(0))), &t).unwrap();
        let parts = &change_coordinates(&f, &t).unwrap() + &change_coordinates(&(&g * &r.var(0)), &t).unwrap();
        prop_assert_eq!(sum, parts);
    }

    #[test]
    fn monomial_hilbert_function_matches_counting(exps in prop::collection::vec(prop::collection::vec(0u32..4, 3), 1..6)) {
        let gens: Vec<Monomial> = exps.iter().map(|e| Monomial::from_exponents(e)).collect();
        let hs = HilbertSeries::new(3, 0, monomial_ideal_numerator(&gens));
        for d in 0..10 {
            let count = monomials_of_degree(3, d).iter().filter(|m| !gens.iter().any(|g| g.divides(m))).count();
            prop_assert_eq!(hs.hf(d), count as i128);
        }
    }

    #[test]
    fn ideal_hilbert_function_matches_linear_algebra(c1 in prop::collection::vec(-3i64..=3, 1..8), c2 in prop::collection::vec(-3i64..=3, 1..8)) {
        let r = ring(3, Field::Rationals);
        let f = form(r, 2, &c1);
        let g = form(r, 2, &c2);
        prop_assume!(!f.is_zero() && !g.is_zero());
        let gb = groebner_ideal(&[f.clone(), g.clone()]).unwrap();
        let hs = gb.hilbert_series();
        for d in 0..6i64 {
            let dim = monomials_of_degree(3, d).len();
            let image = if d >= 2 {
                mult_map(&f, d - 2).unwrap().hstack(&mult_map(&g, d - 2).unwrap()).rank()
            } else {
                0
            };
            prop_assert_eq!(hs.hf(d), (dim - image) as i128);
        }
    }

    #[test]
    fn module_hilbert_function_matches_linear_algebra(c in prop::collection::vec(-2i64..=2, 6)) {
        // quotient of S + S(-1) by the columns (a, c0) and (ab, b)
        let r = ring(3, Field::Rationals);
        let a = form(r, 1, &c[0..3]);
        let b = form(r, 1, &c[3..6]);
        let gens = vec![vec![a.clone(), r.constant(c[0])], vec![&a * &b, b.clone()]];
        let gb = groebner_module(r, &[0, 1], &gens).unwrap();
        let hs = gb.hilbert_series();
        // component k of a generator in degree gd has degree gd - k
        let block = |p: &Poly, src: i64, tgt: i64| {
            if p.is_zero() {
                DenseMatrix::zeros(Field::Rationals, monomials_of_degree(3, tgt).len(), monomials_of_degree(3, src).len())
            } else {
                mult_map(p, src).unwrap()
            }
        };
        for d in 0..5i64 {
            let dim = monomials_of_degree(3, d).len() + monomials_of_degree(3, d - 1).len();
            let mut cols: Option<DenseMatrix> = None;
            for (g, gd) in gens.iter().zip([1i64, 2]) {
                if d < gd {
                    continue;
                }
                let m = block(&g[0], d - gd, d).vstack(&block(&g[1], d - gd, d - 1));
                cols = Some(match cols { None => m, Some(prev) => prev.hstack(&m) });
            }
            let image = cols.map_or(0, |m| m.rank());
            prop_assert_eq!(hs.hf(d), (dim - image) as i128);
        }
    }
}
