use proptest::prelude::*;
use tailsheaf::classify::classify_tail;
use tailsheaf::cohomology::{cohomology_table, euler_check, ext_module, Engine};
use tailsheaf::construct::{
    curvilinear, from_local_algebra, jordan_algebra, normalize_point, points_block, random_presentation, s1, scramble,
    FatPointSpec, PointBlock,
};
use tailsheaf::structure::{decompose, peel};
use tailsheaf::SheafPresentation;
use tailsheaf_core::{Field, PolyRing, Scalar};

fn q(v: &[i64]) -> Vec<Scalar> {
    v.iter().map(|&x| Scalar::from_int(Field::Rationals, x)).collect()
}

fn ring3() -> PolyRing {
    PolyRing::projective(3, Field::Rationals)
}

/// Small minimal tails on P^3 with known `m`.
fn tail(kind: u8, m: usize) -> (SheafPresentation, u64) {
    match kind % 3 {
        0 => (s1(3).unwrap(), 1),
        1 => (curvilinear(3, m).unwrap(), m as u64),
        _ => {
            let pts = [q(&[0, 0, 0, 1]), q(&[1, 0, 0, 0]), q(&[0, 1, 0, 0])];
            let blocks: Vec<PointBlock> = pts[..m].iter().map(|p| PointBlock::at(ring3(), p).unwrap()).collect();
            (points_block(ring3(), &blocks).unwrap(), m as u64)
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn engines_agree(seed in 0u64..10_000, n in 2usize..=4) {
        let p = random_presentation(seed, n);
        let dense = cohomology_table(&p, -8, 3, Engine::Dense).unwrap();
        let gb = cohomology_table(&p, -8, 3, Engine::Groebner).unwrap();
        prop_assert_eq!(dense.rows, gb.rows);
    }

    #[test]
    fn intermediate_cohomology_vanishes(seed in 0u64..10_000, n in 3usize..=4) {
        let p = random_presentation(seed, n);
        let t = cohomology_table(&p, -7, 2, Engine::Dense).unwrap();
        for row in &t.rows {
            for i in 1..n - 1 {
                prop_assert_eq!(row.h[i], 0, "h^{}(F({}))", i, row.t);
            }
        }
    }

    #[test]
    fn euler_characteristic_matches(seed in 0u64..10_000, t in -8i64..4) {
        let p = random_presentation(seed, 3);
        prop_assert!(euler_check(&p, t).unwrap().pass);
    }

    #[test]
    fn twisting_shifts_the_table(seed in 0u64..10_000, k in -3i64..=3) {
        let p = random_presentation(seed, 3);
        let a = cohomology_table(&p, -8, 3, Engine::Dense).unwrap();
        let b = cohomology_table(&p.twist(k), -8 - k, 3 - k, Engine::Dense).unwrap();
        for row in &a.rows {
            prop_assert_eq!(Some(row.h.as_slice()), b.row(row.t - k));
        }
    }

    #[test]
    fn tail_height_is_additive(a in 0u8..3, ma in 1usize..=3, b in 0u8..3, mb in 1usize..=3) {
        let (p, m1) = tail(a, ma);
        let (r, m2) = tail(b, mb);
        let c = classify_tail(&p.direct_sum(&r).unwrap()).unwrap();
        prop_assert!(c.is_tail);
        prop_assert_eq!(c.m, m1 + m2);
    }

    #[test]
    fn linear_forms_act_invertibly_in_stable_degrees(kind in 0u8..3, m in 1usize..=3, c in prop::collection::vec(1i64..=5, 4)) {
        let (p, expect) = tail(kind, m);
        let e = ext_module(&p).unwrap();
        let reduced = e.series().reduced();
        let d = reduced.offset + reduced.numerator.len() as i64 + 1;
        let ring = p.ring();
        let l = (0..4).fold(ring.zero(), |acc, k| &acc + &ring.var(k).scale(&Scalar::from_int(Field::Rationals, c[k])));
        let mult = e.module().unwrap().multiplication_matrix(&l, d).unwrap();
        prop_assert_eq!((mult.rows(), mult.cols(), mult.rank()), (expect as usize, expect as usize, expect as usize));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn scrambled_blocks_are_recovered(seed in 0u64..10_000, m1 in 1usize..=2, m2 in 1usize..=2) {
        let a = normalize_point(&q(&[1, 2, 0, 1]));
        let b = normalize_point(&q(&[0, 1, -1, 3]));
        let block = |pt: &Vec<Scalar>, m| {
            from_local_algebra(&FatPointSpec { point: pt.clone(), algebra: jordan_algebra(3, m).unwrap() }).unwrap()
        };
        let p = block(&a, m1).direct_sum(&block(&b, m2)).unwrap();
        let (scrambled, change) = scramble(&p, seed).unwrap();
        let d = decompose(&scrambled).unwrap();
        let mut got: Vec<(usize, Vec<Scalar>)> = d.blocks.iter().map(|b| (b.m, b.point.clone())).collect();
        got.sort();
        let mut want = vec![
            (m1, normalize_point(&change.map_point(&a).unwrap())),
            (m2, normalize_point(&change.map_point(&b).unwrap())),
        ];
        want.sort();
        prop_assert_eq!(got, want);
        prop_assert_eq!(d.record.apply(&scrambled.twist(d.shift)).unwrap(), d.presentation);
    }

    #[test]
    fn peeling_lowers_the_height_by_one(kind in 0u8..3, m in 2usize..=3, seed in 0u64..1000) {
        let (p, expect) = tail(kind, m);
        let (scrambled, _) = scramble(&p, seed).unwrap();
        let r = peel(&scrambled).unwrap();
        prop_assert_eq!(r.record.apply(&scrambled.twist(r.shift)).unwrap(), r.transformed);
        match r.quotient {
            None => prop_assert_eq!(expect, 1),
            Some(quot) => {
                let c = classify_tail(&quot).unwrap();
                prop_assert!(c.is_tail && c.minimal);
                prop_assert_eq!(c.m, expect - 1);
            }
        }
    }
}
