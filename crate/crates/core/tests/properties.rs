//! Invariants of the linear algebra, the two backends and the couple engine.

use exact_couples::category::{
    canonical_bar, chain, is_strict, mediate_pullback, mediate_pushout, Category, Sampler,
};
use exact_couples::couple::{derive, differential, Side};
use exact_couples::filt::Filt;
use exact_couples::generators::random_massey;
use exact_couples::linalg::{format_rational, parse_rational, ratio, Matrix, Subspace};
use exact_couples::vect::Vect;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn matrix(max: usize) -> impl Strategy<Value = Matrix> {
    (0..=max, 0..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(-3i64..=3, r * c).prop_map(move |v| {
            let rows: Vec<&[i64]> = v.chunks(c.max(1)).take(r).collect();
            if c == 0 {
                Matrix::zeros(r, 0)
            } else {
                Matrix::from_i64(&rows)
            }
        })
    })
}

fn same_rows(max: usize) -> impl Strategy<Value = (Matrix, Matrix)> {
    (1..=max, 0..=max, 0..=max).prop_flat_map(|(r, a, b)| {
        (
            prop::collection::vec(-2i64..=2, r * a),
            prop::collection::vec(-2i64..=2, r * b),
        )
            .prop_map(move |(x, y)| (build(r, a, &x), build(r, b, &y)))
    })
}

fn build(r: usize, c: usize, v: &[i64]) -> Matrix {
    let mut m = Matrix::zeros(r, c);
    for i in 0..r {
        for j in 0..c {
            m[(i, j)] = ratio(v[i * c + j], 1);
        }
    }
    m
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nullspace_is_annihilated(m in matrix(5)) {
        let null = m.nullspace();
        prop_assert!((&m * null.basis()).is_zero());
        prop_assert_eq!(m.rank() + null.dim(), m.cols());
    }

    #[test]
    fn rref_is_idempotent(m in matrix(5)) {
        let once = m.rref();
        let twice = once.reduced.rref();
        prop_assert_eq!(&once.reduced, &twice.reduced);
        prop_assert_eq!(once.pivots, twice.pivots);
    }

    #[test]
    fn rank_of_transpose(m in matrix(5)) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn solve_recovers_consistent_systems((a, x) in same_rows(4)) {
        // a · (a ᵀ x) is always consistent
        let rhs = &a * &(&a.transpose() * &x);
        let sol = a.solve(&rhs).unwrap();
        prop_assert_eq!(&a * &sol.particular, rhs);
        prop_assert_eq!(sol.homogeneous.dim(), a.cols() - a.rank());
    }

    #[test]
    fn sum_and_intersection_dimensions((a, b) in same_rows(5)) {
        let (u, w) = (a.column_space(), b.column_space());
        let s = u.sum(&w).unwrap();
        let i = u.intersection(&w).unwrap();
        prop_assert_eq!(s.dim() + i.dim(), u.dim() + w.dim());
        prop_assert!(s.contains(&u).unwrap() && u.contains(&i).unwrap());
    }

    #[test]
    fn complement_projection_kills_the_subspace((a, _b) in same_rows(5)) {
        let u = a.column_space();
        let p = u.complement_projection();
        prop_assert!((&p * u.basis()).is_zero());
        prop_assert_eq!(p.rank(), u.ambient_dim() - u.dim());
    }

    #[test]
    fn preimage_of_image_contains_kernel((a, _b) in same_rows(5)) {
        let full = Subspace::full(a.cols());
        let back = full.image(&a).preimage(&a);
        prop_assert!(back.is_full());
    }

    #[test]
    fn rationals_round_trip(n in -50i64..50, d in 1i64..20) {
        let q = ratio(n, d);
        prop_assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
    }

    #[test]
    fn vect_factorisation(seed in any::<u64>()) {
        factorisation_holds(&Vect, seed)?;
    }

    #[test]
    fn filt_factorisation(seed in any::<u64>()) {
        factorisation_holds(&Filt, seed)?;
    }

    #[test]
    fn filt_strictness_fast_path_agrees(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = Filt.random_object(&mut r, 4);
        let y = Filt.random_object(&mut r, 4);
        let f = Filt.random_morphism(&mut r, &x, &y);
        prop_assert_eq!(Filt.is_strict_fast(&f), Some(is_strict(&Filt, &f).unwrap().is_strict()));
    }

    #[test]
    fn filt_bar_is_monic_and_epic(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = Filt.random_object(&mut r, 4);
        let y = Filt.random_object(&mut r, 4);
        let f = Filt.random_morphism(&mut r, &x, &y);
        let bar = canonical_bar(&Filt, &f).unwrap().bar;
        prop_assert!(Filt.is_monic(&bar) && Filt.is_epic(&bar));
    }

    #[test]
    fn vect_pullbacks_and_pushouts_commute(seed in any::<u64>()) {
        squares_commute(&Vect, seed)?;
    }

    #[test]
    fn filt_pullbacks_and_pushouts_commute(seed in any::<u64>()) {
        squares_commute(&Filt, seed)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_massey_derivations_keep_the_differential_square_zero(seed in any::<u64>()) {
        let (_, c) = random_massey(&mut rng(seed), 3, 6).unwrap();
        for side in [Side::Left, Side::Right] {
            let d = derive(&Vect, &c, side).unwrap().couple;
            let dd = differential(&Vect, &d).unwrap();
            prop_assert!(Vect.compose(&dd, &dd).unwrap().matrix().is_zero());
            // both derivations have E of dimension rank-nullity of ∂
            let partial = differential(&Vect, &c).unwrap();
            let m = partial.matrix();
            prop_assert_eq!(d.e().dim, m.cols() - 2 * m.rank());
        }
    }
}

fn factorisation_holds<C: Sampler>(cat: &C, seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let x = cat.random_object(&mut r, 4);
    let y = cat.random_object(&mut r, 4);
    let f = cat.random_morphism(&mut r, &x, &y);
    let k = cat.kernel(&f);
    let q = cat.cokernel(&f);
    prop_assert!(cat.is_zero(&cat.compose(&f, &k).unwrap()));
    prop_assert!(cat.is_zero(&cat.compose(&q, &f).unwrap()));
    prop_assert!(cat.is_monic(&k) && cat.is_epic(&q));
    let fac = canonical_bar(cat, &f).unwrap();
    prop_assert_eq!(chain(cat, &[&fac.im, &fac.bar, &fac.coim]).unwrap(), f);
    Ok(())
}

fn squares_commute<C: Sampler>(cat: &C, seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let (a, x, z) = (
        cat.random_object(&mut r, 3),
        cat.random_object(&mut r, 3),
        cat.random_object(&mut r, 3),
    );
    let f = cat.random_morphism(&mut r, &x, &z);
    let g = cat.random_morphism(&mut r, &a, &z);
    let pb = cat.pullback(&f, &g).unwrap();
    prop_assert_eq!(
        cat.compose(&f, &pb.p1).unwrap(),
        cat.compose(&g, &pb.p2).unwrap()
    );
    // the square itself is a cone; its mediation is the identity
    let w = mediate_pullback(cat, &pb, &pb.p1, &pb.p2).unwrap();
    prop_assert_eq!(w, cat.identity(&pb.object));

    let f = cat.random_morphism(&mut r, &a, &x);
    let g = cat.random_morphism(&mut r, &a, &z);
    let po = cat.pushout(&f, &g).unwrap();
    prop_assert_eq!(
        cat.compose(&po.q1, &f).unwrap(),
        cat.compose(&po.q2, &g).unwrap()
    );
    let w = mediate_pushout(cat, &po, &po.q1, &po.q2).unwrap();
    prop_assert_eq!(w, cat.identity(&po.object));
    Ok(())
}
