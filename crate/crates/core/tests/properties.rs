use std::sync::OnceLock;

use ndescent::blackbox::trivialize;
use ndescent::cubic::TernaryCubic;
use ndescent::etale::kummer_representatives;
use ndescent::pipeline::Setup;
use ndescent::segre::{gauge_quadrics, quadric_system, same_span};
use ndescent::theta::enveloping_algebra;
use ndescent::{Matrix, Tower};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn setup() -> &'static Setup {
    static S: OnceLock<Setup> = OnceLock::new();
    S.get_or_init(|| Setup::new(13, 2, 5, 3, 4).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coboundaries_lie_in_h_and_are_detected(seed in any::<u64>()) {
        let et = &setup().etale;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eta = et.random_unit(&mut rng);
        let rho = et.partial1(&eta).unwrap();
        prop_assert!(et.is_in_h(&rho));
        let w = et.boundary_witness(&rho).unwrap().unwrap();
        prop_assert_eq!(et.partial1(&w).unwrap(), rho);
    }

    #[test]
    fn fourier_map_is_multiplicative(seed in any::<u64>()) {
        let et = &setup().etale;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = et.random(&mut rng);
        let b = et.random(&mut rng);
        let conv = et.star(&et.one2(), &a, &b);
        prop_assert_eq!(
            et.fourier_ring_map(&conv),
            et.fourier_ring_map(&a).mul(&et.fourier_ring_map(&b))
        );
        // The pairing is alternating, so applying the normalized transform twice divides by n^2.
        let twice = et.fourier(&et.fourier(&a));
        let n2 = et.l().from_u64(et.dim() as u64);
        prop_assert_eq!(twice.scale(&n2), a);
    }

    #[test]
    fn black_box_splits_every_twisted_algebra(seed in any::<u64>(), class in 0usize..3) {
        let s = setup();
        let et = &s.etale;
        let reps = kummer_representatives(&s.curve, 3);
        let rho = et.class_from_point(&reps[class % reps.len()], seed).unwrap().rho;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eta = et.random_unit(&mut rng);
        let twist = s.epsilon.mul(&rho).mul(&et.partial1(&eta).unwrap());
        let alg = enveloping_algebra(et, &twist).unwrap();
        let tau = trivialize(&alg, seed).unwrap();
        tau.verify(&alg).unwrap();
        prop_assert!(tau.draws <= 64);
    }

    #[test]
    fn quadric_space_follows_the_gauge(seed in any::<u64>()) {
        let s = setup();
        let et = &s.etale;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reps = kummer_representatives(&s.curve, 3);
        let rho = et.class_from_point(&reps[1], 0).unwrap().rho;
        let eta = et.random_unit(&mut rng);
        let base = quadric_system(et, &rho).unwrap();
        let moved = quadric_system(et, &rho.mul(&et.partial1(&eta).unwrap())).unwrap();
        prop_assert!(same_span(&moved.polys(), &gauge_quadrics(et, &base, &eta).unwrap()));
    }

    #[test]
    fn cubic_invariants_have_weights_four_and_six(
        coeffs in proptest::collection::vec(0u64..7, 10),
        entries in proptest::collection::vec(0i64..7, 9),
    ) {
        let tower = Tower::new(7);
        let k = tower.prime();
        let f = TernaryCubic::new(&k, coeffs.iter().map(|&c| k.from_u64(c)).collect());
        let rows: Vec<&[i64]> = entries.chunks(3).collect();
        let m = Matrix::from_i64(&k, &rows);
        let d = m.det();
        let (i, j) = (f.invariants(), f.substitute(&tower, &m).invariants());
        prop_assert_eq!(j.c4, &i.c4 * &d.pow_u64(4));
        prop_assert_eq!(j.c6, &i.c6 * &d.pow_u64(6));
    }
}
