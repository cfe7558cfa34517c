use num_bigint::BigInt;
use padic_core::geometry::DEFAULT_CELL_CAP;
use padic_core::groups::{check_group_axioms, iso, BallGroup, CarrierGroup, Group, SphereGroup};
use padic_core::measure::{haar, haar_clopen, invariance_check, is_subset, normalized_measure, sphere_haar};
use padic_core::padic::pow_rational;
use padic_core::{ClopenSet, ExactRational, PAdic, Prime, Region};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

fn rat(n: i64, d: i64, p: Prime) -> PAdic {
    PAdic::from_rational(&ExactRational::new(BigInt::from(n), BigInt::from(d)), p, 40)
}

fn groups(p: Prime, n: i64, d: i64, e: i64) -> [Group; 2] {
    let a = rat(n, d, p);
    [
        Group::Ball(BallGroup::new(a.clone(), e).unwrap()),
        Group::Sphere(SphereGroup::new(a, e, 40)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn group_laws_hold(
        pi in 0usize..5,
        n in -60i64..60,
        d in 1i64..20,
        e in -3i64..4,
        seed in any::<u64>(),
    ) {
        let p = Prime::new(PRIMES[pi]).unwrap();
        for g in groups(p, n, d, e) {
            let report = check_group_axioms(&g, 12, seed, 32);
            prop_assert!(report.passed(), "{:?}", report.first_failure());
        }
    }

    #[test]
    fn closure_and_identity_on_carrier(
        pi in 0usize..5,
        n in -60i64..60,
        d in 1i64..20,
        e in -3i64..4,
        seed in any::<u64>(),
    ) {
        let p = Prime::new(PRIMES[pi]).unwrap();
        let [ball, sphere] = groups(p, n, d, e);
        let id = sphere.identity();
        prop_assert!(sphere.contains(&id).unwrap());
        prop_assert_eq!(id.checked_sub(sphere.center()).unwrap().norm().unwrap().unwrap().exp(), e);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for g in [ball, sphere] {
            for _ in 0..6 {
                let x = g.random_element(&mut rng, 30);
                let y = g.random_element(&mut rng, 30);
                prop_assert!(g.contains(&g.op(&x, &y).unwrap()).unwrap());
                prop_assert!(g.contains(&g.inverse(&x).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn iso_is_an_invertible_homomorphism(
        pi in 0usize..5,
        n1 in -30i64..30,
        n2 in -30i64..30,
        e1 in -3i64..3,
        e2 in -3i64..3,
        seed in any::<u64>(),
    ) {
        let p = Prime::new(PRIMES[pi]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs = [
            (Group::Ball(BallGroup::new(rat(n1, 1, p), e1).unwrap()), Group::Ball(BallGroup::new(rat(n2, 1, p), e2).unwrap())),
            (Group::Sphere(SphereGroup::new(rat(n1, 1, p), e1, 40)), Group::Sphere(SphereGroup::new(rat(n2, 1, p), e2, 40))),
        ];
        for (src, dst) in pairs {
            for _ in 0..4 {
                let x = src.random_element(&mut rng, 28);
                let y = src.random_element(&mut rng, 28);
                let lhs = iso(&src, &dst, &src.op(&x, &y).unwrap()).unwrap();
                let rhs = dst.op(&iso(&src, &dst, &x).unwrap(), &iso(&src, &dst, &y).unwrap()).unwrap();
                let window = -dst.radius_exp() + 20;
                prop_assert!(lhs.agrees_mod(&rhs, window).unwrap());
                let back = iso(&dst, &src, &iso(&src, &dst, &x).unwrap()).unwrap();
                prop_assert!(back.agrees_mod(&x, -src.radius_exp() + 20).unwrap());
            }
        }
    }

    #[test]
    fn translations_preserve_cell_measure(
        pi in 0usize..4,
        n in -30i64..30,
        e in -2i64..3,
        k in 1u32..3,
        seed in any::<u64>(),
    ) {
        let p = Prime::new(PRIMES[pi]).unwrap();
        let [ball, sphere] = groups(p, n, 1, e);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Group::Sphere(sg) = &sphere else { unreachable!() };
        let s = sg.carrier().clone();
        let x = sphere.random_element(&mut rng, 24);
        for cell in s.cells(k, DEFAULT_CELL_CAP).unwrap() {
            let a = ClopenSet::new(Region::Sphere(s.clone()), vec![cell]).unwrap();
            let rep = invariance_check(&sphere, &x, &a).unwrap();
            prop_assert!(rep.preserved());
        }
        let Group::Ball(bg) = &ball else { unreachable!() };
        let b = bg.carrier().clone();
        let x = ball.random_element(&mut rng, 24);
        for sub in b.cells(k, DEFAULT_CELL_CAP).unwrap() {
            let a = ClopenSet::new(Region::Ball(b.clone()), vec![sub]).unwrap();
            prop_assert!(invariance_check(&ball, &x, &a).unwrap().preserved());
        }
    }

    #[test]
    fn measure_is_additive_and_monotone(
        pi in 0usize..4,
        n in -30i64..30,
        e in -2i64..3,
        pick in proptest::collection::vec(any::<bool>(), 1..40),
    ) {
        let p = Prime::new(PRIMES[pi]).unwrap();
        let s = padic_core::Sphere::new(rat(n, 1, p), e);
        let cells = s.cells(2, DEFAULT_CELL_CAP).unwrap();
        let chosen: Vec<_> = cells.iter().zip(pick.iter().cycle()).filter(|(_, &b)| b).map(|(c, _)| c.clone()).collect();
        let a = ClopenSet::new(Region::Sphere(s.clone()), chosen.clone()).unwrap();
        let sum = chosen.iter().map(haar).fold(ExactRational::from_integer(0.into()), |x, y| x + y);
        prop_assert_eq!(haar_clopen(&a).unwrap(), sum.clone());
        let refined = a.refined_to(e - 4, DEFAULT_CELL_CAP).unwrap();
        prop_assert_eq!(haar_clopen(&refined).unwrap(), sum);
        let whole = ClopenSet::whole_sphere(&s).unwrap();
        prop_assert!(is_subset(&a, &whole).unwrap());
        prop_assert!(normalized_measure(&s, &a).unwrap() <= normalized_measure(&s, &whole).unwrap());
        prop_assert_eq!(normalized_measure(&s, &whole).unwrap(), ExactRational::from_integer(1.into()));
        let pm1 = ExactRational::from_integer(BigInt::from(PRIMES[pi] - 1));
        prop_assert_eq!(sphere_haar(&s), pm1 * pow_rational(p, e) / ExactRational::from_integer(BigInt::from(PRIMES[pi])));
    }
}
