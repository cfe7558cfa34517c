use num_bigint::BigInt;
use num_traits::ToPrimitive;
use padic_core::{ExactRational, PAdic, Prime};
use proptest::prelude::*;

/// Primes with the digit counts used for the residue-ring oracle, chosen
/// so that `p^N` fits comfortably in an `i128` product.
const RINGS: [(u64, u32); 4] = [(2, 40), (3, 24), (5, 16), (7, 14)];

fn modulus(p: u64, n: u32) -> i128 {
    (p as i128).pow(n)
}

fn inverse_mod(a: i128, m: i128) -> i128 {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    assert_eq!(r0, 1, "not invertible");
    s0.rem_euclid(m)
}

/// `num / den mod m` for `den` prime to `p`.
fn residue(num: i64, den: i64, m: i128) -> i128 {
    (num as i128).rem_euclid(m) * inverse_mod(den as i128, m) % m
}

fn embed(num: i64, den: i64, p: Prime, n: u32) -> PAdic {
    PAdic::from_rational(&ExactRational::new(BigInt::from(num), BigInt::from(den)), p, n)
}

fn read_residue(x: &PAdic, n: u32) -> i128 {
    x.digits_window(0, n).unwrap_or_else(|e| panic!("{e} on {x:?}")).to_i128().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ring_ops_match_residue_arithmetic(
        ring in 0usize..4,
        a in -10_000i64..10_000,
        c in -10_000i64..10_000,
        b in 1i64..400,
        d in 1i64..300,
    ) {
        let (pv, n) = RINGS[ring];
        let p = Prime::new(pv).unwrap();
        let m = modulus(pv, n);
        let fix = |d: i64| if d as u64 % pv == 0 { d + 1 } else { d };
        let (b, d) = (fix(b), fix(d));
        let x = embed(a, b, p, n);
        let y = embed(c, d, p, n);
        let (rx, ry) = (residue(a, b, m), residue(c, d, m));
        prop_assert_eq!(read_residue(&x, n), rx);
        prop_assert_eq!(read_residue(&(&x + &y), n), (rx + ry) % m);
        prop_assert_eq!(read_residue(&(&x - &y), n), (rx - ry).rem_euclid(m));
        prop_assert_eq!(read_residue(&(&x * &y), n), rx * ry % m);
        prop_assert_eq!(read_residue(&x.negate(), n), (-rx).rem_euclid(m));
        if a.rem_euclid(pv as i64) != 0 {
            prop_assert_eq!(read_residue(&x.inv().unwrap(), n), inverse_mod(rx, m));
            let q = y.checked_div(&x).unwrap();
            prop_assert_eq!(read_residue(&q, n), ry * inverse_mod(rx, m) % m);
        }
    }

    #[test]
    fn ultrametric_inequality(
        ring in 0usize..4,
        a in -100_000i64..100_000,
        c in -100_000i64..100_000,
        b in 1i64..1000,
        d in 1i64..1000,
    ) {
        let (pv, _) = RINGS[ring];
        let p = Prime::new(pv).unwrap();
        prop_assume!(a != 0 && c != 0);
        let x = embed(a, b, p, 20);
        let y = embed(c, d, p, 20);
        let s = x.checked_add(&y).unwrap();
        prop_assume!(!s.is_vanished() && !s.is_exact_zero());
        let (nx, ny, ns) = (x.norm().unwrap().unwrap(), y.norm().unwrap().unwrap(), s.norm().unwrap().unwrap());
        prop_assert!(ns <= nx.max(ny));
        if nx != ny {
            prop_assert_eq!(ns, nx.max(ny));
        }
    }

    #[test]
    fn norm_is_multiplicative(
        ring in 0usize..4,
        a in -100_000i64..100_000,
        c in -100_000i64..100_000,
        b in 1i64..1000,
        d in 1i64..1000,
    ) {
        let (pv, _) = RINGS[ring];
        let p = Prime::new(pv).unwrap();
        prop_assume!(a != 0 && c != 0);
        let x = embed(a, b, p, 20);
        let y = embed(c, d, p, 20);
        let nx = x.norm().unwrap().unwrap().exp();
        let ny = y.norm().unwrap().unwrap().exp();
        let nxy = x.checked_mul(&y).unwrap().norm().unwrap().unwrap().exp();
        prop_assert_eq!(nxy, nx + ny);
    }

    #[test]
    fn render_parse_round_trip(
        pi in 0usize..6,
        v in -20i64..20,
        digits in proptest::collection::vec(0u32..97, 0..40),
        lead in 1u32..97,
    ) {
        let pv = [2u64, 3, 5, 7, 11, 97][pi] as u32;
        let p = Prime::new(pv as u64).unwrap();
        let mut ds: Vec<u32> = digits.iter().map(|d| d % pv).collect();
        if !ds.is_empty() {
            ds[0] = 1 + lead % (pv - 1);
        }
        let x = PAdic::from_digits(p, v, &ds).unwrap();
        let text = x.render();
        prop_assert_eq!(PAdic::parse(&text).unwrap(), x.clone());
        prop_assert_eq!(text.parse::<PAdic>().unwrap(), x);
    }

    #[test]
    fn doubled_precision_truncates_to_the_same_digits(
        ring in 0usize..4,
        a in -5_000i64..5_000,
        c in -5_000i64..5_000,
        e in -5_000i64..5_000,
        b in 1i64..300,
        d in 1i64..300,
        n in 6u32..24,
    ) {
        let (pv, _) = RINGS[ring];
        let p = Prime::new(pv).unwrap();
        let pipeline = |prec: u32| -> Result<PAdic, padic_core::Error> {
            let x = embed(a, b, p, prec);
            let y = embed(c, d, p, prec);
            let z = embed(e, 1, p, prec);
            let t = x.checked_mul(&y)?.checked_add(&z)?;
            let u = t.checked_sub(&x)?;
            u.checked_mul(&y)?.checked_div(&x.checked_add(&y)?)
        };
        let Ok(low) = pipeline(n) else { return Ok(()); };
        let high = pipeline(2 * n).unwrap();
        match low.absolute_precision() {
            None => prop_assert!(high.is_exact_zero()),
            Some(abs) => {
                prop_assert!(low.agrees_mod(&high, abs).unwrap());
                if let Some(v) = low.valuation() {
                    prop_assert_eq!(high.valuation(), Some(v));
                }
            }
        }
    }
}

#[test]
fn oracle_sanity() {
    assert_eq!(inverse_mod(2, 9), 5);
    assert_eq!(residue(1, 2, 27), 14);
}
