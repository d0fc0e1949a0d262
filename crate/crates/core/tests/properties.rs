//! Property tests for the exact layer: scalar normalization, float embedding, and closure of the
//! form-preserving group under products and inverses.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use growthlab::bundled;
use growthlab::enumerate::GeneratorSystem;
use growthlab::liegroup::{cartan_projection, GMatrix};
use growthlab::scalars::QuadRational;

const FIELDS: [u32; 5] = [1, 2, 3, 5, 7];

fn scalar() -> impl Strategy<Value = (i64, i64, i64, u32)> {
    (-10_000i64..10_000, -10_000i64..10_000, (1i64..5_000).prop_flat_map(|d| prop_oneof![Just(d), Just(-d)]), 0..FIELDS.len())
        .prop_map(|(a, b, den, k)| {
            let d = FIELDS[k];
            (a, if d == 1 { 0 } else { b }, den, d)
        })
}

/// Sign of `x − (a + b√d)/den` for a finite double `x`, from integer arithmetic alone.
fn sign_against(x: f64, a: &BigInt, b: &BigInt, den: &BigInt, d: u32) -> Ordering {
    let (mant, exp, sign) = num_traits::float::FloatCore::integer_decode(x);
    let m = BigInt::from(mant) * BigInt::from(sign);
    // x = m·2^exp; scale everything by 2^s with s = max(0, −exp) to stay integral
    let s = (-(exp as i64)).max(0) as u64;
    let xs: BigInt = if exp >= 0 { &m << (exp as u64) } else { m };
    let (a, b, den) = if den.is_negative() { (-a, -b, -den) } else { (a.clone(), b.clone(), den.clone()) };
    // sign(xs·den − (a + b√d)·2^s)
    let p = &xs * &den - (&a << s);
    let q = &b << s;
    // sign(p − q√d)
    match (p.sign(), q.sign()) {
        (_, num_bigint::Sign::NoSign) => p.sign().cmp(&num_bigint::Sign::NoSign),
        (num_bigint::Sign::NoSign, _) => num_bigint::Sign::NoSign.cmp(&q.sign()),
        (ps, qs) if ps != qs => ps.cmp(&num_bigint::Sign::NoSign),
        (ps, _) => {
            let lhs = &p * &p;
            let rhs = BigInt::from(d) * &q * &q;
            let c = lhs.cmp(&rhs);
            if ps == num_bigint::Sign::Plus {
                c
            } else {
                c.reverse()
            }
        }
    }
}

fn random_word(system: &GeneratorSystem, seq: &[usize]) -> Vec<usize> {
    seq.iter().map(|&k| k % system.len()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn normalize_is_canonical((a, b, den, d) in scalar()) {
        let x = QuadRational::from_i64s(a, b, den, d).unwrap();
        prop_assert!(x.den().is_positive());
        let g = x.a().gcd(x.b()).gcd(x.den());
        prop_assert!(g == BigInt::from(1) || (x.a().is_zero() && x.b().is_zero()));
        // same value: a·den' == a'·den and b·den' == b'·den
        prop_assert_eq!(BigInt::from(a) * x.den(), x.a() * BigInt::from(den));
        prop_assert_eq!(BigInt::from(b) * x.den(), x.b() * BigInt::from(den));
        let y = QuadRational::from_i64s(a * 7, b * 7, den * 7, d).unwrap();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn field_operations_are_exact((a, b, den, d) in scalar(), (c, e, f, _) in scalar()) {
        let x = QuadRational::from_i64s(a, b, den, d).unwrap();
        let y = QuadRational::from_i64s(c, if d == 1 { 0 } else { e }, f, d).unwrap();
        prop_assert_eq!(&(&x + &y) - &y, x.clone());
        prop_assert_eq!(&x * &y, &y * &x);
        if !x.is_zero() {
            prop_assert!((&x * &x.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn embedding_brackets_the_exact_value((a, b, den, d) in scalar()) {
        let x = QuadRational::from_i64s(a, b, den, d).unwrap();
        let e = x.embed();
        if x.is_zero() {
            prop_assert_eq!(e.value, 0.0);
        } else {
            let slack = 2.0 * e.rel_err * e.value.abs();
            let lo = e.value - slack;
            let hi = e.value + slack;
            prop_assert_eq!(sign_against(lo, x.a(), x.b(), x.den(), d), Ordering::Less);
            prop_assert_eq!(sign_against(hi, x.a(), x.b(), x.den(), d), Ordering::Greater);
        }
    }

    #[test]
    fn products_of_generators_preserve_the_form(seq in proptest::collection::vec(0usize..64, 1..24), pick in 0usize..7) {
        let (_, system) = bundled::all().unwrap().swap_remove(pick);
        let w = random_word(&system, &seq);
        let g = system.evaluate(&w);
        prop_assert!(g.is_form_preserving());
        let certified = GMatrix::certify(system.n(), g.exact().clone(), "word").unwrap();
        prop_assert!(certified.mul(&g.inverse()).is_identity());
    }

    #[test]
    fn inverse_word_has_the_same_cartan_projection(seq in proptest::collection::vec(0usize..64, 1..12), pick in 0usize..7) {
        let (_, system) = bundled::all().unwrap().swap_remove(pick);
        let w = random_word(&system, &seq);
        let g = system.evaluate(&w);
        let a = cartan_projection(&g).unwrap();
        let b = cartan_projection(&g.inverse()).unwrap();
        prop_assert!((a.v1 - b.v1).abs() < 1e-9 && (a.v2 - b.v2).abs() < 1e-9, "{:?} vs {:?}", a, b);
    }
}
