//! Elements `(a + b·√d) / den` of a fixed real quadratic field.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest relative error reported by [`embed_real`]; see the derivation there.
pub const EMBED_REL_ERROR: f64 = f64::EPSILON;

/// Check that `d` is a usable field parameter: square-free and positive.
pub fn check_discriminant(d: u64) -> Result<()> {
    if d == 0 {
        return Err(Error::BadDiscriminant(d));
    }
    let mut p = 2u64;
    while p * p <= d {
        if d % (p * p) == 0 {
            return Err(Error::BadDiscriminant(d));
        }
        p += 1;
    }
    Ok(())
}

/// Exact scalar in Q(√d). `d = 1` is the plain rational field and forces `b = 0`.
pub struct QuadRational {
    a: BigInt,
    b: BigInt,
    den: BigInt,
    d: u32,
    approx: OnceLock<f64>,
}

impl Clone for QuadRational {
    fn clone(&self) -> Self {
        QuadRational {
            a: self.a.clone(),
            b: self.b.clone(),
            den: self.den.clone(),
            d: self.d,
            approx: self.approx.clone(),
        }
    }
}

impl PartialEq for QuadRational {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.a == other.a && self.b == other.b && self.den == other.den
    }
}

impl Eq for QuadRational {}

impl Hash for QuadRational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.d.hash(state);
        self.a.hash(state);
        self.b.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Debug for QuadRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}√{})/{}", self.a, self.b, self.d, self.den)
    }
}

/// Text form `"a b den"`; `d` lives in the surrounding file header.
impl fmt::Display for QuadRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.a, self.b, self.den)
    }
}

impl QuadRational {
    /// Canonical representative of `(a + b√d)/den`.
    pub fn normalize(a: BigInt, b: BigInt, den: BigInt, d: u32) -> Result<Self> {
        check_discriminant(d as u64)?;
        if den.is_zero() {
            return Err(Error::ZeroDenominator { a: a.to_string(), b: b.to_string() });
        }
        if d == 1 && !b.is_zero() {
            return Err(Error::IrrationalInRationalField { b: b.to_string() });
        }
        Ok(Self::normalized_unchecked(a, b, den, d))
    }

    pub(crate) fn normalized_unchecked(mut a: BigInt, mut b: BigInt, mut den: BigInt, d: u32) -> Self {
        debug_assert!(!den.is_zero());
        if a.is_zero() && b.is_zero() {
            den = BigInt::one();
        } else {
            let g = a.gcd(&b).gcd(&den);
            if !g.is_one() {
                a /= &g;
                b /= &g;
                den /= &g;
            }
        }
        if den.is_negative() {
            a = -a;
            b = -b;
            den = -den;
        }
        QuadRational { a, b, den, d, approx: OnceLock::new() }
    }

    pub fn from_i64s(a: i64, b: i64, den: i64, d: u32) -> Result<Self> {
        Self::normalize(a.into(), b.into(), den.into(), d)
    }

    pub fn zero(d: u32) -> Self {
        Self::normalized_unchecked(BigInt::zero(), BigInt::zero(), BigInt::one(), d)
    }

    pub fn one(d: u32) -> Self {
        Self::from_int(BigInt::one(), d)
    }

    pub fn from_int(a: BigInt, d: u32) -> Self {
        Self::normalized_unchecked(a, BigInt::zero(), BigInt::one(), d)
    }

    /// The rational number `num/den` viewed in Q(√d).
    pub fn rational(num: BigInt, den: BigInt, d: u32) -> Result<Self> {
        Self::normalize(num, BigInt::zero(), den, d)
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn den(&self) -> &BigInt {
        &self.den
    }
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.den.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn same_field(&self, other: &Self) -> u32 {
        assert_eq!(self.d, other.d, "arithmetic across different quadratic fields");
        self.d
    }

    /// Exact sign of the real number this represents.
    pub fn signum(&self) -> Ordering {
        sign_of_surd(&self.a, &self.b, self.d)
    }

    /// Galois conjugate `(a − b√d)/den`.
    pub fn conjugate(&self) -> Self {
        Self::normalized_unchecked(self.a.clone(), -self.b.clone(), self.den.clone(), self.d)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // 1/((a+b√d)/n) = n(a − b√d)/(a² − d b²)
        let norm = &self.a * &self.a - BigInt::from(self.d) * &self.b * &self.b;
        Some(Self::normalized_unchecked(
            &self.den * &self.a,
            -(&self.den * &self.b),
            norm,
            self.d,
        ))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        let inv = other.inv().ok_or(Error::DivisionByZero)?;
        Ok(self * &inv)
    }

    /// Double-precision value, cached after the first call.
    pub fn to_f64(&self) -> f64 {
        *self.approx.get_or_init(|| embed_real(&self.a, &self.b, &self.den, self.d).value)
    }

    /// Double-precision value with its relative error bound.
    pub fn embed(&self) -> Embedding {
        let e = embed_real(&self.a, &self.b, &self.den, self.d);
        let _ = self.approx.set(e.value);
        e
    }

    /// Parse `"a b den"`.
    pub fn parse_triple(s: &str, d: u32) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::ScalarParse(s.to_string()));
        }
        let parse = |t: &str| t.parse::<BigInt>().map_err(|_| Error::ScalarParse(s.to_string()));
        Self::normalize(parse(parts[0])?, parse(parts[1])?, parse(parts[2])?, d)
    }
}

/// Sign of `a + b√d` without rounding.
pub(crate) fn sign_of_surd(a: &BigInt, b: &BigInt, d: u32) -> Ordering {
    let sa = a.sign();
    let sb = b.sign();
    match (sa, sb) {
        (Sign::NoSign, Sign::NoSign) => Ordering::Equal,
        (_, Sign::NoSign) => sign_to_ord(sa),
        (Sign::NoSign, _) => sign_to_ord(sb),
        _ if sa == sb => sign_to_ord(sa),
        _ => {
            // opposite signs: compare a² with d b²
            let lhs = a * a;
            let rhs = BigInt::from(d) * b * b;
            match lhs.cmp(&rhs) {
                Ordering::Greater => sign_to_ord(sa),
                Ordering::Less => sign_to_ord(sb),
                Ordering::Equal => Ordering::Equal,
            }
        }
    }
}

fn sign_to_ord(s: Sign) -> Ordering {
    match s {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

/// A float together with a rigorous bound on its relative error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Embedding {
    pub value: f64,
    pub rel_err: f64,
}

/// Guard bits kept in the scaled integer approximations.
const GUARD_BITS: u64 = 66;

/// Round `(a + b√d)/den` to a double.
///
/// The surd is approximated by the integer `T = a·2^k + sign(b)·⌊|b|√d·2^k⌋`, which is within 1 of
/// the exact scaled value. `k` is chosen so that `|T| ≥ 2^66` even under cancellation, using
/// `|a + b√d| ≥ 1/(|a| + |b|√d)` for nonzero elements of Z[√d]. The quotient by `den` is taken with
/// 66 more guard bits and rounded once, so the total relative error is below
/// `2^-53 + 2^-64 < ε`.
pub fn embed_real(a: &BigInt, b: &BigInt, den: &BigInt, d: u32) -> Embedding {
    if a.is_zero() && (b.is_zero() || d == 0) {
        return Embedding { value: 0.0, rel_err: 0.0 };
    }
    if b.is_zero() || d == 1 {
        let num = if d == 1 { a + b } else { a.clone() };
        if num.is_zero() {
            return Embedding { value: 0.0, rel_err: 0.0 };
        }
        return Embedding { value: ratio_to_f64(&num, den, 0), rel_err: EMBED_REL_ERROR };
    }
    let opposite = a.sign() != Sign::NoSign && a.sign() != b.sign();
    let lower_bits = if opposite {
        let dbits = 64 - (d as u64).leading_zeros() as u64;
        a.bits().max(b.bits() + dbits) + 2
    } else {
        0
    };
    let k = GUARD_BITS + lower_bits;
    let scaled_b2 = (BigInt::from(d) * b * b) << (2 * k);
    let root = scaled_b2.sqrt();
    let root = if b.is_negative() { -root } else { root };
    let t = (a << k) + root;
    if t.is_zero() {
        // only reachable when the surd itself is zero
        return Embedding { value: 0.0, rel_err: 0.0 };
    }
    Embedding { value: ratio_to_f64(&t, den, k), rel_err: EMBED_REL_ERROR }
}

/// `num / (den · 2^shift)` rounded to double, using guard bits before the single rounding step.
fn ratio_to_f64(num: &BigInt, den: &BigInt, shift: u64) -> f64 {
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let m = (GUARD_BITS as i64 + db - nb).max(0);
    let q = (num << (m as u64)) / den;
    let q_bits = q.bits() as i64;
    // keep 64 significant bits with a sticky bit for the discarded tail
    let drop = (q_bits - 64).max(0);
    let mut top: BigInt = &q >> (drop as u64);
    if drop > 0 {
        let back: BigInt = &top << (drop as u64);
        if back != q {
            top |= BigInt::one();
        }
    }
    let mantissa = top.abs().to_u64().expect("64-bit mantissa");
    let mut value = mantissa as f64;
    if num.is_negative() != den.is_negative() {
        value = -value;
    }
    ldexp(value, drop - m - shift as i64)
}

/// `x · 2^e` without intermediate overflow for exponents inside the double range.
pub(crate) fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

impl Neg for &QuadRational {
    type Output = QuadRational;
    fn neg(self) -> QuadRational {
        QuadRational::normalized_unchecked(-self.a.clone(), -self.b.clone(), self.den.clone(), self.d)
    }
}

impl Neg for QuadRational {
    type Output = QuadRational;
    fn neg(self) -> QuadRational {
        -&self
    }
}

impl Add for &QuadRational {
    type Output = QuadRational;
    fn add(self, rhs: &QuadRational) -> QuadRational {
        let d = self.same_field(rhs);
        if self.den == rhs.den {
            return QuadRational::normalized_unchecked(&self.a + &rhs.a, &self.b + &rhs.b, self.den.clone(), d);
        }
        QuadRational::normalized_unchecked(
            &self.a * &rhs.den + &rhs.a * &self.den,
            &self.b * &rhs.den + &rhs.b * &self.den,
            &self.den * &rhs.den,
            d,
        )
    }
}

impl Sub for &QuadRational {
    type Output = QuadRational;
    fn sub(self, rhs: &QuadRational) -> QuadRational {
        self + &(-rhs)
    }
}

impl Mul for &QuadRational {
    type Output = QuadRational;
    fn mul(self, rhs: &QuadRational) -> QuadRational {
        let d = self.same_field(rhs);
        let a = &self.a * &rhs.a + BigInt::from(d) * &self.b * &rhs.b;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        QuadRational::normalized_unchecked(a, b, &self.den * &rhs.den, d)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QuadRational {
            type Output = QuadRational;
            fn $m(self, rhs: QuadRational) -> QuadRational {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&QuadRational> for QuadRational {
            type Output = QuadRational;
            fn $m(self, rhs: &QuadRational) -> QuadRational {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
