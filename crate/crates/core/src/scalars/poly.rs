//! Dense univariate polynomials over Q(√d), coefficients stored low degree first.

use super::matrix::QuadMatrix;
use super::quad::QuadRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    d: u32,
    coeffs: Vec<QuadRational>,
}

impl Poly {
    pub fn new(d: u32, mut coeffs: Vec<QuadRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { d, coeffs }
    }

    pub fn one(d: u32) -> Self {
        Poly { d, coeffs: vec![QuadRational::one(d)] }
    }

    pub fn coeffs(&self) -> &[QuadRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn lead(&self) -> &QuadRational {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lead().inv().expect("nonzero lead");
        Poly::new(self.d, self.coeffs.iter().map(|c| c * &inv).collect())
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * &QuadRational::from_int((k as i64).into(), self.d))
            .collect();
        Poly::new(self.d, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = QuadRational::zero(self.d);
        let coeffs = (0..len)
            .map(|k| self.coeffs.get(k).unwrap_or(&zero) - other.coeffs.get(k).unwrap_or(&zero))
            .collect();
        Poly::new(self.d, coeffs)
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        if self.is_zero() || self.degree() < dd {
            return (Poly::new(self.d, Vec::new()), self.clone());
        }
        let inv_lead = divisor.lead().inv().expect("nonzero lead");
        let mut quot = vec![QuadRational::zero(self.d); self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &inv_lead;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                let t = &c * dc;
                rem[k + j] = &rem[k + j] - &t;
            }
            quot[k] = c;
        }
        (Poly::new(self.d, quot), Poly::new(self.d, rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut x = self.clone();
        let mut y = other.clone();
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r;
        }
        x.monic()
    }

    /// Square-free decomposition (Yun): pairs `(factor, multiplicity)` with monic, pairwise
    /// coprime, square-free factors whose product with multiplicities is `self.monic()`.
    pub fn square_free(&self) -> Vec<(Poly, usize)> {
        let f = self.monic();
        if f.degree() == 0 {
            return Vec::new();
        }
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let c = df.div_rem(&a0).0;
        let mut dpoly = c.sub(&b.derivative());
        let mut out = Vec::new();
        let mut mult = 1;
        while b.degree() > 0 {
            let a = b.gcd(&dpoly);
            let nb = b.div_rem(&a).0;
            let c = dpoly.div_rem(&a).0;
            dpoly = c.sub(&nb.derivative());
            if a.degree() > 0 {
                out.push((a, mult));
            }
            b = nb;
            mult += 1;
        }
        out
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(QuadRational::to_f64).collect()
    }
}

/// Characteristic polynomial `det(xI − M)` via Faddeev–LeVerrier.
pub fn char_poly(m: &QuadMatrix) -> Poly {
    let n = m.dim();
    let d = m.d();
    let mut coeffs = vec![QuadRational::zero(d); n + 1];
    coeffs[n] = QuadRational::one(d);
    let ident = QuadMatrix::identity(n, d);
    let mut mk = QuadMatrix::zeros(n, d);
    for k in 1..=n {
        mk = m.mul(&mk).add(&ident.scale(&coeffs[n - k + 1]));
        let t = m.mul(&mk).trace();
        let kq = QuadRational::from_int((k as i64).into(), d);
        coeffs[n - k] = -t.checked_div(&kq).expect("k > 0");
    }
    Poly::new(d, coeffs)
}
