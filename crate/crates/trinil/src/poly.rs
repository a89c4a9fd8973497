//! Dense polynomials over GF(2) and GF(3).
//!
//! Coefficient `coeffs[i]` multiplies `x^i`; the vector carries no trailing
//! zeros, so the zero polynomial is the empty vector. Fields this small need
//! no clever arithmetic: schoolbook products and long division are exact and
//! fast at every size this crate touches.

/// Scalar helpers mod p, p in {2, 3}.
pub(crate) fn gf_add(p: u8, a: u8, b: u8) -> u8 {
    (a + b) % p
}

pub(crate) fn gf_sub(p: u8, a: u8, b: u8) -> u8 {
    (a + p - b) % p
}

pub(crate) fn gf_mul(p: u8, a: u8, b: u8) -> u8 {
    a * b % p
}

pub(crate) fn gf_neg(p: u8, a: u8) -> u8 {
    (p - a) % p
}

/// Inverse of a nonzero scalar: 1 -> 1, and 2 -> 2 mod 3.
pub(crate) fn gf_inv(p: u8, a: u8) -> u8 {
    debug_assert!(!a.is_multiple_of(p), "zero has no inverse");
    if p == 2 {
        1
    } else {
        a % p // 1*1 = 1, 2*2 = 4 = 1 mod 3
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GfPoly {
    p: u8,
    coeffs: Vec<u8>,
}

impl GfPoly {
    pub fn new(p: u8, mut coeffs: Vec<u8>) -> GfPoly {
        assert!(p == 2 || p == 3, "unsupported field GF({p})");
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        GfPoly { p, coeffs }
    }

    pub fn zero(p: u8) -> GfPoly {
        GfPoly::new(p, vec![])
    }

    pub fn one(p: u8) -> GfPoly {
        GfPoly::new(p, vec![1])
    }

    pub fn constant(p: u8, c: u8) -> GfPoly {
        GfPoly::new(p, vec![c])
    }

    /// x^d
    pub fn monomial(p: u8, d: usize) -> GfPoly {
        let mut coeffs = vec![0; d + 1];
        coeffs[d] = 1;
        GfPoly::new(p, coeffs)
    }

    pub fn field(&self) -> u8 {
        self.p
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u8 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u8 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn add(&self, rhs: &GfPoly) -> GfPoly {
        assert_eq!(self.p, rhs.p);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| gf_add(self.p, self.coeff(i), rhs.coeff(i)))
            .collect();
        GfPoly::new(self.p, coeffs)
    }

    pub fn sub(&self, rhs: &GfPoly) -> GfPoly {
        assert_eq!(self.p, rhs.p);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| gf_sub(self.p, self.coeff(i), rhs.coeff(i)))
            .collect();
        GfPoly::new(self.p, coeffs)
    }

    pub fn mul(&self, rhs: &GfPoly) -> GfPoly {
        assert_eq!(self.p, rhs.p);
        if self.is_zero() || rhs.is_zero() {
            return GfPoly::zero(self.p);
        }
        let mut coeffs = vec![0u8; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = gf_add(self.p, coeffs[i + j], gf_mul(self.p, a, b));
            }
        }
        GfPoly::new(self.p, coeffs)
    }

    pub fn scale(&self, c: u8) -> GfPoly {
        let coeffs = self.coeffs.iter().map(|&a| gf_mul(self.p, a, c)).collect();
        GfPoly::new(self.p, coeffs)
    }

    /// Long division; panics on a zero divisor.
    pub fn divmod(&self, div: &GfPoly) -> (GfPoly, GfPoly) {
        assert_eq!(self.p, div.p);
        assert!(!div.is_zero(), "division by zero polynomial");
        let p = self.p;
        let dd = div.degree().unwrap();
        let lead_inv = gf_inv(p, div.leading());
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (GfPoly::zero(p), self.clone());
        }
        let mut quo = vec![0u8; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = gf_mul(p, rem[i], lead_inv);
            if c == 0 {
                continue;
            }
            quo[i - dd] = c;
            for (j, &dc) in div.coeffs.iter().enumerate() {
                rem[i - dd + j] = gf_sub(p, rem[i - dd + j], gf_mul(p, c, dc));
            }
        }
        (GfPoly::new(p, quo), GfPoly::new(p, rem))
    }

    pub fn rem(&self, div: &GfPoly) -> GfPoly {
        self.divmod(div).1
    }

    pub fn divides(&self, other: &GfPoly) -> bool {
        other.rem(self).is_zero()
    }

    pub fn make_monic(&self) -> GfPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(gf_inv(self.p, self.leading()))
    }

    /// Monic gcd.
    pub fn gcd(&self, rhs: &GfPoly) -> GfPoly {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// (g, u, v) with u*self + v*rhs = g, g the monic gcd.
    pub fn ext_gcd(&self, rhs: &GfPoly) -> (GfPoly, GfPoly, GfPoly) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), rhs.clone());
        let (mut u0, mut u1) = (GfPoly::one(p), GfPoly::zero(p));
        let (mut v0, mut v1) = (GfPoly::zero(p), GfPoly::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1);
            let u = u0.sub(&q.mul(&u1));
            let v = v0.sub(&q.mul(&v1));
            r0 = r1;
            r1 = r;
            u0 = u1;
            u1 = u;
            v0 = v1;
            v1 = v;
        }
        if r0.is_zero() {
            return (r0, u0, v0);
        }
        let c = gf_inv(p, r0.leading());
        (r0.scale(c), u0.scale(c), v0.scale(c))
    }

    pub fn pow(&self, e: u32) -> GfPoly {
        let mut acc = GfPoly::one(self.p);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: u8) -> u8 {
        let mut acc = 0u8;
        for &c in self.coeffs.iter().rev() {
            acc = gf_add(self.p, gf_mul(self.p, acc, x), c);
        }
        acc
    }

    /// Substitute x + 1 for x.
    pub fn shift_by_one(&self) -> GfPoly {
        let p = self.p;
        let x_plus_1 = GfPoly::new(p, vec![1, 1]);
        let mut acc = GfPoly::zero(p);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(&x_plus_1).add(&GfPoly::constant(p, c));
        }
        acc
    }

    /// Encoding used to order polynomials of equal degree: sum of c_i * p^i.
    pub fn value_key(&self) -> u64 {
        let mut key = 0u64;
        for &c in self.coeffs.iter().rev() {
            key = key * u64::from(self.p) + u64::from(c);
        }
        key
    }
}

impl std::fmt::Display for GfPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}x")?,
                (_, 1) => write!(f, "x^{i}")?,
                (_, _) => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}
