//! Scalar arithmetic over `Z/m`.
//!
//! [`Modulus`] factors out the powers of 2 and 3 once at construction and
//! remembers the exponents, the radical (product of distinct primes) and
//! whether `m` is admissible, i.e. of the form `2^k * 3^l`. Inadmissible
//! moduli are legal values — the classifier needs them — but the
//! decomposition entry points reject them with a typed error.
//!
//! `m` is capped at `2^31 - 1` so that a product of two reduced residues
//! always fits in a `u64`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported modulus. Keeps `a * b` for reduced residues within u64.
pub const MAX_MODULUS: u64 = (1 << 31) - 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZmodError {
    #[error("modulus {0} out of range (need 2 <= m <= 2^31 - 1)")]
    ModulusOutOfRange(u64),
    #[error("{0} is not a unit mod {1}")]
    NotAUnit(u64, u64),
    #[error("modulus {m} is not of the form 2^k * 3^l (prime factor {prime})")]
    InadmissibleModulus { m: u64, prime: u64 },
}

/// A factored modulus: `m = 2^k * 3^l * cofactor` with the cofactor coprime
/// to 6. Admissible means cofactor = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Modulus {
    m: u64,
    two_exp: u32,
    three_exp: u32,
    radical: u64,
    cofactor: u64,
}

impl Modulus {
    pub fn new(m: u64) -> Result<Modulus, ZmodError> {
        if !(2..=MAX_MODULUS).contains(&m) {
            return Err(ZmodError::ModulusOutOfRange(m));
        }
        let mut rest = m;
        let mut two_exp = 0;
        while rest.is_multiple_of(2) {
            rest /= 2;
            two_exp += 1;
        }
        let mut three_exp = 0;
        while rest.is_multiple_of(3) {
            rest /= 3;
            three_exp += 1;
        }
        let cofactor = rest;
        let mut radical = 1;
        if two_exp > 0 {
            radical *= 2;
        }
        if three_exp > 0 {
            radical *= 3;
        }
        let mut c = cofactor;
        let mut p = 5;
        while p * p <= c {
            if c.is_multiple_of(p) {
                radical *= p;
                while c.is_multiple_of(p) {
                    c /= p;
                }
            }
            p += 2;
        }
        if c > 1 {
            radical *= c;
        }
        Ok(Modulus { m, two_exp, three_exp, radical, cofactor })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// Exponent of 2 in m.
    pub fn two_exp(&self) -> u32 {
        self.two_exp
    }

    /// Exponent of 3 in m.
    pub fn three_exp(&self) -> u32 {
        self.three_exp
    }

    /// Product of the distinct primes dividing m.
    pub fn radical(&self) -> u64 {
        self.radical
    }

    pub fn is_admissible(&self) -> bool {
        self.cofactor == 1
    }

    /// Smallest prime factor of m outside {2, 3}, if any.
    pub fn offending_prime(&self) -> Option<u64> {
        if self.cofactor == 1 {
            return None;
        }
        let c = self.cofactor;
        let mut p = 5;
        while p * p <= c {
            if c.is_multiple_of(p) {
                return Some(p);
            }
            p += 2;
        }
        Some(c)
    }

    /// max(k, l); the scalar nilpotency index bound for admissible m.
    pub fn max_prime_exp(&self) -> u32 {
        self.two_exp.max(self.three_exp)
    }

    /// 2^k as a modulus, when k >= 1.
    pub fn two_part(&self) -> Option<Modulus> {
        if self.two_exp == 0 {
            return None;
        }
        Some(Modulus::new(1u64 << self.two_exp).expect("2^k in range"))
    }

    /// 3^l as a modulus, when l >= 1.
    pub fn three_part(&self) -> Option<Modulus> {
        if self.three_exp == 0 {
            return None;
        }
        Some(Modulus::new(3u64.pow(self.three_exp)).expect("3^l in range"))
    }

    /// Reduce an integer into [0, m).
    pub fn residue(&self, value: i64) -> Residue {
        let m = self.m as i64;
        Residue { value: value.rem_euclid(m) as u64, modulus: *self }
    }

    pub fn residue_u64(&self, value: u64) -> Residue {
        Residue { value: value % self.m, modulus: *self }
    }

    fn inadmissible_error(&self) -> ZmodError {
        ZmodError::InadmissibleModulus {
            m: self.m,
            prime: self.offending_prime().unwrap_or(self.cofactor),
        }
    }
}

impl TryFrom<u64> for Modulus {
    type Error = ZmodError;
    fn try_from(m: u64) -> Result<Modulus, ZmodError> {
        Modulus::new(m)
    }
}

impl From<Modulus> for u64 {
    fn from(md: Modulus) -> u64 {
        md.m
    }
}

/// A value in [0, m) tied to its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Residue {
    value: u64,
    modulus: Modulus,
}

impl Residue {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn pow(&self, mut e: u64) -> Residue {
        let m = self.modulus.m;
        let mut base = self.value;
        let mut acc = 1 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        Residue { value: acc, modulus: self.modulus }
    }

    pub fn inv(&self) -> Result<Residue, ZmodError> {
        let m = self.modulus.m;
        let (g, x, _) = ext_gcd(self.value as i128, m as i128);
        if g != 1 {
            return Err(ZmodError::NotAUnit(self.value, m));
        }
        Ok(Residue { value: x.rem_euclid(m as i128) as u64, modulus: self.modulus })
    }

    /// Nilpotent iff every prime of m divides the value.
    pub fn is_nilpotent(&self) -> bool {
        self.value.is_multiple_of(self.modulus.radical)
    }

    pub fn is_idempotent(&self) -> bool {
        let m = self.modulus.m;
        self.value * self.value % m == self.value
    }

    pub fn is_tripotent(&self) -> bool {
        let m = self.modulus.m;
        self.value * self.value % m * self.value % m == self.value
    }

    /// Writes the residue as tripotent + nilpotent. Per prime side the
    /// tripotent is the unique one congruent to the value mod p: the parity
    /// bit on the 2-side, and 0/1/-1 matching the value mod 3 on the 3-side.
    pub fn trinil_decompose(&self) -> Result<(Residue, Residue), ZmodError> {
        let md = self.modulus;
        if !md.is_admissible() {
            return Err(md.inadmissible_error());
        }
        let e = match (md.two_part(), md.three_part()) {
            (Some(m2), Some(m3)) => {
                let e2 = m2.residue_u64(self.value % 2);
                let e3 = tripotent_mod_three_power(self.value, m3);
                crt_combine(
                    CrtParts { two_adic: Some(e2), three_adic: Some(e3) },
                    md,
                )?
            }
            (Some(_), None) => md.residue_u64(self.value % 2),
            (None, Some(m3)) => {
                let e3 = tripotent_mod_three_power(self.value, m3);
                md.residue_u64(e3.value)
            }
            (None, None) => unreachable!("m >= 2"),
        };
        let w = *self - e;
        Ok((e, w))
    }

    /// Components mod 2^k and 3^l. A single-factor modulus passes through
    /// unchanged on its own side, with the other side absent.
    pub fn crt_split(&self) -> Result<CrtParts, ZmodError> {
        let md = self.modulus;
        if !md.is_admissible() {
            return Err(md.inadmissible_error());
        }
        Ok(CrtParts {
            two_adic: md.two_part().map(|m2| m2.residue_u64(self.value)),
            three_adic: md.three_part().map(|m3| m3.residue_u64(self.value)),
        })
    }
}

/// The {0, 1, -1} tripotent of Z/3^l matching a value's residue mod 3.
fn tripotent_mod_three_power(value: u64, m3: Modulus) -> Residue {
    let e = match value % 3 {
        0 => 0,
        1 => 1,
        _ => m3.m() - 1,
    };
    m3.residue_u64(e)
}

impl std::ops::Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
        let m = self.modulus.m;
        Residue { value: (self.value + rhs.value) % m, modulus: self.modulus }
    }
}

impl std::ops::Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
        let m = self.modulus.m;
        Residue { value: (self.value + m - rhs.value) % m, modulus: self.modulus }
    }
}

impl std::ops::Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
        let m = self.modulus.m;
        Residue { value: self.value * rhs.value % m, modulus: self.modulus }
    }
}

impl std::ops::Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        let m = self.modulus.m;
        Residue { value: (m - self.value) % m, modulus: self.modulus }
    }
}

/// CRT components of a residue. Absent side = that prime does not divide m.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrtParts {
    pub two_adic: Option<Residue>,
    pub three_adic: Option<Residue>,
}

/// Inverse of `crt_split` for the given target modulus.
///
/// Pre: the present parts carry exactly the moduli 2^k and 3^l of the target.
pub fn crt_combine(parts: CrtParts, modulus: Modulus) -> Result<Residue, ZmodError> {
    if !modulus.is_admissible() {
        return Err(modulus.inadmissible_error());
    }
    match (parts.two_adic, parts.three_adic) {
        (Some(a), Some(b)) => {
            let m2 = a.modulus.m;
            let m3 = b.modulus.m;
            assert_eq!(Some(a.modulus), modulus.two_part(), "two-adic modulus mismatch");
            assert_eq!(Some(b.modulus), modulus.three_part(), "three-adic modulus mismatch");
            // x = a + m2 * ((b - a) * inv(m2) mod m3)
            let inv = Modulus::new(m3)
                .expect("3^l in range")
                .residue_u64(m2)
                .inv()
                .expect("2^k is a unit mod 3^l");
            let diff = (b.value + m3 - a.value % m3) % m3;
            let t = diff * inv.value % m3;
            Ok(modulus.residue_u64(a.value + m2 * t))
        }
        (Some(a), None) => {
            assert_eq!(Some(a.modulus), modulus.two_part(), "two-adic modulus mismatch");
            assert_eq!(modulus.three_exp, 0, "missing three-adic part");
            Ok(modulus.residue_u64(a.value))
        }
        (None, Some(b)) => {
            assert_eq!(Some(b.modulus), modulus.three_part(), "three-adic modulus mismatch");
            assert_eq!(modulus.two_exp, 0, "missing two-adic part");
            Ok(modulus.residue_u64(b.value))
        }
        (None, None) => panic!("empty CRT parts"),
    }
}

/// Extended gcd: returns (g, x, y) with a*x + b*y = g.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}
