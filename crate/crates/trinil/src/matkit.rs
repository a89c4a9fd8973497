//! Dense row-major matrices over `Z/m` ([`MatZ`]) and over the prime fields
//! GF(2), GF(3) ([`MatGF`]).
//!
//! Shape preconditions on the arithmetic methods panic, like slice indexing;
//! `checked_*` variants return typed errors for callers that ingest foreign
//! data. Entries of a `MatZ` stay reduced in `[0, m)`, so products fit in
//! `u64` and row sums in `u128`.

use crate::poly::{gf_add, gf_inv, gf_mul, gf_neg, gf_sub, GfPoly};
use crate::zmod::{crt_combine, CrtParts, Modulus};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("modulus {0} is not of the form 2^k * 3^l")]
    InadmissibleModulus(u64),
}

/// Square matrix over Z/m, entries reduced, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MatZDoc", into = "MatZDoc")]
pub struct MatZ {
    modulus: Modulus,
    n: usize,
    entries: Vec<u64>,
}

/// Wire form of a matrix document: modulus, dimension, row-major entries.
/// Entries may arrive unreduced or negative and are reduced on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatZDoc {
    pub m: u64,
    pub n: usize,
    pub entries: Vec<i64>,
}

impl TryFrom<MatZDoc> for MatZ {
    type Error = String;
    fn try_from(doc: MatZDoc) -> Result<MatZ, String> {
        let modulus = Modulus::new(doc.m).map_err(|e| e.to_string())?;
        MatZ::new(modulus, doc.n, doc.entries).map_err(|e| e.to_string())
    }
}

impl From<MatZ> for MatZDoc {
    fn from(a: MatZ) -> MatZDoc {
        MatZDoc {
            m: a.modulus.m(),
            n: a.n,
            entries: a.entries.iter().map(|&v| v as i64).collect(),
        }
    }
}

impl MatZ {
    pub fn new(modulus: Modulus, n: usize, entries: Vec<i64>) -> Result<MatZ, MatError> {
        if entries.len() != n * n {
            return Err(MatError::DimensionMismatch { left: n * n, right: entries.len() });
        }
        let m = modulus.m() as i64;
        let entries = entries.iter().map(|&v| v.rem_euclid(m) as u64).collect();
        Ok(MatZ { modulus, n, entries })
    }

    /// Panicking constructor for literals in tests and fixtures.
    pub fn from_rows(modulus: Modulus, rows: &[&[i64]]) -> MatZ {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "ragged rows");
            entries.extend_from_slice(row);
        }
        MatZ::new(modulus, n, entries).expect("shape checked")
    }

    pub fn zeros(modulus: Modulus, n: usize) -> MatZ {
        MatZ { modulus, n, entries: vec![0; n * n] }
    }

    pub fn identity(modulus: Modulus, n: usize) -> MatZ {
        let mut a = MatZ::zeros(modulus, n);
        for i in 0..n {
            a.set(i, i, 1);
        }
        a
    }

    /// c * I
    pub fn scalar(modulus: Modulus, n: usize, c: i64) -> MatZ {
        let mut a = MatZ::zeros(modulus, n);
        for i in 0..n {
            a.set(i, i, c);
        }
        a
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        let m = self.modulus.m() as i64;
        self.entries[i * self.n + j] = v.rem_euclid(m) as u64;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    fn assert_compatible(&self, rhs: &MatZ) {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
    }

    fn check_compatible(&self, rhs: &MatZ) -> Result<(), MatError> {
        if self.n != rhs.n {
            return Err(MatError::DimensionMismatch { left: self.n, right: rhs.n });
        }
        if self.modulus != rhs.modulus {
            return Err(MatError::ModulusMismatch {
                left: self.modulus.m(),
                right: rhs.modulus.m(),
            });
        }
        Ok(())
    }

    pub fn add(&self, rhs: &MatZ) -> MatZ {
        self.assert_compatible(rhs);
        let m = self.modulus.m();
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(&a, &b)| (a + b) % m)
            .collect();
        MatZ { modulus: self.modulus, n: self.n, entries }
    }

    pub fn sub(&self, rhs: &MatZ) -> MatZ {
        self.assert_compatible(rhs);
        let m = self.modulus.m();
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(&a, &b)| (a + m - b) % m)
            .collect();
        MatZ { modulus: self.modulus, n: self.n, entries }
    }

    pub fn neg(&self) -> MatZ {
        let m = self.modulus.m();
        let entries = self.entries.iter().map(|&a| (m - a) % m).collect();
        MatZ { modulus: self.modulus, n: self.n, entries }
    }

    pub fn scale(&self, c: i64) -> MatZ {
        let m = self.modulus.m();
        let c = c.rem_euclid(m as i64) as u64;
        let entries = self.entries.iter().map(|&a| a * c % m).collect();
        MatZ { modulus: self.modulus, n: self.n, entries }
    }

    pub fn mul(&self, rhs: &MatZ) -> MatZ {
        self.assert_compatible(rhs);
        let n = self.n;
        let m = self.modulus.m();
        let mut entries = vec![0u64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc: u128 = 0;
                for t in 0..n {
                    acc += u128::from(self.entries[i * n + t]) * u128::from(rhs.entries[t * n + j]);
                }
                entries[i * n + j] = (acc % u128::from(m)) as u64;
            }
        }
        MatZ { modulus: self.modulus, n, entries }
    }

    pub fn checked_add(&self, rhs: &MatZ) -> Result<MatZ, MatError> {
        self.check_compatible(rhs)?;
        Ok(self.add(rhs))
    }

    pub fn checked_sub(&self, rhs: &MatZ) -> Result<MatZ, MatError> {
        self.check_compatible(rhs)?;
        Ok(self.sub(rhs))
    }

    pub fn checked_mul(&self, rhs: &MatZ) -> Result<MatZ, MatError> {
        self.check_compatible(rhs)?;
        Ok(self.mul(rhs))
    }

    pub fn pow(&self, mut e: u64) -> MatZ {
        let mut base = self.clone();
        let mut acc = MatZ::identity(self.modulus, self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Horner evaluation of sum coeffs[i] * self^i.
    pub fn poly_eval(&self, coeffs: &[i64]) -> MatZ {
        let mut acc = MatZ::zeros(self.modulus, self.n);
        for &c in coeffs.iter().rev() {
            acc = acc.mul(self);
            let c_mat = MatZ::scalar(self.modulus, self.n, c);
            acc = acc.add(&c_mat);
        }
        acc
    }

    pub fn is_idempotent(&self) -> bool {
        self.mul(self) == *self
    }

    pub fn is_tripotent(&self) -> bool {
        self.mul(self).mul(self) == *self
    }

    /// Nilpotency over an admissible modulus, decided on the prime-field
    /// reductions; on success returns the verified witness exponent
    /// n * max(k, l).
    pub fn nilpotency_witness(&self) -> Result<Option<u64>, MatError> {
        let md = self.modulus;
        if !md.is_admissible() {
            return Err(MatError::InadmissibleModulus(md.m()));
        }
        let n = self.n as u64;
        if md.two_exp() > 0 && !self.reduce(2).pow(n).is_zero() {
            return Ok(None);
        }
        if md.three_exp() > 0 && !self.reduce(3).pow(n).is_zero() {
            return Ok(None);
        }
        let witness = n * u64::from(md.max_prime_exp());
        assert!(
            self.pow(witness).is_zero(),
            "witness exponent failed; nilpotency argument violated"
        );
        Ok(Some(witness))
    }

    /// Entrywise reduction to GF(p), p in {2, 3}.
    pub fn reduce(&self, p: u8) -> MatGF {
        assert!(p == 2 || p == 3);
        let entries = self.entries.iter().map(|&v| (v % u64::from(p)) as u8).collect();
        MatGF { p, n: self.n, entries }
    }

    /// Entrywise reduction to a divisor of the modulus.
    pub fn reduce_to(&self, target: Modulus) -> MatZ {
        assert_eq!(self.modulus.m() % target.m(), 0, "target must divide the modulus");
        let t = target.m();
        let entries = self.entries.iter().map(|&v| v % t).collect();
        MatZ { modulus: target, n: self.n, entries }
    }

    /// Componentwise CRT split; a single-factor modulus passes through on
    /// its own side.
    pub fn crt_split(&self) -> Result<MatCrtParts, MatError> {
        let md = self.modulus;
        if !md.is_admissible() {
            return Err(MatError::InadmissibleModulus(md.m()));
        }
        Ok(MatCrtParts {
            two_adic: md.two_part().map(|m2| self.reduce_to(m2)),
            three_adic: md.three_part().map(|m3| self.reduce_to(m3)),
        })
    }
}

/// CRT components of a matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatCrtParts {
    pub two_adic: Option<MatZ>,
    pub three_adic: Option<MatZ>,
}

/// Entrywise inverse of `MatZ::crt_split` for the given target modulus.
pub fn mat_crt_combine(parts: &MatCrtParts, modulus: Modulus) -> Result<MatZ, MatError> {
    if !modulus.is_admissible() {
        return Err(MatError::InadmissibleModulus(modulus.m()));
    }
    match (&parts.two_adic, &parts.three_adic) {
        (Some(a), Some(b)) => {
            if a.n != b.n {
                return Err(MatError::DimensionMismatch { left: a.n, right: b.n });
            }
            let n = a.n;
            let mut out = MatZ::zeros(modulus, n);
            for i in 0..n {
                for j in 0..n {
                    let r = crt_combine(
                        CrtParts {
                            two_adic: Some(a.modulus.residue_u64(a.get(i, j))),
                            three_adic: Some(b.modulus.residue_u64(b.get(i, j))),
                        },
                        modulus,
                    )
                    .expect("admissible modulus");
                    out.set(i, j, r.value() as i64);
                }
            }
            Ok(out)
        }
        (Some(a), None) => {
            assert_eq!(modulus.three_exp(), 0, "missing three-adic part");
            assert_eq!(Some(a.modulus), modulus.two_part(), "two-adic modulus mismatch");
            Ok(MatZ { modulus, n: a.n, entries: a.entries.clone() })
        }
        (None, Some(b)) => {
            assert_eq!(modulus.two_exp(), 0, "missing two-adic part");
            assert_eq!(Some(b.modulus), modulus.three_part(), "three-adic modulus mismatch");
            Ok(MatZ { modulus, n: b.n, entries: b.entries.clone() })
        }
        (None, None) => panic!("empty CRT parts"),
    }
}

/// Square matrix over GF(p), p in {2, 3}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MatGFDoc", into = "MatGFDoc")]
pub struct MatGF {
    p: u8,
    n: usize,
    entries: Vec<u8>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatGFDoc {
    pub p: u8,
    pub n: usize,
    pub entries: Vec<u8>,
}

impl TryFrom<MatGFDoc> for MatGF {
    type Error = String;
    fn try_from(doc: MatGFDoc) -> Result<MatGF, String> {
        if doc.p != 2 && doc.p != 3 {
            return Err(format!("unsupported field GF({})", doc.p));
        }
        if doc.entries.len() != doc.n * doc.n {
            return Err(format!(
                "expected {} entries, got {}",
                doc.n * doc.n,
                doc.entries.len()
            ));
        }
        Ok(MatGF::new(doc.p, doc.n, doc.entries))
    }
}

impl From<MatGF> for MatGFDoc {
    fn from(a: MatGF) -> MatGFDoc {
        MatGFDoc { p: a.p, n: a.n, entries: a.entries }
    }
}

impl MatGF {
    pub fn new(p: u8, n: usize, mut entries: Vec<u8>) -> MatGF {
        assert!(p == 2 || p == 3, "unsupported field GF({p})");
        assert_eq!(entries.len(), n * n, "entry count");
        for e in entries.iter_mut() {
            *e %= p;
        }
        MatGF { p, n, entries }
    }

    pub fn from_rows(p: u8, rows: &[&[u8]]) -> MatGF {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "ragged rows");
            entries.extend_from_slice(row);
        }
        MatGF::new(p, n, entries)
    }

    pub fn zeros(p: u8, n: usize) -> MatGF {
        MatGF::new(p, n, vec![0; n * n])
    }

    pub fn identity(p: u8, n: usize) -> MatGF {
        let mut a = MatGF::zeros(p, n);
        for i in 0..n {
            a.set(i, i, 1);
        }
        a
    }

    pub fn field(&self) -> u8 {
        self.p
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.entries[i * self.n + j] = v % self.p;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    fn assert_compatible(&self, rhs: &MatGF) {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        assert_eq!(self.p, rhs.p, "field mismatch");
    }

    pub fn add(&self, rhs: &MatGF) -> MatGF {
        self.assert_compatible(rhs);
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(&a, &b)| gf_add(self.p, a, b))
            .collect();
        MatGF { p: self.p, n: self.n, entries }
    }

    pub fn sub(&self, rhs: &MatGF) -> MatGF {
        self.assert_compatible(rhs);
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(&a, &b)| gf_sub(self.p, a, b))
            .collect();
        MatGF { p: self.p, n: self.n, entries }
    }

    pub fn neg(&self) -> MatGF {
        let entries = self.entries.iter().map(|&a| gf_neg(self.p, a)).collect();
        MatGF { p: self.p, n: self.n, entries }
    }

    pub fn scale(&self, c: u8) -> MatGF {
        let entries = self.entries.iter().map(|&a| gf_mul(self.p, a, c)).collect();
        MatGF { p: self.p, n: self.n, entries }
    }

    pub fn mul(&self, rhs: &MatGF) -> MatGF {
        self.assert_compatible(rhs);
        let n = self.n;
        let p = self.p;
        let mut entries = vec![0u8; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u32;
                for t in 0..n {
                    acc += u32::from(self.entries[i * n + t]) * u32::from(rhs.entries[t * n + j]);
                }
                entries[i * n + j] = (acc % u32::from(p)) as u8;
            }
        }
        MatGF { p, n, entries }
    }

    pub fn checked_mul(&self, rhs: &MatGF) -> Result<MatGF, MatError> {
        if self.n != rhs.n {
            return Err(MatError::DimensionMismatch { left: self.n, right: rhs.n });
        }
        if self.p != rhs.p {
            return Err(MatError::ModulusMismatch {
                left: u64::from(self.p),
                right: u64::from(rhs.p),
            });
        }
        Ok(self.mul(rhs))
    }

    pub fn pow(&self, mut e: u64) -> MatGF {
        let mut base = self.clone();
        let mut acc = MatGF::identity(self.p, self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn is_idempotent(&self) -> bool {
        self.mul(self) == *self
    }

    pub fn is_tripotent(&self) -> bool {
        self.mul(self).mul(self) == *self
    }

    /// Over a field, nilpotent iff the n-th power vanishes.
    pub fn is_nilpotent(&self) -> bool {
        self.pow(self.n as u64).is_zero()
    }

    pub fn transpose(&self) -> MatGF {
        let n = self.n;
        let mut entries = vec![0u8; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j];
            }
        }
        MatGF { p: self.p, n, entries }
    }

    pub fn col(&self, j: usize) -> Vec<u8> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    /// M * v
    pub fn mat_vec(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                let row = &self.entries[i * self.n..(i + 1) * self.n];
                let acc: u32 = row
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| u32::from(a) * u32::from(b))
                    .sum();
                (acc % u32::from(self.p)) as u8
            })
            .collect()
    }

    /// v^T * M
    pub fn vec_mat(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|j| {
                let acc: u32 = v
                    .iter()
                    .enumerate()
                    .map(|(t, &vt)| u32::from(vt) * u32::from(self.entries[t * self.n + j]))
                    .sum();
                (acc % u32::from(self.p)) as u8
            })
            .collect()
    }

    /// Square matrix from column vectors.
    pub fn from_columns(p: u8, cols: &[Vec<u8>]) -> MatGF {
        let n = cols.len();
        let mut a = MatGF::zeros(p, n);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), n, "column length");
            for (i, &entry) in col.iter().enumerate() {
                a.set(i, j, entry);
            }
        }
        a
    }

    pub fn rank(&self) -> usize {
        let (_, rank, _) = self.row_echelon();
        rank
    }

    /// Gauss-Jordan inverse; None when singular.
    pub fn inverse(&self) -> Option<MatGF> {
        let n = self.n;
        let p = self.p;
        let mut left = self.clone();
        let mut right = MatGF::identity(p, n);
        // Every column must produce a pivot on the diagonal, so the pivot row
        // is always the current column; a column with no pivot means singular.
        for col in 0..n {
            let pivot = (col..n).find(|&r| left.get(r, col) != 0)?;
            if pivot != col {
                left.swap_rows(pivot, col);
                right.swap_rows(pivot, col);
            }
            let inv = gf_inv(p, left.get(col, col));
            left.scale_row(col, inv);
            right.scale_row(col, inv);
            for r in 0..n {
                if r != col {
                    let f = left.get(r, col);
                    if f != 0 {
                        left.sub_scaled_row(r, col, f);
                        right.sub_scaled_row(r, col, f);
                    }
                }
            }
        }
        Some(right)
    }

    /// Deterministic basis of the right kernel {x : Mx = 0}. Each basis
    /// vector carries a 1 in its own free column, free columns ascending.
    pub fn null_space(&self) -> Vec<Vec<u8>> {
        let n = self.n;
        let p = self.p;
        let (rref, _, pivots) = self.row_echelon();
        let pivot_cols: Vec<usize> = pivots;
        let free_cols: Vec<usize> =
            (0..n).filter(|c| !pivot_cols.contains(c)).collect();
        let mut basis = Vec::with_capacity(free_cols.len());
        for &fc in &free_cols {
            let mut v = vec![0u8; n];
            v[fc] = 1;
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = gf_neg(p, rref.get(r, fc));
            }
            basis.push(v);
        }
        basis
    }

    /// (reduced row echelon form, rank, pivot columns)
    fn row_echelon(&self) -> (MatGF, usize, Vec<usize>) {
        let n = self.n;
        let p = self.p;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..n {
            if row == n {
                break;
            }
            let Some(pivot) = (row..n).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if pivot != row {
                m.swap_rows(pivot, row);
            }
            let inv = gf_inv(p, m.get(row, col));
            m.scale_row(row, inv);
            for r in 0..n {
                if r != row {
                    let f = m.get(r, col);
                    if f != 0 {
                        m.sub_scaled_row(r, row, f);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, row, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.n {
            self.entries.swap(a * self.n + j, b * self.n + j);
        }
    }

    fn scale_row(&mut self, r: usize, c: u8) {
        for j in 0..self.n {
            let v = gf_mul(self.p, self.entries[r * self.n + j], c);
            self.entries[r * self.n + j] = v;
        }
    }

    fn sub_scaled_row(&mut self, target: usize, source: usize, f: u8) {
        for j in 0..self.n {
            let v = gf_sub(
                self.p,
                self.entries[target * self.n + j],
                gf_mul(self.p, f, self.entries[source * self.n + j]),
            );
            self.entries[target * self.n + j] = v;
        }
    }

    /// Exact characteristic polynomial: similarity reduction to upper
    /// Hessenberg form, then the standard leading-minor recurrence.
    pub fn char_poly(&self) -> GfPoly {
        let n = self.n;
        let p = self.p;
        if n == 0 {
            return GfPoly::one(p);
        }
        let mut h = self.clone();
        for j in 0..n.saturating_sub(2) {
            let Some(pivot) = (j + 1..n).find(|&r| h.get(r, j) != 0) else {
                continue;
            };
            if pivot != j + 1 {
                h.swap_rows(pivot, j + 1);
                h.swap_cols(pivot, j + 1);
            }
            let inv = gf_inv(p, h.get(j + 1, j));
            for r in j + 2..n {
                let f = gf_mul(p, h.get(r, j), inv);
                if f == 0 {
                    continue;
                }
                h.sub_scaled_row(r, j + 1, f);
                h.add_scaled_col(j + 1, r, f);
            }
        }
        // p_k = (x - h[k-1][k-1]) p_{k-1}
        //       - sum_i h[k-1-i][k-1] * prod_{t=1..i} h[k-t][k-t-1] * p_{k-1-i}
        let mut ps: Vec<GfPoly> = vec![GfPoly::one(p)];
        for k in 1..=n {
            let x_minus = GfPoly::new(p, vec![gf_neg(p, h.get(k - 1, k - 1)), 1]);
            let mut acc = x_minus.mul(&ps[k - 1]);
            let mut subprod = 1u8;
            for i in 1..k {
                subprod = gf_mul(p, subprod, h.get(k - i, k - i - 1));
                if subprod == 0 {
                    break;
                }
                let coef = gf_mul(p, h.get(k - 1 - i, k - 1), subprod);
                if coef != 0 {
                    acc = acc.sub(&ps[k - 1 - i].scale(coef));
                }
            }
            ps.push(acc);
        }
        ps.pop().expect("nonempty")
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.n {
            self.entries.swap(i * self.n + a, i * self.n + b);
        }
    }

    fn add_scaled_col(&mut self, target: usize, source: usize, f: u8) {
        for i in 0..self.n {
            let v = gf_add(
                self.p,
                self.entries[i * self.n + target],
                gf_mul(self.p, f, self.entries[i * self.n + source]),
            );
            self.entries[i * self.n + target] = v;
        }
    }

    pub fn block_diag(p: u8, parts: &[MatGF]) -> MatGF {
        let n: usize = parts.iter().map(|b| b.n).sum();
        let mut out = MatGF::zeros(p, n);
        let mut off = 0;
        for b in parts {
            assert_eq!(b.p, p, "field mismatch");
            for i in 0..b.n {
                for j in 0..b.n {
                    out.set(off + i, off + j, b.get(i, j));
                }
            }
            off += b.n;
        }
        out
    }

    pub fn submatrix(&self, r0: usize, c0: usize, size: usize) -> MatGF {
        let mut out = MatGF::zeros(self.p, size);
        for i in 0..size {
            for j in 0..size {
                out.set(i, j, self.get(r0 + i, c0 + j));
            }
        }
        out
    }

    /// Entrywise lift into Z/m with representatives 0..p-1.
    pub fn lift_to(&self, modulus: Modulus) -> MatZ {
        let entries = self.entries.iter().map(|&v| u64::from(v)).collect();
        MatZ { modulus, n: self.n, entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn md(m: u64) -> Modulus {
        Modulus::new(m).unwrap()
    }

    fn random_matz(rng: &mut ChaCha8Rng, modulus: Modulus, n: usize) -> MatZ {
        let entries = (0..n * n)
            .map(|_| (rng.next_u64() % modulus.m()) as i64)
            .collect();
        MatZ::new(modulus, n, entries).unwrap()
    }

    #[test]
    fn zeroth_power_is_identity() {
        let a = MatZ::from_rows(md(6), &[&[2, 3], &[4, 5]]);
        assert_eq!(a.pow(0), MatZ::identity(md(6), 2));
    }

    #[test]
    fn poly_eval_kills_identity_defect() {
        // f(t) = t^2 - t at the identity is zero
        let a = MatZ::identity(md(12), 3);
        assert!(a.poly_eval(&[0, -1, 1]).is_zero());
    }

    #[test]
    fn cube_defect_of_refuter_corner() {
        let a = MatZ::from_rows(md(12), &[&[1, 1], &[1, 0]]);
        let defect = a.pow(3).sub(&a);
        assert_eq!(defect, MatZ::from_rows(md(12), &[&[2, 1], &[1, 1]]));
    }

    #[test]
    fn nilpotency_witness_examples() {
        let a = MatZ::from_rows(md(6), &[&[0, 5], &[0, 0]]);
        assert_eq!(a.nilpotency_witness().unwrap(), Some(2));

        let a = MatZ::from_rows(md(4), &[&[2, 2], &[2, 2]]);
        assert_eq!(a.nilpotency_witness().unwrap(), Some(4));

        let a = MatZ::identity(md(6), 2);
        assert_eq!(a.nilpotency_witness().unwrap(), None);

        let a = MatZ::identity(md(10), 2);
        assert_eq!(
            a.nilpotency_witness(),
            Err(MatError::InadmissibleModulus(10))
        );
    }

    /// Brute-force check: powering never needs more than the witness bound
    /// on random nilpotent-by-construction matrices.
    #[test]
    fn nilpotency_witness_agrees_with_powering() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in [6u64, 12, 36, 72] {
            let modulus = md(m);
            for n in 1..=5usize {
                for _ in 0..40 {
                    let a = random_matz(&mut rng, modulus, n);
                    let brute = {
                        // nilpotent iff a power up to n*31 vanishes; squaring
                        // overshoots but stays sound
                        let mut cur = a.clone();
                        let mut e = 1u64;
                        let cap = (n as u64) * 32;
                        while !cur.is_zero() && e < cap {
                            cur = cur.mul(&cur);
                            e *= 2;
                        }
                        cur.is_zero()
                    };
                    assert_eq!(a.nilpotency_witness().unwrap().is_some(), brute);
                }
            }
        }
    }

    #[test]
    fn corner_pattern_is_tripotent_not_idempotent() {
        // zeros except the bottom-right corner pattern rows (n-2, n-1)
        let e = MatZ::from_rows(
            md(3),
            &[
                &[0, 0, 0, 0],
                &[0, 0, 0, 0],
                &[0, 1, 0, 1],
                &[0, 0, 1, 0],
            ],
        );
        assert!(e.is_tripotent());
        assert!(!e.is_idempotent());

        let swap = MatZ::from_rows(md(3), &[&[0, 1], &[1, 0]]);
        assert!(swap.is_tripotent());
    }

    #[test]
    fn reduce_mod_2_and_3() {
        let a = MatZ::from_rows(md(12), &[&[4, 7], &[9, 2]]);
        assert_eq!(a.reduce(2), MatGF::from_rows(2, &[&[0, 1], &[1, 0]]));
        assert_eq!(a.reduce(3), MatGF::from_rows(3, &[&[1, 1], &[0, 2]]));
    }

    #[test]
    fn crt_round_trip_and_products_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut count = 0;
        while count < 1000 {
            let m = [6u64, 12, 36, 72][(rng.next_u64() % 4) as usize];
            let n = 1 + (rng.next_u64() % 6) as usize;
            let modulus = md(m);
            let a = random_matz(&mut rng, modulus, n);
            let b = random_matz(&mut rng, modulus, n);

            let parts = a.crt_split().unwrap();
            assert_eq!(mat_crt_combine(&parts, modulus).unwrap(), a);

            let pa = a.crt_split().unwrap();
            let pb = b.crt_split().unwrap();
            let prod_parts = MatCrtParts {
                two_adic: pa.two_adic.zip(pb.two_adic).map(|(x, y)| x.mul(&y)),
                three_adic: pa.three_adic.zip(pb.three_adic).map(|(x, y)| x.mul(&y)),
            };
            assert_eq!(mat_crt_combine(&prod_parts, modulus).unwrap(), a.mul(&b));
            count += 1;
        }
    }

    #[test]
    fn char_poly_frozen_examples() {
        // companion of (c0, c1) = (1, 0) over GF(2): x^2 + 1
        let c = MatGF::from_rows(2, &[&[0, 1], &[1, 0]]);
        assert_eq!(c.char_poly(), GfPoly::new(2, vec![1, 0, 1]));

        let z = MatGF::zeros(3, 3);
        assert_eq!(z.char_poly(), GfPoly::monomial(3, 3));

        // [[1,1],[1,0]] over GF(3): x^2 - x - 1 = x^2 + 2x + 2
        let a = MatGF::from_rows(3, &[&[1, 1], &[1, 0]]);
        assert_eq!(a.char_poly(), GfPoly::new(3, vec![2, 2, 1]));
    }

    /// Every companion matrix must reproduce x^n - c_{n-1}x^{n-1} - ... - c_0;
    /// exhaustive over GF(3) companions of size 3 and GF(2) of size 4.
    #[test]
    fn char_poly_matches_companion_convention() {
        for p in [2u8, 3] {
            let n = if p == 2 { 4usize } else { 3 };
            let total = (p as u64).pow(n as u32);
            for code in 0..total {
                let mut c = code;
                let coeffs: Vec<u8> = (0..n)
                    .map(|_| {
                        let d = (c % u64::from(p)) as u8;
                        c /= u64::from(p);
                        d
                    })
                    .collect();
                let mut mat = MatGF::zeros(p, n);
                for i in 0..n - 1 {
                    mat.set(i + 1, i, 1);
                }
                for (i, &ci) in coeffs.iter().enumerate() {
                    mat.set(i, n - 1, ci);
                }
                let mut expected = vec![0u8; n + 1];
                expected[n] = 1;
                for (i, &ci) in coeffs.iter().enumerate() {
                    expected[i] = gf_neg(p, ci);
                }
                assert_eq!(
                    mat.char_poly(),
                    GfPoly::new(p, expected),
                    "p = {p}, coeffs = {coeffs:?}"
                );
            }
        }
    }

    #[test]
    fn inverse_and_null_space() {
        let a = MatGF::from_rows(3, &[&[1, 1], &[1, 0]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), MatGF::identity(3, 2));
        assert_eq!(inv.mul(&a), MatGF::identity(3, 2));

        let sing = MatGF::from_rows(2, &[&[1, 1], &[1, 1]]);
        assert!(sing.inverse().is_none());
        let ns = sing.null_space();
        assert_eq!(ns.len(), 1);
        assert!(sing.mat_vec(&ns[0]).iter().all(|&v| v == 0));
        assert_eq!(sing.rank(), 1);
    }

    #[test]
    fn serde_round_trip() {
        let a = MatZ::from_rows(md(12), &[&[4, 7], &[9, 2]]);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"m":12,"n":2,"entries":[4,7,9,2]}"#);
        let back: MatZ = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);

        // negative entries reduce on load
        let neg: MatZ = serde_json::from_str(r#"{"m":12,"n":1,"entries":[-5]}"#).unwrap();
        assert_eq!(neg.get(0, 0), 7);
    }

    proptest! {
        #[test]
        fn add_commutes_mul_associates(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let modulus = md(36);
            let n = 1 + (rng.next_u64() % 4) as usize;
            let a = random_matz(&mut rng, modulus, n);
            let b = random_matz(&mut rng, modulus, n);
            let c = random_matz(&mut rng, modulus, n);
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.sub(&b).add(&b), a.clone());
        }

        #[test]
        fn polynomials_in_same_matrix_commute(seed in 0u64..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let modulus = md(24);
            let a = random_matz(&mut rng, modulus, 3);
            let f = a.poly_eval(&[1, 0, 2]);
            let g = a.poly_eval(&[3, 1, 0, 1]);
            prop_assert_eq!(f.mul(&g), g.mul(&f));
        }

        #[test]
        fn checked_ops_reject_mismatches(n1 in 1usize..4, n2 in 1usize..4) {
            let a = MatZ::zeros(md(6), n1);
            let b = MatZ::zeros(md(6), n2);
            if n1 != n2 {
                prop_assert!(a.checked_add(&b).is_err());
            }
            let c = MatZ::zeros(md(12), n1);
            prop_assert_eq!(
                a.checked_mul(&c),
                Err(MatError::ModulusMismatch { left: 6, right: 12 })
            );
        }
    }
}
