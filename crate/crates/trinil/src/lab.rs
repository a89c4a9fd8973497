//! Brute-force oracles and ring classifiers.
//!
//! Everything here is deliberately independent of the decomposition engine:
//! predicates are decided by exhaustive element sweeps and nilpotency by
//! direct powering, never by the structure theory the engine exploits.  That
//! makes these functions usable as ground truth when testing the engine, and
//! it makes an empty oracle result a genuine proof of non-decomposability at
//! the swept size.

use crate::matkit::MatZ;
use crate::zmod::Modulus;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap on exhaustive matrix enumeration: `m^(n*n)` candidates.
pub const ENUMERATION_CAP: u128 = 1 << 24;

/// Hard cap on the scalar classifier sweep.
pub const CLASSIFY_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabError {
    #[error("enumeration of {candidates} candidates exceeds the oracle cap {ENUMERATION_CAP}")]
    EnumerationTooLarge { candidates: u128 },
}

/// Exhaustive classification of the ring Z_m.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingReport {
    pub m: u64,
    /// Every element is tripotent + nilpotent.
    pub is_trinil_clean: bool,
    /// Every `a - a^3` is nilpotent (for commutative rings this is the
    /// tripotent-plus-commuting-nilpotent property).
    pub is_strongly_2_nil_clean: bool,
    /// Every element satisfies `a^3 = a`.
    pub is_tripotent_ring: bool,
    /// Every square is idempotent: `a^4 = a^2`.
    pub is_2_boolean: bool,
    /// Smallest uniform `e` with `(a - a^3)^e = 0` for all `a`, when the
    /// defects are all nilpotent.
    pub bounded_index_exponent: Option<u64>,
    /// First counterexample element of the strongest failing predicate, in
    /// the order trinil clean, strongly 2-nil-clean, tripotent ring,
    /// 2-Boolean.
    pub witness: Option<u64>,
}

/// Smallest `j` with `x^j = 0 mod m`, if any.  Direct powering: any
/// nilpotent scalar mod `m <= 2^20` has index at most 20, so 32 steps decide.
fn scalar_nil_index(m: u64, x: u64) -> Option<u64> {
    let mut pw = x % m;
    for j in 1..=32u64 {
        if pw == 0 {
            return Some(j);
        }
        pw = pw * (x % m) % m;
    }
    None
}

/// Classify Z_m by exhaustive sweeps (2 <= m <= 2^20).
pub fn classify_zm(m: u64) -> RingReport {
    assert!((2..=CLASSIFY_CAP).contains(&m), "classification sweeps cap at m = 2^20");

    let nilpotent: Vec<bool> = (0..m).map(|x| scalar_nil_index(m, x).is_some()).collect();
    let tripotents: Vec<u64> = (0..m).filter(|&t| t * t % m * t % m == t).collect();

    let mut trinil_witness = None;
    for a in 0..m {
        if !tripotents.iter().any(|&t| nilpotent[((a + m - t) % m) as usize]) {
            trinil_witness = Some(a);
            break;
        }
    }

    let mut strongly2_witness = None;
    let mut bounded_index_exponent = Some(0u64);
    for a in 0..m {
        let defect = (a + m - a * a % m * a % m) % m;
        match scalar_nil_index(m, defect) {
            Some(j) => {
                bounded_index_exponent = bounded_index_exponent.map(|e| e.max(j));
            }
            None => {
                if strongly2_witness.is_none() {
                    strongly2_witness = Some(a);
                }
                bounded_index_exponent = None;
            }
        }
    }

    let tripotent_witness = (0..m).find(|&a| a * a % m * a % m != a);
    let two_boolean_witness = (0..m).find(|&a| {
        let sq = a * a % m;
        sq * sq % m != sq
    });

    RingReport {
        m,
        is_trinil_clean: trinil_witness.is_none(),
        is_strongly_2_nil_clean: strongly2_witness.is_none(),
        is_tripotent_ring: tripotent_witness.is_none(),
        is_2_boolean: two_boolean_witness.is_none(),
        bounded_index_exponent,
        witness: trinil_witness
            .or(strongly2_witness)
            .or(tripotent_witness)
            .or(two_boolean_witness),
    }
}

/// Nilpotency by direct repeated squaring, with no reliance on radical
/// structure: for any prime power p^k dividing m, a nilpotent matrix B
/// satisfies (B mod p)^n = 0 and hence B^(n*k) = 0 mod p^k, and k never
/// exceeds log2(m); so squaring up to n * ceil(log2(m + 1)) decides.
fn matrix_is_nilpotent_bruteforce(b: &MatZ) -> bool {
    let n = b.size() as u64;
    let bits = u64::from(64 - b.modulus().m().leading_zeros());
    let target = n * bits;
    let mut c = b.clone();
    let mut exp = 1u64;
    while exp < target {
        c = c.mul(&c);
        exp *= 2;
    }
    c.is_zero()
}

/// All tripotent matrices E with `a - E` nilpotent, by exhaustive
/// enumeration of every n x n matrix over Z_m.  An empty result is a proof
/// that `a` has no tripotent-plus-nilpotent decomposition.
pub fn oracle_decompose(a: &MatZ) -> Result<Vec<MatZ>, LabError> {
    let md = a.modulus();
    let m = md.m();
    let n = a.size();
    let candidates = (u128::from(m)).checked_pow((n * n) as u32);
    let candidates = match candidates {
        Some(c) if c <= ENUMERATION_CAP => c,
        Some(c) => return Err(LabError::EnumerationTooLarge { candidates: c }),
        None => return Err(LabError::EnumerationTooLarge { candidates: u128::MAX }),
    };

    let mut found = Vec::new();
    let mut entries = vec![0i64; n * n];
    for code in 0..candidates {
        let mut c = code;
        for slot in entries.iter_mut() {
            *slot = (c % u128::from(m)) as i64;
            c /= u128::from(m);
        }
        let e = MatZ::new(md, n, entries.clone()).expect("entry count matches");
        if e.is_tripotent() && matrix_is_nilpotent_bruteforce(&a.sub(&e)) {
            found.push(e);
        }
    }
    Ok(found)
}

/// Evidence that M_n(Z_m) is never strongly 2-nil-clean: for the corner
/// embedding of A = [[1,1],[1,0]] (identity elsewhere), the defect A^3 - A
/// is supported on an invertible 2x2 corner, so it cannot be nilpotent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefutationEvidence {
    /// The embedded matrix A.
    pub a: MatZ,
    /// The 2x2 corner of A^3 - A: [[2,1],[1,1]].
    pub defect_corner: MatZ,
    /// Its exact inverse [[1,-1],[-1,2]] over Z_m.
    pub inverse_corner: MatZ,
}

/// Build and fully check the strongly-2-nil-clean refutation in M_n(Z_m).
///
/// Panics if any of the claimed identities fails; a returned value is a
/// machine-checked proof that A^3 - A is a non-nilpotent defect.
pub fn strongly2_matrix_refutation(modulus: Modulus, n: usize) -> RefutationEvidence {
    assert!(n >= 2, "the refutation needs at least a 2x2 corner");
    let mut a = MatZ::identity(modulus, n);
    a.set(0, 0, 1);
    a.set(0, 1, 1);
    a.set(1, 0, 1);
    a.set(1, 1, 0);

    let defect = a.pow(3).sub(&a);
    let defect_corner = MatZ::from_rows(modulus, &[&[2, 1], &[1, 1]]);
    // The defect must vanish outside the corner and match inside it.
    for i in 0..n {
        for j in 0..n {
            let expected = if i < 2 && j < 2 { defect_corner.get(i, j) } else { 0 };
            assert_eq!(defect.get(i, j), expected, "defect shape at ({i}, {j})");
        }
    }

    let inverse_corner = MatZ::from_rows(modulus, &[&[1, -1], &[-1, 2]]);
    assert_eq!(
        defect_corner.mul(&inverse_corner),
        MatZ::identity(modulus, 2),
        "corner of A^3 - A must be a unit"
    );
    assert!(
        !matrix_is_nilpotent_bruteforce(&defect),
        "a defect with a unit corner cannot be nilpotent"
    );

    RefutationEvidence { a, defect_corner, inverse_corner }
}

/// For a prime p outside {2, 3}, exhibit a scalar a with a^2 != 1 whose
/// multiple of the identity has no tripotent-plus-nilpotent decomposition in
/// M_n(GF(p)) — confirmed by the exhaustive oracle, not by theory.  Returns
/// `None` for p in {2, 3}, where no such scalar exists.
pub fn nondecomposable_scalar_witness(p: u64, n: usize) -> Result<Option<u64>, LabError> {
    assert!(p >= 2 && (2..p).all(|d| d * d > p || !p.is_multiple_of(d)), "p must be prime");
    if p == 2 || p == 3 {
        return Ok(None);
    }
    let a = (2..p).find(|&a| a * a % p != 1).expect("p >= 5 has such a scalar");
    let md = Modulus::new(p).expect("prime fits the modulus range");
    let scalar = MatZ::scalar(md, n, a as i64);
    let decompositions = oracle_decompose(&scalar)?;
    assert!(
        decompositions.is_empty(),
        "scalar {a} over GF({p}) unexpectedly decomposed"
    );
    Ok(Some(a))
}

/// One row of the admissibility comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityRow {
    pub m: u64,
    /// Sweep result: is Z_m trinil clean?
    pub trinil_clean: bool,
    /// Arithmetic fact: does m factor as 2^k * 3^l?
    pub admissible: bool,
}

fn admissibility_row(m: u64) -> AdmissibilityRow {
    let mut rest = m;
    for p in [2u64, 3] {
        while rest.is_multiple_of(p) {
            rest /= p;
        }
    }
    AdmissibilityRow {
        m,
        trinil_clean: classify_zm(m).is_trinil_clean,
        admissible: rest == 1,
    }
}

/// Classify every m in 2..=limit and tabulate the sweep result against the
/// 2^k * 3^l pattern.  Runs data-parallel when the `parallel` feature is on.
pub fn admissibility_sweep(limit: u64) -> Vec<AdmissibilityRow> {
    assert!(limit <= 10_000, "sweep caps at 10^4");
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (2..=limit).into_par_iter().map(admissibility_row).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        admissibility_sweep_seq(limit)
    }
}

/// Sequential twin of [`admissibility_sweep`]; identical output.
pub fn admissibility_sweep_seq(limit: u64) -> Vec<AdmissibilityRow> {
    assert!(limit <= 10_000, "sweep caps at 10^4");
    (2..=limit).map(admissibility_row).collect()
}
