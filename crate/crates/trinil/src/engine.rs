//! End-to-end decomposition pipeline and certificates.
//!
//! [`decompose`] writes any square matrix `A` over Z_m (m = 2^k 3^l) as
//! `A = E + W` with `E^3 = E` and `W` nilpotent, and returns a
//! [`TrinilCertificate`] whose every claim is recomputed from scratch — the
//! certificate, not the algorithm, is the contract.  The pipeline:
//!
//! 1. CRT-split `A` into components over Z_{2^k} and Z_{3^l} (a single
//!    prime-power modulus skips the split).
//! 2. On the 2-adic side, reduce mod 2, split the GF(2) matrix into
//!    idempotent + nilpotent blockwise, and Newton-lift the idempotent.
//! 3. On the 3-adic side, reduce mod 3, split into tripotent + nilpotent,
//!    lift the tripotent entrywise, and run the 3-adic tripotent lift.
//! 4. CRT-combine the lifted pieces into `E` and set `W = A - E`.
//!
//! Decompositions are not unique; [`verify`] accepts any certificate whose
//! invariants hold, trusting nothing stored in the `checks` field.

use crate::fieldsplit::{split_field_matrix, SplitBlockInfo, SplitError};
use crate::lift::{idempotent_lift_2adic, tripotent_lift_3adic};
use crate::matkit::{mat_crt_combine, MatCrtParts, MatGF, MatZ};
use crate::zmod::Modulus;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on the total number of random bases sampled by the GF(2)
/// fallback across all blocks of one decomposition.  Empirically ample for
/// block sizes up to 12 while bounding worst-case latency.
pub const DEFAULT_FALLBACK_BUDGET: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("modulus {m} is not of the form 2^k * 3^l (offending prime factor {prime})")]
    InadmissibleModulus { m: u64, prime: u64 },
    #[error(
        "randomized fallback budget exhausted on a field block of size {block_size}; \
         retry with a different seed or a larger budget"
    )]
    FallbackBudgetExhausted { block_size: usize },
    #[error("internal verification failure: {check}")]
    InternalVerificationFailure { check: &'static str },
}

impl From<SplitError> for EngineError {
    fn from(err: SplitError) -> EngineError {
        match err {
            SplitError::FallbackBudgetExhausted { block_size } => {
                EngineError::FallbackBudgetExhausted { block_size }
            }
        }
    }
}

/// The recomputable claims of a certificate.  Stored for display only;
/// [`verify`] always recomputes them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertChecks {
    /// `E + W = A` exactly.
    pub sum_ok: bool,
    /// `E^3 = E` exactly.
    pub tripotent_ok: bool,
    /// `W^nilpotency_exponent = 0` exactly.
    pub nilpotent_ok: bool,
    /// Every recorded field-level split matches `E`'s residue and is itself
    /// an idempotent (mod 2) or tripotent (mod 3) of the right shape.
    pub residue_ok: bool,
}

impl CertChecks {
    pub fn all_ok(&self) -> bool {
        self.sum_ok && self.tripotent_ok && self.nilpotent_ok && self.residue_ok
    }

    /// Name of the first failing check, in a fixed reporting order.
    pub fn first_failure(&self) -> Option<&'static str> {
        if !self.sum_ok {
            Some("sum_ok")
        } else if !self.tripotent_ok {
            Some("tripotent_ok")
        } else if !self.nilpotent_ok {
            Some("nilpotent_ok")
        } else if !self.residue_ok {
            Some("residue_ok")
        } else {
            None
        }
    }
}

/// What one prime side of the pipeline did: the assembled field-level split
/// and the per-block route provenance.  Replayable given the seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideRecord {
    /// 2 or 3.
    pub prime: u8,
    /// The assembled idempotent (GF(2)) or tripotent (GF(3)) that `E`
    /// reduces to.
    pub field_split: MatGF,
    /// One entry per companion block of the Frobenius form.
    pub blocks: Vec<SplitBlockInfo>,
}

/// Field-split records per prime side; a side is absent when the prime does
/// not divide the modulus (and for the triangular route, which never touches
/// the field splitter).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceRecord {
    pub two_adic: Option<SideRecord>,
    pub three_adic: Option<SideRecord>,
}

/// A verified decomposition `A = E + W`, `E^3 = E`, `W^N = 0`, together with
/// everything needed to replay and re-check it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrinilCertificate {
    pub a: MatZ,
    pub e: MatZ,
    pub w: MatZ,
    /// Verified exponent `N` with `W^N = 0`; the main pipeline uses
    /// `n * max(k, l)`, the triangular route stores the power of two found
    /// by repeated squaring.
    pub nilpotency_exponent: u64,
    pub checks: CertChecks,
    pub provenance: ProvenanceRecord,
    pub seed: u64,
}

/// Result of [`verify`]: the recomputed checks plus the overall verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub ok: bool,
    pub checks: CertChecks,
}

impl VerifyOutcome {
    pub fn first_failure(&self) -> Option<&'static str> {
        self.checks.first_failure()
    }
}

fn recompute_checks(cert: &TrinilCertificate) -> CertChecks {
    let sum_ok = cert
        .e
        .checked_add(&cert.w)
        .map(|s| s == cert.a)
        .unwrap_or(false);
    let tripotent_ok = cert
        .e
        .checked_mul(&cert.e)
        .and_then(|e2| e2.checked_mul(&cert.e))
        .map(|e3| e3 == cert.e)
        .unwrap_or(false);
    let nilpotent_ok = cert.w.pow(cert.nilpotency_exponent).is_zero();
    let residue_ok = side_ok(cert, cert.provenance.two_adic.as_ref(), 2)
        && side_ok(cert, cert.provenance.three_adic.as_ref(), 3);
    CertChecks {
        sum_ok,
        tripotent_ok,
        nilpotent_ok,
        residue_ok,
    }
}

fn side_ok(cert: &TrinilCertificate, side: Option<&SideRecord>, expected_prime: u8) -> bool {
    let Some(side) = side else {
        // No field-split claim on this side; nothing to trace.
        return true;
    };
    let md = cert.e.modulus();
    let divides = match expected_prime {
        2 => md.two_exp() > 0,
        3 => md.three_exp() > 0,
        _ => false,
    };
    if side.prime != expected_prime || !divides {
        return false;
    }
    let split = &side.field_split;
    if split.field() != expected_prime || split.size() != cert.e.size() {
        return false;
    }
    let kind_ok = match expected_prime {
        2 => split.is_idempotent(),
        _ => split.is_tripotent(),
    };
    let sizes_ok = side.blocks.iter().map(|b| b.size).sum::<usize>() == cert.e.size();
    kind_ok && sizes_ok && cert.e.reduce(expected_prime) == *split
}

/// Recompute every certificate claim from scratch.  Pure; never trusts the
/// stored `checks` field.
pub fn verify(cert: &TrinilCertificate) -> VerifyOutcome {
    let checks = recompute_checks(cert);
    VerifyOutcome {
        ok: checks.all_ok(),
        checks,
    }
}

/// Decompose `a` as tripotent plus nilpotent with the default fallback
/// budget.  Deterministic given `(a, seed)`.
pub fn decompose(a: &MatZ, seed: u64) -> Result<TrinilCertificate, EngineError> {
    decompose_with_budget(a, seed, DEFAULT_FALLBACK_BUDGET)
}

/// As [`decompose`], with an explicit cap on random bases sampled by the
/// GF(2) fallback (shared across all blocks of this one matrix).
pub fn decompose_with_budget(
    a: &MatZ,
    seed: u64,
    budget: u64,
) -> Result<TrinilCertificate, EngineError> {
    let md = a.modulus();
    if !md.is_admissible() {
        return Err(EngineError::InadmissibleModulus {
            m: md.m(),
            prime: md.offending_prime().unwrap_or(md.m()),
        });
    }
    let n = a.size();
    let mut remaining = budget;
    let parts = a.crt_split().expect("modulus is admissible");

    let two = match parts.two_adic.as_ref() {
        Some(a2) => Some(two_adic_side(a2, seed, &mut remaining)?),
        None => None,
    };
    let three = match parts.three_adic.as_ref() {
        Some(a3) => Some(three_adic_side(a3, seed, &mut remaining)?),
        None => None,
    };

    let e = mat_crt_combine(
        &MatCrtParts {
            two_adic: two.as_ref().map(|(e2, _)| e2.clone()),
            three_adic: three.as_ref().map(|(e3, _)| e3.clone()),
        },
        md,
    )
    .expect("components share the modulus factorization");
    let w = a.sub(&e);
    let nilpotency_exponent = n as u64 * u64::from(md.max_prime_exp());
    let provenance = ProvenanceRecord {
        two_adic: two.map(|(_, rec)| rec),
        three_adic: three.map(|(_, rec)| rec),
    };

    seal(TrinilCertificate {
        a: a.clone(),
        e,
        w,
        nilpotency_exponent,
        checks: CertChecks {
            sum_ok: false,
            tripotent_ok: false,
            nilpotent_ok: false,
            residue_ok: false,
        },
        provenance,
        seed,
    })
}

/// Recompute the checks, stamp them into the certificate, and refuse to
/// emit anything that does not verify.
fn seal(mut cert: TrinilCertificate) -> Result<TrinilCertificate, EngineError> {
    cert.checks = recompute_checks(&cert);
    match cert.checks.first_failure() {
        None => Ok(cert),
        Some(check) => Err(EngineError::InternalVerificationFailure { check }),
    }
}

fn two_adic_side(
    a2: &MatZ,
    seed: u64,
    remaining: &mut u64,
) -> Result<(MatZ, SideRecord), EngineError> {
    let abar = a2.reduce(2);
    let split = split_field_matrix(&abar, seed, remaining)?;
    let (e2, _w2) = idempotent_lift_2adic(a2, &split.e).map_err(|_| {
        EngineError::InternalVerificationFailure {
            check: "2-adic idempotent lift precondition",
        }
    })?;
    Ok((
        e2,
        SideRecord {
            prime: 2,
            field_split: split.e,
            blocks: split.blocks,
        },
    ))
}

fn three_adic_side(
    a3: &MatZ,
    seed: u64,
    remaining: &mut u64,
) -> Result<(MatZ, SideRecord), EngineError> {
    let abar = a3.reduce(3);
    let split = split_field_matrix(&abar, seed, remaining)?;
    // Any entrywise lift of the field tripotent works: its cube-defect is
    // zero mod 3, which is all the 3-adic lift needs.
    let x = split.e.lift_to(a3.modulus());
    let e3 = tripotent_lift_3adic(&x).map_err(|_| EngineError::InternalVerificationFailure {
        check: "3-adic tripotent lift precondition",
    })?;
    Ok((
        e3,
        SideRecord {
            prime: 3,
            field_split: split.e,
            blocks: split.blocks,
        },
    ))
}

/// An element of the upper-triangular matrix ring T_s(Z_m): `s` diagonal
/// entries plus the strictly-upper entries in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangularInput {
    modulus: Modulus,
    diagonal: Vec<u64>,
    strict_upper: Vec<u64>,
}

impl TriangularInput {
    /// `strict_upper` holds the entries above the diagonal row by row:
    /// (0,1), (0,2), ..., (0,s-1), (1,2), ... — s(s-1)/2 values.
    pub fn new(modulus: Modulus, diagonal: &[i64], strict_upper: &[i64]) -> TriangularInput {
        let s = diagonal.len();
        assert!(s >= 1, "triangular input needs at least one diagonal entry");
        assert_eq!(
            strict_upper.len(),
            s * (s - 1) / 2,
            "strictly-upper part of T_{s} needs s(s-1)/2 entries"
        );
        let m = modulus.m() as i64;
        TriangularInput {
            modulus,
            diagonal: diagonal.iter().map(|&v| v.rem_euclid(m) as u64).collect(),
            strict_upper: strict_upper.iter().map(|&v| v.rem_euclid(m) as u64).collect(),
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn block_count(&self) -> usize {
        self.diagonal.len()
    }

    pub fn to_matrix(&self) -> MatZ {
        let s = self.block_count();
        let mut a = MatZ::zeros(self.modulus, s);
        let mut upper = self.strict_upper.iter();
        for i in 0..s {
            a.set(i, i, self.diagonal[i] as i64);
            for j in (i + 1)..s {
                a.set(i, j, *upper.next().expect("length checked at construction") as i64);
            }
        }
        a
    }
}

/// Decompose an upper-triangular matrix by splitting each diagonal entry
/// with the scalar rule and keeping everything strictly above the diagonal
/// in `W`.  `W` is then triangular with nilpotent diagonal, and its true
/// nilpotency exponent is found by repeated squaring (never trusted from
/// theory); the certificate stores that verified power of two.
pub fn decompose_triangular(t: &TriangularInput) -> Result<TrinilCertificate, EngineError> {
    let md = t.modulus();
    if !md.is_admissible() {
        return Err(EngineError::InadmissibleModulus {
            m: md.m(),
            prime: md.offending_prime().unwrap_or(md.m()),
        });
    }
    let s = t.block_count();
    let a = t.to_matrix();
    let mut e = MatZ::zeros(md, s);
    for (i, &d) in t.diagonal.iter().enumerate() {
        let (ei, _wi) = md
            .residue_u64(d)
            .trinil_decompose()
            .expect("modulus is admissible");
        e.set(i, i, ei.value() as i64);
    }
    let w = a.sub(&e);

    // Theory bounds the exponent by s * (max(k, l) + 1); squaring past twice
    // that bound without reaching zero means something is deeply wrong.
    let bound = s as u64 * (u64::from(md.max_prime_exp()) + 1);
    let mut nilpotency_exponent = 1u64;
    let mut power = w.clone();
    while !power.is_zero() {
        if nilpotency_exponent >= 2 * bound {
            return Err(EngineError::InternalVerificationFailure {
                check: "triangular remainder nilpotency",
            });
        }
        power = power.mul(&power);
        nilpotency_exponent *= 2;
    }

    seal(TrinilCertificate {
        a,
        e,
        w,
        nilpotency_exponent,
        checks: CertChecks {
            sum_ok: false,
            tripotent_ok: false,
            nilpotent_ok: false,
            residue_ok: false,
        },
        provenance: ProvenanceRecord::default(),
        seed: 0,
    })
}

/// Decompose a batch, item `i` using seed `seed + i`.  Order-preserving;
/// per-item failures are collected, not fail-fast.  Runs data-parallel when
/// the `parallel` feature is enabled.
pub fn decompose_batch(items: &[MatZ], seed: u64) -> Vec<Result<TrinilCertificate, EngineError>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items
            .par_iter()
            .enumerate()
            .map(|(i, a)| decompose(a, seed.wrapping_add(i as u64)))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        decompose_batch_seq(items, seed)
    }
}

/// Sequential twin of [`decompose_batch`]; same seeds, same outputs.
pub fn decompose_batch_seq(
    items: &[MatZ],
    seed: u64,
) -> Vec<Result<TrinilCertificate, EngineError>> {
    items
        .iter()
        .enumerate()
        .map(|(i, a)| decompose(a, seed.wrapping_add(i as u64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn md(m: u64) -> Modulus {
        Modulus::new(m).unwrap()
    }

    fn random_mat(modulus: Modulus, n: usize, rng: &mut ChaCha8Rng) -> MatZ {
        let mut a = MatZ::zeros(modulus, n);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, (rng.next_u64() % modulus.m()) as i64);
            }
        }
        a
    }

    fn assert_verified(cert: &TrinilCertificate) {
        let outcome = verify(cert);
        assert!(
            outcome.ok,
            "certificate failed on {:?}",
            outcome.first_failure()
        );
        assert_eq!(cert.checks, outcome.checks);
    }

    #[test]
    fn zero_matrix_decomposes_to_zero() {
        let a = MatZ::zeros(md(6), 3);
        let cert = decompose(&a, 0).unwrap();
        assert!(cert.e.is_zero());
        assert!(cert.w.is_zero());
        assert_verified(&cert);
    }

    #[test]
    fn negated_identity_mod_nine_is_its_own_tripotent() {
        let a = MatZ::scalar(md(9), 3, -1);
        let cert = decompose(&a, 7).unwrap();
        assert_eq!(cert.e, a);
        assert!(cert.w.is_zero());
        assert_verified(&cert);
    }

    #[test]
    fn fibonacci_matrix_mod_six_decomposes() {
        let a = MatZ::from_rows(md(6), &[&[1, 1], &[1, 0]]);
        let cert = decompose(&a, 1).unwrap();
        assert_verified(&cert);
        assert_eq!(cert.nilpotency_exponent, 2);
        assert!(cert.w.pow(2).is_zero());
        assert!(cert.provenance.two_adic.is_some());
        assert!(cert.provenance.three_adic.is_some());
    }

    #[test]
    fn exhaustive_two_by_two_mod_four_and_nine() {
        for m in [4u64, 9] {
            let modulus = md(m);
            for code in 0..m.pow(4) {
                let mut c = code;
                let mut entries = Vec::with_capacity(4);
                for _ in 0..4 {
                    entries.push((c % m) as i64);
                    c /= m;
                }
                let a = MatZ::new(modulus, 2, entries).unwrap();
                let cert = decompose(&a, 0).unwrap();
                assert_verified(&cert);
            }
        }
    }

    #[test]
    fn single_prime_power_moduli_skip_the_other_side() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a2 = random_mat(md(8), 3, &mut rng);
        let cert2 = decompose(&a2, 3).unwrap();
        assert!(cert2.provenance.two_adic.is_some());
        assert!(cert2.provenance.three_adic.is_none());
        assert_verified(&cert2);

        let a3 = random_mat(md(27), 3, &mut rng);
        let cert3 = decompose(&a3, 3).unwrap();
        assert!(cert3.provenance.two_adic.is_none());
        assert!(cert3.provenance.three_adic.is_some());
        assert_verified(&cert3);
    }

    #[test]
    fn residue_traceability_and_two_side_idempotency() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
        let modulus = md(72);
        for n in 1..=5usize {
            for _ in 0..20 {
                let a = random_mat(modulus, n, &mut rng);
                let cert = decompose(&a, rng.next_u64()).unwrap();
                assert_verified(&cert);
                let two = cert.provenance.two_adic.as_ref().unwrap();
                let three = cert.provenance.three_adic.as_ref().unwrap();
                assert_eq!(cert.e.reduce(2), two.field_split);
                assert_eq!(cert.e.reduce(3), three.field_split);
                assert!(two.field_split.is_idempotent());
                assert!(three.field_split.is_tripotent());
                // The 2-adic component is a genuine idempotent, not just a
                // tripotent: stronger than what the sum requires.
                let e2 = cert.e.reduce_to(modulus.two_part().unwrap());
                assert!(e2.is_idempotent());
            }
        }
    }

    #[test]
    fn inadmissible_modulus_is_rejected_with_offending_prime() {
        let a = MatZ::zeros(md(10), 2);
        assert_eq!(
            decompose(&a, 0),
            Err(EngineError::InadmissibleModulus { m: 10, prime: 5 })
        );
    }

    #[test]
    fn determinism_fixed_seed_identical_certificates() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let a = random_mat(md(36), 4, &mut rng);
            let c1 = decompose(&a, 99).unwrap();
            let c2 = decompose(&a, 99).unwrap();
            assert_eq!(c1, c2);
        }
    }

    #[test]
    fn certificate_serde_round_trip() {
        let a = MatZ::from_rows(md(12), &[&[7, 5, 1], &[0, 2, 3], &[4, 4, 4]]);
        let cert = decompose(&a, 11).unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        let back: TrinilCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(cert, back);
        assert!(verify(&back).ok);
    }

    #[test]
    fn tampered_w_fails_sum_check() {
        let a = MatZ::from_rows(md(6), &[&[1, 1], &[1, 0]]);
        let mut cert = decompose(&a, 1).unwrap();
        let bumped = (cert.w.get(0, 0) + 1) % 6;
        cert.w.set(0, 0, bumped as i64);
        let outcome = verify(&cert);
        assert!(!outcome.ok);
        assert!(!outcome.checks.sum_ok);
        assert_eq!(outcome.first_failure(), Some("sum_ok"));
    }

    #[test]
    fn tampered_e_fails_tripotent_check() {
        let a = MatZ::from_rows(md(6), &[&[1, 1], &[1, 0]]);
        let mut cert = decompose(&a, 1).unwrap();
        // Replace (E, W) by (E + D, W - D) with D chosen so the sum still
        // matches but E + D is no longer tripotent.
        let d = MatZ::from_rows(md(6), &[&[0, 2], &[0, 0]]);
        cert.e = cert.e.add(&d);
        cert.w = cert.w.sub(&d);
        let outcome = verify(&cert);
        assert!(outcome.checks.sum_ok);
        assert!(!outcome.ok);
    }

    #[test]
    fn tampered_exponent_fails_nilpotent_check() {
        let a = MatZ::from_rows(md(6), &[&[1, 1], &[1, 0]]);
        let mut cert = decompose(&a, 1).unwrap();
        assert!(!cert.w.is_zero());
        cert.nilpotency_exponent = 0;
        let outcome = verify(&cert);
        assert!(!outcome.checks.nilpotent_ok);
    }

    #[test]
    fn forged_field_split_fails_residue_check() {
        let a = MatZ::from_rows(md(6), &[&[1, 1], &[1, 0]]);
        let mut cert = decompose(&a, 1).unwrap();
        let side = cert.provenance.two_adic.as_mut().unwrap();
        let flipped = (side.field_split.get(0, 0) + 1) % 2;
        side.field_split.set(0, 0, flipped);
        let outcome = verify(&cert);
        assert!(!outcome.checks.residue_ok);
    }

    #[test]
    fn triangular_diag_7_2_0_mod_twelve_frozen() {
        let t = TriangularInput::new(md(12), &[7, 2, 0], &[0, 0, 0]);
        let cert = decompose_triangular(&t).unwrap();
        // Scalar rule per entry: 7 = 1 + 6, 2 = 8 + 6 (8 is the tripotent
        // congruent to 0 mod 4 and -1 mod 3), 0 = 0 + 0.
        assert_eq!(cert.e, MatZ::from_rows(md(12), &[&[1, 0, 0], &[0, 8, 0], &[0, 0, 0]]));
        assert_eq!(cert.w, MatZ::from_rows(md(12), &[&[6, 0, 0], &[0, 6, 0], &[0, 0, 0]]));
        assert!(cert.w.pow(2).is_zero());
        assert_verified(&cert);
    }

    #[test]
    fn triangular_zero_gives_zero_certificate() {
        let t = TriangularInput::new(md(12), &[0, 0], &[0]);
        let cert = decompose_triangular(&t).unwrap();
        assert!(cert.e.is_zero());
        assert!(cert.w.is_zero());
        assert_verified(&cert);
    }

    #[test]
    fn triangular_identity_diagonal_keeps_strict_upper_in_w() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let upper: Vec<i64> = (0..3).map(|_| (rng.next_u64() % 12) as i64).collect();
            let t = TriangularInput::new(md(12), &[1, 1, 1], &upper);
            let cert = decompose_triangular(&t).unwrap();
            assert_eq!(cert.e, MatZ::identity(md(12), 3));
            assert!(cert.w.pow(3).is_zero());
            assert_verified(&cert);
        }
    }

    #[test]
    fn triangular_random_elements_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7e1a);
        for &m in &[6u64, 12, 24, 27] {
            for _ in 0..25 {
                let diagonal: Vec<i64> = (0..4).map(|_| (rng.next_u64() % m) as i64).collect();
                let upper: Vec<i64> = (0..6).map(|_| (rng.next_u64() % m) as i64).collect();
                let t = TriangularInput::new(md(m), &diagonal, &upper);
                let cert = decompose_triangular(&t).unwrap();
                assert_verified(&cert);
            }
        }
    }

    #[test]
    fn triangular_certificate_passes_generic_verify_without_sides() {
        let t = TriangularInput::new(md(12), &[5, 10], &[3]);
        let cert = decompose_triangular(&t).unwrap();
        assert!(cert.provenance.two_adic.is_none());
        assert!(cert.provenance.three_adic.is_none());
        assert!(verify(&cert).ok);
    }

    #[test]
    fn batch_empty_and_order_preserving() {
        assert!(decompose_batch(&[], 0).is_empty());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let items: Vec<MatZ> = (0..8).map(|_| random_mat(md(12), 3, &mut rng)).collect();
        let batch = decompose_batch(&items, 100);
        assert_eq!(batch.len(), items.len());
        for (i, (item, result)) in items.iter().zip(&batch).enumerate() {
            let cert = result.as_ref().unwrap();
            assert_eq!(&cert.a, item);
            assert_eq!(cert.seed, 100 + i as u64);
            // Per-item seed derivation: identical to a lone decompose call.
            assert_eq!(*cert, decompose(item, 100 + i as u64).unwrap());
        }
    }

    #[test]
    fn batch_parallel_and_sequential_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let items: Vec<MatZ> = (0..16).map(|_| random_mat(md(36), 4, &mut rng)).collect();
        assert_eq!(decompose_batch(&items, 7), decompose_batch_seq(&items, 7));
    }

    #[test]
    fn batch_collects_per_item_errors() {
        let good = MatZ::zeros(md(6), 2);
        let bad = MatZ::zeros(md(10), 2);
        let batch = decompose_batch(&[good, bad], 0);
        assert!(batch[0].is_ok());
        assert_eq!(
            batch[1],
            Err(EngineError::InadmissibleModulus { m: 10, prime: 5 })
        );
    }

    #[test]
    fn randomized_sweep_many_moduli() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xcafe);
        for &(n, m) in &[(3usize, 12u64), (4, 24), (2, 36), (3, 72)] {
            let modulus = md(m);
            for _ in 0..30 {
                let a = random_mat(modulus, n, &mut rng);
                let cert = decompose(&a, rng.next_u64()).unwrap();
                assert_verified(&cert);
                assert_eq!(
                    cert.nilpotency_exponent,
                    n as u64 * u64::from(modulus.max_prime_exp())
                );
            }
        }
    }
}
