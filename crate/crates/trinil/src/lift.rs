//! Hensel-style lifting from residue fields up to prime-power moduli.
//!
//! The workhorse is [`newton_idempotent_lift`]: given a matrix `X` whose
//! defect `X^2 - X` is nilpotent, the cubic Newton map `e -> 3e^2 - 2e^3`
//! squares the defect's order of vanishing at every step, so it reaches an
//! exact idempotent in at most `ceil(log2 N) + 1` steps, where `N` is any
//! exponent with `(X^2 - X)^N = 0`.  The iterate stays inside the commutative
//! subring generated by `X`, which is what makes the lifted pieces usable as
//! building blocks: anything assembled from them still commutes with `X`.
//!
//! On the 3-adic side we need tripotents (`E^3 = E`) rather than idempotents.
//! Writing `h` for the inverse of 2, the two "halves" `h(X^2 + X)` and
//! `h(X^2 - X)` are almost-idempotent whenever `X^3 - X` is nilpotent, and
//! their difference telescopes back to `X` exactly.  Lifting each half and
//! subtracting yields a tripotent congruent to `X` modulo 3: a difference
//! `p - q` of commuting idempotents always satisfies `(p - q)^3 = p - q`.

use crate::matkit::{MatGF, MatZ};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    /// `X^2 - X` is not nilpotent, so no idempotent congruent to `X` exists.
    #[error("defect X^2 - X is not nilpotent mod {m}; no idempotent lift exists")]
    NotAlmostIdempotent { m: u64 },
    /// `X^3 - X` is not nilpotent, so no tripotent congruent to `X` exists.
    #[error("defect X^3 - X is not nilpotent mod {m}; no tripotent lift exists")]
    NotAlmostTripotent { m: u64 },
}

/// Audit record for one run of the Newton idempotent iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftTrace {
    /// How many times the map `e -> 3e^2 - 2e^3` was applied.
    pub iterations: u32,
    /// A verified exponent `N` with `(X^2 - X)^N = 0`; the iteration count
    /// never exceeds `ceil(log2 N) + 1`.
    pub initial_defect_exponent: u64,
    /// The exact idempotent the iteration converged to.
    pub lifted: MatZ,
}

fn iteration_cap(defect_exponent: u64) -> u32 {
    let log = if defect_exponent <= 1 {
        0
    } else {
        (defect_exponent - 1).ilog2() + 1
    };
    (log + 1).min(64)
}

/// Run the cubic Newton iteration `e -> 3e^2 - 2e^3` starting from `x` until
/// the defect `e^2 - e` vanishes exactly.
///
/// Returns the idempotent together with a [`LiftTrace`].  The result is a
/// polynomial in `x` (so it commutes with `x`), and `e - x` lies in the ideal
/// generated by the initial defect, hence is nilpotent; in particular if the
/// defect has all entries divisible by a prime `p`, then `e = x (mod p)`.
///
/// Every step asserts the exact contraction law
/// `delta' = delta^2 (4 delta - 3)` and the iteration-count bound, so a
/// successful return doubles as a machine-checked certificate of convergence.
pub fn newton_idempotent_lift(x: &MatZ) -> Result<(MatZ, LiftTrace), LiftError> {
    let md = x.modulus();
    let n = x.size();
    let delta0 = x.mul(x).sub(x);
    let witness = delta0
        .nilpotency_witness()
        .expect("lifting requires an admissible modulus");
    let Some(initial_defect_exponent) = witness else {
        return Err(LiftError::NotAlmostIdempotent { m: md.m() });
    };
    let cap = iteration_cap(initial_defect_exponent);

    let mut e = x.clone();
    let mut iterations = 0u32;
    loop {
        let e2 = e.mul(&e);
        let delta = e2.sub(&e);
        if delta.is_zero() {
            break;
        }
        assert!(
            iterations < cap,
            "Newton iteration exceeded its certified bound of {cap} steps"
        );
        let e3 = e2.mul(&e);
        let next = e2.scale(3).sub(&e3.scale(2));
        let next_delta = next.mul(&next).sub(&next);
        let contracted = delta
            .mul(&delta)
            .mul(&delta.scale(4).sub(&MatZ::scalar(md, n, 3)));
        assert_eq!(
            next_delta, contracted,
            "Newton contraction law delta' = delta^2 (4 delta - 3) violated"
        );
        e = next;
        iterations += 1;
    }

    let trace = LiftTrace {
        iterations,
        initial_defect_exponent,
        lifted: e.clone(),
    };
    Ok((e, trace))
}

/// Lift a matrix over Z_{3^l} whose defect `X^3 - X` is nilpotent to an exact
/// tripotent `E` with `E^3 = E`, `E X = X E`, `X - E` nilpotent, and
/// `E = X (mod 3)`.
///
/// The construction halves `X` into the two almost-idempotents
/// `h(X^2 + X)` and `h(X^2 - X)` (where `h = inv(2) mod 3^l`), Newton-lifts
/// each, and returns their difference.  Before returning, the tripotent law
/// `(p - q)^3 = p - q` is asserted exactly.
pub fn tripotent_lift_3adic(x: &MatZ) -> Result<MatZ, LiftError> {
    let md = x.modulus();
    assert!(
        md.two_exp() == 0 && md.three_exp() > 0,
        "3-adic tripotent lift requires a modulus 3^l, got {}",
        md.m()
    );
    let defect = x.mul(x).mul(x).sub(x);
    if defect
        .nilpotency_witness()
        .expect("modulus 3^l is admissible")
        .is_none()
    {
        return Err(LiftError::NotAlmostTripotent { m: md.m() });
    }

    let h = md
        .residue(2)
        .inv()
        .expect("2 is a unit mod 3^l")
        .value() as i64;
    let x2 = x.mul(x);
    let half_plus = x2.add(x).scale(h);
    let half_minus = x2.sub(x).scale(h);
    // half_plus^2 - half_plus = h^2 (X^3 - X)(X + 2), and likewise with
    // (X - 2) for half_minus: both defects sit in the nilpotent ideal
    // generated by X^3 - X, so the Newton lifts cannot fail here.
    let (p, _) = newton_idempotent_lift(&half_plus)?;
    let (q, _) = newton_idempotent_lift(&half_minus)?;
    assert_eq!(p.mul(&q), q.mul(&p), "lifted halves must commute");

    let e = p.sub(&q);
    assert!(
        e.is_tripotent(),
        "difference law (p - q)^3 = p - q failed for commuting idempotents"
    );
    assert_eq!(
        e.reduce(3),
        x.reduce(3),
        "tripotent lift must not move the mod-3 class"
    );
    assert!(
        x.sub(&e)
            .nilpotency_witness()
            .expect("modulus 3^l is admissible")
            .is_some(),
        "X - E must be nilpotent"
    );
    Ok(e)
}

/// Lift an idempotent `ebar` over GF(2) to an exact idempotent `E` over
/// Z_{2^k} and split `a` as `a = E + W` with `W` nilpotent.
///
/// Preconditions (asserted): `ebar^2 = ebar` over GF(2), and the reduction of
/// `a` mod 2 differs from `ebar` by a nilpotent matrix.  Returns `(E, W)`
/// where `E` reduces to `ebar` mod 2 and `W = a - E` carries a verified
/// nilpotency witness.
pub fn idempotent_lift_2adic(a: &MatZ, ebar: &MatGF) -> Result<(MatZ, MatZ), LiftError> {
    let md = a.modulus();
    assert!(
        md.three_exp() == 0 && md.two_exp() > 0,
        "2-adic idempotent lift requires a modulus 2^k, got {}",
        md.m()
    );
    assert_eq!(ebar.field(), 2, "field-side idempotent must live over GF(2)");
    assert!(ebar.is_idempotent(), "field split must hand over an idempotent");
    assert!(
        a.reduce(2).sub(ebar).is_nilpotent(),
        "field-side defect must be nilpotent"
    );

    let x = ebar.lift_to(md);
    let (e, _trace) = newton_idempotent_lift(&x)?;
    debug_assert!(e.is_idempotent());
    debug_assert_eq!(e.reduce(2), *ebar);
    let w = a.sub(&e);
    assert!(
        w.nilpotency_witness()
            .expect("modulus 2^k is admissible")
            .is_some(),
        "remainder A - E must be nilpotent"
    );
    Ok((e, w))
}
