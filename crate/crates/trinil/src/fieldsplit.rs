//! Tripotent + nilpotent splitting over the prime fields, one companion
//! block at a time.
//!
//! Over GF(3) every block falls to one of five closed-form patterns keyed by
//! the block's subleading coefficient; no recursion, no randomness.
//!
//! Over GF(2) the splitter always produces an idempotent `E` (a strictly
//! stronger property than tripotence, and required by the shift pullback:
//! if `B + I = E' + W` with `E'` idempotent then `E' + I` is idempotent in
//! characteristic 2 and `B - (E' + I) = W`). The routes, in order:
//! scalar, pure-nilpotent block, splitting off the `x^s` part, direct
//! last-column idempotent when the trace is 1, the shift trick (unipotent
//! blocks take `E = I`; blocks whose shifted polynomial has trace 1 recurse
//! through the shifted matrix), splitting into primary factors, and finally
//! a seeded random search over conjugated rank-`r` projections. Only blocks
//! of even size >= 4 all of whose invertible primary factors are
//! trace-degenerate under both `x -> x` and `x -> x + 1` can reach the
//! random route, and every certificate records which block took which route.

use crate::canon::{
    companion_matrix, frobenius_form, poly_factor, split_companion_multi,
};
use crate::matkit::MatGF;
use crate::poly::GfPoly;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SplitError {
    #[error(
        "randomized fallback budget exhausted while splitting a block of size {block_size}"
    )]
    FallbackBudgetExhausted { block_size: usize },
}

/// How a block's splitting was obtained, ordered by severity: everything
/// below `RandomFallback` is closed-form. A block solved by recursion is
/// labeled with the most severe route used inside it.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize,
)]
pub enum Provenance {
    /// 1x1 block; every scalar of GF(2) and GF(3) is tripotent.
    Scalar,
    /// Characteristic polynomial x^n; the block itself is the nilpotent.
    NilBlock,
    /// Subleading coefficient 1: the last column is idempotent, the
    /// subdiagonal shift is the nilpotent.
    LastColIdempotent,
    /// GF(3), subleading coefficient 2: the last column squares to its own
    /// negative, hence is tripotent.
    LastColAntiIdempotent,
    /// GF(3), traceless 2x2: the transposition matrix is the tripotent.
    Swap2,
    /// GF(3), traceless 3x3 corner pattern.
    Corner3,
    /// GF(3), traceless n >= 4 corner pattern.
    CornerBig,
    /// GF(2): unipotent blocks take E = I, and blocks whose shifted
    /// polynomial has trace 1 recurse through B + I.
    ShiftTrick,
    /// GF(2): seeded search over conjugated even-rank projections.
    RandomFallback,
}

/// Split of a single companion block, in block-local coordinates:
/// `e + w = companion(chi)`, `e` tripotent, `w` nilpotent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSplit {
    pub e: MatGF,
    pub w: MatGF,
    pub provenance: Provenance,
}

/// Per-block record of a whole-matrix split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitBlockInfo {
    pub size: usize,
    /// Coefficients (low to high) of the block's monic polynomial.
    pub poly: Vec<u8>,
    pub provenance: Provenance,
}

/// Whole-matrix split over one prime field: `a = e + w` with `e` tripotent
/// (idempotent over GF(2)) and `w` nilpotent.
#[derive(Debug, Clone)]
pub struct FieldMatrixSplit {
    pub e: MatGF,
    pub w: MatGF,
    pub blocks: Vec<SplitBlockInfo>,
}

/// Random-search state for the GF(2) fallback: a per-block generator and the
/// shared remaining attempt budget (one attempt = one sampled basis).
struct FallbackCtx<'a> {
    rng: ChaCha8Rng,
    remaining: &'a mut u64,
}

/// Split a matrix over GF(2) or GF(3). The seed feeds only the random
/// fallback (block `i` uses `seed.wrapping_add(i)`), and `budget` bounds the
/// total number of sampled bases across all blocks of this matrix.
pub fn split_field_matrix(
    a: &MatGF,
    seed: u64,
    budget: &mut u64,
) -> Result<FieldMatrixSplit, SplitError> {
    let p = a.field();
    let form = frobenius_form(a);
    let mut e_parts = Vec::with_capacity(form.blocks.len());
    let mut infos = Vec::with_capacity(form.blocks.len());
    for (i, block) in form.blocks.iter().enumerate() {
        let split = match p {
            3 => split_gf3_block(&block.poly),
            2 => {
                let mut ctx = FallbackCtx {
                    rng: ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64)),
                    remaining: budget,
                };
                split_gf2_block(&block.poly, &mut ctx)?
            }
            _ => unreachable!("prime fields are 2 and 3"),
        };
        infos.push(SplitBlockInfo {
            size: block.size(),
            poly: block.poly.coeffs().to_vec(),
            provenance: split.provenance,
        });
        e_parts.push(split.e);
    }
    let e_local = MatGF::block_diag(p, &e_parts);
    let e = form.basis.mul(&e_local).mul(&form.basis_inv);
    let w = a.sub(&e);
    assert!(e.is_tripotent(), "field split produced a non-tripotent");
    assert!(p != 2 || e.is_idempotent(), "GF(2) split must be idempotent");
    assert!(w.is_nilpotent(), "field split produced a non-nilpotent");
    Ok(FieldMatrixSplit { e, w, blocks: infos })
}

/// Closed-form split of one GF(3) companion block.
pub fn split_gf3_block(chi: &GfPoly) -> BlockSplit {
    assert_eq!(chi.field(), 3);
    let n = chi.degree().expect("positive degree");
    let c = companion_matrix(chi);
    if n == 1 {
        // every scalar is tripotent mod 3
        return BlockSplit { e: c.clone(), w: MatGF::zeros(3, 1), provenance: Provenance::Scalar };
    }
    let sub = c.get(n - 1, n - 1);
    let (e, provenance) = match sub {
        1 | 2 => {
            // the last column alone: E^2 = sub * E, tripotent either way
            let mut e = MatGF::zeros(3, n);
            for i in 0..n {
                e.set(i, n - 1, c.get(i, n - 1));
            }
            let provenance = if sub == 1 {
                Provenance::LastColIdempotent
            } else {
                Provenance::LastColAntiIdempotent
            };
            (e, provenance)
        }
        _ => {
            // traceless: swap corner; the third arm keeps the difference
            // to the companion strictly triangularizable
            let mut e = MatGF::zeros(3, n);
            e.set(n - 2, n - 1, 1);
            e.set(n - 1, n - 2, 1);
            if n >= 3 {
                e.set(n - 2, n - 3, 1);
            }
            let provenance = match n {
                2 => Provenance::Swap2,
                3 => Provenance::Corner3,
                _ => Provenance::CornerBig,
            };
            (e, provenance)
        }
    };
    let w = c.sub(&e);
    debug_assert!(e.is_tripotent() && w.is_nilpotent());
    BlockSplit { e, w, provenance }
}

/// Split of one GF(2) companion block; `E` comes out idempotent.
fn split_gf2_block(chi: &GfPoly, ctx: &mut FallbackCtx) -> Result<BlockSplit, SplitError> {
    assert_eq!(chi.field(), 2);
    let n = chi.degree().expect("positive degree");
    let c = companion_matrix(chi);

    if n == 1 {
        return Ok(BlockSplit {
            e: c.clone(),
            w: MatGF::zeros(2, 1),
            provenance: Provenance::Scalar,
        });
    }
    if chi == &GfPoly::monomial(2, n) {
        return Ok(BlockSplit { e: MatGF::zeros(2, n), w: c, provenance: Provenance::NilBlock });
    }
    if chi.coeff(0) == 0 {
        // split off the x^s part and recurse on the invertible rest
        let s = chi.coeffs().iter().position(|&x| x != 0).expect("nonzero");
        let xs = GfPoly::monomial(2, s);
        let rest = chi.divmod(&xs).0;
        return recombine(chi, &c, &[xs, rest], ctx);
    }
    if chi.coeff(n - 1) == 1 {
        // trace 1: the last column is idempotent, the shift remains
        let mut e = MatGF::zeros(2, n);
        for i in 0..n {
            e.set(i, n - 1, c.get(i, n - 1));
        }
        let w = c.sub(&e);
        return Ok(BlockSplit { e, w, provenance: Provenance::LastColIdempotent });
    }
    let shifted = chi.shift_by_one();
    if shifted == GfPoly::monomial(2, n) {
        // unipotent: B - I is the nilpotent
        let e = MatGF::identity(2, n);
        let w = c.sub(&e);
        return Ok(BlockSplit { e, w, provenance: Provenance::ShiftTrick });
    }
    if shifted.coeff(n - 1) == 1 {
        // the shifted matrix has trace 1, so its own blocks all make
        // progress; pull the idempotent back through E -> E + I
        let bt = c.add(&MatGF::identity(2, n));
        let form = frobenius_form(&bt);
        let mut parts = Vec::with_capacity(form.blocks.len());
        let mut provenance = Provenance::ShiftTrick;
        for block in &form.blocks {
            let sub_split = split_gf2_block(&block.poly, ctx)?;
            provenance = provenance.max(sub_split.provenance);
            parts.push(sub_split.e);
        }
        let e_tilde = form
            .basis
            .mul(&MatGF::block_diag(2, &parts))
            .mul(&form.basis_inv);
        let e = e_tilde.add(&MatGF::identity(2, n));
        let w = c.sub(&e);
        debug_assert!(e.is_idempotent() && w.is_nilpotent());
        return Ok(BlockSplit { e, w, provenance });
    }
    let primaries = poly_factor(chi);
    if primaries.len() >= 2 {
        let factors: Vec<GfPoly> =
            primaries.iter().map(|(q, m)| q.pow(*m)).collect();
        return recombine(chi, &c, &factors, ctx);
    }
    random_fallback(chi, &c, ctx)
}

/// Split along pairwise-coprime factors, recurse, and conjugate the pieces
/// back into block-local coordinates.
fn recombine(
    chi: &GfPoly,
    c: &MatGF,
    factors: &[GfPoly],
    ctx: &mut FallbackCtx,
) -> Result<BlockSplit, SplitError> {
    let basis = split_companion_multi(chi, factors);
    let basis_inv = basis.inverse().expect("factor basis");
    let mut parts = Vec::with_capacity(factors.len());
    let mut provenance = Provenance::Scalar;
    for f in factors {
        let sub_split = split_gf2_block(f, ctx)?;
        provenance = provenance.max(sub_split.provenance);
        parts.push(sub_split.e);
    }
    let e = basis.mul(&MatGF::block_diag(2, &parts)).mul(&basis_inv);
    let w = c.sub(&e);
    debug_assert!(e.is_idempotent() && w.is_nilpotent());
    Ok(BlockSplit { e, w, provenance })
}

/// Seeded search for an idempotent whose defect against the block is
/// nilpotent. The trace argument pins the rank to an even value strictly
/// between 0 and n, so each sampled basis is tested at every admissible
/// rank, ascending.
fn random_fallback(
    chi: &GfPoly,
    c: &MatGF,
    ctx: &mut FallbackCtx,
) -> Result<BlockSplit, SplitError> {
    let n = chi.degree().expect("positive degree");
    debug_assert!(n >= 4 && n.is_multiple_of(2), "only even blocks of size >= 4 reach the fallback");
    loop {
        if *ctx.remaining == 0 {
            return Err(SplitError::FallbackBudgetExhausted { block_size: n });
        }
        *ctx.remaining -= 1;
        let entries: Vec<u8> = (0..n * n).map(|_| (ctx.rng.next_u32() % 2) as u8).collect();
        let basis = MatGF::new(2, n, entries);
        let Some(basis_inv) = basis.inverse() else {
            continue;
        };
        for rank in (2..n).step_by(2) {
            let mut proj = MatGF::zeros(2, n);
            for i in 0..rank {
                proj.set(i, i, 1);
            }
            let e = basis.mul(&proj).mul(&basis_inv);
            let w = c.sub(&e);
            if w.is_nilpotent() {
                return Ok(BlockSplit { e, w, provenance: Provenance::RandomFallback });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::RngCore;

    fn poly(p: u8, coeffs: &[u8]) -> GfPoly {
        GfPoly::new(p, coeffs.to_vec())
    }

    fn split_gf2(chi: &GfPoly, seed: u64, budget: u64) -> Result<BlockSplit, SplitError> {
        let mut remaining = budget;
        let mut ctx = FallbackCtx {
            rng: ChaCha8Rng::seed_from_u64(seed),
            remaining: &mut remaining,
        };
        split_gf2_block(chi, &mut ctx)
    }

    fn assert_valid_block(chi: &GfPoly, s: &BlockSplit) {
        assert!(s.e.is_tripotent(), "E not tripotent for {chi}");
        assert!(s.w.is_nilpotent(), "W not nilpotent for {chi}");
        assert_eq!(s.e.add(&s.w), companion_matrix(chi), "sum mismatch for {chi}");
        if chi.field() == 2 {
            assert!(s.e.is_idempotent(), "GF(2) E must be idempotent for {chi}");
        }
    }

    #[test]
    fn gf3_last_column_idempotent() {
        // x^2 - x - 1: subleading 1
        let chi = poly(3, &[2, 2, 1]);
        let s = split_gf3_block(&chi);
        assert_eq!(s.provenance, Provenance::LastColIdempotent);
        assert_eq!(s.e, MatGF::from_rows(3, &[&[0, 1], &[0, 1]]));
        assert_eq!(s.w, MatGF::from_rows(3, &[&[0, 0], &[1, 0]]));
        assert_valid_block(&chi, &s);
    }

    #[test]
    fn gf3_last_column_anti_idempotent() {
        // x^2 + x + 1: subleading 2, E^2 = -E
        let chi = poly(3, &[1, 1, 1]);
        let s = split_gf3_block(&chi);
        assert_eq!(s.provenance, Provenance::LastColAntiIdempotent);
        assert_eq!(s.e, MatGF::from_rows(3, &[&[0, 2], &[0, 2]]));
        assert_eq!(s.e.mul(&s.e), s.e.neg());
        assert_valid_block(&chi, &s);
    }

    #[test]
    fn gf3_traceless_swap_and_corners() {
        // x^2 - c0 for all c0
        for c0 in 0..3u8 {
            let chi = poly(3, &[(3 - c0) % 3, 0, 1]);
            let s = split_gf3_block(&chi);
            assert_eq!(s.provenance, Provenance::Swap2);
            assert_eq!(s.e, MatGF::from_rows(3, &[&[0, 1], &[1, 0]]));
            assert_valid_block(&chi, &s);
        }
        let chi = poly(3, &[1, 2, 0, 1]);
        let s = split_gf3_block(&chi);
        assert_eq!(s.provenance, Provenance::Corner3);
        assert_valid_block(&chi, &s);

        let chi = poly(3, &[2, 1, 1, 0, 1]);
        let s = split_gf3_block(&chi);
        assert_eq!(s.provenance, Provenance::CornerBig);
        assert_valid_block(&chi, &s);
    }

    /// Every GF(3) companion block up to size 5 splits validly with the
    /// expected provenance. Exhaustive over all coefficient vectors.
    #[test]
    fn gf3_blocks_exhaustive() {
        for n in 1..=5usize {
            let total = 3u64.pow(n as u32);
            for code in 0..total {
                let mut c = code;
                let mut coeffs: Vec<u8> = (0..n)
                    .map(|_| {
                        let v = (c % 3) as u8;
                        c /= 3;
                        v
                    })
                    .collect();
                coeffs.push(1);
                let chi = GfPoly::new(3, coeffs);
                let s = split_gf3_block(&chi);
                assert_valid_block(&chi, &s);
                let expected = if n == 1 {
                    Provenance::Scalar
                } else {
                    match (3 - chi.coeff(n - 1)) % 3 {
                        1 => Provenance::LastColIdempotent,
                        2 => Provenance::LastColAntiIdempotent,
                        _ => match n {
                            2 => Provenance::Swap2,
                            3 => Provenance::Corner3,
                            _ => Provenance::CornerBig,
                        },
                    }
                };
                assert_eq!(s.provenance, expected, "chi = {chi}");
            }
        }
    }

    #[test]
    fn gf2_unipotent_block_takes_identity() {
        // x^2 + 1 = (x + 1)^2: E = I, W = all ones
        let chi = poly(2, &[1, 0, 1]);
        let s = split_gf2(&chi, 0, 10).unwrap();
        assert_eq!(s.provenance, Provenance::ShiftTrick);
        assert_eq!(s.e, MatGF::identity(2, 2));
        assert_eq!(s.w, MatGF::from_rows(2, &[&[1, 1], &[1, 1]]));
        assert_valid_block(&chi, &s);
    }

    #[test]
    fn gf2_trace_one_block_takes_last_column() {
        let chi = poly(2, &[1, 1, 1]);
        let s = split_gf2(&chi, 0, 10).unwrap();
        assert_eq!(s.provenance, Provenance::LastColIdempotent);
        assert_eq!(s.e, MatGF::from_rows(2, &[&[0, 1], &[0, 1]]));
        assert_eq!(s.w, MatGF::from_rows(2, &[&[0, 0], &[1, 0]]));
        assert_valid_block(&chi, &s);
    }

    #[test]
    fn gf2_nil_and_scalar_blocks() {
        let chi = poly(2, &[0, 0, 1]);
        let s = split_gf2(&chi, 0, 10).unwrap();
        assert_eq!(s.provenance, Provenance::NilBlock);
        assert!(s.e.is_zero());

        for c0 in 0..2u8 {
            let chi = poly(2, &[c0, 1]);
            let s = split_gf2(&chi, 0, 10).unwrap();
            assert_eq!(s.provenance, Provenance::Scalar);
            assert_valid_block(&chi, &s);
        }
    }

    #[test]
    fn gf2_zero_constant_term_splits_off_nilpotent() {
        // x^2 + x = x (x + 1): both factors are 1x1 scalar blocks
        let chi = poly(2, &[0, 1, 1]);
        let s = split_gf2(&chi, 0, 10).unwrap();
        assert_eq!(s.provenance, Provenance::Scalar);
        assert_valid_block(&chi, &s);
        assert_eq!(s.e.rank(), 1);
    }

    #[test]
    fn gf2_shift_recursion_on_odd_traceless_block() {
        // x^3 + x + 1: trace 0, shifted trace 1, not unipotent
        let chi = poly(2, &[1, 1, 0, 1]);
        let s = split_gf2(&chi, 0, 10).unwrap();
        assert_eq!(s.provenance, Provenance::ShiftTrick);
        assert_valid_block(&chi, &s);
    }

    /// Doubly-degenerate primary blocks must reach the random fallback and
    /// still produce a valid split. x^4 + x + 1 is irreducible with trace 0
    /// and is fixed by the shift; (x^2 + x + 1)^2 is a squared primary whose
    /// even multiplicity kills both traces.
    #[test]
    fn gf2_fallback_blocks() {
        for chi in [poly(2, &[1, 1, 0, 0, 1]), poly(2, &[1, 0, 1, 0, 1])] {
            let s = split_gf2(&chi, 7, 100_000).unwrap();
            assert_eq!(s.provenance, Provenance::RandomFallback, "chi = {chi}");
            assert_valid_block(&chi, &s);

            let again = split_gf2(&chi, 7, 100_000).unwrap();
            assert_eq!(s.e, again.e, "fallback must be deterministic per seed");
        }
    }

    #[test]
    fn gf2_fallback_budget_exhaustion_is_reported() {
        let chi = poly(2, &[1, 1, 0, 0, 1]);
        assert_eq!(
            split_gf2(&chi, 7, 0),
            Err(SplitError::FallbackBudgetExhausted { block_size: 4 })
        );
    }

    /// Every GF(2) companion block up to size 6 splits validly, and the
    /// fallback is only ever reached when every invertible primary factor is
    /// trace-degenerate under both x -> x and x -> x + 1 (so every factor
    /// that runs the search has even size >= 4).
    #[test]
    fn gf2_blocks_exhaustive() {
        let x = poly(2, &[0, 1]);
        let x1 = poly(2, &[1, 1]);
        for n in 1..=6usize {
            let total = 2u64.pow(n as u32);
            for code in 0..total {
                let mut c = code;
                let mut coeffs: Vec<u8> = (0..n)
                    .map(|_| {
                        let v = (c % 2) as u8;
                        c /= 2;
                        v
                    })
                    .collect();
                coeffs.push(1);
                let chi = GfPoly::new(2, coeffs);
                let s = split_gf2(&chi, 11, 100_000).unwrap();
                assert_valid_block(&chi, &s);
                if s.provenance == Provenance::RandomFallback {
                    for (q, m) in poly_factor(&chi) {
                        if q == x {
                            continue;
                        }
                        let primary = q.pow(m);
                        let d = primary.degree().unwrap();
                        let shifted = primary.shift_by_one();
                        assert_eq!(primary.coeff(d - 1), 0, "chi = {chi}, factor {q}^{m}");
                        assert_eq!(shifted.coeff(d - 1), 0, "chi = {chi}, factor {q}^{m}");
                        if q != x1 {
                            assert!(d >= 4 && d % 2 == 0, "chi = {chi}, factor {q}^{m}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn whole_matrix_split_exhaustive_2x2() {
        for p in [2u8, 3] {
            let total = (p as u64).pow(4);
            for code in 0..total {
                let mut c = code;
                let entries: Vec<u8> = (0..4)
                    .map(|_| {
                        let v = (c % u64::from(p)) as u8;
                        c /= u64::from(p);
                        v
                    })
                    .collect();
                let a = MatGF::new(p, 2, entries);
                let mut budget = 100_000;
                let split = split_field_matrix(&a, 3, &mut budget).unwrap();
                assert_eq!(split.e.add(&split.w), a);
                assert!(split.e.is_tripotent());
                assert!(split.w.is_nilpotent());
            }
        }
    }

    #[test]
    fn whole_matrix_split_random_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for p in [2u8, 3] {
            for n in 3..=6usize {
                for _ in 0..20 {
                    let entries: Vec<u8> =
                        (0..n * n).map(|_| (rng.next_u32() % u32::from(p)) as u8).collect();
                    let a = MatGF::new(p, n, entries);
                    let mut budget = 100_000;
                    let split = split_field_matrix(&a, 5, &mut budget).unwrap();
                    assert_eq!(split.e.add(&split.w), a);
                    assert!(split.e.is_tripotent());
                    assert!(split.w.is_nilpotent());
                    assert_eq!(
                        split.blocks.iter().map(|b| b.size).sum::<usize>(),
                        n
                    );

                    let mut budget2 = 100_000;
                    let again = split_field_matrix(&a, 5, &mut budget2).unwrap();
                    assert_eq!(split.e, again.e);
                    assert_eq!(budget, budget2);
                }
            }
        }
    }

    #[test]
    fn provenance_severity_order() {
        assert!(Provenance::Scalar < Provenance::NilBlock);
        assert!(Provenance::NilBlock < Provenance::LastColIdempotent);
        assert!(Provenance::LastColIdempotent < Provenance::ShiftTrick);
        assert!(Provenance::ShiftTrick < Provenance::RandomFallback);
    }

    #[test]
    fn provenance_serializes_as_plain_names() {
        assert_eq!(
            serde_json::to_string(&Provenance::RandomFallback).unwrap(),
            "\"RandomFallback\""
        );
        assert_eq!(
            serde_json::from_str::<Provenance>("\"ShiftTrick\"").unwrap(),
            Provenance::ShiftTrick
        );
    }
}
