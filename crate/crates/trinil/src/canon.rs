//! Block-companion canonical form over GF(2) and GF(3).
//!
//! [`frobenius_form`] conjugates a matrix into a direct sum of companion
//! blocks. Matrices that already carry that shape are read off verbatim
//! (identity basis); everything else goes through cyclic decomposition: find
//! a vector of maximal order, peel off its Krylov subspace together with an
//! invariant complement, repeat on the complement.
//!
//! The companion convention throughout: subdiagonal ones, coefficient column
//! last, so the block for the monic polynomial `x^n - c_{n-1} x^{n-1} - ...
//! - c_0` stores `(c_0, ..., c_{n-1})` in its last column and maps
//! `e_j -> e_{j+1}` for `j < n - 1`.
//!
//! Polynomial factorization ([`poly_factor`]) is deterministic: squarefree
//! split, distinct-degree split by Frobenius powers, then equal-degree split
//! with trace functionals of `x^j` — over a prime field the traces of the
//! basis powers separate any two distinct same-degree factors, so no
//! randomness is needed.

use crate::matkit::MatGF;
use crate::poly::{gf_add, gf_inv, gf_mul, gf_neg, gf_sub, GfPoly};

/// One companion block, identified by its monic polynomial (degree >= 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompanionBlock {
    pub poly: GfPoly,
}

impl CompanionBlock {
    pub fn size(&self) -> usize {
        self.poly.degree().expect("companion polynomial has positive degree")
    }

    pub fn matrix(&self) -> MatGF {
        companion_matrix(&self.poly)
    }
}

/// A similarity `basis^{-1} * A * basis = block_diag(blocks)`.
#[derive(Debug, Clone)]
pub struct SimilarityForm {
    pub basis: MatGF,
    pub basis_inv: MatGF,
    pub blocks: Vec<CompanionBlock>,
}

impl SimilarityForm {
    /// The block-diagonal companion matrix itself.
    pub fn form(&self) -> MatGF {
        let mats: Vec<MatGF> = self.blocks.iter().map(|b| b.matrix()).collect();
        MatGF::block_diag(self.basis.field(), &mats)
    }

    /// Defining equations: the basis inverts and conjugates A to the form.
    pub fn check(&self, a: &MatGF) -> bool {
        let n = a.size();
        let p = a.field();
        self.basis.mul(&self.basis_inv) == MatGF::identity(p, n)
            && a.mul(&self.basis) == self.basis.mul(&self.form())
    }
}

/// Companion matrix of a monic polynomial of degree >= 1.
pub fn companion_matrix(q: &GfPoly) -> MatGF {
    let p = q.field();
    assert!(q.is_monic(), "companion polynomial must be monic");
    let n = q.degree().expect("companion polynomial has positive degree");
    assert!(n >= 1);
    let mut c = MatGF::zeros(p, n);
    for i in 0..n - 1 {
        c.set(i + 1, i, 1);
    }
    for i in 0..n {
        c.set(i, n - 1, gf_neg(p, q.coeff(i)));
    }
    c
}

/// Read off the blocks when the matrix is exactly a direct sum of companion
/// blocks. The subdiagonal run starting at a block offset determines the only
/// possible block size, so a single greedy scan plus one equality check
/// decides membership.
fn read_block_companion(a: &MatGF) -> Option<Vec<CompanionBlock>> {
    let n = a.size();
    let p = a.field();
    let mut blocks = Vec::new();
    let mut offset = 0;
    while offset < n {
        let mut s = 1;
        while offset + s < n && a.get(offset + s, offset + s - 1) == 1 {
            s += 1;
        }
        let mut coeffs = vec![0u8; s + 1];
        coeffs[s] = 1;
        for (i, c) in coeffs.iter_mut().enumerate().take(s) {
            *c = gf_neg(p, a.get(offset + i, offset + s - 1));
        }
        blocks.push(CompanionBlock { poly: GfPoly::new(p, coeffs) });
        offset += s;
    }
    let mats: Vec<MatGF> = blocks.iter().map(|b| b.matrix()).collect();
    (MatGF::block_diag(p, &mats) == *a).then_some(blocks)
}

/// Apply q(M) to a vector by Horner iteration; costs deg(q) mat-vec products.
pub(crate) fn poly_apply_vec(m: &MatGF, q: &GfPoly, v: &[u8]) -> Vec<u8> {
    let p = m.field();
    let mut acc = vec![0u8; m.size()];
    for &c in q.coeffs().iter().rev() {
        acc = m.mat_vec(&acc);
        if c != 0 {
            for (a, &b) in acc.iter_mut().zip(v) {
                *a = gf_add(p, *a, gf_mul(p, c, b));
            }
        }
    }
    acc
}

/// Minimal polynomial of a vector plus its Krylov basis v, Mv, ...,
/// M^{d-1} v. Incremental elimination with a combination tracker: the first
/// dependent power hands back the (monic) relation coefficients directly.
fn krylov_closure(m: &MatGF, v: &[u8]) -> (GfPoly, Vec<Vec<u8>>) {
    let p = m.field();
    let n = m.size();
    let mut echelon: Vec<(Vec<u8>, usize, Vec<u8>)> = Vec::new();
    let mut basis: Vec<Vec<u8>> = Vec::new();
    let mut cur = v.to_vec();
    loop {
        let k = basis.len();
        let mut red = cur.clone();
        let mut combo = vec![0u8; k + 1];
        combo[k] = 1;
        for (row, pivot, row_combo) in &echelon {
            let f = red[*pivot];
            if f != 0 {
                for (r, &w) in red.iter_mut().zip(row) {
                    *r = gf_sub(p, *r, gf_mul(p, f, w));
                }
                for (i, &c) in row_combo.iter().enumerate() {
                    combo[i] = gf_sub(p, combo[i], gf_mul(p, f, c));
                }
            }
        }
        match red.iter().position(|&x| x != 0) {
            None => return (GfPoly::new(p, combo), basis),
            Some(pivot) => {
                let inv = gf_inv(p, red[pivot]);
                let row: Vec<u8> = red.iter().map(|&x| gf_mul(p, x, inv)).collect();
                let row_combo: Vec<u8> =
                    combo.iter().map(|&x| gf_mul(p, x, inv)).collect();
                echelon.push((row, pivot, row_combo));
                basis.push(std::mem::take(&mut cur));
                cur = m.mat_vec(basis.last().expect("just pushed"));
            }
        }
        if basis.len() > n {
            unreachable!("Krylov chain exceeded the space dimension");
        }
    }
}

/// Minimal polynomial of a single vector under M.
pub fn min_poly_of_vector(m: &MatGF, v: &[u8]) -> GfPoly {
    krylov_closure(m, v).0
}

/// A vector whose minimal polynomial equals the minimal polynomial of M.
///
/// Standard basis vectors are merged pairwise: when a new vector's order
/// does not divide the current one, both are projected onto coprime halves
/// of the lcm ([`coprime_lcm_split`]) and added; the sum has the lcm as its
/// order.
pub fn maximal_vector(m: &MatGF) -> (Vec<u8>, GfPoly) {
    let p = m.field();
    let n = m.size();
    assert!(n > 0, "empty matrix has no maximal vector");
    let unit = |i: usize| {
        let mut v = vec![0u8; n];
        v[i] = 1;
        v
    };
    let mut z = unit(0);
    let mut mu = min_poly_of_vector(m, &z);
    for i in 1..n {
        if mu.degree() == Some(n) {
            break;
        }
        let v = unit(i);
        let nu = min_poly_of_vector(m, &v);
        if nu.divides(&mu) {
            continue;
        }
        let (f, g) = coprime_lcm_split(&mu, &nu);
        let zf = poly_apply_vec(m, &mu.divmod(&f).0, &z);
        let vg = poly_apply_vec(m, &nu.divmod(&g).0, &v);
        z = zf
            .iter()
            .zip(&vg)
            .map(|(&a, &b)| gf_add(p, a, b))
            .collect();
        mu = f.mul(&g);
        debug_assert_eq!(min_poly_of_vector(m, &z), mu);
    }
    (z, mu)
}

/// Minimal polynomial of the matrix.
pub fn min_poly(m: &MatGF) -> GfPoly {
    maximal_vector(m).1
}

/// Split a pair of monic polynomials into coprime `(F, G)` with `F | a`,
/// `G | b` and `F * G = lcm(a, b)`. Pure gcd arithmetic: primes where `a`
/// carries at least the exponent of `b` end up in `F` at their `a`-exponent,
/// the rest end up in `G` at their `b`-exponent.
pub fn coprime_lcm_split(a: &GfPoly, b: &GfPoly) -> (GfPoly, GfPoly) {
    assert!(a.is_monic() && b.is_monic(), "lcm split needs monic inputs");
    let d = a.gcd(b);
    let mut f = a.clone();
    let mut g = b.divmod(&d).0;
    loop {
        let h = f.gcd(&g);
        if h.is_one() {
            break;
        }
        f = f.divmod(&h).0;
        g = g.mul(&h);
    }
    (f, g)
}

/// Block-companion form by cyclic decomposition.
///
/// In the general path the block polynomials form the invariant-factor chain
/// (each divides the previous one). The verbatim fast path keeps whatever
/// block order the input carries.
pub fn frobenius_form(a: &MatGF) -> SimilarityForm {
    let p = a.field();
    let n = a.size();
    if let Some(blocks) = read_block_companion(a) {
        let id = MatGF::identity(p, n);
        return SimilarityForm { basis: id.clone(), basis_inv: id, blocks };
    }
    let mut blocks = Vec::new();
    let mut cols: Vec<Vec<u8>> = Vec::new();
    let mut m = a.clone();
    // columns of the current subspace in original coordinates
    let mut embed: Vec<Vec<u8>> = (0..n)
        .map(|i| {
            let mut v = vec![0u8; n];
            v[i] = 1;
            v
        })
        .collect();
    loop {
        let dim = m.size();
        if dim == 0 {
            break;
        }
        let (z, mu) = maximal_vector(&m);
        let (_, krylov) = krylov_closure(&m, &z);
        let d = krylov.len();
        for vec in &krylov {
            cols.push(embed_apply(p, &embed, vec));
        }
        blocks.push(CompanionBlock { poly: mu });
        if d == dim {
            break;
        }
        // Invariant complement: pick a functional y with y(M^t z) = [t = d-1];
        // then W = {x : y(M^t x) = 0, t < d} is M-invariant, meets the Krylov
        // space trivially (the pairing matrix is unit-antitriangular), and has
        // the complementary dimension.
        let mut rhs = vec![0u8; d];
        rhs[d - 1] = 1;
        let y = solve_rows(p, &krylov, dim, &rhs)
            .expect("Krylov vectors are independent");
        let mut dual_rows = Vec::with_capacity(d);
        let mut yr = y;
        for _ in 0..d {
            dual_rows.push(yr.clone());
            yr = m.vec_mat(&yr);
        }
        let w_basis = null_space_rows(p, &dual_rows, dim);
        assert_eq!(w_basis.len(), dim - d, "complement dimension");
        let restricted = restrict_to_basis(p, &m, &w_basis);
        embed = w_basis
            .iter()
            .map(|w| embed_apply(p, &embed, w))
            .collect();
        m = restricted;
    }
    let basis = MatGF::from_columns(p, &cols);
    let basis_inv = basis.inverse().expect("cyclic decomposition yields a basis");
    SimilarityForm { basis, basis_inv, blocks }
}

/// Basis columns of the cyclic pieces when the companion block of `chi`
/// splits along pairwise-coprime monic factors: the generator projected by
/// the complementary cofactors has each factor as its exact order, and the
/// Krylov chains concatenate to a basis. Returns S with
/// `S^{-1} * companion(chi) * S = block_diag(companion(factors[i]))`.
pub fn split_companion_multi(chi: &GfPoly, factors: &[GfPoly]) -> MatGF {
    let p = chi.field();
    let n = chi.degree().expect("positive degree");
    assert_eq!(
        factors.iter().map(|f| f.degree().unwrap_or(0)).sum::<usize>(),
        n,
        "factor degrees must sum to the block size"
    );
    let c = companion_matrix(chi);
    let mut z = vec![0u8; n];
    z[0] = 1;
    let mut cols: Vec<Vec<u8>> = Vec::with_capacity(n);
    for f in factors {
        let cofactor = chi.divmod(f).0;
        let zi = poly_apply_vec(&c, &cofactor, &z);
        let (order, krylov) = krylov_closure(&c, &zi);
        assert_eq!(&order, f, "projected generator must have the factor as order");
        cols.extend(krylov);
    }
    let s = MatGF::from_columns(p, &cols);
    debug_assert!(s.inverse().is_some());
    s
}

/// Sum of coords[j] * embed[j].
fn embed_apply(p: u8, embed: &[Vec<u8>], coords: &[u8]) -> Vec<u8> {
    let n = embed.first().map_or(0, Vec::len);
    let mut out = vec![0u8; n];
    for (j, &c) in coords.iter().enumerate() {
        if c != 0 {
            for (o, &e) in out.iter_mut().zip(&embed[j]) {
                *o = gf_add(p, *o, gf_mul(p, c, e));
            }
        }
    }
    out
}

/// Reduced row echelon form of an r x width system; returns (rows, pivots).
fn rref_rows(p: u8, rows: &[Vec<u8>], width: usize) -> (Vec<Vec<u8>>, Vec<usize>) {
    let mut m: Vec<Vec<u8>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..width {
        if row == m.len() {
            break;
        }
        let Some(pr) = (row..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(pr, row);
        let inv = gf_inv(p, m[row][col]);
        for x in m[row].iter_mut() {
            *x = gf_mul(p, *x, inv);
        }
        for r in 0..m.len() {
            if r != row && m[r][col] != 0 {
                let f = m[r][col];
                for j in 0..m[r].len() {
                    m[r][j] = gf_sub(p, m[r][j], gf_mul(p, f, m[row][j]));
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (m, pivots)
}

/// One solution of `rows * x = rhs` (free variables zero), or None.
fn solve_rows(p: u8, rows: &[Vec<u8>], ncols: usize, rhs: &[u8]) -> Option<Vec<u8>> {
    let aug: Vec<Vec<u8>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut v = r.clone();
            v.push(b);
            v
        })
        .collect();
    let (rref, pivots) = rref_rows(p, &aug, ncols + 1);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![0u8; ncols];
    for (i, &pc) in pivots.iter().enumerate() {
        x[pc] = rref[i][ncols];
    }
    Some(x)
}

/// Deterministic basis of `{x : rows * x = 0}`, free columns ascending.
fn null_space_rows(p: u8, rows: &[Vec<u8>], ncols: usize) -> Vec<Vec<u8>> {
    let (rref, pivots) = rref_rows(p, rows, ncols);
    let mut basis = Vec::new();
    for fc in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u8; ncols];
        v[fc] = 1;
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = gf_neg(p, rref[i][fc]);
        }
        basis.push(v);
    }
    basis
}

/// Matrix of M restricted to the span of an independent M-invariant basis.
fn restrict_to_basis(p: u8, m: &MatGF, basis: &[Vec<u8>]) -> MatGF {
    let dim = m.size();
    let k = basis.len();
    // rows of [B | M.B]; full column rank of B puts the coordinates of each
    // target straight into the pivot rows
    let targets: Vec<Vec<u8>> = basis.iter().map(|b| m.mat_vec(b)).collect();
    let rows: Vec<Vec<u8>> = (0..dim)
        .map(|i| {
            let mut r = Vec::with_capacity(2 * k);
            r.extend(basis.iter().map(|b| b[i]));
            r.extend(targets.iter().map(|t| t[i]));
            r
        })
        .collect();
    let (rref, pivots) = rref_rows(p, &rows, 2 * k);
    assert_eq!(&pivots[..k.min(pivots.len())], &(0..k).collect::<Vec<_>>()[..], "independent basis");
    let mut out = MatGF::zeros(p, k);
    for (i, row) in rref.iter().enumerate().take(k) {
        for j in 0..k {
            out.set(i, j, row[k + j]);
        }
    }
    out
}

/// Deterministic irreducible factorization of a nonzero polynomial, sorted
/// by (degree, coefficient encoding). The leading unit is dropped.
pub fn poly_factor(f: &GfPoly) -> Vec<(GfPoly, u32)> {
    assert!(!f.is_zero(), "cannot factor the zero polynomial");
    let monic = f.make_monic();
    let mut out: Vec<(GfPoly, u32)> = Vec::new();
    for (sf, mult) in squarefree_parts(&monic) {
        for irr in factor_squarefree(&sf) {
            out.push((irr, mult));
        }
    }
    out.sort_by_key(|(q, _)| (q.degree().unwrap_or(0), q.value_key()));
    out
}

fn derivative(f: &GfPoly) -> GfPoly {
    let p = f.field();
    let coeffs: Vec<u8> = f
        .coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| gf_mul(p, (i % p as usize) as u8, c))
        .collect();
    GfPoly::new(p, coeffs)
}

/// p-th root of a polynomial in x^p: over a prime field the coefficients are
/// fixed by Frobenius, so the root just reads every p-th coefficient.
fn p_th_root(f: &GfPoly) -> GfPoly {
    let p = f.field();
    let coeffs: Vec<u8> = f.coeffs().iter().step_by(p as usize).copied().collect();
    GfPoly::new(p, coeffs)
}

/// Pairwise-coprime squarefree parts with multiplicities:
/// `f = prod part^mult`. Characteristic-p variant of Yun's algorithm; the
/// vanishing-derivative branch strips p-th powers via [`p_th_root`].
fn squarefree_parts(f: &GfPoly) -> Vec<(GfPoly, u32)> {
    let p = u32::from(f.field());
    if f.is_one() {
        return Vec::new();
    }
    let df = derivative(f);
    if df.is_zero() {
        return squarefree_parts(&p_th_root(f))
            .into_iter()
            .map(|(g, m)| (g, m * p))
            .collect();
    }
    let mut out = Vec::new();
    let mut c = f.gcd(&df);
    let mut w = f.divmod(&c).0;
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.divmod(&y).0;
        if !z.is_one() {
            out.push((z, i));
        }
        c = c.divmod(&y).0;
        w = y;
        i += 1;
    }
    if !c.is_one() {
        for (g, m) in squarefree_parts(&p_th_root(&c)) {
            out.push((g, m * p));
        }
    }
    out
}

fn frobenius_pow(h: &GfPoly, modulus: &GfPoly) -> GfPoly {
    let p = h.field();
    let sq = h.mul(h).rem(modulus);
    if p == 2 {
        sq
    } else {
        sq.mul(h).rem(modulus)
    }
}

/// Distinct irreducible factors of a squarefree monic polynomial.
fn factor_squarefree(f: &GfPoly) -> Vec<GfPoly> {
    let p = f.field();
    let mut out = Vec::new();
    let mut rest = f.make_monic();
    if rest.is_one() {
        return out;
    }
    let x = GfPoly::monomial(p, 1);
    let mut h = x.rem(&rest);
    let mut d = 0usize;
    loop {
        let deg = match rest.degree() {
            Some(deg) if deg > 0 => deg,
            _ => break,
        };
        d += 1;
        if deg < 2 * d {
            out.push(rest);
            break;
        }
        h = frobenius_pow(&h, &rest);
        let g = rest.gcd(&h.sub(&x));
        if !g.is_one() {
            out.extend(split_equal_degree(&g, d));
            rest = rest.divmod(&g).0;
            h = h.rem(&rest);
        }
    }
    out
}

/// Split a squarefree product of distinct degree-d irreducibles. For each
/// basis power x^j the trace functional sum_{i<d} u^{p^i} reduces to a
/// scalar modulo every factor; two distinct factors disagree on some basis
/// power (traces are additive and onto), so scanning j and the p scalar
/// values always finds a proper split.
fn split_equal_degree(g: &GfPoly, d: usize) -> Vec<GfPoly> {
    let p = g.field();
    let deg = g.degree().expect("nonconstant");
    if deg == d {
        return vec![g.make_monic()];
    }
    for j in 1..deg {
        let u = GfPoly::monomial(p, j).rem(g);
        let mut frob = u.clone();
        let mut trace = u.clone();
        for _ in 1..d {
            frob = frobenius_pow(&frob, g);
            trace = trace.add(&frob);
        }
        for c in 0..p {
            let part = g.gcd(&trace.sub(&GfPoly::constant(p, c)));
            let pd = part.degree().unwrap_or(0);
            if pd > 0 && pd < deg {
                let other = g.divmod(&part).0;
                let mut out = split_equal_degree(&part, d);
                out.extend(split_equal_degree(&other, d));
                return out;
            }
        }
    }
    unreachable!("trace functionals separate distinct same-degree factors")
}
