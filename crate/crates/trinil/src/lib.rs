//! Exact decomposition of square matrices over `Z/m`, `m = 2^k * 3^l`, into a
//! tripotent plus a nilpotent, with certificates a verifier can recheck from
//! scratch.
//!
//! The pipeline: split the input along the Chinese remainder isomorphism
//! `Z/m = Z/2^k x Z/3^l`, reduce each side to its prime field, bring the
//! reduction to block-companion form, split every companion block into a
//! tripotent (idempotent over GF(2)) plus a nilpotent by explicit
//! constructions, lift the field-level answer back to the prime-power ring by
//! Newton iteration, and recombine. Every stage is exact integer arithmetic;
//! nothing is floating point and nothing is probabilistic except one clearly
//! flagged fallback for a family of GF(2) blocks with no known closed form.
//!
//! Modules:
//! - [`zmod`]: moduli, scalar residues, scalar decomposition, CRT.
//! - [`matkit`]: dense matrices over `Z/m` and over GF(2)/GF(3).
//! - [`poly`]: dense polynomials over GF(2)/GF(3).
//! - [`canon`]: block-companion (rational canonical) form, coprime block
//!   splitting, polynomial factorization.
//! - [`fieldsplit`]: per-block tripotent + nilpotent constructions over the
//!   prime fields.
//! - [`lift`]: Newton idempotent lifting and the 3-adic tripotent lift.
//! - [`engine`]: the full pipeline, certificates, the verifier, triangular
//!   and batch entry points.
//! - [`lab`]: brute-force oracles and ring classifiers, kept independent of
//!   the engine so the two can check each other.
//!
//! The `parallel` feature (on by default) runs batch decomposition and the
//! classifier sweeps on a rayon pool; without it the same entry points run
//! sequentially. `*_seq` variants are always sequential so both paths can be
//! compared in one build.
//!
//! ```
//! use trinil::matkit::MatZ;
//! use trinil::{decompose, verify, Modulus};
//!
//! let m = Modulus::new(6).unwrap();
//! let a = MatZ::from_rows(m, &[&[1, 1], &[1, 0]]);
//! let cert = decompose(&a, 0).unwrap();
//! assert!(verify(&cert).ok);
//! let e3 = cert.e.checked_mul(&cert.e).unwrap().checked_mul(&cert.e).unwrap();
//! assert_eq!(e3, cert.e);
//! ```

pub mod canon;
pub mod engine;
pub mod fieldsplit;
pub mod lab;
pub mod lift;
pub mod matkit;
pub mod poly;
pub mod zmod;

pub use engine::{decompose, decompose_batch, verify, TrinilCertificate};
pub use zmod::Modulus;
