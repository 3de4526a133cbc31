//! Group signatures with member self-proof of authorship and
//! non-authorship.
//!
//! Any enrolled member can sign on behalf of the group and a verifier
//! learns nothing about which member signed — until a dispute. Then the
//! true signer can issue a *confirming proof* of authorship, and every
//! other member can issue a *denying proof* of non-authorship, both
//! verifiable offline with nothing but the group public key. The group
//! manager can additionally open any signature through its registry.
//!
//! The construction: the manager publishes an RSA modulus n and a linear
//! equation a_0 + sum a_j X_j = 0 (mod n) over powered coordinates
//! X_j = x_j^{e_j}. Enrollment hands a member a random solution tuple and
//! its e_j-th roots, extracted with the factorization trapdoor. A signature
//! reveals the tuple and proves knowledge of all roots with
//! Guillou-Quisquater-style proofs under one shared Fiat-Shamir challenge.
//! Re-signing under the contested tuple confirms authorship; signing under
//! one's own (coordinate-wise distinct, manager-certified) tuple denies it.
//! Repeating the tuple makes signatures by one member linkable — the
//! anonymity cost of keeping the manager out of the deny path. The
//! [`enhanced`] module adds per-signature commitments that restore
//! unlinkability for signatures, with manager-assisted tracing and denial.
//!
//! Not hardened: arithmetic is not constant-time and parameters are
//! desk-scale by design.

pub mod encoding;
pub mod enhanced;
pub mod enrollment;
pub mod error;
pub mod fixture;
pub mod formats;
pub mod grouppk;
pub mod gsig;
pub mod numtheory;
pub mod rng;
pub mod selfproof;
pub mod spk;

pub use error::{Error, Result};
