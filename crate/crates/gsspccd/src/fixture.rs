//! The built-in demonstration group.
//!
//! A deliberately tiny key pair — n = 187 = 11 * 17, the cubic/13th/7th
//! power coordinates, challenge width 6 — whose every intermediate value is
//! known and checked in the test suite. The exponents are far below the
//! challenge bound here, so extraction-based soundness does not hold: this
//! group exists for demonstration and golden tests, never for real use.
//!
//! The key files are embedded from `fixtures/` so the on-disk copies and
//! the built-in values cannot drift apart.

use crate::formats;
use crate::grouppk::{GroupPublicKey, GroupSecretKey};

pub const PAPER_PK_FILE: &str = include_str!("../fixtures/paper-pk.txt");
pub const PAPER_SK_FILE: &str = include_str!("../fixtures/paper-sk.txt");

/// The demonstration key pair.
pub fn paper() -> (GroupPublicKey, GroupSecretKey) {
    let pk = formats::parse_public_key(PAPER_PK_FILE).expect("embedded fixture key parses");
    let sk = formats::parse_secret_key(PAPER_SK_FILE).expect("embedded fixture key parses");
    sk.validate_against(&pk).expect("embedded fixture is consistent");
    (pk, sk)
}
