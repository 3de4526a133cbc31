//! Canonical byte encoding for everything that gets hashed.
//!
//! Challenges, certificate hashes, and proof contexts all hash the same
//! bit-exact encoding: an ASCII domain tag, each integer as a 4-byte
//! big-endian length followed by its minimal big-endian magnitude (zero
//! encodes as length 0), and the message last, prefixed by an 8-byte
//! big-endian length. Any change here is a wire-format break, hence the
//! version in the tag.

use num_bigint::BigUint;
use num_traits::Zero;
use sha2::{Digest, Sha256};

use crate::numtheory;

const DOMAIN_PREFIX: &str = "GSSPCCD-v1-";

pub fn append_uint(buf: &mut Vec<u8>, v: &BigUint) {
    if v.is_zero() {
        buf.extend_from_slice(&0u32.to_be_bytes());
        return;
    }
    let mag = v.to_bytes_be();
    buf.extend_from_slice(&u32::try_from(mag.len()).expect("magnitude fits u32").to_be_bytes());
    buf.extend_from_slice(&mag);
}

pub fn append_message(buf: &mut Vec<u8>, message: &[u8]) {
    buf.extend_from_slice(&(message.len() as u64).to_be_bytes());
    buf.extend_from_slice(message);
}

pub fn append_usize(buf: &mut Vec<u8>, v: usize) {
    append_uint(buf, &BigUint::from(v));
}

/// SHA-256 over `tag-context || ints || message`.
pub fn transcript_digest(context: &str, ints: &[&BigUint], message: &[u8]) -> [u8; 32] {
    let mut buf = Vec::new();
    buf.extend_from_slice(DOMAIN_PREFIX.as_bytes());
    buf.extend_from_slice(context.as_bytes());
    for v in ints {
        append_uint(&mut buf, v);
    }
    append_message(&mut buf, message);
    Sha256::digest(&buf).into()
}

/// First `bits` bits of the digest, big-endian. `bits` must be in 1..=256.
pub fn truncate_to_bits(digest: &[u8; 32], bits: u32) -> BigUint {
    debug_assert!((1..=256).contains(&bits));
    let nbytes = bits.div_ceil(8) as usize;
    let v = BigUint::from_bytes_be(&digest[..nbytes]);
    v >> (nbytes as u32 * 8 - bits)
}

/// Full-domain hash onto the units of Z_n: hash `tag || payload || counter`
/// and reduce mod n, incrementing the counter until the result is coprime
/// to n. Landing on a non-unit of an RSA modulus is as hard as factoring,
/// so the loop all but never iterates.
pub fn fdh_to_unit(n: &BigUint, context: &str, payload: &[u8]) -> BigUint {
    let mut counter: u64 = 0;
    loop {
        let mut buf = Vec::with_capacity(payload.len() + 64);
        buf.extend_from_slice(DOMAIN_PREFIX.as_bytes());
        buf.extend_from_slice(context.as_bytes());
        buf.extend_from_slice(payload);
        append_uint(&mut buf, &BigUint::from(counter));
        let v = BigUint::from_bytes_be(&Sha256::digest(&buf)) % n;
        if !v.is_zero() && numtheory::gcd(&v, n) == BigUint::from(1u32) {
            return v;
        }
        counter += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uint_encoding_is_length_prefixed_minimal_magnitude() {
        let mut buf = Vec::new();
        append_uint(&mut buf, &BigUint::from(0u32));
        assert_eq!(buf, [0, 0, 0, 0]);

        buf.clear();
        append_uint(&mut buf, &BigUint::from(187u32));
        assert_eq!(buf, [0, 0, 0, 1, 187]);

        buf.clear();
        append_uint(&mut buf, &BigUint::from(0x1234u32));
        assert_eq!(buf, [0, 0, 0, 2, 0x12, 0x34]);
    }

    #[test]
    fn message_encoding_uses_eight_byte_length() {
        let mut buf = Vec::new();
        append_message(&mut buf, b"hi");
        assert_eq!(buf, [0, 0, 0, 0, 0, 0, 0, 2, b'h', b'i']);
    }

    #[test]
    fn truncation_keeps_leading_bits() {
        let mut digest = [0u8; 32];
        digest[0] = 0b1011_0110;
        let c = truncate_to_bits(&digest, 6);
        assert_eq!(c, BigUint::from(0b101101u32));
        let c = truncate_to_bits(&digest, 8);
        assert_eq!(c, BigUint::from(0b1011_0110u32));
    }

    #[test]
    fn transcript_digest_separates_contexts_and_fields() {
        let a = BigUint::from(5u32);
        let b = BigUint::from(6u32);
        let d1 = transcript_digest("x", &[&a, &b], b"m");
        assert_ne!(d1, transcript_digest("y", &[&a, &b], b"m"));
        assert_ne!(d1, transcript_digest("x", &[&b, &a], b"m"));
        assert_ne!(d1, transcript_digest("x", &[&a, &b], b"n"));
        assert_eq!(d1, transcript_digest("x", &[&a, &b], b"m"));
    }

    #[test]
    fn fdh_outputs_are_units_and_deterministic() {
        let n = BigUint::from(187u32);
        for i in 0..100u32 {
            let payload = i.to_be_bytes();
            let v = fdh_to_unit(&n, "t", &payload);
            assert!(!v.is_zero() && v < n);
            assert_eq!(crate::numtheory::gcd(&v, &n), BigUint::from(1u32));
            assert_eq!(v, fdh_to_unit(&n, "t", &payload));
        }
    }
}
