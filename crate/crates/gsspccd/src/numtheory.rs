//! Arbitrary-precision modular arithmetic and prime generation.
//!
//! Everything here is exact integer arithmetic on non-negative residues;
//! signed values appear only inside the extended Euclidean algorithm. None
//! of this is constant-time — the crate targets desk-scale parameters, not
//! hardened deployments.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Below this bound the Miller-Rabin witness set {2,3,5,7,11,13,17} is
/// deterministic (no strong pseudoprime to all seven exists under it).
const MR_DETERMINISTIC_BOUND: u64 = 341_550_071_728_321;
const MR_SMALL_WITNESSES: [u32; 7] = [2, 3, 5, 7, 11, 13, 17];

/// Trial-division pre-filter for prime generation.
const SMALL_PRIMES: [u32; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
];

/// base^exponent mod modulus.
pub fn mod_pow(base: &BigUint, exponent: &BigUint, modulus: &BigUint) -> Result<BigUint> {
    if *modulus < BigUint::from(2u32) {
        return Err(Error::InvalidParameter(format!(
            "mod_pow requires modulus >= 2, got {modulus}"
        )));
    }
    Ok(base.modpow(exponent, modulus))
}

/// Extended gcd: returns (g, u, v) with u*a + v*b = g = gcd(a, b).
pub fn egcd(a: &BigUint, b: &BigUint) -> Result<(BigUint, BigInt, BigInt)> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::InvalidParameter(
            "egcd(0, 0) is undefined".to_string(),
        ));
    }
    let ext = BigInt::from(a.clone()).extended_gcd(&BigInt::from(b.clone()));
    let g = ext
        .gcd
        .to_biguint()
        .expect("gcd of non-negative inputs is non-negative");
    Ok((g, ext.x, ext.y))
}

/// Inverse of `a` modulo `modulus`. Fails with the offending gcd when the
/// inputs are not coprime.
pub fn mod_inv(a: &BigUint, modulus: &BigUint) -> Result<BigUint> {
    if *modulus < BigUint::from(2u32) {
        return Err(Error::InvalidParameter(format!(
            "mod_inv requires modulus >= 2, got {modulus}"
        )));
    }
    let (g, u, _) = egcd(&(a % modulus), modulus)?;
    if !g.is_one() {
        return Err(Error::NotInvertible { gcd: g });
    }
    let m = BigInt::from(modulus.clone());
    let r = ((u % &m) + &m) % &m;
    Ok(r.to_biguint().expect("reduced residue is non-negative"))
}

/// base^exponent mod modulus for signed exponents; base must be a unit when
/// the exponent is negative.
pub(crate) fn mod_pow_signed(base: &BigUint, exponent: &BigInt, modulus: &BigUint) -> Result<BigUint> {
    let mag = exponent.magnitude().clone();
    if exponent.is_negative() {
        let inv = mod_inv(base, modulus)?;
        mod_pow(&inv, &mag, modulus)
    } else {
        mod_pow(base, &mag, modulus)
    }
}

/// Miller-Rabin primality test.
///
/// Composite verdicts are certain. For candidates below 3.4e14 a fixed
/// witness set makes the answer exact; above it, `rounds` witnesses are
/// derived deterministically from the candidate by counter hashing, keeping
/// the function pure while bounding the error by 4^-rounds.
pub fn is_probable_prime(n: &BigUint, rounds: u32) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for p in SMALL_PRIMES {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }

    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().expect("n > 2 is odd here");
    let d = &n_minus_1 >> s;

    let passes = |a: &BigUint| -> bool {
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            return true;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                return true;
            }
        }
        false
    };

    if let Some(small) = n.to_u64_digits().first().copied().filter(|_| n.bits() <= 64) {
        if small < MR_DETERMINISTIC_BOUND {
            return MR_SMALL_WITNESSES
                .iter()
                .map(|w| BigUint::from(*w))
                .filter(|w| *w < n_minus_1)
                .all(|w| passes(&w));
        }
    }

    let rounds = rounds.max(1);
    let span = n - 3u32; // witnesses in [2, n-2]
    for i in 0..rounds {
        let mut h = Sha256::new();
        h.update(b"gsspccd-mr-witness");
        h.update(n.to_bytes_be());
        h.update(u64::from(i).to_be_bytes());
        let a = BigUint::from_bytes_be(&h.finalize()) % &span + 2u32;
        if !passes(&a) {
            return false;
        }
    }
    true
}

/// Uniform value in [0, bound) by rejection sampling on the top bit-length.
pub fn rand_below<R: RngCore + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero(), "rand_below bound must be positive");
    let bits = bound.bits();
    let nbytes = bits.div_ceil(8) as usize;
    let excess = (nbytes as u64 * 8 - bits) as u32;
    let mut buf = vec![0u8; nbytes];
    loop {
        rng.fill_bytes(&mut buf);
        buf[0] &= 0xffu8 >> excess;
        let v = BigUint::from_bytes_be(&buf);
        if v < *bound {
            return v;
        }
    }
}

/// Uniform unit of Z_modulus, i.e. an element of [1, modulus) coprime to the
/// modulus. Rejection sampling; for an RSA modulus almost every draw is
/// accepted.
pub fn sample_unit<R: RngCore + ?Sized>(rng: &mut R, modulus: &BigUint) -> Result<BigUint> {
    if *modulus < BigUint::from(2u32) {
        return Err(Error::InvalidParameter(format!(
            "sample_unit requires modulus >= 2, got {modulus}"
        )));
    }
    loop {
        let v = rand_below(rng, modulus);
        if !v.is_zero() && v.gcd(modulus).is_one() {
            return Ok(v);
        }
    }
}

/// Random prime of exactly `bits` bits (top bit set), vetted by
/// `is_probable_prime` with 40 rounds.
pub fn gen_prime<R: RngCore + ?Sized>(rng: &mut R, bits: u64) -> Result<BigUint> {
    if bits < 4 {
        return Err(Error::InvalidParameter(format!(
            "gen_prime requires bits >= 4, got {bits}"
        )));
    }
    let budget = 40 * bits.max(64);
    let nbytes = bits.div_ceil(8) as usize;
    let excess = (nbytes as u64 * 8 - bits) as u32;
    let mut buf = vec![0u8; nbytes];
    for _ in 0..budget {
        rng.fill_bytes(&mut buf);
        buf[0] &= 0xffu8 >> excess;
        buf[0] |= 0x80u8 >> excess; // top bit: exact bit length
        buf[nbytes - 1] |= 1; // odd
        let candidate = BigUint::from_bytes_be(&buf);
        if is_probable_prime(&candidate, 40) {
            return Ok(candidate);
        }
    }
    Err(Error::GenerationFailed(format!(
        "no {bits}-bit prime found within {budget} attempts"
    )))
}

/// gcd for callers outside this module that want to avoid the num-integer
/// trait import.
pub fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    a.gcd(b)
}

pub(crate) fn to_biguint_exact(v: &BigInt) -> Option<BigUint> {
    match v.sign() {
        Sign::Minus => None,
        _ => v.to_biguint(),
    }
}
