//! Group setup: the RSA modulus, the random linear public-key polynomial in
//! powered coordinates, and the manager trapdoor.
//!
//! The public key fixes a relation a_0 + a_1*X_1 + ... + a_k*X_k = 0 (mod n)
//! over powered coordinates X_j = x_j^{e_j}. Holding the factors of n, the
//! manager can extract e_j-th roots and hand members solutions in the x_j;
//! everyone else can only check the relation.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::RngCore;

use crate::error::{Error, Result};
use crate::numtheory::{self, gen_prime, mod_inv, rand_below, sample_unit};

/// Public group key: modulus, polynomial coefficients a_0..a_k, public
/// exponents e_1..e_k, the certificate exponent, and the Fiat-Shamir
/// challenge width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPublicKey {
    pub n: BigUint,
    pub k: usize,
    pub coeffs: Vec<BigUint>,
    pub exps: Vec<BigUint>,
    pub cert_exp: BigUint,
    pub challenge_bits: u32,
}

/// Manager secret: the factors of n and the inverse exponents mod phi(n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSecretKey {
    pub p: BigUint,
    pub q: BigUint,
    pub phi: BigUint,
    pub inv_exps: Vec<BigUint>,
    pub d_cert: BigUint,
}

/// A member's published coordinates X_1..X_k, each a unit mod n, satisfying
/// the linearized public-key equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicTuple(Vec<BigUint>);

/// The matching secret roots x_1..x_k with x_j^{e_j} = X_j (mod n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretTuple(Vec<BigUint>);

impl PublicTuple {
    pub fn new(values: Vec<BigUint>) -> Self {
        PublicTuple(values)
    }

    pub fn values(&self) -> &[BigUint] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when no coordinate agrees with `other`. Registry uniqueness
    /// guarantees this for tuples of distinct members, which is what makes
    /// a denying proof meaningful.
    pub fn differs_in_every_coordinate(&self, other: &PublicTuple) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a != b)
    }
}

impl SecretTuple {
    pub fn new(values: Vec<BigUint>) -> Self {
        SecretTuple(values)
    }

    pub fn values(&self) -> &[BigUint] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl GroupPublicKey {
    /// Structural invariants checkable without the secret key. Run on
    /// every load from disk.
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidParameter(format!(
                "coordinate count must be >= 2, got {}",
                self.k
            )));
        }
        if self.n < BigUint::from(4u32) {
            return Err(Error::InvalidParameter("modulus too small".into()));
        }
        if self.coeffs.len() != self.k + 1 {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                self.k + 1,
                self.coeffs.len()
            )));
        }
        if self.exps.len() != self.k {
            return Err(Error::InvalidParameter(format!(
                "expected {} exponents, got {}",
                self.k,
                self.exps.len()
            )));
        }
        if self.coeffs[0] >= self.n {
            return Err(Error::InvalidParameter("a_0 out of range".into()));
        }
        for (j, a) in self.coeffs.iter().enumerate().skip(1) {
            if a.is_zero() || *a >= self.n {
                return Err(Error::InvalidParameter(format!("a_{j} out of range")));
            }
        }
        if !numtheory::gcd(&self.coeffs[self.k], &self.n).is_one() {
            return Err(Error::InvalidParameter(
                "leading coefficient must be invertible mod n".into(),
            ));
        }
        for e in self.exps.iter().chain([&self.cert_exp]) {
            if *e < BigUint::from(3u32) {
                return Err(Error::InvalidParameter("exponents must be >= 3".into()));
            }
        }
        if self.challenge_bits == 0 || self.challenge_bits > 256 {
            return Err(Error::InvalidParameter(
                "challenge_bits must be in 1..=256".into(),
            ));
        }
        Ok(())
    }
}

impl GroupSecretKey {
    /// Consistency of a secret key against its public key: correct
    /// factorization and exponent inverses.
    pub fn validate_against(&self, pk: &GroupPublicKey) -> Result<()> {
        if &self.p * &self.q != pk.n {
            return Err(Error::InvalidParameter(
                "secret factors do not multiply to the public modulus".into(),
            ));
        }
        if self.p == self.q {
            return Err(Error::InvalidParameter("factors must be distinct".into()));
        }
        let one = BigUint::one();
        if self.phi != (&self.p - &one) * (&self.q - &one) {
            return Err(Error::InvalidParameter("phi does not match factors".into()));
        }
        if self.inv_exps.len() != pk.k {
            return Err(Error::InvalidParameter(format!(
                "expected {} inverse exponents, got {}",
                pk.k,
                self.inv_exps.len()
            )));
        }
        for (e, d) in pk.exps.iter().zip(&self.inv_exps) {
            if e * d % &self.phi != one {
                return Err(Error::InvalidParameter(
                    "inverse exponent does not invert its exponent mod phi".into(),
                ));
            }
        }
        if &pk.cert_exp * &self.d_cert % &self.phi != one {
            return Err(Error::InvalidParameter(
                "certificate exponent inverse mismatch".into(),
            ));
        }
        Ok(())
    }
}

/// Generate a fresh group key pair.
///
/// Draws two distinct primes of half the modulus width, k distinct prime
/// exponents coprime to phi(n), and uniform polynomial coefficients with an
/// invertible leading term. Exponents are required to be wider than the
/// challenge so that challenge gaps stay below every e_j, which is what the
/// e-th-root extractor needs.
pub fn setup<R: RngCore + ?Sized>(
    k: usize,
    modulus_bits: u64,
    exponent_bits: u64,
    challenge_bits: u32,
    rng: &mut R,
) -> Result<(GroupPublicKey, GroupSecretKey)> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "coordinate count must be >= 2, got {k}"
        )));
    }
    if modulus_bits < 16 {
        return Err(Error::InvalidParameter(format!(
            "modulus_bits must be >= 16, got {modulus_bits}"
        )));
    }
    if exponent_bits < 2 {
        return Err(Error::InvalidParameter(format!(
            "exponent_bits must be >= 2, got {exponent_bits}"
        )));
    }
    if challenge_bits == 0 || challenge_bits > 256 {
        return Err(Error::InvalidParameter(
            "challenge_bits must be in 1..=256".into(),
        ));
    }
    if exponent_bits <= u64::from(challenge_bits) {
        return Err(Error::InvalidParameter(format!(
            "exponent_bits ({exponent_bits}) must exceed challenge_bits ({challenge_bits}) \
             so every exponent is larger than any challenge"
        )));
    }

    let half_bits = modulus_bits.div_ceil(2);
    let p = gen_prime(rng, half_bits)?;
    let q = {
        let mut q = gen_prime(rng, half_bits)?;
        let mut guard = 0;
        while q == p {
            q = gen_prime(rng, half_bits)?;
            guard += 1;
            if guard > 100 {
                return Err(Error::GenerationFailed(
                    "could not find a second distinct prime".into(),
                ));
            }
        }
        q
    };
    let n = &p * &q;
    let one = BigUint::one();
    let phi = (&p - &one) * (&q - &one);

    // k coordinate exponents plus one certificate exponent, all distinct
    // primes coprime to phi.
    let mut exps: Vec<BigUint> = Vec::with_capacity(k + 1);
    let mut tries = 0;
    while exps.len() < k + 1 {
        tries += 1;
        if tries > 200 * (k + 1) {
            return Err(Error::GenerationFailed(
                "could not find enough exponents coprime to phi".into(),
            ));
        }
        let e = gen_prime(rng, exponent_bits)?;
        if numtheory::gcd(&e, &phi).is_one() && !exps.contains(&e) {
            exps.push(e);
        }
    }
    let cert_exp = exps.pop().expect("k+1 exponents were drawn");
    let inv_exps = exps
        .iter()
        .map(|e| mod_inv(e, &phi))
        .collect::<Result<Vec<_>>>()?;
    let d_cert = mod_inv(&cert_exp, &phi)?;

    let mut coeffs = Vec::with_capacity(k + 1);
    coeffs.push(rand_below(rng, &n)); // a_0 may be zero
    for _ in 1..k {
        coeffs.push(rand_below(rng, &(&n - &one)) + &one);
    }
    coeffs.push(sample_unit(rng, &n)?); // a_k must be invertible

    let pk = GroupPublicKey {
        n,
        k,
        coeffs,
        exps,
        cert_exp,
        challenge_bits,
    };
    let sk = GroupSecretKey {
        p,
        q,
        phi,
        inv_exps,
        d_cert,
    };
    pk.validate()?;
    sk.validate_against(&pk)?;
    Ok((pk, sk))
}

/// a_0 + sum a_j * X_j = 0 (mod n) — the linearized public-key equation on
/// published coordinates.
pub fn linear_check(pk: &GroupPublicKey, tuple: &PublicTuple) -> Result<bool> {
    if tuple.len() != pk.k {
        return Err(Error::InvalidParameter(format!(
            "tuple has {} coordinates, key expects {}",
            tuple.len(),
            pk.k
        )));
    }
    if tuple.values().iter().any(|x| *x >= pk.n) {
        return Err(Error::InvalidParameter(
            "tuple coordinate out of range".into(),
        ));
    }
    let mut acc = pk.coeffs[0].clone();
    for (a, x) in pk.coeffs[1..].iter().zip(tuple.values()) {
        acc = (acc + a * x) % &pk.n;
    }
    Ok(acc.is_zero())
}

/// a_0 + sum a_j * x_j^{e_j} = 0 (mod n) — the full polynomial on secret
/// roots.
pub fn poly_check(pk: &GroupPublicKey, secrets: &SecretTuple) -> Result<bool> {
    if secrets.len() != pk.k {
        return Err(Error::InvalidParameter(format!(
            "secret tuple has {} coordinates, key expects {}",
            secrets.len(),
            pk.k
        )));
    }
    if secrets.values().iter().any(|x| *x >= pk.n) {
        return Err(Error::InvalidParameter(
            "secret coordinate out of range".into(),
        ));
    }
    let powered: Vec<BigUint> = secrets
        .values()
        .iter()
        .zip(&pk.exps)
        .map(|(x, e)| x.modpow(e, &pk.n))
        .collect();
    linear_check(pk, &PublicTuple::new(powered))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::rng::SeededRng;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn tuple(vals: &[u64]) -> PublicTuple {
        PublicTuple::new(vals.iter().map(|v| big(*v)).collect())
    }

    #[test]
    fn fixture_has_worked_example_inverse_exponents() {
        let (pk, sk) = fixture::paper();
        assert_eq!(pk.n, big(187));
        assert_eq!(sk.inv_exps, vec![big(107), big(37), big(23)]);
        sk.validate_against(&pk).unwrap();
    }

    #[test]
    fn linear_check_worked_example_tuple() {
        let (pk, _) = fixture::paper();
        assert!(linear_check(&pk, &tuple(&[112, 87, 169])).unwrap());
        assert!(!linear_check(&pk, &tuple(&[0, 0, 0])).unwrap());
    }

    #[test]
    fn linear_check_rejects_wrong_arity_and_range() {
        let (pk, _) = fixture::paper();
        assert!(linear_check(&pk, &tuple(&[1, 2])).is_err());
        assert!(linear_check(&pk, &tuple(&[187, 1, 1])).is_err());
    }

    #[test]
    fn poly_check_worked_example_secrets() {
        let (pk, _) = fixture::paper();
        let s = SecretTuple::new(vec![big(139), big(32), big(152)]);
        assert!(poly_check(&pk, &s).unwrap());
        let s = SecretTuple::new(vec![big(1), big(1), big(1)]);
        assert!(!poly_check(&pk, &s).unwrap()); // 3+7+12+19 = 41 != 0 mod 187
    }

    #[test]
    fn poly_check_agrees_with_linear_check_on_powered_tuples() {
        let (pk, _) = fixture::paper();
        let mut rng = SeededRng::from_u64(17);
        for _ in 0..100 {
            let secrets: Vec<BigUint> = (0..pk.k)
                .map(|_| sample_unit(&mut rng, &pk.n).unwrap())
                .collect();
            let powered: Vec<BigUint> = secrets
                .iter()
                .zip(&pk.exps)
                .map(|(x, e)| x.modpow(e, &pk.n))
                .collect();
            let via_poly = poly_check(&pk, &SecretTuple::new(secrets)).unwrap();
            let via_linear = linear_check(&pk, &PublicTuple::new(powered)).unwrap();
            assert_eq!(via_poly, via_linear);
        }
    }

    #[test]
    fn setup_rejects_bad_parameters() {
        let mut rng = SeededRng::from_u64(1);
        assert!(setup(1, 32, 12, 8, &mut rng).is_err());
        assert!(setup(2, 8, 12, 8, &mut rng).is_err());
        assert!(setup(2, 32, 8, 8, &mut rng).is_err()); // exponent width too small
        assert!(setup(2, 32, 12, 0, &mut rng).is_err());
    }

    #[test]
    fn setup_produces_consistent_keys() {
        let mut rng = SeededRng::from_u64(42);
        for k in [2usize, 3, 5] {
            let (pk, sk) = setup(k, 40, 12, 8, &mut rng).unwrap();
            assert_eq!(&sk.p * &sk.q, pk.n);
            assert_ne!(sk.p, sk.q);
            for (e, d) in pk.exps.iter().zip(&sk.inv_exps) {
                assert!(numtheory::gcd(e, &sk.phi).is_one());
                assert!((e * d % &sk.phi).is_one());
                assert!(*e > big(1u64 << 8)); // wider than the challenge space
            }
            let a_k = &pk.coeffs[pk.k];
            let inv = mod_inv(a_k, &pk.n).unwrap();
            assert!((a_k * inv % &pk.n).is_one());
            // distinct exponents
            for i in 0..pk.exps.len() {
                for j in i + 1..pk.exps.len() {
                    assert_ne!(pk.exps[i], pk.exps[j]);
                }
            }
        }
    }

    #[test]
    fn validate_catches_corrupted_keys() {
        let (pk, sk) = fixture::paper();
        let mut bad = pk.clone();
        bad.coeffs[3] = big(11); // gcd(11, 187) = 11
        assert!(bad.validate().is_err());

        let mut bad = pk.clone();
        bad.exps[0] = big(2);
        assert!(bad.validate().is_err());

        let mut bad_sk = sk.clone();
        bad_sk.inv_exps[0] = big(5);
        assert!(bad_sk.validate_against(&pk).is_err());
    }
}
