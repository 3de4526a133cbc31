//! Group signatures: sign, verify, open, link.
//!
//! A signature is the member's public tuple in clear plus one e-th-root
//! proof per coordinate, AND-composed under a single Fiat-Shamir challenge:
//! all commitments are produced first, one challenge binds the statement,
//! every commitment and the message, and each coordinate answers that same
//! challenge. Verification needs nothing but the group public key.
//!
//! Because the tuple rides along in clear, two signatures by one member are
//! trivially linkable, and the manager's open is a registry lookup. That is
//! the anonymity trade this scheme makes for manager-free deny proofs.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::RngCore;

use crate::enrollment::{open_lookup, MemberCredential, MemberId, Registry};
use crate::error::{Error, Result};
use crate::grouppk::{linear_check, GroupPublicKey, PublicTuple};
use crate::numtheory::{self, sample_unit};
use crate::spk::ChallengeOracle;

pub(crate) const CTX_GSIG: &str = "gsig";

/// Detached group signature over some message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSignature {
    pub tuple: PublicTuple,
    pub commitments: Vec<BigUint>,
    pub responses: Vec<BigUint>,
    pub challenge: BigUint,
}

/// Why a signature failed verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reject {
    Arity,
    NotUnit,
    LinearCheck,
    ChallengeMismatch,
    Relation { coordinate: usize },
}

impl std::fmt::Display for Reject {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Reject::Arity => write!(f, "field counts do not match the key"),
            Reject::NotUnit => write!(f, "a value is out of range or shares a factor with n"),
            Reject::LinearCheck => write!(f, "tuple fails the linearized public-key equation"),
            Reject::ChallengeMismatch => write!(f, "challenge does not match the transcript hash"),
            Reject::Relation { coordinate } => {
                write!(f, "verification equation fails at coordinate {}", coordinate + 1)
            }
        }
    }
}

fn shared_challenge(
    pk: &GroupPublicKey,
    tuple: &PublicTuple,
    commitments: &[BigUint],
    message: &[u8],
    oracle: &ChallengeOracle,
) -> BigUint {
    let k_big = BigUint::from(pk.k);
    let mut ints: Vec<&BigUint> = Vec::with_capacity(2 + 3 * pk.k);
    ints.push(&pk.n);
    ints.push(&k_big);
    ints.extend(pk.exps.iter());
    ints.extend(tuple.values().iter());
    ints.extend(commitments.iter());
    oracle.challenge(CTX_GSIG, &ints, message)
}

/// Sign `message` with a member credential.
pub fn sign<R: RngCore + ?Sized>(
    pk: &GroupPublicKey,
    cred: &MemberCredential,
    message: &[u8],
    oracle: &ChallengeOracle,
    rng: &mut R,
) -> Result<GroupSignature> {
    let mut nonces = Vec::with_capacity(pk.k);
    for _ in 0..pk.k {
        nonces.push(sample_unit(rng, &pk.n)?);
    }
    sign_with_nonces(pk, cred, message, oracle, &nonces)
}

/// As [`sign`], with one caller-supplied commitment nonce per coordinate.
/// Exists for deterministic reproduction; nonces must never repeat.
pub fn sign_with_nonces(
    pk: &GroupPublicKey,
    cred: &MemberCredential,
    message: &[u8],
    oracle: &ChallengeOracle,
    nonces: &[BigUint],
) -> Result<GroupSignature> {
    cred.validate(pk)?;
    if nonces.len() != pk.k {
        return Err(Error::InvalidParameter(format!(
            "expected {} nonces, got {}",
            pk.k,
            nonces.len()
        )));
    }
    for r in nonces {
        if r.is_zero() || *r >= pk.n || !numtheory::gcd(r, &pk.n).is_one() {
            return Err(Error::InvalidParameter("nonce is not a unit".into()));
        }
    }
    let commitments: Vec<BigUint> = nonces
        .iter()
        .zip(&pk.exps)
        .map(|(r, e)| r.modpow(e, &pk.n))
        .collect();
    let challenge = shared_challenge(pk, &cred.public, &commitments, message, oracle);
    let responses: Vec<BigUint> = cred
        .secret
        .values()
        .iter()
        .zip(nonces)
        .map(|(x, r)| x.modpow(&challenge, &pk.n) * r % &pk.n)
        .collect();
    Ok(GroupSignature {
        tuple: cred.public.clone(),
        commitments,
        responses,
        challenge,
    })
}

/// Verify and report the first failing check. [`verify`] is the boolean
/// view of this.
pub fn check(
    pk: &GroupPublicKey,
    message: &[u8],
    sig: &GroupSignature,
    oracle: &ChallengeOracle,
) -> std::result::Result<(), Reject> {
    if sig.tuple.len() != pk.k
        || sig.commitments.len() != pk.k
        || sig.responses.len() != pk.k
    {
        return Err(Reject::Arity);
    }
    let unit = |v: &BigUint| !v.is_zero() && *v < pk.n && numtheory::gcd(v, &pk.n).is_one();
    if !sig
        .tuple
        .values()
        .iter()
        .chain(&sig.commitments)
        .chain(&sig.responses)
        .all(unit)
    {
        return Err(Reject::NotUnit);
    }
    if !linear_check(pk, &sig.tuple).expect("arity and range were checked") {
        return Err(Reject::LinearCheck);
    }
    if shared_challenge(pk, &sig.tuple, &sig.commitments, message, oracle) != sig.challenge {
        return Err(Reject::ChallengeMismatch);
    }
    for (coordinate, ((e, cap_x), (t, cap_t))) in pk
        .exps
        .iter()
        .zip(sig.tuple.values())
        .zip(sig.responses.iter().zip(&sig.commitments))
        .enumerate()
    {
        if t.modpow(e, &pk.n) != cap_x.modpow(&sig.challenge, &pk.n) * cap_t % &pk.n {
            return Err(Reject::Relation { coordinate });
        }
    }
    Ok(())
}

pub fn verify(
    pk: &GroupPublicKey,
    message: &[u8],
    sig: &GroupSignature,
    oracle: &ChallengeOracle,
) -> bool {
    check(pk, message, sig, oracle).is_ok()
}

/// Resolve the signer through the registry. The signature's tuple is its
/// opening handle; no secret key is involved in the basic scheme.
pub fn open<'a>(registry: &'a Registry, sig: &GroupSignature) -> Option<&'a MemberId> {
    open_lookup(registry, &sig.tuple)
}

/// Two signatures link exactly when they carry the same member tuple.
pub fn link(a: &GroupSignature, b: &GroupSignature) -> bool {
    a.tuple == b.tuple
}
