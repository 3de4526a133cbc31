//! Confirming and denying proofs for a contested group signature.
//!
//! Both proofs are fresh group signatures over a derived message that binds
//! the dispute: a purpose tag, the SHA-256 of the contested signature's
//! canonical serialization, and a verifier-chosen nonce. The binding stops
//! precomputation and replay — a proof speaks only about the exact
//! signature and challenge nonce it was built for.
//!
//! A confirming proof re-signs under the contested tuple, which only the
//! holder of its secret roots can do. A denying proof signs under the
//! prover's own tuple, which registry policy guarantees differs from the
//! contested one in every coordinate, and ships the manager certificate
//! binding that tuple to the prover's identity.

use num_bigint::BigUint;
use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::enrollment::{verify_certificate, MemberCredential, MemberId};
use crate::error::{Error, Result};
use crate::formats;
use crate::grouppk::GroupPublicKey;
use crate::gsig::{self, GroupSignature};
use crate::spk::ChallengeOracle;

const CONFIRM_TAG: &[u8] = b"GSSPCCD-v1-confirm-proof";
const DENY_TAG: &[u8] = b"GSSPCCD-v1-deny-proof";

/// Minimum verifier nonce length outside forced-challenge test runs.
pub const MIN_NONCE_LEN: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProofPurpose {
    Confirm,
    Deny,
}

/// What a self-proof is about: which signature, which challenge nonce,
/// which direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofContext {
    pub contested_digest: [u8; 32],
    pub nonce: Vec<u8>,
    pub purpose: ProofPurpose,
}

impl ProofContext {
    pub fn new(contested: &GroupSignature, nonce: &[u8], purpose: ProofPurpose) -> Self {
        ProofContext {
            contested_digest: signature_digest(contested),
            nonce: nonce.to_vec(),
            purpose,
        }
    }

    /// The message the fresh signature actually signs.
    pub fn message(&self) -> Vec<u8> {
        let tag = match self.purpose {
            ProofPurpose::Confirm => CONFIRM_TAG,
            ProofPurpose::Deny => DENY_TAG,
        };
        let mut m = Vec::with_capacity(tag.len() + 32 + self.nonce.len());
        m.extend_from_slice(tag);
        m.extend_from_slice(&self.contested_digest);
        m.extend_from_slice(&self.nonce);
        m
    }
}

/// SHA-256 of the signature's canonical file bytes.
pub fn signature_digest(sig: &GroupSignature) -> [u8; 32] {
    Sha256::digest(formats::signature_to_string(sig).as_bytes()).into()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfirmProof {
    pub context: ProofContext,
    pub fresh_sig: GroupSignature,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenyProof {
    pub context: ProofContext,
    pub fresh_sig: GroupSignature,
    pub prover_id: MemberId,
    pub certificate: BigUint,
}

/// Why a self-proof failed verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reject {
    NonceTooShort,
    WrongPurpose,
    DigestMismatch,
    NonceMismatch,
    TupleMismatch,
    FreshSignature(gsig::Reject),
    Certificate,
}

impl std::fmt::Display for Reject {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Reject::NonceTooShort => write!(f, "nonce shorter than {MIN_NONCE_LEN} bytes"),
            Reject::WrongPurpose => write!(f, "proof purpose does not match"),
            Reject::DigestMismatch => write!(f, "proof is bound to a different signature"),
            Reject::NonceMismatch => write!(f, "proof is bound to a different nonce"),
            Reject::TupleMismatch => write!(f, "fresh tuple does not relate to the contested one"),
            Reject::FreshSignature(r) => write!(f, "fresh signature invalid: {r}"),
            Reject::Certificate => write!(f, "prover certificate does not verify"),
        }
    }
}

fn check_nonce(nonce: &[u8], oracle: &ChallengeOracle) -> Result<()> {
    if nonce.is_empty() {
        return Err(Error::InvalidParameter("nonce must not be empty".into()));
    }
    if !oracle.is_forced() && nonce.len() < MIN_NONCE_LEN {
        return Err(Error::InvalidParameter(format!(
            "nonce must be at least {MIN_NONCE_LEN} bytes, got {}",
            nonce.len()
        )));
    }
    Ok(())
}

/// Prove authorship of `contested` by re-signing under its tuple.
pub fn make_confirm<R: RngCore + ?Sized>(
    pk: &GroupPublicKey,
    cred: &MemberCredential,
    contested: &GroupSignature,
    nonce: &[u8],
    oracle: &ChallengeOracle,
    rng: &mut R,
) -> Result<ConfirmProof> {
    check_nonce(nonce, oracle)?;
    if cred.public != contested.tuple {
        return Err(Error::NotTheSigner);
    }
    let context = ProofContext::new(contested, nonce, ProofPurpose::Confirm);
    let fresh_sig = gsig::sign(pk, cred, &context.message(), oracle, rng)?;
    Ok(ConfirmProof { context, fresh_sig })
}

pub fn check_confirm(
    pk: &GroupPublicKey,
    contested: &GroupSignature,
    proof: &ConfirmProof,
    nonce: &[u8],
    oracle: &ChallengeOracle,
) -> std::result::Result<(), Reject> {
    if !oracle.is_forced() && nonce.len() < MIN_NONCE_LEN {
        return Err(Reject::NonceTooShort);
    }
    if proof.context.purpose != ProofPurpose::Confirm {
        return Err(Reject::WrongPurpose);
    }
    if proof.context.contested_digest != signature_digest(contested) {
        return Err(Reject::DigestMismatch);
    }
    if proof.context.nonce != nonce {
        return Err(Reject::NonceMismatch);
    }
    if proof.fresh_sig.tuple != contested.tuple {
        return Err(Reject::TupleMismatch);
    }
    gsig::check(pk, &proof.context.message(), &proof.fresh_sig, oracle)
        .map_err(Reject::FreshSignature)
}

pub fn verify_confirm(
    pk: &GroupPublicKey,
    contested: &GroupSignature,
    proof: &ConfirmProof,
    nonce: &[u8],
    oracle: &ChallengeOracle,
) -> bool {
    check_confirm(pk, contested, proof, nonce, oracle).is_ok()
}

/// Prove non-authorship of `contested` by signing under the prover's own
/// tuple. Fails with `CannotDeny` when any coordinate coincides — under
/// registry uniqueness that identifies the prover as the signer.
pub fn make_deny<R: RngCore + ?Sized>(
    pk: &GroupPublicKey,
    cred: &MemberCredential,
    contested: &GroupSignature,
    nonce: &[u8],
    oracle: &ChallengeOracle,
    rng: &mut R,
) -> Result<DenyProof> {
    check_nonce(nonce, oracle)?;
    if cred.public.len() != contested.tuple.len() {
        return Err(Error::InvalidParameter(
            "contested signature arity does not match the key".into(),
        ));
    }
    if !cred.public.differs_in_every_coordinate(&contested.tuple) {
        return Err(Error::CannotDeny(
            "a tuple coordinate matches the contested signature; \
             only the signer's credential can do that"
                .into(),
        ));
    }
    let context = ProofContext::new(contested, nonce, ProofPurpose::Deny);
    let fresh_sig = gsig::sign(pk, cred, &context.message(), oracle, rng)?;
    Ok(DenyProof {
        context,
        fresh_sig,
        prover_id: cred.member_id.clone(),
        certificate: cred.certificate.clone(),
    })
}

pub fn check_deny(
    pk: &GroupPublicKey,
    contested: &GroupSignature,
    proof: &DenyProof,
    nonce: &[u8],
    oracle: &ChallengeOracle,
) -> std::result::Result<(), Reject> {
    if !oracle.is_forced() && nonce.len() < MIN_NONCE_LEN {
        return Err(Reject::NonceTooShort);
    }
    if proof.context.purpose != ProofPurpose::Deny {
        return Err(Reject::WrongPurpose);
    }
    if proof.context.contested_digest != signature_digest(contested) {
        return Err(Reject::DigestMismatch);
    }
    if proof.context.nonce != nonce {
        return Err(Reject::NonceMismatch);
    }
    if !proof
        .fresh_sig
        .tuple
        .differs_in_every_coordinate(&contested.tuple)
    {
        return Err(Reject::TupleMismatch);
    }
    if !verify_certificate(pk, &proof.prover_id, &proof.fresh_sig.tuple, &proof.certificate) {
        return Err(Reject::Certificate);
    }
    gsig::check(pk, &proof.context.message(), &proof.fresh_sig, oracle)
        .map_err(Reject::FreshSignature)
}

pub fn verify_deny(
    pk: &GroupPublicKey,
    contested: &GroupSignature,
    proof: &DenyProof,
    nonce: &[u8],
    oracle: &ChallengeOracle,
) -> bool {
    check_deny(pk, contested, proof, nonce, oracle).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enrollment::{issue_credential, Registry};
    use crate::grouppk::setup;
    use crate::rng::SeededRng;

    struct Group {
        pk: GroupPublicKey,
        creds: Vec<MemberCredential>,
    }

    fn small_group(members: usize, seed: u64) -> (Group, SeededRng) {
        let mut rng = SeededRng::from_u64(seed);
        let (pk, sk) = setup(3, 48, 14, 12, &mut rng).unwrap();
        let mut reg = Registry::new();
        let creds = (0..members)
            .map(|i| {
                let id = MemberId::new(&format!("m{i}")).unwrap();
                issue_credential(&pk, &sk, &id, &mut reg, &mut rng).unwrap()
            })
            .collect();
        (Group { pk, creds }, rng)
    }

    const NONCE: &[u8] = b"0123456789abcdef";

    #[test]
    fn confirm_roundtrip() {
        let (g, mut rng) = small_group(2, 51);
        let oracle = ChallengeOracle::for_key(&g.pk);
        let sig = gsig::sign(&g.pk, &g.creds[0], b"msg", &oracle, &mut rng).unwrap();
        let proof = make_confirm(&g.pk, &g.creds[0], &sig, NONCE, &oracle, &mut rng).unwrap();
        assert!(verify_confirm(&g.pk, &sig, &proof, NONCE, &oracle));
    }

    #[test]
    fn non_signer_cannot_build_confirm() {
        let (g, mut rng) = small_group(2, 53);
        let oracle = ChallengeOracle::for_key(&g.pk);
        let sig = gsig::sign(&g.pk, &g.creds[0], b"msg", &oracle, &mut rng).unwrap();
        let err = make_confirm(&g.pk, &g.creds[1], &sig, NONCE, &oracle, &mut rng);
        assert!(matches!(err, Err(Error::NotTheSigner)));
    }

    #[test]
    fn distinct_nonces_give_distinct_valid_proofs() {
        let (g, mut rng) = small_group(1, 55);
        let oracle = ChallengeOracle::for_key(&g.pk);
        let sig = gsig::sign(&g.pk, &g.creds[0], b"msg", &oracle, &mut rng).unwrap();
        let n2: &[u8] = b"fedcba9876543210";
        let p1 = make_confirm(&g.pk, &g.creds[0], &sig, NONCE, &oracle, &mut rng).unwrap();
        let p2 = make_confirm(&g.pk, &g.creds[0], &sig, n2, &oracle, &mut rng).unwrap();
        assert_ne!(p1, p2);
        assert!(verify_confirm(&g.pk, &sig, &p1, NONCE, &oracle));
        assert!(verify_confirm(&g.pk, &sig, &p2, n2, &oracle));
        // and neither verifies under the other's nonce
        assert!(!verify_confirm(&g.pk, &sig, &p1, n2, &oracle));
        assert!(!verify_confirm(&g.pk, &sig, &p2, NONCE, &oracle));
    }

    #[test]
    fn contested_signature_is_not_its_own_confirm_proof() {
        let (g, mut rng) = small_group(1, 57);
        let oracle = ChallengeOracle::for_key(&g.pk);
        let sig = gsig::sign(&g.pk, &g.creds[0], b"msg", &oracle, &mut rng).unwrap();
        let replayed = ConfirmProof {
            context: ProofContext::new(&sig, NONCE, ProofPurpose::Confirm),
            fresh_sig: sig.clone(),
        };
        // context fields match, but the embedded signature signs the
        // original message, not the derived proof message
        assert_eq!(
            check_confirm(&g.pk, &sig, &replayed, NONCE, &oracle),
            Err(Reject::FreshSignature(gsig::Reject::ChallengeMismatch))
        );
    }

    #[test]
    fn confirm_rejects_foreign_tuple() {
        let (g, mut rng) = small_group(2, 59);
        let oracle = ChallengeOracle::for_key(&g.pk);
        let sig = gsig::sign(&g.pk, &g.creds[0], b"msg", &oracle, &mut rng).unwrap();
        let proof = make_confirm(&g.pk, &g.creds[0], &sig, NONCE, &oracle, &mut rng).unwrap();
        let other_sig = gsig::sign(&g.pk, &g.creds[1], b"msg", &oracle, &mut rng).unwrap();
        let mut forged = proof.clone();
        forged.fresh_sig = other_sig;
        assert_eq!(
            check_confirm(&g.pk, &sig, &forged, NONCE, &oracle),
            Err(Reject::TupleMismatch)
        );
    }

    #[test]
    fn deny_roundtrip_and_signer_rejection() {
        let (g, mut rng) = small_group(3, 61);
        let oracle = ChallengeOracle::for_key(&g.pk);
        let sig = gsig::sign(&g.pk, &g.creds[0], b"msg", &oracle, &mut rng).unwrap();

        // both non-signers can deny, independently
        let d1 = make_deny(&g.pk, &g.creds[1], &sig, NONCE, &oracle, &mut rng).unwrap();
        let d2 = make_deny(&g.pk, &g.creds[2], &sig, NONCE, &oracle, &mut rng).unwrap();
        assert!(verify_deny(&g.pk, &sig, &d1, NONCE, &oracle));
        assert!(verify_deny(&g.pk, &sig, &d2, NONCE, &oracle));
        assert_ne!(d1.prover_id, d2.prover_id);

        // the true signer cannot
        let err = make_deny(&g.pk, &g.creds[0], &sig, NONCE, &oracle, &mut rng);
        assert!(matches!(err, Err(Error::CannotDeny(_))));
    }

    #[test]
    fn deny_rejects_reused_contested_tuple() {
        let (g, mut rng) = small_group(2, 63);
        let oracle = ChallengeOracle::for_key(&g.pk);
        let sig = gsig::sign(&g.pk, &g.creds[0], b"msg", &oracle, &mut rng).unwrap();
        let honest = make_deny(&g.pk, &g.creds[1], &sig, NONCE, &oracle, &mut rng).unwrap();
        let mut forged = honest.clone();
        forged.fresh_sig = sig.clone();
        assert_eq!(
            check_deny(&g.pk, &sig, &forged, NONCE, &oracle),
            Err(Reject::TupleMismatch)
        );
    }

    #[test]
    fn deny_rejects_uncertified_tuple() {
        let (g, mut rng) = small_group(2, 65);
        let oracle = ChallengeOracle::for_key(&g.pk);
        let sig = gsig::sign(&g.pk, &g.creds[0], b"msg", &oracle, &mut rng).unwrap();
        let mut proof = make_deny(&g.pk, &g.creds[1], &sig, NONCE, &oracle, &mut rng).unwrap();
        proof.certificate = (&proof.certificate + 1u32) % &g.pk.n;
        assert_eq!(
            check_deny(&g.pk, &sig, &proof, NONCE, &oracle),
            Err(Reject::Certificate)
        );
    }

    #[test]
    fn exclusivity_matrix() {
        let (g, mut rng) = small_group(3, 67);
        let oracle = ChallengeOracle::for_key(&g.pk);
        for signer in 0..3 {
            let sig = gsig::sign(&g.pk, &g.creds[signer], b"contested", &oracle, &mut rng).unwrap();
            for prover in 0..3 {
                let confirm =
                    make_confirm(&g.pk, &g.creds[prover], &sig, NONCE, &oracle, &mut rng);
                let deny = make_deny(&g.pk, &g.creds[prover], &sig, NONCE, &oracle, &mut rng);
                if prover == signer {
                    assert!(verify_confirm(&g.pk, &sig, &confirm.unwrap(), NONCE, &oracle));
                    assert!(matches!(deny, Err(Error::CannotDeny(_))));
                } else {
                    assert!(matches!(confirm, Err(Error::NotTheSigner)));
                    assert!(verify_deny(&g.pk, &sig, &deny.unwrap(), NONCE, &oracle));
                }
            }
        }
    }

    #[test]
    fn proofs_do_not_degrade_future_signing() {
        let (g, mut rng) = small_group(2, 69);
        let oracle = ChallengeOracle::for_key(&g.pk);
        let sig = gsig::sign(&g.pk, &g.creds[0], b"msg", &oracle, &mut rng).unwrap();
        for _ in 0..5 {
            make_confirm(&g.pk, &g.creds[0], &sig, NONCE, &oracle, &mut rng).unwrap();
            make_deny(&g.pk, &g.creds[1], &sig, NONCE, &oracle, &mut rng).unwrap();
        }
        let later = gsig::sign(&g.pk, &g.creds[0], b"later", &oracle, &mut rng).unwrap();
        assert!(gsig::verify(&g.pk, b"later", &later, &oracle));
        let later = gsig::sign(&g.pk, &g.creds[1], b"later", &oracle, &mut rng).unwrap();
        assert!(gsig::verify(&g.pk, b"later", &later, &oracle));
    }

    #[test]
    fn serialized_proofs_never_leak_secret_roots() {
        let (g, mut rng) = small_group(2, 71);
        let oracle = ChallengeOracle::for_key(&g.pk);
        let sig = gsig::sign(&g.pk, &g.creds[0], b"msg", &oracle, &mut rng).unwrap();
        let confirm = make_confirm(&g.pk, &g.creds[0], &sig, NONCE, &oracle, &mut rng).unwrap();
        let deny = make_deny(&g.pk, &g.creds[1], &sig, NONCE, &oracle, &mut rng).unwrap();
        let emitted = format!(
            "{}{}{}",
            formats::signature_to_string(&sig),
            formats::confirm_proof_to_string(&confirm),
            formats::deny_proof_to_string(&deny),
        );
        let tokens: std::collections::HashSet<&str> = emitted
            .split(|c: char| !c.is_ascii_digit())
            .filter(|s| !s.is_empty())
            .collect();
        for cred in &g.creds {
            for secret in cred.secret.values() {
                assert!(
                    !tokens.contains(secret.to_string().as_str()),
                    "secret residue appeared in emitted bytes"
                );
            }
        }
    }

    #[test]
    fn standard_mode_enforces_nonce_length() {
        let (g, mut rng) = small_group(1, 73);
        let oracle = ChallengeOracle::for_key(&g.pk);
        let sig = gsig::sign(&g.pk, &g.creds[0], b"msg", &oracle, &mut rng).unwrap();
        let err = make_confirm(&g.pk, &g.creds[0], &sig, b"short", &oracle, &mut rng);
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
        // forced mode (worked-example reproduction) may use short nonces
        let forced = ChallengeOracle::forced(BigUint::from(31u32));
        let sig2 = gsig::sign(&g.pk, &g.creds[0], b"msg", &forced, &mut rng).unwrap();
        let proof = make_confirm(&g.pk, &g.creds[0], &sig2, b"n", &forced, &mut rng).unwrap();
        assert!(verify_confirm(&g.pk, &sig2, &proof, b"n", &forced));
    }
}
