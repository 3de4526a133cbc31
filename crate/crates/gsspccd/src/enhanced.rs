//! Anonymity enhancement: per-signature commitments to the member tuple.
//!
//! Instead of publishing the tuple in clear, a signer can commit to each
//! coordinate ElGamal-style over a safe-prime group: CX_j = X_j * h^{r_j},
//! CG_j = g^{r_j}. The manager holds the discrete log of h and traces by
//! decrypting; the signer confirms by revealing the r_j; and the manager
//! can enable a non-signer's deny by handing out the token h^{r_j}, with
//! which the non-signer recommits its own coordinate under the same
//! randomness mass.
//!
//! Tokens and reveals carry manager certificates produced with the same
//! full-domain-hash mechanism as enrollment, so third parties can check
//! them offline.
//!
//! Tuple coordinates are residues mod n embedded directly into Z_P with
//! P > n. They generally fall outside the order-Q subgroup, which weakens
//! the semantic security of the commitments; this module provides the
//! commitment, tracing and proof mechanics, not a hardened encryption
//! layer, and it deliberately does not build message signatures over
//! committed tuples (that would need a combined proof linking commitments
//! to the public-key polynomial, which the basic scheme does not have).

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::RngCore;

use crate::encoding;
use crate::enrollment::MemberId;
use crate::error::{Error, Result};
use crate::grouppk::{GroupPublicKey, GroupSecretKey, PublicTuple};
use crate::numtheory::{gen_prime, is_probable_prime, mod_inv, rand_below};

const CTX_TRACE_TOKEN: &str = "trace-token";

/// Safe-prime group for commitments: P = 2Q + 1, g generates the order-Q
/// subgroup of quadratic residues, h = g^x for the manager's trace key x.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnhancedParams {
    pub p: BigUint,
    pub q: BigUint,
    pub g: BigUint,
    pub h: BigUint,
}

/// The manager's opening secret: x with h = g^x (mod P).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceKey {
    pub x: BigUint,
}

/// Per-coordinate commitments (CX_j, CG_j) to a member tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitmentBundle {
    pub cx: Vec<BigUint>,
    pub cg: Vec<BigUint>,
}

/// The signer-held randomness behind a bundle. Revealing it is the
/// enhanced-mode confirming proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleSecret {
    pub rands: Vec<BigUint>,
}

/// A manager-issued deny aid for one coordinate: h^{r_j}, certified
/// against the bundle it was extracted from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenyToken {
    pub coordinate: usize,
    pub value: BigUint,
    pub certificate: BigUint,
}

/// A non-signer's recommitment of its own coordinate under the contested
/// randomness mass, plus the identity binding for its tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnhancedDenyProof {
    pub token: DenyToken,
    pub prover_id: MemberId,
    pub prover_tuple: PublicTuple,
    pub tuple_certificate: BigUint,
    pub recommitment: BigUint,
}

impl EnhancedParams {
    pub fn validate(&self) -> Result<()> {
        if self.p < BigUint::from(7u32) || self.q < BigUint::from(2u32) {
            return Err(Error::InvalidParameter("group too small".into()));
        }
        if self.p != &self.q * 2u32 + 1u32 {
            return Err(Error::InvalidParameter("P must equal 2Q + 1".into()));
        }
        if self.g < BigUint::from(2u32) || self.g >= self.p || !self.g.modpow(&self.q, &self.p).is_one()
        {
            return Err(Error::InvalidParameter(
                "generator does not span the order-Q subgroup".into(),
            ));
        }
        if self.h.is_zero() || self.h >= self.p || !self.h.modpow(&self.q, &self.p).is_one() {
            return Err(Error::InvalidParameter(
                "public value outside the subgroup".into(),
            ));
        }
        Ok(())
    }
}

/// Generate commitment-group parameters with P > n_floor, plus the trace
/// key.
pub fn eg_setup<R: RngCore + ?Sized>(
    bits: u64,
    n_floor: &BigUint,
    rng: &mut R,
) -> Result<(EnhancedParams, TraceKey)> {
    if bits < 5 {
        return Err(Error::InvalidParameter(format!(
            "eg_setup requires bits >= 5, got {bits}"
        )));
    }
    if bits <= n_floor.bits() {
        return Err(Error::InvalidParameter(format!(
            "bits ({bits}) must exceed the bit length of the modulus floor ({})",
            n_floor.bits()
        )));
    }
    let budget = 100 * bits;
    for _ in 0..budget {
        let q = gen_prime(rng, bits - 1)?;
        let p = &q * 2u32 + 1u32;
        if !is_probable_prime(&p, 40) {
            continue;
        }
        debug_assert!(p > *n_floor);
        // smallest square != 1 generates the prime-order QR subgroup
        let mut base = BigUint::from(2u32);
        let g = loop {
            let cand = &base * &base % &p;
            if !cand.is_one() {
                break cand;
            }
            base += 1u32;
        };
        let x = rand_below(rng, &(&q - 1u32)) + 1u32;
        let h = g.modpow(&x, &p);
        let params = EnhancedParams { p, q, g, h };
        params.validate()?;
        return Ok((params, TraceKey { x }));
    }
    Err(Error::GenerationFailed(format!(
        "no safe prime of {bits} bits found within {budget} attempts"
    )))
}

/// Commit to every coordinate of a tuple with fresh independent
/// randomness.
pub fn commit_tuple<R: RngCore + ?Sized>(
    params: &EnhancedParams,
    tuple: &PublicTuple,
    rng: &mut R,
) -> Result<(CommitmentBundle, BundleSecret)> {
    let rands: Vec<BigUint> = (0..tuple.len())
        .map(|_| rand_below(rng, &(&params.q - 1u32)) + 1u32)
        .collect();
    commit_tuple_with_randomness(params, tuple, &rands)
}

/// As [`commit_tuple`] with caller-chosen randomness. Zero entries are
/// allowed here for worked examples; the sampling path never produces
/// them.
pub fn commit_tuple_with_randomness(
    params: &EnhancedParams,
    tuple: &PublicTuple,
    rands: &[BigUint],
) -> Result<(CommitmentBundle, BundleSecret)> {
    if tuple.is_empty() || rands.len() != tuple.len() {
        return Err(Error::InvalidParameter(
            "randomness arity does not match the tuple".into(),
        ));
    }
    for x in tuple.values() {
        if *x >= params.p {
            return Err(Error::InvalidParameter(
                "tuple coordinate exceeds the commitment modulus".into(),
            ));
        }
    }
    for r in rands {
        if *r >= params.q {
            return Err(Error::InvalidParameter(
                "randomness exceeds the subgroup order".into(),
            ));
        }
    }
    let mut cx = Vec::with_capacity(tuple.len());
    let mut cg = Vec::with_capacity(tuple.len());
    for (x, r) in tuple.values().iter().zip(rands) {
        cx.push(x * params.h.modpow(r, &params.p) % &params.p);
        cg.push(params.g.modpow(r, &params.p));
    }
    Ok((
        CommitmentBundle { cx, cg },
        BundleSecret {
            rands: rands.to_vec(),
        },
    ))
}

/// Manager-side decryption: X_j = CX_j * (CG_j^x)^-1 (mod P). The result
/// feeds a registry lookup to finish the open.
pub fn trace(
    params: &EnhancedParams,
    key: &TraceKey,
    bundle: &CommitmentBundle,
) -> Result<PublicTuple> {
    if bundle.cx.is_empty() || bundle.cx.len() != bundle.cg.len() {
        return Err(Error::MalformedBundle(
            "commitment lists are empty or uneven".into(),
        ));
    }
    let mut values = Vec::with_capacity(bundle.cx.len());
    for (cx, cg) in bundle.cx.iter().zip(&bundle.cg) {
        if cg.is_zero() || *cg >= params.p || *cx >= params.p {
            return Err(Error::MalformedBundle(
                "commitment outside the group".into(),
            ));
        }
        let mask = cg.modpow(&key.x, &params.p);
        values.push(cx * mod_inv(&mask, &params.p)? % &params.p);
    }
    Ok(PublicTuple::new(values))
}

/// Package the bundle randomness as the confirming reveal.
pub fn confirm_reveal(secret: &BundleSecret) -> BundleSecret {
    secret.clone()
}

/// Check a reveal against a bundle and the claimed tuple:
/// CG_j = g^{r_j} and CX_j = X_j * h^{r_j} for every coordinate.
pub fn verify_confirm_reveal(
    params: &EnhancedParams,
    bundle: &CommitmentBundle,
    reveal: &BundleSecret,
    claimed: &PublicTuple,
) -> bool {
    if bundle.cx.len() != bundle.cg.len()
        || bundle.cx.len() != reveal.rands.len()
        || bundle.cx.len() != claimed.len()
        || bundle.cx.is_empty()
    {
        return false;
    }
    for (((cx, cg), r), x) in bundle
        .cx
        .iter()
        .zip(&bundle.cg)
        .zip(&reveal.rands)
        .zip(claimed.values())
    {
        if *r >= params.q || *x >= params.p {
            return false;
        }
        if *cg != params.g.modpow(r, &params.p) {
            return false;
        }
        if *cx != x * params.h.modpow(r, &params.p) % &params.p {
            return false;
        }
    }
    true
}

fn token_fdh(pk: &GroupPublicKey, bundle: &CommitmentBundle, coordinate: usize, value: &BigUint) -> BigUint {
    let digest = bundle_digest(bundle);
    let mut payload = Vec::new();
    encoding::append_message(&mut payload, &digest);
    encoding::append_usize(&mut payload, coordinate);
    encoding::append_uint(&mut payload, value);
    encoding::fdh_to_unit(&pk.n, CTX_TRACE_TOKEN, &payload)
}

/// SHA-256 of the bundle's canonical file bytes.
pub fn bundle_digest(bundle: &CommitmentBundle) -> [u8; 32] {
    use sha2::Digest;
    sha2::Sha256::digest(crate::formats::bundle_to_string(bundle).as_bytes()).into()
}

/// Manager-issued deny aid: h^{r_j} recovered as CG_j^x, certified against
/// the bundle digest so verifiers need not trust the bearer.
pub fn deny_token(
    params: &EnhancedParams,
    key: &TraceKey,
    bundle: &CommitmentBundle,
    coordinate: usize,
    pk: &GroupPublicKey,
    sk: &GroupSecretKey,
) -> Result<DenyToken> {
    if bundle.cx.len() != bundle.cg.len() || coordinate >= bundle.cg.len() {
        return Err(Error::MalformedBundle("coordinate out of range".into()));
    }
    let cg = &bundle.cg[coordinate];
    if cg.is_zero() || *cg >= params.p {
        return Err(Error::MalformedBundle("commitment outside the group".into()));
    }
    let value = cg.modpow(&key.x, &params.p);
    let h = token_fdh(pk, bundle, coordinate, &value);
    let certificate = h.modpow(&sk.d_cert, &pk.n);
    Ok(DenyToken {
        coordinate,
        value,
        certificate,
    })
}

/// Check a token's manager certificate against the bundle it claims to
/// open.
pub fn verify_token(
    params: &EnhancedParams,
    pk: &GroupPublicKey,
    bundle: &CommitmentBundle,
    token: &DenyToken,
) -> bool {
    if token.coordinate >= bundle.cg.len() || token.value.is_zero() || token.value >= params.p {
        return false;
    }
    if token.certificate.is_zero() || token.certificate >= pk.n {
        return false;
    }
    token.certificate.modpow(&pk.cert_exp, &pk.n)
        == token_fdh(pk, bundle, token.coordinate, &token.value)
}

/// Recommit the prover's own coordinate under the contested randomness:
/// CX'_j = X'_j * token (mod P). Fails when the result coincides with the
/// contested commitment — only the signer's coordinate does that.
pub fn make_enhanced_deny(
    params: &EnhancedParams,
    bundle: &CommitmentBundle,
    token: &DenyToken,
    own_tuple: &PublicTuple,
    tuple_certificate: &BigUint,
    prover_id: &MemberId,
) -> Result<EnhancedDenyProof> {
    if token.coordinate >= bundle.cx.len() || token.coordinate >= own_tuple.len() {
        return Err(Error::InvalidParameter("coordinate out of range".into()));
    }
    let own = &own_tuple.values()[token.coordinate];
    if *own >= params.p {
        return Err(Error::InvalidParameter(
            "tuple coordinate exceeds the commitment modulus".into(),
        ));
    }
    let recommitment = own * &token.value % &params.p;
    if recommitment == bundle.cx[token.coordinate] {
        return Err(Error::CannotDeny(
            "recommitment equals the contested commitment; the coordinate \
             values coincide"
                .into(),
        ));
    }
    Ok(EnhancedDenyProof {
        token: token.clone(),
        prover_id: prover_id.clone(),
        prover_tuple: own_tuple.clone(),
        tuple_certificate: tuple_certificate.clone(),
        recommitment,
    })
}

/// Verify an enhanced deny proof: certified token, certified prover tuple,
/// recommitment recomputed from the prover's coordinate, and inequality
/// with the contested commitment.
pub fn verify_enhanced_deny(
    params: &EnhancedParams,
    pk: &GroupPublicKey,
    bundle: &CommitmentBundle,
    proof: &EnhancedDenyProof,
) -> bool {
    let j = proof.token.coordinate;
    if j >= bundle.cx.len() || j >= proof.prover_tuple.len() {
        return false;
    }
    if !verify_token(params, pk, bundle, &proof.token) {
        return false;
    }
    if !crate::enrollment::verify_certificate(
        pk,
        &proof.prover_id,
        &proof.prover_tuple,
        &proof.tuple_certificate,
    ) {
        return false;
    }
    let own = &proof.prover_tuple.values()[j];
    if *own >= params.p {
        return false;
    }
    if proof.recommitment != own * &proof.token.value % &params.p {
        return false;
    }
    proof.recommitment != bundle.cx[j]
}
