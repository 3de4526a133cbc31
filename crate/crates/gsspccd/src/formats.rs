//! Canonical text file formats.
//!
//! Every artifact is a UTF-8 text file: a `format:` line naming the schema,
//! then one `name: value` line per field in fixed order, decimal integers,
//! lowercase hex for byte strings, and a mandatory trailing newline. No
//! other whitespace is permitted and parsing is strict, so writing, reading
//! and re-writing a file is byte-identical — digests over file bytes are
//! therefore stable, which the self-proof context binding relies on.

use std::path::Path;

use num_bigint::BigUint;

use crate::enhanced::{CommitmentBundle, DenyToken, EnhancedParams, TraceKey};
use crate::enrollment::{MemberCredential, MemberId, Registry, RegistryEntry};
use crate::error::{Error, Result};
use crate::grouppk::{GroupPublicKey, GroupSecretKey, PublicTuple, SecretTuple};
use crate::gsig::GroupSignature;
use crate::selfproof::{ConfirmProof, DenyProof, ProofContext, ProofPurpose};

pub const FMT_PUBLIC_KEY: &str = "gsspccd-pk-v1";
pub const FMT_SECRET_KEY: &str = "gsspccd-sk-v1";
pub const FMT_REGISTRY: &str = "gsspccd-reg-v1";
pub const FMT_CREDENTIAL: &str = "gsspccd-cred-v1";
pub const FMT_SIGNATURE: &str = "gsspccd-sig-v1";
pub const FMT_CONFIRM: &str = "gsspccd-confirm-v1";
pub const FMT_DENY: &str = "gsspccd-deny-v1";
pub const FMT_EG_PARAMS: &str = "gsspccd-eg-v1";
pub const FMT_TRACE_KEY: &str = "gsspccd-tk-v1";
pub const FMT_BUNDLE: &str = "gsspccd-bundle-v1";
pub const FMT_REVEAL: &str = "gsspccd-reveal-v1";
pub const FMT_TOKEN: &str = "gsspccd-token-v1";

struct Writer {
    out: String,
}

impl Writer {
    fn new(tag: &str) -> Self {
        let mut out = String::new();
        out.push_str("format: ");
        out.push_str(tag);
        out.push('\n');
        Writer { out }
    }

    fn field(&mut self, name: &str, value: &str) {
        self.out.push_str(name);
        self.out.push_str(": ");
        self.out.push_str(value);
        self.out.push('\n');
    }

    fn uint(&mut self, name: &str, v: &BigUint) {
        self.field(name, &v.to_string());
    }

    fn list(&mut self, name: &str, vs: &[BigUint]) {
        let joined = vs
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        self.field(name, &joined);
    }

    fn hex(&mut self, name: &str, bytes: &[u8]) {
        self.field(name, &hex::encode(bytes));
    }

    fn finish(self) -> String {
        self.out
    }
}

struct Parser<'a> {
    rest: &'a str,
    tag: &'a str,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str, tag: &'a str) -> Result<Self> {
        let mut p = Parser { rest: input, tag };
        let got = p.field("format")?;
        if got != tag {
            return Err(Error::Format(format!(
                "expected format {tag}, found {got}"
            )));
        }
        Ok(p)
    }

    fn line(&mut self) -> Result<&'a str> {
        match self.rest.find('\n') {
            Some(i) => {
                let line = &self.rest[..i];
                self.rest = &self.rest[i + 1..];
                Ok(line)
            }
            None if self.rest.is_empty() => {
                Err(Error::Format(format!("{}: unexpected end of file", self.tag)))
            }
            None => Err(Error::Format(format!(
                "{}: missing trailing newline",
                self.tag
            ))),
        }
    }

    fn field(&mut self, name: &str) -> Result<&'a str> {
        let line = self.line()?;
        let value = line.strip_prefix(name).and_then(|r| r.strip_prefix(": "));
        match value {
            Some(v) if !v.is_empty() && v.trim() == v => Ok(v),
            _ => Err(Error::Format(format!(
                "{}: expected field {name:?}, found line {line:?}",
                self.tag
            ))),
        }
    }

    fn uint_field(&mut self, name: &str) -> Result<BigUint> {
        parse_uint(self.field(name)?, self.tag)
    }

    fn list_field(&mut self, name: &str) -> Result<Vec<BigUint>> {
        parse_uint_list(self.field(name)?, self.tag)
    }

    fn hex_field(&mut self, name: &str) -> Result<Vec<u8>> {
        let v = self.field(name)?;
        if v.len() % 2 != 0 || !v.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
        {
            return Err(Error::Format(format!(
                "{}: field {name:?} is not lowercase hex",
                self.tag
            )));
        }
        hex::decode(v).map_err(|e| Error::Format(format!("{}: {e}", self.tag)))
    }

    fn finish(self) -> Result<()> {
        if self.rest.is_empty() {
            Ok(())
        } else {
            Err(Error::Format(format!(
                "{}: trailing content after final field",
                self.tag
            )))
        }
    }
}

fn parse_uint(s: &str, tag: &str) -> Result<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Format(format!("{tag}: {s:?} is not a decimal")));
    }
    if s.len() > 1 && s.starts_with('0') {
        return Err(Error::Format(format!("{tag}: leading zero in {s:?}")));
    }
    Ok(s.parse().expect("digits-only string parses"))
}

fn parse_uint_list(s: &str, tag: &str) -> Result<Vec<BigUint>> {
    s.split(',').map(|part| parse_uint(part, tag)).collect()
}

fn parse_usize(v: &BigUint, tag: &str) -> Result<usize> {
    usize::try_from(v.clone())
        .map_err(|_| Error::Format(format!("{tag}: value {v} out of range")))
}

// ---- group keys ----

pub fn public_key_to_string(pk: &GroupPublicKey) -> String {
    let mut w = Writer::new(FMT_PUBLIC_KEY);
    w.uint("n", &pk.n);
    w.field("k", &pk.k.to_string());
    w.list("coeffs", &pk.coeffs);
    w.list("exps", &pk.exps);
    w.uint("cert_exp", &pk.cert_exp);
    w.field("challenge_bits", &pk.challenge_bits.to_string());
    w.finish()
}

pub fn parse_public_key(input: &str) -> Result<GroupPublicKey> {
    let mut p = Parser::new(input, FMT_PUBLIC_KEY)?;
    let n = p.uint_field("n")?;
    let k = parse_usize(&p.uint_field("k")?, FMT_PUBLIC_KEY)?;
    let coeffs = p.list_field("coeffs")?;
    let exps = p.list_field("exps")?;
    let cert_exp = p.uint_field("cert_exp")?;
    let challenge_bits = u32::try_from(p.uint_field("challenge_bits")?)
        .map_err(|_| Error::Format(format!("{FMT_PUBLIC_KEY}: challenge_bits out of range")))?;
    p.finish()?;
    let pk = GroupPublicKey {
        n,
        k,
        coeffs,
        exps,
        cert_exp,
        challenge_bits,
    };
    pk.validate()?;
    Ok(pk)
}

pub fn secret_key_to_string(sk: &GroupSecretKey) -> String {
    let mut w = Writer::new(FMT_SECRET_KEY);
    w.uint("p", &sk.p);
    w.uint("q", &sk.q);
    w.uint("phi", &sk.phi);
    w.list("inv_exps", &sk.inv_exps);
    w.uint("d_cert", &sk.d_cert);
    w.finish()
}

pub fn parse_secret_key(input: &str) -> Result<GroupSecretKey> {
    let mut p = Parser::new(input, FMT_SECRET_KEY)?;
    let sk = GroupSecretKey {
        p: p.uint_field("p")?,
        q: p.uint_field("q")?,
        phi: p.uint_field("phi")?,
        inv_exps: p.list_field("inv_exps")?,
        d_cert: p.uint_field("d_cert")?,
    };
    p.finish()?;
    Ok(sk)
}

// ---- registry ----

pub fn registry_to_string(registry: &Registry) -> String {
    let mut w = Writer::new(FMT_REGISTRY);
    for entry in registry.entries() {
        let tuple = entry
            .public
            .values()
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        w.out.push_str(&format!(
            "{};{};{}\n",
            entry.member_id, tuple, entry.certificate
        ));
    }
    w.finish()
}

pub fn parse_registry(input: &str) -> Result<Registry> {
    let mut p = Parser::new(input, FMT_REGISTRY)?;
    let mut registry = Registry::new();
    while !p.rest.is_empty() {
        let line = p.line()?;
        let mut parts = line.split(';');
        let (id, tuple, cert) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(id), Some(tuple), Some(cert), None) => (id, tuple, cert),
            _ => {
                return Err(Error::Format(format!(
                    "{FMT_REGISTRY}: entry must be id;tuple;cert, found {line:?}"
                )))
            }
        };
        registry.insert(RegistryEntry {
            member_id: MemberId::new(id)?,
            public: PublicTuple::new(parse_uint_list(tuple, FMT_REGISTRY)?),
            certificate: parse_uint(cert, FMT_REGISTRY)?,
        })?;
    }
    Ok(registry)
}

// ---- credential ----

pub fn credential_to_string(cred: &MemberCredential) -> String {
    let mut w = Writer::new(FMT_CREDENTIAL);
    w.field("member_id", cred.member_id.as_str());
    w.list("public", cred.public.values());
    w.list("secret", cred.secret.values());
    w.uint("cert", &cred.certificate);
    w.finish()
}

pub fn parse_credential(input: &str) -> Result<MemberCredential> {
    let mut p = Parser::new(input, FMT_CREDENTIAL)?;
    let member_id = MemberId::new(p.field("member_id")?)?;
    let public = PublicTuple::new(p.list_field("public")?);
    let secret = SecretTuple::new(p.list_field("secret")?);
    let certificate = p.uint_field("cert")?;
    p.finish()?;
    if public.len() != secret.len() {
        return Err(Error::Format(format!(
            "{FMT_CREDENTIAL}: public and secret tuples have different lengths"
        )));
    }
    Ok(MemberCredential {
        member_id,
        public,
        secret,
        certificate,
    })
}

// ---- signature ----

pub fn signature_to_string(sig: &GroupSignature) -> String {
    let mut w = Writer::new(FMT_SIGNATURE);
    w.list("tuple", sig.tuple.values());
    w.list("commitments", &sig.commitments);
    w.list("responses", &sig.responses);
    w.uint("challenge", &sig.challenge);
    w.finish()
}

pub fn parse_signature(input: &str) -> Result<GroupSignature> {
    let mut p = Parser::new(input, FMT_SIGNATURE)?;
    let sig = signature_fields(&mut p)?;
    p.finish()?;
    Ok(sig)
}

fn signature_fields(p: &mut Parser<'_>) -> Result<GroupSignature> {
    let tuple = PublicTuple::new(p.list_field("tuple")?);
    let commitments = p.list_field("commitments")?;
    let responses = p.list_field("responses")?;
    let challenge = p.uint_field("challenge")?;
    if tuple.len() != commitments.len() || tuple.len() != responses.len() {
        return Err(Error::Format(format!(
            "{}: signature field lists have uneven lengths",
            p.tag
        )));
    }
    Ok(GroupSignature {
        tuple,
        commitments,
        responses,
        challenge,
    })
}

// ---- self-proofs ----

fn digest_array(bytes: Vec<u8>, tag: &str) -> Result<[u8; 32]> {
    <[u8; 32]>::try_from(bytes)
        .map_err(|_| Error::Format(format!("{tag}: digest must be 32 bytes")))
}

pub fn confirm_proof_to_string(proof: &ConfirmProof) -> String {
    let mut w = Writer::new(FMT_CONFIRM);
    w.hex("digest", &proof.context.contested_digest);
    w.hex("nonce", &proof.context.nonce);
    w.list("tuple", proof.fresh_sig.tuple.values());
    w.list("commitments", &proof.fresh_sig.commitments);
    w.list("responses", &proof.fresh_sig.responses);
    w.uint("challenge", &proof.fresh_sig.challenge);
    w.finish()
}

pub fn parse_confirm_proof(input: &str) -> Result<ConfirmProof> {
    let mut p = Parser::new(input, FMT_CONFIRM)?;
    let contested_digest = digest_array(p.hex_field("digest")?, FMT_CONFIRM)?;
    let nonce = p.hex_field("nonce")?;
    let fresh_sig = signature_fields(&mut p)?;
    p.finish()?;
    Ok(ConfirmProof {
        context: ProofContext {
            contested_digest,
            nonce,
            purpose: ProofPurpose::Confirm,
        },
        fresh_sig,
    })
}

pub fn deny_proof_to_string(proof: &DenyProof) -> String {
    let mut w = Writer::new(FMT_DENY);
    w.hex("digest", &proof.context.contested_digest);
    w.hex("nonce", &proof.context.nonce);
    w.list("tuple", proof.fresh_sig.tuple.values());
    w.list("commitments", &proof.fresh_sig.commitments);
    w.list("responses", &proof.fresh_sig.responses);
    w.uint("challenge", &proof.fresh_sig.challenge);
    w.field("prover_id", proof.prover_id.as_str());
    w.uint("cert", &proof.certificate);
    w.finish()
}

pub fn parse_deny_proof(input: &str) -> Result<DenyProof> {
    let mut p = Parser::new(input, FMT_DENY)?;
    let contested_digest = digest_array(p.hex_field("digest")?, FMT_DENY)?;
    let nonce = p.hex_field("nonce")?;
    let fresh_sig = signature_fields(&mut p)?;
    let prover_id = MemberId::new(p.field("prover_id")?)?;
    let certificate = p.uint_field("cert")?;
    p.finish()?;
    Ok(DenyProof {
        context: ProofContext {
            contested_digest,
            nonce,
            purpose: ProofPurpose::Deny,
        },
        fresh_sig,
        prover_id,
        certificate,
    })
}

// ---- enhanced mode ----

pub fn enhanced_params_to_string(params: &EnhancedParams) -> String {
    let mut w = Writer::new(FMT_EG_PARAMS);
    w.uint("P", &params.p);
    w.uint("Q", &params.q);
    w.uint("g", &params.g);
    w.uint("h", &params.h);
    w.finish()
}

pub fn parse_enhanced_params(input: &str) -> Result<EnhancedParams> {
    let mut p = Parser::new(input, FMT_EG_PARAMS)?;
    let params = EnhancedParams {
        p: p.uint_field("P")?,
        q: p.uint_field("Q")?,
        g: p.uint_field("g")?,
        h: p.uint_field("h")?,
    };
    p.finish()?;
    params.validate()?;
    Ok(params)
}

pub fn trace_key_to_string(key: &TraceKey) -> String {
    let mut w = Writer::new(FMT_TRACE_KEY);
    w.uint("x", &key.x);
    w.finish()
}

pub fn parse_trace_key(input: &str) -> Result<TraceKey> {
    let mut p = Parser::new(input, FMT_TRACE_KEY)?;
    let key = TraceKey {
        x: p.uint_field("x")?,
    };
    p.finish()?;
    Ok(key)
}

pub fn bundle_to_string(bundle: &CommitmentBundle) -> String {
    let mut w = Writer::new(FMT_BUNDLE);
    w.list("cx", &bundle.cx);
    w.list("cg", &bundle.cg);
    w.finish()
}

pub fn parse_bundle(input: &str) -> Result<CommitmentBundle> {
    let mut p = Parser::new(input, FMT_BUNDLE)?;
    let bundle = CommitmentBundle {
        cx: p.list_field("cx")?,
        cg: p.list_field("cg")?,
    };
    p.finish()?;
    if bundle.cx.len() != bundle.cg.len() {
        return Err(Error::Format(format!(
            "{FMT_BUNDLE}: cx and cg have different lengths"
        )));
    }
    Ok(bundle)
}

pub fn reveal_to_string(rands: &[BigUint]) -> String {
    let mut w = Writer::new(FMT_REVEAL);
    w.list("rands", rands);
    w.finish()
}

pub fn parse_reveal(input: &str) -> Result<Vec<BigUint>> {
    let mut p = Parser::new(input, FMT_REVEAL)?;
    let rands = p.list_field("rands")?;
    p.finish()?;
    Ok(rands)
}

/// Token coordinates are 1-based on disk and in the CLI; the in-memory
/// index is 0-based.
pub fn token_to_string(token: &DenyToken) -> String {
    let mut w = Writer::new(FMT_TOKEN);
    w.field("coordinate", &(token.coordinate + 1).to_string());
    w.uint("value", &token.value);
    w.uint("cert", &token.certificate);
    w.finish()
}

pub fn parse_token(input: &str) -> Result<DenyToken> {
    let mut p = Parser::new(input, FMT_TOKEN)?;
    let coordinate = parse_usize(&p.uint_field("coordinate")?, FMT_TOKEN)?;
    if coordinate == 0 {
        return Err(Error::Format(format!(
            "{FMT_TOKEN}: coordinates are numbered from 1"
        )));
    }
    let token = DenyToken {
        coordinate: coordinate - 1,
        value: p.uint_field("value")?,
        certificate: p.uint_field("cert")?,
    };
    p.finish()?;
    Ok(token)
}

// ---- disk I/O ----

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

/// Write via a sibling temp file and rename, so readers never observe a
/// partial file and an interrupted write leaves the old content intact.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParameter(format!("{} has no file name", path.display())))?;
    let tmp = dir
        .unwrap_or_else(|| Path::new("."))
        .join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, contents)?;
    if let Err(e) = std::fs::rename(&tmp, path) {
        let _ = std::fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}
