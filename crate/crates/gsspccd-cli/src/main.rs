//! Role-based command line for the gsspccd group-signature scheme.
//!
//! Exit codes: 0 success or ACCEPT, 1 verification REJECT (including
//! refused confirm/deny attempts and failed lookups), 2 usage or parameter
//! errors, 3 file I/O or format errors.
//!
//! `--seed` switches all randomness to a deterministic stream derived from
//! the given hex bytes. `--force-challenge`, `--force-nonce`,
//! `--force-tuple` and `--force-rand` reproduce fixed worked examples and
//! are refused without `--insecure-test-mode`.

use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use rand::rngs::OsRng;
use rand::RngCore;

use gsspccd::enhanced;
use gsspccd::enrollment::{self, MemberId, Registry};
use gsspccd::error::Error;
use gsspccd::fixture;
use gsspccd::formats;
use gsspccd::grouppk::{self, GroupPublicKey, GroupSecretKey, PublicTuple};
use gsspccd::gsig;
use gsspccd::rng::SeededRng;
use gsspccd::selfproof;
use gsspccd::spk::ChallengeOracle;

#[derive(Parser)]
#[command(name = "gsspccd", version, about = "Group signatures with self-proof of authorship")]
struct Cli {
    /// Derive all randomness deterministically from this hex seed
    #[arg(long, global = true, value_name = "HEX")]
    seed: Option<String>,

    /// Enable insecure test hooks (forced challenges, nonces, tuples)
    #[arg(long, global = true)]
    insecure_test_mode: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct KeyPaths {
    /// Group public key file (default: $GSSPCCD_HOME/pk.txt)
    #[arg(long, value_name = "PATH")]
    pk: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a group key pair (or install the built-in demo fixture)
    GmSetup {
        /// Install a named built-in key pair instead of generating
        #[arg(long, value_name = "NAME")]
        fixture: Option<String>,
        /// Number of tuple coordinates
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 2048)]
        modulus_bits: u64,
        #[arg(long, default_value_t = 160)]
        exponent_bits: u64,
        #[arg(long, default_value_t = 128)]
        challenge_bits: u32,
        /// Where to write the public key (default: $GSSPCCD_HOME/pk.txt)
        #[arg(long, value_name = "PATH")]
        out_pk: Option<PathBuf>,
        /// Where to write the manager secret key (default: $GSSPCCD_HOME/sk.txt)
        #[arg(long, value_name = "PATH")]
        out_sk: Option<PathBuf>,
    },
    /// Enroll a member and write their credential
    GmJoin {
        #[command(flatten)]
        keys: KeyPaths,
        /// Manager secret key file (default: $GSSPCCD_HOME/sk.txt)
        #[arg(long, value_name = "PATH")]
        sk: Option<PathBuf>,
        /// Registry file, created on first join (default: $GSSPCCD_HOME/registry.txt)
        #[arg(long, value_name = "PATH")]
        registry: Option<PathBuf>,
        #[arg(long, value_name = "ID")]
        member_id: String,
        #[arg(long, value_name = "PATH")]
        out_cred: PathBuf,
        /// Enroll this exact tuple instead of sampling one (test hook)
        #[arg(long, value_name = "X1,..,Xk")]
        force_tuple: Option<String>,
    },
    /// Resolve a signature to its signer through the registry
    GmOpen {
        #[arg(long, value_name = "PATH")]
        registry: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        sig: PathBuf,
    },
    /// Issue a certified deny token for one coordinate of a bundle
    GmDenyToken {
        #[command(flatten)]
        keys: KeyPaths,
        #[arg(long, value_name = "PATH")]
        sk: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        params: PathBuf,
        #[arg(long, value_name = "PATH")]
        trace_key: PathBuf,
        #[arg(long, value_name = "PATH")]
        bundle: PathBuf,
        /// Coordinate to open, numbered from 1
        #[arg(long, value_name = "J")]
        coordinate: usize,
        #[arg(long, value_name = "PATH")]
        out_token: PathBuf,
    },
    /// Sign a message with a member credential
    MemberSign {
        #[command(flatten)]
        keys: KeyPaths,
        #[arg(long, value_name = "PATH")]
        cred: PathBuf,
        /// Message file; `-` or omitted reads raw bytes from stdin
        #[arg(long, value_name = "PATH")]
        message: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        out_sig: PathBuf,
        /// Use this challenge instead of hashing (test hook)
        #[arg(long, value_name = "DECIMAL")]
        force_challenge: Option<String>,
        /// Use these commitment nonces, one per coordinate (test hook)
        #[arg(long, value_name = "R1,..,Rk")]
        force_nonce: Option<String>,
    },
    /// Produce a confirming proof for a contested signature
    MemberConfirm {
        #[command(flatten)]
        keys: KeyPaths,
        #[arg(long, value_name = "PATH")]
        cred: PathBuf,
        #[arg(long, value_name = "PATH")]
        contested_sig: PathBuf,
        /// Verifier-supplied nonce, hex
        #[arg(long, value_name = "HEX")]
        nonce: String,
        #[arg(long, value_name = "PATH")]
        out_proof: PathBuf,
        #[arg(long, value_name = "DECIMAL")]
        force_challenge: Option<String>,
    },
    /// Produce a denying proof for a contested signature
    MemberDeny {
        #[command(flatten)]
        keys: KeyPaths,
        #[arg(long, value_name = "PATH")]
        cred: PathBuf,
        #[arg(long, value_name = "PATH")]
        contested_sig: PathBuf,
        #[arg(long, value_name = "HEX")]
        nonce: String,
        #[arg(long, value_name = "PATH")]
        out_proof: PathBuf,
        #[arg(long, value_name = "DECIMAL")]
        force_challenge: Option<String>,
    },
    /// Verify a detached group signature
    Verify {
        #[command(flatten)]
        keys: KeyPaths,
        #[arg(long, value_name = "PATH")]
        sig: PathBuf,
        #[arg(long, value_name = "PATH")]
        message: Option<PathBuf>,
        #[arg(long, value_name = "DECIMAL")]
        force_challenge: Option<String>,
    },
    /// Verify a confirming proof against a contested signature
    VerifyConfirm {
        #[command(flatten)]
        keys: KeyPaths,
        #[arg(long, value_name = "PATH")]
        contested_sig: PathBuf,
        #[arg(long, value_name = "PATH")]
        proof: PathBuf,
        #[arg(long, value_name = "HEX")]
        nonce: String,
        #[arg(long, value_name = "DECIMAL")]
        force_challenge: Option<String>,
    },
    /// Verify a denying proof against a contested signature
    VerifyDeny {
        #[command(flatten)]
        keys: KeyPaths,
        #[arg(long, value_name = "PATH")]
        contested_sig: PathBuf,
        #[arg(long, value_name = "PATH")]
        proof: PathBuf,
        #[arg(long, value_name = "HEX")]
        nonce: String,
        #[arg(long, value_name = "DECIMAL")]
        force_challenge: Option<String>,
    },
    /// Report whether two signatures were made by the same member
    Link {
        #[arg(long, value_name = "PATH")]
        sig_a: PathBuf,
        #[arg(long, value_name = "PATH")]
        sig_b: PathBuf,
    },
    /// Generate commitment-group parameters and the manager trace key
    EgSetup {
        #[command(flatten)]
        keys: KeyPaths,
        /// Bit length of the commitment modulus; must exceed the group
        /// modulus length
        #[arg(long, value_name = "BITS")]
        bits: u64,
        #[arg(long, value_name = "PATH")]
        out_params: PathBuf,
        #[arg(long, value_name = "PATH")]
        out_trace_key: PathBuf,
    },
    /// Commit to a credential's tuple; writes the bundle and the reveal
    EgCommit {
        #[arg(long, value_name = "PATH")]
        params: PathBuf,
        #[arg(long, value_name = "PATH")]
        cred: PathBuf,
        #[arg(long, value_name = "PATH")]
        out_bundle: PathBuf,
        #[arg(long, value_name = "PATH")]
        out_reveal: PathBuf,
        /// Use this fixed randomness, one value per coordinate (test hook)
        #[arg(long, value_name = "R1,..,Rk")]
        force_rand: Option<String>,
    },
    /// Decrypt a commitment bundle with the trace key
    EgTrace {
        #[arg(long, value_name = "PATH")]
        params: PathBuf,
        #[arg(long, value_name = "PATH")]
        trace_key: PathBuf,
        #[arg(long, value_name = "PATH")]
        bundle: PathBuf,
        /// Also resolve the traced tuple to a member id
        #[arg(long, value_name = "PATH")]
        registry: Option<PathBuf>,
    },
    /// Check a reveal against a bundle and a claimed tuple
    EgRevealVerify {
        #[arg(long, value_name = "PATH")]
        params: PathBuf,
        #[arg(long, value_name = "PATH")]
        bundle: PathBuf,
        #[arg(long, value_name = "PATH")]
        reveal: PathBuf,
        /// Claimed tuple as a comma-separated decimal list
        #[arg(long, value_name = "X1,..,Xk", conflicts_with = "cred")]
        tuple: Option<String>,
        /// Claimed tuple taken from a credential file
        #[arg(long, value_name = "PATH")]
        cred: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Format(_) | Error::Io(_) => 3,
                _ => 2,
            }
        }
    };
    std::process::exit(code);
}

type CmdResult = Result<i32, Error>;

fn run(cli: Cli) -> CmdResult {
    let mut rng = make_rng(cli.seed.as_deref())?;
    let insecure = cli.insecure_test_mode;
    match cli.command {
        Command::GmSetup {
            fixture,
            k,
            modulus_bits,
            exponent_bits,
            challenge_bits,
            out_pk,
            out_sk,
        } => {
            let out_pk = resolve(out_pk, "pk.txt")?;
            let out_sk = resolve(out_sk, "sk.txt")?;
            let (pk_text, sk_text) = match fixture.as_deref() {
                Some("paper") => (
                    fixture::PAPER_PK_FILE.to_string(),
                    fixture::PAPER_SK_FILE.to_string(),
                ),
                Some(other) => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown fixture {other:?}; available: paper"
                    )))
                }
                None => {
                    let (pk, sk) =
                        grouppk::setup(k, modulus_bits, exponent_bits, challenge_bits, &mut *rng)?;
                    (
                        formats::public_key_to_string(&pk),
                        formats::secret_key_to_string(&sk),
                    )
                }
            };
            formats::write_atomic(&out_pk, &pk_text)?;
            formats::write_atomic(&out_sk, &sk_text)?;
            println!("wrote group public key to {}", out_pk.display());
            println!("wrote group secret key to {}", out_sk.display());
            Ok(0)
        }

        Command::GmJoin {
            keys,
            sk,
            registry,
            member_id,
            out_cred,
            force_tuple,
        } => {
            let pk = load_pk(keys.pk)?;
            let sk = load_sk(sk, &pk)?;
            let member_id = MemberId::new(&member_id)?;
            let registry_path = resolve(registry, "registry.txt")?;

            let lock = lock_registry(&registry_path)?;
            let mut reg = read_registry(&registry_path)?;
            let cred = match force_tuple {
                Some(list) => {
                    require_insecure(insecure, "--force-tuple")?;
                    let tuple = PublicTuple::new(parse_uint_list(&list)?);
                    enrollment::issue_credential_with_tuple(&pk, &sk, &member_id, &mut reg, tuple)?
                }
                None => enrollment::issue_credential(&pk, &sk, &member_id, &mut reg, &mut *rng)?,
            };
            formats::write_atomic(&registry_path, &formats::registry_to_string(&reg))?;
            drop(lock);
            formats::write_atomic(&out_cred, &formats::credential_to_string(&cred))?;
            println!("enrolled {member_id}; credential written to {}", out_cred.display());
            Ok(0)
        }

        Command::GmOpen { registry, sig } => {
            let registry_path = resolve(registry, "registry.txt")?;
            let reg = read_registry(&registry_path)?;
            let sig = formats::parse_signature(&formats::read_file(&sig)?)?;
            match gsig::open(&reg, &sig) {
                Some(member) => {
                    println!("{member}");
                    Ok(0)
                }
                None => {
                    println!("NOT-FOUND");
                    println!("no registered member uses this tuple");
                    Ok(1)
                }
            }
        }

        Command::GmDenyToken {
            keys,
            sk,
            params,
            trace_key,
            bundle,
            coordinate,
            out_token,
        } => {
            let pk = load_pk(keys.pk)?;
            let sk = load_sk(sk, &pk)?;
            let params = formats::parse_enhanced_params(&formats::read_file(&params)?)?;
            let key = formats::parse_trace_key(&formats::read_file(&trace_key)?)?;
            let bundle = formats::parse_bundle(&formats::read_file(&bundle)?)?;
            if coordinate == 0 || coordinate > bundle.cx.len() {
                return Err(Error::InvalidParameter(format!(
                    "coordinate must be in 1..={}, got {coordinate}",
                    bundle.cx.len()
                )));
            }
            let token = enhanced::deny_token(&params, &key, &bundle, coordinate - 1, &pk, &sk)?;
            formats::write_atomic(&out_token, &formats::token_to_string(&token))?;
            println!("wrote deny token to {}", out_token.display());
            Ok(0)
        }

        Command::MemberSign {
            keys,
            cred,
            message,
            out_sig,
            force_challenge,
            force_nonce,
        } => {
            let pk = load_pk(keys.pk)?;
            let cred = formats::parse_credential(&formats::read_file(&cred)?)?;
            let message = read_message(message.as_deref())?;
            let oracle = make_oracle(&pk, force_challenge.as_deref(), insecure)?;
            let sig = match force_nonce {
                Some(list) => {
                    require_insecure(insecure, "--force-nonce")?;
                    let nonces = parse_uint_list(&list)?;
                    gsig::sign_with_nonces(&pk, &cred, &message, &oracle, &nonces)?
                }
                None => gsig::sign(&pk, &cred, &message, &oracle, &mut *rng)?,
            };
            formats::write_atomic(&out_sig, &formats::signature_to_string(&sig))?;
            println!("wrote signature to {}", out_sig.display());
            Ok(0)
        }

        Command::MemberConfirm {
            keys,
            cred,
            contested_sig,
            nonce,
            out_proof,
            force_challenge,
        } => {
            let pk = load_pk(keys.pk)?;
            let cred = formats::parse_credential(&formats::read_file(&cred)?)?;
            let contested = formats::parse_signature(&formats::read_file(&contested_sig)?)?;
            let nonce = parse_hex(&nonce)?;
            let oracle = make_oracle(&pk, force_challenge.as_deref(), insecure)?;
            match selfproof::make_confirm(&pk, &cred, &contested, &nonce, &oracle, &mut *rng) {
                Ok(proof) => {
                    formats::write_atomic(&out_proof, &formats::confirm_proof_to_string(&proof))?;
                    println!("ACCEPT");
                    println!("confirming proof written to {}", out_proof.display());
                    Ok(0)
                }
                Err(Error::NotTheSigner) => {
                    println!("REJECT");
                    println!("credential tuple differs from the contested signature");
                    Ok(1)
                }
                Err(e) => Err(e),
            }
        }

        Command::MemberDeny {
            keys,
            cred,
            contested_sig,
            nonce,
            out_proof,
            force_challenge,
        } => {
            let pk = load_pk(keys.pk)?;
            let cred = formats::parse_credential(&formats::read_file(&cred)?)?;
            let contested = formats::parse_signature(&formats::read_file(&contested_sig)?)?;
            let nonce = parse_hex(&nonce)?;
            let oracle = make_oracle(&pk, force_challenge.as_deref(), insecure)?;
            match selfproof::make_deny(&pk, &cred, &contested, &nonce, &oracle, &mut *rng) {
                Ok(proof) => {
                    formats::write_atomic(&out_proof, &formats::deny_proof_to_string(&proof))?;
                    println!("ACCEPT");
                    println!("denying proof written to {}", out_proof.display());
                    Ok(0)
                }
                Err(Error::CannotDeny(reason)) => {
                    println!("REJECT");
                    println!("cannot deny: {reason}");
                    Ok(1)
                }
                Err(e) => Err(e),
            }
        }

        Command::Verify {
            keys,
            sig,
            message,
            force_challenge,
        } => {
            let pk = load_pk(keys.pk)?;
            let sig = formats::parse_signature(&formats::read_file(&sig)?)?;
            let message = read_message(message.as_deref())?;
            let oracle = make_oracle(&pk, force_challenge.as_deref(), insecure)?;
            match gsig::check(&pk, &message, &sig, &oracle) {
                Ok(()) => {
                    println!("ACCEPT");
                    println!("group signature verifies for the supplied message");
                    Ok(0)
                }
                Err(reason) => {
                    println!("REJECT");
                    println!("{reason}");
                    Ok(1)
                }
            }
        }

        Command::VerifyConfirm {
            keys,
            contested_sig,
            proof,
            nonce,
            force_challenge,
        } => {
            let pk = load_pk(keys.pk)?;
            let contested = formats::parse_signature(&formats::read_file(&contested_sig)?)?;
            let proof = formats::parse_confirm_proof(&formats::read_file(&proof)?)?;
            let nonce = parse_hex(&nonce)?;
            let oracle = make_oracle(&pk, force_challenge.as_deref(), insecure)?;
            match selfproof::check_confirm(&pk, &contested, &proof, &nonce, &oracle) {
                Ok(()) => {
                    println!("ACCEPT");
                    println!("confirming proof is valid for this signature and nonce");
                    Ok(0)
                }
                Err(reason) => {
                    println!("REJECT");
                    println!("{reason}");
                    Ok(1)
                }
            }
        }

        Command::VerifyDeny {
            keys,
            contested_sig,
            proof,
            nonce,
            force_challenge,
        } => {
            let pk = load_pk(keys.pk)?;
            let contested = formats::parse_signature(&formats::read_file(&contested_sig)?)?;
            let proof = formats::parse_deny_proof(&formats::read_file(&proof)?)?;
            let nonce = parse_hex(&nonce)?;
            let oracle = make_oracle(&pk, force_challenge.as_deref(), insecure)?;
            match selfproof::check_deny(&pk, &contested, &proof, &nonce, &oracle) {
                Ok(()) => {
                    println!("ACCEPT");
                    println!("denying proof is valid for this signature and nonce");
                    Ok(0)
                }
                Err(reason) => {
                    println!("REJECT");
                    println!("{reason}");
                    Ok(1)
                }
            }
        }

        Command::Link { sig_a, sig_b } => {
            let a = formats::parse_signature(&formats::read_file(&sig_a)?)?;
            let b = formats::parse_signature(&formats::read_file(&sig_b)?)?;
            if gsig::link(&a, &b) {
                println!("LINKED");
                println!("both signatures carry the same member tuple");
                Ok(0)
            } else {
                println!("NOT-LINKED");
                println!("the signatures carry different member tuples");
                Ok(1)
            }
        }

        Command::EgSetup {
            keys,
            bits,
            out_params,
            out_trace_key,
        } => {
            let pk = load_pk(keys.pk)?;
            let (params, key) = enhanced::eg_setup(bits, &pk.n, &mut *rng)?;
            formats::write_atomic(&out_params, &formats::enhanced_params_to_string(&params))?;
            formats::write_atomic(&out_trace_key, &formats::trace_key_to_string(&key))?;
            println!("wrote commitment parameters to {}", out_params.display());
            println!("wrote trace key to {}", out_trace_key.display());
            Ok(0)
        }

        Command::EgCommit {
            params,
            cred,
            out_bundle,
            out_reveal,
            force_rand,
        } => {
            let params = formats::parse_enhanced_params(&formats::read_file(&params)?)?;
            let cred = formats::parse_credential(&formats::read_file(&cred)?)?;
            let (bundle, secret) = match force_rand {
                Some(list) => {
                    require_insecure(insecure, "--force-rand")?;
                    let rands = parse_uint_list(&list)?;
                    enhanced::commit_tuple_with_randomness(&params, &cred.public, &rands)?
                }
                None => enhanced::commit_tuple(&params, &cred.public, &mut *rng)?,
            };
            formats::write_atomic(&out_bundle, &formats::bundle_to_string(&bundle))?;
            formats::write_atomic(&out_reveal, &formats::reveal_to_string(&secret.rands))?;
            println!("wrote commitment bundle to {}", out_bundle.display());
            println!("wrote reveal (keep private) to {}", out_reveal.display());
            Ok(0)
        }

        Command::EgTrace {
            params,
            trace_key,
            bundle,
            registry,
        } => {
            let params = formats::parse_enhanced_params(&formats::read_file(&params)?)?;
            let key = formats::parse_trace_key(&formats::read_file(&trace_key)?)?;
            let bundle = formats::parse_bundle(&formats::read_file(&bundle)?)?;
            let tuple = enhanced::trace(&params, &key, &bundle)?;
            let rendered = tuple
                .values()
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",");
            println!("{rendered}");
            if let Some(path) = registry {
                let reg = read_registry(&path)?;
                match enrollment::open_lookup(&reg, &tuple) {
                    Some(member) => println!("{member}"),
                    None => {
                        println!("NOT-FOUND");
                        return Ok(1);
                    }
                }
            }
            Ok(0)
        }

        Command::EgRevealVerify {
            params,
            bundle,
            reveal,
            tuple,
            cred,
        } => {
            let params = formats::parse_enhanced_params(&formats::read_file(&params)?)?;
            let bundle = formats::parse_bundle(&formats::read_file(&bundle)?)?;
            let rands = formats::parse_reveal(&formats::read_file(&reveal)?)?;
            let claimed = match (tuple, cred) {
                (Some(list), None) => PublicTuple::new(parse_uint_list(&list)?),
                (None, Some(path)) => {
                    formats::parse_credential(&formats::read_file(&path)?)?.public
                }
                _ => {
                    return Err(Error::InvalidParameter(
                        "exactly one of --tuple or --cred is required".into(),
                    ))
                }
            };
            let secret = enhanced::BundleSecret { rands };
            if enhanced::verify_confirm_reveal(&params, &bundle, &secret, &claimed) {
                println!("ACCEPT");
                println!("reveal opens the bundle to the claimed tuple");
                Ok(0)
            } else {
                println!("REJECT");
                println!("reveal does not open the bundle to the claimed tuple");
                Ok(1)
            }
        }
    }
}

// ---- shared plumbing ----

fn make_rng(seed: Option<&str>) -> Result<Box<dyn RngCore>, Error> {
    match seed {
        Some(hex_seed) => {
            let bytes = parse_hex(hex_seed)?;
            Ok(Box::new(SeededRng::new(&bytes)))
        }
        None => Ok(Box::new(OsRng)),
    }
}

fn make_oracle(
    pk: &GroupPublicKey,
    force_challenge: Option<&str>,
    insecure: bool,
) -> Result<ChallengeOracle, Error> {
    match force_challenge {
        Some(value) => {
            require_insecure(insecure, "--force-challenge")?;
            Ok(ChallengeOracle::forced(parse_uint(value)?))
        }
        None => Ok(ChallengeOracle::for_key(pk)),
    }
}

fn require_insecure(insecure: bool, flag: &str) -> Result<(), Error> {
    if insecure {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{flag} is a test hook; pass --insecure-test-mode to use it"
        )))
    }
}

fn parse_uint(s: &str) -> Result<BigUint, Error> {
    s.parse()
        .map_err(|_| Error::InvalidParameter(format!("{s:?} is not a decimal integer")))
}

fn parse_uint_list(s: &str) -> Result<Vec<BigUint>, Error> {
    s.split(',').map(|part| parse_uint(part.trim())).collect()
}

fn parse_hex(s: &str) -> Result<Vec<u8>, Error> {
    hex::decode(s).map_err(|_| Error::InvalidParameter(format!("{s:?} is not hex")))
}

/// Resolve an optional path flag against $GSSPCCD_HOME.
fn resolve(path: Option<PathBuf>, default_name: &str) -> Result<PathBuf, Error> {
    match path {
        Some(p) => Ok(p),
        None => match std::env::var_os("GSSPCCD_HOME") {
            Some(home) => Ok(PathBuf::from(home).join(default_name)),
            None => Err(Error::InvalidParameter(format!(
                "no path given and GSSPCCD_HOME is not set (wanted {default_name})"
            ))),
        },
    }
}

fn load_pk(path: Option<PathBuf>) -> Result<GroupPublicKey, Error> {
    let path = resolve(path, "pk.txt")?;
    formats::parse_public_key(&formats::read_file(&path)?)
}

fn load_sk(path: Option<PathBuf>, pk: &GroupPublicKey) -> Result<GroupSecretKey, Error> {
    let path = resolve(path, "sk.txt")?;
    let sk = formats::parse_secret_key(&formats::read_file(&path)?)?;
    sk.validate_against(pk)?;
    Ok(sk)
}

fn read_message(path: Option<&Path>) -> Result<Vec<u8>, Error> {
    match path {
        Some(p) if p.as_os_str() != "-" => Ok(std::fs::read(p)?),
        _ => {
            let mut buf = Vec::new();
            std::io::stdin().read_to_end(&mut buf)?;
            Ok(buf)
        }
    }
}

fn read_registry(path: &Path) -> Result<Registry, Error> {
    match std::fs::read_to_string(path) {
        Ok(content) if content.is_empty() => Ok(Registry::new()),
        Ok(content) => formats::parse_registry(&content),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Registry::new()),
        Err(e) => Err(e.into()),
    }
}

/// Exclusive advisory lock for registry read-modify-write. Concurrent GM
/// processes are outside the supported model; the lock turns accidental
/// overlap into waiting instead of a lost update.
fn lock_registry(path: &Path) -> Result<std::fs::File, Error> {
    let lock_path = path.with_extension("lock");
    let file = std::fs::OpenOptions::new()
        .create(true)
        .truncate(false)
        .write(true)
        .open(&lock_path)?;
    file.lock()?;
    Ok(file)
}
