//! Variant B: prime-residue check plus a prefix extractor.
//!
//! Round 0 carries `n` and `h_t(x) = (value(x) mod q, q)`. Alice then streams
//! `p' = E(x, w)` for a random seed `w`, one bit per round. After `k` bits,
//! Bob's candidates are the first `s` strings (canonical order) `u` with
//! `C^{level n-k}(u | y, n, k+c) <= k+c` that are neighbours of `p_k` in the
//! `k`-prefix graph; he stops when one of them has Alice's residue.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{encode_condition, BitString};
use crate::complexity::{k_star_condition, Oracle};
use crate::error::{Error, Result};
use crate::hashing::primes::prime_hash_from;
use crate::hashing::{first_primes, ExtractorTable, PrimeHash};
use crate::rational::Rational;
use crate::rng;

use super::{converse, decode_block, numeral, Channel, Message, Params, Party, ProtocolResult, BASE_LEVEL};

/// Largest prime index bound `t` accepted.
pub const MAX_PRIME_INDEX: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsB {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub epsilon: Rational,
    pub c: usize,
    /// `s = (1/epsilon) 2^(c+1) D`, rounded up.
    pub s: u64,
    /// `t = (1/epsilon) s n^2`, rounded up.
    pub t: u64,
    pub certified: usize,
    pub max_round: usize,
    pub extractor_digest: String,
}

/// `ceil(v / epsilon)`.
fn div_eps_ceil(v: u128, epsilon: Rational) -> u128 {
    (v * epsilon.denom() as u128).div_ceil(epsilon.numer() as u128)
}

impl ParamsB {
    pub fn new(e: &ExtractorTable, epsilon: Rational, c: usize) -> Result<Self> {
        if !epsilon.is_open_unit() {
            return Err(Error::InvalidParameter(format!("epsilon {epsilon} outside (0, 1)")));
        }
        if c > 20 {
            return Err(Error::InvalidParameter(format!("c = {c} is not desk scale")));
        }
        let s = div_eps_ceil((1u128 << (c + 1)) * e.degree() as u128, epsilon);
        let t = div_eps_ceil(s * (e.n * e.n) as u128, epsilon);
        if t > MAX_PRIME_INDEX as u128 {
            return Err(Error::InvalidParameter(format!(
                "prime index bound t = {t} exceeds {MAX_PRIME_INDEX}"
            )));
        }
        Ok(Self {
            n: e.n,
            d: e.d,
            m: e.m,
            epsilon,
            c,
            s: s as u64,
            t: t as u64,
            certified: e.prefix_certified_upto.unwrap_or(0),
            max_round: e.n.min(e.m),
            extractor_digest: e.digest(),
        })
    }
}

/// Parameters plus the precomputed public objects shared by every run.
#[derive(Debug, Clone)]
pub struct SetupB {
    pub params: ParamsB,
    pub extractor: ExtractorTable,
    pub primes: Vec<u64>,
}

impl SetupB {
    pub fn new(extractor: ExtractorTable, epsilon: Rational, c: usize) -> Result<Self> {
        let params = ParamsB::new(&extractor, epsilon, c)?;
        let primes = first_primes(params.t as usize);
        Ok(Self {
            params,
            extractor,
            primes,
        })
    }
}

struct Alice {
    stream: BitString,
    sent: usize,
}

impl Party for Alice {
    fn on_message(&mut self, msg: &Message) -> Result<Option<Message>> {
        if msg.payload.get(0) == Some(true) {
            return Ok(None);
        }
        let bit = self
            .stream
            .get(self.sent)
            .ok_or(Error::ReconciliationExhausted { rounds: msg.round })?;
        self.sent += 1;
        Ok(Some(Message::alice(msg.round + 1, BitString::from_bits(vec![bit]))))
    }
}

struct Bob<'a> {
    oracle: &'a Oracle,
    y: &'a BitString,
    setup: &'a SetupB,
    fingerprint: Option<PrimeHash>,
    received: BitString,
    found: Option<BitString>,
}

impl Bob<'_> {
    fn check(&mut self, k: usize) -> Result<Option<Message>> {
        let p = &self.setup.params;
        let e = &self.setup.extractor;
        let fp = self.fingerprint.expect("fingerprint arrives in round 0");
        let bound = k + p.c;
        let cond = k_star_condition(self.y, p.n, bound);
        let level = (p.n - k) as i32;
        let candidates = self
            .oracle
            .candidate_set(bound as i64, &cond, level, p.n)?
            .into_iter()
            .filter(|u| e.is_prefix_neighbour(u.to_uint().unwrap_or(0) as u64, &self.received))
            .take(p.s as usize);
        for u in candidates {
            if fp.matches(&u)? {
                self.found = Some(u);
                return Ok(Some(Message::bob(k, true)));
            }
        }
        if k >= p.max_round {
            return Err(Error::ReconciliationExhausted { rounds: k });
        }
        if k + 1 > p.certified {
            return Err(Error::PrefixNotCertified {
                round: k + 1,
                certified: p.certified,
            });
        }
        Ok(Some(Message::bob(k, false)))
    }
}

impl Party for Bob<'_> {
    fn on_message(&mut self, msg: &Message) -> Result<Option<Message>> {
        if msg.round == 0 {
            let parts = decode_block(&msg.payload, 3)?;
            let n = numeral(&parts[0])? as usize;
            if n != self.setup.params.n {
                return Err(Error::DimensionMismatch {
                    expected: self.setup.params.n,
                    found: n,
                });
            }
            let modulus = numeral(&parts[2])?;
            if modulus < 2 {
                return Err(Error::MalformedTranscript(format!("modulus {modulus}")));
            }
            self.fingerprint = Some(PrimeHash {
                residue: numeral(&parts[1])?,
                modulus,
                prime_index_bound: self.setup.params.t as usize,
            });
        } else {
            self.received.extend_from(&msg.payload);
        }
        self.check(msg.round)
    }
}

/// Runs variant B on `(x, y)`. All randomness derives from `seed`.
pub fn run_protocol_b(
    oracle: &Oracle,
    x: &BitString,
    y: &BitString,
    setup: &SetupB,
    seed: u64,
) -> Result<ProtocolResult> {
    let params = &setup.params;
    if x.len() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            found: x.len(),
        });
    }
    let e = &setup.extractor;
    let w = rng::derived_stream(seed, "extractor-seed", 0).random_range(0..e.degree());
    let stream = e.output_bits(x.to_uint().unwrap_or(0) as u64, w);
    let fp = prime_hash_from(x, &setup.primes, rng::derive_seed(seed, "prime", 0))?;
    let block = encode_condition(&[
        BitString::binary(params.n as u128),
        BitString::binary(fp.residue as u128),
        BitString::binary(fp.modulus as u128),
    ]);
    let round0_bits = block.len();

    let mut alice = Alice {
        stream: stream.clone(),
        sent: 0,
    };
    let mut bob = Bob {
        oracle,
        y,
        setup,
        fingerprint: None,
        received: BitString::new(),
        found: None,
    };
    let mut channel = Channel::new();
    converse(Message::alice(0, block.clone()), &mut alice, &mut bob, &mut channel)?;
    let transcript = channel.into_transcript();
    let rounds_used = transcript.messages.len() / 2 - 1;
    let p = block.concat(&stream.prefix(rounds_used));

    let key_condition = vec![p.clone()];
    let z_alice = oracle.min_program(x, &key_condition, BASE_LEVEL)?;
    let z_bob = match &bob.found {
        Some(u) => Some(oracle.min_program(u, &key_condition, BASE_LEVEL)?),
        None => None,
    };
    Ok(ProtocolResult {
        seed,
        agreed: z_bob.as_ref() == Some(&z_alice),
        z_alice,
        z_bob,
        x_bob: bob.found,
        transcript,
        p,
        key_condition,
        rounds_used,
        round0_bits,
        prefix_bits: rounds_used,
        params: Params::B(params.clone()),
    })
}
