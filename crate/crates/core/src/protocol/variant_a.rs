//! Variant A: reconciliation by a random GF(2) linear hash.
//!
//! Alice draws `H` with `n + C_LITERAL + 1 + L` rows and `n` columns, where
//! `delta = epsilon / 2n` and `L = ceil(log2(1/delta))`. Round 0 carries `n`,
//! `H`, and the first `1 + L` bits of `Hx`; round `j` brings Bob's prefix to
//! `j + 1 + L` bits, and Bob stops at the first `j` where some `u` with
//! `C(u | y, H) <= j` has a matching fingerprint prefix.

use serde::{Deserialize, Serialize};

use crate::bits::{encode_condition, BitString};
use crate::complexity::Oracle;
use crate::error::{Error, Result};
use crate::hashing::{sample_gf2_matrix, Gf2Matrix};
use crate::rational::Rational;
use crate::rng;
use crate::vm::C_LITERAL;

use super::{converse, decode_block, numeral, Channel, Message, Params, Party, ProtocolResult, BASE_LEVEL};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsA {
    pub n: usize,
    pub epsilon: Rational,
    pub delta: Rational,
    /// `L = ceil(log2(1/delta))`.
    pub log_inv_delta: usize,
    pub rows: usize,
    /// Last round Bob may ask for.
    pub max_round: usize,
}

impl ParamsA {
    pub fn new(n: usize, epsilon: Rational, l_max: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("x must be non-empty".into()));
        }
        if !epsilon.is_open_unit() {
            return Err(Error::InvalidParameter(format!("epsilon {epsilon} outside (0, 1)")));
        }
        let delta = Rational::new(epsilon.numer(), epsilon.denom() * 2 * n as u64);
        let log_inv_delta = delta.recip().ceil_log2() as usize;
        Ok(Self {
            n,
            epsilon,
            delta,
            log_inv_delta,
            rows: n + C_LITERAL + 1 + log_inv_delta,
            max_round: l_max.min(n + C_LITERAL),
        })
    }

    /// Fingerprint bits Bob holds after round `j`.
    pub fn prefix_len(&self, j: usize) -> usize {
        j + 1 + self.log_inv_delta
    }

    pub fn matrix(&self, seed: u64) -> Result<Gf2Matrix> {
        sample_gf2_matrix(self.rows, self.n, rng::derive_seed(seed, "matrix", 0))
    }
}

struct Alice {
    fingerprint: BitString,
    sent: usize,
}

impl Party for Alice {
    fn on_message(&mut self, msg: &Message) -> Result<Option<Message>> {
        if msg.payload.get(0) == Some(true) {
            return Ok(None);
        }
        let bit = self
            .fingerprint
            .get(self.sent)
            .ok_or(Error::ReconciliationExhausted { rounds: msg.round })?;
        self.sent += 1;
        Ok(Some(Message::alice(msg.round + 1, BitString::from_bits(vec![bit]))))
    }
}

struct Bob<'a> {
    oracle: &'a Oracle,
    y: &'a BitString,
    max_round: usize,
    n: usize,
    h: Option<Gf2Matrix>,
    h_bits: BitString,
    received: BitString,
    found: Option<BitString>,
}

impl Bob<'_> {
    fn check(&mut self, j: usize) -> Result<Option<Message>> {
        let h = self.h.as_ref().expect("matrix arrives in round 0");
        let cond = [self.y.clone(), self.h_bits.clone()];
        for u in self.oracle.candidate_set(j as i64, &cond, BASE_LEVEL, self.n)? {
            if self.received.is_prefix_of(&h.hash(&u)?) {
                self.found = Some(u);
                return Ok(Some(Message::bob(j, true)));
            }
        }
        if j >= self.max_round {
            return Err(Error::ReconciliationExhausted { rounds: j });
        }
        Ok(Some(Message::bob(j, false)))
    }
}

impl Party for Bob<'_> {
    fn on_message(&mut self, msg: &Message) -> Result<Option<Message>> {
        if msg.round == 0 {
            let parts = decode_block(&msg.payload, 3)?;
            let n = numeral(&parts[0])? as usize;
            if n == 0 || parts[1].len() % n != 0 {
                return Err(Error::MalformedTranscript("matrix size is not a multiple of n".into()));
            }
            self.n = n;
            self.h = Some(Gf2Matrix::deserialize(parts[1].len() / n, n, &parts[1])?);
            self.h_bits = parts[1].clone();
            self.received = parts[2].clone();
        } else {
            self.received.extend_from(&msg.payload);
        }
        self.check(msg.round)
    }
}

/// Runs variant A on `(x, y)`. All randomness derives from `seed`.
pub fn run_protocol_a(
    oracle: &Oracle,
    x: &BitString,
    y: &BitString,
    epsilon: Rational,
    seed: u64,
) -> Result<ProtocolResult> {
    let params = ParamsA::new(x.len(), epsilon, oracle.config().l_max)?;
    let h = params.matrix(seed)?;
    let h_bits = h.serialize();
    let fingerprint = h.hash(x)?;
    let first = fingerprint.prefix(params.prefix_len(0));
    let block = encode_condition(&[BitString::binary(params.n as u128), h_bits.clone(), first.clone()]);
    let round0_bits = block.len();

    let mut alice = Alice {
        fingerprint: fingerprint.clone(),
        sent: first.len(),
    };
    let mut bob = Bob {
        oracle,
        y,
        max_round: params.max_round,
        n: 0,
        h: None,
        h_bits: BitString::new(),
        received: BitString::new(),
        found: None,
    };
    let mut channel = Channel::new();
    converse(Message::alice(0, block), &mut alice, &mut bob, &mut channel)?;
    let transcript = channel.into_transcript();
    let rounds_used = transcript.messages.len() / 2 - 1;
    let p = fingerprint.prefix(params.prefix_len(rounds_used));
    debug_assert_eq!(p, bob.received);

    let key_condition = vec![p.clone(), h_bits];
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
        params: Params::A(params),
    })
}

/// Does some `u != x` in Bob's round-`j` candidate set share the first
/// `j + 1 + L` fingerprint bits with `x`, under the matrix drawn from `seed`?
pub fn round_false_match(
    oracle: &Oracle,
    x: &BitString,
    y: &BitString,
    j: usize,
    epsilon: Rational,
    seed: u64,
) -> Result<bool> {
    let params = ParamsA::new(x.len(), epsilon, oracle.config().l_max)?;
    let h = params.matrix(seed)?;
    let target = h.hash(x)?.prefix(params.prefix_len(j));
    let cond = [y.clone(), h.serialize()];
    for u in oracle.candidate_set(j as i64, &cond, BASE_LEVEL, x.len())? {
        if &u != x && target.is_prefix_of(&h.hash(&u)?) {
            return Ok(true);
        }
    }
    Ok(false)
}
