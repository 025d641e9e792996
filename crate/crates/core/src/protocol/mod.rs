//! Both key-agreement protocols, run as two state machines over a recorded
//! public channel.
//!
//! Phase 1 (reconciliation): Alice opens with a round-0 block, then sends one
//! fingerprint bit per round while Bob answers `0` (more) or `1` (stop).
//! Phase 2 (key): each party computes `z`, the canonically first minimal
//! program for `x` given the reconciliation payload, at the base space level.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::rational::Rational;

pub mod transcript;
pub mod variant_a;
pub mod variant_b;

pub use transcript::{channel_replay, message_bits, Channel, Message, Observer, Sender, Transcript, TranscriptFile};
pub use variant_a::{round_false_match, run_protocol_a, ParamsA};
pub use variant_b::{run_protocol_b, ParamsB, SetupB};

/// Space level at which keys are computed and Bob's variant-A candidate sets
/// are formed.
pub const BASE_LEVEL: i32 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    /// GF(2) linear fingerprints; the matrix travels in round 0.
    A,
    /// Prime-residue check plus prefix-extractor fingerprints.
    B,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::A => "A",
            Variant::B => "B",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Variant::A),
            "B" | "b" => Ok(Variant::B),
            _ => Err(Error::InvalidParameter(format!("unknown variant {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum Params {
    A(ParamsA),
    B(ParamsB),
}

impl Params {
    pub fn variant(&self) -> Variant {
        match self {
            Params::A(_) => Variant::A,
            Params::B(_) => Variant::B,
        }
    }

    pub fn epsilon(&self) -> Rational {
        match self {
            Params::A(p) => p.epsilon,
            Params::B(p) => p.epsilon,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Params::A(p) => p.n,
            Params::B(p) => p.n,
        }
    }

    /// Header lines for transcript files.
    pub fn entries(&self) -> Vec<(String, String)> {
        let kv = |k: &str, v: String| (k.to_string(), v);
        match self {
            Params::A(p) => vec![
                kv("delta", p.delta.to_string()),
                kv("log_inv_delta", p.log_inv_delta.to_string()),
                kv("rows", p.rows.to_string()),
                kv("max_round", p.max_round.to_string()),
            ],
            Params::B(p) => vec![
                kv("d", p.d.to_string()),
                kv("m", p.m.to_string()),
                kv("c", p.c.to_string()),
                kv("s", p.s.to_string()),
                kv("t", p.t.to_string()),
                kv("certified", p.certified.to_string()),
                kv("max_round", p.max_round.to_string()),
                kv("extractor", p.extractor_digest.clone()),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub seed: u64,
    pub params: Params,
    pub z_alice: BitString,
    pub z_bob: Option<BitString>,
    /// Bob's reconstruction of `x`.
    pub x_bob: Option<BitString>,
    pub agreed: bool,
    pub transcript: Transcript,
    /// Alice's reconciliation payload.
    pub p: BitString,
    /// The condition tuple `z` is minimal for (`[p, H]` for A, `[p]` for B).
    pub key_condition: Vec<BitString>,
    /// The round at which Bob stopped.
    pub rounds_used: usize,
    pub round0_bits: usize,
    /// Fingerprint bits sent after round 0.
    pub prefix_bits: usize,
}

impl ProtocolResult {
    pub fn variant(&self) -> Variant {
        self.params.variant()
    }

    pub fn transcript_file(&self) -> TranscriptFile {
        TranscriptFile {
            variant: self.variant(),
            n: self.params.n(),
            epsilon: self.params.epsilon(),
            seed: self.seed,
            params: self.params.entries(),
            transcript: self.transcript.clone(),
        }
    }
}

pub(crate) trait Party {
    /// Handles the peer's message; `None` ends the conversation.
    fn on_message(&mut self, msg: &Message) -> Result<Option<Message>>;
}

/// Delivers `first` and alternates replies until one party falls silent.
pub(crate) fn converse(
    first: Message,
    alice: &mut impl Party,
    bob: &mut impl Party,
    channel: &mut Channel,
) -> Result<()> {
    let mut msg = first;
    loop {
        channel.deliver(msg.clone())?;
        let reply = match msg.sender {
            Sender::Alice => bob.on_message(&msg)?,
            Sender::Bob => alice.on_message(&msg)?,
        };
        match reply {
            Some(r) => msg = r,
            None => return Ok(()),
        }
    }
}

pub(crate) fn decode_block(block: &BitString, parts: usize) -> Result<Vec<BitString>> {
    let fields =
        crate::bits::decode_condition(block).map_err(|e| Error::MalformedTranscript(format!("round-0 block: {e}")))?;
    if fields.len() != parts {
        return Err(Error::MalformedTranscript(format!(
            "round-0 block has {} parts, expected {parts}",
            fields.len()
        )));
    }
    Ok(fields)
}

pub(crate) fn numeral(bits: &BitString) -> Result<u64> {
    bits.to_uint()
        .and_then(|v| u64::try_from(v).ok())
        .ok_or_else(|| Error::MalformedTranscript(format!("bad numeral {bits}")))
}
