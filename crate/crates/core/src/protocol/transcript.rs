//! The public channel and its transcript.
//!
//! Each message becomes one field: a sender bit (`0` Alice, `1` Bob)
//! followed by the payload. The canonical serialization is the tuple encoding
//! of those fields, and it is exactly the condition string an eavesdropper's
//! complexity queries are made against.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bits::{decode_condition, encode_condition, field_header_len, BitString};
use crate::error::{Error, Result};
use crate::rational::Rational;

use super::Variant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sender {
    Alice,
    Bob,
}

impl Sender {
    fn bit(self) -> bool {
        self == Sender::Bob
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub round: usize,
    pub sender: Sender,
    pub payload: BitString,
}

impl Message {
    pub fn alice(round: usize, payload: BitString) -> Self {
        Self {
            round,
            sender: Sender::Alice,
            payload,
        }
    }

    pub fn bob(round: usize, stop: bool) -> Self {
        Self {
            round,
            sender: Sender::Bob,
            payload: BitString::from_bits(vec![stop]),
        }
    }

    fn field(&self) -> BitString {
        let mut f = BitString::with_capacity(self.payload.len() + 1);
        f.push(self.sender.bit());
        f.extend_from(&self.payload);
        f
    }
}

/// Bits a message of `payload_len` bits occupies in the serialization.
pub fn message_bits(payload_len: usize) -> usize {
    field_header_len(payload_len + 1) + payload_len + 1
}

/// A passive eavesdropper. It checks the shape of the conversation (Alice
/// opens with a block, then one Alice bit and one Bob bit per round, Bob's
/// bits forming `0*1`) and accumulates what it has seen.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Observer {
    pub messages: usize,
    pub round0: Option<BitString>,
    pub alice_bits: BitString,
    pub bob_bits: BitString,
    pub finished: bool,
}

impl Observer {
    pub fn observe(&mut self, msg: &Message) -> Result<()> {
        let bad = |why: String| Err(Error::MalformedTranscript(why));
        if self.finished {
            return bad(format!("message {} after Bob stopped", self.messages));
        }
        let expected = if self.messages.is_multiple_of(2) {
            Sender::Alice
        } else {
            Sender::Bob
        };
        if msg.sender != expected {
            return bad(format!(
                "message {} sent out of turn by {:?}",
                self.messages, msg.sender
            ));
        }
        if msg.round != self.messages / 2 {
            return bad(format!("message {} labelled round {}", self.messages, msg.round));
        }
        if self.messages > 0 && msg.payload.len() != 1 {
            return bad(format!(
                "message {} carries {} bits, expected 1",
                self.messages,
                msg.payload.len()
            ));
        }
        match (self.messages, msg.sender) {
            (0, _) => self.round0 = Some(msg.payload.clone()),
            (_, Sender::Alice) => self.alice_bits.extend_from(&msg.payload),
            (_, Sender::Bob) => {
                self.bob_bits.extend_from(&msg.payload);
                self.finished = msg.payload.get(0) == Some(true);
            }
        }
        self.messages += 1;
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub messages: Vec<Message>,
}

impl Transcript {
    pub fn fields(&self) -> Vec<BitString> {
        self.messages.iter().map(Message::field).collect()
    }

    pub fn serialization(&self) -> BitString {
        encode_condition(&self.fields())
    }

    pub fn from_serialization(bits: &BitString) -> Result<Self> {
        Ok(Self {
            messages: channel_replay(bits)?,
        })
    }

    pub fn len_bits(&self) -> usize {
        self.messages.iter().map(|m| message_bits(m.payload.len())).sum()
    }

    /// Raw payload bits, without sender bits or length headers.
    pub fn payload_bits(&self) -> usize {
        self.messages.iter().map(|m| m.payload.len()).sum()
    }

    pub fn framing_bits(&self) -> usize {
        self.len_bits() - self.payload_bits()
    }

    pub fn round0(&self) -> Option<&BitString> {
        self.messages.first().map(|m| &m.payload)
    }

    pub fn bob_bits(&self) -> BitString {
        let mut s = BitString::new();
        for m in self.messages.iter().filter(|m| m.sender == Sender::Bob) {
            s.extend_from(&m.payload);
        }
        s
    }

    /// Alice's single-bit messages after round 0.
    pub fn alice_bits(&self) -> BitString {
        let mut s = BitString::new();
        for m in self.messages.iter().skip(1).filter(|m| m.sender == Sender::Alice) {
            s.extend_from(&m.payload);
        }
        s
    }

    pub fn digest(&self) -> String {
        self.serialization().sha256_hex()
    }

    pub fn observe_all(&self) -> Result<Observer> {
        let mut obs = Observer::default();
        for m in &self.messages {
            obs.observe(m)?;
        }
        Ok(obs)
    }
}

/// Decodes a canonical serialization back into its messages, validating the
/// conversation shape along the way.
pub fn channel_replay(bits: &BitString) -> Result<Vec<Message>> {
    let fields = decode_condition(bits).map_err(|e| Error::MalformedTranscript(format!("undecodable framing: {e}")))?;
    let mut obs = Observer::default();
    let mut out = Vec::with_capacity(fields.len());
    for (i, f) in fields.into_iter().enumerate() {
        let sender = match f.get(0) {
            Some(false) => Sender::Alice,
            Some(true) => Sender::Bob,
            None => return Err(Error::MalformedTranscript(format!("field {i} has no sender bit"))),
        };
        let msg = Message {
            round: i / 2,
            sender,
            payload: f.slice(1, f.len()),
        };
        obs.observe(&msg)?;
        out.push(msg);
    }
    Ok(out)
}

/// Records deliveries and keeps an observer in step with them.
#[derive(Debug, Default)]
pub struct Channel {
    transcript: Transcript,
    observer: Observer,
}

impl Channel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn deliver(&mut self, msg: Message) -> Result<()> {
        self.observer.observe(&msg)?;
        self.transcript.messages.push(msg);
        Ok(())
    }

    pub fn observer(&self) -> &Observer {
        &self.observer
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }
}

const FILE_TAG: &str = "skalab-transcript v1";

/// On-disk transcript: a text header echoing the run parameters, then the
/// canonical serialization as a `0`/`1` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptFile {
    pub variant: Variant,
    pub n: usize,
    pub epsilon: Rational,
    pub seed: u64,
    pub params: Vec<(String, String)>,
    pub transcript: Transcript,
}

impl TranscriptFile {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{FILE_TAG}\nvariant {}\nn {}\nepsilon {}\nseed {}\n",
            self.variant, self.n, self.epsilon, self.seed
        );
        for (k, v) in &self.params {
            s.push_str(&format!("param {k} {v}\n"));
        }
        s.push_str(&format!("bits {}\n", self.transcript.serialization()));
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |why: &str| Error::Format(format!("transcript file: {why}"));
        let mut lines = text.lines();
        if lines.next() != Some(FILE_TAG) {
            return Err(bad("missing format tag"));
        }
        let mut header = |key: &str| -> Result<String> {
            lines
                .next()
                .and_then(|l| l.strip_prefix(key))
                .and_then(|r| r.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| bad(&format!("expected `{key}`")))
        };
        let variant = Variant::from_str(&header("variant")?)?;
        let n = header("n")?.parse().map_err(|_| bad("bad n"))?;
        let epsilon = header("epsilon")?.parse()?;
        let seed = header("seed")?.parse().map_err(|_| bad("bad seed"))?;
        let mut params = Vec::new();
        let mut bits = None;
        for line in lines {
            if let Some(rest) = line.strip_prefix("param ") {
                let (k, v) = rest.split_once(' ').ok_or_else(|| bad("param without value"))?;
                params.push((k.to_string(), v.to_string()));
            } else if let Some(rest) = line.strip_prefix("bits ") {
                bits = Some(rest.parse::<BitString>()?);
            } else if !line.trim().is_empty() {
                return Err(bad("unexpected line"));
            }
        }
        let bits = bits.ok_or_else(|| bad("missing bits line"))?;
        Ok(Self {
            variant,
            n,
            epsilon,
            seed,
            params,
            transcript: Transcript::from_serialization(&bits)?,
        })
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }
}

impl fmt::Display for TranscriptFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
