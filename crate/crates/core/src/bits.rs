//! Bit strings, the self-delimiting integer code, and tuple encoding.
//!
//! Every string in the laboratory (inputs, programs, fingerprints, transcripts)
//! is a [`BitString`]. Tuples of strings are flattened with
//! [`encode_condition`], which prefixes each part with the Elias-gamma code of
//! `len + 1`. The interpreter in [`crate::vm`] decodes the same framing, so a
//! tuple condition is a sequence of fields the machine can address.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::Error;

/// A finite sequence of bits. The empty string is valid.
///
/// `Ord` is the canonical order used everywhere: shorter strings first, then
/// lexicographic with `0 < 1`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn with_capacity(cap: usize) -> Self {
        Self {
            bits: Vec::with_capacity(cap),
        }
    }

    /// The `len`-bit big-endian representation of `value`.
    pub fn from_uint(value: u128, len: usize) -> Self {
        let bits = (0..len).rev().map(|i| i < 128 && (value >> i) & 1 == 1).collect();
        Self { bits }
    }

    /// Minimal binary numeral of `value` (`"0"` for zero).
    pub fn binary(value: u128) -> Self {
        if value == 0 {
            return Self::from_bits(vec![false]);
        }
        let len = 128 - value.leading_zeros() as usize;
        Self::from_uint(value, len)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn extend_bits(&mut self, bits: &[bool]) {
        self.bits.extend_from_slice(bits);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    pub fn prefix(&self, len: usize) -> BitString {
        Self::from_bits(self.bits[..len.min(self.len())].to_vec())
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        Self::from_bits(self.bits[start..end].to_vec())
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.bits.starts_with(&self.bits)
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString, Error> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(Self::from_bits(
            self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect(),
        ))
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    /// Big-endian unsigned value of the bits (at most 128 bits).
    pub fn to_uint(&self) -> Option<u128> {
        if self.len() > 128 {
            return None;
        }
        Some(self.bits.iter().fold(0u128, |acc, &b| (acc << 1) | b as u128))
    }

    /// Position of this string in canonical order (`"" -> 0`, `"0" -> 1`,
    /// `"1" -> 2`, `"00" -> 3`, ...). Injective and order-preserving; strings
    /// of length `n` map below `2^(n+1)`.
    pub fn canonical_index(&self) -> Option<u128> {
        if self.len() >= 127 {
            return None;
        }
        Some((1u128 << self.len()) - 1 + self.to_uint()?)
    }

    /// Inverse of [`canonical_index`](Self::canonical_index).
    pub fn from_canonical_index(index: u128) -> Self {
        let len = 127 - (index + 1).leading_zeros() as usize;
        Self::from_uint(index + 1 - (1u128 << len), len)
    }

    /// Packs bits MSB-first into bytes and prefixes the bit length, so the
    /// result identifies the string exactly.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = (self.len() as u64).to_be_bytes().to_vec();
        for chunk in self.bits.chunks(8) {
            let mut byte = 0u8;
            for (i, &b) in chunk.iter().enumerate() {
                if b {
                    byte |= 0x80 >> i;
                }
            }
            out.push(byte);
        }
        out
    }

    pub fn sha256_hex(&self) -> String {
        hex::encode(Sha256::digest(self.to_bytes()))
    }

    /// All strings of length `n` in canonical order.
    pub fn all_of_len(n: usize) -> impl Iterator<Item = BitString> {
        assert!(n < 64, "refusing to enumerate 2^{n} strings");
        (0..1u64 << n).map(move |v| BitString::from_uint(v as u128, n))
    }

    /// All strings of length `0..=max_len` in canonical order.
    pub fn all_up_to(max_len: usize) -> impl Iterator<Item = BitString> {
        (0..=max_len).flat_map(BitString::all_of_len)
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::MalformedBits(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self::from_bits)
    }
}

impl From<&[bool]> for BitString {
    fn from(bits: &[bool]) -> Self {
        Self::from_bits(bits.to_vec())
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for parsing a literal in tests and fixtures. Panics on bad input.
pub fn bs(s: &str) -> BitString {
    s.parse().expect("bit literal")
}

/// Elias-gamma code of `value >= 1`: `floor(log2 value)` zeros followed by the
/// binary numeral of `value`.
pub fn gamma_encode(value: u64, out: &mut BitString) {
    assert!(value >= 1, "gamma code is defined for positive integers");
    let width = 64 - value.leading_zeros() as usize;
    for _ in 1..width {
        out.push(false);
    }
    for i in (0..width).rev() {
        out.push((value >> i) & 1 == 1);
    }
}

pub fn gamma_len(value: u64) -> usize {
    let width = 64 - value.leading_zeros() as usize;
    2 * width - 1
}

/// Decodes a gamma codeword from `bits[pos..end]`. Returns the value and the
/// position just after the codeword, or `None` if the codeword is truncated.
pub fn gamma_decode(bits: &[bool], pos: usize, end: usize) -> Option<(u64, usize)> {
    let mut zeros = 0usize;
    let mut p = pos;
    while p < end && !bits[p] {
        zeros += 1;
        p += 1;
    }
    if zeros >= 63 || p + zeros + 1 > end {
        return None;
    }
    let mut value = 0u64;
    for &b in &bits[p..p + zeros + 1] {
        value = (value << 1) | b as u64;
    }
    Some((value, p + zeros + 1))
}

/// Length of the field header written before a part of `len` bits.
pub fn field_header_len(len: usize) -> usize {
    gamma_len(len as u64 + 1)
}

/// Self-delimiting concatenation: each part is written as
/// `gamma(len + 1) || part`.
pub fn encode_condition<'a, I>(parts: I) -> BitString
where
    I: IntoIterator<Item = &'a BitString>,
{
    let mut out = BitString::new();
    for part in parts {
        gamma_encode(part.len() as u64 + 1, &mut out);
        out.extend_from(part);
    }
    out
}

/// Reads one field starting at `pos`, bounded by `end`. Returns the field's
/// `(start, end)` span.
pub fn decode_field(bits: &[bool], pos: usize, end: usize) -> Option<(usize, usize)> {
    let (v, start) = gamma_decode(bits, pos, end)?;
    let len = (v - 1) as usize;
    let stop = start.checked_add(len)?;
    (stop <= end).then_some((start, stop))
}

/// Left-to-right inverse of [`encode_condition`].
pub fn decode_condition(encoded: &BitString) -> Result<Vec<BitString>, Error> {
    let bits = encoded.bits();
    let mut parts = Vec::new();
    let mut pos = 0;
    while pos < bits.len() {
        let (start, stop) = decode_field(bits, pos, bits.len()).ok_or(Error::MalformedEncoding { position: pos })?;
        parts.push(BitString::from(&bits[start..stop]));
        pos = stop;
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_codewords() {
        let code = |v| {
            let mut b = BitString::new();
            gamma_encode(v, &mut b);
            b.to_string()
        };
        assert_eq!(code(1), "1");
        assert_eq!(code(2), "010");
        assert_eq!(code(3), "011");
        assert_eq!(code(4), "00100");
        assert_eq!(code(8), "0001000");
        for v in 1..200 {
            assert_eq!(code(v).len(), gamma_len(v));
        }
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode_condition(&[]), BitString::new());
        let one = vec![bs("1")];
        assert_eq!(encode_condition(&one).to_string(), "0101");
        assert_eq!(decode_condition(&encode_condition(&one)).unwrap(), one);

        let a = encode_condition(&[bs("0"), bs("00")]);
        assert_ne!(a, encode_condition(&[bs("000")]));
        assert_ne!(a, encode_condition(&[bs("00"), bs("0")]));
    }

    #[test]
    fn decode_rejects_truncation() {
        assert!(decode_condition(&bs("0")).is_err());
        assert!(decode_condition(&bs("011")).is_err());
        assert_eq!(decode_condition(&bs("0100")).unwrap(), vec![bs("0")]);
    }

    #[test]
    fn canonical_order() {
        let mut v = vec![bs("10"), bs(""), bs("1"), bs("00"), bs("0")];
        v.sort();
        assert_eq!(v, vec![bs(""), bs("0"), bs("1"), bs("00"), bs("10")]);
    }

    #[test]
    fn canonical_index_is_an_order_isomorphism() {
        let all: Vec<_> = BitString::all_up_to(12).collect();
        for (i, s) in all.iter().enumerate() {
            assert_eq!(s.canonical_index(), Some(i as u128));
            assert_eq!(BitString::from_canonical_index(i as u128), *s);
            assert!(s.canonical_index().unwrap() < 1u128 << (s.len() + 1));
        }
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn binary_numerals() {
        assert_eq!(BitString::binary(0).to_string(), "0");
        assert_eq!(BitString::binary(6).to_string(), "110");
        assert_eq!(BitString::binary(6).to_uint(), Some(6));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("10a1".parse::<BitString>().is_err());
        assert_eq!("".parse::<BitString>().unwrap(), BitString::new());
    }
}
