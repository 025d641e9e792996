use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::rng;

/// The first `t` primes in ascending order (sieve of Eratosthenes).
pub fn first_primes(t: usize) -> Vec<u64> {
    if t == 0 {
        return Vec::new();
    }
    // p_t < t (ln t + ln ln t) for t >= 6
    let tf = t.max(6) as f64;
    let limit = (tf * (tf.ln() + tf.ln().ln())).ceil() as usize + 16;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::with_capacity(t);
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        if primes.len() == t {
            break;
        }
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    assert_eq!(primes.len(), t, "sieve bound too small");
    primes
}

/// The integer a string stands for: its position in canonical order. Strings
/// of length `n` map into `[2^n - 1, 2^(n+1) - 1)`.
pub fn string_value(x: &BitString) -> Result<u128> {
    x.canonical_index().ok_or(Error::InputTooLong {
        len: x.len(),
        limit: 126,
    })
}

/// `h_t(x) = (value(x) mod q, q)` with `q` drawn among the first `t` primes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeHash {
    pub residue: u64,
    pub modulus: u64,
    pub prime_index_bound: usize,
}

impl PrimeHash {
    pub fn with_modulus(x: &BitString, modulus: u64, prime_index_bound: usize) -> Result<Self> {
        Ok(Self {
            residue: (string_value(x)? % modulus as u128) as u64,
            modulus,
            prime_index_bound,
        })
    }

    pub fn matches(&self, u: &BitString) -> Result<bool> {
        Ok((string_value(u)? % self.modulus as u128) as u64 == self.residue)
    }
}

/// Draws `q` uniformly among `primes` (which must be the first `t` primes).
pub fn prime_hash_from(x: &BitString, primes: &[u64], seed: u64) -> Result<PrimeHash> {
    if primes.is_empty() {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    let q = primes[rng::stream(seed).random_range(0..primes.len())];
    PrimeHash::with_modulus(x, q, primes.len())
}

pub fn prime_hash(x: &BitString, t: usize, seed: u64) -> Result<PrimeHash> {
    prime_hash_from(x, &first_primes(t), seed)
}

/// Does `h(first)` land on the residue of any string in `rest` for the prime
/// drawn from `seed`?
pub fn fingerprint_collides(first: &BitString, rest: &[BitString], primes: &[u64], seed: u64) -> Result<bool> {
    let h = prime_hash_from(first, primes, seed)?;
    for u in rest {
        if h.matches(u)? {
            return Ok(true);
        }
    }
    Ok(false)
}
