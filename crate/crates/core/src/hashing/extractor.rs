//! Explicit extractor tables `E : {0,1}^n x {0,1}^d -> {0,1}^m`, viewed as
//! bipartite graphs with `2^n` left nodes, `2^m` right nodes, and `D = 2^d`
//! seed-indexed edges per left node.
//!
//! Left nodes, seeds, and right nodes are identified with the big-endian value
//! of their bit strings. The `k`-prefix of a table keeps the top `k` output bits.

use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::rng;

const FORMAT_TAG: &str = "extractor-table v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractorTable {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub epsilon: Rational,
    pub seed: u64,
    /// Search attempt that produced the table (0 for hand-built tables).
    pub attempt: u64,
    pub prefix_certified_upto: Option<usize>,
    /// Row-major: entry `u * D + w` is `E(u, w)`.
    table: Vec<u32>,
}

impl ExtractorTable {
    pub fn from_fn(n: usize, d: usize, m: usize, f: impl Fn(u64, u64) -> u32) -> Result<Self> {
        check_dims(n, d, m)?;
        let mut table = Vec::with_capacity(1 << (n + d));
        for u in 0..1u64 << n {
            for w in 0..1u64 << d {
                let v = f(u, w);
                if m < 32 && v >> m != 0 {
                    return Err(Error::InvalidParameter(format!("output {v} wider than {m} bits")));
                }
                table.push(v);
            }
        }
        Ok(Self {
            n,
            d,
            m,
            epsilon: Rational::integer(0),
            seed: 0,
            attempt: 0,
            prefix_certified_upto: None,
            table,
        })
    }

    /// `E(x, w) = w`, with `m = d`.
    pub fn identity_seed(n: usize, d: usize) -> Result<Self> {
        Self::from_fn(n, d, d, |_, w| w as u32)
    }

    /// Every edge lands on the all-zero right node.
    pub fn constant(n: usize, d: usize, m: usize) -> Result<Self> {
        Self::from_fn(n, d, m, |_, _| 0)
    }

    /// Uniformly random entries from the ChaCha20 stream for `seed`.
    pub fn random(n: usize, d: usize, m: usize, seed: u64) -> Result<Self> {
        check_dims(n, d, m)?;
        let mut stream = rng::stream(seed);
        let mut t = Self::from_fn(n, d, m, |_, _| 0)?;
        for v in &mut t.table {
            *v = if m == 0 { 0 } else { stream.random_range(0..1u32 << m) };
        }
        t.seed = seed;
        Ok(t)
    }

    pub fn left_count(&self) -> u64 {
        1 << self.n
    }

    pub fn degree(&self) -> u64 {
        1 << self.d
    }

    pub fn right_count(&self) -> u64 {
        1 << self.m
    }

    pub fn output(&self, u: u64, w: u64) -> u32 {
        self.table[(u * self.degree() + w) as usize]
    }

    pub fn output_bits(&self, u: u64, w: u64) -> BitString {
        BitString::from_uint(self.output(u, w) as u128, self.m)
    }

    /// Right neighbours of `u`, indexed by seed (with multiplicity).
    pub fn neighbours(&self, u: u64) -> &[u32] {
        let d = self.degree() as usize;
        &self.table[u as usize * d..(u as usize + 1) * d]
    }

    /// The table keeping only the first `k` output bits.
    pub fn prefix(&self, k: usize) -> Result<Self> {
        if k > self.m {
            return Err(Error::InvalidParameter(format!(
                "prefix {k} longer than m = {}",
                self.m
            )));
        }
        let shift = self.m - k;
        Ok(Self {
            m: k,
            prefix_certified_upto: self.prefix_certified_upto.map(|c| c.min(k)),
            table: self.table.iter().map(|&v| v >> shift).collect(),
            ..self.clone()
        })
    }

    /// Is the left node `u` adjacent to the right node `prefix` in the graph of
    /// the `|prefix|`-bit prefix table?
    pub fn is_prefix_neighbour(&self, u: u64, prefix: &BitString) -> bool {
        let k = prefix.len();
        if k > self.m {
            return false;
        }
        let target = prefix.to_uint().unwrap_or(0) as u32;
        self.neighbours(u).iter().any(|&v| v >> (self.m - k) == target)
    }

    /// Canonical text serialization: header lines, then one line per left
    /// node holding its `D` outputs as `m`-bit strings.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{FORMAT_TAG}").unwrap();
        writeln!(s, "n {}", self.n).unwrap();
        writeln!(s, "d {}", self.d).unwrap();
        writeln!(s, "m {}", self.m).unwrap();
        writeln!(s, "epsilon {}", self.epsilon).unwrap();
        match self.prefix_certified_upto {
            Some(k) => writeln!(s, "certified {k}").unwrap(),
            None => writeln!(s, "certified none").unwrap(),
        }
        writeln!(s, "seed {}", self.seed).unwrap();
        writeln!(s, "attempt {}", self.attempt).unwrap();
        writeln!(s, "table").unwrap();
        for u in 0..self.left_count() {
            let row: Vec<String> = self
                .neighbours(u)
                .iter()
                .map(|&v| {
                    if self.m == 0 {
                        "-".to_string()
                    } else {
                        BitString::from_uint(v as u128, self.m).to_string()
                    }
                })
                .collect();
            writeln!(s, "{}", row.join(" ")).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Format(format!("extractor table: {msg}"));
        let mut lines = text.lines();
        if lines.next() != Some(FORMAT_TAG) {
            return Err(bad("missing format tag"));
        }
        let mut field = |name: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| bad("truncated header"))?;
            line.strip_prefix(name)
                .and_then(|r| r.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| bad(&format!("expected `{name}`")))
        };
        let num = |s: String| s.parse::<usize>().map_err(|_| bad("bad integer"));
        let n = num(field("n")?)?;
        let d = num(field("d")?)?;
        let m = num(field("m")?)?;
        let epsilon: Rational = field("epsilon")?.parse()?;
        let certified = match field("certified")?.as_str() {
            "none" => None,
            v => Some(v.parse::<usize>().map_err(|_| bad("bad certified level"))?),
        };
        let seed = field("seed")?.parse::<u64>().map_err(|_| bad("bad seed"))?;
        let attempt = field("attempt")?.parse::<u64>().map_err(|_| bad("bad attempt"))?;
        if lines.next() != Some("table") {
            return Err(bad("missing table marker"));
        }
        check_dims(n, d, m)?;
        let mut table = Vec::with_capacity(1 << (n + d));
        for _ in 0..1u64 << n {
            let line = lines.next().ok_or_else(|| bad("truncated table"))?;
            let row: Vec<&str> = line.split(' ').collect();
            if row.len() != 1 << d {
                return Err(bad("row has the wrong degree"));
            }
            for tok in row {
                if m == 0 {
                    if tok != "-" {
                        return Err(bad("expected `-` for empty output"));
                    }
                    table.push(0);
                    continue;
                }
                let v: BitString = tok.parse()?;
                if v.len() != m {
                    return Err(bad("entry has the wrong width"));
                }
                table.push(v.to_uint().unwrap() as u32);
            }
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(bad("trailing data"));
        }
        Ok(Self {
            n,
            d,
            m,
            epsilon,
            seed,
            attempt,
            prefix_certified_upto: certified,
            table,
        })
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }
}

fn check_dims(n: usize, d: usize, m: usize) -> Result<()> {
    if n > 16 || d > 12 || m > 31 || n + d > 24 {
        return Err(Error::InvalidParameter(format!(
            "extractor dimensions n={n}, d={d}, m={m} are beyond micro scale"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    /// Every flat source of size `2^k`; refuses more than `max_sources`.
    Exhaustive { max_sources: u64 },
    /// `sources` random flat sources drawn from `seed`.
    Sampled { sources: u64, seed: u64 },
}

impl VerifyMode {
    pub fn exhaustive() -> Self {
        VerifyMode::Exhaustive {
            max_sources: 50_000_000,
        }
    }

    pub fn sampled(seed: u64) -> Self {
        VerifyMode::Sampled { sources: 10_000, seed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictKind {
    Pass,
    Fail,
    /// Sampling found no violating source; not a certificate.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Largest total-variation distance from uniform over the sources checked.
    pub max_deviation: Rational,
    pub sources_checked: u64,
    /// A source attaining `max_deviation`.
    pub worst_source: Vec<u64>,
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// Numerator of the total-variation distance; the denominator is
/// `2 * |B| * D * M`.
fn tv_numerator(counts: &[u64], weight: u64) -> u64 {
    let m = counts.len() as u64;
    counts.iter().map(|&c| (c * m).abs_diff(weight)).sum()
}

/// Checks the `(k, epsilon)` extractor property: for every flat source `B` of
/// size `2^k`, the total-variation distance between `E(U_B, U_d)` and uniform
/// on `m` bits (the maximum over right-node sets `A` of
/// `|Pr[E(U_B,U_d) in A] - |A|/M|`) must be below `epsilon`.
pub fn verify_extractor(e: &ExtractorTable, k: usize, epsilon: Rational, mode: VerifyMode) -> Result<Verdict> {
    if k > e.n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {}", e.n)));
    }
    let size = 1u64 << k;
    let big_m = e.right_count();
    let weight = size * e.degree();
    let den = 2 * weight * big_m;

    let (max_num, worst, checked) = match mode {
        VerifyMode::Exhaustive { max_sources } => {
            let total = binomial(e.left_count(), size);
            if total > max_sources as u128 {
                return Err(Error::BudgetExceeded { quota: max_sources });
            }
            let mut search = SubsetSearch {
                e,
                size: size as usize,
                counts: vec![0; big_m as usize],
                chosen: Vec::with_capacity(size as usize),
                weight,
                best: (0, Vec::new()),
            };
            search.descend(0);
            (search.best.0, search.best.1, total as u64)
        }
        VerifyMode::Sampled { sources, seed } => {
            let (num, worst) = (0..sources)
                .into_par_iter()
                .map(|i| {
                    let mut stream = rng::derived_stream(seed, "flat-source", i);
                    let mut src: Vec<u64> = sample(&mut stream, e.left_count() as usize, size as usize)
                        .into_iter()
                        .map(|u| u as u64)
                        .collect();
                    src.sort_unstable();
                    let mut counts = vec![0u64; big_m as usize];
                    for &u in &src {
                        for &v in e.neighbours(u) {
                            counts[v as usize] += 1;
                        }
                    }
                    (tv_numerator(&counts, weight), src)
                })
                .reduce(
                    || (0, Vec::new()),
                    |a, b| {
                        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1 && b.0 > 0) {
                            b
                        } else {
                            a
                        }
                    },
                );
            (num, worst, sources)
        }
    };
    let max_deviation = Rational::new(max_num, den);
    let violated = max_deviation >= epsilon;
    let kind = match (violated, mode) {
        (true, _) => VerdictKind::Fail,
        (false, VerifyMode::Exhaustive { .. }) => VerdictKind::Pass,
        (false, VerifyMode::Sampled { .. }) => VerdictKind::Inconclusive,
    };
    Ok(Verdict {
        kind,
        max_deviation,
        sources_checked: checked,
        worst_source: worst,
    })
}

struct SubsetSearch<'a> {
    e: &'a ExtractorTable,
    size: usize,
    counts: Vec<u64>,
    chosen: Vec<u64>,
    weight: u64,
    best: (u64, Vec<u64>),
}

impl SubsetSearch<'_> {
    fn descend(&mut self, from: u64) {
        if self.chosen.len() == self.size {
            let num = tv_numerator(&self.counts, self.weight);
            if num > self.best.0 || self.best.1.is_empty() {
                self.best = (num, self.chosen.clone());
            }
            return;
        }
        let remaining = (self.size - self.chosen.len()) as u64;
        for u in from..=self.e.left_count() - remaining {
            for &v in self.e.neighbours(u) {
                self.counts[v as usize] += 1;
            }
            self.chosen.push(u);
            self.descend(u + 1);
            self.chosen.pop();
            for &v in self.e.neighbours(u) {
                self.counts[v as usize] -= 1;
            }
        }
    }
}

fn b_degrees(e: &ExtractorTable, b: &[u64]) -> Vec<u64> {
    let mut counts = vec![0u64; e.right_count() as usize];
    for &u in b {
        for &v in e.neighbours(u) {
            counts[v as usize] += 1;
        }
    }
    counts
}

/// Right nodes with more than `(1/epsilon) * |B| D / M` neighbours in `B`,
/// counted with multiplicity over seeds. Ties are not heavy.
pub fn heavy_right_nodes(e: &ExtractorTable, b: &[u64], epsilon: Rational) -> Result<Vec<u64>> {
    if b.is_empty() {
        return Err(Error::InvalidParameter("B must be non-empty".into()));
    }
    let big_m = e.right_count() as u128;
    let rhs = b.len() as u128 * e.degree() as u128 * epsilon.denom() as u128;
    Ok(b_degrees(e, b)
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c as u128 * big_m * epsilon.numer() as u128 > rhs)
        .map(|(v, _)| v as u64)
        .collect())
}

/// Left nodes for which more than `2 epsilon D` of their `D` seed-indexed
/// neighbours are heavy for `B`.
pub fn poor_left_nodes(e: &ExtractorTable, b: &[u64], epsilon: Rational) -> Result<Vec<u64>> {
    let heavy = heavy_right_nodes(e, b, epsilon)?;
    let mut is_heavy = vec![false; e.right_count() as usize];
    for v in heavy {
        is_heavy[v as usize] = true;
    }
    let threshold = 2 * epsilon.numer() as u128 * e.degree() as u128;
    Ok((0..e.left_count())
        .filter(|&u| {
            let hits = e.neighbours(u).iter().filter(|&&v| is_heavy[v as usize]).count() as u128;
            hits * epsilon.denom() as u128 > threshold
        })
        .collect())
}

/// Searches seeded random tables until one whose `k`-prefix is a verified
/// `(k, epsilon)` extractor for every `1 <= k <= certify_upto`.
pub fn build_prefix_extractor(
    n: usize,
    d: usize,
    m: usize,
    epsilon: Rational,
    seed: u64,
    certify_upto: usize,
    max_attempts: u64,
) -> Result<ExtractorTable> {
    if certify_upto > m.min(n) {
        return Err(Error::InvalidParameter(format!(
            "cannot certify {certify_upto} levels with n = {n}, m = {m}"
        )));
    }
    for attempt in 0..max_attempts {
        let mut table = ExtractorTable::random(n, d, m, rng::derive_seed(seed, "extractor", attempt))?;
        let mut ok = true;
        for k in 1..=certify_upto {
            let verdict = verify_extractor(&table.prefix(k)?, k, epsilon, VerifyMode::exhaustive())?;
            if verdict.kind != VerdictKind::Pass {
                ok = false;
                break;
            }
        }
        if ok {
            table.seed = seed;
            table.attempt = attempt;
            table.epsilon = epsilon;
            table.prefix_certified_upto = Some(certify_upto);
            return Ok(table);
        }
    }
    Err(Error::SearchExhausted { attempts: max_attempts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(s: &str) -> Rational {
        s.parse().unwrap()
    }

    /// Brute-force TV oracle: maximum over all sets A of |Pr[A] - |A|/M|.
    fn tv_by_sets(e: &ExtractorTable, b: &[u64]) -> f64 {
        let big_m = e.right_count() as usize;
        let counts = b_degrees(e, b);
        let total = (b.len() as u64 * e.degree()) as f64;
        (0..1u64 << big_m)
            .map(|mask| {
                let (mut p, mut a) = (0.0, 0usize);
                for (v, &c) in counts.iter().enumerate() {
                    if mask >> v & 1 == 1 {
                        p += c as f64 / total;
                        a += 1;
                    }
                }
                (p - a as f64 / big_m as f64).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_seed_is_perfect() {
        let e = ExtractorTable::identity_seed(4, 2).unwrap();
        for k in 0..=4 {
            let v = verify_extractor(&e, k, eps("0.01"), VerifyMode::exhaustive()).unwrap();
            assert_eq!(v.kind, VerdictKind::Pass);
            assert_eq!(v.max_deviation, Rational::integer(0));
        }
    }

    #[test]
    fn constant_table_fails() {
        let e = ExtractorTable::constant(4, 2, 1).unwrap();
        for k in 0..=2 {
            let v = verify_extractor(&e, k, eps("0.49"), VerifyMode::exhaustive()).unwrap();
            assert_eq!(v.kind, VerdictKind::Fail);
            assert_eq!(v.max_deviation, Rational::new(1, 2));
        }
    }

    #[test]
    fn exact_tv_matches_set_oracle() {
        let e = ExtractorTable::random(4, 2, 2, 5).unwrap();
        let v = verify_extractor(&e, 1, eps("1"), VerifyMode::exhaustive()).unwrap();
        let oracle_max = (0..16u64)
            .flat_map(|a| (a + 1..16).map(move |b| vec![a, b]))
            .map(|b| tv_by_sets(&e, &b))
            .fold(0.0, f64::max);
        assert!((v.max_deviation.to_f64() - oracle_max).abs() < 1e-12);
        assert!((tv_by_sets(&e, &v.worst_source) - oracle_max).abs() < 1e-12);
        assert_eq!(v.sources_checked, 120);
    }

    #[test]
    fn seeded_random_table_golden() {
        let e = ExtractorTable::random(5, 3, 2, 2024).unwrap();
        let v = verify_extractor(&e, 2, eps("0.45"), VerifyMode::exhaustive()).unwrap();
        assert_eq!(v.sources_checked, 35_960);
        assert_eq!(
            (v.kind, v.max_deviation.to_string()),
            (VerdictKind::Pass, "11/32".to_string())
        );
        let mut oracle_max: f64 = 0.0;
        for a in 0..32u64 {
            for b in a + 1..32 {
                for c in b + 1..32 {
                    for d in c + 1..32 {
                        oracle_max = oracle_max.max(tv_by_sets(&e, &[a, b, c, d]));
                    }
                }
            }
        }
        assert!((oracle_max - 11.0 / 32.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_mode_never_certifies() {
        let e = ExtractorTable::identity_seed(4, 2).unwrap();
        let v = verify_extractor(&e, 2, eps("0.1"), VerifyMode::Sampled { sources: 500, seed: 1 }).unwrap();
        assert_eq!(v.kind, VerdictKind::Inconclusive);
        let c = ExtractorTable::constant(4, 2, 2).unwrap();
        let v = verify_extractor(&c, 2, eps("0.1"), VerifyMode::Sampled { sources: 50, seed: 1 }).unwrap();
        assert_eq!(v.kind, VerdictKind::Fail);
    }

    #[test]
    fn sampled_is_worker_independent() {
        let e = ExtractorTable::random(6, 2, 3, 8).unwrap();
        let mode = VerifyMode::Sampled { sources: 2000, seed: 3 };
        let a = verify_extractor(&e, 3, eps("0.5"), mode).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| verify_extractor(&e, 3, eps("0.5"), mode).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn exhaustive_budget() {
        let e = ExtractorTable::random(6, 1, 2, 1).unwrap();
        let mode = VerifyMode::Exhaustive { max_sources: 1000 };
        assert!(matches!(
            verify_extractor(&e, 3, eps("0.5"), mode),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn heavy_nodes_regular_and_micro() {
        // every right node has exactly avg neighbours
        let e = ExtractorTable::identity_seed(3, 2).unwrap();
        let all: Vec<u64> = (0..8).collect();
        assert!(heavy_right_nodes(&e, &all, eps("0.5")).unwrap().is_empty());
        // N=4, M=2, D=1, B = all: heavy iff count > 4, impossible
        let e = ExtractorTable::from_fn(2, 0, 1, |u, _| (u == 3) as u32).unwrap();
        assert!(heavy_right_nodes(&e, &[0, 1, 2, 3], eps("0.5")).unwrap().is_empty());
        assert!(heavy_right_nodes(&e, &[], eps("0.5")).is_err());
    }

    #[test]
    fn poor_nodes_extremes() {
        let e = ExtractorTable::identity_seed(3, 2).unwrap();
        let all: Vec<u64> = (0..8).collect();
        assert!(poor_left_nodes(&e, &all, eps("0.25")).unwrap().is_empty());
        // constant table with a single-node B: the only right node is heavy
        let c = ExtractorTable::constant(3, 2, 2).unwrap();
        assert_eq!(poor_left_nodes(&c, &[5], Rational::new(1, 3)).unwrap(), all);
        // at eps = 1/4 the single right node carries exactly the average: not heavy
        assert!(poor_left_nodes(&c, &[5], eps("0.25")).unwrap().is_empty());
    }

    #[test]
    fn heavy_mass_bound_on_random_graphs() {
        for s in 0..1000u64 {
            let mut stream = rng::derived_stream(s, "graph", 0);
            let (n, d, m) = (
                stream.random_range(2..6),
                stream.random_range(0..3),
                stream.random_range(1..4),
            );
            let e = ExtractorTable::random(n, d, m, s).unwrap();
            let size = stream.random_range(1..=(1usize << n));
            let b: Vec<u64> = sample(&mut stream, 1 << n, size)
                .into_iter()
                .map(|u| u as u64)
                .collect();
            let epsilon = Rational::new(stream.random_range(1..10), 10);
            let heavy = heavy_right_nodes(&e, &b, epsilon).unwrap();
            // |A| <= eps * M, exactly
            assert!(heavy.len() as u128 * epsilon.denom() as u128 <= epsilon.numer() as u128 * e.right_count() as u128);
        }
    }

    #[test]
    fn build_trivial_and_golden() {
        let t = build_prefix_extractor(4, 3, 4, eps("0.45"), 11, 0, 10).unwrap();
        assert_eq!(t.attempt, 0);
        assert_eq!(t.prefix_certified_upto, Some(0));

        let t = build_prefix_extractor(4, 3, 4, eps("0.45"), 11, 1, 1000).unwrap();
        assert_eq!(
            t.digest(),
            "f12e3bcce15fa3fd30e9b9813bfefe0b6defce622be19aa603b2686eef23e068"
        );
        let v = verify_extractor(&t.prefix(1).unwrap(), 1, eps("0.45"), VerifyMode::exhaustive()).unwrap();
        assert_eq!(v.kind, VerdictKind::Pass);
        assert_eq!(ExtractorTable::from_text(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn search_exhausted() {
        assert!(matches!(
            build_prefix_extractor(4, 0, 4, eps("0.01"), 1, 2, 3),
            Err(Error::SearchExhausted { attempts: 3 })
        ));
    }

    #[test]
    fn text_format_rejects_damage() {
        let t = ExtractorTable::random(2, 1, 2, 3).unwrap();
        let text = t.to_text();
        assert!(ExtractorTable::from_text(&text.replace("n 2", "n x")).is_err());
        assert!(ExtractorTable::from_text(&text[..text.len() - 4]).is_err());
        assert!(ExtractorTable::from_text(&(text.clone() + "01\n")).is_err());
    }

    #[test]
    fn prefix_neighbourhood() {
        let e = ExtractorTable::from_fn(2, 1, 3, |u, w| (u * 2 + w) as u32).unwrap();
        // node 1 maps to 010, 011
        assert!(e.is_prefix_neighbour(1, &"01".parse().unwrap()));
        assert!(!e.is_prefix_neighbour(1, &"1".parse().unwrap()));
        assert!(e.is_prefix_neighbour(3, &BitString::new()));
    }
}
