//! Shared inputs for the criterion benches in `benches/`.

use skalab::analysis::sample_pair;
use skalab::hashing::{build_prefix_extractor, ExtractorTable};
use skalab::{BitString, Oracle, OracleConfig, Rational, SpaceSchedule};

/// A fresh oracle for `n`-bit inputs with the default schedule.
pub fn oracle(n: usize) -> Oracle {
    Oracle::new(SpaceSchedule::default(), OracleConfig::for_input_len(n)).expect("default oracle")
}

/// The certified micro extractor used by the variant-B reference sweep.
pub fn micro_extractor() -> ExtractorTable {
    build_prefix_extractor(4, 5, 4, Rational::new(1, 5), 7, 4, 1000).expect("micro extractor")
}

/// The first `count` input pairs of a sweep with master seed 1.
pub fn pairs(count: u64, n: usize, flips: usize) -> Vec<(BitString, BitString)> {
    (0..count).map(|i| sample_pair(1, i, n, flips)).collect()
}
