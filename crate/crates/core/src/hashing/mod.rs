//! Fingerprint families: GF(2) linear hashes, prime-residue hashes, and
//! explicit extractor tables with heavy/poor node analytics.

pub mod extractor;
pub mod gf2;
pub mod primes;

pub use extractor::{
    build_prefix_extractor, heavy_right_nodes, poor_left_nodes, verify_extractor, ExtractorTable, Verdict, VerdictKind,
    VerifyMode,
};
pub use gf2::{sample_gf2_matrix, Gf2Matrix};
pub use primes::{fingerprint_collides, first_primes, prime_hash, string_value, PrimeHash};
