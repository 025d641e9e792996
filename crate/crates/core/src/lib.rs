//! A desk-scale laboratory for secret key agreement from correlated strings.
//!
//! Two parties hold correlated bit strings `x` and `y`. Over a public channel
//! they reconcile (Bob learns `x`) by incremental fingerprinting, then both
//! compute the key `z` as the canonically first minimal program for `x` given
//! the reconciliation payload. Secrecy is measured exactly: every complexity
//! value is computed by exhaustive search over the programs of a small pinned
//! interpreter with a metered work tape.
//!
//! Modules, bottom-up:
//!
//! * [`bits`]: bit strings, the gamma code, tuple encoding.
//! * [`vm`]: the pinned interpreter and program enumeration.
//! * [`complexity`]: the exhaustive oracle, candidate sets, `k*`.
//! * [`hashing`]: GF(2) linear hashes, prime-residue hashes, extractor tables.
//! * [`protocol`]: both key-agreement protocols, channel, transcripts.
//! * [`analysis`]: per-run secrecy metrics, claim checks, experiment sweeps.

pub mod analysis;
pub mod bits;
pub mod complexity;
pub mod error;
pub mod hashing;
pub mod protocol;
pub mod rational;
pub mod rng;
pub mod vm;

pub use bits::{bs, decode_condition, encode_condition, BitString};
pub use complexity::{ComplexityResult, Oracle, OracleConfig, SpaceSchedule, Value};
pub use error::{Error, Result};
pub use rational::Rational;
pub use vm::{run_program, Outcome, Program, RunOutcome, StepCap, VmLimits};
