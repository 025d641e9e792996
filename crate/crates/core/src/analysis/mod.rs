//! The eavesdropper's view: exact secrecy metrics per run, the random-matrix
//! conditioning check, chain-rule constants, and seeded experiment sweeps.

pub mod chain;
pub mod claim;
pub mod experiment;
pub mod metrics;

pub use chain::{chain_oracle, measure_chain_rules, ChainReport};
pub use claim::{claim_holds_for, conditioning_claim_check, ClaimReport};
pub use experiment::{run_experiment, sample_pair, ExperimentConfig, ExperimentOutput, ExperimentReport};
pub use metrics::{
    leak_check, leak_check_at, measure_run, pointer_cost, tolerance, Check, LeakCheck, MeasureOptions, RunMetrics,
};
