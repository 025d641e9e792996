//! Seeded sweeps over protocol runs and their reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bits::BitString;
use crate::complexity::{Oracle, OracleConfig, SpaceSchedule};
use crate::error::{Error, Result};
use crate::hashing::{build_prefix_extractor, ExtractorTable};
use crate::protocol::{run_protocol_a, run_protocol_b, SetupB, TranscriptFile, Variant};
use crate::rational::Rational;
use crate::rng;
use crate::vm::StepCap;

use super::metrics::{measure_run, MeasureOptions, RunMetrics};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub variant: Variant,
    pub n: usize,
    pub epsilon: Rational,
    pub trials: u64,
    pub master_seed: u64,
    /// `y` is `x` with this many distinct bits flipped.
    pub flips: usize,
    pub schedule: SpaceSchedule,
    /// Overrides the default `n + C_LITERAL + 2`.
    pub l_max: Option<usize>,
    pub program_quota: u64,
    /// Fixed step cap; the configuration bound when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_cap: Option<u64>,
    /// Slack constant `c` (variant B).
    pub c: usize,
    /// Seed bits of the extractor built when none is supplied (variant B).
    pub extractor_d: usize,
    pub extractor_seed: u64,
    pub extractor_attempts: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            variant: Variant::B,
            n: 4,
            epsilon: Rational::new(1, 5),
            trials: 200,
            master_seed: 1,
            flips: 1,
            schedule: SpaceSchedule::default(),
            l_max: None,
            program_quota: 1 << 26,
            step_cap: None,
            c: 1,
            extractor_d: 5,
            extractor_seed: 7,
            extractor_attempts: 1000,
        }
    }
}

impl ExperimentConfig {
    pub fn oracle(&self) -> Result<Oracle> {
        let mut cfg = OracleConfig::for_input_len(self.n);
        if let Some(l) = self.l_max {
            cfg.l_max = l;
        }
        cfg.program_quota = self.program_quota;
        if let Some(cap) = self.step_cap {
            cfg.step_cap = StepCap::Fixed(cap);
        }
        Oracle::new(self.schedule.clone(), cfg)
    }

    /// The extractor a variant-B sweep uses when none is supplied.
    pub fn default_extractor(&self) -> Result<ExtractorTable> {
        build_prefix_extractor(
            self.n,
            self.extractor_d,
            self.n,
            self.epsilon,
            self.extractor_seed,
            self.n,
            self.extractor_attempts,
        )
    }
}

/// Input pair number `index` of a sweep: `x` uniform, `y` = `x` with `flips`
/// distinct positions flipped.
pub fn sample_pair(master_seed: u64, index: u64, n: usize, flips: usize) -> (BitString, BitString) {
    let mut r = rng::derived_stream(master_seed, "pair", index);
    let x = BitString::from_uint(r.random_range(0..1u128 << n), n);
    let mut y = x.clone();
    for pos in rand::seq::index::sample(&mut r, n, flips.min(n)) {
        y.flip(pos);
    }
    (x, y)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub agreed: bool,
    pub rounds_used: usize,
    pub round0_bits: usize,
    pub prefix_bits: usize,
    pub k_star: Option<usize>,
    pub z: BitString,
    pub transcript_digest: String,
    pub metrics: RunMetrics,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub index: u64,
    pub seed: u64,
    pub x: BitString,
    pub y: BitString,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<RunSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckAggregate {
    pub evaluated: u64,
    pub held: u64,
    pub max_min_slack: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub runs: u64,
    pub completed: u64,
    pub errors: u64,
    pub agreed: u64,
    pub agreement_rate: f64,
    pub mean_deficiency: f64,
    pub deficiency_histogram: BTreeMap<i64, u64>,
    pub checks: BTreeMap<String, CheckAggregate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub extractor_digest: Option<String>,
    pub runs: Vec<RunRecord>,
    pub aggregates: Aggregates,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// SHA-256 of [`ExperimentReport::to_json`].
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "index,seed,x,y,agreed,rounds_used,prefix_bits,k_star,key_length,mutual_info,deficiency,shallow_gap,delta1,transcript_bits,error\n",
        );
        for r in &self.runs {
            match &r.summary {
                Some(m) => {
                    let k = m.k_star.map(|k| k.to_string()).unwrap_or_default();
                    let t = &m.metrics;
                    writeln!(
                        s,
                        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},",
                        r.index,
                        r.seed,
                        r.x,
                        r.y,
                        m.agreed,
                        m.rounds_used,
                        m.prefix_bits,
                        k,
                        t.key_length,
                        t.mutual_info,
                        t.deficiency,
                        t.shallow_gap,
                        t.delta1,
                        t.transcript_bits
                    )
                    .unwrap();
                }
                None => {
                    let err = r.error.as_deref().unwrap_or("").replace(',', ";");
                    writeln!(s, "{},{},{},{},,,,,,,,,,,{}", r.index, r.seed, r.x, r.y, err).unwrap();
                }
            }
        }
        s
    }

    /// One-line summary: agreement rate and mean deficiency.
    pub fn summary_line(&self) -> String {
        let a = &self.aggregates;
        format!(
            "variant {} n={} runs={} agreed={} rate={:.4} mean_deficiency={:.4} errors={}",
            self.config.variant, self.config.n, a.runs, a.agreed, a.agreement_rate, a.mean_deficiency, a.errors
        )
    }
}

pub struct ExperimentOutput {
    pub report: ExperimentReport,
    /// Transcript files of the completed runs, by run index.
    pub transcripts: Vec<(u64, TranscriptFile)>,
}

fn aggregate(runs: &[RunRecord]) -> Aggregates {
    let completed: Vec<&RunSummary> = runs.iter().filter_map(|r| r.summary.as_ref()).collect();
    let agreed = completed.iter().filter(|s| s.agreed).count() as u64;
    let mut hist = BTreeMap::new();
    let mut checks: BTreeMap<String, CheckAggregate> = BTreeMap::new();
    let mut total_def = 0i64;
    for s in &completed {
        total_def += s.metrics.deficiency;
        *hist.entry(s.metrics.deficiency).or_insert(0) += 1;
        for (name, c) in &s.metrics.checks {
            let agg = checks.entry(name.clone()).or_insert(CheckAggregate {
                evaluated: 0,
                held: 0,
                max_min_slack: 0,
            });
            agg.evaluated += 1;
            agg.held += c.holds as u64;
            agg.max_min_slack = agg.max_min_slack.max(c.min_slack);
        }
    }
    let n = completed.len() as u64;
    let ratio = |a: i64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Aggregates {
        runs: runs.len() as u64,
        completed: n,
        errors: runs.len() as u64 - n,
        agreed,
        agreement_rate: ratio(agreed as i64, runs.len() as u64),
        mean_deficiency: ratio(total_def, n),
        deficiency_histogram: hist,
        checks,
    }
}

/// Runs the sweep. Per-run failures are recorded, not propagated; only
/// configuration errors abort.
pub fn run_experiment(config: &ExperimentConfig, extractor: Option<ExtractorTable>) -> Result<ExperimentOutput> {
    if config.n == 0 || config.n > 16 {
        return Err(Error::InvalidParameter(format!("n = {} is outside 1..=16", config.n)));
    }
    if !config.epsilon.is_open_unit() {
        return Err(Error::InvalidParameter(format!(
            "epsilon {} outside (0, 1)",
            config.epsilon
        )));
    }
    let oracle = config.oracle()?;
    let setup = match config.variant {
        Variant::A => None,
        Variant::B => {
            let e = match extractor {
                Some(e) => e,
                None => config.default_extractor()?,
            };
            if e.n != config.n {
                return Err(Error::DimensionMismatch {
                    expected: config.n,
                    found: e.n,
                });
            }
            Some(SetupB::new(e, config.epsilon, config.c)?)
        }
    };
    let opts = MeasureOptions::for_variant(config.variant, config.n, config.epsilon);

    let outcomes: Vec<(RunRecord, Option<TranscriptFile>)> = (0..config.trials)
        .into_par_iter()
        .map(|index| {
            let (x, y) = sample_pair(config.master_seed, index, config.n, config.flips);
            let seed = rng::derive_seed(config.master_seed, "run", index);
            let run = || -> Result<(RunSummary, TranscriptFile)> {
                let result = match &setup {
                    None => run_protocol_a(&oracle, &x, &y, config.epsilon, seed)?,
                    Some(s) => run_protocol_b(&oracle, &x, &y, s, seed)?,
                };
                let metrics = measure_run(&oracle, &result, &x, &y, &opts)?;
                let k_star = match &setup {
                    Some(s) => Some(oracle.k_star(&x, &y, s.params.c)?),
                    None => None,
                };
                let file = result.transcript_file();
                Ok((
                    RunSummary {
                        agreed: result.agreed,
                        rounds_used: result.rounds_used,
                        round0_bits: result.round0_bits,
                        prefix_bits: result.prefix_bits,
                        k_star,
                        z: result.z_alice.clone(),
                        transcript_digest: file.digest(),
                        metrics,
                    },
                    file,
                ))
            };
            let (summary, error, file) = match run() {
                Ok((s, f)) => (Some(s), None, Some(f)),
                Err(e) => (None, Some(e.to_string()), None),
            };
            (
                RunRecord {
                    index,
                    seed,
                    x,
                    y,
                    summary,
                    error,
                },
                file,
            )
        })
        .collect();

    let mut runs = Vec::with_capacity(outcomes.len());
    let mut transcripts = Vec::new();
    for (record, file) in outcomes {
        if let Some(f) = file {
            transcripts.push((record.index, f));
        }
        runs.push(record);
    }
    let aggregates = aggregate(&runs);
    Ok(ExperimentOutput {
        report: ExperimentReport {
            config: config.clone(),
            extractor_digest: setup.as_ref().map(|s| s.extractor.digest()),
            runs,
            aggregates,
        },
        transcripts,
    })
}
