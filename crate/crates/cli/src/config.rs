//! Run configuration: a TOML file with sections, overridden by flags.
//!
//! ```toml
//! [experiment]
//! variant = "B"        # A or B
//! n = 4
//! epsilon = "1/5"
//! trials = 200
//! master_seed = 1
//! flips = 1
//! c = 1                # B only
//!
//! [schedule]
//! base_space = 8
//! ratio = "2"
//! level_min = -3
//! level_max = 16
//! cap = 1048576
//!
//! [budget]
//! l_max = 7            # default n + 3
//! program_quota = 67108864
//! step_cap = 100000    # default: configuration bound
//!
//! [extractor]          # B only
//! path = "table.txt"   # default: build from d and seed
//! d = 5
//! seed = 7
//! attempts = 1000
//!
//! [output]
//! dir = "skalab-out"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use skalab::analysis::ExperimentConfig;
use skalab::protocol::Variant;
use skalab::{Rational, SpaceSchedule};

use crate::CliError;

/// Default output directory when neither the file nor a flag sets one.
pub const OUT_DIR_ENV: &str = "SKALAB_OUT";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub variant: Option<Variant>,
    pub n: Option<usize>,
    pub epsilon: Option<Rational>,
    pub trials: Option<u64>,
    pub master_seed: Option<u64>,
    pub flips: Option<usize>,
    pub c: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleSection {
    pub base_space: Option<u64>,
    pub ratio: Option<Rational>,
    pub level_min: Option<i32>,
    pub level_max: Option<i32>,
    pub cap: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetSection {
    pub l_max: Option<usize>,
    pub program_quota: Option<u64>,
    pub step_cap: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractorSection {
    pub path: Option<PathBuf>,
    pub d: Option<usize>,
    pub seed: Option<u64>,
    pub attempts: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub experiment: ExperimentSection,
    pub schedule: ScheduleSection,
    pub budget: BudgetSection,
    pub extractor: ExtractorSection,
    pub output: OutputSection,
}

/// Fills `slot` from `value` when the flag was given.
fn set<T>(slot: &mut Option<T>, value: Option<T>) {
    if value.is_some() {
        *slot = value;
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    /// Later values win.
    pub fn merge(&mut self, over: Config) {
        let (e, o) = (&mut self.experiment, over.experiment);
        set(&mut e.variant, o.variant);
        set(&mut e.n, o.n);
        set(&mut e.epsilon, o.epsilon);
        set(&mut e.trials, o.trials);
        set(&mut e.master_seed, o.master_seed);
        set(&mut e.flips, o.flips);
        set(&mut e.c, o.c);
        let (s, o) = (&mut self.schedule, over.schedule);
        set(&mut s.base_space, o.base_space);
        set(&mut s.ratio, o.ratio);
        set(&mut s.level_min, o.level_min);
        set(&mut s.level_max, o.level_max);
        set(&mut s.cap, o.cap);
        let (b, o) = (&mut self.budget, over.budget);
        set(&mut b.l_max, o.l_max);
        set(&mut b.program_quota, o.program_quota);
        set(&mut b.step_cap, o.step_cap);
        let (x, o) = (&mut self.extractor, over.extractor);
        set(&mut x.path, o.path);
        set(&mut x.d, o.d);
        set(&mut x.seed, o.seed);
        set(&mut x.attempts, o.attempts);
        set(&mut self.output.dir, over.output.dir);
    }

    pub fn schedule(&self) -> SpaceSchedule {
        let d = SpaceSchedule::default();
        let s = &self.schedule;
        SpaceSchedule {
            base_space: s.base_space.unwrap_or(d.base_space),
            ratio: s.ratio.unwrap_or(d.ratio),
            level_min: s.level_min.unwrap_or(d.level_min),
            level_max: s.level_max.unwrap_or(d.level_max),
            cap: s.cap.or(d.cap),
        }
    }

    pub fn experiment(&self) -> ExperimentConfig {
        let d = ExperimentConfig::default();
        let e = &self.experiment;
        ExperimentConfig {
            variant: e.variant.unwrap_or(d.variant),
            n: e.n.unwrap_or(d.n),
            epsilon: e.epsilon.unwrap_or(d.epsilon),
            trials: e.trials.unwrap_or(d.trials),
            master_seed: e.master_seed.unwrap_or(d.master_seed),
            flips: e.flips.unwrap_or(d.flips),
            schedule: self.schedule(),
            l_max: self.budget.l_max.or(d.l_max),
            program_quota: self.budget.program_quota.unwrap_or(d.program_quota),
            step_cap: self.budget.step_cap.or(d.step_cap),
            c: e.c.unwrap_or(d.c),
            extractor_d: self.extractor.d.unwrap_or(d.extractor_d),
            extractor_seed: self.extractor.seed.unwrap_or(d.extractor_seed),
            extractor_attempts: self.extractor.attempts.unwrap_or(d.extractor_attempts),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.output
            .dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("skalab-out"))
    }

    /// Every field made explicit, so the file alone reproduces the run.
    pub fn resolved(&self) -> Config {
        let e = self.experiment();
        Config {
            experiment: ExperimentSection {
                variant: Some(e.variant),
                n: Some(e.n),
                epsilon: Some(e.epsilon),
                trials: Some(e.trials),
                master_seed: Some(e.master_seed),
                flips: Some(e.flips),
                c: Some(e.c),
            },
            schedule: ScheduleSection {
                base_space: Some(e.schedule.base_space),
                ratio: Some(e.schedule.ratio),
                level_min: Some(e.schedule.level_min),
                level_max: Some(e.schedule.level_max),
                cap: e.schedule.cap,
            },
            budget: BudgetSection {
                l_max: e.l_max,
                program_quota: Some(e.program_quota),
                step_cap: e.step_cap,
            },
            extractor: ExtractorSection {
                path: self.extractor.path.clone(),
                d: Some(e.extractor_d),
                seed: Some(e.extractor_seed),
                attempts: Some(e.extractor_attempts),
            },
            output: OutputSection {
                dir: Some(self.out_dir()),
            },
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
