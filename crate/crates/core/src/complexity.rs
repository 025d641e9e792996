//! Exhaustive-search oracle for space-bounded conditional complexity.
//!
//! For a condition string and a space bound the oracle keeps a *table*: the
//! set of all programs of length `0..=covered` has been executed, and for each
//! halting output the canonically first program producing it is stored.
//! Because lengths are enumerated in increasing order and each length in
//! lexicographic order, the stored program is the minimal-length witness and,
//! among minimal ones, the first in canonical order. Tables grow lazily, one
//! length at a time, until the queried string appears or `l_max` is reached.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{encode_condition, BitString};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::vm::{self, configuration_bound, Outcome, Program, StepCap, VmLimits, C_LITERAL};

/// Levels of space bounds `space_at(i) = ceil(base_space * ratio^i)`, clamped
/// to `cap`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSchedule {
    pub base_space: u64,
    pub ratio: Rational,
    pub level_min: i32,
    pub level_max: i32,
    pub cap: Option<u64>,
}

impl Default for SpaceSchedule {
    fn default() -> Self {
        Self {
            base_space: 8,
            ratio: Rational::integer(2),
            level_min: -3,
            level_max: 16,
            cap: Some(1 << 20),
        }
    }
}

impl SpaceSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.base_space == 0 {
            return Err(Error::InvalidParameter("base_space must be positive".into()));
        }
        if self.ratio <= Rational::integer(1) {
            return Err(Error::InvalidParameter("schedule ratio must exceed 1".into()));
        }
        if self.level_min > 0 || self.level_max < 0 {
            return Err(Error::InvalidParameter("level range must contain 0".into()));
        }
        Ok(())
    }

    pub fn space_at(&self, level: i32) -> Result<usize> {
        if level < self.level_min || level > self.level_max {
            return Err(Error::LevelOutOfRange {
                level,
                min: self.level_min,
                max: self.level_max,
            });
        }
        let cap = self.cap.unwrap_or(u64::MAX) as u128;
        let (num, den) = (self.ratio.numer() as u128, self.ratio.denom() as u128);
        let (mut top, mut bottom) = (self.base_space as u128, 1u128);
        let (up, down) = if level >= 0 { (num, den) } else { (den, num) };
        for _ in 0..level.unsigned_abs() {
            top = top.saturating_mul(up);
            bottom = bottom.saturating_mul(down);
            if top / bottom.max(1) > cap {
                return Ok(cap as usize);
            }
        }
        Ok(top.div_ceil(bottom).min(cap) as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Value {
    Finite(usize),
    Infinite,
}

impl Value {
    pub fn finite(self) -> Option<usize> {
        match self {
            Value::Finite(v) => Some(v),
            Value::Infinite => None,
        }
    }

    pub fn at_most(self, bound: i64) -> bool {
        matches!(self, Value::Finite(v) if (v as i64) <= bound)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Finite(v) => write!(f, "{v}"),
            Value::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityResult {
    pub value: Value,
    pub witness: Option<Program>,
    pub level: i32,
    pub space: usize,
    pub condition_digest: String,
    /// Set when a fixed step cap below the configuration bound stopped some run.
    pub truncated: bool,
}

impl ComplexityResult {
    pub fn finite(&self) -> Option<usize> {
        self.value.finite()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    /// Longest program enumerated.
    pub l_max: usize,
    /// Longest target string accepted by [`Oracle::complexity`].
    pub n_max: usize,
    pub step_cap: StepCap,
    /// Maximum number of programs a single query may execute.
    pub program_quota: u64,
    /// Re-execute every witness before returning it.
    pub verify_witnesses: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self::for_input_len(12)
    }
}

impl OracleConfig {
    /// Defaults for experiments on `n`-bit inputs: `l_max = n + C_LITERAL + 2`.
    pub fn for_input_len(n: usize) -> Self {
        Self {
            l_max: n + C_LITERAL + 2,
            n_max: n.max(12),
            step_cap: StepCap::ConfigurationBound,
            program_quota: 1 << 26,
            verify_witnesses: cfg!(debug_assertions),
        }
    }
}

/// One line of the oracle dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub x: BitString,
    pub condition_digest: String,
    pub level: i32,
    pub value: Value,
    pub witness: Option<Program>,
}

#[derive(Default)]
struct Table {
    /// Lengths `0..covered` are fully enumerated.
    covered: usize,
    first: HashMap<BitString, Program>,
    truncated: bool,
}

type TableKey = (BitString, usize);

type RecordMap = BTreeMap<(String, i32, BitString), OracleRecord>;

pub struct Oracle {
    schedule: SpaceSchedule,
    config: OracleConfig,
    tables: Mutex<HashMap<TableKey, Arc<Mutex<Table>>>>,
    records: Option<Mutex<RecordMap>>,
}

impl fmt::Debug for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Oracle")
            .field("schedule", &self.schedule)
            .field("config", &self.config)
            .finish_non_exhaustive()
    }
}

const PARALLEL_THRESHOLD: usize = 12;

impl Oracle {
    pub fn new(schedule: SpaceSchedule, config: OracleConfig) -> Result<Self> {
        schedule.validate()?;
        if config.l_max > 40 {
            return Err(Error::InvalidParameter(format!(
                "l_max {} is not desk scale",
                config.l_max
            )));
        }
        Ok(Self {
            schedule,
            config,
            tables: Mutex::new(HashMap::new()),
            records: None,
        })
    }

    /// Keep a record of every query for [`Oracle::write_dump`].
    pub fn with_recording(mut self) -> Self {
        self.records = Some(Mutex::new(BTreeMap::new()));
        self
    }

    pub fn schedule(&self) -> &SpaceSchedule {
        &self.schedule
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    pub fn limits_at(&self, level: i32) -> Result<VmLimits> {
        Ok(VmLimits {
            space_cells: self.schedule.space_at(level)?,
            step_cap: self.config.step_cap,
        })
    }

    fn table(&self, condition: &BitString, space: usize) -> Arc<Mutex<Table>> {
        let mut tables = self.tables.lock().expect("oracle table lock");
        tables.entry((condition.clone(), space)).or_default().clone()
    }

    /// Enumerates one more program length into `table`.
    fn extend(&self, table: &mut Table, condition: &BitString, limits: VmLimits) {
        let len = table.covered;
        let run = |p: Program| -> (Program, Option<BitString>, bool) {
            let out = vm::run_program(&p, condition, limits);
            let cut = matches!(out.kind, Outcome::StepExceeded)
                && match limits.step_cap {
                    StepCap::Fixed(cap) => cap < configuration_bound(p.len(), condition.len(), limits.space_cells),
                    StepCap::ConfigurationBound => false,
                };
            match out.kind {
                Outcome::Halted(o) => (p, Some(o), cut),
                _ => (p, None, cut),
            }
        };
        let results: Vec<_> = if len >= PARALLEL_THRESHOLD {
            (0..1u64 << len)
                .into_par_iter()
                .map(|v| run(BitString::from_uint(v as u128, len)))
                .collect()
        } else {
            BitString::all_of_len(len).map(run).collect()
        };
        for (program, output, cut) in results {
            table.truncated |= cut;
            if let Some(o) = output {
                table.first.entry(o).or_insert(program);
            }
        }
        table.covered += 1;
    }

    /// Exact `C^{space_at(level)}(x | condition)` for an already encoded condition.
    pub fn complexity_of(&self, x: &BitString, condition: &BitString, level: i32) -> Result<ComplexityResult> {
        if x.len() > self.config.n_max {
            return Err(Error::InputTooLong {
                len: x.len(),
                limit: self.config.n_max,
            });
        }
        let limits = self.limits_at(level)?;
        let table = self.table(condition, limits.space_cells);
        let mut table = table.lock().expect("oracle table lock");
        let mut executed = 0u64;
        let witness = loop {
            if let Some(p) = table.first.get(x) {
                break Some(p.clone());
            }
            if table.covered > self.config.l_max {
                break None;
            }
            executed += 1u64 << table.covered;
            if executed > self.config.program_quota {
                return Err(Error::BudgetExceeded {
                    quota: self.config.program_quota,
                });
            }
            self.extend(&mut table, condition, limits);
        };
        let result = ComplexityResult {
            value: witness.as_ref().map_or(Value::Infinite, |w| Value::Finite(w.len())),
            witness,
            level,
            space: limits.space_cells,
            condition_digest: condition.sha256_hex(),
            truncated: table.truncated,
        };
        drop(table);
        if self.config.verify_witnesses {
            if let Some(w) = &result.witness {
                let out = vm::run_program(w, condition, limits);
                assert_eq!(out.output(), Some(x), "oracle witness {w} does not reproduce {x}");
            }
        }
        if let Some(records) = &self.records {
            let rec = OracleRecord {
                x: x.clone(),
                condition_digest: result.condition_digest.clone(),
                level,
                value: result.value,
                witness: result.witness.clone(),
            };
            records
                .lock()
                .expect("record lock")
                .insert((rec.condition_digest.clone(), level, x.clone()), rec);
        }
        Ok(result)
    }

    /// Exact `C^{space_at(level)}(x | parts)`.
    pub fn complexity(&self, x: &BitString, parts: &[BitString], level: i32) -> Result<ComplexityResult> {
        self.complexity_of(x, &encode_condition(parts), level)
    }

    /// Shorthand returning only the value.
    pub fn value(&self, x: &BitString, parts: &[BitString], level: i32) -> Result<Value> {
        Ok(self.complexity(x, parts, level)?.value)
    }

    /// The canonically first minimal program for `x` given `parts`.
    pub fn min_program(&self, x: &BitString, parts: &[BitString], level: i32) -> Result<Program> {
        self.min_program_of(x, &encode_condition(parts), level)
    }

    pub fn min_program_of(&self, x: &BitString, condition: &BitString, level: i32) -> Result<Program> {
        self.complexity_of(x, condition, level)?
            .witness
            .ok_or(Error::NoProgram {
                l_max: self.config.l_max,
            })
    }

    /// `{u in {0,1}^n : C(u | parts) <= bound}` in canonical order.
    pub fn candidate_set(&self, bound: i64, parts: &[BitString], level: i32, n: usize) -> Result<Vec<BitString>> {
        if bound < 0 {
            return Ok(Vec::new());
        }
        let bound = (bound as usize).min(self.config.l_max);
        let condition = encode_condition(parts);
        let limits = self.limits_at(level)?;
        let table = self.table(&condition, limits.space_cells);
        let mut table = table.lock().expect("oracle table lock");
        let mut executed = 0u64;
        while table.covered <= bound {
            executed += 1u64 << table.covered;
            if executed > self.config.program_quota {
                return Err(Error::BudgetExceeded {
                    quota: self.config.program_quota,
                });
            }
            self.extend(&mut table, &condition, limits);
        }
        let mut set: Vec<BitString> = table
            .first
            .iter()
            .filter(|(out, p)| out.len() == n && p.len() <= bound)
            .map(|(out, _)| out.clone())
            .collect();
        set.sort();
        Ok(set)
    }

    /// `min { k in 0..=n : C^{level n-k}(x | y, n, k+c) <= k + c }`.
    pub fn k_star(&self, x: &BitString, y: &BitString, c: usize) -> Result<usize> {
        let n = x.len();
        for k in 0..=n {
            let parts = k_star_condition(y, n, k + c);
            if self.value(x, &parts, (n - k) as i32)?.at_most((k + c) as i64) {
                return Ok(k);
            }
        }
        Err(Error::InvalidParameter(format!(
            "k* undefined for c = {c}; c must be at least {C_LITERAL}"
        )))
    }

    /// Writes the recorded queries as JSON lines, sorted by condition digest,
    /// level, and target.
    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        if let Some(records) = &self.records {
            for rec in records.lock().expect("record lock").values() {
                serde_json::to_writer(&mut w, rec)?;
                writeln!(w)?;
            }
        }
        Ok(())
    }

    pub fn table_count(&self) -> usize {
        self.tables.lock().expect("oracle table lock").len()
    }
}

/// The condition tuple `(y, n, bound)` used by the prefix-extractor protocol
/// and by [`Oracle::k_star`]; integers are written as binary numerals.
pub fn k_star_condition(y: &BitString, n: usize, bound: usize) -> Vec<BitString> {
    vec![
        y.clone(),
        BitString::binary(n as u128),
        BitString::binary(bound as u128),
    ]
}

/// Reads back a dump produced by [`Oracle::write_dump`].
pub fn read_dump(text: &str) -> Result<Vec<OracleRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::Format(e.to_string())))
        .collect()
}
