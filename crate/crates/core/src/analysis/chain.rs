//! Measured additive constants in the chain rule
//!
//! ```text
//! C^{i+1}(x,y) <= C^i(x) + C^i(y|x) + a log2(|x|+|y|+2) + b
//! C^i(x,y)     >= C^{i+1}(x) + C^{i+1}(y|x) - a log2(|x|+|y|+2) - b
//! ```
//!
//! over all pairs of strings up to a given length. Pairs are encoded with
//! [`encode_condition`], so `C(x,y)` is the complexity of `<x, y>`.

use serde::{Deserialize, Serialize};

use crate::bits::{encode_condition, BitString};
use crate::complexity::{Oracle, OracleConfig, SpaceSchedule};
use crate::error::{Error, Result};
use crate::vm::C_LITERAL;

/// Largest `a` for which the minimal `b` is reported.
pub const MAX_LOG_COEFFICIENT: i64 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlackFrontier {
    /// `(a, b)` with `b` minimal for each `a` in `0..=MAX_LOG_COEFFICIENT`.
    pub frontier: Vec<(i64, i64)>,
    /// Largest raw excess `lhs - rhs` and a pair attaining it.
    pub max_excess: i64,
    pub worst_pair: (BitString, BitString),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub max_len: usize,
    pub level: i32,
    pub pairs: u64,
    pub upper: SlackFrontier,
    pub lower: SlackFrontier,
}

/// An oracle able to evaluate every pair string of components up to `max_len`.
pub fn chain_oracle(schedule: SpaceSchedule, max_len: usize) -> Result<Oracle> {
    let pair_len = 2 * (crate::bits::field_header_len(max_len) + max_len);
    let mut cfg = OracleConfig::for_input_len(pair_len);
    cfg.l_max = pair_len + C_LITERAL;
    Oracle::new(schedule, cfg)
}

struct Excess {
    pair: (BitString, BitString),
    log: f64,
    excess: i64,
}

fn frontier(rows: &[Excess]) -> SlackFrontier {
    let worst = rows.iter().max_by_key(|r| r.excess).expect("at least one pair");
    let frontier = (0..=MAX_LOG_COEFFICIENT)
        .map(|a| {
            let b = rows
                .iter()
                .map(|r| (r.excess as f64 - a as f64 * r.log).ceil() as i64)
                .max()
                .unwrap_or(0)
                .max(0);
            (a, b)
        })
        .collect();
    SlackFrontier {
        frontier,
        max_excess: worst.excess,
        worst_pair: worst.pair.clone(),
    }
}

pub fn measure_chain_rules(oracle: &Oracle, max_len: usize, level: i32) -> Result<ChainReport> {
    let c = |s: &BitString, parts: &[BitString], lvl: i32| -> Result<i64> {
        oracle
            .value(s, parts, lvl)?
            .finite()
            .map(|v| v as i64)
            .ok_or(Error::NoProgram {
                l_max: oracle.config().l_max,
            })
    };
    let strings: Vec<BitString> = BitString::all_up_to(max_len).collect();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for x in &strings {
        let cx = c(x, &[], level)?;
        let cx1 = c(x, &[], level + 1)?;
        for y in &strings {
            let pair = encode_condition([x, y]);
            let log = ((x.len() + y.len() + 2) as f64).log2();
            let cond = std::slice::from_ref(x);
            let upper_excess = c(&pair, &[], level + 1)? - cx - c(y, cond, level)?;
            let lower_excess = cx1 + c(y, cond, level + 1)? - c(&pair, &[], level)?;
            upper.push(Excess {
                pair: (x.clone(), y.clone()),
                log,
                excess: upper_excess,
            });
            lower.push(Excess {
                pair: (x.clone(), y.clone()),
                log,
                excess: lower_excess,
            });
        }
    }
    Ok(ChainReport {
        max_len,
        level,
        pairs: upper.len() as u64,
        upper: frontier(&upper),
        lower: frontier(&lower),
    })
}
