//! Empirical check that conditioning on a random matrix barely lowers
//! complexity: `C^0(x | v, H) >= C^2(x | v) - tol` for most `H`.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::complexity::Oracle;
use crate::error::{Error, Result};
use crate::hashing::{sample_gf2_matrix, Gf2Matrix};
use crate::rational::Rational;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub trials: u64,
    pub passes: u64,
    pub rate: f64,
    /// `1 - epsilon - 3 sigma` with `sigma = sqrt(epsilon (1 - epsilon) / trials)`.
    pub threshold: f64,
    pub tolerance: i64,
    /// `C^2(x | v)`.
    pub reference: i64,
    /// Smallest `C^0(x | v, H)` seen.
    pub worst: i64,
}

impl ClaimReport {
    pub fn holds(&self) -> bool {
        self.rate >= self.threshold
    }
}

/// `ceil(log2(1/epsilon)) + 1`.
pub fn claim_tolerance(epsilon: Rational) -> i64 {
    epsilon.recip().ceil_log2() as i64 + 1
}

fn value(oracle: &Oracle, x: &BitString, parts: &[BitString], level: i32) -> Result<i64> {
    oracle
        .value(x, parts, level)?
        .finite()
        .map(|k| k as i64)
        .ok_or(Error::NoProgram {
            l_max: oracle.config().l_max,
        })
}

/// Does the inequality hold for one fixed matrix?
pub fn claim_holds_for(
    oracle: &Oracle,
    x: &BitString,
    v: &BitString,
    h: &Gf2Matrix,
    epsilon: Rational,
) -> Result<bool> {
    let lhs = value(oracle, x, &[v.clone(), h.serialize()], 0)?;
    let rhs = value(oracle, x, std::slice::from_ref(v), 2)?;
    Ok(lhs >= rhs - claim_tolerance(epsilon))
}

/// Samples `trials` matrices with `rows` rows and `|x|` columns.
pub fn conditioning_claim_check(
    oracle: &Oracle,
    trials: u64,
    x: &BitString,
    v: &BitString,
    rows: usize,
    epsilon: Rational,
    seed: u64,
) -> Result<ClaimReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let tolerance = claim_tolerance(epsilon);
    let reference = value(oracle, x, std::slice::from_ref(v), 2)?;
    let mut passes = 0;
    let mut worst = i64::MAX;
    for i in 0..trials {
        let h = sample_gf2_matrix(rows, x.len(), rng::derive_seed(seed, "claim-matrix", i))?;
        let lhs = value(oracle, x, &[v.clone(), h.serialize()], 0)?;
        worst = worst.min(lhs);
        if lhs >= reference - tolerance {
            passes += 1;
        }
    }
    let eps = epsilon.to_f64();
    let sigma = (eps * (1.0 - eps) / trials as f64).sqrt();
    Ok(ClaimReport {
        trials,
        passes,
        rate: passes as f64 / trials as f64,
        threshold: 1.0 - eps - 3.0 * sigma,
        tolerance,
        reference,
        worst,
    })
}
