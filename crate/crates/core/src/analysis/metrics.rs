//! Per-run secrecy measurements, all computed exactly by the oracle against
//! the canonical transcript serialization.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bits::{encode_condition, gamma_len, BitString};
use crate::complexity::{Oracle, Value};
use crate::error::{Error, Result};
use crate::protocol::{ProtocolResult, Transcript, Variant, BASE_LEVEL};
use crate::rational::Rational;
use crate::vm::C_LITERAL;

/// An inequality `lhs <= rhs + slack`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub lhs: i64,
    pub rhs: i64,
    /// Smallest non-negative slack for which the inequality holds.
    pub min_slack: i64,
    pub tolerance: i64,
    pub holds: bool,
}

impl Check {
    pub fn new(lhs: i64, rhs: i64, tolerance: i64) -> Self {
        let min_slack = (lhs - rhs).max(0);
        Self {
            lhs,
            rhs,
            min_slack,
            tolerance,
            holds: min_slack <= tolerance,
        }
    }
}

/// Additive tolerance for the bound checks: `ceil(log2(n/epsilon))`
/// for variant A and its cube for variant B (hidden constants set to 1).
pub fn tolerance(variant: Variant, n: usize, epsilon: Rational) -> i64 {
    let l = Rational::new(n as u64 * epsilon.denom(), epsilon.numer()).ceil_log2() as i64;
    match variant {
        Variant::A => l,
        Variant::B => l * l * l,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureOptions {
    /// `(low, high)` levels of the shallowness gap `C^low(x) - C^high(x)`.
    pub shallow_levels: (i32, i32),
    pub tolerance: i64,
}

impl MeasureOptions {
    pub fn for_variant(variant: Variant, n: usize, epsilon: Rational) -> Self {
        Self {
            shallow_levels: match variant {
                Variant::A => (-2, 8),
                Variant::B => (-1, 1),
            },
            tolerance: tolerance(variant, n, epsilon),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub key_length: i64,
    /// `C^0(x)`.
    pub c_x: i64,
    /// `C^0(x | y)`.
    pub c_x_given_y: i64,
    /// `C^0(x) - C^0(x | y)`.
    pub mutual_info: i64,
    /// `C^0(z | transcript)`.
    pub c_z_given_transcript: i64,
    /// `|z| - C^0(z | transcript)`.
    pub deficiency: i64,
    pub shallow_gap: i64,
    /// `C^0(z | transcript) - C^2(z | transcript)`.
    pub delta1: i64,
    pub transcript_bits: i64,
    pub checks: BTreeMap<String, Check>,
}

fn finite(v: Value, oracle: &Oracle) -> Result<i64> {
    v.finite().map(|k| k as i64).ok_or(Error::NoProgram {
        l_max: oracle.config().l_max,
    })
}

/// `C^level(target | transcript)`.
pub fn complexity_given_transcript(
    oracle: &Oracle,
    target: &BitString,
    transcript: &Transcript,
    level: i32,
) -> Result<i64> {
    finite(
        oracle.complexity_of(target, &transcript.serialization(), level)?.value,
        oracle,
    )
}

/// Measures one run. Checks:
///
/// * `key_length`: `C^0(x) - C^0(x|y) <= |z| + tol`
/// * `deficiency`: `Delta <= shallow_gap + tol`
/// * `deficiency_floor`: `-Delta <= C_LITERAL`
/// * `upper_bound`: `|z| <= C^0(x) - C^3(x|y) + Delta + Delta1 + tol`
/// * `reconstruction`: `C^1(x) <= |p| + |z| + C_LITERAL`
/// * `transcript_length` (variant B): `|transcript| <= 2 C^0(x|y) + tol`
pub fn measure_run(
    oracle: &Oracle,
    result: &ProtocolResult,
    x: &BitString,
    y: &BitString,
    opts: &MeasureOptions,
) -> Result<RunMetrics> {
    let z = &result.z_alice;
    let tol = opts.tolerance;
    let c = |s: &BitString, parts: &[BitString], level: i32| -> Result<i64> {
        finite(oracle.value(s, parts, level)?, oracle)
    };
    let c_x = c(x, &[], BASE_LEVEL)?;
    let c_x_given_y = c(x, std::slice::from_ref(y), BASE_LEVEL)?;
    let c_x_given_y3 = c(x, std::slice::from_ref(y), BASE_LEVEL + 3)?;
    let c_z_t = complexity_given_transcript(oracle, z, &result.transcript, BASE_LEVEL)?;
    let c_z_t2 = complexity_given_transcript(oracle, z, &result.transcript, BASE_LEVEL + 2)?;
    let (lo, hi) = opts.shallow_levels;
    let shallow_gap = c(x, &[], lo)? - c(x, &[], hi)?;
    let c_x_1 = c(x, &[], BASE_LEVEL + 1)?;

    let key_length = z.len() as i64;
    let mutual_info = c_x - c_x_given_y;
    let deficiency = key_length - c_z_t;
    let delta1 = c_z_t - c_z_t2;
    let transcript_bits = result.transcript.len_bits() as i64;

    let mut checks = BTreeMap::new();
    checks.insert("key_length".to_string(), Check::new(mutual_info, key_length, tol));
    checks.insert("deficiency".to_string(), Check::new(deficiency, shallow_gap, tol));
    checks.insert(
        "deficiency_floor".to_string(),
        Check::new(-deficiency, 0, C_LITERAL as i64),
    );
    checks.insert(
        "upper_bound".to_string(),
        Check::new(key_length, c_x - c_x_given_y3 + deficiency + delta1, tol),
    );
    checks.insert(
        "reconstruction".to_string(),
        Check::new(c_x_1, result.p.len() as i64 + key_length, C_LITERAL as i64),
    );
    if result.variant() == Variant::B {
        checks.insert(
            "transcript_length".to_string(),
            Check::new(transcript_bits, 2 * c_x_given_y, tol),
        );
    }
    Ok(RunMetrics {
        key_length,
        c_x,
        c_x_given_y,
        mutual_info,
        c_z_given_transcript: c_z_t,
        deficiency,
        shallow_gap,
        delta1,
        transcript_bits,
        checks,
    })
}

/// Length of the program `SKIP k; FLD` that prints field `k` of a tuple.
pub fn pointer_cost(k: usize) -> usize {
    if k == 0 {
        3
    } else {
        4 + gamma_len(k as u64) + 3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeakCheck {
    /// `|z| - C(z | transcript, z)`.
    pub deficiency: i64,
    /// `|z| - pointer_cost(k)` for a leak at field `k`.
    pub floor: i64,
    pub detected: bool,
}

/// Appends `z` to the transcript as one more field and measures the
/// deficiency an eavesdropper would see.
pub fn leak_check(oracle: &Oracle, transcript: &Transcript, z: &BitString, level: i32) -> Result<LeakCheck> {
    leak_check_at(oracle, transcript, z, level, transcript.messages.len())
}

/// As [`leak_check`], with `z` inserted as field number `k`.
pub fn leak_check_at(
    oracle: &Oracle,
    transcript: &Transcript,
    z: &BitString,
    level: i32,
    k: usize,
) -> Result<LeakCheck> {
    let mut fields = transcript.fields();
    if k > fields.len() {
        return Err(Error::InvalidParameter(format!("field index {k} past the transcript")));
    }
    fields.insert(k, z.clone());
    let v = finite(
        oracle.complexity_of(z, &encode_condition(&fields), level)?.value,
        oracle,
    )?;
    let deficiency = z.len() as i64 - v;
    let floor = z.len() as i64 - pointer_cost(k) as i64;
    Ok(LeakCheck {
        deficiency,
        floor,
        detected: deficiency >= floor,
    })
}
