use rand::Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::rng;

/// A dense `rows x cols` matrix over GF(2); `h(v) = H v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<BitString>,
}

impl Gf2Matrix {
    pub fn from_rows(cols: usize, rows: Vec<BitString>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitString::from_bits(vec![false; cols]); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| BitString::from_bits((0..n).map(|j| i == j).collect()))
            .collect();
        Self { cols: n, rows }
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitString {
        &self.rows[i]
    }

    /// Bit `i` of the result is the GF(2) inner product of row `i` with `v`.
    pub fn hash(&self, v: &BitString) -> Result<BitString> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(BitString::from_bits(
            self.rows
                .iter()
                .map(|row| {
                    row.bits()
                        .iter()
                        .zip(v.bits())
                        .fold(false, |acc, (&a, &b)| acc ^ (a & b))
                })
                .collect(),
        ))
    }

    /// Row-major concatenation of the entries.
    pub fn serialize(&self) -> BitString {
        let mut out = BitString::with_capacity(self.rows() * self.cols);
        for r in &self.rows {
            out.extend_from(r);
        }
        out
    }

    pub fn deserialize(rows: usize, cols: usize, bits: &BitString) -> Result<Self> {
        if bits.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: bits.len(),
            });
        }
        let rows = (0..rows).map(|i| bits.slice(i * cols, (i + 1) * cols)).collect();
        Ok(Self { cols, rows })
    }
}

/// A matrix with i.i.d. uniform entries drawn row-major from the ChaCha20
/// stream seeded with `seed`.
pub fn sample_gf2_matrix(rows: usize, cols: usize, seed: u64) -> Result<Gf2Matrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidParameter("matrix dimensions must be positive".into()));
    }
    let mut stream = rng::stream(seed);
    let rows = (0..rows)
        .map(|_| BitString::from_bits((0..cols).map(|_| stream.random::<bool>()).collect()))
        .collect();
    Ok(Gf2Matrix { cols, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bs;
    use proptest::prelude::*;

    fn dot_oracle(row: &str, v: &str) -> bool {
        row.chars()
            .zip(v.chars())
            .filter(|&(a, b)| a == '1' && b == '1')
            .count()
            % 2
            == 1
    }

    #[test]
    fn fixed_examples() {
        assert_eq!(Gf2Matrix::zero(3, 3).hash(&bs("101")).unwrap(), bs("000"));
        assert_eq!(Gf2Matrix::identity(3).hash(&bs("101")).unwrap(), bs("101"));
        let h = Gf2Matrix::from_rows(3, vec![bs("110"), bs("011")]).unwrap();
        let expected: String = ["110", "011"]
            .iter()
            .map(|r| if dot_oracle(r, "110") { '1' } else { '0' })
            .collect();
        assert_eq!(expected, "01");
        assert_eq!(h.hash(&bs("110")).unwrap(), bs(&expected));
        assert!(matches!(h.hash(&bs("11")), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sample_gf2_matrix(4, 5, 9).unwrap(), sample_gf2_matrix(4, 5, 9).unwrap());
        assert_ne!(
            sample_gf2_matrix(4, 5, 9).unwrap(),
            sample_gf2_matrix(4, 5, 10).unwrap()
        );
        assert!(sample_gf2_matrix(0, 5, 1).is_err());
    }

    #[test]
    fn serialization_round_trip() {
        let h = sample_gf2_matrix(3, 7, 4).unwrap();
        assert_eq!(Gf2Matrix::deserialize(3, 7, &h.serialize()).unwrap(), h);
    }

    #[test]
    fn two_by_two_matrices_are_uniform() {
        let trials = 10_000u64;
        let mut counts = [0u64; 16];
        for s in 0..trials {
            let v = sample_gf2_matrix(2, 2, s).unwrap().serialize().to_uint().unwrap();
            counts[v as usize] += 1;
        }
        let p = 1.0 / 16.0;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - trials as f64 * p).abs() <= 3.0 * sigma + 1e-9, "{counts:?}");
        }
    }

    #[test]
    fn entry_bias() {
        let h = sample_gf2_matrix(1000, 100, 77).unwrap().serialize();
        let ones = h.bits().iter().filter(|&&b| b).count() as f64;
        let n = h.len() as f64;
        assert!((ones - n / 2.0).abs() <= 3.0 * (n * 0.25).sqrt());
    }

    #[test]
    fn prefix_collision_frequency() {
        // distinct u, x: Pr[first r bits of Hu and Hx agree] = 2^-r
        let (u, x) = (bs("101100"), bs("001110"));
        let trials = 100_000u64;
        for r in 1..=4usize {
            let hits = (0..trials)
                .filter(|&s| {
                    let h = sample_gf2_matrix(r, 6, s * 31 + r as u64).unwrap();
                    h.hash(&u).unwrap() == h.hash(&x).unwrap()
                })
                .count() as f64;
            let p = 0.5f64.powi(r as i32);
            let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
            assert!((hits - trials as f64 * p).abs() <= 3.0 * sigma, "r={r} hits={hits}");
        }
    }

    proptest! {
        #[test]
        fn linearity(seed in any::<u64>(), u in 0u64..256, v in 0u64..256, rows in 1usize..10) {
            let h = sample_gf2_matrix(rows, 8, seed).unwrap();
            let (u, v) = (BitString::from_uint(u as u128, 8), BitString::from_uint(v as u128, 8));
            let lhs = h.hash(&u.xor(&v).unwrap()).unwrap();
            let rhs = h.hash(&u).unwrap().xor(&h.hash(&v).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
