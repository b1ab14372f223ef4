//! Exponential sparsification: weights are partitioned into geometric buckets
//! `[s^k, s^{k+1})` and classified as unimportant, important, or huge relative
//! to a reference bucket `m` (the bucket of the heaviest weight the optimum
//! accepts). Only the `ceil(log_s(n^2)) + 1` important buckets matter; the
//! rest contribute at most a `1/n` fraction of the optimum.

use crate::{Error, Result};

/// Classification parameters for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsifyParams {
    pub epsilon: f64,
    /// Bucket base `s > 1` (`1 + eps/2` for the near-optimal algorithms,
    /// `3/2` for the fixed-epsilon best-bucket wrapper).
    pub s: f64,
    pub n: usize,
    /// Reference bucket: the bucket index of the heaviest accepted weight.
    pub m: i64,
    /// `ceil(log_s(n^2))`; buckets `m - threshold ..= m` are important.
    pub threshold: i64,
}

impl SparsifyParams {
    pub fn new(epsilon: f64, s: f64, n: usize, m: i64) -> Result<Self> {
        if !(s > 1.0) {
            return Err(Error::Contract(format!("bucket base must exceed 1, got {s}")));
        }
        if !(epsilon > 0.0) {
            return Err(Error::Contract(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self { epsilon, s, n, m, threshold: log_s_ceil_n2(s, n) })
    }
}

/// `ceil(log_s(n^2))`, with the boundary nudge shared by all bucket math.
pub fn log_s_ceil_n2(s: f64, n: usize) -> i64 {
    if n <= 1 {
        return 0;
    }
    let raw = 2.0 * (n as f64).ln() / s.ln();
    (raw - 1e-9).ceil() as i64
}

/// The unique `k` with `s^k <= w < s^{k+1}`.
///
/// The float estimate is corrected by direct comparison against `s.powi(k)`,
/// so the oracle and the algorithm — which share this function — always agree
/// on a weight's bucket. Exactly at a representable boundary the comparison
/// itself decides; generated test weights keep a wide margin from boundaries.
pub fn bucket_of(w: f64, s: f64) -> i64 {
    assert!(w > 0.0 && w.is_finite(), "bucket of non-positive weight {w}");
    let mut k = (w.ln() / s.ln()).floor() as i64;
    while powi(s, k) > w {
        k -= 1;
    }
    while powi(s, k + 1) <= w {
        k += 1;
    }
    k
}

/// `s^k` for possibly negative `k`.
pub fn powi(s: f64, k: i64) -> f64 {
    if k >= 0 {
        s.powi(k.min(i32::MAX as i64) as i32)
    } else {
        s.powi(k.max(i32::MIN as i64) as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightClass {
    /// Bucket below `m - threshold`: contributes at most `w_ref / n^2`.
    Unimportant,
    /// Bucket `m - offset` for `offset` in `0..=threshold`.
    Important { offset: i64 },
    /// Bucket `m + 1` or above: heavier than anything the optimum accepts.
    Huge,
}

/// Classifies a weight against the reference bucket.
pub fn classify_weight(w: f64, params: &SparsifyParams) -> Result<WeightClass> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::Contract(format!("weights must be positive, got {w}")));
    }
    let k = bucket_of(w, params.s);
    Ok(if k >= params.m + 1 {
        WeightClass::Huge
    } else if k < params.m - params.threshold {
        WeightClass::Unimportant
    } else {
        WeightClass::Important { offset: params.m - k }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bucket_of_matches_definition() {
        for &(w, s, k) in &[
            (1.0, 1.5, 0i64),
            (1.49, 1.5, 0),
            (1.5, 1.5, 1),
            (5.0, 1.5, 3),
            (7.0, 1.5, 4),
            (0.5, 1.5, -2),
            (100.0, 1.25, 20),
        ] {
            assert_eq!(bucket_of(w, s), k, "w={w} s={s}");
            assert!(powi(s, k) <= w && w < powi(s, k + 1));
        }
    }

    #[test]
    fn boundary_classification() {
        // w just above s^6 with m = 5 is huge.
        let params = SparsifyParams::new(1.0, 1.5, 10, 5).unwrap();
        let w = powi(1.5, 6) * 1.01;
        assert_eq!(classify_weight(w, &params).unwrap(), WeightClass::Huge);
    }

    #[test]
    fn threshold_arithmetic() {
        // n=10, eps=1 (s=1.5): threshold = ceil(log_1.5 100) = 12.
        let params = SparsifyParams::new(1.0, 1.5, 10, 5).unwrap();
        assert_eq!(params.threshold, 12);
        // w=1 sits in bucket 0, inside [m-threshold, m] = [-7, 5].
        assert_eq!(
            classify_weight(1.0, &params).unwrap(),
            WeightClass::Important { offset: 5 }
        );
        // w = 1.5^{-8} is below the cutoff.
        assert_eq!(
            classify_weight(powi(1.5, -8) * 1.0001, &params).unwrap(),
            WeightClass::Unimportant
        );
    }

    #[test]
    fn classes_partition_the_weight_line() {
        let params = SparsifyParams::new(0.5, 1.25, 12, 3).unwrap();
        for k in -40..40i64 {
            let w = powi(1.25, k) * 1.1;
            let class = classify_weight(w, &params).unwrap();
            let expected = if k >= 4 {
                WeightClass::Huge
            } else if k < 3 - params.threshold {
                WeightClass::Unimportant
            } else {
                WeightClass::Important { offset: 3 - k }
            };
            assert_eq!(class, expected, "k={k}");
        }
    }
}
