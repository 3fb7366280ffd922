//! Observation batches and the empirical distribution function.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum;

/// One realization of a time series: an ordered batch of finite reals,
/// length at least 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Series {
    values: Vec<f64>,
}

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("every observation"));
        }
        Ok(Series { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // by construction
    }

    /// Arithmetic mean, pairwise-accumulated.
    pub fn mean(&self) -> f64 {
        sum::mean(&self.values)
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl TryFrom<Vec<f64>> for Series {
    type Error = Error;
    fn try_from(values: Vec<f64>) -> Result<Self> {
        Series::new(values)
    }
}

impl From<Series> for Vec<f64> {
    fn from(s: Series) -> Vec<f64> {
        s.values
    }
}

/// Sorted-copy view of a sample supporting the empirical CDF and its
/// left limit. Both values are exact ratios of counts.
#[derive(Debug, Clone)]
pub struct EcdfSummary {
    sorted: Vec<f64>,
}

impl EcdfSummary {
    pub fn new(s: &Series) -> Self {
        let mut sorted = s.values().to_vec();
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        EcdfSummary { sorted }
    }

    pub fn n(&self) -> usize {
        self.sorted.len()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// F̂_n(x) = #{i : X_i <= x} / n (right-continuous).
    pub fn cdf(&self, x: f64) -> f64 {
        let count = self.sorted.partition_point(|&v| v <= x);
        count as f64 / self.n() as f64
    }

    /// F̂_n(x−) = #{i : X_i < x} / n (left limit).
    pub fn cdf_left(&self, x: f64) -> f64 {
        let count = self.sorted.partition_point(|&v| v < x);
        count as f64 / self.n() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_empty_and_nonfinite() {
        assert_eq!(Series::new(vec![]), Err(Error::EmptySeries));
        assert!(Series::new(vec![1.0, f64::NAN]).is_err());
        assert!(Series::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn ecdf_limits_and_jump() {
        let s = Series::new(vec![1.0, 2.0, 2.0, 3.0]).unwrap();
        let e = EcdfSummary::new(&s);
        assert_eq!(e.cdf(0.0), 0.0);
        assert_eq!(e.cdf_left(1.0), 0.0);
        assert_eq!(e.cdf(1.0), 0.25);
        assert_eq!(e.cdf_left(2.0), 0.25);
        assert_eq!(e.cdf(2.0), 0.75);
        // jump at x equals the atom mass
        assert_eq!(e.cdf(2.0) - e.cdf_left(2.0), 0.5);
        assert_eq!(e.cdf(10.0), 1.0);
    }
}
