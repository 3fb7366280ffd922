//! Point estimators and empirical-distribution primitives: sample MAD,
//! oracle MAD (known mean), the dispersion function and its derivative,
//! and sign-balance / atom-fraction statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{EcdfSummary, Series};
use crate::sum::pairwise_sum_by;

/// sign(z): 1, 0, or -1.
pub fn sign(z: f64) -> f64 {
    if z > 0.0 {
        1.0
    } else if z < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Mean absolute deviation about the sample mean,
/// (1/n) Σ |X_i − X̄_n|.
pub fn sample_mad(s: &Series) -> f64 {
    abs_dev_mean(s, s.mean())
}

/// Mean absolute deviation about a known center mu,
/// (1/n) Σ |X_i − mu|.
pub fn oracle_mad(s: &Series, mu: f64) -> Result<f64> {
    if !mu.is_finite() {
        return Err(Error::NonFinite("mu"));
    }
    Ok(abs_dev_mean(s, mu))
}

// Shared accumulation so sample_mad(s) == oracle_mad(s, mean(s)) exactly.
fn abs_dev_mean(s: &Series, center: f64) -> f64 {
    let xs = s.values();
    pairwise_sum_by(xs.len(), &|i| (xs[i] - center).abs()) / xs.len() as f64
}

/// Empirical dispersion function D(u) = (1/n) Σ |X_i − u|. Convex in u,
/// minimized at any sample median.
pub fn dispersion_fn(s: &Series, u: f64) -> Result<f64> {
    oracle_mad(s, u)
}

/// Value of the one-sided derivative formula 2 F̂_n(u) − 1 and whether
/// `u` sits on a kink (coincides with a sample point), where the
/// empirical dispersion is not differentiable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSlope {
    pub value: f64,
    pub kink: bool,
}

pub fn dispersion_derivative(s: &Series, u: f64) -> DispersionSlope {
    let ecdf = EcdfSummary::new(s);
    let kink = ecdf.cdf(u) > ecdf.cdf_left(u);
    DispersionSlope {
        value: 2.0 * ecdf.cdf(u) - 1.0,
        kink,
    }
}

/// Empirical sign balance about mu. Comparison with mu is exact
/// floating-point equality; the three fractions sum to 1 by counting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignBalance {
    /// p_less − p_greater, the empirical Pr[X < mu] − Pr[X > mu].
    pub b_hat: f64,
    pub p_less: f64,
    pub p_eq: f64,
    pub p_greater: f64,
}

pub fn sign_balance(s: &Series, mu: f64) -> SignBalance {
    let mut less = 0usize;
    let mut eq = 0usize;
    let mut greater = 0usize;
    for &x in s.values() {
        if x < mu {
            less += 1;
        } else if x > mu {
            greater += 1;
        } else {
            eq += 1;
        }
    }
    let n = s.len() as f64;
    SignBalance {
        b_hat: (less as f64 - greater as f64) / n,
        p_less: less as f64 / n,
        p_eq: eq as f64 / n,
        p_greater: greater as f64 / n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn series(xs: &[f64]) -> Series {
        Series::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn sample_mad_examples() {
        assert!((sample_mad(&series(&[1.0, 2.0, 3.0])) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(sample_mad(&series(&[5.0; 7])), 0.0);
    }

    #[test]
    fn sample_mad_gaussian_matches_integral() {
        // oracle: E|Z| = sqrt(2/pi) by numerical integration of |x| phi(x),
        // frozen below; 1e5 draws must land within 0.01
        let integral = {
            // Simpson's rule on [0, 12], doubled by symmetry
            let m = 24_000usize;
            let h = 12.0 / m as f64;
            let f = |x: f64| x * crate::special::norm_pdf(x);
            let mut acc = f(0.0) + f(12.0);
            for i in 1..m {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * f(i as f64 * h);
            }
            2.0 * acc * h / 3.0
        };
        assert!((integral - crate::special::SQRT_2_OVER_PI).abs() < 1e-12);

        let mut rng = crate::rng::rng_from_seed(123);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| crate::rng::next_standard_normal(&mut rng))
            .collect();
        let s = Series::new(xs).unwrap();
        assert!((sample_mad(&s) - integral).abs() < 0.01);
    }

    #[test]
    fn oracle_mad_examples() {
        let s = series(&[1.0, 2.0, 3.0]);
        assert!((oracle_mad(&s, 2.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((oracle_mad(&s, 0.0).unwrap() - 2.0).abs() < 1e-15);
        let r = series(&[-1.0, 0.0, 1.0, -1.0, 0.0, 1.0]);
        assert!((oracle_mad(&r, 0.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(oracle_mad(&s, f64::NAN).is_err());
    }

    #[test]
    fn sample_equals_oracle_at_mean_exactly() {
        let s = series(&[0.3, 1.7, -2.2, 5.9, 0.0001]);
        assert_eq!(sample_mad(&s), oracle_mad(&s, s.mean()).unwrap());
    }

    #[test]
    fn dispersion_examples() {
        let s = series(&[0.0, 2.0]);
        assert_eq!(dispersion_fn(&s, 1.0).unwrap(), 1.0);
        assert_eq!(dispersion_fn(&s, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn dispersion_derivative_extremes_and_kinks() {
        let s = series(&[-1.0, 1.0]);
        assert_eq!(dispersion_derivative(&s, -5.0).value, -1.0);
        assert_eq!(dispersion_derivative(&s, 5.0).value, 1.0);
        let mid = dispersion_derivative(&s, 0.0);
        assert_eq!(mid.value, 0.0);
        assert!(!mid.kink);
        let on_point = dispersion_derivative(&s, 1.0);
        assert!(on_point.kink);
    }

    #[test]
    fn sign_balance_examples() {
        let b = sign_balance(&series(&[-1.0, 0.0, 1.0]), 0.0);
        assert_eq!(b.b_hat, 0.0);
        assert!((b.p_eq - 1.0 / 3.0).abs() < 1e-16);

        let b = sign_balance(&series(&[1.0, 2.0, 3.0]), 0.0);
        assert_eq!(b.b_hat, -1.0);
        assert_eq!(b.p_eq, 0.0);

        let b = sign_balance(&series(&[0.0, 0.0, 0.0, 1.0]), 0.0);
        assert_eq!(b.p_eq, 0.75);
        assert_eq!(b.b_hat, -0.25);
        assert_eq!(b.p_less + b.p_eq + b.p_greater, 1.0);
    }
}
