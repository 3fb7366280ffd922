//! Lag-window (HAC) estimation of the 2x2 long-run covariance matrix of
//! a paired series. Bartlett weights keep the estimate positive
//! semidefinite; autocovariances are the biased (1/n) kind for the same
//! reason.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Series;
use crate::sum::{mean, pairwise_sum_by};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Bartlett,
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bandwidth {
    /// floor(4 (n/100)^{2/9})
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagWindowSpec {
    pub kernel: Kernel,
    pub bandwidth: Bandwidth,
}

impl Default for LagWindowSpec {
    fn default() -> Self {
        LagWindowSpec {
            kernel: Kernel::Bartlett,
            bandwidth: Bandwidth::Auto,
        }
    }
}

impl LagWindowSpec {
    pub fn resolve_bandwidth(&self, n: usize) -> usize {
        match self.bandwidth {
            Bandwidth::Fixed(b) => b,
            Bandwidth::Auto => {
                libm::floor(4.0 * libm::pow(n as f64 / 100.0, 2.0 / 9.0)) as usize
            }
        }
    }

    fn weight(&self, k: usize, bandwidth: usize) -> f64 {
        match self.kernel {
            Kernel::Bartlett => 1.0 - k as f64 / (bandwidth as f64 + 1.0),
            Kernel::Truncated => 1.0,
        }
    }
}

/// Symmetric 2x2 covariance matrix for the pair (Y, Z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cov2 {
    pub var_y: f64,
    pub var_z: f64,
    pub cov_yz: f64,
}

impl Cov2 {
    pub fn min_eigenvalue(&self) -> f64 {
        let tr = self.var_y + self.var_z;
        let gap = self.var_y - self.var_z;
        0.5 * (tr - libm::sqrt(gap * gap + 4.0 * self.cov_yz * self.cov_yz))
    }

    pub fn as_matrix(&self) -> [[f64; 2]; 2] {
        [[self.var_y, self.cov_yz], [self.cov_yz, self.var_z]]
    }
}

/// Lag-window long-run covariance of the paired series:
/// Σ̂ = Γ̂₀ + Σ_{k=1}^{B} w_k (Γ̂_k + Γ̂_kᵀ), with biased lag-k
/// cross-covariances. Both series are centered here regardless of any
/// centering done by the caller.
pub fn longrun_cov(y: &Series, z: &Series, spec: &LagWindowSpec) -> Result<Cov2> {
    let n = y.len();
    if z.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: z.len(),
        });
    }
    let bandwidth = spec.resolve_bandwidth(n);
    if n < 2 * (bandwidth + 1) {
        return Err(Error::Config(format!(
            "bandwidth {bandwidth} too large for series of length {n}"
        )));
    }

    let my = mean(y.values());
    let mz = mean(z.values());
    let u: Vec<f64> = y.values().iter().map(|v| v - my).collect();
    let v: Vec<f64> = z.values().iter().map(|v| v - mz).collect();

    let lag = |a: &[f64], b: &[f64], k: usize| -> f64 {
        // (1/n) Σ_{t=k}^{n-1} a_t b_{t-k}
        pairwise_sum_by(n - k, &|i| a[i + k] * b[i]) / n as f64
    };

    let mut var_y = lag(&u, &u, 0);
    let mut var_z = lag(&v, &v, 0);
    let mut cov_yz = lag(&u, &v, 0);
    for k in 1..=bandwidth {
        let w = spec.weight(k, bandwidth);
        var_y += 2.0 * w * lag(&u, &u, k);
        var_z += 2.0 * w * lag(&v, &v, k);
        // symmetrized cross term: w (Γ_k + Γ_kᵀ) contributes the average
        // of the two one-sided cross-covariances to the off-diagonal
        cov_yz += w * (lag(&u, &v, k) + lag(&v, &u, k));
    }

    Ok(Cov2 {
        var_y,
        var_z,
        cov_yz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_seed, next_standard_normal, rng_from_seed};
    use alloc::vec;
    use alloc::vec::Vec;

    fn gaussian_ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = rng_from_seed(seed);
        let mut x = next_standard_normal(&mut rng) / libm::sqrt(1.0 - phi * phi);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            x = phi * x + next_standard_normal(&mut rng);
            out.push(x);
        }
        out
    }

    #[test]
    fn bandwidth_zero_is_sample_covariance() {
        let y = Series::new(vec![1.0, 2.0, 4.0, 0.0]).unwrap();
        let z = Series::new(vec![0.5, 1.0, -1.0, 2.0]).unwrap();
        let spec = LagWindowSpec {
            kernel: Kernel::Bartlett,
            bandwidth: Bandwidth::Fixed(0),
        };
        let c = longrun_cov(&y, &z, &spec).unwrap();
        // direct biased sample covariance
        let my = 7.0 / 4.0;
        let mz = 2.5 / 4.0;
        let mut vy = 0.0;
        let mut vz = 0.0;
        let mut cyz = 0.0;
        for i in 0..4 {
            let a = y.values()[i] - my;
            let b = z.values()[i] - mz;
            vy += a * a / 4.0;
            vz += b * b / 4.0;
            cyz += a * b / 4.0;
        }
        assert!((c.var_y - vy).abs() < 1e-14);
        assert!((c.var_z - vz).abs() < 1e-14);
        assert!((c.cov_yz - cyz).abs() < 1e-14);
    }

    #[test]
    fn identical_pair_is_rank_one() {
        let xs = gaussian_ar1(0.3, 5_000, 17);
        let y = Series::new(xs.clone()).unwrap();
        let z = Series::new(xs).unwrap();
        let c = longrun_cov(&y, &z, &LagWindowSpec::default()).unwrap();
        assert!((c.var_y - c.var_z).abs() < 1e-10);
        assert!((c.cov_yz - c.var_y).abs() < 1e-10);
        assert!(c.min_eigenvalue() >= -1e-10);
    }

    #[test]
    fn ar1_long_run_variance_matches_closed_form() {
        // phi = 0.5, unit innovations: Var(X0) = 4/3, long-run factor
        // (1+phi)/(1-phi) = 3, total 4.0
        let xs = gaussian_ar1(0.5, 100_000, 23);
        let y = Series::new(xs.clone()).unwrap();
        let z = Series::new(xs).unwrap();
        let c = longrun_cov(&y, &z, &LagWindowSpec::default()).unwrap();
        assert!(
            (c.var_y - 4.0).abs() < 0.15 * 4.0,
            "long-run var {} not within 15% of 4.0",
            c.var_y
        );
    }

    #[test]
    fn shuffle_removes_long_run_factor() {
        // destroying the serial dependence must pull the estimate back to
        // the marginal variance 4/3
        let mut xs = gaussian_ar1(0.5, 100_000, 31);
        // deterministic Fisher-Yates with our own stream
        let mut rng = rng_from_seed(derive_seed(31, 1));
        for i in (1..xs.len()).rev() {
            let j = (crate::rng::next_open01(&mut rng) * (i + 1) as f64) as usize;
            xs.swap(i, j.min(i));
        }
        let y = Series::new(xs.clone()).unwrap();
        let z = Series::new(xs).unwrap();
        let c = longrun_cov(&y, &z, &LagWindowSpec::default()).unwrap();
        let marginal = 4.0 / 3.0;
        assert!(
            (c.var_y - marginal).abs() < 0.1 * marginal,
            "shuffled estimate {} should be near {}",
            c.var_y,
            marginal
        );
    }

    #[test]
    fn mismatched_lengths_and_bandwidth_errors() {
        let y = Series::new(vec![1.0, 2.0, 3.0]).unwrap();
        let z = Series::new(vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            longrun_cov(&y, &z, &LagWindowSpec::default()),
            Err(Error::LengthMismatch { .. })
        ));
        let z3 = Series::new(vec![1.0, 2.0, 3.0]).unwrap();
        let spec = LagWindowSpec {
            kernel: Kernel::Bartlett,
            bandwidth: Bandwidth::Fixed(3),
        };
        assert!(matches!(longrun_cov(&y, &z3, &spec), Err(Error::Config(_))));
    }
}
