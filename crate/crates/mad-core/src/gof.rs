//! Distribution-comparison utilities: exact two-sample Kolmogorov-Smirnov
//! distance and quantile-band reports. No p-values; callers set
//! tolerances on the raw distances.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Series;

/// sup_x |F̂_a(x) − F̂_b(x)|, computed exactly by a merged sweep over the
/// two sorted samples (ties handled by advancing through all equal values
/// before comparing).
pub fn ks_two_sample(a: &Series, b: &Series) -> f64 {
    let mut xs = a.values().to_vec();
    let mut ys = b.values().to_vec();
    xs.sort_unstable_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_unstable_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n || j < m {
        let x = match (xs.get(i), ys.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < n && xs[i] == x {
            i += 1;
        }
        while j < m && ys[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileRow {
    pub level: f64,
    pub sample_q: f64,
    pub reference_q: f64,
    pub abs_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub ks_distance: f64,
    pub quantile_table: Vec<QuantileRow>,
    pub n_sample: usize,
    pub n_reference: usize,
}

/// Type-7 interpolated quantile of a sorted slice.
pub fn quantile_type7(sorted: &[f64], level: f64) -> f64 {
    let n = sorted.len();
    let h = (n as f64 - 1.0) * level;
    let lo = h as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// KS distance plus quantile gaps at the given levels, which must be
/// strictly increasing inside (0, 1). No verdict is attached.
pub fn quantile_band(sample: &Series, reference: &Series, levels: &[f64]) -> Result<GofReport> {
    if levels.is_empty() {
        return Err(Error::Config("at least one quantile level".into()));
    }
    if levels.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
        return Err(Error::Config("levels must lie in (0,1)".into()));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("levels must be strictly increasing".into()));
    }
    let mut xs = sample.values().to_vec();
    let mut ys = reference.values().to_vec();
    xs.sort_unstable_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_unstable_by(|p, q| p.partial_cmp(q).unwrap());
    let quantile_table = levels
        .iter()
        .map(|&level| {
            let sample_q = quantile_type7(&xs, level);
            let reference_q = quantile_type7(&ys, level);
            QuantileRow {
                level,
                sample_q,
                reference_q,
                abs_gap: (sample_q - reference_q).abs(),
            }
        })
        .collect();
    Ok(GofReport {
        ks_distance: ks_two_sample(sample, reference),
        quantile_table,
        n_sample: sample.len(),
        n_reference: reference.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(xs: &[f64]) -> Series {
        Series::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn ks_identical_and_disjoint() {
        let a = series(&[1.0, 2.0, 3.0]);
        assert_eq!(ks_two_sample(&a, &a), 0.0);

        let low = series(&[0.0, 0.5]);
        let high = series(&[10.0, 11.0]);
        assert_eq!(ks_two_sample(&low, &high), 1.0);
    }

    #[test]
    fn ks_step_function_sup() {
        let a = series(&[0.0]);
        let b = series(&[0.0, 1.0]);
        assert_eq!(ks_two_sample(&a, &b), 0.5);
    }

    #[test]
    fn ks_symmetric_and_monotone_invariant() {
        let mut rng = crate::rng::rng_from_seed(3);
        let xs: Vec<f64> = (0..500)
            .map(|_| crate::rng::next_standard_normal(&mut rng))
            .collect();
        let ys: Vec<f64> = (0..700)
            .map(|_| crate::rng::next_standard_normal(&mut rng) + 0.2)
            .collect();
        let a = series(&xs);
        let b = series(&ys);
        let d = ks_two_sample(&a, &b);
        assert_eq!(d, ks_two_sample(&b, &a));

        // common strictly increasing transform
        let ta = series(&xs.iter().map(|x| libm::exp(*x)).collect::<Vec<_>>());
        let tb = series(&ys.iter().map(|x| libm::exp(*x)).collect::<Vec<_>>());
        assert!((d - ks_two_sample(&ta, &tb)).abs() < 1e-15);
    }

    #[test]
    fn ks_self_distance_of_split_halves() {
        // two disjoint halves of one iid sample of size 2m: distance
        // should be O(m^{-1/2}); m = 5e4 with a fixed seed stays below 0.02
        let mut rng = crate::rng::rng_from_seed(2024);
        let m = 50_000;
        let all: Vec<f64> = (0..2 * m)
            .map(|_| crate::rng::next_standard_normal(&mut rng))
            .collect();
        let a = series(&all[..m]);
        let b = series(&all[m..]);
        assert!(ks_two_sample(&a, &b) < 0.02);
    }

    #[test]
    fn quantile_band_identical_and_shifted() {
        let mut rng = crate::rng::rng_from_seed(8);
        let xs: Vec<f64> = (0..10_000)
            .map(|_| crate::rng::next_standard_normal(&mut rng))
            .collect();
        let a = series(&xs);
        let r = quantile_band(&a, &a, &[0.1, 0.5, 0.9]).unwrap();
        assert!(r.quantile_table.iter().all(|row| row.abs_gap == 0.0));

        let shifted = series(&xs.iter().map(|x| x + 2.5).collect::<Vec<_>>());
        let r = quantile_band(&shifted, &a, &[0.25, 0.5, 0.75]).unwrap();
        for row in &r.quantile_table {
            assert!((row.abs_gap - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn quantile_band_rejects_bad_levels() {
        let a = series(&[1.0, 2.0]);
        assert!(quantile_band(&a, &a, &[]).is_err());
        assert!(quantile_band(&a, &a, &[0.0, 0.5]).is_err());
        assert!(quantile_band(&a, &a, &[0.5, 0.5]).is_err());
        assert!(quantile_band(&a, &a, &[0.9, 0.1]).is_err());
    }

    use alloc::vec::Vec;
}
