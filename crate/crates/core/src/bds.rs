//! BDS test of the i.i.d. null on a scalar series.
//!
//! With `C_1` and `C_m` the correlation integrals of single points and of
//! length-`m` windows at radius `epsilon`, the statistic is
//!
//! ```text
//! W_m = sqrt(N - m + 1) (C_m - C_1^m) / sqrt(V_m)
//! V_m = 4 [ K^m + 2 sum_{j=1}^{m-1} K^(m-j) C^(2j) + (m-1)^2 C^(2m) - m^2 K C^(2m-2) ]
//! ```
//!
//! where `C` and `K` (the fraction of ordered triples `(i, j, k)` with both
//! `|x_i - x_j|` and `|x_i - x_k|` below `epsilon`) are taken over the whole
//! series, while `C_1` in the numerator uses only the last `N - m + 1`
//! points so that it covers the same observations as `C_m`. `W_m` is
//! asymptotically standard normal under the null; the p-value is two-sided.
//!
//! Pair counting is exact. Points are sorted once so that only pairs whose
//! first coordinates are within `epsilon` are inspected.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::stats;

/// Below this length the asymptotic distribution is unreliable.
pub const MIN_RECOMMENDED_LEN: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "value")]
pub enum Radius {
    /// Multiple of the sample standard deviation of the series.
    StdMultiple(f64),
    Absolute(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BdsConfig {
    pub embedding: usize,
    pub radius: Radius,
}

impl Default for BdsConfig {
    fn default() -> Self {
        Self {
            embedding: 2,
            radius: Radius::StdMultiple(0.5),
        }
    }
}

impl BdsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.embedding < 2 {
            return Err(Error::InvalidParameter(format!(
                "embedding dimension must be >= 2, got {}",
                self.embedding
            )));
        }
        let (Radius::StdMultiple(r) | Radius::Absolute(r)) = self.radius;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "distance threshold must be positive, got {r}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BdsResult {
    pub embedding: usize,
    pub epsilon: f64,
    /// Correlation integral at dimension 1 over the last `N - m + 1` points.
    pub c1: f64,
    /// Correlation integral at the embedding dimension.
    pub cm: f64,
    /// Triple statistic over the full series.
    pub k: f64,
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
    pub warnings: Vec<String>,
}

/// Point indices sorted by value, ties by index.
fn sorted_order(s: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]).then(a.cmp(&b)));
    order
}

/// Number of unordered pairs of length-`m` windows whose max-norm distance
/// is below `epsilon`.
fn count_window_pairs(s: &[f64], m: usize, epsilon: f64) -> u64 {
    let windows = s.len() + 1 - m;
    if m == 1 {
        return neighbour_counts(&s[..windows], epsilon).iter().sum::<u64>() / 2;
    }
    // coordinate-major window table, rows ordered by first coordinate
    let starts = sorted_order(&s[..windows]);
    let columns: Vec<Vec<f64>> = (0..m)
        .map(|j| starts.iter().map(|&a| s[a + j]).collect())
        .collect();
    let first = &columns[0];
    let mut count = 0u64;
    let mut end = 0;
    for p in 0..windows {
        end = end.max(p + 1);
        while end < windows && first[end] - first[p] < epsilon {
            end += 1;
        }
        if m == 2 {
            let a = columns[1][p];
            count += columns[1][p + 1..end]
                .iter()
                .map(|&v| u64::from((v - a).abs() < epsilon))
                .sum::<u64>();
        } else {
            count += (p + 1..end)
                .filter(|&q| columns[1..].iter().all(|c| (c[q] - c[p]).abs() < epsilon))
                .count() as u64;
        }
    }
    count
}

/// Fraction of pairs of length-`m` windows within max-norm distance
/// `epsilon`, over all `C(N - m + 1, 2)` pairs.
pub fn correlation_integral(s: &[f64], m: usize, epsilon: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "embedding dimension must be >= 1".into(),
        ));
    }
    if s.len() < m + 1 {
        return Err(Error::TooShort {
            len: s.len(),
            need: m,
        });
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let windows = (s.len() + 1 - m) as u64;
    let pairs = windows * (windows - 1) / 2;
    Ok(count_window_pairs(s, m, epsilon) as f64 / pairs as f64)
}

/// For each point, the number of other points within `epsilon`.
fn neighbour_counts(s: &[f64], epsilon: f64) -> Vec<u64> {
    let mut sorted = s.to_vec();
    sorted.sort_by(f64::total_cmp);
    s.iter()
        .map(|&v| {
            let lo = sorted.partition_point(|&w| v - w >= epsilon);
            let hi = sorted.partition_point(|&w| w - v < epsilon);
            (hi - lo - 1) as u64
        })
        .collect()
}

pub fn bds_statistic(s: &[f64], config: &BdsConfig) -> Result<BdsResult> {
    config.validate()?;
    let m = config.embedding;
    let n = s.len();
    if n < m + 2 {
        return Err(Error::TooShort {
            len: n,
            need: m + 1,
        });
    }
    let sd = stats::std_dev(s)?;
    if sd == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let epsilon = match config.radius {
        Radius::StdMultiple(r) => r * sd,
        Radius::Absolute(e) => e,
    };
    let mut warnings = Vec::new();
    if n < MIN_RECOMMENDED_LEN {
        warnings.push(format!(
            "series length {n} is below {MIN_RECOMMENDED_LEN}; the normal approximation may be poor"
        ));
    }

    let nf = n as f64;
    let d = neighbour_counts(s, epsilon);
    let close_pairs: u64 = d.iter().sum();
    let c = close_pairs as f64 / (nf * (nf - 1.0));
    let triples: u64 = d.iter().map(|&di| di * di.saturating_sub(1)).sum();
    let k = triples as f64 / (nf * (nf - 1.0) * (nf - 2.0));

    let c1 = correlation_integral(&s[m - 1..], 1, epsilon)?;
    let cm = correlation_integral(s, m, epsilon)?;

    let mi = m as i32;
    let cross: f64 = (1..m)
        .map(|j| k.powi(mi - j as i32) * c.powi(2 * j as i32))
        .sum();
    let variance = 4.0
        * (k.powi(mi) + 2.0 * cross + ((m - 1) * (m - 1)) as f64 * c.powi(2 * mi)
            - (m * m) as f64 * k * c.powi(2 * mi - 2));
    if !(variance > 0.0) {
        return Err(Error::DegenerateInput(format!(
            "BDS variance estimate is {variance:e} at epsilon {epsilon}"
        )));
    }
    let statistic = ((n - m + 1) as f64).sqrt() * (cm - c1.powi(mi)) / variance.sqrt();
    let p_value = erfc(statistic.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0);

    Ok(BdsResult {
        embedding: m,
        epsilon,
        c1,
        cm,
        k,
        statistic,
        p_value,
        n,
        warnings,
    })
}

/// Residuals reordered by increasing regressor value (ties by index).
///
/// For cross-sectional data the observation order carries no information,
/// so structure left in the residuals only shows up as serial dependence
/// once they are arranged along `x`.
pub fn order_by_regressor(x: &[f64], residuals: &[f64]) -> Result<Vec<f64>> {
    if x.len() != residuals.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: residuals.len(),
        });
    }
    Ok(sorted_order(x).into_iter().map(|i| residuals[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_integral_is_one() {
        let s = vec![2.5; 30];
        for m in 1..4 {
            assert_eq!(correlation_integral(&s, m, 0.1).unwrap(), 1.0);
        }
    }

    #[test]
    fn huge_radius_integral_is_one() {
        let s: Vec<f64> = (0..50).map(|i| ((i * 13) % 17) as f64).collect();
        assert_eq!(correlation_integral(&s, 3, 1e9).unwrap(), 1.0);
    }

    #[test]
    fn two_level_series() {
        // 100 points alternating 0, 10: same-level pairs 2 * C(50, 2) of C(100, 2)
        let s: Vec<f64> = (0..100)
            .map(|i| if i % 2 == 0 { 0.0 } else { 10.0 })
            .collect();
        let c = correlation_integral(&s, 1, 1.0).unwrap();
        assert!((c - 2450.0 / 4950.0).abs() < 1e-15);
    }

    #[test]
    fn integral_errors() {
        assert!(matches!(
            correlation_integral(&[1.0, 2.0], 2, 1.0),
            Err(Error::TooShort { .. })
        ));
        assert!(correlation_integral(&[1.0, 2.0, 3.0], 1, 0.0).is_err());
    }

    #[test]
    fn bds_errors() {
        assert_eq!(
            bds_statistic(&[1.0; 300], &BdsConfig::default()),
            Err(Error::ZeroVariance)
        );
        let bad = BdsConfig {
            embedding: 1,
            ..BdsConfig::default()
        };
        assert!(bds_statistic(&[1.0, 2.0, 3.0, 4.0], &bad).is_err());
        assert!(matches!(
            bds_statistic(&[1.0, 2.0, 3.0], &BdsConfig::default()),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn short_series_warns() {
        let s: Vec<f64> = (0..50).map(|i| ((i * 37) % 50) as f64).collect();
        let r = bds_statistic(&s, &BdsConfig::default()).unwrap();
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn regressor_order() {
        let z = order_by_regressor(&[3.0, 1.0, 2.0], &[30.0, 10.0, 20.0]).unwrap();
        assert_eq!(z, vec![10.0, 20.0, 30.0]);
    }
}
