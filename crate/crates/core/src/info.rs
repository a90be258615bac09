//! Equal-frequency discretization and plug-in information estimates.
//!
//! All quantities are in nats. Entropies are computed from bin counts with
//! the plug-in (maximum likelihood) estimator and can be bias corrected with
//! the Miller-Madow term `(m - 1) / (divisor * N)`, where `m` is the number
//! of nonempty bins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Divisor of the Miller-Madow term used by [`miller_madow`] and
/// [`mutual_information`]: the correction `(m - 1) / N`.
pub const DEFAULT_MILLER_MADOW_DIVISOR: f64 = 1.0;
/// Divisor of the classical asymptotic correction `(m - 1) / (2N)`.
pub const CLASSICAL_MILLER_MADOW_DIVISOR: f64 = 2.0;

/// Miller-Madow bias correction `(m - 1) / (divisor * N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MillerMadow {
    pub divisor: f64,
}

impl Default for MillerMadow {
    fn default() -> Self {
        Self {
            divisor: DEFAULT_MILLER_MADOW_DIVISOR,
        }
    }
}

impl MillerMadow {
    pub const fn classical() -> Self {
        Self {
            divisor: CLASSICAL_MILLER_MADOW_DIVISOR,
        }
    }

    pub fn term(&self, nonempty_bins: usize, n: u64) -> f64 {
        (nonempty_bins as f64 - 1.0) / (self.divisor * n as f64)
    }
}

/// Default bin count: `min(50, max(5, floor(sqrt(N) / 2)))`.
pub fn default_bin_count(n: usize) -> usize {
    (((n as f64).sqrt() / 2.0).floor() as usize).clamp(5, 50)
}

/// Bin labels for one series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedSeries {
    labels: Vec<usize>,
    bin_count: usize,
    /// Smallest and largest source value falling in each bin.
    boundaries: Vec<(f64, f64)>,
}

impl DiscretizedSeries {
    /// Wraps precomputed labels; every label must be below `bin_count`.
    pub fn from_labels(labels: Vec<usize>, bin_count: usize) -> Result<Self> {
        if bin_count == 0 {
            return Err(Error::InvalidParameter("bin count must be positive".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= bin_count) {
            return Err(Error::InvalidParameter(format!(
                "label {bad} out of range for {bin_count} bins"
            )));
        }
        Ok(Self {
            labels,
            bin_count,
            boundaries: Vec::new(),
        })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    pub fn boundaries(&self) -> &[(f64, f64)] {
        &self.boundaries
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.bin_count];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }
}

/// Assigns `m` equal-frequency bins.
///
/// Values are ordered by `(value, original index)` and the `p`-th value in
/// that order goes to bin `floor(p * m / N)`, so occupancies differ by at
/// most one. Runs of tied values are split across a boundary in index order.
pub fn equal_frequency_bins(s: &[f64], m: usize) -> Result<DiscretizedSeries> {
    let n = s.len();
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 bins, got {m}"
        )));
    }
    if n < m {
        return Err(Error::TooFewPoints { n, bins: m });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]).then(a.cmp(&b)));

    let mut labels = vec![0usize; n];
    let mut boundaries = vec![(f64::INFINITY, f64::NEG_INFINITY); m];
    for (pos, &i) in order.iter().enumerate() {
        let bin = pos * m / n;
        labels[i] = bin;
        let b = &mut boundaries[bin];
        b.0 = b.0.min(s[i]);
        b.1 = b.1.max(s[i]);
    }
    Ok(DiscretizedSeries {
        labels,
        bin_count: m,
        boundaries,
    })
}

/// An entropy value together with what is needed to correct it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub nonempty_bins: usize,
    pub corrected: bool,
    pub n: u64,
}

/// Plug-in entropy `-sum (c/n) ln(c/n)` over nonzero counts.
pub fn plugin_entropy(counts: &[u64], n: u64) -> Result<EntropyEstimate> {
    let sum: u64 = counts.iter().sum();
    if sum != n || n == 0 {
        return Err(Error::CountMismatch { sum, n });
    }
    // summing over sorted counts makes the value independent of bin order,
    // so transposed or relabeled tables give bitwise-identical entropies
    let mut nonzero: Vec<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
    nonzero.sort_unstable();
    let nf = n as f64;
    let value: f64 = nonzero
        .iter()
        .map(|&c| {
            let p = c as f64 / nf;
            -p * p.ln()
        })
        .sum();
    Ok(EntropyEstimate {
        value: value.max(0.0),
        nonempty_bins: nonzero.len(),
        corrected: false,
        n,
    })
}

/// Miller-Madow correction with the default divisor.
pub fn miller_madow(e: EntropyEstimate) -> Result<EntropyEstimate> {
    miller_madow_with(e, MillerMadow::default())
}

pub fn miller_madow_with(e: EntropyEstimate, mm: MillerMadow) -> Result<EntropyEstimate> {
    if e.corrected {
        return Err(Error::AlreadyCorrected);
    }
    Ok(EntropyEstimate {
        value: e.value + mm.term(e.nonempty_bins, e.n),
        corrected: true,
        ..e
    })
}

/// Contingency counts of two aligned discretizations, row-major
/// (`x` bin selects the row).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointHistogram {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
    n: u64,
}

impl JointHistogram {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.cols + j]
    }

    /// Flat row-major cell counts.
    pub fn cells(&self) -> &[u64] {
        &self.counts
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts
            .chunks(self.cols)
            .map(|row| row.iter().sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.cols];
        for row in self.counts.chunks(self.cols) {
            for (s, &c) in sums.iter_mut().zip(row) {
                *s += c;
            }
        }
        sums
    }
}

pub fn joint_histogram(dx: &DiscretizedSeries, dy: &DiscretizedSeries) -> Result<JointHistogram> {
    if dx.len() != dy.len() {
        return Err(Error::LengthMismatch {
            left: dx.len(),
            right: dy.len(),
        });
    }
    let (rows, cols) = (dx.bin_count, dy.bin_count);
    let mut counts = vec![0u64; rows * cols];
    for (&i, &j) in dx.labels.iter().zip(&dy.labels) {
        counts[i * cols + j] += 1;
    }
    Ok(JointHistogram {
        rows,
        cols,
        counts,
        n: dx.len() as u64,
    })
}

/// The three entropy terms behind a mutual information estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutualInformation {
    pub h_x: EntropyEstimate,
    pub h_y: EntropyEstimate,
    pub h_xy: EntropyEstimate,
    /// `H(X) + H(Y) - H(X,Y)`, floored at zero.
    pub value: f64,
}

/// `I = H(X) + H(Y) - H(X,Y)` in nats, each term Miller-Madow corrected
/// when `correction` is set (default divisor).
pub fn mutual_information(
    dx: &DiscretizedSeries,
    dy: &DiscretizedSeries,
    correction: bool,
) -> Result<f64> {
    let mm = correction.then(MillerMadow::default);
    mutual_information_with(dx, dy, mm).map(|mi| mi.value)
}

pub fn mutual_information_with(
    dx: &DiscretizedSeries,
    dy: &DiscretizedSeries,
    correction: Option<MillerMadow>,
) -> Result<MutualInformation> {
    let joint = joint_histogram(dx, dy)?;
    let n = joint.n;
    let mut h_x = plugin_entropy(&joint.row_sums(), n)?;
    let mut h_y = plugin_entropy(&joint.col_sums(), n)?;
    let mut h_xy = plugin_entropy(&joint.counts, n)?;
    if let Some(mm) = correction {
        h_x = miller_madow_with(h_x, mm)?;
        h_y = miller_madow_with(h_y, mm)?;
        h_xy = miller_madow_with(h_xy, mm)?;
    }
    // summing the marginals first keeps the result symmetric in (x, y)
    let value = ((h_x.value + h_y.value) - h_xy.value).max(0.0);
    Ok(MutualInformation {
        h_x,
        h_y,
        h_xy,
        value,
    })
}

/// Mutual information of a bivariate normal with correlation `rho`:
/// `-ln(1 - rho^2) / 2`.
pub fn gaussian_mi(rho: f64) -> Result<f64> {
    if rho.is_nan() || rho.abs() >= 1.0 {
        return Err(Error::PerfectCorrelation(rho));
    }
    Ok(-0.5 * (-rho * rho).ln_1p())
}

/// Distance-`d` correlation function of a 0/1 sequence,
/// `E[s_t s_{t+d}] - P1^2`, with `P1` the overall frequency of ones.
pub fn binary_correlation_function(seq: &[u8], d: usize) -> Result<f64> {
    if d == 0 || seq.len() <= d {
        return Err(Error::TooShort {
            len: seq.len(),
            need: d,
        });
    }
    if let Some(&bad) = seq.iter().find(|&&s| s > 1) {
        return Err(Error::InvalidParameter(format!(
            "binary symbol expected, got {bad}"
        )));
    }
    let ones = seq.iter().filter(|&&s| s == 1).count() as f64;
    let p1 = ones / seq.len() as f64;
    let pairs = seq.len() - d;
    let both = seq
        .iter()
        .zip(&seq[d..])
        .filter(|(&a, &b)| a == 1 && b == 1)
        .count() as f64;
    Ok(both / pairs as f64 - p1 * p1)
}

/// Small-correlation approximation `I(d) ~ (Gamma(d) / (P0 P1))^2 / 2`.
///
/// Only meaningful when `|gamma / (p0 p1)|` is small; that is left to the
/// caller.
pub fn binary_mi_approx(gamma: f64, p0: f64, p1: f64) -> Result<f64> {
    if !(p0 > 0.0 && p1 > 0.0) || ((p0 + p1) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidProbabilities(format!(
            "p0 = {p0}, p1 = {p1} must be positive and sum to 1"
        )));
    }
    let r = gamma / (p0 * p1);
    Ok(0.5 * r * r)
}
