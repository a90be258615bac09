//! The Λ statistic: the share of the dependence between `x` and `y` that a
//! fitted polynomial accounts for.
//!
//! 1. Regress `y` on `x` and take residuals `z`.
//! 2. `I = I(x, y)` from equal-frequency bins.
//! 3. Map `z` onto the marginal of `y` by rank: `y'_t = sorted(y)[rank(z_t)]`.
//! 4. `I' = I(x, y')` on the same `x` bins, and `Λ = 1 - I'/I`.
//!
//! Because `y'` is a permutation of the values of `y`, its binned marginal
//! entropy is identical to that of `y` and any difference between `I` and
//! `I'` comes from the joint term.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{self, DiscretizedSeries, MillerMadow};
use crate::regression::fit_polynomial;
use crate::series::{PairedSample, Series};
use crate::stats;

/// Mutual information (nats) below which Λ is not reported.
pub const DEFAULT_DEGENERACY_THRESHOLD: f64 = 0.01;
pub const MAX_PROFILE_ORDER: usize = 6;
/// Fewer than this many observations per bin draws a warning.
pub const MIN_POINTS_PER_BIN: usize = 10;
/// Residuals smaller than this multiple of the standard deviation of `y`
/// are rounding noise and are set to exactly zero before ranking.
pub const RESIDUAL_ZERO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "count")]
pub enum BinRule {
    /// `min(50, max(5, floor(sqrt(N) / 2)))`
    Auto,
    Fixed(usize),
}

impl BinRule {
    pub fn resolve(&self, n: usize) -> usize {
        match *self {
            BinRule::Auto => info::default_bin_count(n),
            BinRule::Fixed(m) => m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Regress `y` on `x`.
    YOnX,
    /// Run both directions and keep the smaller Λ.
    Symmetrized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaConfig {
    pub bins: BinRule,
    pub model_order: usize,
    /// Miller-Madow correction; `None` disables it.
    pub correction: Option<MillerMadow>,
    pub degeneracy_threshold: f64,
    pub direction: Direction,
}

/// Defaults: automatic bin count, linear fit, classical Miller-Madow
/// correction `(m - 1) / (2N)` on every entropy term, `y`-on-`x` regression.
impl Default for LambdaConfig {
    fn default() -> Self {
        Self {
            bins: BinRule::Auto,
            model_order: 1,
            correction: Some(MillerMadow::classical()),
            degeneracy_threshold: DEFAULT_DEGENERACY_THRESHOLD,
            direction: Direction::YOnX,
        }
    }
}

impl LambdaConfig {
    pub fn with_order(self, model_order: usize) -> Self {
        Self {
            model_order,
            ..self
        }
    }

    pub fn with_bins(self, bins: BinRule) -> Self {
        Self { bins, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if let BinRule::Fixed(m) = self.bins {
            if m < 2 {
                return Err(Error::InvalidParameter(format!(
                    "bins must be >= 2, got {m}"
                )));
            }
        }
        if self.model_order == 0 {
            return Err(Error::InvalidParameter("model order must be >= 1".into()));
        }
        if let Some(mm) = self.correction {
            if !(mm.divisor > 0.0 && mm.divisor.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "Miller-Madow divisor must be positive, got {}",
                    mm.divisor
                )));
            }
        }
        if !(self.degeneracy_threshold >= 0.0) {
            return Err(Error::InvalidParameter(
                "degeneracy threshold must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaReport {
    pub n: usize,
    pub bins: usize,
    pub order: usize,
    /// Pearson correlation of the input pair.
    pub rho: f64,
    /// `I(x, y)` in nats.
    pub i_xy: f64,
    /// `I(x, y')` in nats.
    pub i_xyprime: f64,
    /// `None` when the report is degenerate.
    pub lambda: Option<f64>,
    pub degenerate: bool,
    /// Set when `I' > I` and Λ was clamped to zero.
    pub clamped: bool,
    /// Which regression direction produced this report.
    pub direction: Direction,
    /// Pearson correlation of `x` and `y'`.
    pub pearson_x_yprime: f64,
    /// Spearman correlation of `y'` and the residuals.
    pub spearman_yprime_residuals: f64,
    pub warnings: Vec<String>,
    pub config: LambdaConfig,
}

impl LambdaReport {
    /// Λ, or [`Error::NoDependence`] when `I` fell below the threshold.
    pub fn lambda_value(&self) -> Result<f64> {
        self.lambda.ok_or(Error::NoDependence {
            mi: self.i_xy,
            threshold: self.config.degeneracy_threshold,
        })
    }
}

/// `Y'_t = sorted(y)[rank(z_t)]`, ranks taken over `(value, index)`.
pub fn quantile_transform(y: &[f64], z: &[f64]) -> Result<Series> {
    if y.len() != z.len() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: z.len(),
        });
    }
    let mut sorted_y = y.to_vec();
    sorted_y.sort_by(f64::total_cmp);
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| z[a].total_cmp(&z[b]).then(a.cmp(&b)));
    let mut out = vec![0.0; z.len()];
    for (rank, &t) in order.iter().enumerate() {
        out[t] = sorted_y[rank];
    }
    Series::new(out)
}

pub fn compute_lambda(sample: &PairedSample, config: &LambdaConfig) -> Result<LambdaReport> {
    config.validate()?;
    match config.direction {
        Direction::YOnX => lambda_one_way(sample, config, Direction::YOnX),
        Direction::Symmetrized => {
            let forward = lambda_one_way(sample, config, Direction::YOnX)?;
            let backward = lambda_one_way(&sample.swapped(), config, Direction::Symmetrized)?;
            Ok(match (forward.lambda, backward.lambda) {
                (Some(f), Some(b)) if b < f => backward,
                _ => forward,
            })
        }
    }
}

fn lambda_one_way(
    sample: &PairedSample,
    config: &LambdaConfig,
    direction: Direction,
) -> Result<LambdaReport> {
    let n = sample.len();
    let bins = config.bins.resolve(n);
    let dx = info::equal_frequency_bins(sample.x(), bins)?;
    lambda_with_x_bins(sample, &dx, config, config.model_order, direction)
}

fn lambda_with_x_bins(
    sample: &PairedSample,
    dx: &DiscretizedSeries,
    config: &LambdaConfig,
    order: usize,
    direction: Direction,
) -> Result<LambdaReport> {
    let (x, y) = (sample.x(), sample.y());
    let n = sample.len();
    let bins = dx.bin_count();
    let mut warnings = Vec::new();
    if n < MIN_POINTS_PER_BIN * bins {
        warnings.push(format!(
            "{n} observations is fewer than {MIN_POINTS_PER_BIN} per bin for {bins} bins"
        ));
    }

    let rho = stats::pearson(x, y)?;
    let fit = fit_polynomial(sample, order)?;
    let dy = info::equal_frequency_bins(y, bins)?;
    let i_xy = info::mutual_information_with(dx, &dy, config.correction)?.value;

    let residuals = snap_rounding_noise(fit.residuals(), stats::std_dev(y)?);
    let y_prime = quantile_transform(y, &residuals)?;
    let dyp = info::equal_frequency_bins(&y_prime, bins)?;
    let i_xyprime = info::mutual_information_with(dx, &dyp, config.correction)?.value;

    let pearson_x_yprime = stats::pearson(x, &y_prime)?;
    // all-zero residuals (an exact fit) leave nothing to rank against
    let spearman_yprime_residuals = stats::spearman(&y_prime, &residuals).unwrap_or(0.0);

    let degenerate = i_xy < config.degeneracy_threshold;
    let (lambda, clamped) = if degenerate {
        (None, false)
    } else {
        let raw = 1.0 - i_xyprime / i_xy;
        (Some(raw.clamp(0.0, 1.0)), !(0.0..=1.0).contains(&raw))
    };

    Ok(LambdaReport {
        n,
        bins,
        order,
        rho,
        i_xy,
        i_xyprime,
        lambda,
        degenerate,
        clamped,
        direction,
        pearson_x_yprime,
        spearman_yprime_residuals,
        warnings,
        config: *config,
    })
}

/// Zeroes residuals that are indistinguishable from floating-point error.
///
/// An exact fit leaves residuals of order `1e-16 |y|` whose signs follow the
/// arithmetic rather than the data; ranking them would manufacture
/// dependence on `x`. Zeroed residuals tie and fall back to index order.
fn snap_rounding_noise(residuals: &[f64], y_scale: f64) -> Vec<f64> {
    let tol = RESIDUAL_ZERO_TOLERANCE * y_scale;
    residuals
        .iter()
        .map(|&z| if z.abs() <= tol { 0.0 } else { z })
        .collect()
}

/// Λ for each polynomial order `1..=max_order`, sharing one binning of `x`.
pub fn lambda_profile(
    sample: &PairedSample,
    config: &LambdaConfig,
    max_order: usize,
) -> Result<Vec<LambdaReport>> {
    config.validate()?;
    if !(1..=MAX_PROFILE_ORDER).contains(&max_order) {
        return Err(Error::InvalidParameter(format!(
            "profile order must be in 1..={MAX_PROFILE_ORDER}, got {max_order}"
        )));
    }
    if config.direction == Direction::Symmetrized {
        return (1..=max_order)
            .into_par_iter()
            .map(|k| compute_lambda(sample, &config.with_order(k)))
            .collect();
    }
    let bins = config.bins.resolve(sample.len());
    let dx = info::equal_frequency_bins(sample.x(), bins)?;
    (1..=max_order)
        .into_par_iter()
        .map(|k| lambda_with_x_bins(sample, &dx, &config.with_order(k), k, Direction::YOnX))
        .collect()
}
