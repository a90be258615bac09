//! Ordinary least-squares polynomial regression of `y` on `x`.
//!
//! The design matrix is built on the centered and scaled regressor
//! `u = (x - offset) / scale` and solved by Householder QR. Coefficients are
//! reported in the centered basis `sum_j c_j (x - offset)^j`;
//! [`RegressionFit::raw_coefficients`] expands them back to powers of `x`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{PairedSample, Series};
use crate::stats;

/// Relative size of a diagonal entry of `R` below which the design is
/// treated as rank deficient.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    order: usize,
    offset: f64,
    coefficients: Vec<f64>,
    fitted: Series,
    residuals: Series,
}

impl RegressionFit {
    pub fn order(&self) -> usize {
        self.order
    }

    /// The value subtracted from `x` before forming powers (the mean of `x`).
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Coefficients of `(x - offset)^j`, intercept first.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Coefficients of `x^j`, intercept first.
    pub fn raw_coefficients(&self) -> Vec<f64> {
        let k = self.order;
        let mut raw = vec![0.0; k + 1];
        for (j, &c) in self.coefficients.iter().enumerate() {
            // c (x - o)^j = c sum_i binom(j, i) x^i (-o)^(j - i)
            let mut binom = 1.0;
            for (i, slot) in raw.iter_mut().enumerate().take(j + 1) {
                *slot += c * binom * (-self.offset).powi((j - i) as i32);
                binom = binom * (j - i) as f64 / (i + 1) as f64;
            }
        }
        raw
    }

    pub fn predict(&self, x: f64) -> f64 {
        let u = x - self.offset;
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * u + c)
    }

    pub fn fitted(&self) -> &Series {
        &self.fitted
    }

    pub fn residuals(&self) -> &Series {
        &self.residuals
    }

    pub fn residual_sum_of_squares(&self) -> f64 {
        self.residuals.iter().map(|z| z * z).sum()
    }
}

/// Least-squares fit of `y` on `{1, x, ..., x^order}`.
pub fn fit_polynomial(sample: &PairedSample, order: usize) -> Result<RegressionFit> {
    if order == 0 {
        return Err(Error::InvalidParameter(
            "polynomial order must be >= 1".into(),
        ));
    }
    let n = sample.len();
    let p = order + 1;
    if n <= p {
        return Err(Error::DegenerateInput(format!(
            "order {order} fit needs more than {p} observations, got {n}"
        )));
    }
    let x = sample.x();
    let y = sample.y();
    let offset = stats::mean(x)?;
    let scale = stats::std_dev(x)?;
    if scale == 0.0 {
        return Err(Error::ConstantSeries);
    }

    let design = DMatrix::from_fn(n, p, |i, j| ((x[i] - offset) / scale).powi(j as i32));
    let qr = design.clone().qr();
    let r = qr.r();
    let r_max = (0..p).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
    if (0..p).any(|j| r[(j, j)].abs() <= RANK_TOLERANCE * r_max) {
        return Err(Error::SingularDesign { order });
    }
    let mut qty = DVector::from_column_slice(y);
    qr.q_tr_mul(&mut qty);
    let beta = r
        .solve_upper_triangular(&qty.rows(0, p).into_owned())
        .ok_or(Error::SingularDesign { order })?;

    let fitted_v = &design * &beta;
    let fitted: Vec<f64> = fitted_v.iter().copied().collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let coefficients = beta
        .iter()
        .enumerate()
        .map(|(j, b)| b / scale.powi(j as i32))
        .collect();

    Ok(RegressionFit {
        order,
        offset,
        coefficients,
        fitted: Series::new(fitted)?,
        residuals: Series::new(residuals)?,
    })
}
