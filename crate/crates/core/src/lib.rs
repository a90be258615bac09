//! Linear and nonlinear components of dependence measured with mutual
//! information.
//!
//! [`lambda::compute_lambda`] removes a fitted polynomial from `y`, maps the
//! residuals back onto the marginal distribution of `y` and compares the
//! binned mutual information before and after. The ratio gives Λ, the share
//! of dependence the fitted model explains. [`bds`] provides the BDS test of
//! the i.i.d. null on residuals as a complementary significance test, and
//! [`datagen`] the seeded synthetic datasets used to exercise both.

pub mod analysis;
pub mod bds;
pub mod datagen;
pub mod error;
pub mod info;
pub mod lambda;
pub mod regression;
pub mod rng;
pub mod series;
pub mod stats;

pub use bds::{bds_statistic, correlation_integral, BdsConfig, BdsResult, Radius};
pub use error::{Error, Result};
pub use lambda::{
    compute_lambda, lambda_profile, quantile_transform, BinRule, LambdaConfig, LambdaReport,
};
pub use regression::{fit_polynomial, RegressionFit};
pub use series::{PairedSample, Series};
