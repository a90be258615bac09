//! Composed analyses: Λ plus a BDS test on the fitted model's residuals,
//! and the coefficient sweep that locates where the BDS test starts to
//! reject.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bds::{self, BdsConfig, BdsResult};
use crate::datagen::gen_polynomial;
use crate::error::{Error, Result};
use crate::lambda::{compute_lambda, LambdaConfig, LambdaReport};
use crate::regression::fit_polynomial;
use crate::series::PairedSample;

/// Order in which residuals are fed to the BDS test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ResidualOrder {
    /// Sorted by the regressor `x`.
    #[default]
    Regressor,
    /// As the observations were supplied.
    Observation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualTest {
    pub bds: BdsConfig,
    pub order: ResidualOrder,
}

impl Default for ResidualTest {
    fn default() -> Self {
        Self {
            bds: BdsConfig::default(),
            order: ResidualOrder::Regressor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub lambda: LambdaReport,
    pub bds: Option<BdsResult>,
}

/// BDS test on the residuals of the order-`order` polynomial fit.
pub fn residual_bds(sample: &PairedSample, order: usize, test: &ResidualTest) -> Result<BdsResult> {
    let fit = fit_polynomial(sample, order)?;
    let series = match test.order {
        ResidualOrder::Regressor => bds::order_by_regressor(sample.x(), fit.residuals())?,
        ResidualOrder::Observation => fit.residuals().to_vec(),
    };
    bds::bds_statistic(&series, &test.bds)
}

pub fn analyze(
    sample: &PairedSample,
    config: &LambdaConfig,
    test: Option<&ResidualTest>,
) -> Result<Analysis> {
    let lambda = compute_lambda(sample, config)?;
    let bds = test
        .map(|t| residual_bds(sample, config.model_order, t))
        .transpose()?;
    Ok(Analysis { lambda, bds })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverConfig {
    /// Power of the nonlinear term, 2 or 3.
    pub order: u32,
    pub a_start: f64,
    pub a_step: f64,
    pub steps: usize,
    pub seeds: Vec<u64>,
    pub n: usize,
    pub lambda: LambdaConfig,
    pub test: ResidualTest,
    /// Significance level for a rejection.
    pub alpha: f64,
    /// Stop after the first grid point with majority rejection.
    pub stop_at_crossover: bool,
}

impl CrossoverConfig {
    pub fn new(order: u32, a_step: f64, steps: usize, seeds: Vec<u64>) -> Self {
        Self {
            order,
            a_start: 0.0,
            a_step,
            steps,
            seeds,
            n: 10_000,
            lambda: LambdaConfig::default(),
            test: ResidualTest::default(),
            alpha: 0.05,
            stop_at_crossover: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverRow {
    pub a: f64,
    /// Mean Λ over seeds with a nondegenerate report.
    pub mean_lambda: Option<f64>,
    pub mean_statistic: f64,
    pub rejection_fraction: f64,
    pub degenerate: usize,
}

impl CrossoverRow {
    pub fn majority_rejects(&self) -> bool {
        self.rejection_fraction > 0.5
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub a: f64,
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverTable {
    pub config: CrossoverConfig,
    pub rows: Vec<CrossoverRow>,
    /// Smallest grid value where more than half the seeds reject.
    pub crossover: Option<Crossover>,
}

fn crossover_cell(a: f64, seed: u64, cfg: &CrossoverConfig) -> Result<(LambdaReport, BdsResult)> {
    let sample = gen_polynomial(a, cfg.order, cfg.n, seed)?;
    let report = compute_lambda(&sample, &cfg.lambda)?;
    let bds = residual_bds(&sample, cfg.lambda.model_order, &cfg.test)?;
    Ok((report, bds))
}

/// Sweeps `a` over `a_start + i * a_step` for `Y = 3X + a X^order + xi`,
/// recording Λ and the BDS outcome on each seed.
pub fn crossover_sweep(cfg: &CrossoverConfig) -> Result<CrossoverTable> {
    if cfg.seeds.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one seed is required".into(),
        ));
    }
    if !(cfg.a_start >= 0.0 && cfg.a_step > 0.0) {
        return Err(Error::InvalidParameter(
            "grid must start at a >= 0 and increase".into(),
        ));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be in (0, 1), got {}",
            cfg.alpha
        )));
    }
    let mut rows = Vec::with_capacity(cfg.steps);
    let mut crossover = None;
    for i in 0..cfg.steps {
        let a = cfg.a_start + i as f64 * cfg.a_step;
        let cells: Vec<(LambdaReport, BdsResult)> = cfg
            .seeds
            .par_iter()
            .map(|&seed| crossover_cell(a, seed, cfg))
            .collect::<Result<_>>()?;
        let lambdas: Vec<f64> = cells.iter().filter_map(|(r, _)| r.lambda).collect();
        let seeds = cells.len() as f64;
        let rejections = cells.iter().filter(|(_, b)| b.p_value < cfg.alpha).count();
        let row = CrossoverRow {
            a,
            mean_lambda: (!lambdas.is_empty())
                .then(|| lambdas.iter().sum::<f64>() / lambdas.len() as f64),
            mean_statistic: cells.iter().map(|(_, b)| b.statistic).sum::<f64>() / seeds,
            rejection_fraction: rejections as f64 / seeds,
            degenerate: cells.len() - lambdas.len(),
        };
        let hit = row.majority_rejects();
        if hit && crossover.is_none() {
            crossover = Some(Crossover {
                a,
                lambda: row.mean_lambda,
            });
        }
        rows.push(row);
        if hit && cfg.stop_at_crossover {
            break;
        }
    }
    Ok(CrossoverTable {
        config: cfg.clone(),
        rows,
        crossover,
    })
}
