//! Versioned report documents and their text rendering.
//!
//! The JSON layout is described by `docs/report-schema.json`; any change to
//! the field set bumps [`SCHEMA_VERSION`].

use std::fmt::Write as _;

use milambda::analysis::{CrossoverTable, ResidualTest};
use milambda::datagen::GenSpec;
use milambda::lambda::Direction;
use milambda::{BdsResult, LambdaConfig, LambdaReport};
use serde::Serialize;

use crate::input::InputSummary;

pub const SCHEMA: &str = "milambda.report";
pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub lambda: LambdaConfig,
    /// `None` when the residual test was switched off.
    pub residual_test: Option<ResidualTest>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    /// SHA-256 of the CSV bytes analysed. Generated inputs are digested in
    /// the exact form `generate` would write them.
    pub input_digest: String,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub seed: Option<u64>,
    pub generator: Option<GenSpec>,
    pub config: RunConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub schema_version: u32,
    pub kind: &'static str,
    pub input: InputSummary,
    pub lambda: LambdaReport,
    pub bds: Option<BdsResult>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileReport {
    pub schema: &'static str,
    pub schema_version: u32,
    pub kind: &'static str,
    pub input: InputSummary,
    pub profile: Vec<LambdaReport>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossoverReport {
    pub schema: &'static str,
    pub schema_version: u32,
    pub kind: &'static str,
    pub table: CrossoverTable,
    pub tool_version: &'static str,
}

impl Report {
    pub fn new(
        input: InputSummary,
        lambda: LambdaReport,
        bds: Option<BdsResult>,
        provenance: Provenance,
    ) -> Self {
        Self {
            schema: SCHEMA,
            schema_version: SCHEMA_VERSION,
            kind: "analysis",
            input,
            lambda,
            bds,
            provenance,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        write_input(&mut out, &self.input, &self.provenance);
        write_lambda(&mut out, &self.lambda);
        if let Some(b) = &self.bds {
            let _ = writeln!(
                out,
                "bds          m={} eps={:.6} W={:.4} p={:.4}",
                b.embedding, b.epsilon, b.statistic, b.p_value
            );
            for w in &b.warnings {
                let _ = writeln!(out, "warning      {w}");
            }
        }
        out
    }
}

impl ProfileReport {
    pub fn new(input: InputSummary, profile: Vec<LambdaReport>, provenance: Provenance) -> Self {
        Self {
            schema: SCHEMA,
            schema_version: SCHEMA_VERSION,
            kind: "profile",
            input,
            profile,
            provenance,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        write_input(&mut out, &self.input, &self.provenance);
        if let Some(first) = self.profile.first() {
            let _ = writeln!(
                out,
                "n={} bins={} I(x,y)={:.6}",
                first.n, first.bins, first.i_xy
            );
        }
        let _ = writeln!(out, "{:>5}  {:>10}  {:>10}", "order", "I(x,y')", "lambda");
        for r in &self.profile {
            let _ = writeln!(
                out,
                "{:>5}  {:>10.6}  {:>10}",
                r.order,
                r.i_xyprime,
                fmt_lambda(r.lambda)
            );
        }
        out
    }
}

impl CrossoverReport {
    pub fn new(table: CrossoverTable) -> Self {
        Self {
            schema: SCHEMA,
            schema_version: SCHEMA_VERSION,
            kind: "crossover",
            table,
            tool_version: TOOL_VERSION,
        }
    }

    pub fn render_text(&self) -> String {
        let t = &self.table;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "model    y = 3x + a x^{} + noise, n={}, {} seeds, alpha={}",
            t.config.order,
            t.config.n,
            t.config.seeds.len(),
            t.config.alpha
        );
        let _ = writeln!(
            out,
            "{:>8}  {:>10}  {:>10}  {:>8}  {:>5}",
            "a", "lambda", "mean W", "reject", "degen"
        );
        for r in &t.rows {
            let _ = writeln!(
                out,
                "{:>8.4}  {:>10}  {:>10.4}  {:>8.3}  {:>5}",
                r.a,
                fmt_lambda(r.mean_lambda),
                r.mean_statistic,
                r.rejection_fraction,
                r.degenerate
            );
        }
        match &t.crossover {
            Some(c) => {
                let _ = writeln!(
                    out,
                    "crossover a={:.4} lambda={}",
                    c.a,
                    fmt_lambda(c.lambda)
                );
            }
            None => out.push_str("crossover not reached\n"),
        }
        out
    }
}

fn fmt_lambda(l: Option<f64>) -> String {
    l.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
}

fn write_input(out: &mut String, input: &InputSummary, p: &Provenance) {
    let _ = writeln!(
        out,
        "input        {} [{}, {}] rows={} dropped={}",
        input.source, input.columns[0], input.columns[1], input.rows_read, input.rows_dropped
    );
    let _ = writeln!(out, "digest       {}", p.input_digest);
}

fn write_lambda(out: &mut String, r: &LambdaReport) {
    let direction = match r.direction {
        Direction::YOnX => "y on x",
        Direction::Symmetrized => "symmetrized",
    };
    let _ = writeln!(
        out,
        "n={} bins={} order={} direction={direction}",
        r.n, r.bins, r.order
    );
    let _ = writeln!(out, "rho          {:.6}", r.rho);
    let _ = writeln!(out, "I(x,y)       {:.6} nats", r.i_xy);
    let _ = writeln!(out, "I(x,y')      {:.6} nats", r.i_xyprime);
    match r.lambda {
        Some(l) if r.clamped => {
            let _ = writeln!(out, "lambda       {l:.6} (clamped)");
        }
        Some(l) => {
            let _ = writeln!(out, "lambda       {l:.6}");
        }
        None => {
            let _ = writeln!(
                out,
                "lambda       undefined: I(x,y) below {} nats, no dependence detected",
                r.config.degeneracy_threshold
            );
        }
    }
    for w in &r.warnings {
        let _ = writeln!(out, "warning      {w}");
    }
}
