//! `milambda` command line: analyse CSV pairs, profile polynomial orders,
//! sweep the BDS crossover and generate the synthetic datasets.

mod error;
mod input;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use milambda::analysis::{self, CrossoverConfig, ResidualOrder, ResidualTest};
use milambda::datagen::{Family, GenSpec, Generated};
use milambda::info::MillerMadow;
use milambda::lambda::{self, Direction};
use milambda::{BdsConfig, BinRule, LambdaConfig, Radius};

use error::{CliError, Result};
use input::{ColumnSel, LoadedPair};
use report::{CrossoverReport, ProfileReport, Provenance, Report, RunConfig};

const EXIT_ERROR: u8 = 1;
const EXIT_DEGENERATE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "milambda",
    version,
    about = "Share of dependence explained by a fitted model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Λ and the residual BDS test for one pair of columns.
    Analyze(AnalyzeArgs),
    /// Λ for polynomial orders 1 through --max-order.
    Profile(ProfileArgs),
    /// Sweep the nonlinear coefficient until the BDS test rejects.
    Crossover(CrossoverArgs),
    /// Write a synthetic dataset as CSV.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyName {
    BivariateNormal,
    Polynomial,
    Exponential,
    Anscombe,
    BinaryMarkov,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrderArg {
    Regressor,
    Observation,
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// CSV file, or `-` for stdin. Omit when using --family.
    #[arg(conflicts_with = "family")]
    input: Option<PathBuf>,

    /// Two column names or zero-based indices, e.g. `x,y` or `0,2`.
    #[arg(long)]
    columns: Option<String>,

    #[command(flatten)]
    gen: GenArgs,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Generate the input instead of reading a file.
    #[arg(long, value_enum)]
    family: Option<FamilyName>,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Correlation for bivariate_normal.
    #[arg(long)]
    rho: Option<f64>,
    /// Coefficient of the nonlinear term for polynomial.
    #[arg(long)]
    a: Option<f64>,
    /// Power of the nonlinear term for polynomial.
    #[arg(long, default_value_t = 2)]
    power: u32,
    /// Anscombe-style panel, 1 to 4.
    #[arg(long)]
    panel: Option<u8>,
    /// Flip probability for binary_markov.
    #[arg(long)]
    flip_prob: Option<f64>,
}

#[derive(Debug, Args)]
struct LambdaArgs {
    /// Bins per variable; automatic when omitted.
    #[arg(long)]
    bins: Option<usize>,
    /// Polynomial order of the fitted model.
    #[arg(long, default_value_t = 1)]
    order: usize,
    /// Use plug-in entropies without the Miller-Madow term.
    #[arg(long)]
    no_correction: bool,
    /// Miller-Madow term is (m - 1) / (divisor * N).
    #[arg(long, default_value_t = milambda::info::CLASSICAL_MILLER_MADOW_DIVISOR)]
    mm_divisor: f64,
    /// Run both regression directions and keep the smaller Λ.
    #[arg(long)]
    symmetric: bool,
    /// Mutual information (nats) below which Λ is undefined.
    #[arg(long, default_value_t = lambda::DEFAULT_DEGENERACY_THRESHOLD)]
    threshold: f64,
}

#[derive(Debug, Args)]
struct BdsArgs {
    /// Embedding dimension.
    #[arg(long, default_value_t = 2)]
    bds_m: usize,
    /// Distance threshold as a multiple of the residual standard deviation.
    #[arg(long, default_value_t = 0.5, conflicts_with = "bds_eta_absolute")]
    bds_eta: f64,
    /// Distance threshold in data units.
    #[arg(long)]
    bds_eta_absolute: Option<f64>,
    /// Order residuals by x, or keep them in input order.
    #[arg(long, value_enum, default_value_t = OrderArg::Regressor)]
    bds_residual_order: OrderArg,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    lambda: LambdaArgs,
    #[command(flatten)]
    bds: BdsArgs,
    /// Skip the residual BDS test.
    #[arg(long)]
    no_bds: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct ProfileArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    lambda: LambdaArgs,
    #[arg(long, default_value_t = 4)]
    max_order: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct CrossoverArgs {
    /// Power of the nonlinear term, 2 or 3.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..=3))]
    power: u32,
    #[arg(long, default_value_t = 0.0)]
    a_start: f64,
    #[arg(long, default_value_t = 0.01)]
    a_step: f64,
    #[arg(long, default_value_t = 50)]
    steps: usize,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10")]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Stop at the first grid point where most seeds reject.
    #[arg(long)]
    stop_at_crossover: bool,
    #[command(flatten)]
    lambda: LambdaArgs,
    #[command(flatten)]
    bds: BdsArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    gen: GenArgs,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl GenArgs {
    fn spec(&self) -> Result<Option<GenSpec>> {
        let Some(name) = self.family else {
            return Ok(None);
        };
        fn need<T: Copy>(v: Option<T>, flag: &str, family: &str) -> Result<T> {
            v.ok_or_else(|| CliError::Usage(format!("--family {family} requires --{flag}")))
        }
        let family = match name {
            FamilyName::BivariateNormal => Family::BivariateNormal {
                rho: need(self.rho, "rho", "bivariate-normal")?,
            },
            FamilyName::Polynomial => Family::Polynomial {
                a: need(self.a, "a", "polynomial")?,
                order: self.power,
            },
            FamilyName::Exponential => Family::Exponential,
            FamilyName::Anscombe => Family::Anscombe {
                panel: need(self.panel, "panel", "anscombe")?,
            },
            FamilyName::BinaryMarkov => Family::BinaryMarkov {
                flip_prob: need(self.flip_prob, "flip-prob", "binary-markov")?,
            },
        };
        Ok(Some(GenSpec::new(family, self.n, self.seed)))
    }
}

impl LambdaArgs {
    fn config(&self) -> Result<LambdaConfig> {
        let cfg = LambdaConfig {
            bins: self.bins.map_or(BinRule::Auto, BinRule::Fixed),
            model_order: self.order,
            correction: (!self.no_correction).then_some(MillerMadow {
                divisor: self.mm_divisor,
            }),
            degeneracy_threshold: self.threshold,
            direction: if self.symmetric {
                Direction::Symmetrized
            } else {
                Direction::YOnX
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl BdsArgs {
    fn test(&self) -> Result<ResidualTest> {
        let bds = BdsConfig {
            embedding: self.bds_m,
            radius: match self.bds_eta_absolute {
                Some(e) => Radius::Absolute(e),
                None => Radius::StdMultiple(self.bds_eta),
            },
        };
        bds.validate()?;
        Ok(ResidualTest {
            bds,
            order: match self.bds_residual_order {
                OrderArg::Regressor => ResidualOrder::Regressor,
                OrderArg::Observation => ResidualOrder::Observation,
            },
        })
    }
}

/// CSV text of a generated dataset; shortest round-trip float formatting.
fn render_generated(data: &Generated) -> String {
    let mut out = String::new();
    match data {
        Generated::Paired(p) => {
            out.push_str("x,y\n");
            for (x, y) in p.x().iter().zip(p.y().iter()) {
                out.push_str(&format!("{x},{y}\n"));
            }
        }
        Generated::Binary(s) => {
            out.push_str("s\n");
            for b in s {
                out.push_str(&format!("{b}\n"));
            }
        }
    }
    out
}

struct Loaded {
    pair: LoadedPair,
    generator: Option<GenSpec>,
}

fn load(source: &SourceArgs) -> Result<Loaded> {
    let columns = source
        .columns
        .as_deref()
        .map(input::parse_columns)
        .transpose()?;
    if let Some(spec) = source.gen.spec()? {
        let data = spec.generate()?;
        if matches!(data, Generated::Binary(_)) {
            return Err(CliError::Usage(
                "binary sequences have one column and cannot be analysed as a pair".into(),
            ));
        }
        let text = render_generated(&data);
        let default = [ColumnSel::Index(0), ColumnSel::Index(1)];
        let pair = input::parse_pair(
            text.as_bytes(),
            "<generated>",
            Some(columns.as_ref().unwrap_or(&default)),
        )?;
        return Ok(Loaded {
            pair,
            generator: Some(spec),
        });
    }
    let path = source
        .input
        .as_ref()
        .ok_or_else(|| CliError::Usage("give an input file, `-` for stdin, or --family".into()))?;
    Ok(Loaded {
        pair: input::load_pair(path, columns.as_ref())?,
        generator: None,
    })
}

fn provenance(loaded: &Loaded, config: RunConfig) -> Provenance {
    Provenance {
        input_digest: loaded.pair.digest.clone(),
        tool: "milambda",
        tool_version: report::TOOL_VERSION,
        seed: loaded.generator.map(|g| g.seed),
        generator: loaded.generator,
        config,
    }
}

fn emit<T: serde::Serialize>(
    format: Format,
    value: &T,
    text: impl FnOnce() -> String,
) -> Result<()> {
    let body = match format {
        Format::Json => serde_json::to_string_pretty(value)? + "\n",
        Format::Text => text(),
    };
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(body.as_bytes())
        .map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<u8> {
    let lambda_cfg = args.lambda.config()?;
    let test = (!args.no_bds).then(|| args.bds.test()).transpose()?;
    let loaded = load(&args.source)?;
    let result = analysis::analyze(&loaded.pair.sample, &lambda_cfg, test.as_ref())?;
    let degenerate = result.lambda.degenerate;
    let prov = provenance(
        &loaded,
        RunConfig {
            lambda: lambda_cfg,
            residual_test: test,
        },
    );
    let report = Report::new(loaded.pair.summary, result.lambda, result.bds, prov);
    emit(args.format, &report, || report.render_text())?;
    Ok(if degenerate { EXIT_DEGENERATE } else { 0 })
}

fn cmd_profile(args: &ProfileArgs) -> Result<u8> {
    let lambda_cfg = args.lambda.config()?;
    let loaded = load(&args.source)?;
    let profile = lambda::lambda_profile(&loaded.pair.sample, &lambda_cfg, args.max_order)?;
    let degenerate = profile.iter().any(|r| r.degenerate);
    let prov = provenance(
        &loaded,
        RunConfig {
            lambda: lambda_cfg,
            residual_test: None,
        },
    );
    let report = ProfileReport::new(loaded.pair.summary, profile, prov);
    emit(args.format, &report, || report.render_text())?;
    Ok(if degenerate { EXIT_DEGENERATE } else { 0 })
}

fn cmd_crossover(args: &CrossoverArgs) -> Result<u8> {
    let mut cfg = CrossoverConfig::new(args.power, args.a_step, args.steps, args.seeds.clone());
    cfg.a_start = args.a_start;
    cfg.n = args.n;
    cfg.alpha = args.alpha;
    cfg.stop_at_crossover = args.stop_at_crossover;
    cfg.lambda = args.lambda.config()?;
    cfg.test = args.bds.test()?;
    let table = analysis::crossover_sweep(&cfg)?;
    let report = CrossoverReport::new(table);
    emit(args.format, &report, || report.render_text())?;
    Ok(0)
}

fn cmd_generate(args: &GenerateArgs) -> Result<u8> {
    let spec = args
        .gen
        .spec()?
        .ok_or_else(|| CliError::Usage("generate requires --family".into()))?;
    let text = render_generated(&spec.generate()?);
    match &args.output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })?,
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Profile(a) => cmd_profile(a),
        Command::Crossover(a) => cmd_crossover(a),
        Command::Generate(a) => cmd_generate(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
