use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use stuperm_core::harness::{self, Preset, TABLE_SAMPLE_SIZES};
use stuperm_core::{
    read_paired_csv, run_grid, run_method, Alternative, ColumnSelector, Error, GridConfig, Method, MissingPolicy,
    PValueConvention, PairedSample, ScenarioSpec, TestConfig, TestResult,
};

const EXIT_INVALID: u8 = 2;
const EXIT_DATA: u8 = 3;

#[derive(Parser)]
#[command(
    name = "stuperm",
    version,
    about = "Tests of zero Spearman correlation and Type I error simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test H0: rho_s = 0 on two columns of a CSV file.
    Test(TestArgs),
    /// Estimate Type I error rates over a scenario x n x method grid.
    Simulate(SimulateArgs),
    /// Turn a simulation CSV into plot series (json) or a wide table (csv).
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    T,
    FisherZ,
    FisherYates,
    AsympNorm,
    Permute,
    StuPermute,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::T => Method::TTest,
            MethodArg::FisherZ => Method::FisherZ,
            MethodArg::FisherYates => Method::FisherYates,
            MethodArg::AsympNorm => Method::AsympNorm,
            MethodArg::Permute => Method::NaivePermute,
            MethodArg::StuPermute => Method::StuPermute,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AltArg {
    Greater,
    Less,
    TwoSided,
}

impl From<AltArg> for Alternative {
    fn from(a: AltArg) -> Self {
        match a {
            AltArg::Greater => Alternative::Greater,
            AltArg::Less => Alternative::Less,
            AltArg::TwoSided => Alternative::TwoSided,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Paper,
    Desk,
}

#[derive(Clone, Copy, ValueEnum)]
enum MissingArg {
    Drop,
    Error,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct TestArgs {
    /// Input CSV with a header row.
    file: PathBuf,
    /// x column: header name, or 1-based column number.
    #[arg(long)]
    x: String,
    /// y column: header name, or 1-based column number.
    #[arg(long)]
    y: String,
    /// Test to run; repeat for several. Defaults to all six.
    #[arg(long, value_enum)]
    method: Vec<MethodArg>,
    #[arg(long, value_enum, default_value = "greater")]
    alt: AltArg,
    /// Level used for the reported reject decision (reject when p < alpha).
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Number of random permutations.
    #[arg(long, default_value_t = 10_000)]
    b: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "drop")]
    missing: MissingArg,
    /// Natural log of x before testing.
    #[arg(long)]
    log_x: bool,
    /// Natural log of y before testing (applied before --negate-y).
    #[arg(long)]
    log_y: bool,
    /// Multiply y by -1 before testing.
    #[arg(long)]
    negate_y: bool,
    /// Permutation p-value (count + 1) / (B + 1) instead of count / B.
    #[arg(long)]
    add_one_correction: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Replication budget: paper (10000 reps, B = 1000) or desk (2000 reps, B = 500).
    #[arg(long, value_enum, default_value = "paper")]
    preset: PresetArg,
    /// Scenario id; repeat for several. Defaults to the ten table scenarios.
    #[arg(long)]
    scenario: Vec<String>,
    /// Sample size; repeat for several. Defaults to 10, 20, 50, 100, 200.
    #[arg(long)]
    n: Vec<usize>,
    /// Test; repeat for several. Defaults to all six.
    #[arg(long, value_enum)]
    method: Vec<MethodArg>,
    #[arg(long, value_enum, default_value = "greater")]
    alt: AltArg,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Overrides the preset's replicate count.
    #[arg(long)]
    reps: Option<u32>,
    /// Overrides the preset's permutation count.
    #[arg(long)]
    b: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    add_one_correction: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// CSV written by `simulate`.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Invalid(String),
    Data(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_data_error() {
            CliError::Data(e.to_string())
        } else {
            CliError::Invalid(e.to_string())
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[derive(Serialize)]
struct Reported {
    #[serde(flatten)]
    result: TestResult,
    alpha: f64,
    reject: bool,
}

fn transform(sample: PairedSample, args: &TestArgs) -> Result<PairedSample, CliError> {
    let positive = |v: &[f64], col: &str| {
        if v.iter().any(|&x| x <= 0.0) {
            Err(CliError::Data(format!("--log-{col} needs strictly positive values")))
        } else {
            Ok(())
        }
    };
    let mut s = sample;
    if args.log_x {
        positive(s.xs(), "x")?;
        s = s.map_x(f64::ln)?;
    }
    if args.log_y {
        positive(s.ys(), "y")?;
        s = s.map_y(f64::ln)?;
    }
    if args.negate_y {
        s = s.map_y(|y| -y)?;
    }
    Ok(s)
}

fn cmd_test(args: TestArgs) -> Result<(), CliError> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::Invalid(format!(
            "alpha must lie in (0, 1), got {}",
            args.alpha
        )));
    }
    let policy = match args.missing {
        MissingArg::Drop => MissingPolicy::DropPairwise,
        MissingArg::Error => MissingPolicy::Error,
    };
    let selector = ColumnSelector::by_name(&args.x, &args.y);
    let sample = transform(read_paired_csv(&args.file, &selector, policy)?, &args)?;

    let methods: Vec<Method> = if args.method.is_empty() {
        Method::ALL.to_vec()
    } else {
        args.method.iter().map(|&m| m.into()).collect()
    };
    let config = TestConfig {
        permutations: args.b,
        seed: args.seed,
        convention: if args.add_one_correction {
            PValueConvention::AddOne
        } else {
            PValueConvention::Plain
        },
    };
    let alt: Alternative = args.alt.into();
    let mut results = Vec::with_capacity(methods.len());
    for m in methods {
        let result = run_method(m, &sample, alt, &config)?;
        results.push(Reported {
            reject: result.p_value < args.alpha,
            alpha: args.alpha,
            result,
        });
    }

    let mut out = open_out(args.out.as_deref())?;
    match args.format {
        Format::Json => {
            if results.len() == 1 {
                serde_json::to_writer_pretty(&mut out, &results[0]).map_err(Error::from)?;
            } else {
                serde_json::to_writer_pretty(&mut out, &results).map_err(Error::from)?;
            }
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(
                out,
                "method,estimate,statistic,p_value,n,alternative,B,seed,alpha,reject"
            )?;
            for r in &results {
                let t = &r.result;
                let opt = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    t.method.id(),
                    t.estimate,
                    t.statistic,
                    t.p_value,
                    t.n,
                    t.alternative,
                    opt(t.permutations),
                    opt(t.seed),
                    r.alpha,
                    r.reject
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let preset = match args.preset {
        PresetArg::Paper => Preset::Paper,
        PresetArg::Desk => Preset::Desk,
    };
    let scenarios = if args.scenario.is_empty() {
        ScenarioSpec::canonical()
    } else {
        args.scenario
            .iter()
            .map(|s| s.parse::<ScenarioSpec>())
            .collect::<Result<_, _>>()?
    };
    let config = GridConfig {
        scenarios,
        sample_sizes: if args.n.is_empty() {
            TABLE_SAMPLE_SIZES.to_vec()
        } else {
            args.n.clone()
        },
        methods: if args.method.is_empty() {
            Method::ALL.to_vec()
        } else {
            args.method.iter().map(|&m| m.into()).collect()
        },
        alpha: args.alpha,
        reps: args.reps.unwrap_or(preset.reps()),
        permutations: args.b.unwrap_or(preset.permutations()),
        master_seed: args.seed,
        alternative: args.alt.into(),
        convention: if args.add_one_correction {
            PValueConvention::AddOne
        } else {
            PValueConvention::Plain
        },
        workers: args.workers,
    };
    let summaries = run_grid(&config)?;
    let mut out = open_out(args.out.as_deref())?;
    match args.format {
        Format::Csv => harness::write_csv(&summaries, &mut out)?,
        Format::Json => harness::write_json(&summaries, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), CliError> {
    let summaries = harness::read_csv(File::open(&args.input)?)?;
    let mut out = open_out(args.out.as_deref())?;
    match args.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &harness::plot_panels(&summaries)).map_err(Error::from)?;
            writeln!(out)?;
        }
        Format::Csv => harness::write_wide_table(&summaries, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Test(a) => cmd_test(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DATA)
        }
    }
}
