//! `symtest` — symmetry tests for univariate samples.
//!
//! Subcommands: `test` (run one test on a data file or embedded fixture),
//! `simulate` (Monte Carlo size/power grids), `characterize` (population
//! entropy integrals), `critical` (bootstrap or null-simulated critical
//! regions).
//!
//! Exit codes: 0 completed (either decision), 2 usage error, 3 data error,
//! 4 numeric or convex-hull failure. `SYMTEST_SEED` supplies the default
//! master seed; `--seed` overrides it.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use symtest_cli::fixture;
use symtest_cli::format::fmt_sig;
use symtest_cli::input::read_data;
use symtest_core::characterization::characterize;
use symtest_core::competitors::{cm_statistic, competitor_test, mgg_statistic, sgn_statistic};
use symtest_core::distributions::{parse_spec, DistributionSpec, RandomStream};
use symtest_core::estimator::SortedSample;
use symtest_core::jel::{ajel_test, jel_test, Method, TestOutcome};
use symtest_core::scr_bootstrap::{
    bootstrap_critical_region, null_critical_region, null_statistic_region, scr_test,
    CriticalRegion,
};
use symtest_core::simulation::{emit_table, run_study, HullPolicy, SimulationConfig, TableFormat};

#[derive(Parser)]
#[command(name = "symtest", version, about = "Tests for distributional symmetry")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one symmetry test on a data file or embedded fixture
    Test(TestArgs),
    /// Monte Carlo size/power study over a family × n × method grid
    Simulate(SimulateArgs),
    /// Population entropy integrals and departure measure of a family
    Characterize(CharacterizeArgs),
    /// Critical region from a data bootstrap or a simulated null
    Critical(CriticalArgs),
}

#[derive(clap::Args)]
struct TestArgs {
    /// Data file (plain: one value per line; CSV with --column)
    #[arg(long, conflicts_with = "fixture")]
    input: Option<PathBuf>,
    /// Embedded dataset name (repair-times)
    #[arg(long)]
    fixture: Option<String>,
    /// jel | ajel | scr | sgn | cm | mgg
    #[arg(long, value_parser = parse_method)]
    method: Method,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Resamples (scr) or null replicates (sgn/cm/mgg)
    #[arg(long, default_value_t = 1000)]
    bootstrap_reps: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Machine-readable output
    #[arg(long)]
    json: bool,
    /// 1-based CSV column holding the observations
    #[arg(long)]
    column: Option<usize>,
    /// Calibration family for sgn/cm/mgg
    #[arg(long, default_value = "normal(0,1)")]
    calibration: String,
}

#[derive(clap::Args)]
struct SimulateArgs {
    /// Family spec, repeatable: e.g. 'normal(0,1)', 'fs(normal,1)'
    #[arg(long = "family", required = true)]
    families: Vec<String>,
    /// Comma-separated sample sizes, e.g. 25,50,100,200
    #[arg(long)]
    n: String,
    /// Comma-separated methods, e.g. jel,ajel,scr
    #[arg(long)]
    methods: String,
    #[arg(long, default_value_t = 10_000)]
    reps: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the table here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv | markdown | json
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: TableFormat,
    /// Symmetric family behind SCR and competitor critical values
    #[arg(long, default_value = "normal(0,1)")]
    calibration: String,
    /// reject | skip: how JEL hull violations enter the tally
    #[arg(long, default_value = "reject", value_parser = parse_hull_policy)]
    hull_policy: HullPolicy,
    /// Null replicates behind each simulated critical region
    #[arg(long, default_value_t = 10_000)]
    scr_reps: usize,
}

#[derive(clap::Args)]
struct CharacterizeArgs {
    /// Family spec, e.g. 'exp(1)'
    #[arg(long)]
    dist: String,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Also compute the Var(K) diagnostic
    #[arg(long)]
    with_variance: bool,
}

#[derive(clap::Args)]
struct CriticalArgs {
    /// Data file: with-replacement bootstrap of the observations
    #[arg(long, conflicts_with = "null")]
    input: Option<PathBuf>,
    /// Symmetric family spec: simulate the null instead
    #[arg(long)]
    null: Option<String>,
    /// Sample size for --null
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    b: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// 1-based CSV column holding the observations
    #[arg(long)]
    column: Option<usize>,
}

enum CliError {
    Usage(String),
    Data(String),
    Compute(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Compute(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Compute(m) => m,
        }
    }
}

impl From<symtest_core::Error> for CliError {
    fn from(e: symtest_core::Error) -> Self {
        use symtest_core::Error::*;
        match e {
            Parse(_) | Domain(_) | InvalidParameter { .. } => CliError::Usage(e.to_string()),
            SampleSize { .. } => CliError::Data(e.to_string()),
            HullViolation { .. } | Numeric(_) | DegenerateSample(_) => {
                CliError::Compute(e.to_string())
            }
        }
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: symtest_core::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<TableFormat, String> {
    match s {
        "csv" => Ok(TableFormat::Csv),
        "markdown" => Ok(TableFormat::Markdown),
        "json" => Ok(TableFormat::Json),
        other => Err(format!(
            "unknown format '{other}' (expected csv, markdown or json)"
        )),
    }
}

fn parse_hull_policy(s: &str) -> Result<HullPolicy, String> {
    match s {
        "reject" => Ok(HullPolicy::RejectOnHullViolation),
        "skip" => Ok(HullPolicy::SkipOnHullViolation),
        other => Err(format!(
            "unknown hull policy '{other}' (expected reject or skip)"
        )),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("SYMTEST_SEED") {
        Ok(text) => text.parse().map_err(|_| {
            CliError::Usage(format!(
                "SYMTEST_SEED must be an unsigned 64-bit decimal, got '{text}'"
            ))
        }),
        Err(_) => Ok(0),
    }
}

fn parse_family(text: &str) -> Result<DistributionSpec, CliError> {
    let spec =
        parse_spec(text).map_err(|e| CliError::Usage(format!("in family spec '{text}': {e}")))?;
    spec.validate()?;
    Ok(spec)
}

fn load_values(
    input: &Option<PathBuf>,
    fixture_name: &Option<String>,
    column: Option<usize>,
) -> Result<Vec<f64>, CliError> {
    match (input, fixture_name) {
        (Some(path), None) => Ok(read_data(path, column).map_err(CliError::Data)?.values),
        (None, Some(name)) => fixture::by_name(name)
            .map(|v| v.to_vec())
            .ok_or_else(|| CliError::Usage(format!("unknown fixture '{name}'"))),
        _ => Err(CliError::Usage(
            "exactly one of --input or --fixture is required".into(),
        )),
    }
}

#[derive(serde::Serialize)]
struct JsonOutcome {
    method: &'static str,
    n: usize,
    statistic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c2: Option<f64>,
    alpha: f64,
    reject: bool,
    seed: u64,
}

fn print_outcome(outcome: &TestOutcome, seed: u64, json: bool) {
    if json {
        let payload = JsonOutcome {
            method: outcome.method.as_str(),
            n: outcome.n,
            statistic: outcome.statistic,
            p_value: outcome.p_value,
            c1: outcome.critical_lower,
            c2: outcome.critical_upper,
            alpha: outcome.alpha,
            reject: outcome.reject,
            seed,
        };
        println!(
            "{}",
            serde_json::to_string(&payload).expect("outcome serializes")
        );
        return;
    }
    println!("method     {}", outcome.method);
    println!("n          {}", outcome.n);
    println!("statistic  {}", fmt_sig(outcome.statistic, 6));
    if let Some(p) = outcome.p_value {
        println!("p-value    {}", fmt_sig(p, 6));
    }
    if let (Some(c1), Some(c2)) = (outcome.critical_lower, outcome.critical_upper) {
        println!("c1         {}", fmt_sig(c1, 6));
        println!("c2         {}", fmt_sig(c2, 6));
    } else if let Some(c2) = outcome.critical_upper {
        println!("critical   {}", fmt_sig(c2, 6));
    }
    println!(
        "decision   {}",
        if outcome.reject {
            "Reject H0"
        } else {
            "Accept H0"
        }
    );
    println!("alpha      {}", outcome.alpha);
    println!("seed       {seed}");
}

fn cmd_test(args: TestArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed)?;
    let values = load_values(&args.input, &args.fixture, args.column)?;
    let need = match args.method {
        Method::Jel | Method::Ajel => 4,
        _ => 3,
    };
    if values.len() < need {
        return Err(CliError::Data(format!(
            "need at least {need} observations for {}, got {}",
            args.method,
            values.len()
        )));
    }
    let sample = SortedSample::new(values)?;
    let outcome = match args.method {
        Method::Jel => jel_test(&sample, args.alpha)?,
        Method::Ajel => ajel_test(&sample, args.alpha)?,
        Method::Scr => scr_test(
            &sample,
            args.bootstrap_reps,
            args.alpha,
            &RandomStream::new(seed, 0),
        )?,
        method => {
            let calibration = parse_family(&args.calibration)?;
            let statistic = match method {
                Method::Sgn => sgn_statistic,
                Method::Cm => cm_statistic,
                _ => mgg_statistic,
            };
            let region = null_statistic_region(
                &statistic,
                &calibration,
                sample.n(),
                args.bootstrap_reps,
                args.alpha,
                &RandomStream::new(seed, 1),
            )?;
            competitor_test(method, &sample, args.alpha, &region)?
        }
    };
    if outcome.hull_violation {
        return Err(CliError::Compute(
            "convex hull violation: no JEL multiplier exists for this sample \
             (all pseudo-values on one side of zero); try --method ajel"
                .into(),
        ));
    }
    print_outcome(&outcome, seed, args.json);
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed)?;
    let families = args
        .families
        .iter()
        .map(|text| parse_family(text))
        .collect::<Result<Vec<_>, _>>()?;
    let sample_sizes = args
        .n
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("invalid sample size '{tok}'")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let methods = args
        .methods
        .split(',')
        .map(|tok| parse_method(tok.trim()).map_err(CliError::Usage))
        .collect::<Result<Vec<_>, _>>()?;

    let config = SimulationConfig {
        families,
        sample_sizes,
        methods,
        reps: args.reps,
        alpha: args.alpha,
        master_seed: seed,
        scr_b: args.scr_reps,
        calibration_null: parse_family(&args.calibration)?,
        hull_policy: args.hull_policy,
    };
    config.validate()?;

    let cells = config.families.len() * config.sample_sizes.len() * config.methods.len();
    eprintln!(
        "symtest simulate: {cells} cells, {} replications each, seed {seed}",
        config.reps
    );
    let table = run_study(&config)?;
    for failure in &table.failures {
        eprintln!("cell failed: {failure}");
    }
    eprintln!("completed {} rows", table.rows.len());

    let text = emit_table(&table, args.format);
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_characterize(args: CharacterizeArgs) -> Result<(), CliError> {
    let spec = parse_family(&args.dist)?;
    let report = characterize(&spec, args.tol, args.with_variance)?;
    println!("distribution  {spec}");
    println!("gcre          {}", fmt_sig(report.gcre, 6));
    println!("gce           {}", fmt_sig(report.gce, 6));
    println!("delta         {}", fmt_sig(report.delta, 6));
    if let Some(v) = report.asymptotic_variance {
        println!("var-k         {}", fmt_sig(v, 6));
    }
    println!(
        "symmetric     {}",
        if report.symmetric_at_tolerance() {
            "yes"
        } else {
            "no"
        }
    );
    Ok(())
}

fn print_region(region: &CriticalRegion, seed: u64) {
    println!("c1      {}", fmt_sig(region.c1, 6));
    println!("c2      {}", fmt_sig(region.c2, 6));
    println!("source  {}", region.source.as_str());
    println!("B       {}", region.replicates);
    println!("alpha   {}", region.alpha);
    println!("seed    {seed}");
}

fn cmd_critical(args: CriticalArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed)?;
    let region = match (&args.input, &args.null) {
        (Some(path), None) => {
            let data = read_data(path, args.column).map_err(CliError::Data)?;
            if data.values.len() < 3 {
                return Err(CliError::Data(format!(
                    "need at least 3 observations, got {}",
                    data.values.len()
                )));
            }
            let sample = SortedSample::new(data.values)?;
            bootstrap_critical_region(&sample, args.b, args.alpha, &RandomStream::new(seed, 0))?
        }
        (None, Some(null_text)) => {
            let spec = parse_family(null_text)?;
            let n = args
                .n
                .ok_or_else(|| CliError::Usage("--n is required together with --null".into()))?;
            null_critical_region(&spec, n, args.b, args.alpha, &RandomStream::new(seed, 0))?
        }
        _ => {
            return Err(CliError::Usage(
                "exactly one of --input or --null is required".into(),
            ))
        }
    };
    print_region(&region, seed);
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Test(args) => cmd_test(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Characterize(args) => cmd_characterize(args),
        Command::Critical(args) => cmd_critical(args),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message());
        std::process::exit(e.code());
    }
}
