//! `fasc` — synthetic generation, clustering, simulation sweeps and
//! diagnostics from the command line.
//!
//! Exit codes: 0 success, 2 validation/config error, 3 numerical error,
//! 4 I/O or ingestion error. Every command takes a seed and echoes it
//! into its output, so runs are reproducible.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fasc::analysis::{
    assumption_report, mislabeling, scree, snr_report, spectral_conditions, AssumptionOptions,
};
use fasc::clustering::{MethodParams, MethodSpec, SplitMode};
use fasc::dataset::{
    generate, generate_scenario, load_csv, load_csv_with_delimiter, write_csv, CleaningRule,
    Dataset, FactorMixtureSpec, ScenarioKind,
};
use fasc::harness::{
    emit_csv, emit_plotdata, run_oracle_curve, run_realdata, run_scenario, RunOptions, ScenarioDoc,
};
use fasc::Error;

#[derive(Parser)]
#[command(
    name = "fasc",
    version,
    about = "Factor-adjusted spectral clustering toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic mixture dataset as CSV.
    Generate(GenerateArgs),
    /// Cluster a CSV file and write the labels.
    Cluster(ClusterArgs),
    /// Run a synthetic scenario sweep and write experiment records.
    Simulate(SimulateArgs),
    /// Closed-form versus empirical optimal rate for a two-cluster scenario.
    Oracle(OracleArgs),
    /// Run a real-data plan: ingest, clean, cluster, tabulate.
    Realdata(RealdataArgs),
    /// Eigenvalues of the centered covariance, descending.
    Scree(ScreeArgs),
    /// Assumption diagnostics and spectral conditions for a model spec.
    Diagnose(DiagnoseArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Model spec TOML (alternative to --scenario).
    #[arg(long, conflicts_with = "scenario")]
    spec: Option<PathBuf>,
    /// Named recipe: `strong` or `weak`.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, short = 'n')]
    n: usize,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long = "K")]
    clusters: Option<usize>,
    #[arg(long = "r")]
    factor_rank: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the realized model spec here (for `diagnose`).
    #[arg(long)]
    emit_spec: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    input: PathBuf,
    /// Column holding ground-truth labels, if any.
    #[arg(long)]
    label_column: Option<String>,
    /// Explicit delimiter when not comma/semicolon.
    #[arg(long)]
    delimiter: Option<char>,
    /// Columns to drop before parsing.
    #[arg(long, value_delimiter = ',')]
    drop_columns: Vec<String>,
    /// Drop rows with missing cells instead of failing.
    #[arg(long)]
    drop_missing: bool,
    /// Subtract column means after ingestion.
    #[arg(long)]
    centralize: bool,
    /// kmeans_raw | spectral | crossfit | fasc (with --r) | fasc(r=N).
    #[arg(long)]
    method: String,
    #[arg(long = "K")]
    clusters: usize,
    /// Embedding dimension; defaults to K capped by the data dimension.
    #[arg(long = "k")]
    embed_dim: Option<usize>,
    /// Factor rank for `fasc`.
    #[arg(long = "r")]
    factor_rank: Option<usize>,
    #[arg(long, value_parser = parse_split, default_value = "full_sample")]
    split: SplitMode,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario TOML file (kind = "synthetic").
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also write per-(method, sigma) aggregates.
    #[arg(long)]
    plotdata: Option<PathBuf>,
    /// Worker threads for the replicate pool.
    #[arg(long)]
    jobs: Option<usize>,
    /// Record wall-clock times (makes reruns non-byte-identical).
    #[arg(long)]
    timing: bool,
    /// Override the scenario's base seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RealdataArgs {
    /// Plan TOML file (kind = "realdata").
    #[arg(long)]
    scenario: PathBuf,
    /// Override the CSV path named in the plan.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Also write the scree spectrum.
    #[arg(long)]
    scree: Option<PathBuf>,
}

#[derive(Args)]
struct ScreeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    label_column: Option<String>,
    #[arg(long)]
    delimiter: Option<char>,
    #[arg(long, value_delimiter = ',')]
    drop_columns: Vec<String>,
    #[arg(long)]
    drop_missing: bool,
    #[arg(long)]
    centralize: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// Model spec TOML.
    #[arg(long)]
    spec: PathBuf,
    /// Declared rank of the centroid second moment.
    #[arg(long = "k")]
    centroid_rank: usize,
    /// Sample size used for the log n terms and the label draw.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Constant cap in the perpendicularity check.
    #[arg(long, default_value_t = 0.2)]
    perp_constant: f64,
}

fn parse_split(s: &str) -> Result<SplitMode, String> {
    match s {
        "half_split" => Ok(SplitMode::HalfSplit),
        "full_sample" => Ok(SplitMode::FullSample),
        other => Err(format!(
            "unknown split mode `{other}` (expected half_split or full_sample)"
        )),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Cluster(args) => cmd_cluster(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Realdata(args) => cmd_realdata(args),
        Command::Scree(args) => cmd_scree(args),
        Command::Diagnose(args) => cmd_diagnose(args),
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Error> {
    let (data, spec) = if let Some(spec_path) = &args.spec {
        let spec = FactorMixtureSpec::load_toml(spec_path)?;
        let data = generate(&spec, args.n, args.seed)?;
        (data, spec)
    } else {
        let name = args
            .scenario
            .as_deref()
            .ok_or_else(|| Error::validation("pass either --spec or --scenario"))?;
        let kind = ScenarioKind::parse(name)?;
        let sigma = args
            .sigma
            .ok_or_else(|| Error::validation("--scenario needs --sigma"))?;
        let d = args
            .d
            .ok_or_else(|| Error::validation("--scenario needs --d"))?;
        let clusters = args
            .clusters
            .ok_or_else(|| Error::validation("--scenario needs --K"))?;
        let factor_rank = args
            .factor_rank
            .ok_or_else(|| Error::validation("--scenario needs --r"))?;
        generate_scenario(kind, sigma, (args.n, d, clusters, factor_rank), args.seed)?
    };
    write_csv(&data, &args.out)?;
    if let Some(path) = &args.emit_spec {
        std::fs::write(path, spec.to_toml_string()?)?;
    }
    let report = snr_report(&spec)?;
    eprintln!(
        "generate n={} d={} K={} r={} seed={} snr_bar={} s_quantity={}",
        data.n(),
        data.dim(),
        spec.clusters(),
        spec.factor_rank(),
        args.seed,
        report.snr_bar,
        report.s_quantity
    );
    Ok(())
}

fn load_input(
    path: &Path,
    label_column: Option<&str>,
    delimiter: Option<char>,
    rules: &CleaningRule,
) -> Result<(Dataset, fasc::dataset::CleaningReport), Error> {
    match delimiter {
        Some(c) => load_csv_with_delimiter(path, label_column, rules, c as u8),
        None => load_csv(path, label_column, rules),
    }
}

fn cmd_cluster(args: ClusterArgs) -> Result<(), Error> {
    let rules = CleaningRule {
        drop_columns: args.drop_columns.clone(),
        drop_rows_with_missing: args.drop_missing,
        centralize: args.centralize,
    };
    let (data, report) = load_input(
        &args.input,
        args.label_column.as_deref(),
        args.delimiter,
        &rules,
    )?;
    eprintln!("{report}");

    let method = parse_method(&args.method, args.factor_rank)?;
    let mut params = MethodParams::new(args.clusters, args.seed);
    params.embed_dim = args.embed_dim;
    params.split = args.split;
    params.kmeans_restarts = args.restarts;
    let algorithm = method.build(&params);
    let result = algorithm.cluster(&data)?;
    eprintln!(
        "cluster method={} split={} seed={} objective={}",
        algorithm.name(),
        args.split,
        args.seed,
        result.objective
    );
    if let Some(truth) = data.labels() {
        let classes = truth.iter().copied().max().unwrap_or(0) + 1;
        let rate = mislabeling(&result.labels, truth, classes.max(args.clusters))?;
        eprintln!("mislabeling={rate}");
    }

    let mut out = std::io::BufWriter::new(std::fs::File::create(&args.out)?);
    writeln!(
        out,
        "# method={} split={} seed={}",
        algorithm.name(),
        args.split,
        args.seed
    )?;
    writeln!(out, "row,label")?;
    for (i, &label) in result.labels.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, label + 1)?;
    }
    Ok(())
}

fn parse_method(name: &str, factor_rank: Option<usize>) -> Result<MethodSpec, Error> {
    if name == "fasc" {
        let r = factor_rank
            .ok_or_else(|| Error::validation("--method fasc needs --r <factor rank>"))?;
        return Ok(MethodSpec::Fasc { factor_rank: r });
    }
    MethodSpec::parse(name)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Error> {
    let doc = ScenarioDoc::load(&args.scenario)?;
    let mut sc = match doc {
        ScenarioDoc::Synthetic(sc) => sc,
        ScenarioDoc::RealData(_) => {
            return Err(Error::validation(
                "this is a realdata plan; use `fasc realdata`",
            ))
        }
    };
    if let Some(seed) = args.seed {
        sc.base_seed = seed;
    }
    let opts = RunOptions {
        jobs: args.jobs,
        timing: args.timing,
    };
    let records = run_scenario(&sc, &opts)?;
    emit_csv(&records, &args.out)?;
    if let Some(path) = &args.plotdata {
        emit_plotdata(&records, path)?;
    }
    eprintln!(
        "simulate scenario={} records={} base_seed={}",
        sc.name,
        records.len(),
        sc.base_seed
    );
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<(), Error> {
    let doc = ScenarioDoc::load(&args.scenario)?;
    let sc = match doc {
        ScenarioDoc::Synthetic(sc) => sc,
        ScenarioDoc::RealData(_) => {
            return Err(Error::validation(
                "the oracle curve needs a synthetic scenario",
            ))
        }
    };
    let points = run_oracle_curve(&sc)?;
    let mut out = std::io::BufWriter::new(std::fs::File::create(&args.out)?);
    writeln!(out, "# scenario={} base_seed={}", sc.name, sc.base_seed)?;
    writeln!(out, "t,optimal_rate,empirical_optimal")?;
    for p in &points {
        writeln!(out, "{},{},{}", p.t, p.optimal_rate, p.empirical_optimal)?;
    }
    eprintln!(
        "oracle scenario={} points={} base_seed={}",
        sc.name,
        points.len(),
        sc.base_seed
    );
    Ok(())
}

fn cmd_realdata(args: RealdataArgs) -> Result<(), Error> {
    let doc = ScenarioDoc::load(&args.scenario)?;
    let plan = match doc {
        ScenarioDoc::RealData(plan) => plan,
        ScenarioDoc::Synthetic(_) => {
            return Err(Error::validation(
                "this is a synthetic scenario; use `fasc simulate`",
            ))
        }
    };
    let csv_path = args
        .input
        .clone()
        .unwrap_or_else(|| PathBuf::from(&plan.path));
    let outcome = run_realdata(&plan, &csv_path)?;
    eprintln!("{}", outcome.report);
    eprintln!(
        "realdata plan={} rows={} features={} classes={} seed={}",
        plan.name, outcome.rows, outcome.features, outcome.classes, plan.seed
    );

    let mut out = std::io::BufWriter::new(std::fs::File::create(&args.out)?);
    writeln!(out, "method,r_alg,mislabeling,seed")?;
    for r in &outcome.records {
        writeln!(
            out,
            "{},{},{},{}",
            r.method,
            r.r_alg.map(|v| v.to_string()).unwrap_or_default(),
            r.mislabeling,
            r.seed
        )?;
    }
    if let Some(path) = &args.scree {
        write_scree(&outcome.scree, path)?;
    }
    Ok(())
}

fn write_scree(values: &[f64], path: &Path) -> Result<(), Error> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "index,eigenvalue")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, v)?;
    }
    Ok(())
}

fn cmd_scree(args: ScreeArgs) -> Result<(), Error> {
    let rules = CleaningRule {
        drop_columns: args.drop_columns.clone(),
        drop_rows_with_missing: args.drop_missing,
        centralize: args.centralize,
    };
    let (data, report) = load_input(
        &args.input,
        args.label_column.as_deref(),
        args.delimiter,
        &rules,
    )?;
    eprintln!("{report}");
    let values = scree(&data)?;
    write_scree(&values, &args.out)?;
    Ok(())
}

fn cmd_diagnose(args: DiagnoseArgs) -> Result<(), Error> {
    let spec = FactorMixtureSpec::load_toml(&args.spec)?;
    let mut opts = AssumptionOptions::new(args.n);
    opts.perp_constant = args.perp_constant;
    let report = assumption_report(&spec, args.centroid_rank, &opts)?;

    println!("sigma_min_b={}", report.sigma_min_b);
    println!("sigma_max_b={}", report.sigma_max_b);
    println!("u_top_m_norm={}", report.u_top_m_norm);
    println!("pervasiveness_ratio_lo={}", report.pervasiveness_ratio_lo);
    println!("pervasiveness_ratio_hi={}", report.pervasiveness_ratio_hi);
    println!(
        "weak_factor_ok={} weak_factor_threshold={}",
        report.weak_factor_ok, report.weak_factor_threshold
    );
    println!(
        "perpendicularity_ok={} perpendicularity_threshold={}",
        report.perpendicularity_ok, report.perpendicularity_threshold
    );
    println!("eigen_gap={}", report.eigen_gap);
    println!("degenerate_loading={}", report.degenerate_loading);
    println!("mean_rank_zero={}", report.mean_rank_zero);

    let snr = snr_report(&spec)?;
    println!("snr_bar={}", snr.snr_bar);
    println!("s_quantity={}", snr.s_quantity);
    if let Some(v) = snr.snr {
        println!("snr={v}");
    }
    if let Some(v) = snr.optimal_rate {
        println!("optimal_rate={v}");
    }

    // Spectral-step conditions need a label draw: generate a sample.
    let data = generate(&spec, args.n, args.seed)?;
    let labels = data.labels().expect("generated data is labeled");
    if spec.sigma() > 0.0 {
        let cond = spectral_conditions(
            &spec,
            labels,
            spec.sigma(),
            args.n,
            spec.dim(),
            args.centroid_rank.min(spec.clusters()),
        )?;
        println!("beta={}", cond.beta);
        println!("psi={}", cond.psi);
        println!("rho={}", cond.rho);
    }
    println!("seed={}", args.seed);
    Ok(())
}
