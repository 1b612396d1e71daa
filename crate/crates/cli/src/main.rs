//! `qnn`: train, evaluate, and sweep quantum-neural-network capacity-fade models.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qnn_core::dataset::{load_csv, write_csv, SyntheticFade};
use qnn_core::encoder::EncodingMode;
use qnn_core::experiment::{run_experiment, split, ExperimentConfig, RunReport, SplitMode};
use qnn_core::model::{load_model, save_model};
use qnn_core::sweep::{run_sweep, sweep_csv, SweepGrid, DEFAULT_RUN_CAP};
use qnn_core::trainer::{evaluate, TrainConfig};
use qnn_core::Error;

#[derive(Parser)]
#[command(name = "qnn", version, about = "Quantum neural network regression of battery capacity fade")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model to a capacity CSV and write the model and a JSON report.
    Train(TrainArgs),
    /// Predict capacities for a cycle range or for the cycles of a CSV.
    Predict(PredictArgs),
    /// Recompute train/test metrics of a saved model.
    Eval(EvalArgs),
    /// Train over a qubits x depth x seed grid and write one CSV row per run.
    Sweep(SweepArgs),
    /// Write a synthetic exponential-fade capacity CSV.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct SplitArgs {
    /// Fraction of records used for training.
    #[arg(long = "train-frac", default_value_t = 0.8)]
    train_frac: f64,
    #[arg(long = "split-mode", default_value = "chrono")]
    split_mode: SplitMode,
}

#[derive(Args)]
struct OptimArgs {
    #[arg(long = "max-iters", default_value_t = 200)]
    max_iters: usize,
    #[arg(long = "grad-tol", default_value_t = 1e-6)]
    grad_tol: f64,
    /// Worker threads. Results are identical for any value.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Record wall-clock seconds in outputs (makes them run-dependent).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 4)]
    qubits: usize,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value = "arc")]
    encoding: EncodingMode,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    split: SplitArgs,
    #[command(flatten)]
    optim: OptimArgs,
    /// Model output path.
    #[arg(long)]
    out: PathBuf,
    /// Report output path (default: model path with `.report.json`).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// Inclusive cycle range `a..b`.
    #[arg(long, value_parser = parse_range, conflicts_with = "data", required_unless_present = "data")]
    cycles: Option<(u32, u32)>,
    /// Capacity CSV whose cycles (and measurements) are used.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Output CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    split: SplitArgs,
    /// Seed for `--split-mode random`.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Accepted for symmetry with `train`; the model's own architecture is used.
    #[arg(long)]
    qubits: Option<usize>,
    /// Accepted for symmetry with `train`; the model's own architecture is used.
    #[arg(long)]
    depth: Option<usize>,
    /// Write the metrics as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    qubits: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    depths: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    seeds: Vec<u64>,
    #[arg(long, default_value = "arc")]
    encoding: EncodingMode,
    #[command(flatten)]
    split: SplitArgs,
    #[command(flatten)]
    optim: OptimArgs,
    /// Upper bound on the number of runs in the grid.
    #[arg(long = "max-runs", default_value_t = DEFAULT_RUN_CAP)]
    max_runs: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long = "battery-id", default_value = "SYN05")]
    battery_id: String,
    #[arg(long, default_value_t = 168)]
    cycles: u32,
    #[arg(long = "rated-ah", default_value_t = 2.0)]
    rated_ah: f64,
    /// Capacity floor as a fraction of rated.
    #[arg(long, default_value_t = 0.70)]
    floor: f64,
    /// Decay constant in cycles.
    #[arg(long, default_value_t = 80.0)]
    tau: f64,
    #[arg(long = "noise-sd", default_value_t = 0.01)]
    noise_sd: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected `a..b`, got `{s}`"))?;
    let a: u32 = a.trim().parse().map_err(|_| format!("bad range start `{a}`"))?;
    let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|_| format!("bad range end `{b}`"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

enum Failure {
    Runtime(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(Error::from)
}

fn train_config(seed: u64, optim: &OptimArgs) -> TrainConfig {
    TrainConfig {
        max_iters: optim.max_iters,
        grad_tol: optim.grad_tol,
        seed,
        threads: optim.threads,
        ..TrainConfig::default()
    }
}

fn cmd_train(args: TrainArgs) -> Result<(), Failure> {
    let series = load_csv(&args.data)?;
    let cfg = ExperimentConfig {
        qubits: args.qubits,
        depth: args.depth,
        encoding: args.encoding,
        train_fraction: args.split.train_frac,
        split_mode: args.split.split_mode,
        train: train_config(args.seed, &args.optim),
    };
    let outcome = run_experiment(&series, &cfg)?;
    save_model(&outcome.model, &args.out)?;
    let report_path = args.report.unwrap_or_else(|| args.out.with_extension("report.json"));
    let report = RunReport::new(&series, &cfg, &outcome, args.optim.timing);
    write_text(&report_path, &report.to_json())?;

    let r = &outcome.report;
    println!("battery {}: {} train / {} test records", series.battery_id, outcome.train.len(), outcome.test.len());
    println!("iterations {} ({:?}), final loss {}", r.iterations, r.termination, r.loss_history.last().unwrap_or(&f64::NAN));
    println!("train RMSE {} Ah, MAPE {} %", r.train_rmse, r.train_mape);
    println!("test  RMSE {} Ah, MAPE {} %", r.test_rmse, r.test_mape);
    if args.optim.timing {
        println!("wall time {:.3} s", r.wall_time);
    }
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<(), Failure> {
    let model = load_model(&args.model)?;
    let mut out = String::new();
    if let Some(path) = &args.data {
        let series = load_csv(path)?;
        let predicted = model.predict_batch(&series.cycles());
        out.push_str("cycle,measured_ah,predicted_ah\n");
        for (r, p) in series.records().iter().zip(predicted) {
            let _ = writeln!(out, "{},{},{}", r.cycle, r.capacity, p);
        }
    } else if let Some((a, b)) = args.cycles {
        let cycles: Vec<u32> = (a..=b).collect();
        out.push_str("cycle,predicted_ah\n");
        for (c, p) in cycles.iter().zip(model.predict_batch(&cycles)) {
            let _ = writeln!(out, "{c},{p}");
        }
    }
    match &args.out {
        Some(path) => write_text(path, &out)?,
        None => print!("{out}"),
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), Failure> {
    let model = load_model(&args.model)?;
    if args.qubits.is_some_and(|q| q != model.n_qubits()) || args.depth.is_some_and(|d| d != model.ansatz.depth) {
        eprintln!(
            "note: --qubits/--depth ignored; model has {} qubits, depth {}",
            model.n_qubits(),
            model.ansatz.depth
        );
    }
    let series = load_csv(&args.data)?;
    let (train, test) = split(&series, args.split.train_frac, args.split.split_mode, args.seed)?;
    let train_m = evaluate(&model, &train)?;
    let test_m = evaluate(&model, &test)?;
    println!("train RMSE {} Ah, MAPE {} %", train_m.rmse, train_m.mape);
    println!("test  RMSE {} Ah, MAPE {} %", test_m.rmse, test_m.mape);
    if let Some(path) = &args.out {
        let json = format!(
            "{{\n  \"train\": {{ \"rmse\": {}, \"mape\": {} }},\n  \"test\": {{ \"rmse\": {}, \"mape\": {} }}\n}}\n",
            train_m.rmse, train_m.mape, test_m.rmse, test_m.mape
        );
        write_text(path, &json)?;
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    let grid = match SweepGrid::new(args.qubits, args.depths, args.seeds, args.max_runs) {
        Ok(grid) => grid,
        Err(e @ Error::GridTooLarge { .. }) => {
            return Err(Failure::Usage(format!("{e}; shrink the grid or raise --max-runs")))
        }
        Err(e @ Error::InvalidConfig(_)) => return Err(Failure::Usage(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let series = load_csv(&args.data)?;
    let base = ExperimentConfig {
        qubits: 1,
        depth: 1,
        encoding: args.encoding,
        train_fraction: args.split.train_frac,
        split_mode: args.split.split_mode,
        train: train_config(0, &args.optim),
    };
    let rows = run_sweep(&series, &grid, &base, args.optim.threads)?;
    write_text(&args.out, &sweep_csv(&rows, args.optim.timing))?;
    let ok = rows.iter().filter(|r| r.succeeded()).count();
    for row in rows.iter().filter(|r| !r.succeeded()) {
        if let qnn_core::sweep::RunStatus::Failed(msg) = &row.status {
            eprintln!("run qubits={} depth={} seed={} failed: {msg}", row.qubits, row.depth, row.seed);
        }
    }
    println!("{ok}/{} runs succeeded", rows.len());
    if ok == 0 {
        return Err(Failure::Runtime(Error::InvalidConfig("every sweep run failed".into())));
    }
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Failure> {
    let series = SyntheticFade {
        battery_id: args.battery_id,
        rated_ah: args.rated_ah,
        floor: args.floor,
        tau: args.tau,
        cycles: args.cycles,
        noise_sd: args.noise_sd,
        seed: args.seed,
    }
    .generate()?;
    write_csv(&series, &args.out)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Generate(a) => cmd_generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
