use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graphon_transfer::domain::io::read_gso;
use graphon_transfer::harness::{
    self, default_signals, ConvergenceParams, Experiment, ExperimentConfig, Fault, GraphonFamily, LaplaceParams,
    Row, Sampling, ScnnParams, SignalFn, TransferParams,
};
use graphon_transfer::induction::induce_graphon;
use graphon_transfer::motifs::{cut_norm_exact, cut_norm_heuristic};
use graphon_transfer::scnn::ScnnSpec;
use graphon_transfer::unbounded::TargetSign;
use graphon_transfer::{Error, FilterSpec};

#[derive(Parser)]
#[command(name = "graphon-transfer", version, about = "Graphon transferability experiments")]
struct Cli {
    /// Run the experiment described by a JSON config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every invariant check and print a JSON report.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Inject a known fault (`drop-gwm-scale`) to test the suite itself.
        #[arg(long)]
        inject_fault: Option<String>,
    },
    /// Distances of filtered induced operators to a high-resolution reference.
    Converge {
        /// `const:p`, `product`, `min`, `expdist:s`, `sbm:k,pin,pout` or `step:<file>`.
        #[arg(long)]
        graphon: String,
        /// `id`, `sq`, `cube-minus-id`, `poly:c0,c1,..` or `rat:num/den`.
        #[arg(long)]
        filter: String,
        /// Comma-separated graph sizes, increasing.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value = "grid")]
        sampling: String,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Linear stability bound of one filter between two sampled graphs.
    Transfer {
        #[arg(long)]
        graphon: String,
        #[arg(long)]
        filter: String,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long, default_value = "iid")]
        sampling: String,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
    /// End-to-end bound of a spectral network between two sampled graphs.
    Scnn {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        graphon: String,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        /// Input features, one per network input (`one`, `u`, `cos`, `sin`, `wave`).
        #[arg(long, value_delimiter = ',')]
        signals: Option<Vec<String>>,
        #[arg(long, default_value = "iid")]
        sampling: String,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Band gaps of finite-difference Laplacians.
    Laplace {
        /// Band cutoff; modes with |eigenvalue| below it are kept.
        #[arg(long)]
        lambda: f64,
        /// Power of the monomial filter x^k.
        #[arg(long)]
        k: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// GSO scale; defaults to n^2 for each size.
        #[arg(long)]
        scale: Option<f64>,
        /// Compare against +λ(k) instead of the stencil sign.
        #[arg(long)]
        model_sign: bool,
        #[command(flatten)]
        out: Out,
    },
    /// Cut norm of the graphon induced by a `gso v1` file.
    Cutnorm {
        #[arg(long)]
        graph: PathBuf,
        /// Exhaustive search; the default for at most 20 cells.
        #[arg(long, conflicts_with = "heuristic")]
        exact: bool,
        /// Local search with this many random restarts.
        #[arg(long, value_name = "RESTARTS")]
        heuristic: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct Out {
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Whether all checks of a run passed.
type Outcome = Result<bool, Error>;

fn is_usage(e: &Error) -> bool {
    matches!(e, Error::Config(_) | Error::Parse(_) | Error::Parameter(_) | Error::Io(_) | Error::Json(_))
}

fn write_rows(rows: &[Row], out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(p) => harness::write_csv(rows, File::create(p)?),
        None => harness::write_csv(rows, io::stdout().lock()),
    }
}

fn summary(value: serde_json::Value) {
    eprintln!("{}", serde_json::to_string_pretty(&value).expect("json"));
}

fn run_experiment(exp: Experiment, out: Option<&Path>) -> Outcome {
    match exp {
        Experiment::Converge(p) => {
            let r = harness::run_convergence(&p)?;
            write_rows(&r.rows, out)?;
            summary(serde_json::json!({
                "reference": r.reference,
                "medians": r.medians,
                "rate": r.rate,
                "strictly_decreasing": r.strictly_decreasing,
            }));
            Ok(true)
        }
        Experiment::Transfer(p) => {
            let r = harness::run_transfer_bound(&p)?;
            write_rows(&r.rows, out)?;
            summary(serde_json::json!({ "constant": r.constant, "all_hold": r.all_hold }));
            Ok(r.all_hold)
        }
        Experiment::Scnn(p) => {
            let r = harness::run_scnn_transfer(&p)?;
            write_rows(&r.rows, out)?;
            summary(serde_json::json!({ "constant": r.constant, "all_hold": r.all_hold }));
            Ok(r.all_hold)
        }
        Experiment::Laplace(p) => {
            let r = harness::run_laplace(&p)?;
            write_rows(&r.rows, out)?;
            summary(serde_json::json!({
                "band_dimension": r.band_dimension,
                "gaps": r.gaps,
                "convergence_decreasing": r.convergence_decreasing,
                "commutation_decreasing": r.commutation_decreasing,
            }));
            Ok(true)
        }
    }
}

fn signals(names: Option<Vec<String>>, width: usize) -> Result<Vec<SignalFn>, Error> {
    match names {
        Some(v) => v.iter().map(|s| SignalFn::parse(s)).collect(),
        None => Ok(default_signals(width)),
    }
}

fn run(cli: Cli) -> Outcome {
    if let Some(path) = &cli.config {
        if cli.command.is_some() {
            return Err(Error::Config("--config replaces the subcommand; give one or the other".into()));
        }
        let cfg = ExperimentConfig::read(path)?;
        let out = cfg.out.clone().map(PathBuf::from);
        return run_experiment(cfg.validate()?, out.as_deref());
    }
    let Some(command) = cli.command else {
        return Err(Error::Config("a subcommand or --config is required".into()));
    };
    match command {
        Command::Verify { seed, inject_fault } => {
            let fault = match inject_fault.as_deref() {
                None => Fault::None,
                Some("drop-gwm-scale") => Fault::DropGwmScale,
                Some(other) => return Err(Error::Parse(format!("unknown fault {other:?}"))),
            };
            let report = harness::verify_suite(seed, fault)?;
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{}", report.to_json())?;
            for c in report.failures() {
                eprintln!("FAILED {}: {} (max error {:e}, tolerance {:e})", c.name, c.property, c.max_error, c.tolerance);
            }
            Ok(report.passed)
        }
        Command::Converge { graphon, filter, sizes, sampling, trials, seed, out } => run_experiment(
            Experiment::Converge(ConvergenceParams {
                name: "converge".into(),
                graphon: GraphonFamily::parse(&graphon)?,
                filter: FilterSpec::parse(&filter)?,
                sizes,
                sampling: Sampling::parse(&sampling)?,
                trials,
                seed,
            }),
            out.out.as_deref(),
        ),
        Command::Transfer { graphon, filter, n1, n2, sampling, trials, seed, out } => run_experiment(
            Experiment::Transfer(TransferParams {
                name: "transfer".into(),
                graphon: GraphonFamily::parse(&graphon)?,
                filter: FilterSpec::parse(&filter)?,
                n1,
                n2,
                sampling: Sampling::parse(&sampling)?,
                trials,
                seed,
            }),
            out.out.as_deref(),
        ),
        Command::Scnn { spec, graphon, n1, n2, signals: names, sampling, trials, seed, out } => {
            let parsed = ScnnSpec::read(&spec)?;
            let signals = signals(names, parsed.widths()[0])?;
            run_experiment(
                Experiment::Scnn(ScnnParams {
                    name: "scnn".into(),
                    label: spec.display().to_string(),
                    spec: parsed,
                    graphon: GraphonFamily::parse(&graphon)?,
                    signals,
                    n1,
                    n2,
                    sampling: Sampling::parse(&sampling)?,
                    trials,
                    seed,
                }),
                out.out.as_deref(),
            )
        }
        Command::Laplace { lambda, k, sizes, scale, model_sign, out } => run_experiment(
            Experiment::Laplace(LaplaceParams {
                name: "laplace".into(),
                lambda,
                power: k,
                sizes,
                scale,
                sign: if model_sign { TargetSign::Model } else { TargetSign::Stencil },
            }),
            out.out.as_deref(),
        ),
        Command::Cutnorm { graph, exact: _, heuristic, seed } => {
            let w = induce_graphon(&read_gso(&graph)?);
            let value = match heuristic {
                Some(restarts) => serde_json::json!({
                    "mode": "heuristic",
                    "lower_bound": cut_norm_heuristic(&w, restarts, seed),
                }),
                None => {
                    let c = cut_norm_exact(&w)?;
                    serde_json::json!({
                        "mode": "exact",
                        "value": c.value,
                        "s_cells": c.s_cells,
                        "t_cells": c.t_cells,
                    })
                }
            };
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}
