use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sicpom::io;
use sicpom::optics;
use sicpom::sic;
use sicpom::tomography::{
    self, bench_trials, outcome_distribution, reconstruct, run_experiment, ExperimentConfig,
    Method, MleOptions, Scheme,
};
use sicpom::validate::full_validation_report;
use sicpom::Density64;

/// Environment variable consulted for the default seed when --seed is
/// absent (decimal u64).
const SEED_ENV: &str = "SICPOM_SEED";

#[derive(Parser)]
#[command(
    name = "sicpom",
    version,
    about = "Two-qubit SIC-POM construction, simulation and tomography"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// RNG seed; falls back to $SICPOM_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write output to this path (atomically) instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output encoding; csv is available for probs and simulate.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full invariant suite and report every check.
    Validate,
    /// Born-rule outcome probabilities of a state under a scheme.
    Probs(StateArgs),
    /// Sample detection counts for a state under a scheme.
    Simulate(SimulateArgs),
    /// Reconstruct a state from recorded counts.
    Reconstruct(ReconstructArgs),
    /// Run a configured end-to-end experiment.
    Experiment(ExperimentArgs),
    /// Fidelity statistics over repeated random-state trials.
    Bench(BenchArgs),
    /// Dump a bench circuit with its compiled unitary and port Kraus
    /// operators.
    DumpCircuit(DumpCircuitArgs),
}

#[derive(Args)]
struct StateArgs {
    /// State file (JSON, pure or mixed).
    #[arg(long)]
    state: PathBuf,
    /// Measurement realization: direct, two-step or optical.
    #[arg(long, default_value = "direct")]
    scheme: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Number of shots to draw.
    #[arg(long)]
    shots: u64,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Counts file (JSON record or port,result,count CSV).
    #[arg(long)]
    counts: PathBuf,
    /// Reconstruction method: linear, linear-projected or mle.
    #[arg(long)]
    method: String,
    /// Maximum MLE iterations.
    #[arg(long, default_value_t = MleOptions::default().max_iter)]
    mle_max_iter: usize,
    /// MLE stopping tolerance.
    #[arg(long, default_value_t = MleOptions::default().tol)]
    mle_tol: f64,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Record the wall-clock duration in the report. Off by default so
    /// equal seeds give byte-identical reports.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Number of random-state trials.
    #[arg(long)]
    trials: u64,
    /// Shots per trial.
    #[arg(long)]
    shots: u64,
    /// Hilbert-space dimension (2 or 4).
    #[arg(long, default_value_t = 4)]
    dim: usize,
    /// Worker threads for the trials (0 = rayon default).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct DumpCircuitArgs {
    /// Built-in bench: tetrahedron, tetrahedron-first-stage,
    /// first-stage-d4, full-d4, basis-1 .. basis-4.
    #[arg(long, conflicts_with = "circuit")]
    bench: Option<String>,
    /// Load a circuit description file instead of a built-in bench.
    #[arg(long)]
    circuit: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let seed = resolve_seed(cli.seed)?;
    let format = cli.format;
    let output = cli.output.as_deref();

    match cli.command {
        Command::Validate => {
            require_json(format, "validate")?;
            let report = full_validation_report::<f64>()?;
            emit(output, &serde_json::to_string_pretty(&report)?)?;
            Ok(report.pass)
        }
        Command::Probs(args) => {
            let (rho, scheme) = load_state_and_scheme(&args)?;
            let pom = tomography::scheme_pom(scheme, rho.dim())?;
            let probs = outcome_distribution(&rho, &pom)?;
            let labels = tomography::default_labels(probs.len());
            let text = match format {
                Format::Json => {
                    let rows: Vec<serde_json::Value> = labels
                        .iter()
                        .zip(&probs)
                        .map(|(l, &p)| {
                            serde_json::json!({"port": l.port, "result": l.result, "probability": p})
                        })
                        .collect();
                    serde_json::to_string_pretty(&serde_json::json!({
                        "pom": format!("sic-d{}", rho.dim()),
                        "scheme": scheme.to_string(),
                        "probabilities": rows,
                    }))?
                }
                Format::Csv => {
                    let mut text = String::from("port,result,probability\n");
                    for (l, &p) in labels.iter().zip(&probs) {
                        text.push_str(&format!("{},{},{}\n", l.port, l.result, sig17(p)));
                    }
                    text
                }
            };
            emit(output, &text)?;
            Ok(true)
        }
        Command::Simulate(args) => {
            let (rho, scheme) = load_state_and_scheme(&args.state)?;
            let pom = tomography::scheme_pom(scheme, rho.dim())?;
            let probs = outcome_distribution(&rho, &pom)?;
            let record =
                tomography::sample_counts(&probs, args.shots, seed, format!("sic-d{}", rho.dim()))?;
            let text = match format {
                Format::Json => io::counts_to_json(&record),
                Format::Csv => io::counts_to_csv(&record),
            };
            emit(output, &text)?;
            Ok(true)
        }
        Command::Reconstruct(args) => {
            require_json(format, "reconstruct")?;
            let method = Method::from_str(&args.method)?;
            let text = std::fs::read_to_string(&args.counts)
                .with_context(|| format!("reading {}", args.counts.display()))?;
            let record = io::counts_from_str(&text)?;
            let dim = match record.pom_id() {
                "sic-d4" => 4,
                "sic-d2" => 2,
                other => bail!("counts record for unknown POM '{other}'"),
            };
            let pom = sic::sic_pom::<f64>(dim)?;
            let opts = MleOptions {
                max_iter: args.mle_max_iter,
                tol: args.mle_tol,
            };
            let res = reconstruct(&record, &pom, method, opts)?;
            let payload = serde_json::json!({
                "method": res.method,
                "pom": record.pom_id(),
                "shots": record.total(),
                "estimate": io::matrix_to_rows(&res.estimate),
                "physical": res.physical,
                "iterations": res.iterations,
                "converged": res.converged,
                "max_prob_deviation": res.max_prob_deviation,
                "loglik_delta": res.loglik_delta,
                "min_loglik_step": res.min_loglik_step,
            });
            emit(output, &serde_json::to_string_pretty(&payload)?)?;
            Ok(true)
        }
        Command::Experiment(args) => {
            require_json(format, "experiment")?;
            let text = std::fs::read_to_string(&args.config)
                .with_context(|| format!("reading {}", args.config.display()))?;
            let mut config: ExperimentConfig =
                serde_json::from_str(&text).map_err(|e| anyhow!("config: {e}"))?;
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            let started = Instant::now();
            let mut report = run_experiment(&config)?;
            if args.timing {
                report.timing_ms = Some(started.elapsed().as_millis() as u64);
            }
            emit(output, &serde_json::to_string_pretty(&report)?)?;
            Ok(true)
        }
        Command::Bench(args) => {
            require_json(format, "bench")?;
            let methods = [Method::Linear, Method::LinearProjected, Method::Mle];
            let summary =
                bench_trials(args.trials, args.shots, args.dim, seed, &methods, args.jobs)?;
            emit(output, &serde_json::to_string_pretty(&summary)?)?;
            Ok(true)
        }
        Command::DumpCircuit(args) => {
            require_json(format, "dump-circuit")?;
            let circuit = match (&args.bench, &args.circuit) {
                (Some(name), None) => builtin_bench(name)?,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    io::circuit_from_json(&text)?
                }
                _ => bail!("exactly one of --bench or --circuit is required"),
            };
            let kraus = circuit.port_kraus()?;
            let payload = serde_json::json!({
                "circuit": serde_json::from_str::<serde_json::Value>(&io::circuit_to_json(&circuit))?,
                "unitary": io::matrix_to_rows(&circuit.unitary()),
                "port_kraus": kraus
                    .iter()
                    .map(|pk| serde_json::json!({
                        "port": pk.port,
                        "matrix": io::matrix_to_rows(&pk.matrix),
                    }))
                    .collect::<Vec<_>>(),
            });
            emit(output, &serde_json::to_string_pretty(&payload)?)?;
            Ok(true)
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| anyhow!("{SEED_ENV} must be a decimal u64, got '{text}'")),
        Err(_) => Ok(0),
    }
}

fn require_json(format: Format, what: &str) -> Result<()> {
    if format == Format::Csv {
        bail!("{what} output has no CSV encoding; use --format json");
    }
    Ok(())
}

fn load_state_and_scheme(args: &StateArgs) -> Result<(Density64, Scheme)> {
    let scheme = Scheme::from_str(&args.scheme)?;
    let text = std::fs::read_to_string(&args.state)
        .with_context(|| format!("reading {}", args.state.display()))?;
    let state = io::parse_state_json(&text)?;
    Ok((state.density(), scheme))
}

fn builtin_bench(name: &str) -> Result<optics::PhotonicCircuit<f64>> {
    Ok(match name {
        "tetrahedron" => optics::build_tetrahedron_bench()?.full,
        "tetrahedron-first-stage" => optics::build_tetrahedron_bench()?.first_stage,
        "first-stage-d4" => optics::build_first_stage_bench_d4()?,
        "full-d4" => optics::build_full_bench_d4()?,
        "basis-1" => optics::build_basis_circuit(1)?,
        "basis-2" => optics::build_basis_circuit(2)?,
        "basis-3" => optics::build_basis_circuit(3)?,
        "basis-4" => optics::build_basis_circuit(4)?,
        other => bail!(
            "unknown bench '{other}' (expected tetrahedron, tetrahedron-first-stage, \
             first-stage-d4, full-d4 or basis-1..basis-4)"
        ),
    })
}

/// 17 significant digits: enough to round-trip any f64 exactly.
fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes to stdout, or atomically to a file: the content lands in a
/// temporary sibling first and is renamed into place, so a failed run
/// never leaves partial output.
fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    let mut text = content.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match path {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
            let file_name = path
                .file_name()
                .ok_or_else(|| anyhow!("--output needs a file path"))?
                .to_string_lossy()
                .into_owned();
            let tmp = dir
                .unwrap_or_else(|| Path::new("."))
                .join(format!(".{file_name}.tmp-{}", std::process::id()));
            std::fs::write(&tmp, text.as_bytes())
                .with_context(|| format!("writing {}", tmp.display()))?;
            std::fs::rename(&tmp, path)
                .with_context(|| format!("renaming into {}", path.display()))?;
            Ok(())
        }
    }
}
