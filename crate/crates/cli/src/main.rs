use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use mmassoc::harness::{
    aggregate, emit_results, run_experiment, solve_scheme, ExperimentSpec, OutputFormat, RunStatus,
};
use mmassoc::instance::SolutionFile;
use mmassoc::step2flow::build_flow_network;
use mmassoc::{sample_scenario, AssociationInstance, ScenarioConfig, Scheme};

#[derive(Parser)]
#[command(
    name = "mmassoc",
    version,
    about = "Rate-aware user association for mmWave networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo sweep over the maximum rate requirement.
    Simulate {
        /// Experiment TOML (scenario under `[base]`) or a bare scenario TOML.
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated scheme names.
        #[arg(long, value_delimiter = ',')]
        schemes: Option<Vec<Scheme>>,
        #[arg(long)]
        runs: Option<usize>,
        /// Comma-separated maximum requirements in bit/s.
        #[arg(long, value_delimiter = ',')]
        rmax_sweep: Option<Vec<f64>>,
        /// Output directory; defaults to the experiment's `output_path`, then `results`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        node_budget: Option<u64>,
        /// Record per-run wall time. Output is then no longer reproducible.
        #[arg(long)]
        timing: bool,
    },
    /// Solve one instance file with one scheme and print the solution JSON.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        scheme: Scheme,
        #[arg(long, default_value_t = mmassoc::step1::DEFAULT_NODE_BUDGET)]
        node_budget: u64,
        /// Write the solution here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the step-2 flow network as a `tail head capacity cost` edge list.
        #[arg(long)]
        dump_flow: Option<PathBuf>,
    },
    /// Draw one instance from a scenario and write it as JSON.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Maximum requirement in bit/s; defaults to the config's value.
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    match ExperimentSpec::from_toml_str(&text) {
        Ok(spec) => Ok(spec),
        Err(spec_err) => match ScenarioConfig::from_toml_str(&text) {
            Ok(base) => Ok(ExperimentSpec::new(base)),
            Err(_) => Err(spec_err).with_context(|| format!("parsing {}", path.display())),
        },
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    config: &Path,
    schemes: Option<Vec<Scheme>>,
    runs: Option<usize>,
    rmax_sweep: Option<Vec<f64>>,
    out: Option<PathBuf>,
    format: OutputFormat,
    seed: Option<u64>,
    node_budget: Option<u64>,
    timing: bool,
) -> Result<()> {
    let mut spec = load_spec(config)?;
    if let Some(s) = schemes {
        spec.schemes = s;
    }
    if let Some(n) = runs {
        spec.n_runs = n;
    }
    if let Some(sweep) = rmax_sweep {
        spec.r_max_sweep = sweep;
    }
    if let Some(seed) = seed {
        spec.base.seed = seed;
    }
    if let Some(b) = node_budget {
        spec.exact_node_budget = b;
    }
    spec.record_timing |= timing;
    let out = out
        .or_else(|| spec.output_path.clone())
        .unwrap_or_else(|| PathBuf::from("results"));
    let records = run_experiment(&spec)?;
    let files = emit_results(&records, format, &out)?;
    println!(
        "{:>10}  {:<18} {:>5} {:>10} {:>10} {:>14}",
        "r_max_gbps", "scheme", "runs", "associated", "satisfied", "sum_rate_gbps"
    );
    for a in aggregate(&records) {
        println!(
            "{:>10.3}  {:<18} {:>5} {:>10.3} {:>10.3} {:>14.4}",
            a.r_max / 1e9,
            a.scheme.name(),
            a.n_runs,
            a.mean_n_associated,
            a.mean_n_satisfied,
            a.mean_sum_rate_bps / 1e9
        );
    }
    let overruns = records
        .iter()
        .filter(|r| r.status == RunStatus::BudgetExhausted)
        .count();
    if overruns > 0 {
        eprintln!("warning: {overruns} exact solves hit the node budget; their records use the best solution found");
    }
    eprintln!(
        "wrote {} and {}",
        files.records.display(),
        files.aggregate.display()
    );
    Ok(())
}

/// Returns whether the node budget ran out.
fn solve(
    instance: &Path,
    scheme: Scheme,
    node_budget: u64,
    out: Option<&Path>,
    dump_flow: Option<&Path>,
) -> Result<bool> {
    let inst = AssociationInstance::load(instance)
        .with_context(|| format!("loading {}", instance.display()))?;
    let outcome = solve_scheme(&inst, scheme, node_budget)?;
    if let Some(path) = dump_flow {
        let Some(res) = &outcome.residual else {
            bail!("{scheme} does not solve a flow problem");
        };
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        build_flow_network(res).write_edge_list(BufWriter::new(file))?;
    }
    let json =
        serde_json::to_string_pretty(&SolutionFile::new(&inst, scheme.name(), &outcome.solution))?;
    match out {
        Some(path) => std::fs::write(path, json + "\n")
            .with_context(|| format!("writing {}", path.display()))?,
        None => writeln!(std::io::stdout().lock(), "{json}")?,
    }
    Ok(outcome.status == RunStatus::BudgetExhausted)
}

fn generate(config: &Path, seed: Option<u64>, r_max: Option<f64>, out: &Path) -> Result<()> {
    let mut cfg = load_spec(config)?.base;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(r) = r_max {
        cfg.r_max_bps = r;
    }
    let inst = AssociationInstance::from_scenario(&sample_scenario(&cfg)?, &cfg)?;
    inst.save(out)
        .with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Simulate {
            config,
            schemes,
            runs,
            rmax_sweep,
            out,
            format,
            seed,
            node_budget,
            timing,
        } => simulate(
            &config,
            schemes,
            runs,
            rmax_sweep,
            out,
            format,
            seed,
            node_budget,
            timing,
        )
        .map(|_| false),
        Command::Solve {
            instance,
            scheme,
            node_budget,
            out,
            dump_flow,
        } => solve(
            &instance,
            scheme,
            node_budget,
            out.as_deref(),
            dump_flow.as_deref(),
        ),
        Command::Generate {
            config,
            seed,
            r_max,
            out,
        } => generate(&config, seed, r_max, &out).map(|_| false),
    };
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("error: exact step-1 search exhausted its node budget; the solution written is the best found, not a proven optimum");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
