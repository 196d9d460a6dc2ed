use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use collusion_cli::batch::{run_batch, BatchOptions};
use collusion_cli::bench::benchmarks;
use collusion_cli::config::ScenarioConfig;
use collusion_cli::output::{display, output_root, write_json};
use collusion_cli::probe::{run_probe, ProbeOptions, DEFAULT_PROBE_HORIZON};
use collusion_cli::table::{load_batches, render_table, write_table_csv};

/// Q-learning sellers pricing on a platform whose recommender allocates exposure.
#[derive(Parser)]
#[command(name = "collusion", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the competitive and collusive benchmark prices.
    Bench {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Products per bundle; defaults to the largest bundle of the scenario.
        #[arg(long)]
        bundle_size: Option<usize>,
        /// Directory for bench.json [default: $COLLUSION_OUT/<scenario>].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded batch of independent simulations.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        runs: Option<usize>,
        /// Master seed; run i uses a seed derived from (seed, i).
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads [default: all cores].
        #[arg(long)]
        jobs: Option<usize>,
        /// Batch directory [default: $COLLUSION_OUT/<scenario>].
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep every n-th period in trace.csv.
        #[arg(long)]
        stride: Option<u64>,
        /// Periods per run.
        #[arg(long)]
        horizon: Option<u64>,
    },
    /// Force one seller off its converged price and record the response.
    Probe {
        /// A run-NNN directory written by `run`.
        run_dir: PathBuf,
        /// Scenario of the run [default: config.toml of the batch].
        #[arg(long)]
        config: Option<PathBuf>,
        /// One-based seller to deviate.
        #[arg(long, default_value_t = 1)]
        deviation_seller: usize,
        /// Zero-based grid index forced at Time 1 [default: 0, the lowest price].
        #[arg(long)]
        deviation_action: Option<usize>,
        /// Periods after the equilibrium row.
        #[arg(long, default_value_t = DEFAULT_PROBE_HORIZON)]
        horizon: usize,
        /// Trajectory CSV [default: <run_dir>/probe.csv].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate finished batches side by side.
    Summarize {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
        /// CSV copy of the table [default: $COLLUSION_OUT/summary.csv].
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ScenarioArgs {
    /// Built-in scenario, e.g. baseline-profit.
    #[arg(long)]
    preset: Option<String>,
    /// Scenario TOML file.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ScenarioArgs {
    fn load(&self) -> anyhow::Result<ScenarioConfig> {
        match (&self.preset, &self.config) {
            (Some(name), _) => ScenarioConfig::preset(name),
            (None, Some(path)) => ScenarioConfig::load(path),
            (None, None) => bail!("either --preset or --config is required"),
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Bench {
            scenario,
            bundle_size,
            out,
        } => {
            let config = scenario.load()?;
            let b = benchmarks(&config, bundle_size)?;
            println!("P_N = {}", display(b.nash));
            println!("P_M = {}", display(b.monopoly));
            let dir = out.unwrap_or_else(|| output_root().join(&config.name));
            write_json(&dir.join("bench.json"), &b)?;
        }
        Command::Run {
            scenario,
            runs,
            seed,
            jobs,
            out,
            stride,
            horizon,
        } => {
            let mut config = scenario.load()?;
            if let Some(v) = runs {
                config.runs = v;
            }
            if let Some(v) = seed {
                config.seed = v;
            }
            if let Some(v) = stride {
                config.stride = v;
            }
            if let Some(v) = horizon {
                config.horizon = v;
            }
            // Re-validate after overrides.
            let config = ScenarioConfig::parse(&config.render())?;
            if jobs == Some(0) {
                bail!("--jobs must be at least 1");
            }
            let dir = out.unwrap_or_else(|| output_root().join(&config.name));
            let options = BatchOptions {
                jobs,
                preset: scenario.preset.clone(),
                config_file: scenario.config.clone(),
            };
            let started = Instant::now();
            let result = run_batch(&config, &dir, &options)
                .with_context(|| format!("batch {} (partial results in {})", config.name, dir.display()))?;
            let s = &result.summary.sellers[0];
            println!(
                "{}: seller 1 mean price {} ({}), mean profit {} ({}) over the last {} periods of {} runs",
                config.name,
                display(s.mean_price),
                display(s.price_std_time),
                display(s.mean_profit),
                display(s.profit_std_time),
                result.summary.tail_periods,
                result.summary.runs
            );
            eprintln!("wrote {} in {:.1} s", dir.display(), started.elapsed().as_secs_f64());
        }
        Command::Probe {
            run_dir,
            config,
            deviation_seller,
            deviation_action,
            horizon,
            out,
        } => {
            if deviation_seller == 0 {
                bail!("sellers are numbered from 1");
            }
            let config = config.map(|p| ScenarioConfig::load(&p)).transpose()?;
            let (result, path) = run_probe(&ProbeOptions {
                run_dir,
                config,
                seller: deviation_seller - 1,
                action: deviation_action,
                horizon,
                out,
            })?;
            for row in &result.rows {
                let prices: Vec<String> = row.prices.iter().map(|&p| display(p)).collect();
                let exposure: Vec<String> = row.exposure.iter().map(|&x| display(x)).collect();
                println!("{:>4}  prices {}  exposure {}", row.time, prices.join(" "), exposure.join(" "));
            }
            eprintln!("wrote {}", path.display());
        }
        Command::Summarize { dirs, out } => {
            let batches = load_batches(&dirs)?;
            print!("{}", render_table(&batches));
            let path = out.unwrap_or_else(|| output_root().join("summary.csv"));
            write_table_csv(&path, &batches)?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}
