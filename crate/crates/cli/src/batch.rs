//! Seeded batches of independent runs and their persisted results.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use collusion::rng::run_seed;
use collusion::{run_game, summarize_seller, Summary, Trace, WindowPoint};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{PolicyName, ScenarioConfig, MOVING_AVERAGE_WINDOW};
use crate::output::{create, num, write_json, write_records};

pub const SUMMARY_FILE: &str = "summary.json";
pub const CONFIG_FILE: &str = "config.toml";
pub const STATE_FILE: &str = "state.json";

#[derive(Clone, Debug, Default)]
pub struct BatchOptions {
    /// Worker threads; `None` uses every available core.
    pub jobs: Option<usize>,
    /// Preset the scenario came from, recorded for provenance.
    pub preset: Option<String>,
    /// Scenario file the scenario came from, recorded for provenance.
    pub config_file: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SellerSummary {
    /// One-based seller number.
    pub seller: usize,
    pub mean_price: f64,
    pub mean_profit: f64,
    pub price_std_time: f64,
    pub profit_std_time: f64,
    pub price_std_runs: f64,
    pub profit_std_runs: f64,
}

impl From<&Summary> for SellerSummary {
    fn from(s: &Summary) -> Self {
        SellerSummary {
            seller: s.seller + 1,
            mean_price: s.mean_price,
            mean_profit: s.mean_profit,
            price_std_time: s.price_std_time,
            profit_std_time: s.profit_std_time,
            price_std_runs: s.price_std_runs,
            profit_std_runs: s.profit_std_runs,
        }
    }
}

/// Contents of `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub scenario: String,
    pub policy: PolicyName,
    pub personalized: bool,
    pub runs: usize,
    pub seed: u64,
    pub horizon: u64,
    pub tail_periods: usize,
    pub moving_average_window: u64,
    pub sellers: Vec<SellerSummary>,
}

/// One line of `runs.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRow {
    pub run: usize,
    pub seed: u64,
    pub mean_prices: Vec<f64>,
    pub mean_profits: Vec<f64>,
    pub converged_at: Option<u64>,
    pub final_state: usize,
}

#[derive(Clone, Debug)]
pub struct BatchResult {
    pub dir: PathBuf,
    pub summary: BatchSummary,
    pub rows: Vec<RunRow>,
    /// Moving average of seller 1's across-run mean price.
    pub moving_average: Vec<WindowPoint<f64>>,
}

#[derive(Serialize)]
struct Provenance<'a> {
    tool: &'static str,
    version: &'static str,
    preset: Option<&'a str>,
    config_file: Option<String>,
    rerun: String,
    rng: &'static str,
    master_seed: u64,
    runs: usize,
    run_seeds: Vec<u64>,
    horizon: u64,
    stride: u64,
}

#[derive(Serialize, Deserialize)]
pub struct RunState {
    pub run: usize,
    pub seed: u64,
    pub final_state: usize,
    pub final_actions: Vec<usize>,
    pub converged_at: Option<u64>,
}

pub fn run_dir(batch: &Path, run: usize) -> PathBuf {
    batch.join(format!("run-{run:03}"))
}

pub fn seller_table_file(seller: usize) -> String {
    format!("qtable-seller-{}.csv", seller + 1)
}

pub const RECOMMENDER_TABLE_FILE: &str = "qtable-recommender.csv";

/// Runs every seed of `config`, writing results under `dir`.
///
/// Runs that finish are persisted even when another run fails; the error names the failed runs.
pub fn run_batch(config: &ScenarioConfig, dir: &Path, options: &BatchOptions) -> anyhow::Result<BatchResult> {
    let game = config.game()?;
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let seeds: Vec<u64> = (0..config.runs as u64).map(|i| run_seed(config.seed, i)).collect();

    std::fs::write(dir.join(CONFIG_FILE), config.render())?;
    write_json(
        &dir.join("provenance.json"),
        &Provenance {
            tool: "collusion",
            version: env!("CARGO_PKG_VERSION"),
            preset: options.preset.as_deref(),
            config_file: options.config_file.as_ref().map(|p| p.display().to_string()),
            rerun: format!("collusion run --config {CONFIG_FILE}"),
            rng: "ChaCha8, stream 0 initial prices, stream 1+i seller i, stream 1+n recommender",
            master_seed: config.seed,
            runs: config.runs,
            run_seeds: seeds.clone(),
            horizon: config.horizon,
            stride: config.stride,
        },
    )?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs.unwrap_or(0))
        .build()?;
    let outcomes: Vec<anyhow::Result<Trace>> = pool.install(|| {
        seeds
            .par_iter()
            .enumerate()
            .map(|(run, &seed)| {
                let trace = run_game(&game, seed)?;
                persist_run(&run_dir(dir, run), run, &trace)?;
                Ok(slim(trace))
            })
            .collect()
    });

    let mut traces = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for (run, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(trace) => traces.push(trace),
            Err(e) => failures.push(format!("run {run}: {e:#}")),
        }
    }
    if !failures.is_empty() {
        return Err(anyhow!("{} of {} runs failed\n{}", failures.len(), config.runs, failures.join("\n")));
    }

    let window = MOVING_AVERAGE_WINDOW as usize;
    let stats = (0..game.params.n_products())
        .map(|s| summarize_seller(&traces, s, window))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<RunRow> = traces
        .iter()
        .enumerate()
        .map(|(run, trace)| {
            let (prices, profits) = (0..trace.n_products).map(|s| trace.tail_means(s)).unzip();
            RunRow {
                run,
                seed: trace.seed,
                mean_prices: prices,
                mean_profits: profits,
                converged_at: trace.converged_at,
                final_state: trace.final_state,
            }
        })
        .collect();
    let summary = BatchSummary {
        scenario: config.name.clone(),
        policy: config.policy,
        personalized: config.personalized,
        runs: config.runs,
        seed: config.seed,
        horizon: config.horizon,
        tail_periods: stats[0].tail_periods,
        moving_average_window: MOVING_AVERAGE_WINDOW,
        sellers: stats.iter().map(SellerSummary::from).collect(),
    };

    write_runs_csv(&dir.join("runs.csv"), &rows)?;
    write_json(&dir.join(SUMMARY_FILE), &summary)?;
    let mut out = create(&dir.join("moving_average.csv"))?;
    writeln!(out, "t,mean,min,max")?;
    for p in &stats[0].moving_average {
        writeln!(out, "{},{},{},{}", p.t, num(p.mean), num(p.min), num(p.max))?;
    }
    out.flush()?;

    Ok(BatchResult {
        dir: dir.to_path_buf(),
        summary,
        rows,
        moving_average: stats[0].moving_average.clone(),
    })
}

fn persist_run(dir: &Path, run: usize, trace: &Trace) -> anyhow::Result<()> {
    write_records(&dir.join("trace.csv"), trace, &trace.records)?;
    write_records(&dir.join("tail.csv"), trace, &trace.tail)?;
    for (i, table) in trace.seller_tables.iter().enumerate() {
        let mut out = create(&dir.join(seller_table_file(i)))?;
        table.write_csv(&mut out)?;
        out.flush()?;
    }
    if let Some(table) = &trace.recommender_table {
        let mut out = create(&dir.join(RECOMMENDER_TABLE_FILE))?;
        table.write_csv(&mut out)?;
        out.flush()?;
    }
    let codec = trace.seller_tables[0].codec();
    write_json(
        &dir.join(STATE_FILE),
        &RunState {
            run,
            seed: trace.seed,
            final_state: trace.final_state,
            final_actions: codec.decode(trace.final_state),
            converged_at: trace.converged_at,
        },
    )
}

/// Drops everything the batch summary does not read once a run is on disk.
fn slim(mut trace: Trace) -> Trace {
    trace.seller_tables = Vec::new();
    trace.recommender_table = None;
    for rec in &mut trace.records {
        rec.actions = Vec::new();
        rec.exposure = Vec::new();
        rec.profits = Vec::new();
    }
    trace.records.shrink_to_fit();
    trace
}

fn write_runs_csv(path: &Path, rows: &[RunRow]) -> anyhow::Result<()> {
    let mut out = create(path)?;
    let n = rows.first().map_or(0, |r| r.mean_prices.len());
    let mut header = vec!["run".to_string(), "seed".to_string()];
    header.extend((1..=n).map(|i| format!("mean_price_{i}")));
    header.extend((1..=n).map(|i| format!("mean_profit_{i}")));
    header.push("converged_at".into());
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let mut line = format!("{},{}", row.run, row.seed);
        for &v in row.mean_prices.iter().chain(&row.mean_profits) {
            line.push(',');
            line.push_str(&num(v));
        }
        line.push(',');
        if let Some(t) = row.converged_at {
            line.push_str(&t.to_string());
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn load_summary(dir: &Path) -> anyhow::Result<BatchSummary> {
    let path = dir.join(SUMMARY_FILE);
    let text = std::fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("corrupt {}", path.display()))
}
