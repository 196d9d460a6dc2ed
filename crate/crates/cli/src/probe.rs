//! Deviation probe on the tables a finished run left on disk.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use collusion::{deviation_probe, Deviation, Probe, ProbeEnv, Table};
use serde::Serialize;

use crate::batch::{seller_table_file, RunState, CONFIG_FILE, RECOMMENDER_TABLE_FILE, STATE_FILE};
use crate::config::ScenarioConfig;
use crate::output::{write_json, write_probe};

pub const DEFAULT_PROBE_HORIZON: usize = 10;

#[derive(Clone, Debug)]
pub struct ProbeOptions {
    /// A `run-NNN` directory written by `run`.
    pub run_dir: PathBuf,
    /// Scenario of the run; read from the batch directory when absent.
    pub config: Option<ScenarioConfig>,
    /// Zero-based deviating seller.
    pub seller: usize,
    /// Grid index the deviator is forced to; the lowest price when absent.
    pub action: Option<usize>,
    pub horizon: usize,
    /// Trajectory CSV path; `probe.csv` in the run directory when absent.
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ProbeProvenance {
    run_dir: String,
    seller: usize,
    action: usize,
    price: f64,
    horizon: usize,
    start_state: usize,
    attractor: Vec<Vec<usize>>,
}

/// Loaded tables and the scenario they belong to.
pub struct RunTables {
    pub config: ScenarioConfig,
    pub sellers: Vec<Table>,
    pub recommender: Option<Table>,
    pub state: RunState,
}

fn read_table(path: &Path, codec: collusion::StateCodec, actions: usize) -> anyhow::Result<Table> {
    let file = File::open(path).with_context(|| format!("missing table {}", path.display()))?;
    Table::read_csv(BufReader::new(file), codec, actions).with_context(|| format!("corrupt table {}", path.display()))
}

pub fn load_run(run_dir: &Path, config: Option<ScenarioConfig>) -> anyhow::Result<RunTables> {
    let config = match config {
        Some(c) => c,
        None => {
            let batch = run_dir
                .parent()
                .with_context(|| format!("{} has no batch directory", run_dir.display()))?;
            ScenarioConfig::load(&batch.join(CONFIG_FILE))?
        }
    };
    let game = config.game()?;
    let codec = game.codec()?;
    let sellers = (0..game.params.n_products())
        .map(|i| read_table(&run_dir.join(seller_table_file(i)), codec, game.agent.n_actions()))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let recommender = if game.policy.kind.is_learning() {
        let grid = collusion::build_exposure_grid::<f64>(game.exposure_slices, game.catalog.len())?;
        Some(read_table(&run_dir.join(RECOMMENDER_TABLE_FILE), codec, grid.len())?)
    } else {
        None
    };
    let state_path = run_dir.join(STATE_FILE);
    let text = std::fs::read_to_string(&state_path).with_context(|| format!("missing {}", state_path.display()))?;
    let state: RunState = serde_json::from_str(&text).with_context(|| format!("corrupt {}", state_path.display()))?;
    if state.final_state >= codec.n_states() {
        bail!("state {} in {} is out of range", state.final_state, state_path.display());
    }
    Ok(RunTables {
        config,
        sellers,
        recommender,
        state,
    })
}

/// Runs the probe and writes `probe.csv` plus a `probe.json` record of its inputs.
pub fn run_probe(options: &ProbeOptions) -> anyhow::Result<(Probe, PathBuf)> {
    let tables = load_run(&options.run_dir, options.config.clone())?;
    let game = tables.config.game()?;
    let env = ProbeEnv::from_config(&game, tables.recommender)?;
    let action = options.action.unwrap_or(0);
    let deviation = Deviation {
        seller: options.seller,
        action,
    };
    let result = deviation_probe(&env, &tables.sellers, deviation, options.horizon, tables.state.final_state)?;

    let out = options.out.clone().unwrap_or_else(|| options.run_dir.join("probe.csv"));
    write_probe(&out, &result.rows, game.catalog.len(), game.params.n_segments())?;
    let codec = game.codec()?;
    write_json(
        &out.with_extension("json"),
        &ProbeProvenance {
            run_dir: options.run_dir.display().to_string(),
            seller: options.seller + 1,
            action,
            price: game.agent.grid[action],
            horizon: options.horizon,
            start_state: tables.state.final_state,
            attractor: result.attractor.iter().map(|&s| codec.decode(s)).collect(),
        },
    )?;
    Ok((result, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::batch::{run_batch, run_dir, BatchOptions};

    fn batch(name: &str) -> (tempfile::TempDir, ScenarioConfig) {
        let mut config = ScenarioConfig::preset(name).unwrap();
        config.horizon = 20_000;
        config.runs = 1;
        config.agent.decay = 5e-4;
        let dir = tempfile::tempdir().unwrap();
        run_batch(&config, dir.path(), &BatchOptions::default()).unwrap();
        (dir, config)
    }

    #[test]
    fn probe_writes_horizon_plus_one_rows() {
        let (dir, _) = batch("less-exploration-profit");
        let options = ProbeOptions {
            run_dir: run_dir(dir.path(), 0),
            config: None,
            seller: 0,
            action: None,
            horizon: 7,
            out: None,
        };
        let (result, path) = run_probe(&options).unwrap();
        assert_eq!(result.rows.len(), 8);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 9);
        assert!(text.starts_with("time,price_1,price_2,price_3,exposure_1,exposure_2,exposure_3,profit_1"));
        assert!(path.with_extension("json").exists());
    }

    #[test]
    fn null_deviation_keeps_the_equilibrium() {
        let (dir, config) = batch("less-exploration-demand");
        let run = run_dir(dir.path(), 0);
        let loaded = load_run(&run, Some(config)).unwrap();
        let attractor = collusion::find_attractor(&loaded.sellers, loaded.state.final_state).unwrap();
        let codec = loaded.sellers[0].codec();
        let cycle = |t: usize| codec.decode(attractor[t % attractor.len()]);
        // Forcing the action seller 1 would pick anyway.
        let own = cycle(1)[0];
        let options = ProbeOptions {
            run_dir: run,
            config: None,
            seller: 0,
            action: Some(own),
            horizon: 5,
            out: Some(dir.path().join("null.csv")),
        };
        let (result, _) = run_probe(&options).unwrap();
        for (t, row) in result.rows.iter().enumerate() {
            assert_eq!(row.actions, cycle(t));
        }
    }

    #[test]
    fn learning_recommender_probe_reads_its_table() {
        let (dir, _) = batch("qrs-profit");
        let options = ProbeOptions {
            run_dir: run_dir(dir.path(), 0),
            config: None,
            seller: 1,
            action: Some(3),
            horizon: 4,
            out: None,
        };
        let (result, _) = run_probe(&options).unwrap();
        assert_eq!(result.rows[1].actions[1], 3);
    }

    #[test]
    fn missing_tables_are_reported() {
        let (dir, _) = batch("less-exploration-equal");
        let run = run_dir(dir.path(), 0);
        std::fs::remove_file(run.join(seller_table_file(2))).unwrap();
        let options = ProbeOptions {
            run_dir: run,
            config: None,
            seller: 0,
            action: None,
            horizon: 3,
            out: None,
        };
        let err = run_probe(&options).err().unwrap();
        assert!(format!("{err:#}").contains("qtable-seller-3.csv"));
    }
}
