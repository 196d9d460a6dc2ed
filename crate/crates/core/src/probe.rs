//! Deviation-punishment probe on frozen, converged tables.
//!
//! Sellers play greedily from their learned tables with no further updates. The probe first
//! settles into the greedy attractor (a fixed point or short cycle of price states), then
//! forces one seller to a chosen price for a single period and records how prices and
//! exposure evolve afterwards.

use std::collections::HashMap;

use crate::engine::GameConfig;
use crate::error::{Error, Result};
use crate::market::{market_outcome, BundleCatalog, ExposureAllocation, MarketParams, PriceVector};
use crate::qtable::{QTable, StateCodec};
use crate::recommender::{allocate_omniscient, build_exposure_grid, ExposureActionGrid, Policy, PolicyKind};
use crate::scalar::Scalar;

/// Greedy steps allowed before an attractor must have been reached.
pub const SETTLE_CAP: usize = 1000;
/// Longest greedy cycle accepted as an equilibrium.
pub const MAX_CYCLE: usize = 100;

/// Everything the probe needs besides the seller tables.
#[derive(Clone, Debug)]
pub struct ProbeEnv<T> {
    pub params: MarketParams<T>,
    pub catalog: BundleCatalog,
    pub grid: Vec<T>,
    pub policy: Policy,
    /// Frozen recommender table and its exposure grid, for the learning policies.
    pub recommender: Option<(QTable<T>, ExposureActionGrid<T>)>,
}

impl<T: Scalar> ProbeEnv<T> {
    pub fn from_config(config: &GameConfig<T>, recommender_table: Option<QTable<T>>) -> Result<Self> {
        config.validate()?;
        let recommender = match (config.policy.kind.is_learning(), recommender_table) {
            (true, Some(table)) => {
                let grid = build_exposure_grid(config.exposure_slices, config.catalog.len())?;
                if table.n_actions() != grid.len() {
                    return Err(Error::input("recommender table does not match the exposure grid"));
                }
                Some((table, grid))
            }
            (true, None) => return Err(Error::input("learning recommender probe needs its table")),
            (false, _) => None,
        };
        Ok(ProbeEnv {
            params: config.params.clone(),
            catalog: config.catalog.clone(),
            grid: config.agent.grid.clone(),
            policy: config.policy,
            recommender,
        })
    }

    fn exposure(&self, prices: &PriceVector<T>, state: usize) -> Result<ExposureAllocation<T>> {
        let segments = self.params.n_segments();
        match self.policy.kind {
            PolicyKind::EqualExposure => Ok(ExposureAllocation::uniform(self.catalog.len(), segments)),
            PolicyKind::ProfitBased | PolicyKind::DemandBased => allocate_omniscient(
                &self.params,
                &self.catalog,
                prices,
                self.policy.kind.objective().expect("omniscient kinds have an objective"),
                self.policy.personalized,
            ),
            PolicyKind::QLearningProfit | PolicyKind::QLearningDemand => {
                let (table, grid) = self
                    .recommender
                    .as_ref()
                    .ok_or_else(|| Error::input("learning recommender probe needs its table"))?;
                ExposureAllocation::replicated(grid.action(table.argmax(state)), segments)
            }
        }
    }
}

/// Forces `seller` to grid index `action` at Time 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Deviation {
    pub seller: usize,
    pub action: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRow<T> {
    pub time: usize,
    pub actions: Vec<usize>,
    pub prices: Vec<T>,
    /// Segment-major exposure weights.
    pub exposure: Vec<T>,
    pub profits: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeResult<T> {
    /// States of the pre-deviation greedy cycle, starting with the Time 0 state.
    pub attractor: Vec<usize>,
    /// Rows for Time 0 (equilibrium) through Time `horizon`.
    pub rows: Vec<ProbeRow<T>>,
}

impl<T: Scalar> ProbeResult<T> {
    /// Whether the price state at `time` belongs to the pre-deviation attractor.
    pub fn in_attractor(&self, codec: &StateCodec, time: usize) -> bool {
        self.rows
            .get(time)
            .is_some_and(|row| self.attractor.contains(&codec.encode(&row.actions)))
    }
}

fn greedy_state<T: Scalar>(tables: &[QTable<T>], codec: &StateCodec, state: usize, actions: &mut [usize]) -> usize {
    for (slot, q) in actions.iter_mut().zip(tables) {
        *slot = q.argmax(state);
    }
    codec.encode(actions)
}

/// Greedy cycle reached from `start`, beginning at its first state.
pub fn find_attractor<T: Scalar>(tables: &[QTable<T>], start: usize) -> Result<Vec<usize>> {
    let codec = check_tables(tables)?;
    if start >= codec.n_states() {
        return Err(Error::input(format!("start state {start} out of range")));
    }
    let mut visited: HashMap<usize, usize> = HashMap::new();
    let mut path = vec![start];
    visited.insert(start, 0);
    let mut actions = vec![0; tables.len()];
    let mut state = start;
    for step in 1..=SETTLE_CAP {
        state = greedy_state(tables, &codec, state, &mut actions);
        if let Some(&first) = visited.get(&state) {
            let cycle = path[first..].to_vec();
            if cycle.len() > MAX_CYCLE {
                return Err(Error::Probe(format!(
                    "greedy play cycles with period {} > {MAX_CYCLE}",
                    cycle.len()
                )));
            }
            return Ok(cycle);
        }
        visited.insert(state, step);
        path.push(state);
    }
    Err(Error::Probe(format!("greedy play did not settle within {SETTLE_CAP} periods")))
}

fn check_tables<T: Scalar>(tables: &[QTable<T>]) -> Result<StateCodec> {
    let first = tables.first().ok_or_else(|| Error::input("no seller tables"))?;
    let codec = *first.codec();
    if codec.n_agents() != tables.len() {
        return Err(Error::input(format!(
            "tables encode {} sellers but {} tables were given",
            codec.n_agents(),
            tables.len()
        )));
    }
    if tables.iter().any(|q| *q.codec() != codec || q.n_actions() != codec.n_actions()) {
        return Err(Error::input("seller tables have inconsistent shapes"));
    }
    Ok(codec)
}

/// Runs the probe for `horizon` periods after Time 0, starting the settling phase at `start`.
pub fn deviation_probe<T: Scalar>(
    env: &ProbeEnv<T>,
    tables: &[QTable<T>],
    deviation: Deviation,
    horizon: usize,
    start: usize,
) -> Result<ProbeResult<T>> {
    let codec = check_tables(tables)?;
    if codec.n_agents() != env.params.n_products() || codec.n_actions() != env.grid.len() {
        return Err(Error::input("tables do not match the market and price grid"));
    }
    if deviation.seller >= tables.len() || deviation.action >= env.grid.len() {
        return Err(Error::input(format!("deviation {deviation:?} out of range")));
    }
    let attractor = find_attractor(tables, start)?;

    let mut rows = Vec::with_capacity(horizon + 1);
    let mut actions = codec.decode(attractor[0]);
    let mut state = attractor[0];
    rows.push(row(env, &codec, 0, &actions)?);
    for time in 1..=horizon {
        state = greedy_state(tables, &codec, state, &mut actions);
        if time == 1 {
            actions[deviation.seller] = deviation.action;
            state = codec.encode(&actions);
        }
        rows.push(row(env, &codec, time, &actions)?);
    }
    Ok(ProbeResult { attractor, rows })
}

fn row<T: Scalar>(env: &ProbeEnv<T>, codec: &StateCodec, time: usize, actions: &[usize]) -> Result<ProbeRow<T>> {
    let prices = PriceVector::new(actions.iter().map(|&a| env.grid[a]).collect())?;
    let exposure = env.exposure(&prices, codec.encode(actions))?;
    let outcome = market_outcome(&env.params, &env.catalog, &prices, &exposure)?;
    Ok(ProbeRow {
        time,
        actions: actions.to_vec(),
        prices: prices.into_inner(),
        exposure: exposure.as_flat().to_vec(),
        profits: outcome.profit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::build_action_grid;

    fn env(kind: PolicyKind) -> ProbeEnv<f64> {
        ProbeEnv {
            params: MarketParams::baseline(),
            catalog: BundleCatalog::baseline(),
            grid: build_action_grid(1.47, 1.92, 11).unwrap(),
            policy: Policy::new(kind),
            recommender: None,
        }
    }

    /// Tables whose greedy action is always `target` regardless of state.
    fn constant_tables(target: usize) -> Vec<QTable<f64>> {
        let codec = StateCodec::new(11, 3).unwrap();
        (0..3)
            .map(|_| {
                let mut q = QTable::zeros(codec, 11);
                for s in 0..codec.n_states() {
                    q.set(s, target, 1.0);
                }
                q
            })
            .collect()
    }

    #[test]
    fn null_deviation_is_constant() {
        let tables = constant_tables(10);
        let result = deviation_probe(&env(PolicyKind::ProfitBased), &tables, Deviation { seller: 0, action: 10 }, 5, 0)
            .unwrap();
        assert_eq!(result.rows.len(), 6);
        assert_eq!(result.attractor.len(), 1);
        for r in &result.rows {
            assert_eq!(r.actions, result.rows[0].actions);
            assert_eq!(r.exposure, result.rows[0].exposure);
            assert_eq!(r.profits, result.rows[0].profits);
        }
    }

    #[test]
    fn undercut_loses_exposure_under_profit_policy() {
        let tables = constant_tables(10);
        let result = deviation_probe(&env(PolicyKind::ProfitBased), &tables, Deviation { seller: 0, action: 0 }, 3, 0)
            .unwrap();
        let t1 = &result.rows[1];
        assert_eq!(t1.prices, vec![1.47, 1.92, 1.92]);
        // Bundle {1,2} (the only one without the deviator) strictly wins the profit argmax.
        let direct = allocate_omniscient(
            &MarketParams::baseline(),
            &BundleCatalog::baseline(),
            &PriceVector::new(t1.prices.clone()).unwrap(),
            crate::recommender::Objective::Profit,
            false,
        )
        .unwrap();
        assert_eq!(t1.exposure, direct.as_flat());
        assert_eq!(t1.exposure, vec![0.0, 0.0, 1.0]);
        let codec = StateCodec::new(11, 3).unwrap();
        assert!(result.in_attractor(&codec, 2));
    }

    #[test]
    fn long_cycles_rejected() {
        // Seller 0 cycles through all 11 prices; others fixed: cycle length 11 is fine.
        let codec = StateCodec::new(11, 3).unwrap();
        let mut tables = constant_tables(0);
        let mut q = QTable::zeros(codec, 11);
        for s in 0..codec.n_states() {
            let own = codec.decode(s)[0];
            q.set(s, (own + 1) % 11, 1.0);
        }
        tables[0] = q;
        let attractor = find_attractor(&tables, 0).unwrap();
        assert_eq!(attractor.len(), 11);
    }

    #[test]
    fn bad_inputs() {
        let tables = constant_tables(3);
        assert!(deviation_probe(&env(PolicyKind::EqualExposure), &tables, Deviation { seller: 3, action: 0 }, 2, 0).is_err());
        assert!(deviation_probe(&env(PolicyKind::EqualExposure), &tables[..2], Deviation { seller: 0, action: 0 }, 2, 0).is_err());
    }
}
