//! The repeated pricing game.
//!
//! Each period: sellers pick prices epsilon-greedily from their tables, the platform allocates
//! exposure for the posted prices, demand and profit are realized, and every seller updates
//! the one cell it just used. With the learning recommender, the platform updates its own
//! previous cell before acting and receives the aggregate profit or demand afterwards.

use rand_chacha::ChaCha8Rng;

use crate::agent::{epsilon, init_qtable, q_update, select_action, AgentConfig};
use crate::error::{Error, Result};
use crate::market::{check_dimensions, market_outcome_into, Attraction, BundleCatalog, DemandProfile, ExposureAllocation, MarketParams};
use crate::qtable::{QTable, StateCodec};
use crate::recommender::{build_exposure_grid, omniscient_into, Objective, Policy, PolicyKind, QRecState};
use crate::rng;
use crate::scalar::Scalar;

/// Number of final periods always kept unstrided.
pub const TAIL_PERIODS: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct GameConfig<T> {
    pub params: MarketParams<T>,
    pub catalog: BundleCatalog,
    pub agent: AgentConfig<T>,
    pub policy: Policy,
    /// Periods to simulate.
    pub horizon: u64,
    /// Master seed of a batch; individual runs get seeds from [`rng::run_seed`].
    pub seed: u64,
    /// Keep every `stride`-th period (starting with period 1) in the thinned trace.
    pub stride: u64,
    /// Exposure slices for the learning recommender's action grid.
    pub exposure_slices: usize,
    /// Length of the greedy-policy stability window reported as convergence, if any.
    pub convergence_window: Option<u64>,
}

impl<T: Scalar> GameConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::input("horizon must be at least one period"));
        }
        if self.stride == 0 {
            return Err(Error::input("record stride must be at least 1"));
        }
        if self.convergence_window == Some(0) {
            return Err(Error::input("convergence window must be at least 1"));
        }
        let probe = ExposureAllocation::<T>::uniform(self.catalog.len(), self.params.n_segments());
        check_dimensions(&self.params, &self.catalog, &probe)?;
        self.policy.validate(self.params.n_segments())?;
        if self.policy.kind.is_learning() {
            build_exposure_grid::<T>(self.exposure_slices, self.catalog.len())?;
        }
        StateCodec::new(self.agent.n_actions(), self.params.n_products())?;
        Ok(())
    }

    pub fn codec(&self) -> Result<StateCodec> {
        StateCodec::new(self.agent.n_actions(), self.params.n_products())
    }
}

/// One recorded period.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodRecord<T> {
    pub t: u64,
    /// Grid index chosen by each seller.
    pub actions: Vec<usize>,
    pub prices: Vec<T>,
    /// Exposure weights, segment-major.
    pub exposure: Vec<T>,
    pub profits: Vec<T>,
    pub epsilon: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace<T> {
    pub seed: u64,
    pub horizon: u64,
    pub stride: u64,
    pub n_products: usize,
    pub n_bundles: usize,
    pub n_segments: usize,
    /// Periods 1, 1 + stride, 1 + 2 stride, ...
    pub records: Vec<PeriodRecord<T>>,
    /// The final `min(TAIL_PERIODS, horizon)` periods, unstrided.
    pub tail: Vec<PeriodRecord<T>>,
    pub seller_tables: Vec<QTable<T>>,
    pub recommender_table: Option<QTable<T>>,
    /// Price state after the last period.
    pub final_state: usize,
    /// First period at which the greedy policies had been stable for the configured window.
    pub converged_at: Option<u64>,
}

impl<T: Scalar> RunTrace<T> {
    /// Mean price and mean profit of `seller` over the tail.
    pub fn tail_means(&self, seller: usize) -> (T, T) {
        let len = T::from_usize_lossy(self.tail.len().max(1));
        let (p, r) = self.tail.iter().fold((T::zero(), T::zero()), |(p, r), rec| {
            (p + rec.prices[seller], r + rec.profits[seller])
        });
        (p / len, r / len)
    }
}

enum Exposure<T> {
    Fixed,
    Omniscient { objective: Objective, personalized: bool, scratch: Vec<T> },
    Learning { state: Box<QRecState<T>>, rng: ChaCha8Rng },
}

/// Plays one seeded run of `config`.
pub fn run_game<T: Scalar>(config: &GameConfig<T>, seed: u64) -> Result<RunTrace<T>> {
    config.validate()?;
    let params = &config.params;
    let catalog = &config.catalog;
    let agent = &config.agent;
    let n = params.n_products();
    let m = catalog.len();
    let n_segments = params.n_segments();
    let k = agent.n_actions();
    let codec = config.codec()?;

    let mut tables = (0..n)
        .map(|i| init_qtable(agent, params, catalog, i))
        .collect::<Result<Vec<_>>>()?;
    let mut seller_rngs: Vec<ChaCha8Rng> = (0..n).map(|i| rng::stream(seed, rng::seller_stream(i))).collect();

    // Logit numerators for every (product, grid price) pair.
    let attraction_table: Vec<Vec<T>> = (0..n)
        .map(|i| agent.grid.iter().map(|&p| params.product_attraction(i, p)).collect())
        .collect::<Result<_>>()?;
    let mut att = Attraction {
        product: vec![T::zero(); n],
        outside: (0..n_segments)
            .map(|s| params.outside_attraction(s))
            .collect::<Result<_>>()?,
    };

    let mut exposure = ExposureAllocation::uniform(m, n_segments);
    let mut policy = match config.policy.kind {
        PolicyKind::EqualExposure => Exposure::Fixed,
        PolicyKind::ProfitBased | PolicyKind::DemandBased => Exposure::Omniscient {
            objective: config.policy.kind.objective().expect("omniscient kinds have an objective"),
            personalized: config.policy.personalized,
            scratch: Vec::with_capacity(m),
        },
        PolicyKind::QLearningProfit | PolicyKind::QLearningDemand => Exposure::Learning {
            state: Box::new(QRecState::new(
                codec,
                build_exposure_grid(config.exposure_slices, m)?,
                config.policy.kind.objective().expect("learning kinds have an objective"),
            )),
            rng: rng::stream(seed, rng::recommender_stream(n)),
        },
    };

    let mut init_rng = rng::stream(seed, rng::INIT_STREAM);
    let initial: Vec<usize> = (0..n)
        .map(|_| rand::Rng::random_range(&mut init_rng, 0..k as u32) as usize)
        .collect();
    let mut state = codec.encode(&initial);

    let tail_len = TAIL_PERIODS.min(config.horizon as usize);
    let tail_start = config.horizon - tail_len as u64 + 1;
    let mut records = Vec::with_capacity((config.horizon / config.stride + 1) as usize);
    let mut tail = Vec::with_capacity(tail_len);
    let mut actions = vec![0usize; n];
    let mut prices = vec![T::zero(); n];
    let mut outcome = DemandProfile::zeroed(n, m, n_segments);

    let mut stable_for: u64 = 0;
    let mut converged_at = None;

    for t in 1..=config.horizon {
        let eps = epsilon(agent.decay, t);
        for i in 0..n {
            let a = select_action(&tables[i], state, eps, &mut seller_rngs[i]);
            actions[i] = a;
            prices[i] = agent.grid[a];
            att.product[i] = attraction_table[i][a];
        }
        let next_state = codec.encode(&actions);

        match &mut policy {
            Exposure::Fixed => {}
            Exposure::Omniscient {
                objective,
                personalized,
                scratch,
            } => omniscient_into(params, catalog, &att, &prices, *objective, *personalized, scratch, &mut exposure),
            Exposure::Learning { state: rec, rng } => {
                let a = rec.step(next_state, eps, rng, agent)?;
                let weights = rec.grid().action(a);
                for s in 0..n_segments {
                    for (j, &w) in weights.iter().enumerate() {
                        exposure.segment_mut(s)[j] = w;
                    }
                }
            }
        }

        market_outcome_into(params, catalog, &att, &prices, &exposure, &mut outcome);

        if let Exposure::Learning { state: rec, .. } = &mut policy {
            let reward = match rec.objective() {
                Objective::Profit => outcome.total_profit(),
                Objective::Demand => outcome.total_demand(),
            };
            rec.supply_reward(reward)?;
        }

        let mut greedy_changed = false;
        for i in 0..n {
            let before = config.convergence_window.map(|_| tables[i].argmax(state));
            q_update(&mut tables[i], state, actions[i], outcome.profit[i], next_state, agent)?;
            if let Some(before) = before {
                greedy_changed |= tables[i].argmax(state) != before;
            }
        }
        if let Some(window) = config.convergence_window {
            stable_for = if greedy_changed { 0 } else { stable_for + 1 };
            if converged_at.is_none() && stable_for >= window {
                converged_at = Some(t);
            }
        }

        let strided = (t - 1) % config.stride == 0;
        if strided || t >= tail_start {
            let record = PeriodRecord {
                t,
                actions: actions.clone(),
                prices: prices.clone(),
                exposure: exposure.as_flat().to_vec(),
                profits: outcome.profit.clone(),
                epsilon: eps,
            };
            if t >= tail_start {
                tail.push(record.clone());
            }
            if strided {
                records.push(record);
            }
        }
        state = next_state;
    }

    let recommender_table = match policy {
        Exposure::Learning { state, .. } => Some(state.into_table()),
        _ => None,
    };
    Ok(RunTrace {
        seed,
        horizon: config.horizon,
        stride: config.stride,
        n_products: n,
        n_bundles: m,
        n_segments,
        records,
        tail,
        seller_tables: tables,
        recommender_table,
        final_state: state,
        converged_at,
    })
}

/// Whether the last `window` entries of a per-period "some greedy action changed" series are
/// all false. A series shorter than the window never counts as converged.
pub fn detect_convergence(greedy_changes: &[bool], window: usize) -> bool {
    window >= 1 && greedy_changes.len() >= window && greedy_changes[greedy_changes.len() - window..].iter().all(|c| !c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::InitMode;
    use crate::equilibrium::build_action_grid;

    pub(crate) fn small_config(kind: PolicyKind, horizon: u64) -> GameConfig<f64> {
        GameConfig {
            params: MarketParams::baseline(),
            catalog: BundleCatalog::baseline(),
            agent: AgentConfig::new(0.15, 0.95, 1e-3, build_action_grid(1.47, 1.92, 11).unwrap(), InitMode::Zero)
                .unwrap(),
            policy: Policy::new(kind),
            horizon,
            seed: 1,
            stride: 1,
            exposure_slices: 9,
            convergence_window: None,
        }
    }

    #[test]
    fn convergence_rule() {
        assert!(detect_convergence(&[true, false, false, false], 3));
        assert!(!detect_convergence(&[false, false, true], 2));
        assert!(!detect_convergence(&[false, false], 3));
    }

    #[test]
    fn no_exploration_stays_at_lowest_price() {
        let mut cfg = small_config(PolicyKind::EqualExposure, 200);
        cfg.agent.decay = 1e3;
        let trace = run_game(&cfg, 5).unwrap();
        for rec in &trace.records {
            assert_eq!(rec.actions, vec![0, 0, 0]);
            assert_eq!(rec.prices, vec![1.47; 3]);
        }
    }

    #[test]
    fn single_period_touches_one_cell_per_seller() {
        // Equal exposure guarantees every seller a positive reward.
        let cfg = small_config(PolicyKind::EqualExposure, 1);
        let trace = run_game(&cfg, 3).unwrap();
        assert_eq!(trace.records.len(), 1);
        assert_eq!(trace.tail.len(), 1);
        for q in &trace.seller_tables {
            assert_eq!(q.as_slice().iter().filter(|&&v| v != 0.0).count(), 1);
        }
    }

    #[test]
    fn runs_are_reproducible() {
        for kind in [PolicyKind::DemandBased, PolicyKind::QLearningProfit] {
            let cfg = small_config(kind, 3000);
            assert_eq!(run_game(&cfg, 11).unwrap(), run_game(&cfg, 11).unwrap());
            assert_ne!(run_game(&cfg, 11).unwrap().records, run_game(&cfg, 12).unwrap().records);
        }
    }

    #[test]
    fn stride_and_tail_sizes() {
        let mut cfg = small_config(PolicyKind::EqualExposure, 2500);
        cfg.stride = 100;
        let trace = run_game(&cfg, 1).unwrap();
        assert_eq!(trace.records.len(), 25);
        assert_eq!(trace.records[1].t, 101);
        assert_eq!(trace.tail.len(), TAIL_PERIODS);
        assert_eq!(trace.tail[0].t, 1501);
        assert_eq!(trace.tail.last().unwrap().t, 2500);
    }

    #[test]
    fn convergence_is_reported() {
        let mut cfg = small_config(PolicyKind::ProfitBased, 20_000);
        cfg.agent.decay = 1e-3;
        cfg.convergence_window = Some(500);
        let trace = run_game(&cfg, 2).unwrap();
        assert!(trace.converged_at.is_some());
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut cfg = small_config(PolicyKind::EqualExposure, 0);
        assert!(run_game(&cfg, 0).is_err());
        cfg.horizon = 10;
        cfg.stride = 0;
        assert!(run_game(&cfg, 0).is_err());
        let mut cfg = small_config(PolicyKind::QLearningProfit, 10);
        cfg.params = MarketParams::two_segment();
        assert!(matches!(run_game(&cfg, 0), Err(Error::Unsupported(_))));
    }
}
