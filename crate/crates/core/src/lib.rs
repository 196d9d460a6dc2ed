//! Repeated Bertrand pricing among tabular Q-learning sellers whose products reach consumers
//! through a platform recommender.
//!
//! The numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases below fix the
//! double-precision types used by the command-line tools.

pub mod agent;
pub mod engine;
pub mod equilibrium;
pub mod error;
pub mod market;
pub mod probe;
pub mod qtable;
pub mod recommender;
pub mod rng;
pub mod scalar;
pub mod stats;

pub use agent::{epsilon, init_qtable, q_update, select_action, AgentConfig, InitMode};
pub use engine::{detect_convergence, run_game, GameConfig, PeriodRecord, RunTrace, TAIL_PERIODS};
pub use equilibrium::{build_action_grid, round_to_cents, solve_monopoly_price, solve_nash_price};
pub use error::{Error, Result};
pub use market::{
    bundle_objective, bundle_shares, market_outcome, BundleCatalog, DemandProfile, ExposureAllocation, MarketParams,
    PriceVector, Segment,
};
pub use probe::{deviation_probe, find_attractor, Deviation, ProbeEnv, ProbeResult, ProbeRow};
pub use qtable::{QTable, StateCodec};
pub use recommender::{
    allocate_equal, allocate_omniscient, build_exposure_grid, ExposureActionGrid, Objective, Policy, PolicyKind,
    QRecState,
};
pub use scalar::Scalar;
pub use stats::{summarize, summarize_seller, SummaryStats, WindowPoint};

pub type Market = MarketParams<f64>;
pub type Prices = PriceVector<f64>;
pub type Exposure = ExposureAllocation<f64>;
pub type Demand = DemandProfile<f64>;
pub type Table = QTable<f64>;
pub type Agent = AgentConfig<f64>;
pub type Game = GameConfig<f64>;
pub type Trace = RunTrace<f64>;
pub type Summary = SummaryStats<f64>;
pub type Probe = ProbeResult<f64>;
