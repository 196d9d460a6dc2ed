//! Platform exposure policies.
//!
//! The omniscient policies evaluate every bundle as if it were shown to the whole population
//! (or to a whole segment, when personalized), keep the bundles whose objective equals the
//! maximum, and split exposure evenly among them. Ties are detected with exact float
//! equality, so symmetric price vectors produce exact multi-way ties.
//!
//! The learning recommender instead picks one of a fixed set of exposure vectors with its own
//! Q-table over the sellers' price states. Because the consequences of an allocation are only
//! observed once sellers post their next prices, each period it first updates the cell of the
//! previous (state, allocation) pair and then acts.

use rand::Rng;

use crate::agent::{q_update, select_action, AgentConfig};
use crate::error::{Error, Result};
use crate::market::{bundle_objective_with, check_dimensions, Attraction, BundleCatalog, ExposureAllocation, MarketParams, PriceVector};
use crate::qtable::{QTable, StateCodec};
use crate::scalar::Scalar;

/// What the platform maximizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Total seller profit.
    Profit,
    /// Total units sold.
    Demand,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    EqualExposure,
    ProfitBased,
    DemandBased,
    QLearningProfit,
    QLearningDemand,
}

impl PolicyKind {
    pub fn objective(self) -> Option<Objective> {
        match self {
            PolicyKind::EqualExposure => None,
            PolicyKind::ProfitBased | PolicyKind::QLearningProfit => Some(Objective::Profit),
            PolicyKind::DemandBased | PolicyKind::QLearningDemand => Some(Objective::Demand),
        }
    }

    pub fn is_learning(self) -> bool {
        matches!(self, PolicyKind::QLearningProfit | PolicyKind::QLearningDemand)
    }

    pub fn is_omniscient(self) -> bool {
        matches!(self, PolicyKind::ProfitBased | PolicyKind::DemandBased)
    }
}

/// A recommender policy choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Policy {
    pub kind: PolicyKind,
    /// Optimize each consumer segment separately (omniscient kinds only).
    pub personalized: bool,
}

impl Policy {
    pub fn new(kind: PolicyKind) -> Self {
        Policy {
            kind,
            personalized: false,
        }
    }

    pub fn personalized(kind: PolicyKind) -> Self {
        Policy {
            kind,
            personalized: true,
        }
    }

    /// Checks the policy against the market it will run in.
    pub fn validate(&self, n_segments: usize) -> Result<()> {
        if self.personalized {
            if !self.kind.is_omniscient() {
                return Err(Error::Unsupported(format!(
                    "personalization is only defined for profit- and demand-based policies, not {:?}",
                    self.kind
                )));
            }
            if n_segments < 2 {
                return Err(Error::Unsupported(
                    "personalization requires at least two consumer segments".into(),
                ));
            }
        }
        if self.kind.is_learning() && n_segments != 1 {
            return Err(Error::Unsupported(
                "the learning recommender is defined for a single consumer segment".into(),
            ));
        }
        Ok(())
    }
}

/// `1/m` exposure for each of `m` bundles, single segment.
pub fn allocate_equal<T: Scalar>(m: usize) -> Result<ExposureAllocation<T>> {
    if m == 0 {
        return Err(Error::input("need at least one bundle"));
    }
    Ok(ExposureAllocation::uniform(m, 1))
}

/// Full-information allocation maximizing total profit or total demand.
pub fn allocate_omniscient<T: Scalar>(
    params: &MarketParams<T>,
    catalog: &BundleCatalog,
    prices: &PriceVector<T>,
    objective: Objective,
    personalized: bool,
) -> Result<ExposureAllocation<T>> {
    if personalized && params.n_segments() < 2 {
        return Err(Error::Unsupported(
            "personalization requires at least two consumer segments".into(),
        ));
    }
    let mut out = ExposureAllocation::zeroed(catalog.len(), params.n_segments());
    check_dimensions(params, catalog, &out)?;
    let att = params.attraction(prices)?;
    let mut scratch = Vec::new();
    omniscient_into(params, catalog, &att, prices.as_slice(), objective, personalized, &mut scratch, &mut out);
    Ok(out)
}

/// Allocation-free core of [`allocate_omniscient`]; `scratch` is reused between calls.
#[allow(clippy::too_many_arguments)]
pub(crate) fn omniscient_into<T: Scalar>(
    params: &MarketParams<T>,
    catalog: &BundleCatalog,
    att: &Attraction<T>,
    prices: &[T],
    objective: Objective,
    personalized: bool,
    scratch: &mut Vec<T>,
    out: &mut ExposureAllocation<T>,
) {
    let m = catalog.len();
    let pick = |(r, d): (T, T)| match objective {
        Objective::Profit => r,
        Objective::Demand => d,
    };
    scratch.clear();
    scratch.resize(m, T::zero());
    if personalized {
        for s in 0..params.n_segments() {
            for (j, bundle) in catalog.bundles().iter().enumerate() {
                scratch[j] = pick(bundle_objective_with(params, att, prices, bundle, s));
            }
            split_among_maxima(scratch, out.segment_mut(s));
        }
    } else {
        for (j, bundle) in catalog.bundles().iter().enumerate() {
            let mut total = T::zero();
            for (s, seg) in params.segments().iter().enumerate() {
                total = total + seg.weight * pick(bundle_objective_with(params, att, prices, bundle, s));
            }
            scratch[j] = total;
        }
        for s in 0..params.n_segments() {
            split_among_maxima(scratch, out.segment_mut(s));
        }
    }
}

/// Writes `1/|argmax set|` for every exactly-maximal entry of `values` and 0 elsewhere.
fn split_among_maxima<T: Scalar>(values: &[T], out: &mut [T]) {
    let max = values.iter().fold(T::neg_infinity(), |a, &v| a.max(v));
    let winners = values.iter().filter(|&&v| v == max).count();
    let share = T::one() / T::from_usize_lossy(winners);
    for (w, &v) in out.iter_mut().zip(values) {
        *w = if v == max { share } else { T::zero() };
    }
}

/// Discrete exposure vectors available to the learning recommender.
#[derive(Clone, Debug, PartialEq)]
pub struct ExposureActionGrid<T> {
    bundles: usize,
    parts: Vec<Vec<usize>>,
    weights: Vec<Vec<T>>,
}

impl<T: Scalar> ExposureActionGrid<T> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn n_bundles(&self) -> usize {
        self.bundles
    }

    /// Exposure weights of action `index`.
    pub fn action(&self, index: usize) -> &[T] {
        &self.weights[index]
    }

    /// Integer segment counts of action `index`.
    pub fn parts(&self, index: usize) -> &[usize] {
        &self.parts[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[T]> {
        self.weights.iter().map(Vec::as_slice)
    }
}

/// Every way to split `segments_total` equal slices of exposure among `m` bundles with each
/// bundle getting at least one, in lexicographic order of the slice counts.
pub fn build_exposure_grid<T: Scalar>(segments_total: usize, m: usize) -> Result<ExposureActionGrid<T>> {
    if m == 0 || segments_total < m {
        return Err(Error::input(format!(
            "cannot split {segments_total} exposure slices among {m} bundles with at least one each"
        )));
    }
    let mut parts = Vec::new();
    let mut current = Vec::with_capacity(m);
    compositions(segments_total, m, &mut current, &mut parts);
    let total = T::from_usize_lossy(segments_total);
    let weights = parts
        .iter()
        .map(|p| p.iter().map(|&c| T::from_usize_lossy(c) / total).collect())
        .collect();
    Ok(ExposureActionGrid {
        bundles: m,
        parts,
        weights,
    })
}

fn compositions(remaining: usize, slots: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if slots == 1 {
        current.push(remaining);
        out.push(current.clone());
        current.pop();
        return;
    }
    for first in 1..=remaining - (slots - 1) {
        current.push(first);
        compositions(remaining - first, slots - 1, current, out);
        current.pop();
    }
}

/// Learning recommender: Q-table over seller price states and its act/reward bookkeeping.
#[derive(Clone, Debug)]
pub struct QRecState<T> {
    table: QTable<T>,
    grid: ExposureActionGrid<T>,
    objective: Objective,
    last_state: Option<usize>,
    last_action: Option<usize>,
    last_reward: Option<T>,
}

impl<T: Scalar> QRecState<T> {
    pub fn new(codec: StateCodec, grid: ExposureActionGrid<T>, objective: Objective) -> Self {
        QRecState {
            table: QTable::zeros(codec, grid.len()),
            grid,
            objective,
            last_state: None,
            last_action: None,
            last_reward: None,
        }
    }

    /// Resumes from an existing table (for example a loaded dump).
    pub fn with_table(table: QTable<T>, grid: ExposureActionGrid<T>, objective: Objective) -> Result<Self> {
        if table.n_actions() != grid.len() {
            return Err(Error::input(format!(
                "recommender table has {} actions, exposure grid has {}",
                table.n_actions(),
                grid.len()
            )));
        }
        Ok(QRecState {
            table,
            grid,
            objective,
            last_state: None,
            last_action: None,
            last_reward: None,
        })
    }

    pub fn table(&self) -> &QTable<T> {
        &self.table
    }

    pub fn into_table(self) -> QTable<T> {
        self.table
    }

    pub fn grid(&self) -> &ExposureActionGrid<T> {
        &self.grid
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn last_action(&self) -> Option<usize> {
        self.last_action
    }

    /// One recommender period after sellers posted prices encoded as `new_state`.
    ///
    /// Updates the cell of the previous (state, allocation) pair with the reward supplied for
    /// it, then picks an allocation epsilon-greedily from the row of `new_state`. Returns the
    /// chosen action index; the caller must report the realized reward through
    /// [`QRecState::supply_reward`] before the next step.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        new_state: usize,
        eps: T,
        rng: &mut R,
        cfg: &AgentConfig<T>,
    ) -> Result<usize> {
        if new_state >= self.table.n_states() {
            return Err(Error::input(format!("state {new_state} out of range")));
        }
        if let (Some(state), Some(action)) = (self.last_state, self.last_action) {
            let reward = self
                .last_reward
                .take()
                .ok_or_else(|| Error::Protocol("reward for the previous allocation was never supplied".into()))?;
            q_update(&mut self.table, state, action, reward, new_state, cfg)?;
        }
        let action = select_action(&self.table, new_state, eps, rng);
        self.last_state = Some(new_state);
        self.last_action = Some(action);
        Ok(action)
    }

    /// Records the aggregate profit or demand realized by the latest allocation.
    pub fn supply_reward(&mut self, reward: T) -> Result<()> {
        if self.last_action.is_none() {
            return Err(Error::Protocol("reward supplied before any allocation".into()));
        }
        if self.last_reward.is_some() {
            return Err(Error::Protocol("reward supplied twice for one allocation".into()));
        }
        self.last_reward = Some(reward);
        Ok(())
    }
}
