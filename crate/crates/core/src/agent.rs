//! Tabular Q-learning seller: epsilon-greedy pricing and the single-cell value update.

use rand::Rng;

use crate::error::{Error, Result};
use crate::market::{market_outcome_into, Attraction, BundleCatalog, DemandProfile, ExposureAllocation, MarketParams};
use crate::qtable::{QTable, StateCodec};
use crate::scalar::Scalar;

/// How a seller's table is filled before the first period.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InitMode {
    #[default]
    Zero,
    /// Each action's average one-period profit against uniformly random rivals, under equal
    /// exposure, capitalized at `1 / (1 - discount)`. Identical across states.
    DiscountedUniform,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgentConfig<T> {
    pub learning_rate: T,
    pub discount: T,
    /// Exploration decay rate; exploration probability at period `t` is `exp(-decay * t)`.
    pub decay: T,
    pub grid: Vec<T>,
    pub init: InitMode,
}

impl<T: Scalar> AgentConfig<T> {
    pub fn new(learning_rate: T, discount: T, decay: T, grid: Vec<T>, init: InitMode) -> Result<Self> {
        if !(learning_rate > T::zero() && learning_rate <= T::one()) {
            return Err(Error::input(format!("learning rate must lie in (0, 1], got {learning_rate}")));
        }
        if !(discount > T::zero() && discount < T::one()) {
            return Err(Error::input(format!("discount must lie in (0, 1), got {discount}")));
        }
        if !(decay > T::zero()) || !decay.is_finite() {
            return Err(Error::input(format!("exploration decay must be positive, got {decay}")));
        }
        if grid.is_empty() {
            return Err(Error::input("action grid is empty"));
        }
        if grid.iter().any(|p| !p.is_finite() || *p < T::zero()) {
            return Err(Error::input("grid prices must be finite and non-negative"));
        }
        Ok(AgentConfig {
            learning_rate,
            discount,
            decay,
            grid,
            init,
        })
    }

    pub fn n_actions(&self) -> usize {
        self.grid.len()
    }
}

/// Exploration probability `exp(-decay * t)`.
#[inline]
pub fn epsilon<T: Scalar>(decay: T, period: u64) -> T {
    (-decay * T::lit(period as f64)).exp()
}

/// Epsilon-greedy choice from row `state`.
///
/// Always consumes exactly two draws from `rng`, in this order: a uniform `f64` coin (explore
/// when `coin < eps`) and a uniform action index over all `k` actions. The greedy action may
/// be drawn while exploring. Greedy ties resolve to the lowest index.
#[inline]
pub fn select_action<T: Scalar, R: Rng + ?Sized>(q: &QTable<T>, state: usize, eps: T, rng: &mut R) -> usize {
    let coin: f64 = rng.random();
    let random_action = rng.random_range(0..q.n_actions() as u32) as usize;
    if coin < eps.as_f64() {
        random_action
    } else {
        q.argmax(state)
    }
}

/// `Q[s,a] <- (1 - lr) Q[s,a] + lr (reward + discount * max_a' Q[s_next, a'])`.
#[inline]
pub fn q_update<T: Scalar>(
    q: &mut QTable<T>,
    state: usize,
    action: usize,
    reward: T,
    next_state: usize,
    cfg: &AgentConfig<T>,
) -> Result<()> {
    if !reward.is_finite() {
        return Err(Error::Numerical(format!("non-finite reward {reward}")));
    }
    let target = reward + cfg.discount * q.max(next_state);
    let old = q.get(state, action);
    q.set(state, action, (T::one() - cfg.learning_rate) * old + cfg.learning_rate * target);
    Ok(())
}

/// Initial table of seller `seller` according to `cfg.init`.
pub fn init_qtable<T: Scalar>(
    cfg: &AgentConfig<T>,
    params: &MarketParams<T>,
    catalog: &BundleCatalog,
    seller: usize,
) -> Result<QTable<T>> {
    let n = params.n_products();
    if seller >= n {
        return Err(Error::input(format!("seller {seller} out of range")));
    }
    let codec = StateCodec::new(cfg.n_actions(), n)?;
    match cfg.init {
        InitMode::Zero => Ok(QTable::zeros(codec, cfg.n_actions())),
        InitMode::DiscountedUniform => {
            let values = uniform_opponent_values(cfg, params, catalog, seller)?;
            let mut q = QTable::zeros(codec, cfg.n_actions());
            for s in 0..codec.n_states() {
                for (a, &v) in values.iter().enumerate() {
                    q.set(s, a, v);
                }
            }
            Ok(q)
        }
    }
}

fn uniform_opponent_values<T: Scalar>(
    cfg: &AgentConfig<T>,
    params: &MarketParams<T>,
    catalog: &BundleCatalog,
    seller: usize,
) -> Result<Vec<T>> {
    let n = params.n_products();
    let k = cfg.n_actions();
    let exposure = ExposureAllocation::uniform(catalog.len(), params.n_segments());
    crate::market::check_dimensions(params, catalog, &exposure)?;
    let per_action: Vec<Vec<T>> = (0..n)
        .map(|i| cfg.grid.iter().map(|&p| params.product_attraction(i, p)).collect())
        .collect::<Result<_>>()?;
    let outside = (0..params.n_segments())
        .map(|s| params.outside_attraction(s))
        .collect::<Result<Vec<_>>>()?;
    let mut att = Attraction {
        product: vec![T::zero(); n],
        outside,
    };
    let mut out = DemandProfile::zeroed(n, catalog.len(), params.n_segments());
    let opponents = StateCodec::new(k, n - 1).map(|c| c.n_states()).unwrap_or(1);
    let mut prices = vec![T::zero(); n];
    let mut combo = vec![0usize; n];
    let mut values = vec![T::zero(); k];
    for (a, value) in values.iter_mut().enumerate() {
        let mut total = T::zero();
        for o in 0..opponents {
            let mut rest = o;
            for i in (0..n).rev() {
                if i == seller {
                    combo[i] = a;
                } else {
                    combo[i] = rest % k;
                    rest /= k;
                }
            }
            for i in 0..n {
                prices[i] = cfg.grid[combo[i]];
                att.product[i] = per_action[i][combo[i]];
            }
            market_outcome_into(params, catalog, &att, &prices, &exposure, &mut out);
            total = total + out.profit[seller];
        }
        *value = total / T::from_usize_lossy(opponents) / (T::one() - cfg.discount);
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{market_outcome, PriceVector};
    use crate::equilibrium::build_action_grid;
    use crate::rng;

    fn baseline_cfg(init: InitMode) -> AgentConfig<f64> {
        AgentConfig::new(0.15, 0.95, 1.5e-6, build_action_grid(1.47, 1.92, 11).unwrap(), init).unwrap()
    }

    #[test]
    fn epsilon_values() {
        assert!((epsilon(1.5e-6f64, 1_000_000) - 0.22313).abs() < 1e-4);
        assert!((epsilon(5e-6f64, 1_000_000) - 0.00674).abs() < 1e-4);
        assert_eq!(epsilon(1.5e-6, 0), 1.0);
        assert!(epsilon(1.5e-6, 1) < 1.0);
    }

    #[test]
    fn greedy_selection() {
        let codec = StateCodec::new(3, 1).unwrap();
        let mut q = QTable::<f64>::zeros(codec, 3);
        let mut rng = rng::stream(1, 1);
        assert_eq!(select_action(&q, 0, 0.0, &mut rng), 0);
        q.set(0, 0, 0.1);
        q.set(0, 1, 0.5);
        q.set(0, 2, 0.2);
        for _ in 0..100 {
            assert_eq!(select_action(&q, 0, 0.0, &mut rng), 1);
        }
    }

    #[test]
    fn update_closed_forms() {
        let cfg = baseline_cfg(InitMode::Zero);
        let codec = StateCodec::new(11, 3).unwrap();
        let mut q = QTable::<f64>::zeros(codec, 11);
        q_update(&mut q, 5, 3, 1.0, 7, &cfg).unwrap();
        assert!((q.get(5, 3) - 0.15).abs() < 1e-15);

        let mut q = QTable::<f64>::filled(codec, 11, 1.0);
        q_update(&mut q, 5, 3, 0.0, 7, &cfg).unwrap();
        assert!((q.get(5, 3) - 0.9925).abs() < 1e-15);
    }

    #[test]
    fn non_finite_reward_rejected() {
        let cfg = baseline_cfg(InitMode::Zero);
        let mut q = QTable::<f64>::zeros(StateCodec::new(11, 3).unwrap(), 11);
        assert!(matches!(q_update(&mut q, 0, 0, f64::NAN, 0, &cfg), Err(Error::Numerical(_))));
        assert!(q.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_init() {
        let q = init_qtable(&baseline_cfg(InitMode::Zero), &MarketParams::baseline(), &BundleCatalog::baseline(), 0)
            .unwrap();
        assert_eq!(q.n_states(), 1331);
        assert!(q.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn discounted_uniform_init_matches_enumeration() {
        let cfg = baseline_cfg(InitMode::DiscountedUniform);
        let params = MarketParams::baseline();
        let catalog = BundleCatalog::baseline();
        let exposure = ExposureAllocation::uniform(3, 1);
        for seller in 0..3 {
            let q = init_qtable(&cfg, &params, &catalog, seller).unwrap();
            for a in 0..11 {
                // Brute force over the 121 rival price pairs through the public API.
                let mut total = 0.0;
                for x in 0..11 {
                    for y in 0..11 {
                        let mut idx = [x, y];
                        let mut p = Vec::with_capacity(3);
                        let mut it = idx.iter_mut();
                        for i in 0..3 {
                            p.push(if i == seller { cfg.grid[a] } else { cfg.grid[*it.next().unwrap()] });
                        }
                        let out = market_outcome(&params, &catalog, &PriceVector::new(p).unwrap(), &exposure).unwrap();
                        total += out.profit[seller];
                    }
                }
                let expected = total / 121.0 / 0.05;
                for s in [0, 500, 1330] {
                    assert!((q.get(s, a) - expected).abs() < 1e-12, "seller {seller} action {a}");
                }
            }
        }
    }
}
