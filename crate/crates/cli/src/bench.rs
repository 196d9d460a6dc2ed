//! Competitive and collusive benchmark prices of a scenario's market.

use collusion::{round_to_cents, solve_monopoly_price, solve_nash_price};
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Benchmarks {
    pub scenario: String,
    pub bundle_size: usize,
    pub nash: f64,
    pub monopoly: f64,
    /// Benchmarks rounded to cents, the anchors of the price grid.
    pub nash_cents: f64,
    pub monopoly_cents: f64,
}

/// Solves both benchmarks for bundles of `bundle_size` products; `None` uses the largest
/// bundle of the scenario.
pub fn benchmarks(config: &ScenarioConfig, bundle_size: Option<usize>) -> anyhow::Result<Benchmarks> {
    let market = config.market()?;
    let size = match bundle_size {
        Some(s) => s,
        None => config.market.bundles.iter().map(Vec::len).max().unwrap_or(1),
    };
    let nash = solve_nash_price(&market, size)?;
    let monopoly = solve_monopoly_price(&market, size)?;
    Ok(Benchmarks {
        scenario: config.name.clone(),
        bundle_size: size,
        nash,
        monopoly,
        nash_cents: round_to_cents(nash),
        monopoly_cents: round_to_cents(monopoly),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_benchmarks() {
        let b = benchmarks(&ScenarioConfig::preset("baseline-profit").unwrap(), None).unwrap();
        assert_eq!((b.bundle_size, b.nash_cents, b.monopoly_cents), (2, 1.47, 1.92));
        let b = benchmarks(&ScenarioConfig::preset("personalized-equal").unwrap(), None).unwrap();
        assert_eq!((b.nash_cents, b.monopoly_cents), (1.46, 1.84));
    }

    #[test]
    fn single_seller_prices_coincide() {
        let b = benchmarks(&ScenarioConfig::preset("baseline-profit").unwrap(), Some(1)).unwrap();
        assert!((b.nash - b.monopoly).abs() < 1e-6);
    }

    #[test]
    fn empty_bundle_size_fails() {
        assert!(benchmarks(&ScenarioConfig::preset("baseline-profit").unwrap(), Some(0)).is_err());
    }
}
