//! Scenario files and the built-in presets.
//!
//! A scenario is stored as TOML. Every key is required except `convergence_window`, and
//! unknown keys are rejected so that a typo cannot silently fall back to a default.

use std::path::Path;

use anyhow::{bail, Context};
use collusion::{
    build_action_grid, AgentConfig, BundleCatalog, GameConfig, InitMode, MarketParams, Policy, PolicyKind, Segment,
};
use serde::{Deserialize, Serialize};

/// Names accepted by `--preset`.
pub const PRESET_NAMES: [&str; 11] = [
    "baseline-profit",
    "baseline-demand",
    "baseline-equal",
    "less-exploration-profit",
    "less-exploration-demand",
    "less-exploration-equal",
    "qrs-profit",
    "qrs-demand",
    "personalized-profit",
    "personalized-demand",
    "personalized-equal",
];

/// Window, in periods, of the moving average written for plotting.
pub const MOVING_AVERAGE_WINDOW: u64 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyName {
    Profit,
    Demand,
    Equal,
    QrsProfit,
    QrsDemand,
}

impl PolicyName {
    pub fn kind(self) -> PolicyKind {
        match self {
            PolicyName::Profit => PolicyKind::ProfitBased,
            PolicyName::Demand => PolicyKind::DemandBased,
            PolicyName::Equal => PolicyKind::EqualExposure,
            PolicyName::QrsProfit => PolicyKind::QLearningProfit,
            PolicyName::QrsDemand => PolicyKind::QLearningDemand,
        }
    }

    /// Column order used by the summary table.
    pub fn rank(self) -> usize {
        match self {
            PolicyName::Profit => 0,
            PolicyName::Demand => 1,
            PolicyName::Equal => 2,
            PolicyName::QrsProfit => 3,
            PolicyName::QrsDemand => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyName::Profit => "profit",
            PolicyName::Demand => "demand",
            PolicyName::Equal => "equal",
            PolicyName::QrsProfit => "qrs-profit",
            PolicyName::QrsDemand => "qrs-demand",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitName {
    Zero,
    DiscountedUniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub weight: f64,
    pub outside_utility: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketConfig {
    pub qualities: Vec<f64>,
    pub costs: Vec<f64>,
    pub mu: f64,
    /// Zero-based product indices of each bundle.
    pub bundles: Vec<Vec<usize>>,
    pub segments: Vec<SegmentConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSection {
    pub learning_rate: f64,
    pub discount: f64,
    pub decay: f64,
    pub init: InitName,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub policy: PolicyName,
    pub personalized: bool,
    pub runs: usize,
    pub seed: u64,
    pub horizon: u64,
    pub stride: u64,
    pub exposure_slices: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence_window: Option<u64>,
    pub market: MarketConfig,
    pub agent: AgentSection,
}

impl ScenarioConfig {
    pub fn preset(name: &str) -> anyhow::Result<Self> {
        let (family, policy) = name
            .rsplit_once('-')
            .with_context(|| format!("unknown preset '{name}'"))?;
        let policy = match (family, policy) {
            ("qrs", "profit") => PolicyName::QrsProfit,
            ("qrs", "demand") => PolicyName::QrsDemand,
            ("qrs", _) => bail!("unknown preset '{name}'"),
            (_, "profit") => PolicyName::Profit,
            (_, "demand") => PolicyName::Demand,
            (_, "equal") => PolicyName::Equal,
            _ => bail!("unknown preset '{name}'"),
        };
        let (decay, horizon, runs) = match family {
            "baseline" => (1.5e-6, 3_500_000, 50),
            "less-exploration" => (5e-6, 1_000_000, 50),
            "qrs" => (1e-7, 40_000_000, 10),
            "personalized" => (5e-7, 8_000_000, 30),
            _ => bail!("unknown preset '{name}'; expected one of {}", PRESET_NAMES.join(", ")),
        };
        let personalized = family == "personalized";
        let (segments, grid_min, grid_max) = if personalized {
            (
                vec![
                    SegmentConfig { weight: 0.5, outside_utility: 0.0 },
                    SegmentConfig { weight: 0.5, outside_utility: 0.25 },
                ],
                1.46,
                1.84,
            )
        } else {
            (vec![SegmentConfig { weight: 1.0, outside_utility: 0.0 }], 1.47, 1.92)
        };
        Ok(ScenarioConfig {
            name: name.to_string(),
            policy,
            // Personalization only applies to the full-information allocations.
            personalized: personalized && policy != PolicyName::Equal,
            runs,
            seed: 0,
            horizon,
            stride: 100,
            exposure_slices: 9,
            convergence_window: None,
            market: MarketConfig {
                qualities: vec![2.0; 3],
                costs: vec![1.0; 3],
                mu: 0.25,
                bundles: vec![vec![0, 1], vec![0, 2], vec![1, 2]],
                segments,
            },
            agent: AgentSection {
                learning_rate: 0.15,
                discount: 0.95,
                decay,
                init: InitName::Zero,
                grid_min,
                grid_max,
                grid_points: 11,
            },
        })
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let config: ScenarioConfig = toml::from_str(text).context("invalid scenario file")?;
        config.game()?;
        if config.runs == 0 {
            bail!("runs must be at least 1");
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn render(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialize")
    }

    pub fn market(&self) -> anyhow::Result<MarketParams<f64>> {
        let segments = self
            .market
            .segments
            .iter()
            .map(|s| Segment::new(s.weight, s.outside_utility))
            .collect();
        Ok(MarketParams::new(
            self.market.qualities.clone(),
            self.market.costs.clone(),
            self.market.mu,
            segments,
        )?)
    }

    pub fn catalog(&self) -> anyhow::Result<BundleCatalog> {
        Ok(BundleCatalog::new(self.market.bundles.clone(), self.market.qualities.len())?)
    }

    /// The engine configuration; the master seed is `self.seed`.
    pub fn game(&self) -> anyhow::Result<GameConfig<f64>> {
        let grid = build_action_grid(self.agent.grid_min, self.agent.grid_max, self.agent.grid_points)?;
        let init = match self.agent.init {
            InitName::Zero => InitMode::Zero,
            InitName::DiscountedUniform => InitMode::DiscountedUniform,
        };
        let agent = AgentConfig::new(
            self.agent.learning_rate,
            self.agent.discount,
            self.agent.decay,
            grid,
            init,
        )?;
        let kind = self.policy.kind();
        let policy = if self.personalized {
            Policy::personalized(kind)
        } else {
            Policy::new(kind)
        };
        let game = GameConfig {
            params: self.market()?,
            catalog: self.catalog()?,
            agent,
            policy,
            horizon: self.horizon,
            seed: self.seed,
            stride: self.stride,
            exposure_slices: self.exposure_slices,
            convergence_window: self.convergence_window,
        };
        game.validate()?;
        Ok(game)
    }
}
