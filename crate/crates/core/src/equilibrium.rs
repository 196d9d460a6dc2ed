//! Competitive and collusive benchmark prices for a symmetric bundle, and the seller action grid.

use crate::error::{Error, Result};
use crate::market::MarketParams;
use crate::scalar::Scalar;

/// Iteration cap for the best-response fixed point.
pub const MAX_BEST_RESPONSE_ITERATIONS: usize = 10_000;
const DAMPING: f64 = 0.5;

fn tolerance<T: Scalar>(scale: T) -> T {
    T::lit(1e-9).max(T::epsilon() * T::lit(8.0) * scale.abs().max(T::one()))
}

/// Quality, cost of the (identical) products; errors on asymmetric markets.
fn symmetric_product<T: Scalar>(params: &MarketParams<T>) -> Result<(T, T)> {
    let q = params.qualities()[0];
    let c = params.costs()[0];
    if params.qualities().iter().any(|&v| v != q) || params.costs().iter().any(|&v| v != c) {
        return Err(Error::Unsupported(
            "benchmark prices require identical qualities and costs".into(),
        ));
    }
    Ok((q, c))
}

/// Closure state for a bundle of `size` identical products under full exposure.
struct SymmetricBundle<'a, T> {
    params: &'a MarketParams<T>,
    quality: T,
    cost: T,
    rivals: T,
    outside: Vec<T>,
}

impl<'a, T: Scalar> SymmetricBundle<'a, T> {
    fn new(params: &'a MarketParams<T>, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::input("bundle size must be at least 1"));
        }
        let (quality, cost) = symmetric_product(params)?;
        let outside = (0..params.n_segments())
            .map(|s| params.outside_attraction(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(SymmetricBundle {
            params,
            quality,
            cost,
            rivals: T::from_usize_lossy(size - 1),
            outside,
        })
    }

    fn attraction(&self, price: T) -> T {
        ((self.quality - price) / self.params.mu()).exp()
    }

    /// Share of one seller in segment `s` when it charges `own` and every rival charges `rival`.
    fn share(&self, own: T, rival: T, s: usize) -> T {
        let e = self.attraction(own);
        e / (e + self.rivals * self.attraction(rival) + self.outside[s])
    }

    /// Logit first-order condition of one seller's profit in its own price,
    /// `sum_T w_T s_T (1 - (p - c)(1 - s_T) / mu)`.
    fn first_order(&self, own: T, rival: T) -> T {
        let mu = self.params.mu();
        self.params
            .segments()
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (s, seg)| {
                let sh = self.share(own, rival, s);
                acc + seg.weight * sh * (T::one() - (own - self.cost) * (T::one() - sh) / mu)
            })
    }

    /// Per-seller profit at a symmetric price.
    fn symmetric_profit(&self, price: T) -> T {
        let margin = price - self.cost;
        self.params
            .segments()
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (s, seg)| acc + seg.weight * margin * self.share(price, price, s))
    }

    fn upper_bound(&self) -> T {
        let max_quality = self
            .params
            .qualities()
            .iter()
            .fold(T::neg_infinity(), |a, &q| a.max(q));
        self.cost + T::lit(20.0) * self.params.mu() + max_quality
    }

    /// Root of the first-order condition in the own price, given the rivals' price.
    fn best_response(&self, rival: T) -> Result<T> {
        let mut lo = self.cost;
        let mut hi = self.upper_bound();
        // The FOC is positive at cost; widen until it turns negative.
        let mut widen = 0;
        while self.first_order(hi, rival) > T::zero() {
            hi = hi + (hi - lo);
            widen += 1;
            if widen > 60 || !hi.is_finite() {
                return Err(Error::Numerical("best response is unbounded".into()));
            }
        }
        let tol = tolerance(hi) * T::lit(1e-3);
        for _ in 0..200 {
            let mid = (lo + hi) / T::lit(2.0);
            if self.first_order(mid, rival) > T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= tol {
                break;
            }
        }
        Ok((lo + hi) / T::lit(2.0))
    }
}

/// Symmetric Bertrand-Nash price of `bundle_size` identical products competing for every
/// segment, with segment demands averaged by population weight.
pub fn solve_nash_price<T: Scalar>(params: &MarketParams<T>, bundle_size: usize) -> Result<T> {
    let bundle = SymmetricBundle::new(params, bundle_size)?;
    let damping = T::lit(DAMPING);
    let mut price = bundle.cost + params.mu();
    for _ in 0..MAX_BEST_RESPONSE_ITERATIONS {
        let response = bundle.best_response(price)?;
        let next = price + damping * (response - price);
        if (next - price).abs() < tolerance(next) {
            return Ok(next);
        }
        price = next;
    }
    Err(Error::Numerical(format!(
        "best-response iteration did not converge in {MAX_BEST_RESPONSE_ITERATIONS} steps"
    )))
}

/// Symmetric price maximizing the joint profit of a bundle of `bundle_size` identical products.
pub fn solve_monopoly_price<T: Scalar>(params: &MarketParams<T>, bundle_size: usize) -> Result<T> {
    let bundle = SymmetricBundle::new(params, bundle_size)?;
    let size = T::from_usize_lossy(bundle_size);
    let hi = bundle.upper_bound();
    let tol = tolerance(hi);
    Ok(golden_section_max(|p| size * bundle.symmetric_profit(p), bundle.cost, hi, tol))
}

/// Joint profit of a symmetric bundle at `price`; exposed for optimality checks.
pub fn joint_bundle_profit<T: Scalar>(params: &MarketParams<T>, bundle_size: usize, price: T) -> Result<T> {
    let bundle = SymmetricBundle::new(params, bundle_size)?;
    Ok(T::from_usize_lossy(bundle_size) * bundle.symmetric_profit(price))
}

/// Profit of one seller charging `own` while its `bundle_size - 1` rivals charge `rival`.
pub fn unilateral_profit<T: Scalar>(
    params: &MarketParams<T>,
    bundle_size: usize,
    own: T,
    rival: T,
) -> Result<T> {
    let bundle = SymmetricBundle::new(params, bundle_size)?;
    let margin = own - bundle.cost;
    Ok(params
        .segments()
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (s, seg)| acc + seg.weight * margin * bundle.share(own, rival, s)))
}

/// Maximizer of a unimodal `f` on `[lo, hi]` by golden-section search.
pub fn golden_section_max<T: Scalar, F: Fn(T) -> T>(f: F, mut lo: T, mut hi: T, tol: T) -> T {
    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    (lo + hi) / T::lit(2.0)
}

/// `points` equally spaced prices from `p_min` to `p_max`, both included.
pub fn build_action_grid<T: Scalar>(p_min: T, p_max: T, points: usize) -> Result<Vec<T>> {
    if !(p_min < p_max) {
        return Err(Error::input(format!("grid needs p_min < p_max, got {p_min} >= {p_max}")));
    }
    if points < 2 {
        return Err(Error::input("grid needs at least two points"));
    }
    let intervals = T::from_usize_lossy(points - 1);
    let mut grid: Vec<T> = (0..points)
        .map(|i| p_min + (p_max - p_min) * T::from_usize_lossy(i) / intervals)
        .collect();
    grid[points - 1] = p_max;
    Ok(grid)
}

/// Rounds to two decimals, the precision at which benchmark prices anchor the grid.
pub fn round_to_cents<T: Scalar>(price: T) -> T {
    (price * T::lit(100.0)).round() / T::lit(100.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::Segment;

    #[test]
    fn baseline_benchmarks() {
        let params = MarketParams::<f64>::baseline();
        let nash = solve_nash_price(&params, 2).unwrap();
        let mono = solve_monopoly_price(&params, 2).unwrap();
        assert!((nash - 1.47).abs() < 0.005, "nash {nash}");
        assert!((mono - 1.92).abs() < 0.005, "monopoly {mono}");
    }

    #[test]
    fn segmented_benchmarks() {
        let params = MarketParams::<f64>::two_segment();
        let nash = solve_nash_price(&params, 2).unwrap();
        let mono = solve_monopoly_price(&params, 2).unwrap();
        assert!((nash - 1.46).abs() < 0.005, "nash {nash}");
        assert!((mono - 1.84).abs() < 0.005, "monopoly {mono}");
    }

    #[test]
    fn nash_price_above_cost_for_large_mu() {
        for mu in [0.5, 1.0, 5.0, 20.0] {
            let params = MarketParams::symmetric(2, 2.0, 1.0, mu, 0.0).unwrap();
            assert!(solve_nash_price(&params, 2).unwrap() > 1.0);
        }
    }

    #[test]
    fn single_product_nash_equals_monopoly() {
        let params = MarketParams::symmetric(1, 2.0, 1.0, 0.25, 0.0).unwrap();
        let nash: f64 = solve_nash_price(&params, 1).unwrap();
        let mono = solve_monopoly_price(&params, 1).unwrap();
        assert!((nash - mono).abs() < 1e-7, "{nash} vs {mono}");
    }

    #[test]
    fn monopoly_is_locally_optimal() {
        let params = MarketParams::<f64>::baseline();
        let p = solve_monopoly_price(&params, 2).unwrap();
        let at = joint_bundle_profit(&params, 2, p).unwrap();
        assert!(at >= joint_bundle_profit(&params, 2, p + 0.01).unwrap());
        assert!(at >= joint_bundle_profit(&params, 2, p - 0.01).unwrap());
    }

    #[test]
    fn asymmetric_params_unsupported() {
        let params = MarketParams::new(
            vec![2.0, 2.1, 2.0],
            vec![1.0; 3],
            0.25,
            vec![Segment::new(1.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(solve_nash_price(&params, 2), Err(Error::Unsupported(_))));
        assert!(matches!(solve_monopoly_price(&params, 2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn action_grids() {
        let grid: Vec<f64> = build_action_grid(1.47, 1.92, 11).unwrap();
        assert_eq!(grid.len(), 11);
        assert_eq!(grid[0], 1.47);
        assert_eq!(grid[10], 1.92);
        for w in grid.windows(2) {
            assert!((w[1] - w[0] - 0.045).abs() < 1e-12);
        }
        assert_eq!(build_action_grid(0.0, 1.0, 2).unwrap(), vec![0.0, 1.0]);
        let grid: Vec<f64> = build_action_grid(1.46, 1.84, 11).unwrap();
        assert!((grid[1] - grid[0] - 0.038).abs() < 1e-12);
        assert!(build_action_grid(1.0, 1.0, 3).is_err());
        assert!(build_action_grid(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn golden_section_on_parabola() {
        let x = golden_section_max(|x: f64| -(x - 0.3) * (x - 0.3), -2.0, 5.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-9);
    }

    #[test]
    fn rounding() {
        assert_eq!(round_to_cents(1.4729), 1.47);
        assert_eq!(round_to_cents(1.9249), 1.92);
    }
}
