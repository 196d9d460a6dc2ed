//! Logit demand environment: products, bundles, exposure and the per-period market outcome.
//!
//! Consumers shown bundle `j` choose among the bundle's products and an outside good with
//! multinomial-logit probabilities. A product's demand is the exposure-weighted sum of its
//! shares over every bundle that contains it, summed over consumer segments weighted by their
//! population share.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest |exponent| accepted by the logit terms; beyond this `exp` over/underflows.
pub const MAX_EXPONENT: f64 = 600.0;

/// A consumer type, distinguished by the utility of its outside option.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment<T> {
    /// Population share in (0, 1].
    pub weight: T,
    pub outside_utility: T,
}

impl<T: Scalar> Segment<T> {
    pub fn new(weight: T, outside_utility: T) -> Self {
        Segment {
            weight,
            outside_utility,
        }
    }
}

/// Demand-side parameterization of the market.
#[derive(Clone, Debug, PartialEq)]
pub struct MarketParams<T> {
    qualities: Vec<T>,
    costs: Vec<T>,
    mu: T,
    segments: Vec<Segment<T>>,
}

impl<T: Scalar> MarketParams<T> {
    pub fn new(qualities: Vec<T>, costs: Vec<T>, mu: T, segments: Vec<Segment<T>>) -> Result<Self> {
        if qualities.is_empty() {
            return Err(Error::input("market needs at least one product"));
        }
        if qualities.len() != costs.len() {
            return Err(Error::input(format!(
                "{} qualities but {} costs",
                qualities.len(),
                costs.len()
            )));
        }
        if !(mu > T::zero()) || !mu.is_finite() {
            return Err(Error::input(format!("differentiation mu must be positive, got {mu}")));
        }
        if qualities.iter().chain(costs.iter()).any(|v| !v.is_finite()) {
            return Err(Error::input("qualities and costs must be finite"));
        }
        if segments.is_empty() {
            return Err(Error::input("at least one consumer segment is required"));
        }
        let mut total = T::zero();
        for seg in &segments {
            if !(seg.weight > T::zero() && seg.weight <= T::one()) {
                return Err(Error::input(format!(
                    "segment weight must lie in (0, 1], got {}",
                    seg.weight
                )));
            }
            if !seg.outside_utility.is_finite() {
                return Err(Error::input("outside utility must be finite"));
            }
            total = total + seg.weight;
        }
        if (total - T::one()).abs() > simplex_tolerance::<T>(segments.len()) {
            return Err(Error::input(format!("segment weights sum to {total}, expected 1")));
        }
        Ok(MarketParams {
            qualities,
            costs,
            mu,
            segments,
        })
    }

    /// `n` identical products with a single consumer segment.
    pub fn symmetric(n: usize, quality: T, cost: T, mu: T, outside_utility: T) -> Result<Self> {
        Self::new(
            vec![quality; n],
            vec![cost; n],
            mu,
            vec![Segment::new(T::one(), outside_utility)],
        )
    }

    /// Three products with quality 2, cost 1, differentiation 0.25 and outside utility 0.
    pub fn baseline() -> Self {
        Self::symmetric(3, T::lit(2.0), T::one(), T::lit(0.25), T::zero())
            .expect("baseline parameters are valid")
    }

    /// Baseline products facing two equally sized segments with outside utilities 0 and 0.25.
    pub fn two_segment() -> Self {
        let half = T::lit(0.5);
        Self::new(
            vec![T::lit(2.0); 3],
            vec![T::one(); 3],
            T::lit(0.25),
            vec![Segment::new(half, T::zero()), Segment::new(half, T::lit(0.25))],
        )
        .expect("segmented parameters are valid")
    }

    pub fn n_products(&self) -> usize {
        self.qualities.len()
    }

    pub fn qualities(&self) -> &[T] {
        &self.qualities
    }

    pub fn costs(&self) -> &[T] {
        &self.costs
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn n_segments(&self) -> usize {
        self.segments.len()
    }

    /// `exp((alpha_i - price) / mu)`.
    pub fn product_attraction(&self, product: usize, price: T) -> Result<T> {
        let quality = *self
            .qualities
            .get(product)
            .ok_or_else(|| Error::input(format!("product index {product} out of range")))?;
        guarded_exp((quality - price) / self.mu)
    }

    /// `exp(alpha_0T / mu)` for segment `segment`.
    pub fn outside_attraction(&self, segment: usize) -> Result<T> {
        let seg = self
            .segments
            .get(segment)
            .ok_or_else(|| Error::input(format!("segment index {segment} out of range")))?;
        guarded_exp(seg.outside_utility / self.mu)
    }

    /// Evaluates every logit term needed for one price vector.
    pub fn attraction(&self, prices: &PriceVector<T>) -> Result<Attraction<T>> {
        self.check_prices(prices)?;
        let product = prices
            .as_slice()
            .iter()
            .enumerate()
            .map(|(i, &p)| self.product_attraction(i, p))
            .collect::<Result<Vec<_>>>()?;
        let outside = (0..self.segments.len())
            .map(|s| self.outside_attraction(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Attraction { product, outside })
    }

    fn check_prices(&self, prices: &PriceVector<T>) -> Result<()> {
        if prices.len() != self.n_products() {
            return Err(Error::input(format!(
                "price vector has {} entries for {} products",
                prices.len(),
                self.n_products()
            )));
        }
        Ok(())
    }
}

fn guarded_exp<T: Scalar>(exponent: T) -> Result<T> {
    if !exponent.is_finite() || exponent.abs() > T::lit(MAX_EXPONENT) {
        return Err(Error::Numerical(format!(
            "logit exponent {exponent} outside [-{MAX_EXPONENT}, {MAX_EXPONENT}]"
        )));
    }
    Ok(exponent.exp())
}

/// Tolerance used when checking that weights sum to one.
pub(crate) fn simplex_tolerance<T: Scalar>(terms: usize) -> T {
    T::lit(1e-12).max(T::epsilon() * T::from_usize_lossy(4 * terms.max(1)))
}

/// Precomputed logit numerators for one price vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Attraction<T> {
    /// `exp((alpha_i - p_i) / mu)` per product.
    pub product: Vec<T>,
    /// `exp(alpha_0T / mu)` per segment.
    pub outside: Vec<T>,
}

impl<T: Scalar> Attraction<T> {
    /// Logit denominator of the sub-market formed by `bundle` and segment `segment`.
    #[inline]
    pub fn denominator(&self, bundle: &[usize], segment: usize) -> T {
        let mut sum = T::zero();
        for &k in bundle {
            sum = sum + self.product[k];
        }
        sum + self.outside[segment]
    }
}

/// The set of bundles the platform can show.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleCatalog {
    bundles: Vec<Vec<usize>>,
    n_products: usize,
}

impl BundleCatalog {
    pub fn new(bundles: Vec<Vec<usize>>, n_products: usize) -> Result<Self> {
        if bundles.is_empty() {
            return Err(Error::input("catalog needs at least one bundle"));
        }
        for (j, bundle) in bundles.iter().enumerate() {
            if bundle.is_empty() {
                return Err(Error::input(format!("bundle {j} is empty")));
            }
            for (pos, &i) in bundle.iter().enumerate() {
                if i >= n_products {
                    return Err(Error::input(format!(
                        "bundle {j} references product {i} but only {n_products} exist"
                    )));
                }
                if bundle[..pos].contains(&i) {
                    return Err(Error::input(format!("bundle {j} lists product {i} twice")));
                }
            }
        }
        Ok(BundleCatalog {
            bundles,
            n_products,
        })
    }

    /// Three products shown in pairs: {0,1}, {0,2}, {1,2}.
    pub fn baseline() -> Self {
        Self::new(vec![vec![0, 1], vec![0, 2], vec![1, 2]], 3).expect("baseline catalog is valid")
    }

    pub fn bundles(&self) -> &[Vec<usize>] {
        &self.bundles
    }

    pub fn bundle(&self, j: usize) -> &[usize] {
        &self.bundles[j]
    }

    pub fn len(&self) -> usize {
        self.bundles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bundles.is_empty()
    }

    pub fn n_products(&self) -> usize {
        self.n_products
    }

    /// Indices of the bundles containing `product`.
    pub fn bundles_with(&self, product: usize) -> impl Iterator<Item = usize> + '_ {
        self.bundles
            .iter()
            .enumerate()
            .filter(move |(_, b)| b.contains(&product))
            .map(|(j, _)| j)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PriceVector<T>(Vec<T>);

impl<T: Scalar> PriceVector<T> {
    pub fn new(prices: Vec<T>) -> Result<Self> {
        if let Some(p) = prices.iter().find(|p| !p.is_finite() || **p < T::zero()) {
            return Err(Error::input(format!("prices must be finite and non-negative, got {p}")));
        }
        Ok(PriceVector(prices))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

impl<T> std::ops::Index<usize> for PriceVector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

/// Share of each segment's consumers shown each bundle.
///
/// Stored segment-major: `weights[segment * bundles + j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExposureAllocation<T> {
    bundles: usize,
    weights: Vec<T>,
}

impl<T: Scalar> ExposureAllocation<T> {
    pub fn new(per_segment: Vec<Vec<T>>) -> Result<Self> {
        let bundles = per_segment.first().map_or(0, Vec::len);
        if bundles == 0 {
            return Err(Error::input("exposure needs at least one segment and one bundle"));
        }
        if per_segment.iter().any(|w| w.len() != bundles) {
            return Err(Error::input("every segment must weight the same number of bundles"));
        }
        let alloc = ExposureAllocation {
            bundles,
            weights: per_segment.into_iter().flatten().collect(),
        };
        alloc.validate()?;
        Ok(alloc)
    }

    /// The same bundle weights for each of `segments` segments.
    pub fn replicated(weights: &[T], segments: usize) -> Result<Self> {
        Self::new(vec![weights.to_vec(); segments])
    }

    /// `1/m` for every bundle in every segment.
    pub fn uniform(bundles: usize, segments: usize) -> Self {
        let w = T::one() / T::from_usize_lossy(bundles);
        ExposureAllocation {
            bundles,
            weights: vec![w; bundles * segments],
        }
    }

    pub(crate) fn zeroed(bundles: usize, segments: usize) -> Self {
        ExposureAllocation {
            bundles,
            weights: vec![T::zero(); bundles * segments],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let tol = simplex_tolerance::<T>(self.bundles);
        for (s, seg) in self.weights.chunks(self.bundles).enumerate() {
            if seg.iter().any(|w| !(*w >= T::zero()) || !w.is_finite()) {
                return Err(Error::input(format!("segment {s} has a negative or non-finite weight")));
            }
            let total = seg.iter().fold(T::zero(), |a, &w| a + w);
            if (total - T::one()).abs() > tol {
                return Err(Error::input(format!("segment {s} exposure sums to {total}")));
            }
        }
        Ok(())
    }

    pub fn n_bundles(&self) -> usize {
        self.bundles
    }

    pub fn n_segments(&self) -> usize {
        self.weights.len() / self.bundles
    }

    pub fn segment(&self, segment: usize) -> &[T] {
        &self.weights[segment * self.bundles..(segment + 1) * self.bundles]
    }

    pub(crate) fn segment_mut(&mut self, segment: usize) -> &mut [T] {
        &mut self.weights[segment * self.bundles..(segment + 1) * self.bundles]
    }

    pub fn get(&self, segment: usize, bundle: usize) -> T {
        self.weights[segment * self.bundles + bundle]
    }

    /// All weights, segment-major.
    pub fn as_flat(&self) -> &[T] {
        &self.weights
    }

    /// Population-weighted share of consumers shown at least one bundle containing `product`.
    pub fn product_exposure(&self, catalog: &BundleCatalog, params: &MarketParams<T>, product: usize) -> T {
        let mut total = T::zero();
        for (s, seg) in params.segments().iter().enumerate() {
            for j in catalog.bundles_with(product) {
                total = total + seg.weight * self.get(s, j);
            }
        }
        total
    }
}

/// Realized per-period demand and profit.
#[derive(Clone, Debug, PartialEq)]
pub struct DemandProfile<T> {
    /// Per-product demand `d_i`, in units of the total customer mass.
    pub demand: Vec<T>,
    /// Per-product profit `r_i = (p_i - c_i) d_i`.
    pub profit: Vec<T>,
    /// Realized demand of each sub-market, `[segment * m + j]`.
    pub bundle_demand: Vec<T>,
    /// Realized profit of each sub-market, `[segment * m + j]`.
    pub bundle_profit: Vec<T>,
}

impl<T: Scalar> DemandProfile<T> {
    pub fn zeroed(n_products: usize, n_bundles: usize, n_segments: usize) -> Self {
        DemandProfile {
            demand: vec![T::zero(); n_products],
            profit: vec![T::zero(); n_products],
            bundle_demand: vec![T::zero(); n_bundles * n_segments],
            bundle_profit: vec![T::zero(); n_bundles * n_segments],
        }
    }

    pub fn total_demand(&self) -> T {
        self.demand.iter().fold(T::zero(), |a, &d| a + d)
    }

    pub fn total_profit(&self) -> T {
        self.profit.iter().fold(T::zero(), |a, &r| a + r)
    }
}

fn check_bundle<T: Scalar>(params: &MarketParams<T>, bundle: &[usize], segment: usize) -> Result<()> {
    if bundle.is_empty() {
        return Err(Error::input("bundle is empty"));
    }
    if let Some(i) = bundle.iter().find(|&&i| i >= params.n_products()) {
        return Err(Error::input(format!("product index {i} out of range")));
    }
    if segment >= params.n_segments() {
        return Err(Error::input(format!("segment index {segment} out of range")));
    }
    Ok(())
}

/// Conditional logit share of each product in `bundle` among consumers of `segment` who are
/// shown that bundle. Shares are returned in bundle order.
pub fn bundle_shares<T: Scalar>(
    params: &MarketParams<T>,
    bundle: &[usize],
    prices: &PriceVector<T>,
    segment: usize,
) -> Result<Vec<T>> {
    check_bundle(params, bundle, segment)?;
    let att = params.attraction(prices)?;
    let denom = att.denominator(bundle, segment);
    Ok(bundle.iter().map(|&i| att.product[i] / denom).collect())
}

/// Total profit and total demand of `bundle` if it were shown to every consumer of `segment`.
pub fn bundle_objective<T: Scalar>(
    params: &MarketParams<T>,
    bundle: &[usize],
    prices: &PriceVector<T>,
    segment: usize,
) -> Result<(T, T)> {
    check_bundle(params, bundle, segment)?;
    let att = params.attraction(prices)?;
    Ok(bundle_objective_with(params, &att, prices.as_slice(), bundle, segment))
}

#[inline]
pub(crate) fn bundle_objective_with<T: Scalar>(
    params: &MarketParams<T>,
    att: &Attraction<T>,
    prices: &[T],
    bundle: &[usize],
    segment: usize,
) -> (T, T) {
    let denom = att.denominator(bundle, segment);
    let mut profit = T::zero();
    let mut demand = T::zero();
    for &i in bundle {
        let share = att.product[i] / denom;
        profit = profit + share * (prices[i] - params.costs[i]);
        demand = demand + share;
    }
    (profit, demand)
}

/// Aggregates demand and profit over bundles and segments for one period.
pub fn market_outcome<T: Scalar>(
    params: &MarketParams<T>,
    catalog: &BundleCatalog,
    prices: &PriceVector<T>,
    exposure: &ExposureAllocation<T>,
) -> Result<DemandProfile<T>> {
    check_dimensions(params, catalog, exposure)?;
    let att = params.attraction(prices)?;
    let mut out = DemandProfile::zeroed(params.n_products(), catalog.len(), params.n_segments());
    market_outcome_into(params, catalog, &att, prices.as_slice(), exposure, &mut out);
    Ok(out)
}

pub(crate) fn check_dimensions<T: Scalar>(
    params: &MarketParams<T>,
    catalog: &BundleCatalog,
    exposure: &ExposureAllocation<T>,
) -> Result<()> {
    if catalog.n_products() != params.n_products() {
        return Err(Error::input(format!(
            "catalog built for {} products, market has {}",
            catalog.n_products(),
            params.n_products()
        )));
    }
    if exposure.n_bundles() != catalog.len() || exposure.n_segments() != params.n_segments() {
        return Err(Error::input(format!(
            "exposure is {}x{} (segments x bundles), expected {}x{}",
            exposure.n_segments(),
            exposure.n_bundles(),
            params.n_segments(),
            catalog.len()
        )));
    }
    Ok(())
}

/// Allocation-free core of [`market_outcome`]; dimensions must already be checked.
pub(crate) fn market_outcome_into<T: Scalar>(
    params: &MarketParams<T>,
    catalog: &BundleCatalog,
    att: &Attraction<T>,
    prices: &[T],
    exposure: &ExposureAllocation<T>,
    out: &mut DemandProfile<T>,
) {
    let m = catalog.len();
    out.demand.iter_mut().for_each(|d| *d = T::zero());
    for (s, seg) in params.segments.iter().enumerate() {
        for (j, bundle) in catalog.bundles().iter().enumerate() {
            let mass = seg.weight * exposure.get(s, j);
            let denom = att.denominator(bundle, s);
            let mut sub_demand = T::zero();
            let mut sub_profit = T::zero();
            for &i in bundle {
                let d = mass * (att.product[i] / denom);
                out.demand[i] = out.demand[i] + d;
                sub_demand = sub_demand + d;
                sub_profit = sub_profit + d * (prices[i] - params.costs[i]);
            }
            out.bundle_demand[s * m + j] = sub_demand;
            out.bundle_profit[s * m + j] = sub_profit;
        }
    }
    for (i, r) in out.profit.iter_mut().enumerate() {
        *r = (prices[i] - params.costs[i]) * out.demand[i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_product(outside: f64) -> MarketParams<f64> {
        MarketParams::symmetric(2, 2.0, 1.0, 0.25, outside).unwrap()
    }

    fn prices(p: &[f64]) -> PriceVector<f64> {
        PriceVector::new(p.to_vec()).unwrap()
    }

    // Expected values below come from a 40-digit mpmath evaluation of the logit formula.

    #[test]
    fn symmetric_shares_are_one_third() {
        let s = bundle_shares(&two_product(0.0), &[0, 1], &prices(&[2.0, 2.0]), 0).unwrap();
        for v in s {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn share_against_expensive_rival() {
        let s = bundle_shares(&two_product(0.0), &[0, 1], &prices(&[1.92, 10.0]), 0).unwrap();
        assert!((s[0] - 0.579_324_252_148_746_4).abs() < 1e-14);
    }

    #[test]
    fn share_with_high_outside_option() {
        let s = bundle_shares(&two_product(0.25), &[0, 1], &prices(&[2.0, 2.0]), 0).unwrap();
        assert!((s[0] - 0.211_941_557_617_085_4).abs() < 1e-14);
        assert_eq!(s[0], s[1]);
    }

    #[test]
    fn bad_product_index_is_input_error() {
        let err = bundle_shares(&two_product(0.0), &[0, 5], &prices(&[2.0, 2.0]), 0).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn exponent_guard() {
        let params = MarketParams::symmetric(2, 2.0, 1.0, 0.001, 0.0).unwrap();
        let err = bundle_shares(&params, &[0, 1], &prices(&[0.0, 2.0]), 0).unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
    }

    #[test]
    fn equal_exposure_symmetric_outcome() {
        let params = MarketParams::baseline();
        let out = market_outcome(
            &params,
            &BundleCatalog::baseline(),
            &prices(&[2.0, 2.0, 2.0]),
            &ExposureAllocation::uniform(3, 1),
        )
        .unwrap();
        for i in 0..3 {
            assert!((out.demand[i] - 2.0 / 9.0).abs() < 1e-15);
            assert!((out.profit[i] - 2.0 / 9.0).abs() < 1e-15);
        }
    }

    #[test]
    fn single_bundle_exposure() {
        let params = MarketParams::baseline();
        let exposure = ExposureAllocation::new(vec![vec![1.0, 0.0, 0.0]]).unwrap();
        let out = market_outcome(&params, &BundleCatalog::baseline(), &prices(&[2.0, 2.0, 2.0]), &exposure)
            .unwrap();
        assert!((out.demand[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((out.demand[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(out.demand[2], 0.0);

        let out = market_outcome(
            &params,
            &BundleCatalog::baseline(),
            &prices(&[1.92, 1.92, 1.47]),
            &exposure,
        )
        .unwrap();
        assert!((out.profit[0] - 0.337_472_378_614_908_2).abs() < 1e-14);
        assert_eq!(out.profit[0], out.profit[1]);
        assert_eq!(out.profit[2], 0.0);
    }

    #[test]
    fn profit_is_margin_times_demand() {
        let params = MarketParams::two_segment();
        let exposure = ExposureAllocation::new(vec![vec![0.2, 0.3, 0.5], vec![0.6, 0.4, 0.0]]).unwrap();
        let p = prices(&[1.5, 1.7, 1.9]);
        let out = market_outcome(&params, &BundleCatalog::baseline(), &p, &exposure).unwrap();
        for i in 0..3 {
            assert_eq!(out.profit[i], (p[i] - 1.0) * out.demand[i]);
        }
        assert!(out.total_demand() <= 1.0);
    }

    #[test]
    fn bundle_objectives_match_oracle() {
        let params = MarketParams::baseline();
        let p = prices(&[1.92, 1.92, 1.47]);
        let (r, d) = bundle_objective(&params, &[0, 1], &p, 0).unwrap();
        assert!((r - 0.674_944_757_229_816_4).abs() < 1e-14);
        assert!((d - 0.733_635_605_684_583).abs() < 1e-14);
        let (r, d) = bundle_objective(&params, &[0, 2], &p, 0).unwrap();
        assert!((r - 0.483_980_555_246_601_6).abs() < 1e-14);
        assert!((d - 0.906_614_192_265_080_5).abs() < 1e-14);
    }

    #[test]
    fn zero_margin_bundle() {
        let params = MarketParams::baseline();
        let (r, d) = bundle_objective(&params, &[2], &prices(&[1.5, 1.5, 1.0]), 0).unwrap();
        assert_eq!(r, 0.0);
        assert!(d > 0.0);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let params = MarketParams::baseline();
        let err = market_outcome(
            &params,
            &BundleCatalog::baseline(),
            &prices(&[2.0, 2.0, 2.0]),
            &ExposureAllocation::uniform(3, 2),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Input(_)));
        assert!(PriceVector::new(vec![1.0, -0.5]).is_err());
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(MarketParams::symmetric(3, 2.0, 1.0, 0.0, 0.0).is_err());
        assert!(MarketParams::new(vec![2.0; 3], vec![1.0; 2], 0.25, vec![Segment::new(1.0, 0.0)]).is_err());
        assert!(MarketParams::new(
            vec![2.0; 3],
            vec![1.0; 3],
            0.25,
            vec![Segment::new(0.5, 0.0), Segment::new(0.4, 0.25)]
        )
        .is_err());
        assert!(BundleCatalog::new(vec![vec![0, 0]], 3).is_err());
        assert!(BundleCatalog::new(vec![vec![]], 3).is_err());
        assert!(BundleCatalog::new(vec![vec![3]], 3).is_err());
        assert!(ExposureAllocation::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(ExposureAllocation::new(vec![vec![1.5, -0.5]]).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let params = MarketParams::<f32>::baseline();
        let p = PriceVector::new(vec![1.92f32, 1.92, 1.47]).unwrap();
        let (r, _) = bundle_objective(&params, &[0, 1], &p, 0).unwrap();
        assert!((r - 0.674_944_76).abs() < 1e-5);
    }
}
