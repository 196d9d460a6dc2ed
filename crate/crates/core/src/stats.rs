//! Cross-run summaries of seller prices and profits.

use crate::engine::RunTrace;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One point of a moving-window series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowPoint<T> {
    /// Period of the last observation in the window.
    pub t: u64,
    pub mean: T,
    pub min: T,
    pub max: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryStats<T> {
    pub runs: usize,
    pub seller: usize,
    /// Periods averaged at the end of each run.
    pub tail_periods: usize,
    /// Mean over the tail of the across-run mean price.
    pub mean_price: T,
    pub mean_profit: T,
    /// Standard deviation, over tail periods, of the across-run mean series.
    pub price_std_time: T,
    pub profit_std_time: T,
    /// Standard deviation across runs of each run's tail mean.
    pub price_std_runs: T,
    pub profit_std_runs: T,
    /// Per-run tail means of price and profit.
    pub run_means: Vec<(T, T)>,
    /// Moving average of the across-run mean price over the thinned trace.
    pub moving_average: Vec<WindowPoint<T>>,
}

/// Population mean and standard deviation.
pub fn mean_std<T: Scalar>(values: &[T]) -> (T, T) {
    if values.is_empty() {
        return (T::nan(), T::nan());
    }
    let n = T::from_usize_lossy(values.len());
    let mean = values.iter().fold(T::zero(), |a, &v| a + v) / n;
    let var = values.iter().fold(T::zero(), |a, &v| a + (v - mean) * (v - mean)) / n;
    (mean, var.sqrt())
}

/// Mean, minimum and maximum of every full window of `window` consecutive values.
pub fn moving_window<T: Scalar>(series: &[T], window: usize) -> Vec<(T, T, T)> {
    if window == 0 || series.len() < window {
        return Vec::new();
    }
    let w = T::from_usize_lossy(window);
    series
        .windows(window)
        .map(|win| {
            let (sum, lo, hi) = win.iter().fold((T::zero(), T::infinity(), T::neg_infinity()), |(s, lo, hi), &v| {
                (s + v, lo.min(v), hi.max(v))
            });
            (sum / w, lo, hi)
        })
        .collect()
}

/// Summarizes seller 1 (index 0).
pub fn summarize<T: Scalar>(traces: &[RunTrace<T>], window: usize) -> Result<SummaryStats<T>> {
    summarize_seller(traces, 0, window)
}

/// Summarizes `seller` across runs. `window` is measured in periods; on a thinned trace it
/// covers `max(1, window / stride)` records.
pub fn summarize_seller<T: Scalar>(traces: &[RunTrace<T>], seller: usize, window: usize) -> Result<SummaryStats<T>> {
    let first = traces.first().ok_or_else(|| Error::input("no traces to summarize"))?;
    if traces
        .iter()
        .any(|t| t.horizon != first.horizon || t.stride != first.stride || t.tail.len() != first.tail.len())
    {
        return Err(Error::input("traces have different horizons or strides"));
    }
    if seller >= first.n_products {
        return Err(Error::input(format!("seller {seller} out of range")));
    }
    let runs = T::from_usize_lossy(traces.len());
    let across = |series: fn(&RunTrace<T>, usize, usize) -> T, len: usize| -> Vec<T> {
        (0..len)
            .map(|i| traces.iter().fold(T::zero(), |a, tr| a + series(tr, i, seller)) / runs)
            .collect()
    };

    let tail_len = first.tail.len();
    let tail_price = across(|tr, i, s| tr.tail[i].prices[s], tail_len);
    let tail_profit = across(|tr, i, s| tr.tail[i].profits[s], tail_len);
    let (mean_price, price_std_time) = mean_std(&tail_price);
    let (mean_profit, profit_std_time) = mean_std(&tail_profit);

    let run_means: Vec<(T, T)> = traces.iter().map(|tr| tr.tail_means(seller)).collect();
    let (_, price_std_runs) = mean_std(&run_means.iter().map(|m| m.0).collect::<Vec<_>>());
    let (_, profit_std_runs) = mean_std(&run_means.iter().map(|m| m.1).collect::<Vec<_>>());

    let record_price = across(|tr, i, s| tr.records[i].prices[s], first.records.len());
    let window_records = (window as u64 / first.stride).max(1) as usize;
    let moving_average = moving_window(&record_price, window_records)
        .into_iter()
        .enumerate()
        .map(|(i, (mean, min, max))| WindowPoint {
            t: first.records[i + window_records - 1].t,
            mean,
            min,
            max,
        })
        .collect();

    Ok(SummaryStats {
        runs: traces.len(),
        seller,
        tail_periods: tail_len,
        mean_price,
        mean_profit,
        price_std_time,
        profit_std_time,
        price_std_runs,
        profit_std_runs,
        run_means,
        moving_average,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::PeriodRecord;

    fn trace(prices: &[f64]) -> RunTrace<f64> {
        let records: Vec<PeriodRecord<f64>> = prices
            .iter()
            .enumerate()
            .map(|(i, &p)| PeriodRecord {
                t: i as u64 + 1,
                actions: vec![0],
                prices: vec![p],
                exposure: vec![1.0],
                profits: vec![p - 1.0],
                epsilon: 0.0,
            })
            .collect();
        RunTrace {
            seed: 0,
            horizon: prices.len() as u64,
            stride: 1,
            n_products: 1,
            n_bundles: 1,
            n_segments: 1,
            tail: records.clone(),
            records,
            seller_tables: vec![],
            recommender_table: None,
            final_state: 0,
            converged_at: None,
        }
    }

    #[test]
    fn constant_series() {
        let s = summarize(&[trace(&[1.7; 50])], 10).unwrap();
        assert!((s.mean_price - 1.7).abs() < 1e-12);
        assert!(s.price_std_time < 1e-12);
        assert!(s.price_std_runs < 1e-12);
        assert_eq!(s.moving_average.len(), 41);
    }

    #[test]
    fn two_runs_average() {
        let s = summarize(&[trace(&[1.5; 20]), trace(&[1.9; 20])], 5).unwrap();
        assert!((s.mean_price - 1.7).abs() < 1e-15);
        assert!((s.price_std_runs - 0.2).abs() < 1e-12);
        assert!(s.price_std_time < 1e-12);
    }

    #[test]
    fn alternating_moving_average() {
        let series: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { 1.0 } else { 2.0 }).collect();
        let s = summarize(&[trace(&series)], 2).unwrap();
        assert_eq!(s.moving_average.len(), 9);
        for p in &s.moving_average {
            assert_eq!(p.mean, 1.5);
            assert_eq!((p.min, p.max), (1.0, 2.0));
        }
    }

    #[test]
    fn mismatched_horizons_rejected() {
        assert!(summarize(&[trace(&[1.0; 5]), trace(&[1.0; 6])], 2).is_err());
        assert!(summarize::<f64>(&[], 2).is_err());
    }
}
