//! Side-by-side comparison of finished batches.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::batch::{load_summary, BatchSummary};
use crate::output::{create, display, num};

/// Loads `summary.json` from each directory, ordered profit, demand, equal, then the learning
/// recommenders. Batches of the same policy keep their command-line order.
pub fn load_batches(dirs: &[PathBuf]) -> anyhow::Result<Vec<BatchSummary>> {
    let mut batches = dirs.iter().map(|d| load_summary(d)).collect::<anyhow::Result<Vec<_>>>()?;
    batches.sort_by_key(|b| b.policy.rank());
    Ok(batches)
}

/// Seller 1's mean price and profit per batch, with the over-time standard deviation in
/// parentheses.
pub fn render_table(batches: &[BatchSummary]) -> String {
    let cell = |mean: f64, std: f64| format!("{} ({})", display(mean), display(std));
    let rows = [
        std::iter::once(String::new())
            .chain(batches.iter().map(|b| b.scenario.clone()))
            .collect::<Vec<_>>(),
        std::iter::once("Mean price".to_string())
            .chain(batches.iter().map(|b| cell(b.sellers[0].mean_price, b.sellers[0].price_std_time)))
            .collect(),
        std::iter::once("Mean profit".to_string())
            .chain(batches.iter().map(|b| cell(b.sellers[0].mean_profit, b.sellers[0].profit_std_time)))
            .collect(),
    ];
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let line: Vec<String> = row.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn write_table_csv(path: &Path, batches: &[BatchSummary]) -> anyhow::Result<()> {
    let mut out = create(path)?;
    writeln!(
        out,
        "scenario,policy,personalized,runs,horizon,mean_price,price_std_time,price_std_runs,mean_profit,profit_std_time,profit_std_runs"
    )?;
    for b in batches {
        let s = &b.sellers[0];
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            b.scenario,
            b.policy.as_str(),
            b.personalized,
            b.runs,
            b.horizon,
            num(s.mean_price),
            num(s.price_std_time),
            num(s.price_std_runs),
            num(s.mean_profit),
            num(s.profit_std_time),
            num(s.profit_std_runs),
        )?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::batch::SellerSummary;
    use crate::config::PolicyName;

    fn summary(name: &str, policy: PolicyName, price: f64, std: f64) -> BatchSummary {
        BatchSummary {
            scenario: name.into(),
            policy,
            personalized: false,
            runs: 1,
            seed: 0,
            horizon: 10,
            tail_periods: 10,
            moving_average_window: 1000,
            sellers: vec![SellerSummary {
                seller: 1,
                mean_price: price,
                mean_profit: price - 1.0,
                price_std_time: std,
                profit_std_time: std,
                price_std_runs: 0.0,
                profit_std_runs: 0.0,
            }],
        }
    }

    #[test]
    fn constant_batch_shows_zero_spread() {
        let table = render_table(&[summary("flat", PolicyName::Equal, 1.7, 0.0)]);
        assert!(table.contains("1.7000 (0.0000)"), "{table}");
        assert!(table.contains("0.7000 (0.0000)"), "{table}");
    }

    #[test]
    fn columns_follow_policy_order() {
        let dir = tempfile::tempdir().unwrap();
        let mut dirs = Vec::new();
        for (name, policy) in [
            ("baseline-equal", PolicyName::Equal),
            ("baseline-profit", PolicyName::Profit),
            ("baseline-demand", PolicyName::Demand),
        ] {
            let d = dir.path().join(name);
            std::fs::create_dir_all(&d).unwrap();
            crate::output::write_json(&d.join("summary.json"), &summary(name, policy, 1.5, 0.01)).unwrap();
            dirs.push(d);
        }
        let batches = load_batches(&dirs).unwrap();
        let header = render_table(&batches).lines().next().unwrap().to_string();
        let p = header.find("baseline-profit").unwrap();
        let d = header.find("baseline-demand").unwrap();
        let e = header.find("baseline-equal").unwrap();
        assert!(p < d && d < e, "{header}");
    }

    #[test]
    fn values_use_four_decimals() {
        let table = render_table(&[summary("x", PolicyName::Profit, 1.918_349_9, 0.003_850_1)]);
        assert!(table.contains("1.9183 (0.0039)"), "{table}");
    }

    #[test]
    fn missing_summary_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(load_batches(&[dir.path().to_path_buf()]).is_err());
    }
}
