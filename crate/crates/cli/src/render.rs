//! Text, JSON and CSV rendering. All money is printed as exact rationals;
//! decimals appear only as a parenthesised convenience.

use serde_json::json;

use dauction_core::mechanisms::Outcome;
use dauction_core::money::{self, format_money, to_decimal_string, Money};
use dauction_core::network::{ActionProfile, Network};
use dauction_core::verifier::{MetricRecord, PropertyReport, ViolationKind};
use dauction_core::Mechanism;

use crate::commands::{ExperimentConfig, ALL_METRICS};

fn money_with_hint(m: &Money) -> String {
    if m.is_integer() {
        format_money(m)
    } else {
        format!("{} (~{})", format_money(m), to_decimal_string(m, 2))
    }
}

/// Per-buyer money vector table: paid, received, redistributed, plus the
/// net balance and the resulting utility.
pub fn outcome_table(net: &Network, profile: &ActionProfile, out: &Outcome) -> String {
    let mut s = String::new();
    s.push_str(&format!("mechanism       {}\n", out.mechanism));
    s.push_str(&format!(
        "winner          {}\n",
        out.winner.map_or("-".into(), |w| net.label(w).to_string())
    ));
    s.push_str(&format!(
        "social welfare  {}\n",
        money_with_hint(&out.social_welfare)
    ));
    s.push_str(&format!(
        "seller revenue  {}\n\n",
        money_with_hint(&out.seller_revenue)
    ));
    s.push_str(&format!(
        "{:<8}{:>8}{:>10}{:>10}{:>14}{:>10}{:>10}\n",
        "buyer", "bid", "paid", "received", "redistributed", "net", "utility"
    ));
    for b in net.buyers() {
        let bid = profile
            .bid(b)
            .map_or("-".to_string(), format_money);
        s.push_str(&format!(
            "{:<8}{:>8}{:>10}{:>10}{:>14}{:>10}{:>10}\n",
            net.label(b),
            bid,
            format_money(&out.paid[&b]),
            format_money(&out.received[&b]),
            format_money(&out.reward[&b]),
            format_money(&out.payment[&b]),
            format_money(&out.utility[&b]),
        ));
    }
    s
}

fn outcome_value(net: &Network, profile: &ActionProfile, out: &Outcome) -> serde_json::Value {
    let buyers: Vec<_> = net
        .buyers()
        .map(|b| {
            json!({
                "id": net.label(b),
                "bid": profile.bid(b).map(format_money),
                "allocated": out.allocation[&b],
                "paid": format_money(&out.paid[&b]),
                "received": format_money(&out.received[&b]),
                "redistributed": format_money(&out.reward[&b]),
                "payment": format_money(&out.payment[&b]),
                "utility": format_money(&out.utility[&b]),
            })
        })
        .collect();
    json!({
        "mechanism": out.mechanism.to_string(),
        "winner": out.winner.map(|w| net.label(w).to_string()),
        "social_welfare": format_money(&out.social_welfare),
        "seller_revenue": format_money(&out.seller_revenue),
        "buyers": buyers,
    })
}

/// Machine-readable outcome dump, keyed by buyer label: a single object
/// for one mechanism, an array for several.
pub fn outcomes_json(net: &Network, profile: &ActionProfile, outs: &[Outcome]) -> String {
    let doc = if outs.len() == 1 {
        outcome_value(net, profile, &outs[0])
    } else {
        serde_json::Value::Array(
            outs.iter()
                .map(|o| outcome_value(net, profile, o))
                .collect(),
        )
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("json renders");
    text.push('\n');
    text
}

/// Summary metrics block printed under an outcome table.
pub fn metrics_block(net: &Network, record: &MetricRecord) -> String {
    let names: Vec<&str> = record
        .beneficial_buyers
        .iter()
        .map(|&b| net.label(b))
        .collect();
    let mut s = String::new();
    s.push_str(&format!(
        "\nbeneficial buyers    {} ({})\n",
        if names.is_empty() { "-".into() } else { names.join(", ") },
        names.len()
    ));
    s.push_str(&format!(
        "critical ancestors   {}\n",
        record.critical_ancestors
    ));
    s.push_str(&format!(
        "beneficial ratio     {}\n",
        money_with_hint(&record.beneficial_ratio)
    ));
    s.push_str(&format!(
        "total buyer utility  {}\n",
        money_with_hint(&record.total_buyer_utility)
    ));
    s
}

pub fn print_report(report: &PropertyReport) {
    println!(
        "{:<36} instances={:<6} violations={}",
        report.property,
        report.instances_checked,
        report.violations.len()
    );
    let mut seeds: Vec<u64> = report.violations.iter().map(|v| v.seed).collect();
    seeds.dedup();
    if !seeds.is_empty() {
        let shown: Vec<String> = seeds.iter().take(12).map(|s| s.to_string()).collect();
        let more = if seeds.len() > 12 {
            format!(" (+{} more)", seeds.len() - 12)
        } else {
            String::new()
        };
        println!("  violating seeds: {}{more}", shown.join(", "));
        for v in report.violations.iter().take(4) {
            println!("  [seed {}] {}", v.seed, v.kind);
        }
    }
    for note in &report.notes {
        println!("  note: {note}");
    }
}

pub fn reports_json(reports: &[PropertyReport]) -> String {
    let docs: Vec<_> = reports
        .iter()
        .map(|r| {
            let violations: Vec<_> = r
                .violations
                .iter()
                .map(|v| {
                    let kind = match &v.kind {
                        ViolationKind::ProfitableDeviation(_) => "profitable_deviation",
                        ViolationKind::NegativeUtility { .. } => "negative_utility",
                        ViolationKind::BrokenInequality { .. } => "broken_inequality",
                        ViolationKind::StructureMismatch { .. } => "structure_mismatch",
                    };
                    json!({
                        "seed": v.seed,
                        "kind": kind,
                        "detail": v.kind.to_string(),
                    })
                })
                .collect();
            json!({
                "property": r.property,
                "instances_checked": r.instances_checked,
                "passed": r.passed(),
                "violations": violations,
                "notes": r.notes,
            })
        })
        .collect();
    let mut text =
        serde_json::to_string_pretty(&serde_json::Value::Array(docs)).expect("json renders");
    text.push('\n');
    text
}

/// CSV for a batch experiment: one row per instance per mechanism, then
/// one mean row per mechanism. Ratio columns carry both the exact
/// rational and a two-place decimal.
pub fn experiment_csv(
    cfg: &ExperimentConfig,
    mechanisms: &[Mechanism],
    rows: &[(u64, Vec<MetricRecord>)],
) -> String {
    let selected: Vec<&str> = match &cfg.metrics {
        None => ALL_METRICS.to_vec(),
        Some(sel) => ALL_METRICS
            .iter()
            .copied()
            .filter(|m| sel.iter().any(|s| s == m))
            .collect(),
    };

    let mut header = vec![
        "seed".to_string(),
        "generator".to_string(),
        "n".to_string(),
        "mechanism".to_string(),
        "winner".to_string(),
    ];
    for metric in &selected {
        header.push(metric.to_string());
        if *metric == "beneficial_ratio" {
            header.push("beneficial_ratio_decimal".to_string());
        }
    }
    let mut csv = header.join(",");
    csv.push('\n');

    let n = cfg.generator.buyer_count().to_string();
    let gen = cfg.generator.to_string();
    let metric_cells = |record: &MetricRecord, cells: &mut Vec<String>| {
        for metric in &selected {
            match *metric {
                "social_welfare" => cells.push(format_money(&record.social_welfare)),
                "revenue" => cells.push(format_money(&record.revenue)),
                "total_buyer_utility" => cells.push(format_money(&record.total_buyer_utility)),
                "beneficial_buyers" => cells.push(record.beneficial_buyers.len().to_string()),
                "critical_ancestors" => cells.push(record.critical_ancestors.to_string()),
                "beneficial_ratio" => {
                    cells.push(format_money(&record.beneficial_ratio));
                    cells.push(to_decimal_string(&record.beneficial_ratio, 2));
                }
                _ => unreachable!("metric names are validated"),
            }
        }
    };

    for (seed, records) in rows {
        for record in records {
            let mut cells = vec![
                seed.to_string(),
                gen.clone(),
                n.clone(),
                record.mechanism.to_string(),
                // generated instances label buyers by their numeric id
                record.winner.map_or(String::new(), |w| w.0.to_string()),
            ];
            metric_cells(record, &mut cells);
            csv.push_str(&cells.join(","));
            csv.push('\n');
        }
    }

    // per-mechanism means, exact
    let count = money::int(rows.len() as i64);
    for (mi, mech) in mechanisms.iter().enumerate() {
        let mut sums = MeanAccumulator::new();
        for (_, records) in rows {
            sums.add(&records[mi]);
        }
        let mut cells = vec![
            "mean".to_string(),
            gen.clone(),
            n.clone(),
            mech.to_string(),
            String::new(),
        ];
        for metric in &selected {
            match *metric {
                "social_welfare" => cells.push(format_money(&(&sums.welfare / &count))),
                "revenue" => cells.push(format_money(&(&sums.revenue / &count))),
                "total_buyer_utility" => cells.push(format_money(&(&sums.utility / &count))),
                "beneficial_buyers" => cells.push(format_money(&(&sums.beneficial / &count))),
                "critical_ancestors" => cells.push(format_money(&(&sums.ancestors / &count))),
                "beneficial_ratio" => {
                    let mean = &sums.ratio / &count;
                    cells.push(format_money(&mean));
                    cells.push(to_decimal_string(&mean, 2));
                }
                _ => unreachable!(),
            }
        }
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    csv
}

struct MeanAccumulator {
    welfare: Money,
    revenue: Money,
    utility: Money,
    beneficial: Money,
    ancestors: Money,
    ratio: Money,
}

impl MeanAccumulator {
    fn new() -> Self {
        MeanAccumulator {
            welfare: money::zero(),
            revenue: money::zero(),
            utility: money::zero(),
            beneficial: money::zero(),
            ancestors: money::zero(),
            ratio: money::zero(),
        }
    }

    fn add(&mut self, r: &MetricRecord) {
        self.welfare = &self.welfare + &r.social_welfare;
        self.revenue = &self.revenue + &r.revenue;
        self.utility = &self.utility + &r.total_buyer_utility;
        self.beneficial = &self.beneficial + money::int(r.beneficial_buyers.len() as i64);
        self.ancestors = &self.ancestors + money::int(r.critical_ancestors as i64);
        self.ratio = &self.ratio + &r.beneficial_ratio;
    }
}
