//! Per-mechanism summary metrics: who won, who gained, and how the gains
//! spread over the winner's critical ancestors.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::critical::critical_structure;
use crate::error::Result;
use crate::graph::build_effective_graph;
use crate::mechanisms::{run_mechanism_lenient, Mechanism};
use crate::money::{self, Money};
use crate::network::{ActionProfile, Network, NodeId};

/// Outcome metrics of one mechanism under truthful reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricRecord {
    pub mechanism: Mechanism,
    pub winner: Option<NodeId>,
    pub social_welfare: Money,
    pub revenue: Money,
    pub total_buyer_utility: Money,
    /// Buyers with strictly positive utility.
    pub beneficial_buyers: BTreeSet<NodeId>,
    /// Critical ancestors of the winner, the winner included.
    pub critical_ancestors: usize,
    /// Beneficial buyers over critical ancestors, exactly; zero for an
    /// empty market.
    pub beneficial_ratio: Money,
}

/// Runs `mechanism` truthfully on `net` and summarises the outcome. An
/// empty market produces the all-zero record.
pub fn metric_record(net: &Network, mechanism: Mechanism) -> Result<MetricRecord> {
    let profile = ActionProfile::truthful(net);
    let outcome = run_mechanism_lenient(mechanism, net, &profile)?;

    let (critical_ancestors, beneficial_ratio, beneficial_buyers) = match outcome.winner {
        None => (0, money::zero(), BTreeSet::new()),
        Some(winner) => {
            let graph = build_effective_graph(net, &profile)?;
            let ancestors = critical_structure(&graph, winner)?.critical_ancestors();
            let beneficial = outcome.beneficial_buyers();
            let ratio = Money::new(
                BigInt::from(beneficial.len()),
                BigInt::from(ancestors.len()),
            );
            (ancestors.len(), ratio, beneficial)
        }
    };

    Ok(MetricRecord {
        mechanism,
        winner: outcome.winner,
        social_welfare: outcome.social_welfare.clone(),
        revenue: outcome.seller_revenue.clone(),
        total_buyer_utility: outcome.total_buyer_utility(),
        beneficial_buyers,
        critical_ancestors,
        beneficial_ratio,
    })
}

/// The fair mechanism and the baseline side by side.
pub fn comparison_metrics(net: &Network) -> Result<(MetricRecord, MetricRecord)> {
    Ok((
        metric_record(net, Mechanism::Fdm)?,
        metric_record(net, Mechanism::Idm)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::money::{int, ratio, to_decimal_string};

    #[test]
    fn fixture_side_by_side() {
        let net = fixture::network();
        let (fdm, idm) = comparison_metrics(&net).unwrap();
        let label = |ids: &BTreeSet<NodeId>| -> Vec<&str> {
            ids.iter().map(|&i| net.label(i)).collect()
        };

        assert_eq!(fdm.winner, net.node_by_label("l"));
        assert_eq!(idm.winner, net.node_by_label("l"));
        assert_eq!(fdm.social_welfare, int(13));
        assert_eq!(idm.social_welfare, int(13));
        assert_eq!(label(&fdm.beneficial_buyers), ["b", "f", "g", "h", "j", "k", "l"]);
        assert_eq!(label(&idm.beneficial_buyers), ["b", "l"]);
        assert_eq!(fdm.beneficial_buyers.len(), 7);
        assert_eq!(idm.beneficial_buyers.len(), 2);
        assert_eq!(fdm.critical_ancestors, 7);
        assert_eq!(idm.critical_ancestors, 7);
        assert_eq!(fdm.beneficial_ratio, int(1));
        assert_eq!(idm.beneficial_ratio, ratio(2, 7));
        assert_eq!(to_decimal_string(&idm.beneficial_ratio, 2), "0.29");
        assert_eq!(fdm.total_buyer_utility, ratio(17, 3));
        assert_eq!(idm.total_buyer_utility, int(6));
        assert_eq!(fdm.revenue, ratio(22, 3));
        assert_eq!(to_decimal_string(&fdm.revenue, 2), "7.33");
        assert_eq!(idm.revenue, int(7));
    }

    #[test]
    fn empty_market_yields_the_zero_record() {
        let net = Network::builder().build().unwrap();
        for mech in Mechanism::ALL {
            let rec = metric_record(&net, mech).unwrap();
            assert_eq!(rec.winner, None);
            assert_eq!(rec.critical_ancestors, 0);
            assert_eq!(rec.beneficial_ratio, money::zero());
            assert_eq!(rec.revenue, money::zero());
            assert_eq!(rec.total_buyer_utility, money::zero());
            assert!(rec.beneficial_buyers.is_empty());
        }
    }

    #[test]
    fn vcg_record_is_well_formed() {
        let net = fixture::network();
        let rec = metric_record(&net, Mechanism::Vcg).unwrap();
        assert_eq!(rec.winner, net.node_by_label("d"));
        assert_eq!(rec.revenue, int(3));
        assert_eq!(rec.beneficial_buyers.len(), 1);
        // d's only critical ancestor is d herself
        assert_eq!(rec.critical_ancestors, 1);
        assert_eq!(rec.beneficial_ratio, int(1));
    }
}
