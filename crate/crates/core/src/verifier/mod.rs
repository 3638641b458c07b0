//! Mechanical checks of the mechanisms' advertised properties.
//!
//! Everything here is brute force on purpose: definitional oracles and
//! exhaustive deviation sweeps at desk scale, kept entirely independent
//! of the efficient implementations they cross-examine.

mod ic;
mod ir;
mod metrics;
mod oracle;
mod revenue;
mod selftest;
mod suite;

pub use ic::{check_ic, pivotal_grid, ValuationGridPolicy, IC_MAX_BUYERS};
pub use ir::{check_ir, IR_SWEEP_MAX_BUYERS};
pub use metrics::{comparison_metrics, metric_record, MetricRecord};
pub use oracle::{oracle_critical_structure, ORACLE_MAX_BUYERS, ORACLE_WORK_BUDGET};
pub use revenue::check_revenue_chain;
pub use selftest::{detector_self_test, overcharging_first_price};
pub use suite::{
    check_oracle_equivalence, ic_suite, ir_suite, oracle_suite, revenue_suite, SweepConfig,
};

use std::collections::BTreeSet;
use std::fmt;

use crate::mechanisms::Mechanism;
use crate::money::{format_money, Money};
use crate::network::{Network, NodeId, Report};

/// One agent's examined deviation and what it earned her.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeviationReport {
    pub mechanism: Mechanism,
    pub agent: NodeId,
    /// `None` is the nil deviation: the agent stays out entirely.
    pub deviation: Option<Report>,
    pub truthful_utility: Money,
    pub deviating_utility: Money,
    pub profitable: bool,
}

/// A single property breach, tagged with the instance seed for replay.
#[derive(Clone, Debug)]
pub struct Violation {
    pub seed: u64,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug)]
pub enum ViolationKind {
    ProfitableDeviation(DeviationReport),
    NegativeUtility {
        mechanism: Mechanism,
        agent: NodeId,
        invited: BTreeSet<NodeId>,
        utility: Money,
    },
    BrokenInequality {
        description: String,
    },
    StructureMismatch {
        description: String,
    },
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::ProfitableDeviation(d) => {
                let dev = match &d.deviation {
                    None => "nil".to_string(),
                    Some(r) => format!(
                        "bid {} inviting {{{}}}",
                        format_money(&r.valuation),
                        r.invited
                            .iter()
                            .map(|i| format!("#{}", i.0))
                            .collect::<Vec<_>>()
                            .join(",")
                    ),
                };
                write!(
                    f,
                    "{}: agent #{} profits from {dev}: {} > {}",
                    d.mechanism,
                    d.agent.0,
                    format_money(&d.deviating_utility),
                    format_money(&d.truthful_utility)
                )
            }
            ViolationKind::NegativeUtility {
                mechanism,
                agent,
                utility,
                ..
            } => write!(
                f,
                "{mechanism}: agent #{} ends with utility {}",
                agent.0,
                format_money(utility)
            ),
            ViolationKind::BrokenInequality { description }
            | ViolationKind::StructureMismatch { description } => f.write_str(description),
        }
    }
}

/// Result of one property sweep. Empty `violations` means the property
/// held everywhere it was checked.
#[derive(Clone, Debug, Default)]
pub struct PropertyReport {
    pub property: String,
    pub instances_checked: usize,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl PropertyReport {
    pub fn new(property: impl Into<String>) -> Self {
        PropertyReport {
            property: property.into(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn absorb(&mut self, other: PropertyReport) {
        self.instances_checked += other.instances_checked;
        self.violations.extend(other.violations);
        self.notes.extend(other.notes);
    }
}

/// All reportable neighbour subsets of a buyer.
///
/// The seller is kept in every subset when she is a true neighbour: the
/// seller-side edge exists independently of the buyer's report, so
/// toggling her membership cannot change any outcome.
pub(crate) fn reportable_subsets(net: &Network, buyer: NodeId) -> Vec<BTreeSet<NodeId>> {
    let others: Vec<NodeId> = net
        .neighbors(buyer)
        .iter()
        .copied()
        .filter(|n| !n.is_seller())
        .collect();
    let has_seller = net.has_edge(buyer, NodeId::SELLER);
    let mut subsets = Vec::with_capacity(1 << others.len());
    for mask in 0u32..(1 << others.len()) {
        let mut set: BTreeSet<NodeId> = others
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &n)| n)
            .collect();
        if has_seller {
            set.insert(NodeId::SELLER);
        }
        subsets.push(set);
    }
    subsets
}
