//! Ground-truth market instances and reported actions.

use std::collections::BTreeSet;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::money::{self, Money};

/// Compact node handle. The seller is always node 0; buyers are 1..=n in
/// the order they were declared, which is also the deterministic
/// tie-breaking order (lower id wins).
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const SELLER: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_seller(self) -> bool {
        self == Self::SELLER
    }
}

/// A ground-truth instance: the seller, the buyer set with true
/// valuations, and the symmetric neighbour relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    labels: Vec<String>,
    valuations: Vec<Money>,
    neighbors: Vec<Vec<NodeId>>,
}

impl Network {
    pub fn builder() -> NetworkBuilder {
        NetworkBuilder::default()
    }

    /// Total node count including the seller.
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn buyer_count(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn buyers(&self) -> impl Iterator<Item = NodeId> + '_ {
        (1..self.labels.len() as u32).map(NodeId)
    }

    pub fn is_buyer(&self, id: NodeId) -> bool {
        !id.is_seller() && id.index() < self.labels.len()
    }

    /// True valuation; the seller's is zero.
    pub fn valuation(&self, id: NodeId) -> &Money {
        &self.valuations[id.index()]
    }

    /// True neighbour set, sorted by id.
    pub fn neighbors(&self, id: NodeId) -> &[NodeId] {
        &self.neighbors[id.index()]
    }

    pub fn seller_neighbors(&self) -> &[NodeId] {
        &self.neighbors[0]
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id.index()]
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| NodeId(i as u32))
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.neighbors[a.index()].binary_search(&b).is_ok()
    }
}

/// Incremental [`Network`] construction. Edges are inserted symmetrically;
/// `build` validates the whole instance.
pub struct NetworkBuilder {
    labels: Vec<String>,
    valuations: Vec<Money>,
    edges: Vec<(NodeId, NodeId)>,
}

impl Default for NetworkBuilder {
    fn default() -> Self {
        NetworkBuilder {
            labels: vec!["s".to_string()],
            valuations: vec![money::zero()],
            edges: Vec::new(),
        }
    }
}

impl NetworkBuilder {
    pub fn seller_label(&mut self, label: &str) -> &mut Self {
        self.labels[0] = label.to_string();
        self
    }

    /// Declares a buyer and returns her id.
    pub fn buyer(&mut self, label: &str, valuation: Money) -> NodeId {
        let id = NodeId(self.labels.len() as u32);
        self.labels.push(label.to_string());
        self.valuations.push(valuation);
        id
    }

    pub fn edge(&mut self, a: NodeId, b: NodeId) -> &mut Self {
        self.edges.push((a, b));
        self
    }

    pub fn build(&self) -> Result<Network> {
        let n = self.labels.len();
        let mut seen = BTreeSet::new();
        for label in &self.labels {
            if !seen.insert(label.clone()) {
                return Err(Error::DuplicateId { id: label.clone() });
            }
        }
        for (i, v) in self.valuations.iter().enumerate() {
            if v.is_negative() {
                return Err(Error::NegativeValuation {
                    buyer: self.labels[i].clone(),
                });
            }
        }
        let mut adj: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); n];
        for &(a, b) in &self.edges {
            if a == b {
                return Err(Error::InvalidInstance(format!(
                    "self-loop on node {}",
                    self.labels[a.index()]
                )));
            }
            if a.index() >= n || b.index() >= n {
                return Err(Error::InvalidInstance("edge endpoint out of range".into()));
            }
            adj[a.index()].insert(b);
            adj[b.index()].insert(a);
        }
        Ok(Network {
            labels: self.labels.clone(),
            valuations: self.valuations.clone(),
            neighbors: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }
}

/// One buyer's report: the valuation she bids and the neighbours she
/// actually invites. Invited sets may drop true neighbours but never add.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub valuation: Money,
    pub invited: BTreeSet<NodeId>,
}

/// Per-buyer reports; `None` is a buyer who takes no action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionProfile {
    reports: Vec<Option<Report>>,
}

impl ActionProfile {
    /// Everyone reports her true valuation and invites every neighbour.
    pub fn truthful(net: &Network) -> Self {
        let mut reports = vec![None];
        for b in net.buyers() {
            reports.push(Some(Report {
                valuation: net.valuation(b).clone(),
                invited: net.neighbors(b).iter().copied().collect(),
            }));
        }
        ActionProfile { reports }
    }

    pub fn report(&self, buyer: NodeId) -> Option<&Report> {
        self.reports[buyer.index()].as_ref()
    }

    pub fn set(&mut self, buyer: NodeId, report: Option<Report>) {
        self.reports[buyer.index()] = report;
    }

    /// Reported valuation, if the buyer acts.
    pub fn bid(&self, buyer: NodeId) -> Option<&Money> {
        self.report(buyer).map(|r| &r.valuation)
    }

    pub fn with_valuation(mut self, buyer: NodeId, v: Money) -> Self {
        if let Some(r) = self.reports[buyer.index()].as_mut() {
            r.valuation = v;
        }
        self
    }

    pub fn with_invited<I: IntoIterator<Item = NodeId>>(mut self, buyer: NodeId, inv: I) -> Self {
        if let Some(r) = self.reports[buyer.index()].as_mut() {
            r.invited = inv.into_iter().collect();
        }
        self
    }

    pub fn with_nil(mut self, buyer: NodeId) -> Self {
        self.reports[buyer.index()] = None;
        self
    }

    /// Checks the profile against the ground truth: invited sets must be
    /// subsets of true neighbour sets and bids must be non-negative.
    pub fn validate(&self, net: &Network) -> Result<()> {
        if self.reports.len() != net.node_count() {
            return Err(Error::InvalidInstance(
                "profile size does not match network".into(),
            ));
        }
        for buyer in net.buyers() {
            if let Some(r) = self.report(buyer) {
                if r.valuation.is_negative() {
                    return Err(Error::NegativeValuation {
                        buyer: net.label(buyer).to_string(),
                    });
                }
                for &j in &r.invited {
                    if !net.has_edge(buyer, j) {
                        return Err(Error::InventedNeighbor {
                            buyer: net.label(buyer).to_string(),
                            neighbor: if j.index() < net.node_count() {
                                net.label(j).to_string()
                            } else {
                                format!("#{}", j.0)
                            },
                        });
                    }
                }
            }
        }
        Ok(())
    }
}
