//! The effective participation graph induced by a feasible action profile.

use std::collections::{BTreeSet, VecDeque};

use crate::error::Result;
use crate::network::{ActionProfile, Network, NodeId};

/// Who actually joined the auction and how they are wired together.
///
/// Participation spreads along invitations only: the seller's true
/// neighbours with a non-nil report join, and a buyer joins once some
/// participant invites her and she reports. An undirected edge exists
/// between two participants when either endpoint reports the other, so a
/// buyer cannot unilaterally sever a link her counterpart still reports.
/// Buyers whose report is nil, or who nobody reaches, are simply absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectiveGraph {
    participant: Vec<bool>,
    participants: Vec<NodeId>,
    adj: Vec<Vec<NodeId>>,
    depth: Vec<Option<u32>>,
}

/// Builds the effective graph for `profile` on `network`.
///
/// The profile is validated first; a report naming a non-neighbour is an
/// error that names the offending buyer.
pub fn build_effective_graph(net: &Network, profile: &ActionProfile) -> Result<EffectiveGraph> {
    profile.validate(net)?;
    let n = net.node_count();

    // Invitation fixpoint.
    let mut joined = vec![false; n];
    let mut queue = VecDeque::new();
    for &b in net.seller_neighbors() {
        if profile.report(b).is_some() && !joined[b.index()] {
            joined[b.index()] = true;
            queue.push_back(b);
        }
    }
    while let Some(i) = queue.pop_front() {
        let report = profile.report(i).expect("participants have reports");
        for &j in &report.invited {
            if j.is_seller() || joined[j.index()] {
                continue;
            }
            if profile.report(j).is_some() {
                joined[j.index()] = true;
                queue.push_back(j);
            }
        }
    }

    // Effective edges: either-endpoint-reports semantics, plus the
    // seller's true edges to participants.
    let mut adj: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); n];
    for &b in net.seller_neighbors() {
        if joined[b.index()] {
            adj[0].insert(b);
            adj[b.index()].insert(NodeId::SELLER);
        }
    }
    for i in net.buyers() {
        if !joined[i.index()] {
            continue;
        }
        let report = profile.report(i).expect("participants have reports");
        for &j in &report.invited {
            if !j.is_seller() && joined[j.index()] {
                adj[i.index()].insert(j);
                adj[j.index()].insert(i);
            }
        }
    }

    // Hop depths from the seller over the effective edge set.
    let mut depth = vec![None; n];
    depth[0] = Some(0);
    let mut queue = VecDeque::from([NodeId::SELLER]);
    while let Some(u) = queue.pop_front() {
        let du = depth[u.index()].unwrap();
        for &v in &adj[u.index()] {
            if depth[v.index()].is_none() {
                depth[v.index()] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    debug_assert!(
        (1..n).all(|i| joined[i] == depth[i].is_some()),
        "every participant must be reachable along effective edges"
    );

    let participants = (1..n as u32).map(NodeId).filter(|i| joined[i.index()]).collect();
    Ok(EffectiveGraph {
        participant: joined,
        participants,
        adj: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
        depth,
    })
}

impl EffectiveGraph {
    /// Node count of the underlying network, seller included.
    pub fn node_count(&self) -> usize {
        self.participant.len()
    }

    /// Participating buyers, sorted by id.
    pub fn participants(&self) -> &[NodeId] {
        &self.participants
    }

    pub fn participant_count(&self) -> usize {
        self.participants.len()
    }

    pub fn is_participant(&self, id: NodeId) -> bool {
        !id.is_seller() && self.participant[id.index()]
    }

    /// Effective neighbours of a node (seller included), sorted by id.
    pub fn adjacency(&self, id: NodeId) -> &[NodeId] {
        &self.adj[id.index()]
    }

    /// Shortest hop count from the seller; `Some(0)` for the seller,
    /// `None` for absentees.
    pub fn depth(&self, id: NodeId) -> Option<u32> {
        self.depth[id.index()]
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.adj[a.index()].binary_search(&b).is_ok()
    }
}
