//! Criticality structure of the effective graph.
//!
//! For a target buyer, the strong critical ancestors are the nodes that
//! sit on *every* simple path from the seller, the weak critical
//! ancestors those on *some* simple path. Consecutive strong ancestors
//! share exactly one biconnected block, and the weak ancestors between
//! them are that block's interior. The whole structure falls out of one
//! block-cut decomposition plus a walk through the block-cut tree.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::EffectiveGraph;
use crate::money::{Bid, Money};
use crate::network::{ActionProfile, NodeId};

/// Everything the mechanisms need about one target's ancestry.
///
/// `segments` walks from the seller to the target: the first entry starts
/// at the seller, every later entry connects two consecutive members of
/// `sequence`. `descendants` holds `V_i` (the nodes that drop out of the
/// market if `i` leaves) for every member of `sequence` and of every
/// segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalStructure {
    pub target: NodeId,
    /// Strong critical ancestors `c_1..c_k`, depth-ascending; the last
    /// element is the target itself.
    pub sequence: Vec<NodeId>,
    /// One entry per element of `sequence`: `segments[j]` spans
    /// `(from, sequence[j])` where `from` is the seller for `j = 0` and
    /// `sequence[j-1]` otherwise.
    pub segments: Vec<Segment>,
    descendants: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

/// A weak critical ancestor set between two consecutive strong ancestors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub from: NodeId,
    pub to: NodeId,
    pub members: BTreeSet<NodeId>,
}

impl CriticalStructure {
    pub(crate) fn from_parts(
        target: NodeId,
        sequence: Vec<NodeId>,
        segments: Vec<Segment>,
        descendants: BTreeMap<NodeId, BTreeSet<NodeId>>,
    ) -> Self {
        CriticalStructure {
            target,
            sequence,
            segments,
            descendants,
        }
    }

    /// `V_i` for a strong ancestor or weak-segment member.
    pub fn descendants(&self, i: NodeId) -> &BTreeSet<NodeId> {
        self.descendants
            .get(&i)
            .expect("descendants are cached for every chain and segment member")
    }

    pub fn descendant_map(&self) -> &BTreeMap<NodeId, BTreeSet<NodeId>> {
        &self.descendants
    }

    /// All critical ancestors of the target: the strong sequence plus
    /// every weak member, including those between the seller and `c_1`.
    pub fn critical_ancestors(&self) -> BTreeSet<NodeId> {
        let mut all: BTreeSet<NodeId> = self.sequence.iter().copied().collect();
        for seg in &self.segments {
            all.extend(seg.members.iter().copied());
        }
        all
    }

    /// Members of a segment ranked by reported valuation, highest first,
    /// ties toward the lower id. Display-only view; nothing in the
    /// payment rules consumes the order.
    pub fn ranked_members(&self, segment: &Segment, profile: &ActionProfile) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = segment.members.iter().copied().collect();
        v.sort_by(|&a, &b| {
            let va = profile.bid(a).expect("members participate");
            let vb = profile.bid(b).expect("members participate");
            vb.cmp(va).then(a.cmp(&b))
        });
        v
    }
}

/// Computes the full critical structure of `target`.
pub fn critical_structure(graph: &EffectiveGraph, target: NodeId) -> Result<CriticalStructure> {
    require_participant(graph, target)?;
    let n = graph.node_count();
    let blocks = biconnected_blocks(graph);

    // Block-cut tree: vertex nodes 0..n, block nodes n.. .
    let mut bc_adj: Vec<Vec<usize>> = vec![Vec::new(); n + blocks.len()];
    for (bi, verts) in blocks.iter().enumerate() {
        for &v in verts {
            bc_adj[v.index()].push(n + bi);
            bc_adj[n + bi].push(v.index());
        }
    }

    // Tree path from the seller's vertex node to the target's.
    let mut parent: Vec<Option<usize>> = vec![None; bc_adj.len()];
    let mut seen = vec![false; bc_adj.len()];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        if u == target.index() {
            break;
        }
        for &v in &bc_adj[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    let mut path = vec![target.index()];
    while let Some(p) = parent[*path.last().unwrap()] {
        path.push(p);
    }
    path.reverse();
    debug_assert_eq!(path[0], 0, "path must start at the seller");

    // Alternating [seller, block, cut, block, ..., target]: the vertex
    // nodes after the seller are the strong critical ancestor sequence.
    let mut sequence = Vec::new();
    let mut segments = Vec::new();
    let mut prev_vertex = NodeId::SELLER;
    let mut idx = 1;
    while idx < path.len() {
        debug_assert!(path[idx] >= n, "path alternates vertex and block nodes");
        let block = &blocks[path[idx] - n];
        let vertex = NodeId(path[idx + 1] as u32);
        let members: BTreeSet<NodeId> = block
            .iter()
            .copied()
            .filter(|&v| v != prev_vertex && v != vertex)
            .collect();
        segments.push(Segment {
            from: prev_vertex,
            to: vertex,
            members,
        });
        sequence.push(vertex);
        prev_vertex = vertex;
        idx += 2;
    }

    // Two strong ancestors can never share a depth: each earlier one lies
    // on every path to each later one.
    let mut last_depth = 0;
    for &c in &sequence {
        let d = graph.depth(c).expect("chain members participate");
        assert!(
            d > last_depth,
            "strong critical ancestor depths must strictly increase"
        );
        last_depth = d;
    }

    let mut descendants = BTreeMap::new();
    for &c in &sequence {
        descendants.insert(c, critical_descendants(graph, c)?);
    }
    for seg in &segments {
        for &m in &seg.members {
            descendants.insert(m, critical_descendants(graph, m)?);
        }
    }

    Ok(CriticalStructure {
        target,
        sequence,
        segments,
        descendants,
    })
}

/// `V_i`: the target's own id plus every buyer that loses her only
/// connection to the seller when `i` leaves.
pub fn critical_descendants(graph: &EffectiveGraph, i: NodeId) -> Result<BTreeSet<NodeId>> {
    require_participant(graph, i)?;
    let reached = reachable_without(graph, &[i]);
    Ok(graph
        .participants()
        .iter()
        .copied()
        .filter(|p| !reached[p.index()])
        .collect())
}

/// `N_{-K}`: the market that survives when everyone in `K` quits, i.e.
/// the participants minus the union of the members' descendant sets.
pub fn removed_set(graph: &EffectiveGraph, remove: &BTreeSet<NodeId>) -> Result<BTreeSet<NodeId>> {
    let mut gone = vec![false; graph.node_count()];
    for &i in remove {
        require_participant(graph, i)?;
        let reached = reachable_without(graph, &[i]);
        for &p in graph.participants() {
            if !reached[p.index()] {
                gone[p.index()] = true;
            }
        }
    }
    Ok(graph
        .participants()
        .iter()
        .copied()
        .filter(|p| !gone[p.index()])
        .collect())
}

/// Strong critical ancestor sequence of `target`, depth-ascending; the
/// last element is the target.
pub fn strong_critical_sequence(graph: &EffectiveGraph, target: NodeId) -> Result<Vec<NodeId>> {
    Ok(critical_structure(graph, target)?.sequence)
}

/// Weak critical ancestor sets along `sequence`, one `(from, to, members)`
/// triple per hop. The leading triple starts at the seller; payment rules
/// never consume it, but it completes the critical-ancestor partition.
pub fn weak_critical_sets(
    graph: &EffectiveGraph,
    sequence: &[NodeId],
) -> Result<Vec<(NodeId, NodeId, BTreeSet<NodeId>)>> {
    let target = *sequence.last().ok_or(Error::NoParticipants)?;
    let cs = critical_structure(graph, target)?;
    debug_assert_eq!(cs.sequence, sequence, "sequence must match the graph");
    Ok(cs
        .segments
        .into_iter()
        .map(|s| (s.from, s.to, s.members))
        .collect())
}

/// Highest reported valuation within `D`; `Bid::NegInf` when `D` is empty.
pub fn top_bid(graph: &EffectiveGraph, profile: &ActionProfile, d: &BTreeSet<NodeId>) -> Bid {
    debug_assert!(d.iter().all(|&i| graph.is_participant(i)));
    d.iter()
        .map(|&i| profile.bid(i).expect("participants have reports"))
        .max()
        .map(|m| Bid::Val(m.clone()))
        .unwrap_or(Bid::NegInf)
}

/// The member of `D` whose descendant set holds the highest bid, with
/// descendant sets taken in the unmodified graph. Ties break toward the
/// lower id; `None` when `D` is empty.
pub fn top_descendant_holder(
    graph: &EffectiveGraph,
    profile: &ActionProfile,
    d: &BTreeSet<NodeId>,
) -> Result<Option<NodeId>> {
    let mut best: Option<(Money, NodeId)> = None;
    for &i in d {
        let v_i = critical_descendants(graph, i)?;
        let bid = top_bid(graph, profile, &v_i)
            .value()
            .expect("descendant sets contain their own node")
            .clone();
        let better = match &best {
            None => true,
            Some((b, _)) => bid > *b,
        };
        if better {
            best = Some((bid, i));
        }
    }
    Ok(best.map(|(_, i)| i))
}

fn require_participant(graph: &EffectiveGraph, i: NodeId) -> Result<()> {
    if graph.is_participant(i) {
        Ok(())
    } else {
        Err(Error::NotParticipant {
            node: format!("#{}", i.0),
        })
    }
}

/// Seller-rooted reachability with `skip` deleted.
fn reachable_without(graph: &EffectiveGraph, skip: &[NodeId]) -> Vec<bool> {
    let n = graph.node_count();
    let mut blocked = vec![false; n];
    for &s in skip {
        blocked[s.index()] = true;
    }
    let mut reached = vec![false; n];
    reached[0] = true;
    let mut queue = VecDeque::from([NodeId::SELLER]);
    while let Some(u) = queue.pop_front() {
        for &v in graph.adjacency(u) {
            if !reached[v.index()] && !blocked[v.index()] {
                reached[v.index()] = true;
                queue.push_back(v);
            }
        }
    }
    reached
}

/// Biconnected blocks of the seller's component, as vertex sets.
/// Iterative lowlink pass so deep chains cannot overflow the stack.
fn biconnected_blocks(graph: &EffectiveGraph) -> Vec<Vec<NodeId>> {
    let n = graph.node_count();
    const UNSET: u32 = u32::MAX;
    let mut disc = vec![UNSET; n];
    let mut low = vec![0u32; n];
    let mut parent = vec![usize::MAX; n];
    let mut next_edge = vec![0usize; n];
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    let mut blocks = Vec::new();

    let mut timer = 0;
    disc[0] = timer;
    low[0] = timer;
    timer += 1;
    let mut stack = vec![0usize];
    while let Some(&u) = stack.last() {
        let adj = graph.adjacency(NodeId(u as u32));
        if next_edge[u] < adj.len() {
            let v = adj[next_edge[u]].index();
            next_edge[u] += 1;
            if disc[v] == UNSET {
                parent[v] = u;
                disc[v] = timer;
                low[v] = timer;
                timer += 1;
                edge_stack.push((u, v));
                stack.push(v);
            } else if v != parent[u] && disc[v] < disc[u] {
                edge_stack.push((u, v));
                low[u] = low[u].min(disc[v]);
            }
        } else {
            stack.pop();
            if let Some(&p) = stack.last() {
                low[p] = low[p].min(low[u]);
                if low[u] >= disc[p] {
                    // unwinding past an articulation point closes a block
                    let mut verts = BTreeSet::new();
                    while let Some(e) = edge_stack.pop() {
                        verts.insert(NodeId(e.0 as u32));
                        verts.insert(NodeId(e.1 as u32));
                        if e == (p, u) {
                            break;
                        }
                    }
                    blocks.push(verts.into_iter().collect());
                }
            }
        }
    }
    blocks
}
