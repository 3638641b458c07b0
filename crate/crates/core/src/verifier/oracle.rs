//! Definitional oracle for the critical structure, by exhaustive simple
//! path enumeration. Deliberately shares no code with the block-cut
//! implementation it cross-checks.

use std::collections::{BTreeMap, BTreeSet};

use crate::critical::{CriticalStructure, Segment};
use crate::error::{Error, Result};
use crate::graph::EffectiveGraph;
use crate::network::NodeId;

/// Hard cap on the number of buyers the oracle will look at.
pub const ORACLE_MAX_BUYERS: usize = 16;

/// Budget on DFS steps across one oracle invocation. Dense graphs have
/// exponentially many simple paths; the budget keeps refusal deterministic
/// instead of tying it to wall-clock time.
pub const ORACLE_WORK_BUDGET: usize = 4_000_000;

/// Recomputes the critical structure of `target` from first principles:
/// strong ancestors are the nodes on every simple seller-to-target path,
/// weak ancestors those on at least one, bucketed by their position
/// between consecutive strong ancestors; descendant sets come from the
/// ancestor relation itself.
pub fn oracle_critical_structure(
    graph: &EffectiveGraph,
    target: NodeId,
) -> Result<CriticalStructure> {
    if !graph.is_participant(target) {
        return Err(Error::NotParticipant {
            node: format!("#{}", target.0),
        });
    }
    if graph.participant_count() > ORACLE_MAX_BUYERS {
        return Err(Error::SizeGuard {
            check: "oracle path enumeration",
            limit: ORACLE_MAX_BUYERS,
            actual: graph.participant_count(),
        });
    }

    let mut work = 0usize;
    let paths = enumerate_paths(graph, target, &mut work)?;
    debug_assert!(!paths.is_empty(), "participants are reachable");

    // Strong ancestors: on every path. Order comes from the first path
    // and must be consistent with all others and with the depths.
    let mut on_all: BTreeSet<NodeId> = paths[0].iter().copied().collect();
    let mut on_any: BTreeSet<NodeId> = BTreeSet::new();
    for path in &paths {
        let nodes: BTreeSet<NodeId> = path.iter().copied().collect();
        on_all = on_all.intersection(&nodes).copied().collect();
        on_any.extend(nodes);
    }
    let sequence: Vec<NodeId> = paths[0]
        .iter()
        .copied()
        .filter(|n| !n.is_seller() && on_all.contains(n))
        .collect();
    for path in &paths {
        let order: Vec<NodeId> = path
            .iter()
            .copied()
            .filter(|n| !n.is_seller() && on_all.contains(n))
            .collect();
        assert_eq!(order, sequence, "strong ancestors out of order on a path");
    }
    let depths: Vec<u32> = sequence
        .iter()
        .map(|&c| graph.depth(c).expect("on-path nodes participate"))
        .collect();
    assert!(
        depths.windows(2).all(|w| w[0] < w[1]),
        "path order must agree with depth order"
    );

    // Weak ancestors, bucketed between the strong ancestors flanking them.
    let mut bucket_of: BTreeMap<NodeId, (NodeId, NodeId)> = BTreeMap::new();
    for path in &paths {
        let mut prev = NodeId::SELLER;
        let mut pending: Vec<NodeId> = Vec::new();
        for &node in &path[1..] {
            if on_all.contains(&node) {
                for x in pending.drain(..) {
                    let bucket = (prev, node);
                    let old = bucket_of.insert(x, bucket);
                    assert!(
                        old.is_none() || old == Some(bucket),
                        "weak ancestor #{} falls into two buckets",
                        x.0
                    );
                }
                prev = node;
            } else {
                pending.push(node);
            }
        }
        assert!(pending.is_empty(), "paths end at the target, a strong ancestor");
    }

    let mut segments = Vec::new();
    let mut prev = NodeId::SELLER;
    for &c in &sequence {
        let members: BTreeSet<NodeId> = bucket_of
            .iter()
            .filter(|(_, &b)| b == (prev, c))
            .map(|(&x, _)| x)
            .collect();
        segments.push(Segment {
            from: prev,
            to: c,
            members,
        });
        prev = c;
    }

    // Descendant sets from the ancestor relation: j is in V_i exactly
    // when i lies on every seller-to-j path.
    let mut relevant: BTreeSet<NodeId> = sequence.iter().copied().collect();
    for seg in &segments {
        relevant.extend(seg.members.iter().copied());
    }
    let mut descendants: BTreeMap<NodeId, BTreeSet<NodeId>> =
        relevant.iter().map(|&i| (i, BTreeSet::new())).collect();
    for &j in graph.participants() {
        let ancestors = ancestors_of(graph, j, &mut work)?;
        for &i in ancestors.intersection(&relevant) {
            descendants.get_mut(&i).unwrap().insert(j);
        }
    }

    Ok(CriticalStructure::from_parts(
        target,
        sequence,
        segments,
        descendants,
    ))
}

/// Nodes on every simple seller-to-`j` path (including `j` itself).
fn ancestors_of(
    graph: &EffectiveGraph,
    j: NodeId,
    work: &mut usize,
) -> Result<BTreeSet<NodeId>> {
    let mut acc: Option<BTreeSet<NodeId>> = None;
    let mut visited = vec![false; graph.node_count()];
    let mut path = vec![NodeId::SELLER];
    visited[0] = true;
    fold_paths(graph, j, &mut visited, &mut path, work, &mut |p| {
        let nodes: BTreeSet<NodeId> = p.iter().copied().filter(|n| !n.is_seller()).collect();
        acc = Some(match acc.take() {
            None => nodes,
            Some(prev) => prev.intersection(&nodes).copied().collect(),
        });
    })?;
    Ok(acc.expect("participants are reachable"))
}

/// All simple seller-to-`target` paths, each starting with the seller.
fn enumerate_paths(
    graph: &EffectiveGraph,
    target: NodeId,
    work: &mut usize,
) -> Result<Vec<Vec<NodeId>>> {
    let mut out = Vec::new();
    let mut visited = vec![false; graph.node_count()];
    let mut path = vec![NodeId::SELLER];
    visited[0] = true;
    fold_paths(graph, target, &mut visited, &mut path, work, &mut |p| {
        out.push(p.to_vec())
    })?;
    Ok(out)
}

fn fold_paths(
    graph: &EffectiveGraph,
    target: NodeId,
    visited: &mut Vec<bool>,
    path: &mut Vec<NodeId>,
    work: &mut usize,
    on_path: &mut impl FnMut(&[NodeId]),
) -> Result<()> {
    *work += 1;
    if *work > ORACLE_WORK_BUDGET {
        return Err(Error::SizeGuard {
            check: "oracle path enumeration",
            limit: ORACLE_WORK_BUDGET,
            actual: *work,
        });
    }
    let u = *path.last().unwrap();
    if u == target {
        on_path(path);
        return Ok(());
    }
    for &v in graph.adjacency(u) {
        if !visited[v.index()] && !v.is_seller() {
            visited[v.index()] = true;
            path.push(v);
            fold_paths(graph, target, visited, path, work, on_path)?;
            path.pop();
            visited[v.index()] = false;
        }
    }
    Ok(())
}
