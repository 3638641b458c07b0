//! The fair diffusion mechanism.
//!
//! The item travels down the highest bidder's strong critical ancestor
//! sequence and stops at the first ancestor whose bid tops the market
//! that survives when the next ancestor and the weak set between them
//! quit. The price gap between consecutive strong ancestors is then
//! partly redistributed to the weak ancestors of each traversed segment,
//! each share being the gap that would remain if that buyer alone quit,
//! divided evenly among the segment plus its closing ancestor.

use std::iter;

use crate::critical::{critical_structure, CriticalStructure};
use crate::error::{Error, Result};
use crate::graph::EffectiveGraph;
use crate::money;
use crate::network::{ActionProfile, Network, NodeId};

use super::{highest_bidder, share, MarketCtx, Mechanism, Outcome, TieBreak};

/// Winner under default tie-breaking.
pub fn fdm_winner(graph: &EffectiveGraph, profile: &ActionProfile) -> Result<NodeId> {
    fdm_winner_with(graph, profile, TieBreak::LowestId)
}

pub fn fdm_winner_with(
    graph: &EffectiveGraph,
    profile: &ActionProfile,
    tie: TieBreak,
) -> Result<NodeId> {
    let (cs, w) = allocate(graph, profile, tie)?;
    Ok(cs.sequence[w])
}

/// Full outcome under default tie-breaking.
pub fn fdm_outcome(
    graph: &EffectiveGraph,
    profile: &ActionProfile,
    truth: &Network,
) -> Result<Outcome> {
    fdm_outcome_with(graph, profile, truth, TieBreak::LowestId)
}

pub fn fdm_outcome_with(
    graph: &EffectiveGraph,
    profile: &ActionProfile,
    truth: &Network,
    tie: TieBreak,
) -> Result<Outcome> {
    let ranks = tie.ranks(graph.node_count());
    let (cs, w) = allocate(graph, profile, tie)?;
    let ctx = MarketCtx::new(graph, profile, &cs);
    let mut out = Outcome::empty(Mechanism::Fdm, truth);

    let winner = cs.sequence[w];
    out.winner = Some(winner);
    out.allocation.insert(winner, true);

    // Strong ancestors up to the winner. Each pays the top bid of the
    // market without her, receives the top bid of the market without the
    // next segment, and keeps her redistribution share.
    for j in 0..=w {
        let c = cs.sequence[j];
        let paid = ctx.top_without([c]);
        let received = if j < w {
            let seg = &cs.segments[j + 1];
            ctx.top_without(iter::once(seg.to).chain(seg.members.iter().copied()))
        } else {
            // the winner has no next ancestor to collect from
            money::zero()
        };
        let reward = if j == 0 {
            // no segment precedes the first strong ancestor
            money::zero()
        } else {
            let seg = &cs.segments[j];
            if seg.members.is_empty() {
                money::zero()
            } else {
                let g = ctx
                    .holder(&seg.members, &ranks)
                    .expect("non-empty segment has a holder");
                let floor = ctx.top_without(iter::once(c).chain(seg.members.iter().copied()));
                share(ctx.top_without([c, g]) - floor, seg.members.len() + 1)
            }
        };
        out.payment.insert(c, &paid - &received - &reward);
        out.paid.insert(c, paid);
        out.received.insert(c, received);
        out.reward.insert(c, reward);
    }

    // Weak ancestors of every traversed segment. Each share is the gap
    // the market would still show if that buyer alone had quit.
    for j in 1..=w {
        let seg = &cs.segments[j];
        if seg.members.is_empty() {
            continue;
        }
        let c = cs.sequence[j];
        let floor = ctx.top_without(iter::once(c).chain(seg.members.iter().copied()));
        for &i in &seg.members {
            let reward = share(ctx.top_without([i, c]) - &floor, seg.members.len() + 1);
            out.payment.insert(i, -&reward);
            out.reward.insert(i, reward);
        }
    }

    Ok(out.finalize(truth, profile))
}

/// Scans the strong critical ancestor sequence of the highest bidder from
/// the seller outwards; returns the structure and the winner's index. The
/// final element always qualifies, so a winner exists whenever anyone
/// participates.
fn allocate(
    graph: &EffectiveGraph,
    profile: &ActionProfile,
    tie: TieBreak,
) -> Result<(CriticalStructure, usize)> {
    let ranks = tie.ranks(graph.node_count());
    let target = highest_bidder(graph, profile, &ranks).ok_or(Error::NoParticipants)?;
    let cs = critical_structure(graph, target)?;
    let ctx = MarketCtx::new(graph, profile, &cs);
    let last = cs.sequence.len() - 1;
    for j in 0..=last {
        if j == last {
            return Ok((cs, j));
        }
        let seg = &cs.segments[j + 1];
        let survivor_top = ctx.top_without(iter::once(seg.to).chain(seg.members.iter().copied()));
        if *profile.bid(cs.sequence[j]).expect("chain members participate") == survivor_top {
            return Ok((cs, j));
        }
    }
    unreachable!("the target always satisfies the allocation condition")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::graph::build_effective_graph;
    use crate::money::{int, ratio, zero, Money};
    use crate::network::Network;

    fn id(net: &Network, label: &str) -> NodeId {
        net.node_by_label(label).unwrap()
    }

    fn fixture_outcome() -> (Network, Outcome) {
        let net = fixture::network();
        let profile = ActionProfile::truthful(&net);
        let graph = build_effective_graph(&net, &profile).unwrap();
        let out = fdm_outcome(&graph, &profile, &net).unwrap();
        (net, out)
    }

    #[test]
    fn reference_winner_is_l() {
        let net = fixture::network();
        let profile = ActionProfile::truthful(&net);
        let graph = build_effective_graph(&net, &profile).unwrap();
        assert_eq!(fdm_winner(&graph, &profile).unwrap(), id(&net, "l"));
    }

    #[test]
    fn reference_payments_and_rewards() {
        let (net, out) = fixture_outcome();
        let p = |l: &str| -> &Money { &out.payment[&id(&net, l)] };
        let r = |l: &str| -> &Money { &out.reward[&id(&net, l)] };

        assert_eq!(*p("b"), int(-1));
        assert_eq!(*p("l"), ratio(32, 3));
        assert_eq!(*p("h"), ratio(-1, 3));
        for w in ["f", "g", "j", "k"] {
            assert_eq!(*p(w), ratio(-1, 2), "payment of {w}");
            assert_eq!(*r(w), ratio(1, 2), "reward of {w}");
        }
        assert_eq!(*r("l"), ratio(1, 3));
        assert_eq!(*r("h"), ratio(1, 3));
        assert_eq!(*r("b"), zero());
        assert_eq!(out.seller_revenue, ratio(22, 3));

        // gross flows match the published running example
        assert_eq!(out.paid[&id(&net, "b")], int(7));
        assert_eq!(out.received[&id(&net, "b")], int(8));
        assert_eq!(out.paid[&id(&net, "l")], int(11));
        assert_eq!(out.received[&id(&net, "l")], zero());

        // bystanders pay and receive nothing
        for other in ["a", "c", "d", "e", "i", "m", "n"] {
            assert_eq!(*p(other), zero(), "payment of {other}");
        }
    }

    #[test]
    fn reference_utilities() {
        let (net, out) = fixture_outcome();
        assert_eq!(out.utility[&id(&net, "b")], int(1));
        assert_eq!(out.utility[&id(&net, "l")], ratio(7, 3));
        assert_eq!(out.utility[&id(&net, "h")], ratio(1, 3));
        for w in ["f", "g", "j", "k"] {
            assert_eq!(out.utility[&id(&net, w)], ratio(1, 2));
        }
        assert_eq!(out.social_welfare, int(13));
    }

    #[test]
    fn raising_b_to_eight_moves_the_item_to_b() {
        let net = fixture::network();
        let b = id(&net, "b");
        let profile = ActionProfile::truthful(&net).with_valuation(b, int(8));
        let graph = build_effective_graph(&net, &profile).unwrap();
        assert_eq!(fdm_winner(&graph, &profile).unwrap(), b);
        let out = fdm_outcome(&graph, &profile, &net).unwrap();
        assert_eq!(out.payment[&b], int(7));
    }

    #[test]
    fn single_buyer_wins_for_free() {
        let mut bld = Network::builder();
        let x = bld.buyer("x", int(5));
        bld.edge(NodeId::SELLER, x);
        let net = bld.build().unwrap();
        let profile = ActionProfile::truthful(&net);
        let graph = build_effective_graph(&net, &profile).unwrap();
        let out = fdm_outcome(&graph, &profile, &net).unwrap();
        assert_eq!(out.winner, Some(x));
        assert_eq!(out.payment[&x], zero());
        assert_eq!(out.seller_revenue, zero());
    }

    #[test]
    fn two_seller_neighbours_degenerate_to_second_price() {
        let mut bld = Network::builder();
        let x = bld.buyer("x", int(5));
        let y = bld.buyer("y", int(3));
        bld.edge(NodeId::SELLER, x).edge(NodeId::SELLER, y);
        let net = bld.build().unwrap();
        let profile = ActionProfile::truthful(&net);
        let graph = build_effective_graph(&net, &profile).unwrap();
        let out = fdm_outcome(&graph, &profile, &net).unwrap();
        assert_eq!(out.winner, Some(x));
        assert_eq!(out.payment[&x], int(3));
        assert!(out.reward.values().all(|r| *r == zero()));
        assert_eq!(out.seller_revenue, int(3));
    }

    #[test]
    fn no_participants_is_an_error() {
        let net = Network::builder().build().unwrap();
        let profile = ActionProfile::truthful(&net);
        let graph = build_effective_graph(&net, &profile).unwrap();
        assert!(matches!(
            fdm_outcome(&graph, &profile, &net),
            Err(Error::NoParticipants)
        ));
    }

    #[test]
    fn overbidding_h_wins_but_overpays() {
        let net = fixture::network();
        let h = id(&net, "h");
        let profile = ActionProfile::truthful(&net).with_valuation(h, int(15));
        let graph = build_effective_graph(&net, &profile).unwrap();
        let out = fdm_outcome(&graph, &profile, &net).unwrap();
        assert_eq!(out.winner, Some(h));
        assert_eq!(out.paid[&h], int(14));
        assert_eq!(out.reward[&h], ratio(1, 3));
        // utility against the true valuation of 11
        assert_eq!(out.utility[&h], ratio(-8, 3));
    }

    #[test]
    fn hiding_every_downstream_neighbour_zeroes_b() {
        let net = fixture::network();
        let b = id(&net, "b");
        let profile = ActionProfile::truthful(&net).with_invited(b, [NodeId::SELLER]);
        let graph = build_effective_graph(&net, &profile).unwrap();
        let out = fdm_outcome(&graph, &profile, &net).unwrap();
        assert_eq!(out.winner, Some(id(&net, "d")));
        assert_eq!(out.payment[&id(&net, "d")], int(3));
        assert_eq!(out.utility[&b], zero());
    }
}
