//! The information diffusion mechanism, the classic baseline that rewards
//! only strong critical ancestors.
//!
//! Same chain scan as the fair variant but without weak sets: the first
//! strong ancestor whose bid tops the market without the *next* ancestor
//! wins. Every traversed ancestor pays the market without herself and
//! collects the market without her successor; nothing is redistributed,
//! so revenue telescopes to the market without the first ancestor.

use crate::critical::{critical_structure, CriticalStructure};
use crate::error::{Error, Result};
use crate::graph::EffectiveGraph;
use crate::money;
use crate::network::{ActionProfile, Network};

use super::{highest_bidder, MarketCtx, Mechanism, Outcome, TieBreak};

pub fn idm_outcome(
    graph: &EffectiveGraph,
    profile: &ActionProfile,
    truth: &Network,
) -> Result<Outcome> {
    idm_outcome_with(graph, profile, truth, TieBreak::LowestId)
}

pub fn idm_outcome_with(
    graph: &EffectiveGraph,
    profile: &ActionProfile,
    truth: &Network,
    tie: TieBreak,
) -> Result<Outcome> {
    let ranks = tie.ranks(graph.node_count());
    let target = highest_bidder(graph, profile, &ranks).ok_or(Error::NoParticipants)?;
    let cs = critical_structure(graph, target)?;
    let ctx = MarketCtx::new(graph, profile, &cs);

    let w = scan(&cs, &ctx, profile);
    let winner = cs.sequence[w];
    let mut out = Outcome::empty(Mechanism::Idm, truth);
    out.winner = Some(winner);
    out.allocation.insert(winner, true);

    for j in 0..=w {
        let c = cs.sequence[j];
        let paid = ctx.top_without([c]);
        let received = if j < w {
            ctx.top_without([cs.sequence[j + 1]])
        } else {
            money::zero()
        };
        out.payment.insert(c, &paid - &received);
        out.paid.insert(c, paid);
        out.received.insert(c, received);
    }

    let out = out.finalize(truth, profile);
    debug_assert_eq!(
        out.seller_revenue,
        ctx.top_without([cs.sequence[0]]),
        "revenue telescopes to the market without the first ancestor"
    );
    Ok(out)
}

fn scan(cs: &CriticalStructure, ctx: &MarketCtx<'_>, profile: &ActionProfile) -> usize {
    let last = cs.sequence.len() - 1;
    for j in 0..last {
        let without_next = ctx.top_without([cs.sequence[j + 1]]);
        if *profile.bid(cs.sequence[j]).expect("chain members participate") == without_next {
            return j;
        }
    }
    last
}
