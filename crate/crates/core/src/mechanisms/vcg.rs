//! Second-price auction restricted to the seller's direct neighbours;
//! the classic no-diffusion baseline.

use crate::error::{Error, Result};
use crate::money::{self, Money};
use crate::network::{ActionProfile, Network, NodeId};

use super::{Mechanism, Outcome, TieBreak};

pub fn neighbor_vcg_outcome(truth: &Network, profile: &ActionProfile) -> Result<Outcome> {
    neighbor_vcg_outcome_with(truth, profile, TieBreak::LowestId)
}

pub fn neighbor_vcg_outcome_with(
    truth: &Network,
    profile: &ActionProfile,
    tie: TieBreak,
) -> Result<Outcome> {
    profile.validate(truth)?;
    let ranks = tie.ranks(truth.node_count());

    let bidders: Vec<(NodeId, &Money)> = truth
        .seller_neighbors()
        .iter()
        .filter_map(|&b| profile.bid(b).map(|v| (b, v)))
        .collect();
    let &(w, _) = bidders
        .iter()
        .max_by(|(a, va), (b, vb)| {
            va.cmp(vb)
                .then_with(|| ranks[b.index()].cmp(&ranks[a.index()]))
        })
        .ok_or(Error::NoParticipants)?;
    let price = bidders
        .iter()
        .filter(|(b, _)| *b != w)
        .map(|(_, v)| (*v).clone())
        .max()
        .unwrap_or_else(money::zero);

    let mut out = Outcome::empty(Mechanism::Vcg, truth);
    out.winner = Some(w);
    out.allocation.insert(w, true);
    out.payment.insert(w, price.clone());
    out.paid.insert(w, price);
    Ok(out.finalize(truth, profile))
}
