//! Detector self-test: a deliberately broken mechanism must light up the
//! property checks, guarding against vacuously green suites.

use crate::error::Result;
use crate::graph::build_effective_graph;
use crate::mechanisms::{highest_bidder, Mechanism, Outcome, TieBreak};
use crate::money::int;
use crate::network::{ActionProfile, Network, NodeId};

use super::ic::check_ic_with;
use super::ir::check_ir_with;
use super::{PropertyReport, ValuationGridPolicy};

/// First-price auction with a one-unit surcharge: the highest bidder wins
/// and pays her own bid plus one. Breaks individual rationality (the
/// truthful winner nets exactly -1) and incentive compatibility
/// (shading the bid keeps the win and cuts the overcharge).
pub fn overcharging_first_price(net: &Network, profile: &ActionProfile) -> Result<Outcome> {
    let graph = build_effective_graph(net, profile)?;
    let ranks = TieBreak::LowestId.ranks(graph.node_count());
    let mut out = Outcome::empty(Mechanism::Vcg, net);
    let Some(winner) = highest_bidder(&graph, profile, &ranks) else {
        return Ok(out);
    };
    let price = profile.bid(winner).expect("winner participates") + int(1);
    out.winner = Some(winner);
    out.allocation.insert(winner, true);
    out.paid.insert(winner, price.clone());
    out.payment.insert(winner, price);
    Ok(out.finalize(net, profile))
}

/// Runs the property checks against the broken stub. Both reports must
/// come back with violations; a clean report means the detectors are
/// blind.
pub fn detector_self_test() -> Result<(PropertyReport, PropertyReport)> {
    let mut b = Network::builder();
    let x = b.buyer("x", int(5));
    let y = b.buyer("y", int(3));
    let z = b.buyer("z", int(8));
    b.edge(NodeId::SELLER, x)
        .edge(NodeId::SELLER, y)
        .edge(x, z)
        .edge(y, z);
    let net = b.build().expect("self-test network is valid");

    let mut ir = check_ir_with(&net, &overcharging_first_price, Mechanism::Vcg, true, 0)?;
    ir.property = "individual-rationality/broken-probe".into();
    let mut ic = check_ic_with(
        &net,
        &overcharging_first_price,
        Mechanism::Vcg,
        &ValuationGridPolicy::default(),
        0,
    )?;
    ic.property = "incentive-compatibility/broken-probe".into();
    Ok((ir, ic))
}
