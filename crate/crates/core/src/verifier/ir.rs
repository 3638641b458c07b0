//! Individual rationality: a buyer who bids her true valuation never ends
//! with negative utility, no matter which neighbours she invites.

use crate::error::{Error, Result};
use crate::mechanisms::{run_mechanism_lenient, Mechanism, Outcome};
use crate::money;
use crate::network::{ActionProfile, Network, Report};

use super::{reportable_subsets, PropertyReport, Violation, ViolationKind};

/// Buyer limit for the full neighbour-subset sweep.
pub const IR_SWEEP_MAX_BUYERS: usize = 10;

/// Checks every buyer's utility under truthful valuations. With
/// `neighbor_subset_sweep` the check re-runs the mechanism for every
/// subset of every buyer's neighbour set, realising the "no matter how
/// many neighbours she invites" quantifier one deviator at a time.
pub fn check_ir(
    net: &Network,
    mechanism: Mechanism,
    neighbor_subset_sweep: bool,
    seed_tag: u64,
) -> Result<PropertyReport> {
    check_ir_with(
        net,
        &|n, p| run_mechanism_lenient(mechanism, n, p),
        mechanism,
        neighbor_subset_sweep,
        seed_tag,
    )
}

/// Same sweep against an arbitrary outcome function; the detector
/// self-test feeds a deliberately broken mechanism through here.
pub(crate) fn check_ir_with(
    net: &Network,
    outcome_fn: &dyn Fn(&Network, &ActionProfile) -> Result<Outcome>,
    mechanism: Mechanism,
    neighbor_subset_sweep: bool,
    seed_tag: u64,
) -> Result<PropertyReport> {
    if neighbor_subset_sweep && net.buyer_count() > IR_SWEEP_MAX_BUYERS {
        return Err(Error::SizeGuard {
            check: "neighbour-subset sweep",
            limit: IR_SWEEP_MAX_BUYERS,
            actual: net.buyer_count(),
        });
    }

    let mut report = PropertyReport::new(format!("individual-rationality/{mechanism}"));
    let truthful = ActionProfile::truthful(net);
    audit(net, outcome_fn, mechanism, &truthful, seed_tag, &mut report)?;

    if neighbor_subset_sweep {
        let mut profile = truthful.clone();
        for buyer in net.buyers() {
            let true_valuation = net.valuation(buyer).clone();
            for subset in reportable_subsets(net, buyer) {
                profile.set(
                    buyer,
                    Some(Report {
                        valuation: true_valuation.clone(),
                        invited: subset,
                    }),
                );
                audit(net, outcome_fn, mechanism, &profile, seed_tag, &mut report)?;
            }
            // restore before sweeping the next buyer
            profile.set(buyer, truthful.report(buyer).cloned());
        }
    }
    Ok(report)
}

/// Runs one profile and records every negative utility.
fn audit(
    net: &Network,
    outcome_fn: &dyn Fn(&Network, &ActionProfile) -> Result<Outcome>,
    mechanism: Mechanism,
    profile: &ActionProfile,
    seed_tag: u64,
    report: &mut PropertyReport,
) -> Result<()> {
    let outcome = outcome_fn(net, profile)?;
    report.instances_checked += 1;
    let zero = money::zero();
    for (&agent, utility) in &outcome.utility {
        if *utility < zero {
            report.violations.push(Violation {
                seed: seed_tag,
                kind: ViolationKind::NegativeUtility {
                    mechanism,
                    agent,
                    invited: profile
                        .report(agent)
                        .map(|r| r.invited.clone())
                        .unwrap_or_default(),
                    utility: utility.clone(),
                },
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::money::{int, ratio};

    #[test]
    fn fixture_is_individually_rational() {
        let net = fixture::network();
        for mech in [Mechanism::Fdm, Mechanism::Idm, Mechanism::Vcg] {
            let report = check_ir(&net, mech, false, 0).unwrap();
            assert!(report.passed(), "{mech}: {:?}", report.violations);
        }
    }

    #[test]
    fn fixture_utility_extremes() {
        let net = fixture::network();
        let profile = ActionProfile::truthful(&net);
        let fdm = run_mechanism_lenient(Mechanism::Fdm, &net, &profile).unwrap();
        let max = fdm.utility.values().max().unwrap();
        let min = fdm.utility.values().min().unwrap();
        assert_eq!(*max, ratio(7, 3));
        assert_eq!(*min, money::zero());

        let idm = run_mechanism_lenient(Mechanism::Idm, &net, &profile).unwrap();
        let b = net.node_by_label("b").unwrap();
        assert_eq!(idm.utility[&b], int(4));
        assert_eq!(*idm.utility.values().max().unwrap(), int(4));
    }

    #[test]
    fn sweep_guard_kicks_in() {
        let net = fixture::network(); // 14 buyers
        assert!(matches!(
            check_ir(&net, Mechanism::Fdm, true, 0),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn fixture_sweepless_has_zero_violations_and_small_net_sweeps_clean() {
        let mut b = Network::builder();
        let x = b.buyer("x", int(5));
        let y = b.buyer("y", int(9));
        let z = b.buyer("z", int(3));
        b.edge(crate::network::NodeId::SELLER, x).edge(x, y).edge(x, z).edge(y, z);
        let net = b.build().unwrap();
        for mech in [Mechanism::Fdm, Mechanism::Idm] {
            let report = check_ir(&net, mech, true, 0).unwrap();
            assert!(report.passed());
            assert!(report.instances_checked > 1);
        }
    }
}
