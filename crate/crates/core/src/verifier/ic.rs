//! Incentive compatibility by exhaustive deviation enumeration.
//!
//! For each buyer the sweep crosses every reportable neighbour subset
//! with a pivotal valuation grid, rebuilds the market and compares the
//! deviator's utility against truth-telling. Candidate utilities are
//! piecewise constant in the reported valuation between competitors'
//! bids, so a grid sampling below, at and above every competitor bid is
//! outcome-complete.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::mechanisms::{run_mechanism_lenient, Mechanism, Outcome};
use crate::money::{self, Money};
use crate::network::{ActionProfile, Network, NodeId, Report};

use super::{reportable_subsets, DeviationReport, PropertyReport, Violation, ViolationKind};

/// Buyer limit for the deviation sweep; the space is exponential.
pub const IC_MAX_BUYERS: usize = 8;

/// Grid policy for reported valuations. The default offset is half the
/// coarsest step that separates the instance's valuations, so the grid
/// always samples strictly between any two adjacent bids and every point
/// stays an exact rational.
#[derive(Clone, Debug, Default)]
pub struct ValuationGridPolicy {
    pub epsilon: Option<Money>,
}

impl ValuationGridPolicy {
    fn epsilon_for(&self, net: &Network) -> Money {
        match &self.epsilon {
            Some(e) => e.clone(),
            None => {
                let mut lcm = BigInt::one();
                for b in net.buyers() {
                    lcm = lcm.lcm(net.valuation(b).denom());
                }
                Money::new(BigInt::one(), lcm * BigInt::from(2))
            }
        }
    }
}

/// The deviation grid for `agent`: zero, her true valuation, every other
/// buyer's valuation sampled below, at and above, and one point past the
/// global maximum.
pub fn pivotal_grid(net: &Network, agent: NodeId, policy: &ValuationGridPolicy) -> Vec<Money> {
    let eps = policy.epsilon_for(net);
    let mut grid: BTreeSet<Money> = BTreeSet::new();
    grid.insert(money::zero());
    grid.insert(net.valuation(agent).clone());
    let mut global_max = money::zero();
    for b in net.buyers() {
        let v = net.valuation(b);
        if *v > global_max {
            global_max = v.clone();
        }
        if b == agent {
            continue;
        }
        let below = v - &eps;
        if !below.is_negative() {
            grid.insert(below);
        }
        grid.insert(v.clone());
        grid.insert(v + &eps);
    }
    grid.insert(global_max + &eps);
    grid.into_iter().collect()
}

/// Sweeps all deviations of all buyers under `mechanism` and reports any
/// that strictly beat truth-telling.
pub fn check_ic(
    net: &Network,
    mechanism: Mechanism,
    policy: &ValuationGridPolicy,
    seed_tag: u64,
) -> Result<PropertyReport> {
    check_ic_with(
        net,
        &|n, p| run_mechanism_lenient(mechanism, n, p),
        mechanism,
        policy,
        seed_tag,
    )
}

pub(crate) fn check_ic_with(
    net: &Network,
    outcome_fn: &dyn Fn(&Network, &ActionProfile) -> Result<Outcome>,
    mechanism: Mechanism,
    policy: &ValuationGridPolicy,
    seed_tag: u64,
) -> Result<PropertyReport> {
    if net.buyer_count() > IC_MAX_BUYERS {
        return Err(Error::SizeGuard {
            check: "deviation enumeration",
            limit: IC_MAX_BUYERS,
            actual: net.buyer_count(),
        });
    }

    let mut report = PropertyReport::new(format!("incentive-compatibility/{mechanism}"));
    let truthful = ActionProfile::truthful(net);
    let baseline = outcome_fn(net, &truthful)?;

    let mut profile = truthful.clone();
    for agent in net.buyers() {
        let truthful_utility = baseline.utility[&agent].clone();
        let grid = pivotal_grid(net, agent, policy);
        let subsets = reportable_subsets(net, agent);

        let mut consider = |deviation: Option<Report>, report: &mut PropertyReport| -> Result<()> {
            profile.set(agent, deviation.clone());
            let outcome = outcome_fn(net, &profile)?;
            report.instances_checked += 1;
            let deviating_utility = outcome.utility[&agent].clone();
            if deviating_utility > truthful_utility {
                report.violations.push(Violation {
                    seed: seed_tag,
                    kind: ViolationKind::ProfitableDeviation(DeviationReport {
                        mechanism,
                        agent,
                        deviation,
                        truthful_utility: truthful_utility.clone(),
                        deviating_utility,
                        profitable: true,
                    }),
                });
            }
            Ok(())
        };

        for subset in &subsets {
            for v in &grid {
                consider(
                    Some(Report {
                        valuation: v.clone(),
                        invited: subset.clone(),
                    }),
                    &mut report,
                )?;
            }
        }
        consider(None, &mut report)?;

        profile.set(agent, truthful.report(agent).cloned());
    }
    Ok(report)
}
