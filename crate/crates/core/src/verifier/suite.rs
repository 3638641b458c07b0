//! Multi-instance sweep drivers over seeded generated networks.
//!
//! Each instance gets its own seed derived from the config seed, recorded
//! in every violation for replay. Instances are independent, so the
//! sweeps parallelise over them; results merge in instance order and are
//! identical under any schedule.

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::generator::{generate_network, instance_seed, GeneratorKind, ValuationKind};
use crate::graph::build_effective_graph;
use crate::mechanisms::Mechanism;
use crate::network::{ActionProfile, Network, NodeId};

use super::{
    check_ic, check_ir, check_revenue_chain, oracle_critical_structure, PropertyReport,
    ValuationGridPolicy, Violation, ViolationKind, IC_MAX_BUYERS, IR_SWEEP_MAX_BUYERS,
};
use crate::critical::critical_structure;

/// One batch of generated instances.
#[derive(Copy, Clone, Debug)]
pub struct SweepConfig {
    pub generator: GeneratorKind,
    pub valuations: ValuationKind,
    pub count: usize,
    pub seed: u64,
}

impl SweepConfig {
    fn instances(&self) -> Result<Vec<(u64, Network)>> {
        self.generator.validate()?;
        self.valuations.validate()?;
        if self.count == 0 {
            return Err(Error::GeneratorConfig("count must be at least 1".into()));
        }
        (0..self.count)
            .map(|i| {
                let seed = instance_seed(self.seed, i as u64);
                Ok((seed, generate_network(self.generator, self.valuations, seed)?))
            })
            .collect()
    }
}

fn run_sweep<F>(
    cfgs: &[SweepConfig],
    property: &str,
    exec: Execution,
    per_instance: F,
) -> Result<PropertyReport>
where
    F: Fn(u64, &Network) -> Result<PropertyReport> + Sync,
{
    let mut instances = Vec::new();
    for cfg in cfgs {
        instances.extend(cfg.instances()?);
    }
    let partials = map_indexed(exec, instances.len(), |i| {
        let (seed, net) = &instances[i];
        per_instance(*seed, net)
    });
    let mut report = PropertyReport::new(property);
    for partial in partials {
        report.absorb(partial?);
    }
    Ok(report)
}

/// Individual-rationality sweep; counts one instance per generated
/// network regardless of how many profiles the subset sweep visits.
pub fn ir_suite(
    cfgs: &[SweepConfig],
    mechanism: Mechanism,
    neighbor_subset_sweep: bool,
    exec: Execution,
) -> Result<PropertyReport> {
    for cfg in cfgs {
        if neighbor_subset_sweep && cfg.generator.buyer_count() > IR_SWEEP_MAX_BUYERS {
            return Err(Error::SizeGuard {
                check: "neighbour-subset sweep",
                limit: IR_SWEEP_MAX_BUYERS,
                actual: cfg.generator.buyer_count(),
            });
        }
    }
    run_sweep(
        cfgs,
        &format!("individual-rationality/{mechanism}"),
        exec,
        |seed, net| {
            let mut r = check_ir(net, mechanism, neighbor_subset_sweep, seed)?;
            r.instances_checked = 1;
            Ok(r)
        },
    )
}

/// Incentive-compatibility sweep; counts one instance per network.
pub fn ic_suite(
    cfgs: &[SweepConfig],
    mechanism: Mechanism,
    policy: &ValuationGridPolicy,
    exec: Execution,
) -> Result<PropertyReport> {
    for cfg in cfgs {
        if cfg.generator.buyer_count() > IC_MAX_BUYERS {
            return Err(Error::SizeGuard {
                check: "deviation enumeration",
                limit: IC_MAX_BUYERS,
                actual: cfg.generator.buyer_count(),
            });
        }
    }
    run_sweep(
        cfgs,
        &format!("incentive-compatibility/{mechanism}"),
        exec,
        |seed, net| {
            let mut r = check_ic(net, mechanism, policy, seed)?;
            r.instances_checked = 1;
            Ok(r)
        },
    )
}

/// Revenue-chain sweep.
pub fn revenue_suite(cfgs: &[SweepConfig], exec: Execution) -> Result<PropertyReport> {
    run_sweep(cfgs, "revenue-chain", exec, |seed, net| {
        check_revenue_chain(net, seed)
    })
}

/// Structural-oracle sweep: on every instance the efficient critical
/// structure must equal the path-enumeration oracle exactly.
pub fn oracle_suite(cfgs: &[SweepConfig], exec: Execution) -> Result<PropertyReport> {
    run_sweep(cfgs, "oracle-equivalence", exec, |seed, net| {
        check_oracle_equivalence(net, seed)
    })
}

/// Checks one network: the block-cut structure must equal the
/// path-enumeration oracle for the highest bidder and for a deepest
/// participant. Oracle refusals on oversized inputs become notes.
pub fn check_oracle_equivalence(net: &Network, seed: u64) -> Result<PropertyReport> {
    let mut report = PropertyReport::new("oracle-equivalence");
    report.instances_checked = 1;
    let profile = ActionProfile::truthful(net);
    let graph = build_effective_graph(net, &profile)?;
    if graph.participant_count() == 0 {
        return Ok(report);
    }

    let highest = *graph
        .participants()
        .iter()
        .max_by(|a, b| {
            profile
                .bid(**a)
                .cmp(&profile.bid(**b))
                .then_with(|| b.cmp(a))
        })
        .expect("participants exist");
    let deepest = *graph
        .participants()
        .iter()
        .max_by_key(|p| (graph.depth(**p).unwrap_or(0), std::cmp::Reverse(p.0)))
        .expect("participants exist");

    let mut targets = vec![highest];
    if deepest != highest {
        targets.push(deepest);
    }
    for target in targets {
        match oracle_critical_structure(&graph, target) {
            Ok(oracle) => {
                let efficient = critical_structure(&graph, target)?;
                if oracle != efficient {
                    report.violations.push(Violation {
                        seed,
                        kind: ViolationKind::StructureMismatch {
                            description: describe_mismatch(target, &oracle, &efficient),
                        },
                    });
                }
            }
            Err(Error::SizeGuard { .. }) => {
                report
                    .notes
                    .push(format!("seed {seed}: oracle refused target #{}", target.0));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

fn describe_mismatch(
    target: NodeId,
    oracle: &crate::critical::CriticalStructure,
    efficient: &crate::critical::CriticalStructure,
) -> String {
    if oracle.sequence != efficient.sequence {
        return format!(
            "target #{}: sequences differ ({:?} vs {:?})",
            target.0, oracle.sequence, efficient.sequence
        );
    }
    for (a, b) in oracle.segments.iter().zip(&efficient.segments) {
        if a != b {
            return format!(
                "target #{}: segment ({:?}->{:?}) differs: {:?} vs {:?}",
                target.0, a.from, a.to, a.members, b.members
            );
        }
    }
    format!("target #{}: descendant maps differ", target.0)
}
