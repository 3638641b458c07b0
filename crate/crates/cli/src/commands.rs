use std::collections::BTreeSet;
use std::path::Path;
use std::process::ExitCode;

use serde::Deserialize;

use dauction_core::exec::{map_indexed, Execution};
use dauction_core::generator::{generate_network, instance_seed, GeneratorKind, ValuationKind};
use dauction_core::instance::{load_instance, network_to_instance, render_instance, save_instance};
use dauction_core::mechanisms::{run_mechanism_with, TieBreak};
use dauction_core::money::parse_money;
use dauction_core::network::{ActionProfile, Network, NodeId, Report};
use dauction_core::verifier::{
    check_ic, check_ir, check_oracle_equivalence, check_revenue_chain, detector_self_test,
    ic_suite, ir_suite, metric_record, oracle_suite, revenue_suite, MetricRecord, PropertyReport,
    SweepConfig, ValuationGridPolicy, IC_MAX_BUYERS, IR_SWEEP_MAX_BUYERS,
};
use dauction_core::{fixture, Error, Mechanism, Result};

use crate::render;
use crate::SuiteArg;

#[allow(clippy::too_many_arguments)]
pub fn run(
    file: &Path,
    mechanisms: &[Mechanism],
    dump: Option<&Path>,
    bids: &[String],
    invites: &[String],
    nils: &[String],
    tie_seed: Option<u64>,
    metrics: bool,
) -> Result<ExitCode> {
    let net = load_instance(file)?;
    let mut profile = ActionProfile::truthful(&net);

    for spec in bids {
        let (buyer, value) = split_override(spec)?;
        let id = lookup_buyer(&net, buyer)?;
        let valuation = parse_money(value)?;
        let invited = profile
            .report(id)
            .map(|r| r.invited.clone())
            .unwrap_or_default();
        profile.set(id, Some(Report { valuation, invited }));
    }
    for spec in invites {
        let (buyer, list) = split_override(spec)?;
        let id = lookup_buyer(&net, buyer)?;
        let mut invited = BTreeSet::new();
        for label in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            invited.insert(lookup_node(&net, label)?);
        }
        let valuation = profile
            .report(id)
            .map(|r| r.valuation.clone())
            .unwrap_or_else(|| net.valuation(id).clone());
        profile.set(id, Some(Report { valuation, invited }));
    }
    for label in nils {
        profile.set(lookup_buyer(&net, label)?, None);
    }

    let tie = tie_seed.map_or(TieBreak::LowestId, TieBreak::Seeded);
    let mut outcomes = Vec::new();
    for (i, &mechanism) in mechanisms.iter().enumerate() {
        if i > 0 {
            println!();
        }
        let outcome = run_mechanism_with(mechanism, &net, &profile, tie)?;
        print!("{}", render::outcome_table(&net, &profile, &outcome));
        if metrics {
            print!("{}", render::metrics_block(&net, &metric_record(&net, mechanism)?));
        }
        outcomes.push(outcome);
    }
    if let Some(path) = dump {
        std::fs::write(path, render::outcomes_json(&net, &profile, &outcomes))?;
        log::debug!("outcome dump written to {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

pub fn gen(
    generator: &str,
    valuations: &str,
    seed: u64,
    count: usize,
    out_dir: Option<&Path>,
) -> Result<ExitCode> {
    let gen: GeneratorKind = generator.parse()?;
    let vals: ValuationKind = valuations.parse()?;
    if count == 0 {
        return Err(Error::GeneratorConfig("count must be at least 1".into()));
    }
    if out_dir.is_none() && count > 1 {
        return Err(Error::GeneratorConfig(
            "--out-dir is required when count > 1".into(),
        ));
    }

    for i in 0..count {
        let inst_seed = instance_seed(seed, i as u64);
        let net = generate_network(gen, vals, inst_seed)?;
        let comment = format!("generated: {gen}, {vals}, seed {inst_seed} ({seed}#{i})");
        match out_dir {
            None => print!("{}", render_instance(&network_to_instance(&net, Some(comment)))),
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                let path = dir.join(format!("gen-{seed}-{i:04}.json"));
                save_instance(&net, Some(comment), &path)?;
                println!("{}", path.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Batch experiment config. `metrics` narrows the emitted CSV columns.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub generator: GeneratorKind,
    pub valuations: ValuationKind,
    pub count: usize,
    pub seed: u64,
    pub mechanisms: Vec<String>,
    #[serde(default)]
    pub metrics: Option<Vec<String>>,
}

pub const ALL_METRICS: [&str; 6] = [
    "social_welfare",
    "revenue",
    "total_buyer_utility",
    "beneficial_buyers",
    "critical_ancestors",
    "beneficial_ratio",
];

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        self.valuations.validate()?;
        if self.count == 0 {
            return Err(Error::GeneratorConfig("count must be at least 1".into()));
        }
        if self.mechanisms.is_empty() {
            return Err(Error::GeneratorConfig(
                "at least one mechanism is required".into(),
            ));
        }
        for m in &self.mechanisms {
            m.parse::<Mechanism>()?;
        }
        if let Some(metrics) = &self.metrics {
            for m in metrics {
                if !ALL_METRICS.contains(&m.as_str()) {
                    return Err(Error::GeneratorConfig(format!(
                        "unknown metric {m:?}; known: {}",
                        ALL_METRICS.join(", ")
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn mechanisms(&self) -> Vec<Mechanism> {
        self.mechanisms
            .iter()
            .map(|m| m.parse().expect("validated"))
            .collect()
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            generator: self.generator,
            valuations: self.valuations,
            count: self.count,
            seed: self.seed,
        }
    }
}

pub fn experiment(config: &Path, out: &Path) -> Result<ExitCode> {
    let cfg = ExperimentConfig::load(config)?;
    let mechanisms = cfg.mechanisms();

    // one record set per instance, computed independently and merged in
    // seed order so concurrency never changes the bytes
    let per_instance: Vec<Result<(u64, Vec<MetricRecord>)>> =
        map_indexed(Execution::default(), cfg.count, |i| {
            let seed = instance_seed(cfg.seed, i as u64);
            let net = generate_network(cfg.generator, cfg.valuations, seed)?;
            let records = mechanisms
                .iter()
                .map(|&m| metric_record(&net, m))
                .collect::<Result<Vec<_>>>()?;
            Ok((seed, records))
        });
    let mut rows = Vec::with_capacity(cfg.count);
    for r in per_instance {
        rows.push(r?);
    }

    let csv = render::experiment_csv(&cfg, &mechanisms, &rows);
    std::fs::write(out, csv)?;
    println!(
        "wrote {} data rows (+{} summary) to {}",
        rows.len() * mechanisms.len(),
        mechanisms.len(),
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

pub fn verify(
    file: Option<&Path>,
    config: Option<&Path>,
    suite: SuiteArg,
    self_test: bool,
    report_path: Option<&Path>,
) -> Result<ExitCode> {
    if self_test {
        let (ir, ic) = detector_self_test()?;
        render::print_report(&ir);
        render::print_report(&ic);
        if ir.passed() || ic.passed() {
            return Err(Error::InvalidInstance(
                "self-test failed: a detector reported no violations for a broken mechanism"
                    .into(),
            ));
        }
        println!("self-test ok: both detectors flagged the broken mechanism");
        maybe_write_reports(report_path, &[ir, ic])?;
        return Ok(ExitCode::from(1));
    }

    let reports = match (file, config) {
        (Some(path), None) => verify_file(path, suite)?,
        (None, Some(path)) => verify_batch(path, suite)?,
        _ => {
            return Err(Error::InvalidInstance(
                "pass an instance file or --config, not both".into(),
            ))
        }
    };

    let mut violations = 0;
    for report in &reports {
        render::print_report(report);
        violations += report.violations.len();
    }
    maybe_write_reports(report_path, &reports)?;
    if violations > 0 {
        println!("{violations} violation(s) found");
        Ok(ExitCode::from(1))
    } else {
        println!("all properties held");
        Ok(ExitCode::SUCCESS)
    }
}

fn verify_file(path: &Path, suite: SuiteArg) -> Result<Vec<PropertyReport>> {
    let net = load_instance(path)?;
    let grid = ValuationGridPolicy::default();
    let mut reports = Vec::new();
    let all = suite == SuiteArg::All;

    if matches!(suite, SuiteArg::Ir | SuiteArg::All) {
        let sweep = net.buyer_count() <= IR_SWEEP_MAX_BUYERS;
        for mech in [Mechanism::Fdm, Mechanism::Idm] {
            let mut r = check_ir(&net, mech, sweep, 0)?;
            if !sweep {
                r.notes.push(format!(
                    "neighbour-subset sweep skipped: {} buyers exceed the limit of {}",
                    net.buyer_count(),
                    IR_SWEEP_MAX_BUYERS
                ));
            }
            reports.push(r);
        }
    }
    if matches!(suite, SuiteArg::Ic | SuiteArg::All) {
        for mech in [Mechanism::Fdm, Mechanism::Idm] {
            match check_ic(&net, mech, &grid, 0) {
                Ok(r) => reports.push(r),
                Err(e @ Error::SizeGuard { .. }) if all => {
                    let mut r = PropertyReport::new(format!("incentive-compatibility/{mech}"));
                    r.notes.push(format!("skipped: {e}"));
                    reports.push(r);
                }
                Err(e) => return Err(e),
            }
        }
    }
    if matches!(suite, SuiteArg::Revenue | SuiteArg::All) {
        reports.push(check_revenue_chain(&net, 0)?);
    }
    if matches!(suite, SuiteArg::Oracle | SuiteArg::All) {
        reports.push(check_oracle_equivalence(&net, 0)?);
    }
    Ok(reports)
}

fn verify_batch(path: &Path, suite: SuiteArg) -> Result<Vec<PropertyReport>> {
    let cfg = ExperimentConfig::load(path)?;
    let sweep_cfg = [cfg.sweep_config()];
    let exec = Execution::default();
    let grid = ValuationGridPolicy::default();
    let n = cfg.generator.buyer_count();
    let all = suite == SuiteArg::All;
    let mut reports = Vec::new();

    if matches!(suite, SuiteArg::Ir | SuiteArg::All) {
        let sweep = n <= IR_SWEEP_MAX_BUYERS;
        for mech in [Mechanism::Fdm, Mechanism::Idm] {
            let mut r = ir_suite(&sweep_cfg, mech, sweep, exec)?;
            if !sweep {
                r.notes.push(format!(
                    "neighbour-subset sweep skipped: {n} buyers exceed the limit of {IR_SWEEP_MAX_BUYERS}"
                ));
            }
            reports.push(r);
        }
    }
    if matches!(suite, SuiteArg::Ic | SuiteArg::All) {
        for mech in [Mechanism::Fdm, Mechanism::Idm] {
            if n > IC_MAX_BUYERS && all {
                let mut r = PropertyReport::new(format!("incentive-compatibility/{mech}"));
                r.notes.push(format!(
                    "skipped: {n} buyers exceed the deviation-enumeration limit of {IC_MAX_BUYERS}"
                ));
                reports.push(r);
            } else {
                reports.push(ic_suite(&sweep_cfg, mech, &grid, exec)?);
            }
        }
    }
    if matches!(suite, SuiteArg::Revenue | SuiteArg::All) {
        reports.push(revenue_suite(&sweep_cfg, exec)?);
    }
    if matches!(suite, SuiteArg::Oracle | SuiteArg::All) {
        reports.push(oracle_suite(&sweep_cfg, exec)?);
    }
    Ok(reports)
}

fn maybe_write_reports(path: Option<&Path>, reports: &[PropertyReport]) -> Result<()> {
    if let Some(path) = path {
        std::fs::write(path, render::reports_json(reports))?;
    }
    Ok(())
}

pub fn fixture(out: Option<&Path>) -> Result<ExitCode> {
    let net = fixture::network();
    let comment = "Reference 14-buyer instance used by the documentation and test suite. \
                   One of several graphs consistent with the outcome values the tests pin down."
        .to_string();
    let text = render_instance(&network_to_instance(&net, Some(comment)));
    match out {
        None => print!("{text}"),
        Some(path) => {
            std::fs::write(path, text)?;
            println!("{}", path.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn split_override(spec: &str) -> Result<(&str, &str)> {
    spec.split_once('=').ok_or_else(|| {
        Error::InvalidInstance(format!("override {spec:?} is not of the form id=value"))
    })
}

fn lookup_buyer(net: &Network, label: &str) -> Result<NodeId> {
    let id = lookup_node(net, label)?;
    if id.is_seller() {
        return Err(Error::InvalidInstance(
            "the seller takes no actions to override".into(),
        ));
    }
    Ok(id)
}

fn lookup_node(net: &Network, label: &str) -> Result<NodeId> {
    net.node_by_label(label)
        .ok_or_else(|| Error::InvalidInstance(format!("unknown node id {label:?}")))
}
