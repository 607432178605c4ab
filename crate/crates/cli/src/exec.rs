//! Command implementations: bound, run, sweep, audit.
//!
//! Every artifact write is deterministic: fixed float formatting (17
//! significant digits), ordered maps, and sweep results merged in input
//! order regardless of worker scheduling.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use syncnet_core::graph::{connection_graph_bound_with_strategy, generic_bound, BoundReport};
use syncnet_core::simulator::{assemble, ball_containment, sync_report, SyncReport, Trajectory};
use syncnet_core::stability::{
    audit_antisymmetry, audit_dissipativity, audit_pseudometric, audit_separation, audit_wintner,
    epsilon_star, AuditConfig, AuditReport,
};

use crate::scenario::{EpsilonPlan, Scenario, ThresholdMethod};

/// Bound and threshold for a scenario's graph and pseudometric.
pub struct BoundOutcome {
    pub report: BoundReport,
    pub epsilon_star: f64,
}

pub fn compute_bound(scenario: &Scenario) -> Result<BoundOutcome> {
    let rho = scenario.phi.rho();
    let report = match scenario.threshold.method {
        ThresholdMethod::Generic => generic_bound(&scenario.graph, rho),
        ThresholdMethod::ConnectionGraph => connection_graph_bound_with_strategy(
            &scenario.graph,
            rho,
            &scenario.threshold.path_strategy(rho),
        )?,
    };
    let epsilon_star = epsilon_star(report.c_value, scenario.graph.n())?;
    Ok(BoundOutcome { report, epsilon_star })
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn bound_text(scenario: &Scenario, bound: &BoundOutcome) -> String {
    let mut out = String::new();
    writeln!(out, "name = {}", scenario.name).unwrap();
    writeln!(out, "graph_n = {}", scenario.graph.n()).unwrap();
    writeln!(out, "graph_edges = {}", scenario.graph.edge_count()).unwrap();
    writeln!(out, "graph_diameter = {}", scenario.graph.diameter()).unwrap();
    writeln!(out, "rho = {}", scenario.phi.rho().describe()).unwrap();
    writeln!(out, "bound_method = {}", bound.report.method.label()).unwrap();
    writeln!(out, "bound_c = {}", fmt_f(bound.report.c_value)).unwrap();
    writeln!(out, "epsilon_star = {}", fmt_f(bound.epsilon_star)).unwrap();
    if let Some(loads) = &bound.report.per_edge_load {
        for ((i, j), load) in loads {
            writeln!(out, "edge_load_{i}_{j} = {}", fmt_f(*load)).unwrap();
        }
    }
    out
}

fn ensure_out_dir(scenario: &Scenario) -> Result<PathBuf> {
    fs::create_dir_all(&scenario.out_dir).with_context(|| {
        format!("cannot create output directory {}", scenario.out_dir.display())
    })?;
    Ok(scenario.out_dir.clone())
}

/// `bound` subcommand: bound + threshold only.
pub fn cmd_bound(scenario: &Scenario) -> Result<bool> {
    let bound = compute_bound(scenario)?;
    let text = bound_text(scenario, &bound);
    print!("{text}");
    let dir = ensure_out_dir(scenario)?;
    let path = dir.join(format!("{}_bound.txt", scenario.name));
    fs::write(&path, &text).with_context(|| format!("cannot write {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(true)
}

fn fixed_epsilon(scenario: &Scenario) -> Result<f64> {
    match scenario.epsilon {
        EpsilonPlan::Fixed(eps) => Ok(eps),
        EpsilonPlan::Sweep { .. } => {
            bail!("this scenario declares an epsilon range; use the sweep command")
        }
    }
}

fn integrate_once(scenario: &Scenario, epsilon: f64, x0: &[f64]) -> Result<Trajectory> {
    let system = assemble(
        scenario.graph.clone(),
        scenario.model.clone(),
        scenario.coupling.clone(),
        scenario.weights.clone(),
        epsilon,
    )?;
    let it = &scenario.integration;
    Ok(system.integrate(x0, it.t0, it.t_end, it.dt, it.record_every)?)
}

/// Runs the five hypothesis audits in a fixed order.
pub fn run_audits(scenario: &Scenario) -> Result<Vec<AuditReport>> {
    let plan = scenario
        .audit
        .as_ref()
        .context("scenario has no [audit] section")?;
    let mut cfg = AuditConfig::new(plan.region.clone(), plan.seed, plan.count);
    cfg.time_interval = plan.time_interval;
    let mut wintner_cfg = AuditConfig::new(plan.wintner_region.clone(), plan.seed, plan.count);
    wintner_cfg.time_interval = plan.time_interval;
    Ok(vec![
        audit_pseudometric(&scenario.phi, &cfg)?,
        audit_dissipativity(&scenario.model, &scenario.phi, &scenario.weights, &cfg)?,
        audit_separation(&scenario.model, &scenario.phi, &scenario.weights, &cfg)?,
        audit_antisymmetry(&scenario.coupling, &cfg)?,
        audit_wintner(&scenario.model, &plan.envelope, &wintner_cfg)?,
    ])
}

fn report_text(
    scenario: &Scenario,
    bound: &BoundOutcome,
    epsilon: f64,
    sync: &SyncReport,
    audits: &[AuditReport],
    checks_passed: bool,
) -> String {
    let mut out = bound_text(scenario, bound);
    writeln!(out, "epsilon = {}", fmt_f(epsilon)).unwrap();
    writeln!(
        out,
        "epsilon_exceeds_threshold = {}",
        exceeds_threshold(epsilon, bound.epsilon_star)
    )
    .unwrap();
    out.push_str(&sync.to_key_values());
    for audit in audits {
        writeln!(out, "audit_{} = {}", audit.hypothesis.label(), audit.verdict.label()).unwrap();
    }
    writeln!(out, "checks_passed = {checks_passed}").unwrap();
    out
}

/// Strict threshold comparison with a relative guard so a sweep point that
/// lands numerically on the threshold is not counted as exceeding it.
pub fn exceeds_threshold(epsilon: f64, epsilon_star: f64) -> bool {
    epsilon > epsilon_star * (1.0 + 1e-9) + 1e-12
}

/// `run` subcommand. Returns true when every requested check passed:
/// audits (if configured), synchronization, Lyapunov monotonicity, and ball
/// containment (if configured).
pub fn cmd_run(scenario: &Scenario) -> Result<bool> {
    let bound = compute_bound(scenario)?;
    let epsilon = fixed_epsilon(scenario)?;
    let audits = if scenario.audit.is_some() {
        run_audits(scenario)?
    } else {
        Vec::new()
    };
    let x0 = scenario.initial_states()?;
    let traj = integrate_once(scenario, epsilon, &x0)?;
    let mut sync = sync_report(&traj, scenario.sync.tolerance, scenario.sync.trailing_window)?;
    if let Some(radius) = scenario.ball_radius {
        sync.ball = Some(ball_containment(&traj, radius)?);
    }

    let audits_ok = audits.iter().all(AuditReport::passed);
    let ball_ok = sync
        .ball
        .as_ref()
        .is_none_or(|b| b.contained && b.initially_interior);
    let checks_passed = audits_ok && sync.synced && sync.v_violation_count == 0 && ball_ok;

    let text = report_text(scenario, &bound, epsilon, &sync, &audits, checks_passed);
    print!("{text}");

    let dir = ensure_out_dir(scenario)?;
    let csv_path = dir.join(format!("{}_trajectory.csv", scenario.name));
    fs::write(&csv_path, traj.to_csv())
        .with_context(|| format!("cannot write {}", csv_path.display()))?;
    let report_path = dir.join(format!("{}_report.txt", scenario.name));
    fs::write(&report_path, &text)
        .with_context(|| format!("cannot write {}", report_path.display()))?;
    println!("wrote {}", csv_path.display());
    println!("wrote {}", report_path.display());
    Ok(checks_passed)
}

struct SweepRow {
    epsilon: f64,
    exceeds: bool,
    sync: SyncReport,
}

/// `sweep` subcommand. Rows run concurrently and are reported in strength
/// order. Returns true when every strength above the threshold synchronized;
/// strengths at or below the threshold carry no guaranteed verdict.
pub fn cmd_sweep(scenario: &Scenario) -> Result<bool> {
    let (from, to, steps) = match scenario.epsilon {
        EpsilonPlan::Sweep { from, to, steps } => (from, to, steps),
        EpsilonPlan::Fixed(_) => {
            bail!("this scenario declares a fixed epsilon; sweep needs an epsilon range")
        }
    };
    let bound = compute_bound(scenario)?;
    let x0 = scenario.initial_states()?;
    let epsilons: Vec<f64> = (0..steps)
        .map(|i| from + i as f64 * (to - from) / (steps - 1) as f64)
        .collect();
    let rows: Vec<SweepRow> = epsilons
        .par_iter()
        .map(|&epsilon| -> Result<SweepRow> {
            let traj = integrate_once(scenario, epsilon, &x0)?;
            let sync =
                sync_report(&traj, scenario.sync.tolerance, scenario.sync.trailing_window)?;
            Ok(SweepRow {
                epsilon,
                exceeds: exceeds_threshold(epsilon, bound.epsilon_star),
                sync,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut csv = format!("# epsilon_star = {}\n", fmt_f(bound.epsilon_star));
    csv.push_str("epsilon,exceeds_epsilon_star,synced,t_sync,final_residual,v_violations\n");
    let mut all_guaranteed_ok = true;
    for row in &rows {
        let t_sync = row.sync.t_sync.map_or(String::new(), fmt_f);
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f(row.epsilon),
            row.exceeds,
            row.sync.synced,
            t_sync,
            fmt_f(row.sync.final_residual),
            row.sync.v_violation_count
        ));
        println!(
            "epsilon = {:<24} exceeds_threshold = {:<5} synced = {}",
            fmt_f(row.epsilon),
            row.exceeds,
            row.sync.synced
        );
        if row.exceeds && !row.sync.synced {
            all_guaranteed_ok = false;
        }
    }
    println!("epsilon_star = {}", fmt_f(bound.epsilon_star));

    let dir = ensure_out_dir(scenario)?;
    let path = dir.join(format!("{}_sweep.csv", scenario.name));
    fs::write(&path, &csv).with_context(|| format!("cannot write {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(all_guaranteed_ok)
}

/// `audit` subcommand: run all five audits and write the consolidated
/// report. Returns true when every hypothesis passed.
pub fn cmd_audit(scenario: &Scenario) -> Result<bool> {
    if scenario.audit.is_none() {
        bail!("scenario has no [audit] section");
    }
    let audits = run_audits(scenario)?;
    let mut text = format!("name = {}\n\n", scenario.name);
    for audit in &audits {
        text.push_str(&audit.to_text_block());
        text.push('\n');
    }
    let all_passed = audits.iter().all(AuditReport::passed);
    text.push_str(&format!("all_passed = {all_passed}\n"));
    print!("{text}");

    let dir = ensure_out_dir(scenario)?;
    let path = dir.join(format!("{}_audits.txt", scenario.name));
    fs::write(&path, &text).with_context(|| format!("cannot write {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(all_passed)
}
