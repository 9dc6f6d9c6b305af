//! Runs one configured check end to end.

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::breather::{find_breathers, verify_breather};
use crate::config::ScenarioConfig;
use crate::diagnostics::{correlation_dimension, verify_absorbing, verify_continuity, verify_contraction, verify_tail};
use crate::error::{Error, Result};
use crate::integrator::monitor::{check_a_priori_bound, monitor_dissipation};
use crate::integrator::{integrate, integrate_to, integrate_with, IntegratorConfig, Trajectory};
use crate::lattice::{distance, LatticeState};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    VerifyBounds,
    Absorbing,
    Tail,
    Contraction,
    Continuity,
    Dimension,
    Breather,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Simulate,
        Command::VerifyBounds,
        Command::Absorbing,
        Command::Tail,
        Command::Contraction,
        Command::Continuity,
        Command::Dimension,
        Command::Breather,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::VerifyBounds => "verify-bounds",
            Command::Absorbing => "absorbing",
            Command::Tail => "tail",
            Command::Contraction => "contraction",
            Command::Continuity => "continuity",
            Command::Dimension => "dimension",
            Command::Breather => "breather",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command {s:?}")))
    }
}

/// Result of a scenario run.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub command: Command,
    pub pass: bool,
    /// JSON summary; always carries "command" and "pass".
    pub summary: Value,
    /// Recorded trajectory (simulate, verify-bounds).
    pub trajectory: Option<Trajectory>,
    /// A single state worth exporting (breather profile).
    pub profile: Option<LatticeState>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports always serialize")
}

fn outcome(command: Command, pass: bool, report: Value) -> Outcome {
    let mut summary = json!({ "command": command.name(), "pass": pass });
    if let (Value::Object(dst), Value::Object(src)) = (&mut summary, report) {
        dst.extend(src);
    }
    Outcome { command, pass, summary, trajectory: None, profile: None }
}

fn sampled(cfg: &IntegratorConfig, default: f64) -> IntegratorConfig {
    IntegratorConfig { sample_interval: cfg.sample_interval.or(Some(default)), ..*cfg }
}

pub fn run_scenario(command: Command, cfg: &ScenarioConfig) -> Result<Outcome> {
    cfg.validate()?;
    let model = cfg.build_model()?;
    let s = &cfg.scenario;
    let initial = s.initial.build(&model, s.seed)?;
    let t0 = s.t0;
    log::info!("{command}: {} sites, seed {}", model.lattice().sites, s.seed);
    match command {
        Command::Simulate => {
            let traj = integrate(&model, model.lattice(), &initial, t0, t0 + s.horizon, &cfg.integrator)?;
            let report = json!({
                "samples": traj.len(),
                "final_time": traj.final_time(),
                "final_norm": traj.norms.last(),
                "max_norm": traj.norms.iter().cloned().fold(0.0, f64::max),
                "stats": traj.stats,
            });
            let mut out = outcome(command, true, report);
            out.trajectory = Some(traj);
            Ok(out)
        }
        Command::VerifyBounds => {
            let icfg = sampled(&cfg.integrator, 0.01);
            let traj = integrate(&model, model.lattice(), &initial, t0, t0 + s.horizon, &icfg)?;
            let dissipation = monitor_dissipation(&traj, &model, icfg.rtol)?;
            let a_priori = check_a_priori_bound(&traj, &model, s.slack)?;
            let pass = dissipation.pass && a_priori.pass;
            let mut out = outcome(command, pass, json!({ "dissipation": dissipation, "a_priori": a_priori }));
            out.trajectory = Some(traj);
            Ok(out)
        }
        Command::Absorbing => {
            let r = verify_absorbing(&model, &initial, t0, s.horizon_factor, &cfg.integrator, s.slack)?;
            Ok(outcome(command, r.pass, to_value(&r)))
        }
        Command::Tail => {
            let r = verify_tail(&model, &initial, t0, s.xi, s.horizon, &cfg.integrator)?;
            Ok(outcome(command, r.pass, to_value(&r)))
        }
        Command::Contraction => {
            let second = match &s.second_initial {
                Some(i) => i.build(&model, s.seed.wrapping_add(1))?,
                None => s.initial.build(&model, s.seed.wrapping_add(1))?,
            };
            let r = verify_contraction(&model, &initial, &second, t0, s.horizon, &cfg.integrator, s.rate_slack)?;
            Ok(outcome(command, r.pass, to_value(&r)))
        }
        Command::Continuity => {
            let other = s
                .perturbation
                .as_ref()
                .ok_or_else(|| Error::Config("continuity needs scenario.perturbation".into()))?;
            let second = match &s.second_initial {
                Some(i) => i.build(&model, s.seed)?,
                None => initial.clone(),
            };
            let r = verify_continuity(&model, other, &initial, &second, t0, s.horizon, &cfg.integrator)?;
            Ok(outcome(command, r.pass, to_value(&r)))
        }
        Command::Dimension => {
            let d = &s.dimension;
            let stride = d
                .stride
                .or_else(|| model.driving_spec().period())
                .ok_or_else(|| Error::Config("dimension needs scenario.dimension.stride for non-periodic driving".into()))?;
            let start = integrate_to(&model, &initial, t0, t0 + d.transient, &cfg.integrator)?;
            let mut points = Vec::with_capacity(d.points);
            let icfg = IntegratorConfig { sample_interval: Some(stride), ..cfg.integrator };
            let t1 = t0 + d.transient;
            integrate_with(&model, start.values(), t1, t1 + stride * (d.points - 1) as f64, &icfg, |_, y| {
                points.push(y.iter().flat_map(|z| [z.re, z.im]).collect::<Vec<f64>>());
                ControlFlow::Continue(())
            })?;
            let est = correlation_dimension(&points, &d.options)?;
            let pass = est.dimension.is_finite() && est.ci_width() < d.max_ci_width;
            Ok(outcome(command, pass, json!({ "estimate": est, "ci_width": est.ci_width(), "stride": stride })))
        }
        Command::Breather => {
            let opts = &s.breather;
            let sols = find_breathers(&model, opts, &s.seeds)?;
            let first = &sols[0];
            let report = verify_breather(first, &model, s.phases, opts.tol, &opts.integrator)?;
            let spread = sols
                .iter()
                .map(|b| distance(&b.state0, &first.state0))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            let ratio_ok = sols
                .iter()
                .all(|b| b.contraction_ratio.is_none_or(|r| r <= 1.05 * b.theoretical_ratio));
            let residual_ok = first.periodicity_residual <= 10.0 * opts.tol;
            let seeds_ok = spread <= 10.0 * opts.tol;
            let pass = report.pass && ratio_ok && residual_ok && seeds_ok;
            let mut value = to_value(first);
            if let Value::Object(map) = &mut value {
                map.insert("verification".into(), to_value(&report));
                map.insert("seed_spread".into(), json!(spread));
                map.insert("ratios_within_bound".into(), json!(ratio_ok));
                map.insert("seed_iterations".into(), json!(sols.iter().map(|b| b.iterations).collect::<Vec<_>>()));
            }
            let mut out = outcome(command, pass, value);
            out.profile = Some(first.state0.clone());
            Ok(out)
        }
    }
}

/// Process exit code for a run: 0 pass, 1 failed check, 2 bad input,
/// 3 numerical failure.
pub fn exit_code(result: &Result<Outcome>) -> i32 {
    match result {
        Ok(o) if o.pass => 0,
        Ok(_) => 1,
        Err(e) if e.is_numerical() || matches!(e, Error::InsufficientData(_)) => 3,
        Err(_) => 2,
    }
}
