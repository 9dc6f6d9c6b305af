//! Time-periodic breathers under strong damping.
//!
//! When γ > a·R_u^b + ‖g⁽²⁾‖_Cb with R_u = ‖g⁽¹⁾‖_Cb/(γ − 2‖g⁽²⁾‖_Cb), the
//! period map Φ = U(t0 + T, t0) contracts the ball of radius R_u by at least
//! exp[−(γ − aR_u^b − ‖g⁽²⁾‖_Cb)T], so Picard iteration of Φ converges to the
//! unique periodic orbit.

use std::f64::consts::TAU;
use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{linear_fit, LinearFit};
use crate::driving::SpatialProfile;
use crate::error::{Error, Result};
use crate::init;
use crate::integrator::{integrate_to, integrate_with, IntegratorConfig};
use crate::lattice::{distance, tail_mass, LatticeState};
use crate::model::Dnls;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongDampingCheck {
    /// γ.
    pub lhs: f64,
    /// a·R_u^b + ‖g⁽²⁾‖_Cb.
    pub rhs: f64,
    /// R_u = ‖g⁽¹⁾‖_Cb/(γ − 2‖g⁽²⁾‖_Cb).
    pub radius: f64,
    /// γ − a·R_u^b − ‖g⁽²⁾‖_Cb.
    pub rate: f64,
    pub satisfied: bool,
}

impl StrongDampingCheck {
    /// Guaranteed contraction factor of the period map over one period.
    pub fn theoretical_ratio(&self, period: f64) -> f64 {
        (-self.rate * period).exp()
    }
}

pub fn check_strong_damping(model: &Dnls) -> Result<StrongDampingCheck> {
    let gt = model.effective_damping()?;
    let (g1, g2) = model.driving_spec().sup_norm();
    let p = model.params();
    let radius = g1 / gt;
    let nonlinear = if p.nonlinearity.is_off() { 0.0 } else { p.nonlinearity.a() * radius.powf(p.nonlinearity.b()) };
    let rhs = nonlinear + g2;
    Ok(StrongDampingCheck { lhs: p.gamma, rhs, radius, rate: p.gamma - rhs, satisfied: p.gamma > rhs })
}

/// Φ(ψ) = U(t0 + T, t0)ψ.
pub fn period_map(model: &Dnls, state: &LatticeState, t0: f64, period: f64, cfg: &IntegratorConfig) -> Result<LatticeState> {
    integrate_to(model, state, t0, t0 + period, cfg)
}

/// The period of the driving. Time-independent drivings admit any period;
/// `fallback` (default 2π) is used for them.
pub fn resolve_period(model: &Dnls, fallback: Option<f64>) -> Result<f64> {
    let spec = model.driving_spec();
    if let Some(p) = spec.period() {
        return Ok(p);
    }
    if spec.additive.law.is_constant() && spec.parametric.law.is_constant() {
        let p = fallback.unwrap_or(TAU);
        if p.is_finite() && p > 0.0 {
            return Ok(p);
        }
        return Err(Error::Config(format!("period must be positive, got {p}")));
    }
    Err(Error::Precondition("breathers need a periodic driving with a common period".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BreatherOptions {
    /// Stop once ‖Φ(ψ) − ψ‖ ≤ tol.
    pub tol: f64,
    pub max_iterations: usize,
    pub t0: f64,
    /// Period for time-independent drivings.
    pub period: Option<f64>,
    pub integrator: IntegratorConfig,
}

impl Default for BreatherOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iterations: 1000, t0: 0.0, period: None, integrator: IntegratorConfig::reference() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Localization {
    /// Fitted μ in |ψ_n| ∝ e^{−μ|n|}.
    pub rate: f64,
    pub r_squared: f64,
    pub first_site: usize,
    pub last_site: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BreatherSolution {
    /// Orbit at phase t0.
    pub state0: LatticeState,
    pub t0: f64,
    pub period: f64,
    /// ‖ψ(t0 + T) − ψ(t0)‖ from a fresh integration of one period.
    pub periodicity_residual: f64,
    pub localization: Option<Localization>,
    pub iterations: usize,
    /// Largest d_{k+1}/d_k over iterates resolved above integration noise.
    pub contraction_ratio: Option<f64>,
    pub theoretical_ratio: f64,
    /// ‖Φ(ψ_k) − ψ_k‖ for every iterate.
    pub trace: Vec<f64>,
    pub seed: Option<u64>,
}

/// Distances below this multiple of rtol·max(1, ‖ψ‖) are integration noise.
const RATIO_NOISE_MULTIPLE: f64 = 10.0;

/// Picard iteration of the period map from the zero state (`seed = None`) or
/// from a point drawn uniformly in the R_u ball.
pub fn find_breather(model: &Dnls, opts: &BreatherOptions, seed: Option<u64>) -> Result<BreatherSolution> {
    let check = check_strong_damping(model)?;
    if !check.satisfied {
        return Err(Error::Precondition(format!(
            "strong damping fails: γ = {} ≤ a·R_u^b + ‖g2‖ = {}; uniqueness is not guaranteed",
            check.lhs, check.rhs
        )));
    }
    if !(opts.tol.is_finite() && opts.tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let period = resolve_period(model, opts.period)?;
    let cfg = &opts.integrator;
    let lat = model.lattice();
    let mut psi = match seed {
        None => LatticeState::zeros(lat),
        Some(s) => init::random_in_ball(lat, check.radius, &mut init::rng(s))?,
    };
    let mut trace = Vec::new();
    let mut ratio: Option<f64> = None;
    loop {
        let next = period_map(model, &psi, opts.t0, period, cfg)?;
        let d = distance(&next, &psi)?;
        let floor = RATIO_NOISE_MULTIPLE * cfg.rtol * psi.l2_norm().max(1.0);
        if let Some(&prev) = trace.last() {
            if d >= floor {
                let r = d / prev;
                ratio = Some(ratio.map_or(r, |m: f64| m.max(r)));
            }
        }
        trace.push(d);
        psi = next;
        if d <= opts.tol {
            break;
        }
        if trace.len() >= opts.max_iterations {
            return Err(Error::NonConvergence { iterations: trace.len(), trace });
        }
    }
    let residual = distance(&period_map(model, &psi, opts.t0, period, cfg)?, &psi)?;
    let localization = fit_localization(model, &psi);
    Ok(BreatherSolution {
        state0: psi,
        t0: opts.t0,
        period,
        periodicity_residual: residual,
        localization,
        iterations: trace.len(),
        contraction_ratio: ratio,
        theoretical_ratio: check.theoretical_ratio(period),
        trace,
        seed,
    })
}

/// Runs [`find_breather`] for several seeds in parallel.
pub fn find_breathers(model: &Dnls, opts: &BreatherOptions, seeds: &[Option<u64>]) -> Result<Vec<BreatherSolution>> {
    seeds.par_iter().map(|&s| find_breather(model, opts, s)).collect()
}

fn exponentially_localized(profile: &SpatialProfile) -> bool {
    matches!(profile, SpatialProfile::Exponential { .. } | SpatialProfile::Gaussian { .. })
}

/// Sites beyond the driving core: |p_n| < 10% of the peak for both fields.
fn core_radius(model: &Dnls) -> usize {
    let spec = model.driving_spec();
    spec.additive.profile.core_radius(0.1).max(spec.parametric.profile.core_radius(0.1)) as usize
}

/// Symmetrized amplitude envelope e_k = max(|ψ_k|, |ψ_{−k}|) for k ≥ 0.
fn envelope(states: &[&LatticeState]) -> Vec<f64> {
    let lat = states[0].lattice();
    (0..=lat.max_cutoff())
        .map(|k| {
            let k = k as i64;
            states.iter().map(|s| s.at(k).norm().max(s.at(-k).norm())).fold(0.0, f64::max)
        })
        .collect()
}

/// Amplitudes below this fraction of the peak are not resolved.
const ENVELOPE_FLOOR: f64 = 1e-12;

fn resolved_range(env: &[f64], core: usize) -> Option<(usize, usize)> {
    let peak = env.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return None;
    }
    let first = core + 1;
    let last = (first..env.len()).take_while(|&k| env[k] > ENVELOPE_FLOOR * peak).last()?;
    (last >= first + 4).then_some((first, last))
}

fn fit_localization(model: &Dnls, state: &LatticeState) -> Option<Localization> {
    if !exponentially_localized(&model.driving_spec().additive.profile) {
        return None;
    }
    let env = envelope(&[state]);
    let (first, last) = resolved_range(&env, core_radius(model))?;
    let xs: Vec<f64> = (first..=last).map(|k| k as f64).collect();
    let ys: Vec<f64> = (first..=last).map(|k| env[k].ln()).collect();
    let LinearFit { slope, r_squared, .. } = linear_fit(&xs, &ys)?;
    Some(Localization { rate: -slope, r_squared, first_site: first, last_site: last })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BreatherReport {
    pub phases: usize,
    /// ‖ψ(t + T) − ψ(t)‖ at each phase t.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub residual_limit: f64,
    pub periodic: bool,
    /// None when the driving is not exponentially localized.
    pub envelope_monotone: Option<bool>,
    pub localization: Option<Localization>,
    pub localized_fit: Option<bool>,
    /// Σ_{|n|>N/4}|ψ_n|² / ‖ψ‖².
    pub tail_fraction: f64,
    pub tail_ok: bool,
    pub pass: bool,
}

/// Re-integrates two periods from `state0` and checks periodicity at `phases`
/// equispaced phases, envelope monotonicity and the exponential fit beyond
/// the driving core, and l² localization.
pub fn verify_breather(
    sol: &BreatherSolution,
    model: &Dnls,
    phases: usize,
    tol: f64,
    cfg: &IntegratorConfig,
) -> Result<BreatherReport> {
    if phases == 0 {
        return Err(Error::Domain("need at least one phase".into()));
    }
    let lat = model.lattice();
    let t0 = sol.t0;
    let mut samples: Vec<LatticeState> = Vec::with_capacity(2 * phases + 1);
    let cfg = IntegratorConfig { sample_interval: Some(sol.period / phases as f64), ..*cfg };
    integrate_with(model, sol.state0.values(), t0, t0 + 2.0 * sol.period, &cfg, |_, y| {
        samples.push(LatticeState::from_values(y.to_vec(), lat.boundary).expect("finite integration output"));
        ControlFlow::Continue(())
    })?;
    if samples.len() != 2 * phases + 1 {
        return Err(Error::InsufficientData(format!("expected {} samples, got {}", 2 * phases + 1, samples.len())));
    }
    let residuals: Vec<f64> = (0..phases)
        .map(|k| distance(&samples[k + phases], &samples[k]))
        .collect::<Result<_>>()?;
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    let residual_limit = 10.0 * tol;
    let periodic = max_residual <= residual_limit;

    let (envelope_monotone, localization, localized_fit) = if exponentially_localized(&model.driving_spec().additive.profile) {
        let refs: Vec<&LatticeState> = samples[..phases].iter().collect();
        let env = envelope(&refs);
        let monotone = match resolved_range(&env, core_radius(model)) {
            Some((first, last)) => (first..last).all(|k| env[k + 1] <= env[k]),
            None => true,
        };
        let fit = fit_localization(model, &sol.state0);
        let fit_ok = fit.is_none_or(|f| f.r_squared >= 0.99);
        (Some(monotone), fit, Some(fit_ok))
    } else {
        (None, None, None)
    };

    let norm2 = sol.state0.norm_sqr();
    let tail = tail_mass(&sol.state0, lat.sites / 4)?;
    let tail_fraction = if norm2 == 0.0 { 0.0 } else { tail / norm2 };
    let tail_ok = tail_fraction <= 1e-8;
    let pass = periodic && envelope_monotone.unwrap_or(true) && localized_fit.unwrap_or(true) && tail_ok;
    Ok(BreatherReport {
        phases,
        residuals,
        max_residual,
        residual_limit,
        periodic,
        envelope_monotone,
        localization,
        localized_fit,
        tail_fraction,
        tail_ok,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driving::{DrivingSpec, Forcing, TemporalLaw};
    use crate::lattice::{Boundary, Lattice};
    use crate::model::ModelParams;
    use crate::nonlinearity::{NonlinearitySpec, Sign};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single_site(g: f64, gamma: f64) -> Dnls {
        let lat = Lattice::new(16, Boundary::Dirichlet).unwrap();
        let params = ModelParams::new(0.0, gamma, NonlinearitySpec::off()).unwrap();
        let d = DrivingSpec::additive_only(Forcing::new(SpatialProfile::SingleSite { amplitude: g, site: 0 }, TemporalLaw::constant(c(1.0, 0.0))));
        Dnls::new(params, lat, &d).unwrap()
    }

    fn with_norms(g1: f64, g2: f64, gamma: f64) -> Dnls {
        let lat = Lattice::new(8, Boundary::Dirichlet).unwrap();
        let params = ModelParams::new(1.0, gamma, NonlinearitySpec::cubic(Sign::Plus)).unwrap();
        let site = |a| Forcing::new(SpatialProfile::SingleSite { amplitude: a, site: 0 }, TemporalLaw::constant(c(1.0, 0.0)));
        Dnls::new(params, lat, &DrivingSpec::new(site(g1), site(g2))).unwrap()
    }

    #[test]
    fn strong_damping_arithmetic() {
        let ok = check_strong_damping(&with_norms(1.0, 0.0, 2.0)).unwrap();
        assert!((ok.rhs - 0.375).abs() < 1e-15 && ok.satisfied);
        let weak = check_strong_damping(&with_norms(1.0, 0.0, 0.5)).unwrap();
        assert!((weak.rhs - 6.0).abs() < 1e-14 && !weak.satisfied);
        let zero = check_strong_damping(&with_norms(0.0, 0.0, 1e-3)).unwrap();
        assert!(zero.rhs == 0.0 && zero.satisfied);
        assert!(check_strong_damping(&with_norms(1.0, 0.6, 1.0)).is_err());
    }

    #[test]
    fn affine_period_map() {
        // ψ' = −γψ − ig: Φ(ψ) = ψ* + (ψ − ψ*)e^{−γT} with ψ* = −ig/γ.
        let (g, gamma, period) = (0.7, 0.8, 2.0);
        let m = single_site(g, gamma);
        let psi = LatticeState::unit(m.lattice(), 0).unwrap().scaled(1.3).with_site(2, c(0.0, 0.4)).unwrap();
        let out = period_map(&m, &psi, 0.0, period, &IntegratorConfig::reference()).unwrap();
        let star = c(0.0, -g / gamma);
        let decay = (-gamma * period).exp();
        assert!((out.at(0) - (star + (c(1.3, 0.0) - star) * decay)).norm() < 1e-10);
        assert!((out.at(2) - c(0.0, 0.4) * decay).norm() < 1e-10);
    }

    #[test]
    fn zero_driving_gives_zero_breather_at_once() {
        let m = with_norms(0.0, 0.0, 1.0);
        let sol = find_breather(&m, &BreatherOptions::default(), None).unwrap();
        assert_eq!(sol.iterations, 1);
        assert_eq!(sol.state0.l2_norm(), 0.0);
        let report = verify_breather(&sol, &m, 4, 1e-10, &IntegratorConfig::reference()).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn analytic_single_site_fixed_point() {
        let m = single_site(1.0, 1.0);
        let opts = BreatherOptions { period: Some(TAU), ..BreatherOptions::default() };
        let sol = find_breather(&m, &opts, None).unwrap();
        assert!((sol.state0.at(0) - c(0.0, -1.0)).norm() < 1e-10);
        assert!(sol.contraction_ratio.unwrap() <= sol.theoretical_ratio * 1.05);
        let report = verify_breather(&sol, &m, 8, opts.tol, &opts.integrator).unwrap();
        assert!(report.pass && report.max_residual < 1e-12, "{report:?}");
    }

    #[test]
    fn perturbed_solution_fails_periodicity() {
        let m = single_site(1.0, 1.0);
        let opts = BreatherOptions { period: Some(TAU), ..BreatherOptions::default() };
        let mut sol = find_breather(&m, &opts, None).unwrap();
        let v = sol.state0.at(0);
        sol.state0 = sol.state0.with_site(0, v * 1.1).unwrap();
        assert!(!verify_breather(&sol, &m, 8, opts.tol, &opts.integrator).unwrap().periodic);
    }

    #[test]
    fn refuses_without_strong_damping() {
        let m = with_norms(1.0, 0.0, 0.5);
        assert!(matches!(find_breather(&m, &BreatherOptions::default(), None), Err(Error::Precondition(_))));
    }

    #[test]
    fn iteration_cap_reports_trace() {
        let m = single_site(1.0, 0.01);
        let opts = BreatherOptions { max_iterations: 3, period: Some(1.0), ..BreatherOptions::default() };
        match find_breather(&m, &opts, None) {
            Err(Error::NonConvergence { iterations, trace }) => assert_eq!((iterations, trace.len()), (3, 3)),
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn non_periodic_driving_is_refused() {
        let lat = Lattice::new(8, Boundary::Dirichlet).unwrap();
        let params = ModelParams::new(1.0, 3.0, NonlinearitySpec::off()).unwrap();
        let law = TemporalLaw::Quasiperiodic {
            frequencies: vec![1.0, std::f64::consts::SQRT_2],
            modes: vec![crate::driving::Mode { indices: vec![1, 1], coefficient: c(0.1, 0.0) }],
        };
        let d = DrivingSpec::additive_only(Forcing::new(SpatialProfile::SingleSite { amplitude: 1.0, site: 0 }, law));
        let m = Dnls::new(params, lat, &d).unwrap();
        assert!(matches!(find_breather(&m, &BreatherOptions::default(), None), Err(Error::Precondition(_))));
    }
}
