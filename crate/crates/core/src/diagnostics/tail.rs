//! Uniform tail decay: after T(ξ, r) = ln(2r²/ξ)/Γ the mass beyond the
//! cutoff M_ξ stays below ξ.

use serde::{Deserialize, Serialize};

use super::{CheckReport, DEFAULT_SAMPLE_INTERVAL};
use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegratorConfig, Trajectory};
use crate::lattice::{tail_mass, LatticeState};
use crate::model::Dnls;

/// Cutoffs beyond this are treated as "no certified cutoff exists".
const MAX_CUTOFF: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailPrediction {
    pub xi: f64,
    pub initial_radius: f64,
    pub gamma_tilde: f64,
    /// M_ξ: smallest m with Σ_{|k|>m} sup_t|g⁽¹⁾_k(t)|² ≤ Γ²ξ/2.
    pub cutoff: usize,
    /// Certified driving tail beyond the cutoff.
    pub driving_tail: f64,
    /// T(ξ, r), clamped at zero.
    pub time: f64,
}

pub fn predict_tail(model: &Dnls, initial_radius: f64, xi: f64) -> Result<TailPrediction> {
    if !(xi.is_finite() && xi > 0.0) {
        return Err(Error::Domain(format!("ξ must be positive, got {xi}")));
    }
    if !(initial_radius.is_finite() && initial_radius >= 0.0) {
        return Err(Error::Domain(format!("initial radius must be non-negative, got {initial_radius}")));
    }
    let gt = model.effective_damping()?;
    let g1 = &model.driving_spec().additive;
    let amp2 = g1.law.amplitude_bound().powi(2);
    let budget = gt * gt * xi / 2.0;
    let driving_tail = |m: u64| amp2 * g1.profile.tail_sqr(Some(m));
    // the tail is non-increasing in m, so bisect on [0, MAX_CUTOFF]
    let (mut lo, mut hi) = (0u64, MAX_CUTOFF);
    if driving_tail(hi) > budget {
        return Err(Error::Precondition(format!("no cutoff up to {MAX_CUTOFF} meets the driving tail budget {budget:e}")));
    }
    if driving_tail(0) <= budget {
        hi = 0;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if driving_tail(mid) <= budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let cutoff = hi as usize;
    let available = model.lattice().max_cutoff();
    if cutoff >= available {
        return Err(Error::TruncationTooSmall { required: cutoff, available });
    }
    let time = ((2.0 * initial_radius * initial_radius / xi).ln() / gt).max(0.0);
    Ok(TailPrediction { xi, initial_radius, gamma_tilde: gt, cutoff, driving_tail: driving_tail(hi), time })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailMeasurement {
    /// Largest Σ_{|n|>M_ξ}|ψ_n|² over samples with t − t0 ≥ T(ξ, r).
    pub max_tail: f64,
    pub time_of_max: f64,
    pub samples_checked: usize,
    pub violations: usize,
}

pub fn evaluate_tail(prediction: &TailPrediction, traj: &Trajectory) -> Result<CheckReport<TailPrediction, TailMeasurement>> {
    let t0 = traj.times[0];
    let mut m = TailMeasurement { max_tail: 0.0, time_of_max: f64::NAN, samples_checked: 0, violations: 0 };
    for (&t, state) in traj.times.iter().zip(&traj.states) {
        if t - t0 < prediction.time {
            continue;
        }
        let tail = tail_mass(state, prediction.cutoff)?;
        m.samples_checked += 1;
        if tail > m.max_tail || m.time_of_max.is_nan() {
            m.max_tail = tail;
            m.time_of_max = t;
        }
        if tail > prediction.xi {
            m.violations += 1;
        }
    }
    if m.samples_checked == 0 {
        return Err(Error::InsufficientData(format!(
            "trajectory ends before T(ξ, r) = {}",
            prediction.time
        )));
    }
    Ok(CheckReport { prediction: *prediction, pass: m.violations == 0, measured: m, slack: 0.0 })
}

/// Integrates over [t0, t0 + T(ξ, r) + `extra`] with r = ‖initial‖ and evaluates.
pub fn verify_tail(
    model: &Dnls,
    initial: &LatticeState,
    t0: f64,
    xi: f64,
    extra: f64,
    cfg: &IntegratorConfig,
) -> Result<CheckReport<TailPrediction, TailMeasurement>> {
    let prediction = predict_tail(model, initial.l2_norm(), xi)?;
    let cfg = IntegratorConfig { sample_interval: cfg.sample_interval.or(Some(DEFAULT_SAMPLE_INTERVAL)), ..*cfg };
    let traj = integrate(model, model.lattice(), initial, t0, t0 + prediction.time + extra.max(0.0), &cfg)?;
    evaluate_tail(&prediction, &traj)
}
