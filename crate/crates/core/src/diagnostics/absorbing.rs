//! Absorbing ball B(0, K) with K² = 2‖g⁽¹⁾‖²/Γ² and entry time
//! T = ln(Γ²r²/‖g⁽¹⁾‖²)/Γ for initial data of norm at most r.

use serde::{Deserialize, Serialize};

use super::{CheckReport, DEFAULT_SAMPLE_INTERVAL};
use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegratorConfig, Trajectory};
use crate::lattice::LatticeState;
use crate::model::Dnls;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingPrediction {
    /// Γ = γ − 2‖g⁽²⁾‖_Cb.
    pub gamma_tilde: f64,
    pub g1_sup: f64,
    /// K.
    pub radius: f64,
    /// Radius r of the initial ball.
    pub initial_radius: f64,
    /// Time after which every orbit from B(0, r) stays in B(0, K); zero when
    /// B(0, r) already lies in the region the a-priori bound controls.
    pub entry_time: f64,
}

pub fn predict_absorbing(model: &Dnls, initial_radius: f64) -> Result<AbsorbingPrediction> {
    if !(initial_radius.is_finite() && initial_radius >= 0.0) {
        return Err(Error::Domain(format!("initial radius must be non-negative, got {initial_radius}")));
    }
    let gt = model.effective_damping()?;
    let g1 = model.driving_spec().sup_norm().0;
    if g1 == 0.0 {
        return Err(Error::Precondition("the absorbing radius degenerates for g1 = 0".into()));
    }
    let radius = std::f64::consts::SQRT_2 * g1 / gt;
    let entry_time = ((gt * initial_radius / g1).powi(2).ln() / gt).max(0.0);
    Ok(AbsorbingPrediction { gamma_tilde: gt, g1_sup: g1, radius, initial_radius, entry_time })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingMeasurement {
    /// First time (from the start of the trajectory) with ‖ψ‖ ≤ K(1 + slack).
    pub first_entry: Option<f64>,
    /// Samples outside the ball after the first entry.
    pub exits_after_entry: usize,
    pub max_norm_after_entry: f64,
    /// max ‖ψ(t)‖ over t ≥ T.
    pub max_norm_after_entry_time: f64,
    pub horizon: f64,
}

/// Checks a recorded trajectory against a prediction: the orbit must enter
/// the ball no later than T and never leave it afterwards.
pub fn evaluate_absorbing(
    prediction: &AbsorbingPrediction,
    traj: &Trajectory,
    slack: f64,
) -> CheckReport<AbsorbingPrediction, AbsorbingMeasurement> {
    let t0 = traj.times[0];
    let limit = prediction.radius * (1.0 + slack);
    let mut first_entry = None;
    let mut exits = 0;
    let mut max_after_entry: f64 = 0.0;
    let mut max_after_t: f64 = 0.0;
    for (&t, &n) in traj.times.iter().zip(&traj.norms) {
        let rel = t - t0;
        if first_entry.is_none() && n <= limit {
            first_entry = Some(rel);
        }
        if first_entry.is_some() {
            max_after_entry = max_after_entry.max(n);
            if n > limit {
                exits += 1;
            }
        }
        if rel >= prediction.entry_time {
            max_after_t = max_after_t.max(n);
        }
    }
    let measured = AbsorbingMeasurement {
        first_entry,
        exits_after_entry: exits,
        max_norm_after_entry: max_after_entry,
        max_norm_after_entry_time: max_after_t,
        horizon: traj.final_time() - t0,
    };
    let pass = first_entry.is_some_and(|e| e <= prediction.entry_time * (1.0 + slack)) && exits == 0;
    CheckReport { prediction: *prediction, measured, slack, pass }
}

/// Integrates from `initial` over max(`horizon_factor`·T, 1) and evaluates.
/// The prediction uses r = ‖initial‖.
pub fn verify_absorbing(
    model: &Dnls,
    initial: &LatticeState,
    t0: f64,
    horizon_factor: f64,
    cfg: &IntegratorConfig,
    slack: f64,
) -> Result<CheckReport<AbsorbingPrediction, AbsorbingMeasurement>> {
    let prediction = predict_absorbing(model, initial.l2_norm())?;
    let horizon = (horizon_factor * prediction.entry_time).max(1.0);
    let cfg = IntegratorConfig { sample_interval: cfg.sample_interval.or(Some(DEFAULT_SAMPLE_INTERVAL)), ..*cfg };
    let traj = integrate(model, model.lattice(), initial, t0, t0 + horizon, &cfg)?;
    Ok(evaluate_absorbing(&prediction, &traj, slack))
}
