//! Exponential contraction of the solution map near the attractor: two
//! orbits starting in the absorbing ball approach each other at rate at
//! least γ − aK^b − ‖g⁽²⁾‖_Cb.

use serde::{Deserialize, Serialize};

use super::{linear_fit, CheckReport, LinearFit, DEFAULT_SAMPLE_INTERVAL};
use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegratorConfig, Trajectory};
use crate::lattice::{distance, LatticeState};
use crate::model::Dnls;

/// Distances within this multiple of the integration noise are not fitted.
const NOISE_MULTIPLE: f64 = 1e3;
/// Share of the decay window discarded as transient.
const TRANSIENT_SHARE: f64 = 0.2;
const MIN_FIT_POINTS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionPrediction {
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    /// Absorbing radius K.
    pub radius: f64,
    pub g2_sup: f64,
    /// γ − aK^b − ‖g⁽²⁾‖_Cb.
    pub rate: f64,
}

pub fn predict_contraction(model: &Dnls) -> Result<ContractionPrediction> {
    let p = model.params();
    let (g1, g2) = model.driving_spec().sup_norm();
    let gt = model.effective_damping()?;
    let radius = std::f64::consts::SQRT_2 * g1 / gt;
    let (a, b) = (p.nonlinearity.a(), p.nonlinearity.b());
    let nonlinear = if p.nonlinearity.is_off() { 0.0 } else { a * radius.powf(b) };
    Ok(ContractionPrediction { gamma: p.gamma, a, b, radius, g2_sup: g2, rate: p.gamma - nonlinear - g2 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionMeasurement {
    pub initial_distance: f64,
    pub noise_floor: f64,
    /// −slope of ln‖ψ − φ‖ against t over the fit window.
    pub rate: f64,
    pub fit: LinearFit,
    pub fit_start: f64,
    pub fit_end: f64,
}

/// Fits the decay rate of ‖ψ(t) − φ(t)‖ on two trajectories sampled at the
/// same times.
pub fn measure_contraction(a: &Trajectory, b: &Trajectory, noise_floor: f64) -> Result<ContractionMeasurement> {
    if a.times != b.times {
        return Err(Error::Domain("contraction needs trajectories sampled at identical times".into()));
    }
    let d: Vec<f64> = a
        .states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| distance(x, y))
        .collect::<Result<_>>()?;
    let end = d.iter().position(|&v| v <= noise_floor).unwrap_or(d.len());
    let start = (TRANSIENT_SHARE * end as f64).ceil() as usize;
    if end.saturating_sub(start) < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "only {} samples above the noise floor {noise_floor:e}",
            end.saturating_sub(start)
        )));
    }
    let ln_d: Vec<f64> = d[start..end].iter().map(|v| v.ln()).collect();
    let fit = linear_fit(&a.times[start..end], &ln_d)
        .ok_or_else(|| Error::InsufficientData("degenerate contraction fit".into()))?;
    Ok(ContractionMeasurement {
        initial_distance: d[0],
        noise_floor,
        rate: -fit.slope,
        fit,
        fit_start: a.times[start],
        fit_end: a.times[end - 1],
    })
}

/// Integrates both initial states over [t0, t0 + horizon] and checks the
/// fitted rate against (1 − slack) times the prediction.
pub fn verify_contraction(
    model: &Dnls,
    psi0: &LatticeState,
    phi0: &LatticeState,
    t0: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
    slack: f64,
) -> Result<CheckReport<ContractionPrediction, ContractionMeasurement>> {
    let prediction = predict_contraction(model)?;
    if prediction.rate <= 0.0 {
        return Err(Error::Precondition(format!(
            "predicted contraction rate {} is not positive",
            prediction.rate
        )));
    }
    let cfg = IntegratorConfig { sample_interval: cfg.sample_interval.or(Some(DEFAULT_SAMPLE_INTERVAL)), ..*cfg };
    let lat = model.lattice();
    let (a, b) = rayon::join(
        || integrate(model, lat, psi0, t0, t0 + horizon, &cfg),
        || integrate(model, lat, phi0, t0, t0 + horizon, &cfg),
    );
    let (a, b) = (a?, b?);
    let scale = a.norms.iter().chain(&b.norms).fold(1.0f64, |m, &v| m.max(v));
    let floor = NOISE_MULTIPLE * (cfg.rtol * scale + cfg.atol * (2.0 * lat.sites as f64).sqrt());
    let measured = measure_contraction(&a, &b, floor)?;
    let pass = measured.rate >= (1.0 - slack) * prediction.rate;
    Ok(CheckReport { prediction, measured, slack, pass })
}
