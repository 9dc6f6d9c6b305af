//! Continuity of solutions in the driving: for two drivings g, h and
//! solutions ψ, φ bounded by R on [t0, t0 + T],
//!   ‖ψ(t) − φ(t)‖ ≤ e^{λ(t−t0)}‖ψ(t0) − φ(t0)‖ + G(e^{λ(t−t0)} − 1)/λ
//! with G = ‖g⁽¹⁾ − h⁽¹⁾‖_Cb + R‖g⁽²⁾ − h⁽²⁾‖_Cb.

use serde::{Deserialize, Serialize};

use super::{CheckReport, DEFAULT_SAMPLE_INTERVAL};
use crate::driving::DrivingSpec;
use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegratorConfig};
use crate::lattice::{distance, LatticeState};
use crate::model::Dnls;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityPrediction {
    /// Bound on both solutions from the a-priori estimate.
    pub radius: f64,
    /// Growth exponent λ.
    pub lambda: f64,
    pub gap_g1: f64,
    pub gap_g2: f64,
    pub initial_distance: f64,
    /// C in bound(t) ≤ C·e^{λt}(‖Δ₀‖ + ‖g − h‖_Cb).
    pub constant: f64,
}

impl ContinuityPrediction {
    /// Bound on ‖ψ − φ‖ at elapsed time `s`.
    pub fn bound(&self, s: f64) -> f64 {
        let growth = (self.lambda * s).exp();
        let forcing = self.gap_g1 + self.radius * self.gap_g2;
        let integral = if self.lambda.abs() < 1e-12 { s } else { (self.lambda * s).exp_m1() / self.lambda };
        growth * self.initial_distance + forcing * integral
    }
}

/// Exponent used by the bound. Skew-adjointness of −iκA gives
/// −γ + 2aR^b + ‖g⁽²⁾‖; the cruder γ + √2aR^b + 4|κ| from bounding every
/// term in norm is larger, and taking the maximum keeps the stated form
/// while staying valid.
fn growth_exponent(model: &Dnls, radius: f64) -> f64 {
    let p = model.params();
    let nl = &p.nonlinearity;
    let g2 = model.driving_spec().sup_norm().1;
    let crude = p.gamma + nl.ball_lipschitz(radius) + 4.0 * p.kappa.abs();
    let sharp = -p.gamma + nl.h1_lipschitz(radius) + g2;
    crude.max(sharp)
}

pub fn predict_continuity(model: &Dnls, other: &DrivingSpec, psi0: &LatticeState, phi0: &LatticeState) -> Result<ContinuityPrediction> {
    let other_model = Dnls::new(*model.params(), model.lattice(), other)?;
    let mut r2: f64 = 0.0;
    for (m, s) in [(model, psi0), (&other_model, phi0)] {
        let gt = m.effective_damping()?;
        let level = (m.driving_spec().sup_norm().0 / gt).powi(2);
        r2 = r2.max(s.norm_sqr() + level);
    }
    let radius = r2.sqrt();
    let (gap_g1, gap_g2) = model.driving_spec().sup_distance(other);
    let lambda = growth_exponent(model, radius);
    Ok(ContinuityPrediction {
        radius,
        lambda,
        gap_g1,
        gap_g2,
        initial_distance: distance(psi0, phi0)?,
        constant: 1f64.max(radius.max(1.0) / lambda),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityMeasurement {
    pub max_distance: f64,
    /// Largest distance / bound over the samples.
    pub max_ratio: f64,
    pub violations: usize,
    pub samples: usize,
}

/// Solves with driving g (the model's) and h = `other` and compares the
/// distance with the bound at every sample.
pub fn verify_continuity(
    model: &Dnls,
    other: &DrivingSpec,
    psi0: &LatticeState,
    phi0: &LatticeState,
    t0: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<CheckReport<ContinuityPrediction, ContinuityMeasurement>> {
    let prediction = predict_continuity(model, other, psi0, phi0)?;
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
    }
    let other_model = Dnls::new(*model.params(), model.lattice(), other)?;
    let cfg = IntegratorConfig { sample_interval: cfg.sample_interval.or(Some(DEFAULT_SAMPLE_INTERVAL)), ..*cfg };
    let lat = model.lattice();
    let (a, b) = rayon::join(
        || integrate(model, lat, psi0, t0, t0 + horizon, &cfg),
        || integrate(&other_model, lat, phi0, t0, t0 + horizon, &cfg),
    );
    let (a, b) = (a?, b?);
    let noise = 10.0 * (cfg.rtol * prediction.radius + cfg.atol * (2.0 * lat.sites as f64).sqrt());
    let mut m = ContinuityMeasurement { max_distance: 0.0, max_ratio: 0.0, violations: 0, samples: a.len() };
    for ((t, x), y) in a.times.iter().zip(&a.states).zip(&b.states) {
        let d = distance(x, y)?;
        let bound = prediction.bound(t - t0) + noise;
        m.max_distance = m.max_distance.max(d);
        m.max_ratio = m.max_ratio.max(d / bound);
        if d > bound {
            m.violations += 1;
        }
    }
    Ok(CheckReport { prediction, pass: m.violations == 0, measured: m, slack: 0.0 })
}
