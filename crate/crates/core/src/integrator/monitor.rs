//! Sample-by-sample checks of the energy inequality
//! d/dt‖ψ‖² + Γ̃‖ψ‖² ≤ ‖g⁽¹⁾(t)‖²/Γ̃ and of the a-priori bound it implies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::model::Dnls;

/// Multiple of rtol allowed as relative error on a computed ‖ψ‖².
const NORM_ERROR_FACTOR: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DissipationViolation {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DissipationReport {
    pub gamma_tilde: f64,
    pub intervals: usize,
    /// Largest lhs − rhs observed; negative when every interval holds.
    pub worst_margin: f64,
    pub violations: Vec<DissipationViolation>,
    pub pass: bool,
}

/// Checks the differential inequality on every pair of consecutive samples.
///
/// The finite-difference quotient of ‖ψ‖² is compared against the averaged
/// inequality over [t_i, t_{i+1}]: integrating the inequality exactly gives
///   lhs_i = (E_{i+1} − E_i)/Δt + Γ̃E_i
///         ≤ G_i/Γ̃ + Γ̃E_i(1 − φ) + (Ĝ_iφ − G_i)/Γ̃,   φ = (1 − e^{−Γ̃Δt})/(Γ̃Δt),
/// where G_i = ‖g⁽¹⁾(t_i)‖² and Ĝ_i bounds ‖g⁽¹⁾‖² over the interval. A further
/// allowance of 10·rtol·(1 + E_i)/Δt covers the integration error in E.
pub fn monitor_dissipation(traj: &Trajectory, model: &Dnls, rtol: f64) -> Result<DissipationReport> {
    if traj.len() < 2 {
        return Err(Error::InsufficientData("the dissipation monitor needs at least two samples".into()));
    }
    let gt = model.effective_damping()?;
    let driving = model.driving();
    let mut violations = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for i in 0..traj.len() - 1 {
        let (t, dt) = (traj.times[i], traj.times[i + 1] - traj.times[i]);
        if dt <= 0.0 {
            continue;
        }
        let (e0, e1) = (traj.norms[i].powi(2), traj.norms[i + 1].powi(2));
        let g = driving.additive_norm_sqr(t);
        let g_max = driving.additive_norm_sqr_max(t, dt).max(g);
        let x = gt * dt;
        let phi = if x < 1e-8 { 1.0 - x / 2.0 } else { -(-x).exp_m1() / x };
        let lhs = (e1 - e0) / dt + gt * e0;
        let disc = gt * e0 * (1.0 - phi) + (g_max * phi - g) / gt;
        let rhs = g / gt + NORM_ERROR_FACTOR * rtol * (1.0 + e0.max(e1)) / dt + disc;
        worst = worst.max(lhs - rhs);
        if lhs > rhs {
            violations.push(DissipationViolation { t, lhs, rhs });
        }
    }
    Ok(DissipationReport {
        gamma_tilde: gt,
        intervals: traj.len() - 1,
        worst_margin: worst,
        pass: violations.is_empty(),
        violations,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct APrioriReport {
    pub gamma_tilde: f64,
    /// sup ‖g⁽¹⁾‖²/Γ̃², the asymptotic level of the bound.
    pub level: f64,
    /// Largest ‖ψ(t)‖² / bound(t) seen.
    pub max_ratio: f64,
    pub violations: usize,
    pub pass: bool,
}

/// Checks ‖ψ(t)‖² ≤ ‖ψ(t0)‖²e^{−Γ̃(t−t0)} + ‖g⁽¹⁾‖²_Cb/Γ̃² with relative slack
/// `rel_slack`.
pub fn check_a_priori_bound(traj: &Trajectory, model: &Dnls, rel_slack: f64) -> Result<APrioriReport> {
    if traj.is_empty() {
        return Err(Error::InsufficientData("empty trajectory".into()));
    }
    let gt = model.effective_damping()?;
    let g1 = model.driving_spec().sup_norm().0;
    let level = (g1 / gt).powi(2);
    let (t0, e0) = (traj.times[0], traj.norms[0].powi(2));
    let mut max_ratio: f64 = 0.0;
    let mut violations = 0;
    for (t, n) in traj.times.iter().zip(&traj.norms) {
        let bound = e0 * (-gt * (t - t0)).exp() + level;
        let e = n * n;
        if bound > 0.0 {
            max_ratio = max_ratio.max(e / bound);
        }
        if e > bound * (1.0 + rel_slack) {
            violations += 1;
        }
    }
    Ok(APrioriReport { gamma_tilde: gt, level, max_ratio, violations, pass: violations == 0 })
}
