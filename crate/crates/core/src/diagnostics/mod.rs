//! Checks of the attractor estimates against simulated trajectories.
//!
//! Every check pairs a closed-form prediction with a measurement and reports
//! whether the measurement respects the prediction within the stated slack.

pub mod absorbing;
pub mod continuity;
pub mod contraction;
pub mod dimension;
pub mod tail;

use serde::{Deserialize, Serialize};

pub use absorbing::{predict_absorbing, verify_absorbing, AbsorbingPrediction};
pub use continuity::{verify_continuity, ContinuityPrediction};
pub use contraction::{predict_contraction, verify_contraction};
pub use dimension::{correlation_dimension, DimensionEstimate, DimensionOptions};
pub use tail::{predict_tail, verify_tail, TailPrediction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport<P, M> {
    pub prediction: P,
    pub measured: M,
    /// Relative tolerance granted to the measurement.
    pub slack: f64,
    pub pass: bool,
}

/// Default spacing of trajectory samples used by the checks.
pub const DEFAULT_SAMPLE_INTERVAL: f64 = 0.01;

/// Ordinary least-squares line y ≈ intercept + slope·x.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Standard error of the slope.
    pub slope_se: f64,
    pub points: usize,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = (syy - slope * sxy).max(0.0);
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - rss / syy };
    let slope_se = if n > 2 { (rss / (nf - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    Some(LinearFit { slope, intercept, r_squared, slope_se, points: n })
}
