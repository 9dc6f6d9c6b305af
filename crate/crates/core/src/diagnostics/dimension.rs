//! Grassberger–Procaccia correlation dimension of a sampled attractor.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::linear_fit;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DimensionOptions {
    pub min_points: usize,
    /// Pairs closer than this many indices apart are skipped.
    pub theiler_window: usize,
    /// Number of log-spaced radii in the fitted decade.
    pub radii: usize,
    /// The lower end of the scaling range is the distance at which this many
    /// pairs have accumulated.
    pub min_pairs: usize,
    /// The upper end is this quantile of the pair distances.
    pub upper_quantile: f64,
    pub confidence: f64,
}

impl Default for DimensionOptions {
    fn default() -> Self {
        Self { min_points: 2000, theiler_window: 10, radii: 20, min_pairs: 1000, upper_quantile: 0.1, confidence: 0.95 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub dimension: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub r_squared: f64,
    pub eps_low: f64,
    pub eps_high: f64,
    pub points: usize,
    pub pairs: usize,
    /// All points coincide (a fixed point); the dimension is reported as 0.
    pub degenerate: bool,
}

impl DimensionEstimate {
    pub fn ci_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Slope of ln C(ε) against ln ε over one decade centred (geometrically)
/// between the `min_pairs`-th smallest pair distance and the
/// `upper_quantile` distance.
pub fn correlation_dimension(points: &[Vec<f64>], opts: &DimensionOptions) -> Result<DimensionEstimate> {
    let n = points.len();
    if n < opts.min_points {
        return Err(Error::InsufficientData(format!("need at least {} points, got {n}", opts.min_points)));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim || p.iter().any(|v| !v.is_finite())) {
        return Err(Error::Domain("points must be finite and share one dimension".into()));
    }
    if opts.radii < 3 || !(0.0 < opts.upper_quantile && opts.upper_quantile <= 1.0) {
        return Err(Error::Config("dimension fit needs ≥ 3 radii and a quantile in (0, 1]".into()));
    }
    let w = opts.theiler_window;
    let mut d: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| (i + w + 1..n).map(move |j| euclid(&points[i], &points[j])))
        .collect();
    if d.len() < opts.min_pairs.max(opts.radii) {
        return Err(Error::InsufficientData(format!("only {} admissible pairs", d.len())));
    }
    d.par_sort_unstable_by(f64::total_cmp);
    let pairs = d.len();
    let eps_low = d[opts.min_pairs.max(1) - 1];
    let eps_high = d[((opts.upper_quantile * pairs as f64) as usize).min(pairs - 1)];
    if eps_high == 0.0 {
        return Ok(DimensionEstimate {
            dimension: 0.0,
            ci_low: 0.0,
            ci_high: 0.0,
            r_squared: 1.0,
            eps_low,
            eps_high,
            points: n,
            pairs,
            degenerate: true,
        });
    }
    let centre = (eps_low.max(eps_high * 1e-12) * eps_high).sqrt();
    let (lo, hi) = (centre / 10f64.sqrt(), centre * 10f64.sqrt());
    let mut xs = Vec::with_capacity(opts.radii);
    let mut ys = Vec::with_capacity(opts.radii);
    for k in 0..opts.radii {
        let eps = lo * (hi / lo).powf(k as f64 / (opts.radii - 1) as f64);
        let count = d.partition_point(|&v| v <= eps);
        if count > 0 {
            xs.push(eps.ln());
            ys.push((count as f64 / pairs as f64).ln());
        }
    }
    let fit = linear_fit(&xs, &ys).ok_or_else(|| Error::InsufficientData("no pairs in the scaling range".into()))?;
    let half = if fit.points > 2 {
        let t = StudentsT::new(0.0, 1.0, (fit.points - 2) as f64)
            .map_err(|e| Error::Domain(e.to_string()))?
            .inverse_cdf(0.5 + opts.confidence / 2.0);
        t * fit.slope_se
    } else {
        f64::INFINITY
    };
    Ok(DimensionEstimate {
        dimension: fit.slope,
        ci_low: fit.slope - half,
        ci_high: fit.slope + half,
        r_squared: fit.r_squared,
        eps_low: lo,
        eps_high: hi,
        points: n,
        pairs,
        degenerate: false,
    })
}
