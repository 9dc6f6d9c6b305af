//! Adaptive Dormand–Prince 5(4) integration with FSAL and PI-free step control.

mod dense;
pub mod monitor;

pub use dense::hermite;

use std::ops::ControlFlow;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{norm_sqr, Lattice, LatticeState};
use crate::model::VectorField;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

// Dormand–Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// How trajectory samples are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Steps are clipped so that every sample time is a step endpoint.
    #[default]
    StepEndpoints,
    /// Free steps; samples come from cubic Hermite interpolation.
    Hermite,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when absent.
    pub dt_init: Option<f64>,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Spacing of recorded samples; every accepted step when absent.
    pub sample_interval: Option<f64>,
    pub sampling: Sampling,
    pub max_steps: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-11,
            dt_init: None,
            dt_min: 1e-12,
            dt_max: 1.0,
            sample_interval: None,
            sampling: Sampling::StepEndpoints,
            max_steps: 50_000_000,
        }
    }
}

impl IntegratorConfig {
    /// Tight tolerances used as the reference solution.
    pub fn reference() -> Self {
        Self { rtol: 1e-11, atol: 1e-14, ..Self::default() }
    }

    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    pub fn with_sample_interval(mut self, dt: f64) -> Self {
        self.sample_interval = Some(dt);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        if !pos(self.rtol) || !pos(self.atol) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if !pos(self.dt_min) || self.dt_max.partial_cmp(&self.dt_min) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Config(format!(
                "need 0 < dt_min < dt_max, got {} and {}",
                self.dt_min, self.dt_max
            )));
        }
        if self.dt_init.is_some_and(|h| !pos(h)) {
            return Err(Error::Config("dt_init must be positive".into()));
        }
        if self.sample_interval.is_some_and(|h| !pos(h)) {
            return Err(Error::Config("sample_interval must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
    pub evaluations: u64,
}

/// Outcome of one trial step.
#[derive(Clone, Debug)]
pub struct StepResult {
    pub state: Vec<Complex64>,
    /// Weighted RMS of the embedded error estimate; ≤ 1 means acceptable.
    pub error: f64,
    pub dt_next: f64,
    pub accepted: bool,
}

/// Reusable stage buffers.
struct Stages {
    k: [Vec<Complex64>; 7],
    tmp: Vec<Complex64>,
    ynew: Vec<Complex64>,
}

impl Stages {
    fn new(dim: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![ZERO; dim]),
            tmp: vec![ZERO; dim],
            ynew: vec![ZERO; dim],
        }
    }
}

/// Weighted RMS over the 2N real components with
/// sc = atol + rtol·max(|y|, |ynew|) taken componentwise.
fn error_norm(y: &[Complex64], ynew: &[Complex64], err: impl Fn(usize) -> Complex64, rtol: f64, atol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..y.len() {
        let e = err(i);
        let sr = atol + rtol * y[i].re.abs().max(ynew[i].re.abs());
        let si = atol + rtol * y[i].im.abs().max(ynew[i].im.abs());
        acc += (e.re / sr).powi(2) + (e.im / si).powi(2);
    }
    (acc / (2 * y.len()) as f64).sqrt()
}

fn controller(error: f64, accepted: bool, dt: f64) -> f64 {
    let factor = if error == 0.0 {
        MAX_FACTOR
    } else {
        (SAFETY * error.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
    };
    if accepted {
        dt * factor
    } else {
        dt * factor.min(1.0)
    }
}

/// Takes stage k[0] = f(t, y) as given and fills k[1..7]; k[6] = f(t+dt, ynew).
/// Returns the error norm.
fn dp_step<F: VectorField + ?Sized>(f: &F, t: f64, y: &[Complex64], dt: f64, cfg: &IntegratorConfig, s: &mut Stages) -> f64 {
    let n = y.len();
    let Stages { k, tmp, ynew } = s;
    macro_rules! stage {
        ($dst:expr, $c:expr, $( ($a:expr, $j:expr) ),+ ) => {{
            for i in 0..n {
                tmp[i] = y[i] + ( $( k[$j][i] * $a + )+ ZERO ) * dt;
            }
            let (head, tail) = k.split_at_mut($dst);
            let _ = head;
            f.eval(t + $c * dt, tmp, &mut tail[0]);
        }};
    }
    stage!(1, C2, (A21, 0));
    stage!(2, C3, (A31, 0), (A32, 1));
    stage!(3, C4, (A41, 0), (A42, 1), (A43, 2));
    stage!(4, C5, (A51, 0), (A52, 1), (A53, 2), (A54, 3));
    stage!(5, 1.0, (A61, 0), (A62, 1), (A63, 2), (A64, 3), (A65, 4));
    for i in 0..n {
        ynew[i] = y[i] + (k[0][i] * B1 + k[2][i] * B3 + k[3][i] * B4 + k[4][i] * B5 + k[5][i] * B6) * dt;
    }
    let (head, tail) = k.split_at_mut(6);
    let _ = head;
    f.eval(t + dt, ynew, &mut tail[0]);
    let k = &s.k;
    error_norm(
        y,
        &s.ynew,
        |i| (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7) * dt,
        cfg.rtol,
        cfg.atol,
    )
}

/// One trial step of size `dt` from (t, y).
pub fn step<F: VectorField + ?Sized>(f: &F, t: f64, y: &[Complex64], dt: f64, cfg: &IntegratorConfig) -> StepResult {
    let mut s = Stages::new(y.len());
    f.eval(t, y, &mut s.k[0]);
    let error = dp_step(f, t, y, dt, cfg, &mut s);
    let accepted = error <= 1.0;
    StepResult {
        state: if accepted { s.ynew } else { y.to_vec() },
        error,
        dt_next: controller(error, accepted, dt).min(cfg.dt_max),
        accepted,
    }
}

/// Starting step from the usual two-evaluation heuristic.
fn initial_step<F: VectorField + ?Sized>(f: &F, t: f64, y: &[Complex64], f0: &[Complex64], cfg: &IntegratorConfig) -> f64 {
    let zero = vec![ZERO; y.len()];
    let d0 = error_norm(&zero, y, |i| y[i], cfg.rtol, cfg.atol);
    let d1 = error_norm(&zero, y, |i| f0[i], cfg.rtol, cfg.atol);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<Complex64> = y.iter().zip(f0).map(|(a, b)| a + b * h0).collect();
    let mut f1 = vec![ZERO; y.len()];
    f.eval(t + h0, &y1, &mut f1);
    let d2 = error_norm(&zero, y, |i| f1[i] - f0[i], cfg.rtol, cfg.atol) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).clamp(cfg.dt_min * 10.0, cfg.dt_max)
}

/// A recorded trajectory on a lattice.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<LatticeState>,
    pub norms: Vec<f64>,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &LatticeState {
        self.states.last().expect("trajectories hold at least one sample")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectories hold at least one sample")
    }
}

/// Schedule of sample times in (t0, t1], always ending at t1.
struct Schedule {
    t0: f64,
    t1: f64,
    interval: Option<f64>,
    k: u64,
}

impl Schedule {
    fn new(t0: f64, t1: f64, interval: Option<f64>) -> Self {
        Self { t0, t1, interval, k: 1 }
    }

    /// Next pending sample time, or None once t1 has been emitted.
    fn peek(&self) -> Option<f64> {
        match self.interval {
            None => (self.k == 1).then_some(self.t1),
            Some(h) => {
                let t = self.t0 + self.k as f64 * h;
                if self.k == u64::MAX {
                    None
                } else if t < self.t1 - 1e-12 * h {
                    Some(t)
                } else {
                    Some(self.t1)
                }
            }
        }
    }

    fn advance(&mut self) {
        let was_last = self.peek() == Some(self.t1);
        self.k = if was_last { u64::MAX } else { self.k + 1 };
        if self.interval.is_none() {
            self.k = u64::MAX;
        }
    }
}

/// Integrates from (t0, y0) to t1 and hands every sample to `observe`,
/// starting with the initial state. The observer may stop the run early.
/// With no sample interval every accepted step is observed.
pub fn integrate_with<F, O>(
    f: &F,
    y0: &[Complex64],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    mut observe: O,
) -> Result<(Vec<Complex64>, f64, StepStats)>
where
    F: VectorField + ?Sized,
    O: FnMut(f64, &[Complex64]) -> ControlFlow<()>,
{
    cfg.validate()?;
    if y0.len() != f.dim() {
        return Err(Error::Domain(format!("state has {} sites, model expects {}", y0.len(), f.dim())));
    }
    if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
        return Err(Error::Domain(format!("need finite t0 ≤ t1, got [{t0}, {t1}]")));
    }
    let mut stats = StepStats::default();
    let mut y = y0.to_vec();
    let mut t = t0;
    if observe(t, &y).is_break() || t1 == t0 {
        return Ok((y, t, stats));
    }

    let mut s = Stages::new(y.len());
    f.eval(t, &y, &mut s.k[0]);
    stats.evaluations += 1;
    let mut dt = match cfg.dt_init {
        Some(h) => h.min(cfg.dt_max),
        None => {
            stats.evaluations += 1;
            initial_step(f, t, &y, &s.k[0], cfg)
        }
    };
    let mut schedule = Schedule::new(t0, t1, cfg.sample_interval);
    let every_step = cfg.sample_interval.is_none();
    let mut f_old = vec![ZERO; y.len()];

    while t < t1 {
        if stats.accepted + stats.rejected >= cfg.max_steps {
            return Err(Error::StepUnderflow { t, norm: norm_sqr(&y).sqrt(), dt });
        }
        // In endpoint mode the step is clipped to the next sample; in
        // Hermite mode only to t1.
        let target = match cfg.sampling {
            Sampling::StepEndpoints => schedule.peek().unwrap_or(t1),
            Sampling::Hermite => t1,
        };
        let proposed = dt;
        let mut clipped = false;
        if t + dt >= target - 1e-13 * dt.max(target.abs() * f64::EPSILON) {
            dt = target - t;
            clipped = true;
        }
        if dt < cfg.dt_min && !clipped {
            return Err(Error::StepUnderflow { t, norm: norm_sqr(&y).sqrt(), dt });
        }

        let error = dp_step(f, t, &y, dt, cfg, &mut s);
        stats.evaluations += 6;
        if !error.is_finite() || error > 1.0 {
            stats.rejected += 1;
            dt = if error.is_finite() { controller(error, false, dt) } else { dt * MIN_FACTOR };
            if dt < cfg.dt_min {
                return Err(Error::StepUnderflow { t, norm: norm_sqr(&y).sqrt(), dt });
            }
            continue;
        }
        stats.accepted += 1;
        let t_new = if clipped { target } else { t + dt };

        if cfg.sampling == Sampling::Hermite && !every_step {
            f_old.copy_from_slice(&s.k[0]);
            while let Some(ts) = schedule.peek() {
                if ts > t_new || (ts == t1 && t_new < t1) {
                    break;
                }
                let sample = if ts == t_new {
                    s.ynew.clone()
                } else {
                    hermite(t, &y, &f_old, t_new, &s.ynew, &s.k[6], ts)
                };
                schedule.advance();
                if observe(ts, &sample).is_break() {
                    return Ok((sample, ts, stats));
                }
            }
        }

        std::mem::swap(&mut y, &mut s.ynew);
        s.k.swap(0, 6);
        let next = controller(error, true, dt).min(cfg.dt_max);
        t = t_new;

        if cfg.sampling == Sampling::StepEndpoints || every_step {
            let hit = every_step || (clipped && schedule.peek() == Some(target));
            if hit {
                if !every_step {
                    schedule.advance();
                }
                if observe(t, &y).is_break() {
                    return Ok((y, t, stats));
                }
            }
        }
        dt = if clipped { next.max(proposed.min(cfg.dt_max)) } else { next };
    }
    Ok((y, t, stats))
}

/// Integrates and records samples at `cfg.sample_interval` (or every step).
pub fn integrate<F: VectorField + ?Sized>(
    f: &F,
    lattice: Lattice,
    initial: &LatticeState,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    if initial.lattice() != lattice {
        return Err(Error::Domain("initial state lives on a different lattice".into()));
    }
    let mut traj = Trajectory { times: Vec::new(), states: Vec::new(), norms: Vec::new(), stats: StepStats::default() };
    let (_, _, stats) = integrate_with(f, initial.values(), t0, t1, cfg, |t, y| {
        traj.times.push(t);
        traj.norms.push(norm_sqr(y).sqrt());
        traj.states.push(LatticeState::from_raw(lattice, y.to_vec()));
        ControlFlow::Continue(())
    })?;
    traj.stats = stats;
    Ok(traj)
}

/// The state at t1 only.
pub fn integrate_to<F: VectorField + ?Sized>(
    f: &F,
    initial: &LatticeState,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<LatticeState> {
    let cfg = IntegratorConfig { sample_interval: None, ..*cfg };
    let (y, _, _) = integrate_with(f, initial.values(), t0, t1, &cfg, |_, _| ControlFlow::Continue(()))?;
    Ok(LatticeState::from_raw(initial.lattice(), y))
}
