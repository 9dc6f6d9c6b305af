//! External driving fields g⁽¹⁾ (additive) and g⁽²⁾ (parametric).
//!
//! Every field is separable: a spatial profile p_n times a complex scalar
//! temporal law s(t), evaluated at the shifted time t + offset. Shifting the
//! offset is the translation T(h) on the hull of the driving.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeState};
use crate::sum::CompensatedSum;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Largest denominator the commensurability check looks for.
pub const MAX_RATIONAL_DENOMINATOR: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpatialProfile {
    /// A·e^{−α|n|}
    Exponential { amplitude: f64, rate: f64 },
    /// A·e^{−n²/(2w²)}
    Gaussian { amplitude: f64, width: f64 },
    /// A at site n₀, zero elsewhere.
    SingleSite { amplitude: f64, site: i64 },
    /// Explicit amplitudes starting at `first_site`; zero outside.
    Table { first_site: i64, values: Vec<Complex64> },
}

impl SpatialProfile {
    pub fn zero() -> Self {
        SpatialProfile::SingleSite { amplitude: 0.0, site: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64, what: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("profile {what} must be finite")))
            }
        };
        match *self {
            SpatialProfile::Exponential { amplitude, rate } => {
                finite(amplitude, "amplitude")?;
                if !(rate.is_finite() && rate > 0.0) {
                    return Err(Error::Config(format!("exponential rate must be positive, got {rate}")));
                }
            }
            SpatialProfile::Gaussian { amplitude, width } => {
                finite(amplitude, "amplitude")?;
                if !(width.is_finite() && width > 0.0) {
                    return Err(Error::Config(format!("gaussian width must be positive, got {width}")));
                }
            }
            SpatialProfile::SingleSite { amplitude, .. } => finite(amplitude, "amplitude")?,
            SpatialProfile::Table { ref values, .. } => {
                if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::Config("profile table holds non-finite values".into()));
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, site: i64) -> Complex64 {
        match *self {
            SpatialProfile::Exponential { amplitude, rate } => {
                Complex64::new(amplitude * (-rate * site.abs() as f64).exp(), 0.0)
            }
            SpatialProfile::Gaussian { amplitude, width } => {
                let n = site as f64;
                Complex64::new(amplitude * (-n * n / (2.0 * width * width)).exp(), 0.0)
            }
            SpatialProfile::SingleSite { amplitude, site: s } => {
                if site == s {
                    Complex64::new(amplitude, 0.0)
                } else {
                    ZERO
                }
            }
            SpatialProfile::Table { first_site, ref values } => {
                let k = site - first_site;
                if (0..values.len() as i64).contains(&k) {
                    values[k as usize]
                } else {
                    ZERO
                }
            }
        }
    }

    pub fn realize(&self, lattice: Lattice) -> Vec<Complex64> {
        lattice.sites_iter().map(|n| self.value(n)).collect()
    }

    /// Σ_{|n|>m} |p_n|² on the infinite lattice (closed form or certified
    /// upper bound). `m = None` gives the full ‖p‖².
    pub fn tail_sqr(&self, m: Option<u64>) -> f64 {
        let beyond = |n: i64| m.is_none_or(|m| n.unsigned_abs() > m);
        match *self {
            SpatialProfile::Exponential { amplitude, rate } => {
                let q = (-2.0 * rate).exp();
                let a2 = amplitude * amplitude;
                match m {
                    // A²·(1 + q)/(1 − q) = A²·coth(α)
                    None => a2 * (1.0 + q) / (1.0 - q),
                    Some(m) => 2.0 * a2 * (-2.0 * rate * (m as f64 + 1.0)).exp() / (1.0 - q),
                }
            }
            SpatialProfile::Gaussian { amplitude, width } => {
                let a2 = amplitude * amplitude;
                let one_side = gaussian_side_sum(width, m.map_or(1, |m| m + 1));
                let centre = if m.is_none() { 1.0 } else { 0.0 };
                a2 * (centre + 2.0 * one_side)
            }
            SpatialProfile::SingleSite { amplitude, site } => {
                if beyond(site) {
                    amplitude * amplitude
                } else {
                    0.0
                }
            }
            SpatialProfile::Table { first_site, ref values } => values
                .iter()
                .enumerate()
                .filter(|(k, _)| beyond(first_site + *k as i64))
                .map(|(_, z)| z.norm_sqr())
                .collect::<CompensatedSum>()
                .value(),
        }
    }

    /// ‖p‖ on the infinite lattice.
    pub fn norm(&self) -> f64 {
        self.tail_sqr(None).sqrt()
    }

    /// Radius of the driving core: the largest |n| with |p_n| ≥ `fraction`·max|p|.
    pub fn core_radius(&self, fraction: f64) -> u64 {
        match *self {
            SpatialProfile::Exponential { amplitude, rate } => {
                if amplitude == 0.0 {
                    0
                } else {
                    (-fraction.ln() / rate).floor().max(0.0) as u64
                }
            }
            SpatialProfile::Gaussian { amplitude, width } => {
                if amplitude == 0.0 {
                    0
                } else {
                    (width * (-2.0 * fraction.ln()).sqrt()).floor() as u64
                }
            }
            SpatialProfile::SingleSite { site, .. } => site.unsigned_abs(),
            SpatialProfile::Table { first_site, ref values } => {
                let peak = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
                values
                    .iter()
                    .enumerate()
                    .filter(|(_, z)| peak > 0.0 && z.norm() >= fraction * peak)
                    .map(|(k, _)| (first_site + k as i64).unsigned_abs())
                    .max()
                    .unwrap_or(0)
            }
        }
    }
}

/// Σ_{k≥start} e^{−k²/w²} with a certified geometric bound on the remainder.
fn gaussian_side_sum(width: f64, start: u64) -> f64 {
    let w2 = width * width;
    let mut acc = CompensatedSum::default();
    let mut k = start;
    loop {
        let kf = k as f64;
        let term = (-kf * kf / w2).exp();
        acc.add(term);
        // term_{j+1}/term_j = e^{−(2j+1)/w²}, decreasing in j
        let q = (-(2.0 * kf + 1.0) / w2).exp();
        let remainder = term * q / (1.0 - q);
        if term == 0.0 || remainder <= 1e-18 * acc.value() {
            return acc.value() + remainder;
        }
        k += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub order: i32,
    pub coefficient: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub indices: Vec<i32>,
    pub coefficient: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    pub frequency: f64,
    pub coefficient: Complex64,
}

/// Scalar time dependence s(τ) of a separable driving field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TemporalLaw {
    Constant {
        value: Complex64,
    },
    /// e^{iφ}·Σ_k c_k e^{i k (2π/T) τ}
    Periodic {
        period: f64,
        #[serde(default)]
        phase: f64,
        harmonics: Vec<Harmonic>,
    },
    /// F(ω τ) with F(x) = Σ_m c_m e^{i m·x}, 2π-periodic in every x_j.
    Quasiperiodic {
        frequencies: Vec<f64>,
        modes: Vec<Mode>,
    },
    /// Σ_j c_j e^{i f_j τ} with at least three pairwise incommensurate f_j.
    AlmostPeriodic {
        tones: Vec<Tone>,
    },
}

impl TemporalLaw {
    pub fn constant(value: Complex64) -> Self {
        TemporalLaw::Constant { value }
    }

    /// A single harmonic c·e^{i k 2π τ / T}.
    pub fn harmonic(period: f64, order: i32, coefficient: Complex64) -> Self {
        TemporalLaw::Periodic {
            period,
            phase: 0.0,
            harmonics: vec![Harmonic { order, coefficient }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite_c = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        match self {
            TemporalLaw::Constant { value } => {
                if !finite_c(value) {
                    return Err(Error::Config("constant law value must be finite".into()));
                }
            }
            TemporalLaw::Periodic { period, phase, harmonics } => {
                if !(period.is_finite() && *period > 0.0) {
                    return Err(Error::Config(format!("period must be positive, got {period}")));
                }
                if !phase.is_finite() || harmonics.iter().any(|h| !finite_c(&h.coefficient)) {
                    return Err(Error::Config("periodic law holds non-finite values".into()));
                }
            }
            TemporalLaw::Quasiperiodic { frequencies, modes } => {
                if frequencies.is_empty() {
                    return Err(Error::Config("quasiperiodic law needs at least one frequency".into()));
                }
                if frequencies.iter().any(|w| !w.is_finite() || *w == 0.0) {
                    return Err(Error::Config("quasiperiodic frequencies must be finite and nonzero".into()));
                }
                check_incommensurate(frequencies)?;
                for m in modes {
                    if m.indices.len() != frequencies.len() {
                        return Err(Error::Config(format!(
                            "mode {:?} needs {} indices",
                            m.indices,
                            frequencies.len()
                        )));
                    }
                    if !finite_c(&m.coefficient) {
                        return Err(Error::Config("quasiperiodic mode coefficient must be finite".into()));
                    }
                }
            }
            TemporalLaw::AlmostPeriodic { tones } => {
                if tones.len() < 3 {
                    return Err(Error::Config(format!(
                        "almost-periodic law needs at least 3 tones, got {}",
                        tones.len()
                    )));
                }
                let freqs: Vec<f64> = tones.iter().map(|t| t.frequency).collect();
                if freqs.iter().any(|w| !w.is_finite() || *w == 0.0) {
                    return Err(Error::Config("almost-periodic frequencies must be finite and nonzero".into()));
                }
                if tones.iter().any(|t| !finite_c(&t.coefficient)) {
                    return Err(Error::Config("almost-periodic coefficient must be finite".into()));
                }
                check_incommensurate(&freqs)?;
            }
        }
        Ok(())
    }

    /// s(τ).
    pub fn sample(&self, tau: f64) -> Complex64 {
        match self {
            TemporalLaw::Constant { value } => *value,
            TemporalLaw::Periodic { period, phase, harmonics } => {
                let base = TAU * tau.rem_euclid(*period) / period;
                let s: Complex64 = harmonics
                    .iter()
                    .map(|h| h.coefficient * Complex64::cis(h.order as f64 * base))
                    .sum();
                s * Complex64::cis(*phase)
            }
            TemporalLaw::Quasiperiodic { frequencies, modes } => {
                let x: Vec<f64> = frequencies.iter().map(|w| (w * tau).rem_euclid(TAU)).collect();
                modes
                    .iter()
                    .map(|m| {
                        let arg: f64 = m.indices.iter().zip(&x).map(|(&k, xj)| k as f64 * xj).sum();
                        m.coefficient * Complex64::cis(arg)
                    })
                    .sum()
            }
            TemporalLaw::AlmostPeriodic { tones } => tones
                .iter()
                .map(|t| t.coefficient * Complex64::cis(t.frequency * tau))
                .sum(),
        }
    }

    /// The law as a list of (angular frequency, coefficient) pairs.
    pub fn tones(&self) -> Vec<(f64, Complex64)> {
        match self {
            TemporalLaw::Constant { value } => vec![(0.0, *value)],
            TemporalLaw::Periodic { period, phase, harmonics } => harmonics
                .iter()
                .map(|h| (h.order as f64 * TAU / period, h.coefficient * Complex64::cis(*phase)))
                .collect(),
            TemporalLaw::Quasiperiodic { frequencies, modes } => modes
                .iter()
                .map(|m| {
                    let w: f64 = m.indices.iter().zip(frequencies).map(|(&k, w)| k as f64 * w).sum();
                    (w, m.coefficient)
                })
                .collect(),
            TemporalLaw::AlmostPeriodic { tones } => {
                tones.iter().map(|t| (t.frequency, t.coefficient)).collect()
            }
        }
    }

    /// sup_t |s(t)| ≤ Σ|c_j|.
    pub fn amplitude_bound(&self) -> f64 {
        self.tones().iter().map(|(_, c)| c.norm()).sum()
    }

    /// sup_t |s'(t)| ≤ Σ|c_j ω_j|.
    pub fn rate_bound(&self) -> f64 {
        self.tones().iter().map(|(w, c)| (c * w).norm()).sum()
    }

    /// Minimal period, `None` for constant and non-periodic laws.
    pub fn period(&self) -> Option<f64> {
        match self {
            TemporalLaw::Periodic { period, .. } => Some(*period),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            TemporalLaw::Constant { .. } => true,
            _ => self.tones().iter().all(|(w, c)| *w == 0.0 || c.norm() == 0.0),
        }
    }
}

/// Rejects frequency sets with a pair whose ratio is a rational p/q with
/// q ≤ [`MAX_RATIONAL_DENOMINATOR`] to within round-off.
pub fn check_incommensurate(frequencies: &[f64]) -> Result<()> {
    for (i, &wi) in frequencies.iter().enumerate() {
        for &wj in &frequencies[i + 1..] {
            if let Some((p, q)) = rational_approximation(wi / wj, MAX_RATIONAL_DENOMINATOR) {
                return Err(Error::Config(format!(
                    "frequencies {wi} and {wj} are commensurate (ratio ≈ {p}/{q})"
                )));
            }
        }
    }
    Ok(())
}

/// Continued-fraction search for p/q with q ≤ `max_denominator` matching `x`
/// to a few ulps.
pub fn rational_approximation(x: f64, max_denominator: u64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let target = x.abs();
    let tol = 8.0 * f64::EPSILON * target.max(f64::MIN_POSITIVE);
    // convergents h/k via the standard recurrence
    let (mut h_prev, mut h) = (1i128, target.floor() as i128);
    let (mut k_prev, mut k) = (0i128, 1i128);
    let mut rem = target - target.floor();
    loop {
        if (target - h as f64 / k as f64).abs() <= tol {
            let sign = if x < 0.0 { -1 } else { 1 };
            return Some((sign * h as i64, k as u64));
        }
        if rem <= f64::EPSILON {
            return None;
        }
        let inv = 1.0 / rem;
        let a = inv.floor();
        rem = inv - a;
        let a = a as i128;
        let (h_next, k_next) = (a * h + h_prev, a * k + k_prev);
        if k_next > max_denominator as i128 {
            return None;
        }
        (h_prev, h, k_prev, k) = (h, h_next, k, k_next);
    }
}

/// One separable field p_n·s(t + offset).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Forcing {
    pub profile: SpatialProfile,
    pub law: TemporalLaw,
    #[serde(default)]
    pub offset: f64,
}

impl Forcing {
    pub fn new(profile: SpatialProfile, law: TemporalLaw) -> Self {
        Self { profile, law, offset: 0.0 }
    }

    pub fn zero() -> Self {
        Self::new(SpatialProfile::zero(), TemporalLaw::constant(ZERO))
    }

    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        self.law.validate()?;
        if !self.offset.is_finite() {
            return Err(Error::Config("driving offset must be finite".into()));
        }
        Ok(())
    }

    /// Temporal factor s(t + offset).
    pub fn factor(&self, t: f64) -> Complex64 {
        self.law.sample(t + self.offset)
    }

    pub fn sample(&self, lattice: Lattice, t: f64) -> LatticeState {
        let s = self.factor(t);
        let values = self.profile.realize(lattice).into_iter().map(|p| p * s).collect();
        LatticeState::from_raw(lattice, values)
    }

    /// sup_t ‖p·s(t)‖ = ‖p‖·sup|s|, bounded above by ‖p‖·Σ|c_j|.
    pub fn sup_norm(&self) -> f64 {
        self.profile.norm() * self.law.amplitude_bound()
    }

    /// Spectral coefficients with the offset folded in: s(t+o) = Σ c_j e^{iω_j o} e^{iω_j t}.
    fn shifted_tones(&self) -> Vec<(f64, Complex64)> {
        self.law
            .tones()
            .into_iter()
            .map(|(w, c)| (w, c * Complex64::cis(w * self.offset)))
            .collect()
    }

    /// Certified upper bound on sup_t ‖self(t) − other(t)‖.
    pub fn sup_distance(&self, other: &Forcing) -> f64 {
        let law_gap = {
            let mut merged: BTreeMap<u64, Complex64> = BTreeMap::new();
            for (w, c) in self.shifted_tones() {
                *merged.entry(canonical_bits(w)).or_insert(ZERO) += c;
            }
            for (w, c) in other.shifted_tones() {
                *merged.entry(canonical_bits(w)).or_insert(ZERO) -= c;
            }
            merged.values().map(|c| c.norm()).sum::<f64>()
        };
        // ‖p_a s_a − p_b s_b‖ ≤ ‖p_a − p_b‖·sup|s_a| + ‖p_b‖·sup|s_a − s_b|
        let profile_gap = profile_distance(&self.profile, &other.profile);
        profile_gap * self.law.amplitude_bound() + other.profile.norm() * law_gap
    }
}

fn canonical_bits(w: f64) -> u64 {
    if w == 0.0 {
        0
    } else {
        w.to_bits()
    }
}

/// Upper bound on ‖p − q‖ on the infinite lattice.
fn profile_distance(p: &SpatialProfile, q: &SpatialProfile) -> f64 {
    use SpatialProfile::*;
    match (p, q) {
        _ if p == q => 0.0,
        (Exponential { amplitude: a1, rate: r1 }, Exponential { amplitude: a2, rate: r2 }) if r1 == r2 => {
            (a1 - a2).abs() * Exponential { amplitude: 1.0, rate: *r1 }.norm()
        }
        (Gaussian { amplitude: a1, width: w1 }, Gaussian { amplitude: a2, width: w2 }) if w1 == w2 => {
            (a1 - a2).abs() * Gaussian { amplitude: 1.0, width: *w1 }.norm()
        }
        (SingleSite { amplitude: a1, site: s1 }, SingleSite { amplitude: a2, site: s2 }) if s1 == s2 => {
            (a1 - a2).abs()
        }
        (Table { first_site: f1, values: v1 }, Table { first_site: f2, values: v2 }) => {
            let lo = (*f1).min(*f2);
            let hi = (f1 + v1.len() as i64).max(f2 + v2.len() as i64);
            (lo..hi)
                .map(|n| (p.value(n) - q.value(n)).norm_sqr())
                .collect::<CompensatedSum>()
                .value()
                .sqrt()
        }
        _ => p.norm() + q.norm(),
    }
}

/// The pair g = (g⁽¹⁾, g⁽²⁾).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrivingSpec {
    #[serde(rename = "g1")]
    pub additive: Forcing,
    #[serde(rename = "g2")]
    pub parametric: Forcing,
}

impl DrivingSpec {
    pub fn new(additive: Forcing, parametric: Forcing) -> Self {
        Self { additive, parametric }
    }

    pub fn zero() -> Self {
        Self::new(Forcing::zero(), Forcing::zero())
    }

    pub fn additive_only(additive: Forcing) -> Self {
        Self::new(additive, Forcing::zero())
    }

    pub fn validate(&self) -> Result<()> {
        self.additive.validate()?;
        self.parametric.validate()
    }

    /// T(h)g: samples of the result at t equal samples of `self` at t + h.
    pub fn translate(&self, h: f64) -> Self {
        let mut out = self.clone();
        out.additive.offset += h;
        out.parametric.offset += h;
        out
    }

    /// Certified upper bounds (‖g⁽¹⁾‖_Cb, ‖g⁽²⁾‖_Cb).
    pub fn sup_norm(&self) -> (f64, f64) {
        (self.additive.sup_norm(), self.parametric.sup_norm())
    }

    /// Certified upper bounds on the sup-in-time distances to another driving.
    pub fn sup_distance(&self, other: &DrivingSpec) -> (f64, f64) {
        (
            self.additive.sup_distance(&other.additive),
            self.parametric.sup_distance(&other.parametric),
        )
    }

    /// Common period of both fields. Constant fields are compatible with any
    /// period; two periodic fields must share theirs.
    pub fn period(&self) -> Option<f64> {
        let fields = [&self.additive.law, &self.parametric.law];
        let mut period: Option<f64> = None;
        for law in fields {
            if law.is_constant() {
                continue;
            }
            let p = law.period()?;
            match period {
                None => period = Some(p),
                Some(q) if (p - q).abs() <= 1e-12 * q => {}
                Some(_) => return None,
            }
        }
        period
    }

    pub fn realize(&self, lattice: Lattice) -> Result<RealizedDriving> {
        self.validate()?;
        Ok(RealizedDriving {
            spec: self.clone(),
            additive_profile: self.additive.profile.realize(lattice),
            parametric_profile: self.parametric.profile.realize(lattice),
            lattice,
        })
    }
}

/// (g⁽¹⁾(t), g⁽²⁾(t)) realized on the truncation.
pub fn sample_driving(spec: &DrivingSpec, lattice: Lattice, t: f64) -> (LatticeState, LatticeState) {
    (spec.additive.sample(lattice, t), spec.parametric.sample(lattice, t))
}

pub fn translate(spec: &DrivingSpec, h: f64) -> DrivingSpec {
    spec.translate(h)
}

pub fn sup_norm(spec: &DrivingSpec) -> (f64, f64) {
    spec.sup_norm()
}

/// A driving spec with its spatial profiles cached on a lattice.
#[derive(Clone, Debug)]
pub struct RealizedDriving {
    spec: DrivingSpec,
    lattice: Lattice,
    additive_profile: Vec<Complex64>,
    parametric_profile: Vec<Complex64>,
}

impl RealizedDriving {
    pub fn spec(&self) -> &DrivingSpec {
        &self.spec
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn additive_profile(&self) -> &[Complex64] {
        &self.additive_profile
    }

    pub fn parametric_profile(&self) -> &[Complex64] {
        &self.parametric_profile
    }

    /// Temporal factors (s₁(t), s₂(t)).
    #[inline]
    pub fn factors(&self, t: f64) -> (Complex64, Complex64) {
        (self.spec.additive.factor(t), self.spec.parametric.factor(t))
    }

    pub fn sample(&self, t: f64) -> (LatticeState, LatticeState) {
        let (s1, s2) = self.factors(t);
        let g1 = self.additive_profile.iter().map(|p| p * s1).collect();
        let g2 = self.parametric_profile.iter().map(|p| p * s2).collect();
        (LatticeState::from_raw(self.lattice, g1), LatticeState::from_raw(self.lattice, g2))
    }

    /// ‖g⁽¹⁾(t)‖² on the truncation.
    pub fn additive_norm_sqr(&self, t: f64) -> f64 {
        crate::lattice::norm_sqr(&self.additive_profile) * self.spec.additive.factor(t).norm_sqr()
    }

    /// Certified bound on max_{s∈[t, t+dt]} ‖g⁽¹⁾(s)‖² on the truncation.
    pub fn additive_norm_sqr_max(&self, t: f64, dt: f64) -> f64 {
        let law = &self.spec.additive.law;
        let s = self.spec.additive.factor(t).norm();
        let amp = (s + dt.abs() * law.rate_bound()).min(law.amplitude_bound());
        crate::lattice::norm_sqr(&self.additive_profile) * amp * amp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{l2_norm, Boundary};
    use std::f64::consts::{PI, SQRT_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lat() -> Lattice {
        Lattice::new(256, Boundary::Dirichlet).unwrap()
    }

    fn periodic_spec() -> DrivingSpec {
        let law = TemporalLaw::Periodic {
            period: 2.5,
            phase: 0.3,
            harmonics: vec![
                Harmonic { order: 1, coefficient: c(0.5, 0.1) },
                Harmonic { order: -3, coefficient: c(0.0, 0.2) },
                Harmonic { order: 0, coefficient: c(0.05, 0.0) },
            ],
        };
        DrivingSpec::new(
            Forcing::new(SpatialProfile::Exponential { amplitude: 1.0, rate: 0.7 }, law.clone()),
            Forcing::new(SpatialProfile::Gaussian { amplitude: 0.1, width: 3.0 }, law),
        )
    }

    fn quasi(a1: f64, a2: f64) -> TemporalLaw {
        TemporalLaw::Quasiperiodic {
            frequencies: vec![1.0, SQRT_2],
            modes: vec![
                Mode { indices: vec![1, 0], coefficient: c(a1, 0.0) },
                Mode { indices: vec![0, 1], coefficient: c(a2, 0.0) },
            ],
        }
    }

    #[test]
    fn zero_spec_samples_zero() {
        let spec = DrivingSpec::zero();
        for t in [0.0, 1.5, -30.0] {
            let (g1, g2) = sample_driving(&spec, lat(), t);
            assert_eq!(g1.l2_norm(), 0.0);
            assert_eq!(g2.l2_norm(), 0.0);
        }
        assert_eq!(spec.sup_norm(), (0.0, 0.0));
    }

    #[test]
    fn periodic_law_repeats_after_one_period() {
        let spec = periodic_spec();
        for &t in &[0.0, 0.37, 1.9, 7.1, -4.4] {
            let (a1, a2) = sample_driving(&spec, lat(), t);
            let (b1, b2) = sample_driving(&spec, lat(), t + 2.5);
            for (x, y) in a1.values().iter().zip(b1.values()).chain(a2.values().iter().zip(b2.values())) {
                assert!((x - y).norm() <= 1e-14, "t = {t}");
            }
        }
    }

    #[test]
    fn exponential_profile_norm_is_sqrt_coth() {
        // Independent oracle: Σ_n e^{−2|n|} = 1 + 2e^{−2}/(1 − e^{−2}).
        let q = (-2.0f64).exp();
        let oracle = (1.0 + 2.0 * q / (1.0 - q)).sqrt();
        assert!((oracle - 1.145_877_5).abs() < 1e-7);
        let spec = DrivingSpec::additive_only(Forcing::new(
            SpatialProfile::Exponential { amplitude: 1.0, rate: 1.0 },
            TemporalLaw::constant(c(1.0, 0.0)),
        ));
        let (g1, _) = sample_driving(&spec, lat(), 3.0);
        assert!((l2_norm(&g1) - oracle).abs() < 1e-14);
        assert!((spec.sup_norm().0 - oracle).abs() < 1e-14);
        let coth = 1.0f64.cosh() / 1.0f64.sinh();
        assert!((spec.sup_norm().0 - coth.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn exponential_truncation_error_is_negligible() {
        for rate in [0.25, 0.5, 1.0] {
            let p = SpatialProfile::Exponential { amplitude: 1.0, rate };
            let realized = crate::lattice::norm_sqr(&p.realize(lat()));
            let full = p.tail_sqr(None);
            assert!((full - realized) / full < 1e-12, "rate {rate}");
        }
    }

    #[test]
    fn profile_tails_match_direct_sums() {
        let big = Lattice::new(2001, Boundary::Dirichlet).unwrap();
        let profiles = [
            SpatialProfile::Exponential { amplitude: 0.8, rate: 0.6 },
            SpatialProfile::Gaussian { amplitude: 1.3, width: 4.0 },
            SpatialProfile::SingleSite { amplitude: 2.0, site: -3 },
            SpatialProfile::Table { first_site: -2, values: vec![c(1.0, 0.0), c(0.0, 2.0), c(0.5, 0.5), c(-1.0, 0.0)] },
        ];
        for p in &profiles {
            let values = p.realize(big);
            for m in [None, Some(0), Some(2), Some(5)] {
                let direct: f64 = values
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| m.is_none_or(|m| big.site_of(*i).unsigned_abs() > m))
                    .map(|(_, z)| z.norm_sqr())
                    .sum();
                let closed = p.tail_sqr(m);
                assert!(closed >= direct * (1.0 - 1e-14), "{p:?} m={m:?}");
                assert!((closed - direct).abs() <= 1e-13 * closed.max(1e-300), "{p:?} m={m:?}: {closed} vs {direct}");
            }
        }
    }

    #[test]
    fn translation_by_zero_is_identity() {
        let spec = periodic_spec();
        let moved = translate(&spec, 0.0);
        for t in [0.0, 0.4, 9.0] {
            assert_eq!(sample_driving(&spec, lat(), t), sample_driving(&moved, lat(), t));
        }
    }

    #[test]
    fn translation_matches_shifted_sampling_exactly() {
        let spec = periodic_spec();
        let h = 0.613;
        let moved = spec.translate(h);
        for t in [0.0, 0.4, 9.0, -2.2] {
            assert_eq!(sample_driving(&moved, lat(), t), sample_driving(&spec, lat(), t + h));
        }
    }

    #[test]
    fn translation_by_period_is_identity_on_samples() {
        let spec = periodic_spec();
        let moved = spec.translate(2.5);
        for t in [0.0, 0.4, 1.3] {
            let (a, _) = sample_driving(&spec, lat(), t);
            let (b, _) = sample_driving(&moved, lat(), t);
            assert!(crate::lattice::distance(&a, &b).unwrap() <= 1e-14);
        }
    }

    #[test]
    fn translations_compose() {
        let mut spec = periodic_spec();
        spec.additive.law = quasi(0.3, 0.4);
        let twice = spec.translate(0.3).translate(0.7);
        let once = spec.translate(1.0);
        for t in [0.0, 0.25, 3.0, 11.0] {
            let (a, b) = (sample_driving(&twice, lat(), t), sample_driving(&once, lat(), t));
            assert!(crate::lattice::distance(&a.0, &b.0).unwrap() <= 1e-14);
            assert!(crate::lattice::distance(&a.1, &b.1).unwrap() <= 1e-14);
        }
    }

    #[test]
    fn sup_norm_is_translation_invariant() {
        let spec = periodic_spec();
        for h in [0.1, -3.0, 1e3] {
            assert_eq!(spec.translate(h).sup_norm(), spec.sup_norm());
        }
    }

    #[test]
    fn sup_norm_of_time_independent_spec_is_profile_norm() {
        let p = SpatialProfile::Gaussian { amplitude: 0.7, width: 2.0 };
        let spec = DrivingSpec::additive_only(Forcing::new(p.clone(), TemporalLaw::constant(c(1.0, 0.0))));
        assert_eq!(spec.sup_norm().0, p.norm());
    }

    #[test]
    fn quasiperiodic_sup_bound_dominates_dense_scan() {
        let f = Forcing::new(SpatialProfile::SingleSite { amplitude: 1.0, site: 0 }, quasi(0.3, 0.4));
        let bound = f.sup_norm();
        assert!((bound - 0.7).abs() < 1e-15);
        let mut max_seen: f64 = 0.0;
        for k in 0..100_000 {
            let t = k as f64 * 0.0137;
            max_seen = max_seen.max(f.factor(t).norm());
        }
        assert!(max_seen <= bound);
        // the scan approaches the bound, so it is not wildly loose either
        assert!(max_seen > 0.69, "max seen {max_seen}");
    }

    #[test]
    fn quasiperiodic_realization_is_torus_periodic() {
        let law = quasi(0.3, 0.4);
        let direct = |t: f64| c(0.3, 0.0) * Complex64::cis(t) + c(0.4, 0.0) * Complex64::cis(SQRT_2 * t);
        for t in [0.0, 1.0, 17.3] {
            assert!((law.sample(t) - direct(t)).norm() < 1e-13);
        }
    }

    #[test]
    fn commensurate_frequencies_are_rejected() {
        assert!(check_incommensurate(&[1.0, SQRT_2]).is_ok());
        assert!(check_incommensurate(&[1.0, PI]).is_ok());
        assert!(check_incommensurate(&[1.0, (5.0f64).sqrt(), SQRT_2]).is_ok());
        assert!(check_incommensurate(&[1.0, 2.0]).is_err());
        assert!(check_incommensurate(&[1.0, 1.5]).is_err());
        assert!(check_incommensurate(&[0.1 * 3.0, 0.1]).is_err());
        assert!(check_incommensurate(&[1.0, 355.0 / 113.0]).is_err());
        assert_eq!(rational_approximation(-0.75, 100), Some((-3, 4)));
        let law = TemporalLaw::Quasiperiodic {
            frequencies: vec![2.0, 3.0],
            modes: vec![],
        };
        assert!(law.validate().is_err());
    }

    #[test]
    fn almost_periodic_needs_three_incommensurate_tones() {
        let tone = |f: f64| Tone { frequency: f, coefficient: c(0.1, 0.0) };
        let ok = TemporalLaw::AlmostPeriodic { tones: vec![tone(1.0), tone(SQRT_2), tone(5f64.sqrt())] };
        assert!(ok.validate().is_ok());
        let two = TemporalLaw::AlmostPeriodic { tones: vec![tone(1.0), tone(SQRT_2)] };
        assert!(two.validate().is_err());
        let commensurate = TemporalLaw::AlmostPeriodic { tones: vec![tone(1.0), tone(SQRT_2), tone(2.0)] };
        assert!(commensurate.validate().is_err());
    }

    #[test]
    fn common_period() {
        let spec = periodic_spec();
        assert_eq!(spec.period(), Some(2.5));
        let mut mixed = spec.clone();
        mixed.parametric = Forcing::zero();
        assert_eq!(mixed.period(), Some(2.5));
        let mut clash = spec.clone();
        clash.parametric.law = TemporalLaw::harmonic(3.0, 1, c(1.0, 0.0));
        assert_eq!(clash.period(), None);
        assert_eq!(DrivingSpec::zero().period(), None);
    }

    #[test]
    fn sup_distance_is_exact_for_translates_and_bounds_samples() {
        let f = Forcing::new(SpatialProfile::SingleSite { amplitude: 1.0, site: 0 }, TemporalLaw::harmonic(2.0 * PI, 1, c(1.0, 0.0)));
        let g = Forcing { offset: 0.1, ..f.clone() };
        // |e^{i(t+0.1)} − e^{it}| = |e^{0.1i} − 1| = 2 sin(0.05)
        assert!((f.sup_distance(&g) - 2.0 * (0.05f64).sin()).abs() < 1e-15);
        let mut h = f.clone();
        h.profile = SpatialProfile::SingleSite { amplitude: 1.2, site: 0 };
        let bound = f.sup_distance(&h);
        assert!((bound - 0.2).abs() < 1e-15);
        let other = Forcing::new(SpatialProfile::Exponential { amplitude: 0.5, rate: 1.0 }, quasi(0.2, 0.1));
        let bound = f.sup_distance(&other);
        for k in 0..500 {
            let t = k as f64 * 0.31;
            let d = crate::lattice::distance(&f.sample(lat(), t), &other.sample(lat(), t)).unwrap();
            assert!(d <= bound);
        }
    }

    #[test]
    fn additive_norm_bound_over_interval() {
        let spec = periodic_spec();
        let rd = spec.realize(lat()).unwrap();
        for k in 0..50 {
            let t = k as f64 * 0.21;
            let dt = 0.2;
            let bound = rd.additive_norm_sqr_max(t, dt);
            for j in 0..=20 {
                let s = t + dt * j as f64 / 20.0;
                assert!(rd.additive_norm_sqr(s) <= bound * (1.0 + 1e-14));
            }
        }
    }

    #[test]
    fn json_round_trip_is_stable() {
        let mut spec = periodic_spec();
        spec.parametric.law = quasi(0.3, 0.4);
        let json = serde_json::to_string(&spec).unwrap();
        let back: DrivingSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
        assert!(json.contains(r#""kind":"exponential""#));
    }
}
