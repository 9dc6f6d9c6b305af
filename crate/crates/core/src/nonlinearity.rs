//! Power-law on-site nonlinearity F(s) = sign·s^σ and its H1 constants.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
    /// F ≡ 0, the linear lattice.
    Off,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
            Sign::Off => 0.0,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = Error;

    fn try_from(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            0 => Ok(Sign::Off),
            _ => Err(Error::Config(format!("nonlinearity sign must be +1, -1 or 0, got {v}"))),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
            Sign::Off => 0,
        }
    }
}

/// F(s) = sign·s^σ together with constants (a, b) such that
/// |F(|ψ|²)ψ − F(|φ|²)φ| ≤ a(|ψ|^b + |φ|^b)|ψ − φ|.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NonlinearityRepr", into = "NonlinearityRepr")]
pub struct NonlinearitySpec {
    sigma: f64,
    sign: Sign,
    a: f64,
    b: f64,
}

#[derive(Serialize, Deserialize)]
struct NonlinearityRepr {
    sigma: f64,
    sign: Sign,
    #[serde(default)]
    a: Option<f64>,
    #[serde(default)]
    b: Option<f64>,
}

impl TryFrom<NonlinearityRepr> for NonlinearitySpec {
    type Error = Error;

    fn try_from(r: NonlinearityRepr) -> Result<Self> {
        if r.sign == Sign::Off {
            return Ok(NonlinearitySpec::off());
        }
        let default = NonlinearitySpec::power(r.sigma, r.sign)?;
        NonlinearitySpec::with_constants(
            r.sigma,
            r.sign,
            r.a.unwrap_or(default.a),
            r.b.unwrap_or(default.b),
        )
    }
}

impl From<NonlinearitySpec> for NonlinearityRepr {
    fn from(s: NonlinearitySpec) -> Self {
        NonlinearityRepr {
            sigma: s.sigma,
            sign: s.sign,
            a: Some(s.a),
            b: Some(s.b),
        }
    }
}

impl NonlinearitySpec {
    /// Power law with the default H1 constants: b = 2σ, and
    /// a = (2σ+1)/2 for 1/2 ≤ σ ≤ 1, a = 2σ+1 otherwise.
    pub fn power(sigma: f64, sign: Sign) -> Result<Self> {
        if sign == Sign::Off {
            return Ok(Self::off());
        }
        let a = if (0.5..=1.0).contains(&sigma) {
            (2.0 * sigma + 1.0) / 2.0
        } else {
            2.0 * sigma + 1.0
        };
        Self::with_constants(sigma, sign, a, 2.0 * sigma)
    }

    /// Cubic DNLS: σ = 1, a = 3/2, b = 2.
    pub fn cubic(sign: Sign) -> Self {
        Self::power(1.0, sign).expect("cubic constants are valid")
    }

    pub fn off() -> Self {
        Self {
            sigma: 1.0,
            sign: Sign::Off,
            a: 0.0,
            b: 0.0,
        }
    }

    /// Explicit constants. `b` must equal 2σ and `a` must not undercut the
    /// smallest constant the power law admits.
    pub fn with_constants(sigma: f64, sign: Sign, a: f64, b: f64) -> Result<Self> {
        if sign == Sign::Off {
            return Ok(Self::off());
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Config(format!("σ must be positive and finite, got {sigma}")));
        }
        if !(b.is_finite() && b > 0.0) || (b - 2.0 * sigma).abs() > 1e-12 * b.max(1.0) {
            return Err(Error::Config(format!("H1 exponent must be b = 2σ = {}, got {b}", 2.0 * sigma)));
        }
        let floor = Self::min_h1_constant(sigma);
        if !(a.is_finite() && a >= floor * (1.0 - 4.0 * f64::EPSILON)) {
            return Err(Error::Config(format!(
                "H1 constant a = {a} is below the admissible value {floor} for σ = {sigma}"
            )));
        }
        Ok(Self { sigma, sign, a, b })
    }

    /// The smallest `a` this crate certifies for exponent σ.
    ///
    /// For σ ≥ 1/2 the map z ↦ |z|^{2σ} is convex and the segment average of
    /// the derivative bound (2σ+1)|z|^{2σ} gives (2σ+1)/2, which is sharp at
    /// ψ ≈ φ. Below 1/2 only the endpoint-maximum bound 2σ+1 is available.
    pub fn min_h1_constant(sigma: f64) -> f64 {
        if sigma >= 0.5 {
            (2.0 * sigma + 1.0) / 2.0
        } else {
            2.0 * sigma + 1.0
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn is_off(&self) -> bool {
        self.sign == Sign::Off
    }

    /// F(|z|²)·z for a single amplitude.
    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        match self.sign {
            Sign::Off => Complex64::new(0.0, 0.0),
            sign => {
                let s = z.norm_sqr();
                let f = if self.sigma == 1.0 { s } else { s.powf(self.sigma) };
                z * (sign.factor() * f)
            }
        }
    }

    /// Right-hand side a(|ψ|^b + |φ|^b)|ψ − φ| of the H1 estimate.
    pub fn h1_bound(&self, psi: Complex64, phi: Complex64) -> f64 {
        if self.is_off() {
            return 0.0;
        }
        self.a * (psi.norm().powf(self.b) + phi.norm().powf(self.b)) * (psi - phi).norm()
    }

    /// Lipschitz constant √2·a·R^b of ψ ↦ F(|ψ|²)ψ on the l² ball of radius R,
    /// as stated for the continuity estimate.
    pub fn ball_lipschitz(&self, radius: f64) -> f64 {
        std::f64::consts::SQRT_2 * self.a * radius.powf(self.b)
    }

    /// Lipschitz constant that follows directly from H1 on the l² ball of
    /// radius R, using |ψ_n| ≤ ‖ψ‖: 2·a·R^b.
    pub fn h1_lipschitz(&self, radius: f64) -> f64 {
        2.0 * self.a * radius.powf(self.b)
    }
}

/// Entrywise F(|ψ_n|²)ψ_n.
pub fn evaluate_nonlinearity(state: &LatticeState, spec: &NonlinearitySpec) -> LatticeState {
    let values = state.values().iter().map(|&z| spec.apply(z)).collect();
    LatticeState::from_raw(state.lattice(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Boundary, Lattice};

    #[test]
    fn default_constants() {
        let cubic = NonlinearitySpec::cubic(Sign::Plus);
        assert_eq!((cubic.a(), cubic.b()), (1.5, 2.0));
        let quintic = NonlinearitySpec::power(2.0, Sign::Minus).unwrap();
        assert_eq!((quintic.a(), quintic.b()), (5.0, 4.0));
        let weak = NonlinearitySpec::power(0.25, Sign::Plus).unwrap();
        assert_eq!((weak.a(), weak.b()), (1.5, 0.5));
    }

    #[test]
    fn rejects_inconsistent_constants() {
        assert!(NonlinearitySpec::with_constants(1.0, Sign::Plus, 1.5, 3.0).is_err());
        assert!(NonlinearitySpec::with_constants(1.0, Sign::Plus, 1.0, 2.0).is_err());
        assert!(NonlinearitySpec::with_constants(-1.0, Sign::Plus, 1.5, -2.0).is_err());
        // σ = 1/4: ψ = x, φ = 0 needs a ≥ 1, so (2σ+1)/2 = 0.75 is refused.
        assert!(NonlinearitySpec::with_constants(0.25, Sign::Plus, 0.75, 0.5).is_err());
        assert!(Sign::try_from(2).is_err());
    }

    #[test]
    fn zero_state_maps_to_zero() {
        let l = Lattice::new(8, Boundary::Dirichlet).unwrap();
        let z = LatticeState::zeros(l);
        let out = evaluate_nonlinearity(&z, &NonlinearitySpec::cubic(Sign::Plus));
        assert!(out.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn cubic_single_site() {
        let l = Lattice::new(8, Boundary::Dirichlet).unwrap();
        let s = LatticeState::unit(l, 0).unwrap().scaled(2.0);
        let out = evaluate_nonlinearity(&s, &NonlinearitySpec::cubic(Sign::Plus));
        assert_eq!(out.at(0), Complex64::new(8.0, 0.0));
        let out = evaluate_nonlinearity(&s, &NonlinearitySpec::cubic(Sign::Minus));
        assert_eq!(out.at(0), Complex64::new(-8.0, 0.0));
    }

    #[test]
    fn off_is_identically_zero() {
        let f = NonlinearitySpec::off();
        assert_eq!(f.apply(Complex64::new(3.0, -2.0)), Complex64::new(0.0, 0.0));
        assert_eq!(f.h1_bound(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)), 0.0);
    }

    #[test]
    fn serde_fills_defaults_and_round_trips() {
        let spec: NonlinearitySpec = serde_json::from_str(r#"{"sigma":1.0,"sign":-1}"#).unwrap();
        assert_eq!(spec, NonlinearitySpec::cubic(Sign::Minus));
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"sigma":1.0,"sign":-1,"a":1.5,"b":2.0}"#);
        assert!(serde_json::from_str::<NonlinearitySpec>(r#"{"sigma":1.0,"sign":1,"a":0.1}"#).is_err());
    }
}
