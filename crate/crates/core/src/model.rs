//! The damped, driven DNLS vector field
//! ψ' = −iκAψ − γψ − iF(|ψ|²)ψ − ig⁽¹⁾(t) − ig⁽²⁾(t)ψ.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::driving::{DrivingSpec, RealizedDriving};
use crate::error::{Error, Result};
use crate::lattice::{laplacian_into, Boundary, Lattice, LatticeState};
use crate::nonlinearity::NonlinearitySpec;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub kappa: f64,
    pub gamma: f64,
    pub nonlinearity: NonlinearitySpec,
}

impl ModelParams {
    pub fn new(kappa: f64, gamma: f64, nonlinearity: NonlinearitySpec) -> Result<Self> {
        let p = Self { kappa, gamma, nonlinearity };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.kappa.is_finite() {
            return Err(Error::Config(format!("κ must be finite, got {}", self.kappa)));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::Config(format!("γ must be positive, got {}", self.gamma)));
        }
        Ok(())
    }
}

/// Effective damping Γ = γ − 2‖g⁽²⁾‖_Cb, or [`Error::WeakDamping`] when it is
/// not positive.
pub fn effective_damping(params: &ModelParams, driving: &DrivingSpec) -> Result<f64> {
    let g2 = driving.sup_norm().1;
    let gamma_tilde = params.gamma - 2.0 * g2;
    if gamma_tilde > 0.0 {
        Ok(gamma_tilde)
    } else {
        Err(Error::WeakDamping {
            gamma: params.gamma,
            twice_parametric: 2.0 * g2,
            limit: params.gamma / 2.0,
        })
    }
}

/// A time-dependent vector field on Cᵈ.
pub trait VectorField: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]);
}

/// The DNLS system on a finite truncation.
#[derive(Clone, Debug)]
pub struct Dnls {
    params: ModelParams,
    driving: RealizedDriving,
}

impl Dnls {
    pub fn new(params: ModelParams, lattice: Lattice, driving: &DrivingSpec) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, driving: driving.realize(lattice)? })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn lattice(&self) -> Lattice {
        self.driving.lattice()
    }

    pub fn boundary(&self) -> Boundary {
        self.lattice().boundary
    }

    pub fn driving(&self) -> &RealizedDriving {
        &self.driving
    }

    pub fn driving_spec(&self) -> &DrivingSpec {
        self.driving.spec()
    }

    pub fn effective_damping(&self) -> Result<f64> {
        effective_damping(&self.params, self.driving.spec())
    }

    /// The same system driven by T(h)g.
    pub fn translated(&self, h: f64) -> Result<Self> {
        Self::new(self.params, self.lattice(), &self.driving.spec().translate(h))
    }

    /// ψ'(t) for a full lattice state.
    pub fn rhs(&self, state: &LatticeState, t: f64) -> Result<LatticeState> {
        if state.lattice() != self.lattice() {
            return Err(Error::Domain("state lives on a different lattice than the model".into()));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
        self.eval(t, state.values(), &mut out);
        Ok(LatticeState::from_raw(self.lattice(), out))
    }
}

impl VectorField for Dnls {
    fn dim(&self) -> usize {
        self.lattice().sites
    }

    fn eval(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        laplacian_into(y, self.boundary(), dy);
        let (s1, s2) = self.driving.factors(t);
        let p1 = self.driving.additive_profile();
        let p2 = self.driving.parametric_profile();
        let ModelParams { kappa, gamma, nonlinearity } = self.params;
        for n in 0..y.len() {
            let lap = dy[n];
            let coupling = lap * kappa + nonlinearity.apply(y[n]) + p1[n] * s1 + p2[n] * s2 * y[n];
            dy[n] = -I * coupling - y[n] * gamma;
        }
    }
}

/// ψ'(t) for the given parameters and driving.
pub fn rhs(state: &LatticeState, t: f64, params: &ModelParams, driving: &DrivingSpec) -> Result<LatticeState> {
    Dnls::new(*params, state.lattice(), driving)?.rhs(state, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driving::{Forcing, SpatialProfile, TemporalLaw};
    use crate::lattice::apply_laplacian;
    use crate::nonlinearity::{evaluate_nonlinearity, Sign};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rhs_matches_term_by_term_assembly() {
        let lat = Lattice::new(16, Boundary::Periodic).unwrap();
        let params = ModelParams::new(0.7, 0.4, NonlinearitySpec::cubic(Sign::Minus)).unwrap();
        let driving = DrivingSpec::new(
            Forcing::new(SpatialProfile::Exponential { amplitude: 0.3, rate: 0.5 }, TemporalLaw::harmonic(3.0, 1, c(1.0, 0.5))),
            Forcing::new(SpatialProfile::Gaussian { amplitude: 0.1, width: 2.0 }, TemporalLaw::constant(c(0.0, 1.0))),
        );
        let psi = LatticeState::from_fn(lat, |n| c((n as f64 * 0.3).sin(), 0.2 * n as f64 / 8.0)).unwrap();
        let t = 1.1;
        let got = rhs(&psi, t, &params, &driving).unwrap();
        let lap = apply_laplacian(&psi);
        let nl = evaluate_nonlinearity(&psi, &params.nonlinearity);
        let (g1, g2) = crate::driving::sample_driving(&driving, lat, t);
        for i in 0..psi.len() {
            let expect = -I * 0.7 * lap.values()[i] - 0.4 * psi.values()[i] - I * nl.values()[i]
                - I * g1.values()[i]
                - I * g2.values()[i] * psi.values()[i];
            assert!((got.values()[i] - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn weak_damping_is_reported() {
        let params = ModelParams::new(1.0, 0.4, NonlinearitySpec::off()).unwrap();
        let driving = DrivingSpec::new(
            Forcing::zero(),
            Forcing::new(SpatialProfile::SingleSite { amplitude: 0.3, site: 0 }, TemporalLaw::constant(c(1.0, 0.0))),
        );
        match effective_damping(&params, &driving) {
            Err(Error::WeakDamping { limit, .. }) => assert_eq!(limit, 0.2),
            other => panic!("expected WeakDamping, got {other:?}"),
        }
    }

    #[test]
    fn rejects_non_positive_damping() {
        assert!(ModelParams::new(1.0, 0.0, NonlinearitySpec::off()).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0, NonlinearitySpec::off()).is_err());
    }
}
