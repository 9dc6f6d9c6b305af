//! Finite truncations of l²(ℤ) and the nearest-neighbour operators on them.
//!
//! A lattice of `N` sites carries the site indices `n = -⌊N/2⌋ .. N-1-⌊N/2⌋`,
//! so site 0 sits at array index `⌊N/2⌋`. Amplitudes are stored as a flat
//! `Vec<Complex64>`, which is laid out as interleaved `(re, im)` pairs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// How neighbours outside the truncation are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Sites outside the window hold zero.
    Dirichlet,
    /// The window wraps around.
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    pub sites: usize,
    pub boundary: Boundary,
}

impl Lattice {
    pub const MIN_SITES: usize = 3;

    pub fn new(sites: usize, boundary: Boundary) -> Result<Self> {
        if sites < Self::MIN_SITES {
            return Err(Error::Domain(format!(
                "a lattice needs at least {} sites, got {sites}",
                Self::MIN_SITES
            )));
        }
        Ok(Self { sites, boundary })
    }

    /// Array index of site 0.
    pub fn center(&self) -> usize {
        self.sites / 2
    }

    pub fn site_of(&self, index: usize) -> i64 {
        index as i64 - self.center() as i64
    }

    pub fn index_of(&self, site: i64) -> Option<usize> {
        let idx = site + self.center() as i64;
        (0..self.sites as i64).contains(&idx).then_some(idx as usize)
    }

    /// Largest admissible tail cutoff `m` (exclusive): `0 <= m < N/2`.
    pub fn max_cutoff(&self) -> usize {
        self.sites / 2
    }

    pub fn sites_iter(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.sites).map(|i| self.site_of(i))
    }
}

/// A truncated l² element together with its boundary condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct LatticeState {
    lattice: Lattice,
    values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    boundary: Boundary,
    values: Vec<Complex64>,
}

impl TryFrom<StateRepr> for LatticeState {
    type Error = Error;

    fn try_from(repr: StateRepr) -> Result<Self> {
        LatticeState::from_values(repr.values, repr.boundary)
    }
}

impl From<LatticeState> for StateRepr {
    fn from(state: LatticeState) -> Self {
        StateRepr {
            boundary: state.lattice.boundary,
            values: state.values,
        }
    }
}

impl LatticeState {
    pub fn zeros(lattice: Lattice) -> Self {
        Self {
            lattice,
            values: vec![Complex64::new(0.0, 0.0); lattice.sites],
        }
    }

    pub fn from_values(values: Vec<Complex64>, boundary: Boundary) -> Result<Self> {
        let lattice = Lattice::new(values.len(), boundary)?;
        if let Some(i) = values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite amplitude at site {}",
                lattice.site_of(i)
            )));
        }
        Ok(Self { lattice, values })
    }

    /// Builds a state from a function of the site index `n`.
    pub fn from_fn(lattice: Lattice, f: impl Fn(i64) -> Complex64) -> Result<Self> {
        let values = lattice.sites_iter().map(f).collect();
        Self::from_values(values, lattice.boundary)
    }

    /// Unit vector at site `site`.
    pub fn unit(lattice: Lattice, site: i64) -> Result<Self> {
        let idx = lattice.index_of(site).ok_or_else(|| {
            Error::Domain(format!("site {site} lies outside a lattice of {} sites", lattice.sites))
        })?;
        let mut state = Self::zeros(lattice);
        state.values[idx] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    pub(crate) fn from_raw(lattice: Lattice, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), lattice.sites);
        Self { lattice, values }
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn boundary(&self) -> Boundary {
        self.lattice.boundary
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Amplitude at site `n`, zero outside the window.
    pub fn at(&self, site: i64) -> Complex64 {
        self.lattice
            .index_of(site)
            .map_or(Complex64::new(0.0, 0.0), |i| self.values[i])
    }

    /// The interleaved `(re, im)` view as a real vector of length `2N`.
    pub fn to_real_vec(&self) -> Vec<f64> {
        self.values.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_raw(self.lattice, self.values.iter().map(|z| z * factor).collect())
    }

    /// Replaces the amplitude at `site`; the new value must be finite.
    pub fn with_site(mut self, site: i64, value: Complex64) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Domain("non-finite amplitude".into()));
        }
        let idx = self
            .lattice
            .index_of(site)
            .ok_or_else(|| Error::Domain(format!("site {site} outside the lattice")))?;
        self.values[idx] = value;
        Ok(self)
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.values)
    }

    pub fn l2_norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

pub(crate) fn norm_sqr(values: &[Complex64]) -> f64 {
    values.iter().map(|z| z.norm_sqr()).collect::<CompensatedSum>().value()
}

pub(crate) fn distance_raw(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .collect::<CompensatedSum>()
        .value()
        .sqrt()
}

pub fn l2_norm(state: &LatticeState) -> f64 {
    state.l2_norm()
}

/// ‖a − b‖ in l².
pub fn distance(a: &LatticeState, b: &LatticeState) -> Result<f64> {
    check_same_lattice(a, b)?;
    Ok(distance_raw(&a.values, &b.values))
}

/// The l² inner product (a, b) = Σ a_n conj(b_n).
pub fn inner(a: &LatticeState, b: &LatticeState) -> Result<Complex64> {
    check_same_lattice(a, b)?;
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    for (x, y) in a.values.iter().zip(&b.values) {
        let p = x * y.conj();
        re.add(p.re);
        im.add(p.im);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

fn check_same_lattice(a: &LatticeState, b: &LatticeState) -> Result<()> {
    if a.lattice != b.lattice {
        return Err(Error::Domain(format!(
            "states live on different lattices ({:?} vs {:?})",
            a.lattice, b.lattice
        )));
    }
    Ok(())
}

/// Σ_{|n|>m} |ψ_n|², for `0 <= m < N/2`.
pub fn tail_mass(state: &LatticeState, m: usize) -> Result<f64> {
    let lattice = state.lattice;
    if m >= lattice.max_cutoff() {
        return Err(Error::Domain(format!(
            "tail cutoff {m} must be below N/2 = {}",
            lattice.max_cutoff()
        )));
    }
    let m = m as i64;
    Ok(state
        .values
        .iter()
        .enumerate()
        .filter(|(i, _)| lattice.site_of(*i).abs() > m)
        .map(|(_, z)| z.norm_sqr())
        .collect::<CompensatedSum>()
        .value())
}

/// Σ_{|n|<=m} |ψ_n|², the complement of [`tail_mass`].
pub fn core_mass(state: &LatticeState, m: usize) -> Result<f64> {
    let lattice = state.lattice;
    if m >= lattice.max_cutoff() {
        return Err(Error::Domain(format!(
            "core cutoff {m} must be below N/2 = {}",
            lattice.max_cutoff()
        )));
    }
    let m = m as i64;
    Ok(state
        .values
        .iter()
        .enumerate()
        .filter(|(i, _)| lattice.site_of(*i).abs() <= m)
        .map(|(_, z)| z.norm_sqr())
        .collect::<CompensatedSum>()
        .value())
}

#[inline]
fn neighbour(values: &[Complex64], boundary: Boundary, idx: isize) -> Complex64 {
    let n = values.len() as isize;
    if (0..n).contains(&idx) {
        values[idx as usize]
    } else {
        match boundary {
            Boundary::Dirichlet => Complex64::new(0.0, 0.0),
            Boundary::Periodic => values[idx.rem_euclid(n) as usize],
        }
    }
}

/// (Aψ)_n = ψ_{n+1} − 2ψ_n + ψ_{n−1}, written into `out`.
pub(crate) fn laplacian_into(values: &[Complex64], boundary: Boundary, out: &mut [Complex64]) {
    let n = values.len();
    debug_assert!(n >= 3 && out.len() == n);
    for i in 1..n - 1 {
        out[i] = values[i + 1] - 2.0 * values[i] + values[i - 1];
    }
    out[0] = values[1] - 2.0 * values[0] + neighbour(values, boundary, -1);
    out[n - 1] = neighbour(values, boundary, n as isize) - 2.0 * values[n - 1] + values[n - 2];
}

pub fn apply_laplacian(state: &LatticeState) -> LatticeState {
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    laplacian_into(&state.values, state.boundary(), &mut out);
    LatticeState::from_raw(state.lattice, out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// (Bψ)_n = ψ_{n+1} − ψ_n
    Forward,
    /// (B*ψ)_n = ψ_{n−1} − ψ_n
    Backward,
}

/// Forward difference B or its adjoint B*.
///
/// Under the Dirichlet truncation B and B* stay exact adjoints, while
/// B*B = −A − P with P the projection on the leftmost site (the lost entry
/// (Bψ)_{−N/2−1} = ψ_{−N/2}). On states vanishing at that site, and always
/// under periodic wrap, −A = B*B holds exactly.
pub fn apply_difference(state: &LatticeState, direction: Direction) -> LatticeState {
    let v = &state.values;
    let bc = state.boundary();
    let out = (0..v.len() as isize)
        .map(|i| match direction {
            Direction::Forward => neighbour(v, bc, i + 1) - v[i as usize],
            Direction::Backward => neighbour(v, bc, i - 1) - v[i as usize],
        })
        .collect();
    LatticeState::from_raw(state.lattice, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lat(n: usize, bc: Boundary) -> Lattice {
        Lattice::new(n, bc).unwrap()
    }

    #[test]
    fn rejects_short_and_non_finite_states() {
        assert!(Lattice::new(2, Boundary::Dirichlet).is_err());
        assert!(LatticeState::from_values(vec![c(0.0, 0.0); 2], Boundary::Dirichlet).is_err());
        let bad = vec![c(0.0, 0.0), c(f64::NAN, 0.0), c(0.0, 0.0)];
        assert!(LatticeState::from_values(bad, Boundary::Periodic).is_err());
        let inf = vec![c(0.0, 0.0), c(0.0, f64::INFINITY), c(0.0, 0.0)];
        assert!(LatticeState::from_values(inf, Boundary::Periodic).is_err());
    }

    #[test]
    fn site_indexing_centres_site_zero() {
        let l = lat(8, Boundary::Dirichlet);
        assert_eq!(l.center(), 4);
        assert_eq!(l.site_of(0), -4);
        assert_eq!(l.site_of(7), 3);
        assert_eq!(l.index_of(-4), Some(0));
        assert_eq!(l.index_of(4), None);
    }

    #[test]
    fn laplacian_of_unit_vector() {
        let e0 = LatticeState::unit(lat(9, Boundary::Dirichlet), 0).unwrap();
        let a = apply_laplacian(&e0);
        for n in -4..=4 {
            let expected = match n {
                0 => -2.0,
                -1 | 1 => 1.0,
                _ => 0.0,
            };
            assert_eq!(a.at(n), c(expected, 0.0), "site {n}");
        }
    }

    #[test]
    fn laplacian_kills_constants_under_wrap() {
        let l = lat(16, Boundary::Periodic);
        let s = LatticeState::from_fn(l, |_| c(0.7, -1.3)).unwrap();
        assert!(apply_laplacian(&s).values().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn dirichlet_edges_see_zero_neighbours() {
        let l = lat(5, Boundary::Dirichlet);
        let s = LatticeState::from_fn(l, |_| c(1.0, 0.0)).unwrap();
        let a = apply_laplacian(&s);
        assert_eq!(a.at(-2), c(-1.0, 0.0));
        assert_eq!(a.at(2), c(-1.0, 0.0));
        assert_eq!(a.at(0), c(0.0, 0.0));
    }

    #[test]
    fn forward_difference_of_unit_vector() {
        let e0 = LatticeState::unit(lat(9, Boundary::Dirichlet), 0).unwrap();
        let b = apply_difference(&e0, Direction::Forward);
        assert_eq!(b.at(-1), c(1.0, 0.0));
        assert_eq!(b.at(0), c(-1.0, 0.0));
        assert_eq!(b.values().iter().filter(|z| z.norm() > 0.0).count(), 2);
        let bs = apply_difference(&e0, Direction::Backward);
        assert_eq!(bs.at(1), c(1.0, 0.0));
        assert_eq!(bs.at(0), c(-1.0, 0.0));
    }

    #[test]
    fn tail_mass_of_unit_vector_and_range_check() {
        let e0 = LatticeState::unit(lat(16, Boundary::Dirichlet), 0).unwrap();
        assert_eq!(tail_mass(&e0, 0).unwrap(), 0.0);
        assert!(tail_mass(&e0, 8).is_err());
        assert!(tail_mass(&e0, 7).is_ok());
    }

    #[test]
    fn tail_mass_of_exponential_matches_geometric_series() {
        // Σ_{|n|>2} e^{-2|n|} = 2 e^{-6} / (1 − e^{-2}); the truncation at
        // N = 256 drops terms of order e^{-256}.
        let l = lat(256, Boundary::Dirichlet);
        let s = LatticeState::from_fn(l, |n| c((-(n.abs() as f64)).exp(), 0.0)).unwrap();
        let oracle = 2.0 * (-6.0f64).exp() / (1.0 - (-2.0f64).exp());
        let got = tail_mass(&s, 2).unwrap();
        assert!((got - oracle).abs() <= 1e-15 * oracle, "{got} vs {oracle}");
    }

    #[test]
    fn norm_and_inner_product_agree() {
        let l = lat(7, Boundary::Periodic);
        let s = LatticeState::from_fn(l, |n| c(n as f64, 1.0)).unwrap();
        let ip = inner(&s, &s).unwrap();
        assert!((ip.re - s.norm_sqr()).abs() < 1e-14);
        assert_eq!(ip.im, 0.0);
        // Σ n² over -3..3 plus 7 ones
        assert_eq!(s.norm_sqr(), 28.0 + 7.0);
    }

    #[test]
    fn serde_uses_pairs_and_validates() {
        let s = LatticeState::from_fn(lat(3, Boundary::Dirichlet), |n| c(n as f64, 0.5)).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"boundary":"dirichlet","values":[[-1.0,0.5],[0.0,0.5],[1.0,0.5]]}"#);
        let back: LatticeState = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<LatticeState>(r#"{"boundary":"periodic","values":[[1.0,0.0]]}"#).is_err());
    }
}
