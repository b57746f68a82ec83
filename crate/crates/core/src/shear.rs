//! Building log-harmonic maps from a starlike function and a dilatation.
//!
//! Given `φ` with `φ(0) = 0`, `φ'(0) = 1` and an analytic `μ` with `μ(0) = 0`,
//! the map `f = z h conj(g)` with `z h / g = φ` and dilatation `μ` is
//!
//! ```text
//! g(z) = exp ∫_0^z μ(s)/(1 - μ(s)) · φ'(s)/φ(s) ds,     h = g φ / z.
//! ```
//!
//! [`construct_series`] does this on truncated Taylor series,
//! [`construct_quadrature`] keeps the integral and evaluates it by quadrature
//! wherever the map is evaluated. The random generators sample the
//! Herglotz-type starlike family and finite Blaschke products used by the
//! conjecture explorer.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fieldmap::{AnalyticFn, Factor, LogHarmonicMap, Mapping, ShearIntegral, WirtingerJet};
use crate::pseries::Series;
use crate::{lit, Error, Real, Result};

/// Series path: `log g` is the integral of the integrand series and
/// `log h = log g + log(φ/z)`.
pub fn construct_series<T: Real>(phi: &AnalyticFn<T>, mu: &AnalyticFn<T>, order: usize) -> Result<LogHarmonicMap<T>> {
    let (log_h, log_g) = log_coefficients(phi, mu, order)?;
    LogHarmonicMap::new(AnalyticFn::exp_of_series(log_h), AnalyticFn::exp_of_series(log_g), "sheared (series)")
}

/// `(log h, log g)` as series; their coefficients are `a_n` and `b_n`.
pub fn log_coefficients<T: Real>(phi: &AnalyticFn<T>, mu: &AnalyticFn<T>, order: usize) -> Result<(Series<T>, Series<T>)> {
    let shear = ShearIntegral::new(phi.clone(), mu.clone())?;
    let log_g = shear.log_series(order)?;
    let log_u = phi.taylor(order + 1)?.shift_down()?.log_series()?;
    Ok((log_g.add(&log_u)?, log_g))
}

/// `g(z)` by direct quadrature of the defining integral along `[0, z]`.
pub fn construct_numeric<T: Real>(phi: &AnalyticFn<T>, mu: &AnalyticFn<T>, z: Complex<T>) -> Result<Complex<T>> {
    let shear = ShearIntegral::new(phi.clone(), mu.clone())?;
    Ok(shear.integral(z)?.exp())
}

/// Quadrature path: `h` and `g` share one shear integral, evaluated on demand.
pub fn construct_quadrature<T: Real>(phi: &AnalyticFn<T>, mu: &AnalyticFn<T>) -> Result<LogHarmonicMap<T>> {
    let shear = Arc::new(ShearIntegral::new(phi.clone(), mu.clone())?);
    let g = AnalyticFn::new(vec![Factor::Shear { integral: shear, sign: T::one() }]);
    let h = g.mul(&phi.div_z()?);
    LogHarmonicMap::new(h, g, "sheared (quadrature)")
}

/// `z / (1 - z)`.
pub fn half_plane<T: Real>() -> AnalyticFn<T> {
    AnalyticFn::new(vec![
        Factor::Monomial(1),
        Factor::Binomial { node: Complex::<T>::one(), power: 1, exponent: -T::one() },
    ])
}

/// A member of the class whose associated function is `z / (1 - z)`.
///
/// Only [`construct_clh`] produces values of this type, so the growth and
/// distortion bounds can take it as proof of membership.
#[derive(Clone, Debug)]
pub struct ClhMap<T: Real> {
    map: LogHarmonicMap<T>,
    mu: AnalyticFn<T>,
    order: usize,
}

/// `construct_quadrature(z/(1-z), μ)`; `order` is kept for coefficient work
/// and for [`ClhMap::series_map`].
pub fn construct_clh<T: Real>(mu: &AnalyticFn<T>, order: usize) -> Result<ClhMap<T>> {
    let map = construct_quadrature(&half_plane(), mu)?.with_label("clh");
    Ok(ClhMap { map, mu: mu.clone(), order })
}

impl<T: Real> ClhMap<T> {
    pub fn map(&self) -> &LogHarmonicMap<T> {
        &self.map
    }

    pub fn mu(&self) -> &AnalyticFn<T> {
        &self.mu
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The same map built on truncated series.
    pub fn series_map(&self) -> Result<LogHarmonicMap<T>> {
        construct_series(&half_plane(), &self.mu, self.order)
    }

    pub fn coeffs(&self) -> Result<(Vec<Complex<T>>, Vec<Complex<T>>)> {
        self.map.coeffs(self.order)
    }
}

impl<T: Real> Mapping<T> for ClhMap<T> {
    fn label(&self) -> String {
        self.map.label()
    }

    fn value(&self, z: Complex<T>) -> Result<Complex<T>> {
        self.map.value(z)
    }

    fn jet(&self, z: Complex<T>) -> Result<WirtingerJet<T>> {
        self.map.jet(z)
    }

    fn singular_points(&self) -> Vec<Complex<T>> {
        self.map.singular_points()
    }

    fn jets_along(&self, points: &[Complex<T>]) -> Vec<Result<WirtingerJet<T>>> {
        self.map.jets_along(points)
    }

    fn values_along(&self, points: &[Complex<T>]) -> Vec<Result<Complex<T>>> {
        self.map.values_along(points)
    }
}

/// `φ(z) = z Π (1 - x_j z)^{-2(1-α)λ_j}` with `x_j = exp(i θ_j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Herglotz {
    pub alpha: f64,
    /// Node angles `θ_j`.
    pub nodes: Vec<f64>,
    /// Simplex weights `λ_j`.
    pub weights: Vec<f64>,
}

impl Herglotz {
    /// Nodes with uniform angle, weights from the flat simplex
    /// (normalized exponentials), drawn from ChaCha8 seeded with `seed`.
    pub fn random(alpha: f64, k: usize, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::ParameterOutOfRange("factor count k must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
        let raw: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let total: f64 = raw.iter().sum();
        let weights = raw.iter().map(|w| w / total).collect();
        Ok(Self { alpha, nodes, weights })
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::InadmissiblePhi(format!("alpha = {} outside [0, 1)", self.alpha)));
        }
        if self.nodes.is_empty() || self.nodes.len() != self.weights.len() {
            return Err(Error::InadmissiblePhi("need equally many nodes and weights, at least one".into()));
        }
        let sum: f64 = self.weights.iter().sum();
        if self.weights.iter().any(|w| !(*w >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InadmissiblePhi(format!("weights must be nonnegative and sum to 1, sum = {sum}")));
        }
        Ok(())
    }

    pub fn to_fn<T: Real>(&self) -> Result<AnalyticFn<T>> {
        self.validate()?;
        let mut f = vec![Factor::Monomial(1)];
        for (&theta, &w) in self.nodes.iter().zip(&self.weights) {
            if w == 0.0 {
                continue;
            }
            f.push(Factor::Binomial {
                node: Complex::new(lit(theta.cos()), lit(theta.sin())),
                power: 1,
                exponent: lit(-2.0 * (1.0 - self.alpha) * w),
            });
        }
        Ok(AnalyticFn::new(f))
    }
}

/// `μ(z) = η z Π (z - a_j)/(1 - conj(a_j) z)` with `η = exp(i eta)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Blaschke {
    /// Rotation angle of `η`.
    #[serde(default)]
    pub eta: f64,
    /// Zeros `a_j` as `[re, im]`.
    #[serde(default)]
    pub zeros: Vec<[f64; 2]>,
}

/// Zeros of random Blaschke factors stay within this radius.
pub const MAX_ZERO_RADIUS: f64 = 0.9;

impl Blaschke {
    /// Uniform rotation, zeros uniform by area in the disk of radius
    /// [`MAX_ZERO_RADIUS`], drawn from ChaCha8 seeded with `seed`.
    pub fn random(k: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eta = rng.random::<f64>() * std::f64::consts::TAU;
        let zeros = (0..k)
            .map(|_| {
                let r = MAX_ZERO_RADIUS * rng.random::<f64>().sqrt();
                let t = rng.random::<f64>() * std::f64::consts::TAU;
                [r * t.cos(), r * t.sin()]
            })
            .collect();
        Self { eta, zeros }
    }

    pub fn to_fn<T: Real>(&self) -> Result<AnalyticFn<T>> {
        let mut f = vec![
            Factor::Constant(Complex::new(lit(self.eta.cos()), lit(self.eta.sin()))),
            Factor::Monomial(1),
        ];
        for a in &self.zeros {
            if !(a[0].hypot(a[1]) < 1.0) {
                return Err(Error::InadmissibleDilatation(format!("Blaschke zero ({}, {}) not inside the disk", a[0], a[1])));
            }
            f.push(Factor::Mobius { zero: Complex::new(lit(a[0]), lit(a[1])) });
        }
        Ok(AnalyticFn::new(f))
    }
}

/// Random starlike function of order `alpha` with `k` Herglotz factors.
pub fn random_starlike<T: Real>(alpha: f64, k: usize, seed: u64) -> Result<AnalyticFn<T>> {
    Herglotz::random(alpha, k, seed)?.to_fn()
}

/// Random Schwarz function vanishing at 0 with `k` extra Blaschke zeros.
pub fn random_schwarz<T: Real>(k: usize, seed: u64) -> AnalyticFn<T> {
    Blaschke::random(k, seed).to_fn().expect("random Blaschke zeros lie inside the disk")
}

/// Parses a dilatation: `0`, `z`, `z^k`, or a JSON Blaschke object such as
/// `{"eta": 0.5, "zeros": [[0.2, 0.1]]}`.
pub fn parse_dilatation<T: Real>(spec: &str) -> Result<AnalyticFn<T>> {
    let s = spec.trim();
    if s.starts_with('{') {
        let b: Blaschke = serde_json::from_str(s).map_err(|e| Error::InadmissibleDilatation(e.to_string()))?;
        return b.to_fn();
    }
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    match compact.as_str() {
        "0" => return Ok(AnalyticFn::constant(Complex::<T>::zero())),
        "z" => return Ok(AnalyticFn::identity()),
        _ => {}
    }
    if let Some(k) = compact.strip_prefix("z^").and_then(|k| k.parse::<i32>().ok()) {
        if k >= 1 {
            return Ok(AnalyticFn::new(vec![Factor::Monomial(k)]));
        }
    }
    Err(Error::InadmissibleDilatation(format!("cannot parse dilatation `{spec}`")))
}

/// Parses a starlike function: an analytic catalog name or a JSON Herglotz
/// object such as `{"alpha": 0, "nodes": [0.0], "weights": [1.0]}`.
pub fn parse_starlike<T: Real>(spec: &str, params: &crate::fieldmap::CatalogParams) -> Result<AnalyticFn<T>> {
    let s = spec.trim();
    if s.starts_with('{') {
        let h: Herglotz = serde_json::from_str(s).map_err(|e| Error::InadmissiblePhi(e.to_string()))?;
        return h.to_fn();
    }
    match crate::fieldmap::catalog::<T>(s, params)? {
        crate::fieldmap::CatalogEntry::Analytic(m) => Ok(m.function().clone()),
        crate::fieldmap::CatalogEntry::LogHarmonic(m) => Ok(m.associated_phi()),
        crate::fieldmap::CatalogEntry::Poly(_) => {
            Err(Error::InadmissiblePhi(format!("`{s}` is not analytic")))
        }
    }
}
