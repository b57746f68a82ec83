//! Map representations and Wirtinger jets.
//!
//! Two families share one evaluation contract, [`Mapping`]: maps of the form
//! `z h(z) conj(g(z))` ([`LogHarmonicMap`]) and finite polynomials in `z` and
//! `conj(z)` ([`PolyZZbarMap`]). Plain analytic functions are wrapped as
//! [`AnalyticMap`]. Everything downstream works only with [`WirtingerJet`].

mod analytic;
mod catalog;
mod maps;

pub use analytic::{AnalyticFn, AnalyticJet, Factor, IntegralCache, ShearIntegral, NORMALIZATION_TOL, SINGULAR_EPS};
pub use catalog::{catalog, CatalogEntry, CatalogParams, CATALOG_NAMES};
pub use maps::{AnalyticMap, LogHarmonicMap, PolyTerm, PolyZZbarMap};

use num_complex::Complex;
use num_traits::Zero;

use crate::{Real, Result};

/// Value and the five Wirtinger derivatives of a map at the point `z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WirtingerJet<T> {
    pub z: Complex<T>,
    pub f: Complex<T>,
    pub f_z: Complex<T>,
    pub f_zb: Complex<T>,
    pub f_zz: Complex<T>,
    pub f_zzb: Complex<T>,
    pub f_zbzb: Complex<T>,
}

impl<T: Real> WirtingerJet<T> {
    /// Jet of an analytic function from its value and two derivatives.
    pub fn analytic(z: Complex<T>, f: Complex<T>, d1: Complex<T>, d2: Complex<T>) -> Self {
        let zero = Complex::<T>::zero();
        Self { z, f, f_z: d1, f_zb: zero, f_zz: d2, f_zzb: zero, f_zbzb: zero }
    }

    /// `Df = z f_z - conj(z) f_zb`.
    pub fn d(&self) -> Complex<T> {
        self.z * self.f_z - self.z.conj() * self.f_zb
    }

    /// `D²f = z f_z + conj(z) f_zb - 2|z|² f_zzb + z² f_zz + conj(z)² f_zbzb`.
    pub fn d2(&self) -> Complex<T> {
        let z = self.z;
        let zb = z.conj();
        let two = T::one() + T::one();
        z * self.f_z + zb * self.f_zb - self.f_zzb * (z.norm_sqr() * two) + z * z * self.f_zz + zb * zb * self.f_zbzb
    }

    /// `J = |f_z|² - |f_zb|²`.
    pub fn jacobian(&self) -> T {
        self.f_z.norm_sqr() - self.f_zb.norm_sqr()
    }

    /// Jet of `c f`.
    pub fn scale(&self, c: Complex<T>) -> Self {
        Self {
            z: self.z,
            f: self.f * c,
            f_z: self.f_z * c,
            f_zb: self.f_zb * c,
            f_zz: self.f_zz * c,
            f_zzb: self.f_zzb * c,
            f_zbzb: self.f_zbzb * c,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.f, self.f_z, self.f_zb, self.f_zz, self.f_zzb, self.f_zbzb]
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Anything that can be evaluated with Wirtinger derivatives on the disk.
pub trait Mapping<T: Real>: Send + Sync {
    fn label(&self) -> String;

    fn value(&self, z: Complex<T>) -> Result<Complex<T>>;

    fn jet(&self, z: Complex<T>) -> Result<WirtingerJet<T>>;

    /// Declared singular points; analysis grids skip their directions.
    fn singular_points(&self) -> Vec<Complex<T>>;

    /// Estimated truncation error of series-backed parts at `z`.
    fn tail_estimate(&self, _z: Complex<T>) -> T {
        T::zero()
    }

    /// Jets at a sequence of nearby points; implementations may share work
    /// between consecutive points.
    fn jets_along(&self, points: &[Complex<T>]) -> Vec<Result<WirtingerJet<T>>> {
        points.iter().map(|&z| self.jet(z)).collect()
    }

    fn values_along(&self, points: &[Complex<T>]) -> Vec<Result<Complex<T>>> {
        points.iter().map(|&z| self.value(z)).collect()
    }
}
