//! Univalent log-harmonic mappings of the unit disk.
//!
//! A log-harmonic mapping vanishing only at the origin is written
//! `f(z) = z h(z) conj(g(z))` with `h(0) = g(0) = 1`. This crate builds such
//! maps (from closed forms, truncated series, or by shearing a starlike
//! function against a prescribed dilatation), evaluates their Wirtinger jets,
//! checks starlikeness, convexity and the known coefficient / growth /
//! distortion bounds on sampling grids, explores the open coefficient and
//! covering conjectures by Monte-Carlo, and renders images of the disk.
//!
//! All numerics are generic over the real scalar (`f32` or `f64`) through
//! [`Real`]; the `*64` aliases below are what the CLI and the test-suite use.

pub mod analysis;
pub mod error;
pub mod fieldmap;
pub mod pseries;
pub mod quad;
pub mod render;
pub mod shear;

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub use num_complex::Complex;

pub use error::{Error, Result};
pub use fieldmap::{AnalyticFn, Factor, LogHarmonicMap, Mapping, PolyZZbarMap, WirtingerJet};
pub use pseries::Series;

/// Real scalar type the library is generic over.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

pub type Series64 = Series<f64>;
pub type AnalyticFn64 = AnalyticFn<f64>;
pub type LogHarmonicMap64 = LogHarmonicMap<f64>;
pub type PolyZZbarMap64 = PolyZZbarMap<f64>;
pub type WirtingerJet64 = WirtingerJet<f64>;
pub type Complex64 = Complex<f64>;

/// Converts an `f64` literal into the working scalar.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("scalar conversion from f64")
}

#[inline]
pub(crate) fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("scalar conversion from usize")
}

#[inline]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub(crate) fn pair<T: Real>(z: Complex<T>) -> (f64, f64) {
    (to_f64(z.re), to_f64(z.im))
}

#[inline]
pub(crate) fn is_finite_c<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
