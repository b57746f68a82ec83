use num_complex::Complex;
use num_traits::{One, Zero};

use super::{AnalyticFn, AnalyticJet, Factor, Mapping, WirtingerJet};
use crate::pseries::Series;
use crate::{lit, pair, Error, Real, Result};

const NORMALIZATION: f64 = 1e-12;

/// `f(z) = z h(z) conj(g(z))` with `h(0) = g(0) = 1`.
#[derive(Clone, Debug)]
pub struct LogHarmonicMap<T: Real> {
    h: AnalyticFn<T>,
    g: AnalyticFn<T>,
    label: String,
}

impl<T: Real> LogHarmonicMap<T> {
    pub fn new(h: AnalyticFn<T>, g: AnalyticFn<T>, label: impl Into<String>) -> Result<Self> {
        let zero = Complex::<T>::zero();
        for (name, f) in [("h", &h), ("g", &g)] {
            let v = f.value(zero)?;
            if (v - Complex::<T>::one()).norm() > lit(NORMALIZATION) {
                return Err(Error::Normalization(format!("{name}(0) = {v}, expected 1")));
            }
        }
        Ok(Self { h, g, label: label.into() })
    }

    /// The analytic map `φ` seen as `z (φ/z) conj(1)`.
    pub fn analytic(phi: &AnalyticFn<T>, label: impl Into<String>) -> Result<Self> {
        Self::new(phi.div_z()?, AnalyticFn::constant(Complex::<T>::one()), label)
    }

    /// `f = z exp(Σ a_n z^n) conj(exp(Σ b_n z^n))`, coefficients from `n = 1`.
    pub fn from_log_coeffs(a: &[Complex<T>], b: &[Complex<T>], label: impl Into<String>) -> Result<Self> {
        // trailing zeros tell the tail estimate that the exponent is exact
        let order = a.len().max(b.len()) + crate::pseries::TAIL_WINDOW;
        let build = |c: &[Complex<T>]| {
            Series::from_fn(order, |k| if k >= 1 && k <= c.len() { c[k - 1] } else { Complex::<T>::zero() })
        };
        Self::new(AnalyticFn::exp_of_series(build(a)?), AnalyticFn::exp_of_series(build(b)?), label)
    }

    pub fn h(&self) -> &AnalyticFn<T> {
        &self.h
    }

    pub fn g(&self) -> &AnalyticFn<T> {
        &self.g
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `φ = z h / g`.
    pub fn associated_phi(&self) -> AnalyticFn<T> {
        AnalyticFn::identity().mul(&self.h).mul(&self.g.recip())
    }

    /// `μ = (z g'/g) / (1 + z h'/h)`.
    pub fn dilatation(&self, z: Complex<T>) -> Result<Complex<T>> {
        let h = self.h.jet(z)?;
        let g = self.g.jet(z)?;
        let den = Complex::<T>::one() + z * h.d1 / h.value;
        if den.norm() <= T::epsilon() {
            let (re, im) = pair(z);
            return Err(Error::DegenerateDilatation(re, im));
        }
        Ok(z * g.d1 / g.value / den)
    }

    /// Log-coefficients `(a_1..a_N, b_1..b_N)` with `h = exp(Σ a_n z^n)` and
    /// `g = exp(Σ b_n z^n)`.
    pub fn coeffs(&self, order: usize) -> Result<(Vec<Complex<T>>, Vec<Complex<T>>)> {
        let a = self.h.taylor(order)?.log_series()?;
        let b = self.g.taylor(order)?.log_series()?;
        Ok((a.coeffs()[1..].to_vec(), b.coeffs()[1..].to_vec()))
    }

    /// Jets of `h` and `g` at a sequence of nearby points; a shear integral
    /// shared by `h` and `g` is computed once.
    pub fn hg_jets_along(&self, points: &[Complex<T>]) -> Vec<Result<(AnalyticJet<T>, AnalyticJet<T>)>> {
        let mut cache = Vec::new();
        let hs = self.h.jets_along_cached(points, &mut cache);
        let gs = self.g.jets_along_cached(points, &mut cache);
        hs.into_iter().zip(gs).map(|(h, g)| Ok((h?, g?))).collect()
    }

    /// The Wirtinger jet of `z h conj(g)` from the analytic jets of `h`, `g`.
    pub fn combine(z: Complex<T>, h: AnalyticJet<T>, g: AnalyticJet<T>) -> WirtingerJet<T> {
        let gb = g.value.conj();
        let g1 = g.d1.conj();
        let g2 = g.d2.conj();
        let zh = z * h.value;
        let zh1 = h.value + z * h.d1;
        WirtingerJet {
            z,
            f: zh * gb,
            f_z: zh1 * gb,
            f_zb: zh * g1,
            f_zz: (h.d1 * lit::<T>(2.0) + z * h.d2) * gb,
            f_zzb: zh1 * g1,
            f_zbzb: zh * g2,
        }
    }
}

impl<T: Real> Mapping<T> for LogHarmonicMap<T> {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn value(&self, z: Complex<T>) -> Result<Complex<T>> {
        Ok(z * self.h.value(z)? * self.g.value(z)?.conj())
    }

    fn jet(&self, z: Complex<T>) -> Result<WirtingerJet<T>> {
        Ok(Self::combine(z, self.h.jet(z)?, self.g.jet(z)?))
    }

    fn singular_points(&self) -> Vec<Complex<T>> {
        let mut s = self.h.singular_points().to_vec();
        for p in self.g.singular_points() {
            if !s.iter().any(|q| (q - p).norm() < lit(super::SINGULAR_EPS)) {
                s.push(*p);
            }
        }
        s
    }

    fn tail_estimate(&self, z: Complex<T>) -> T {
        let th = self.h.tail_estimate(z);
        let tg = self.g.tail_estimate(z);
        if th.is_zero() && tg.is_zero() {
            return T::zero();
        }
        match (self.h.value(z), self.g.value(z)) {
            (Ok(h), Ok(g)) => z.norm() * (th * g.norm() + tg * h.norm() + th * tg),
            _ => T::infinity(),
        }
    }

    fn jets_along(&self, points: &[Complex<T>]) -> Vec<Result<WirtingerJet<T>>> {
        points
            .iter()
            .zip(self.hg_jets_along(points))
            .map(|(&z, hg)| hg.map(|(h, g)| Self::combine(z, h, g)))
            .collect()
    }

    fn values_along(&self, points: &[Complex<T>]) -> Vec<Result<Complex<T>>> {
        let mut cache = Vec::new();
        let hs = self.h.values_along_cached(points, &mut cache);
        let gs = self.g.values_along_cached(points, &mut cache);
        points
            .iter()
            .zip(hs.into_iter().zip(gs))
            .map(|(&z, (h, g))| Ok(z * h? * g?.conj()))
            .collect()
    }
}

/// An analytic function as a map, with vanishing conjugate derivatives.
#[derive(Clone, Debug)]
pub struct AnalyticMap<T: Real> {
    f: AnalyticFn<T>,
    label: String,
}

impl<T: Real> AnalyticMap<T> {
    pub fn new(f: AnalyticFn<T>, label: impl Into<String>) -> Self {
        Self { f, label: label.into() }
    }

    pub fn function(&self) -> &AnalyticFn<T> {
        &self.f
    }
}

impl<T: Real> Mapping<T> for AnalyticMap<T> {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn value(&self, z: Complex<T>) -> Result<Complex<T>> {
        self.f.value(z)
    }

    fn jet(&self, z: Complex<T>) -> Result<WirtingerJet<T>> {
        let j = self.f.jet(z)?;
        Ok(WirtingerJet::analytic(z, j.value, j.d1, j.d2))
    }

    fn singular_points(&self) -> Vec<Complex<T>> {
        self.f.singular_points().to_vec()
    }

    fn tail_estimate(&self, z: Complex<T>) -> T {
        self.f.tail_estimate(z)
    }

    fn jets_along(&self, points: &[Complex<T>]) -> Vec<Result<WirtingerJet<T>>> {
        points
            .iter()
            .zip(self.f.jets_along(points))
            .map(|(&z, j)| j.map(|j| WirtingerJet::analytic(z, j.value, j.d1, j.d2)))
            .collect()
    }

    fn values_along(&self, points: &[Complex<T>]) -> Vec<Result<Complex<T>>> {
        self.f.values_along(points)
    }
}

/// One term `c z^j conj(z)^k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolyTerm<T> {
    pub j: u32,
    pub k: u32,
    pub c: Complex<T>,
}

/// Finite polynomial in `z` and `conj(z)`.
#[derive(Clone, Debug)]
pub struct PolyZZbarMap<T: Real> {
    terms: Vec<PolyTerm<T>>,
    label: String,
}

/// `n (n-1) ... (n-d+1) x^(n-d)`, zero when `d > n`.
fn falling<T: Real>(x: Complex<T>, n: u32, d: u32) -> Complex<T> {
    if d > n {
        return Complex::<T>::zero();
    }
    let mut c = T::one();
    for i in 0..d {
        c = c * lit::<T>((n - i) as f64);
    }
    x.powu(n - d) * c
}

impl<T: Real> PolyZZbarMap<T> {
    pub fn new(terms: Vec<PolyTerm<T>>, label: impl Into<String>) -> Self {
        Self { terms, label: label.into() }
    }

    /// `z - λ |z|²`.
    pub fn lambda_map(lambda: Complex<T>) -> Self {
        Self::new(
            vec![
                PolyTerm { j: 1, k: 0, c: Complex::<T>::one() },
                PolyTerm { j: 1, k: 1, c: -lambda },
            ],
            "lambda",
        )
    }

    /// `f |z|^{2(p-1)}`.
    pub fn times_abs_power(&self, p: u32) -> Self {
        let e = p.saturating_sub(1);
        Self::new(
            self.terms.iter().map(|t| PolyTerm { j: t.j + e, k: t.k + e, c: t.c }).collect(),
            self.label.clone(),
        )
    }

    pub fn terms(&self) -> &[PolyTerm<T>] {
        &self.terms
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    fn sum(&self, z: Complex<T>, dz: u32, dzb: u32) -> Complex<T> {
        let zb = z.conj();
        self.terms
            .iter()
            .fold(Complex::<T>::zero(), |acc, t| acc + t.c * falling(z, t.j, dz) * falling(zb, t.k, dzb))
    }
}

impl<T: Real> Mapping<T> for PolyZZbarMap<T> {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn value(&self, z: Complex<T>) -> Result<Complex<T>> {
        Ok(self.sum(z, 0, 0))
    }

    fn jet(&self, z: Complex<T>) -> Result<WirtingerJet<T>> {
        Ok(WirtingerJet {
            z,
            f: self.sum(z, 0, 0),
            f_z: self.sum(z, 1, 0),
            f_zb: self.sum(z, 0, 1),
            f_zz: self.sum(z, 2, 0),
            f_zzb: self.sum(z, 1, 1),
            f_zbzb: self.sum(z, 0, 2),
        })
    }

    fn singular_points(&self) -> Vec<Complex<T>> {
        Vec::new()
    }
}

/// Convenience: an [`AnalyticFn`] from a single factor.
pub(crate) fn single<T: Real>(f: Factor<T>) -> AnalyticFn<T> {
    AnalyticFn::new(vec![f])
}
