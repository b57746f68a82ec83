//! Analytic functions on the disk as finite products of elementary factors.
//!
//! Every factor knows its value, its logarithmic derivatives and its Taylor
//! expansion, so a product can be evaluated in closed form anywhere off its
//! declared singularities and expanded to any truncation order. Factors that
//! may vanish inside the disk (monomials, Möbius factors, polynomials) are
//! differentiated directly; all others are differentiated through
//! `(log F)'` and `(log F)''`, which keeps exponentials and fractional powers
//! out of the derivative formulas.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::pseries::Series;
use crate::quad::SegmentIntegrator;
use crate::{from_usize, is_finite_c, lit, pair, Error, Real, Result};

/// Distance below which a point counts as sitting on a declared singularity.
pub const SINGULAR_EPS: f64 = 1e-12;

/// Shear integrals along a point sequence, keyed by the shared integral.
pub type IntegralCache<T> = Vec<(Arc<ShearIntegral<T>>, Vec<Result<Complex<T>>>)>;

/// Value and first two complex derivatives at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticJet<T> {
    pub value: Complex<T>,
    pub d1: Complex<T>,
    pub d2: Complex<T>,
}

impl<T: Real> AnalyticJet<T> {
    fn one() -> Self {
        Self { value: Complex::<T>::one(), d1: Complex::<T>::zero(), d2: Complex::<T>::zero() }
    }

    fn times(self, o: Self) -> Self {
        Self {
            value: self.value * o.value,
            d1: self.d1 * o.value + self.value * o.d1,
            d2: self.d2 * o.value + (self.d1 * o.d1) * lit::<T>(2.0) + self.value * o.d2,
        }
    }
}

/// One multiplicative building block of an [`AnalyticFn`].
#[derive(Clone, Debug)]
pub enum Factor<T: Real> {
    Constant(Complex<T>),
    /// `z^m`.
    Monomial(i32),
    /// `(1 - node z^power)^exponent`, principal branch.
    Binomial { node: Complex<T>, power: u32, exponent: T },
    /// `exp(coef z^power / (1 - node z^power))`.
    ExpRational { coef: Complex<T>, node: Complex<T>, power: u32 },
    /// Disk automorphism `(z - zero) / (1 - conj(zero) z)`.
    Mobius { zero: Complex<T> },
    /// A polynomial given by its coefficients.
    Poly(Series<T>),
    /// `exp(L(z))` for a polynomial `L`.
    ExpSeries(Series<T>),
    /// `exp(sign * ∫_0^z q(s) ds)` with `q = μ/(1-μ) · φ'/φ`.
    Shear { integral: Arc<ShearIntegral<T>>, sign: T },
    Recip(Box<Factor<T>>),
}

/// `(s, s', s'')` for `s = z^p`.
fn zpow_jet<T: Real>(z: Complex<T>, p: u32) -> (Complex<T>, Complex<T>, Complex<T>) {
    let pf: T = from_usize(p as usize);
    match p {
        0 => (Complex::<T>::one(), Complex::<T>::zero(), Complex::<T>::zero()),
        1 => (z, Complex::<T>::one(), Complex::<T>::zero()),
        2 => (z * z, z * lit::<T>(2.0), Complex::new(lit(2.0), T::zero())),
        _ => (
            z.powu(p),
            z.powu(p - 1) * pf,
            z.powu(p - 2) * (pf * (pf - T::one())),
        ),
    }
}

/// All `z` with `node z^power = 1`.
fn roots_of_reciprocal<T: Real>(node: Complex<T>, power: u32) -> Vec<Complex<T>> {
    if node.norm().is_zero() || power == 0 {
        return Vec::new();
    }
    let target = Complex::<T>::one() / node;
    let (r, arg) = target.to_polar();
    let pf: T = from_usize(power as usize);
    let rr = r.powf(T::one() / pf);
    (0..power)
        .map(|k| {
            let t = (arg + T::TAU() * from_usize::<T>(k as usize)) / pf;
            Complex::from_polar(rr, t)
        })
        .collect()
}

impl<T: Real> Factor<T> {
    /// Factors that may vanish inside the disk are differentiated directly.
    fn is_direct(&self) -> bool {
        matches!(self, Factor::Monomial(_) | Factor::Mobius { .. } | Factor::Poly(_))
    }

    fn singular_points(&self) -> Vec<Complex<T>> {
        match self {
            Factor::Monomial(m) if *m < 0 => vec![Complex::<T>::zero()],
            Factor::Binomial { node, power, .. } | Factor::ExpRational { node, power, .. } => {
                roots_of_reciprocal(*node, *power)
            }
            Factor::Mobius { zero } if !zero.norm().is_zero() => vec![Complex::<T>::one() / zero.conj()],
            Factor::Shear { integral, .. } => {
                let mut s = integral.phi.singular_points().to_vec();
                s.extend_from_slice(integral.mu.singular_points());
                s
            }
            Factor::Recip(inner) => match inner.as_ref() {
                Factor::Mobius { zero } => vec![*zero],
                Factor::Monomial(m) if *m > 0 => vec![Complex::<T>::zero()],
                other => other.singular_points(),
            },
            _ => Vec::new(),
        }
    }

    fn direct_jet(&self, z: Complex<T>) -> AnalyticJet<T> {
        match self {
            Factor::Monomial(m) => {
                let m = *m;
                let mf: T = lit(m as f64);
                match m {
                    0 => AnalyticJet::one(),
                    1 => AnalyticJet { value: z, d1: Complex::<T>::one(), d2: Complex::<T>::zero() },
                    2 => AnalyticJet { value: z * z, d1: z * lit::<T>(2.0), d2: Complex::new(lit(2.0), T::zero()) },
                    _ => AnalyticJet {
                        value: z.powi(m),
                        d1: z.powi(m - 1) * mf,
                        d2: z.powi(m - 2) * (mf * (mf - T::one())),
                    },
                }
            }
            Factor::Mobius { zero } => {
                let a = *zero;
                let den = Complex::<T>::one() - a.conj() * z;
                let k = T::one() - a.norm_sqr();
                AnalyticJet {
                    value: (z - a) / den,
                    d1: Complex::new(k, T::zero()) / (den * den),
                    d2: a.conj() * k * lit::<T>(2.0) / (den * den * den),
                }
            }
            Factor::Poly(p) => {
                let [value, d1, d2] = p.eval_jet(z);
                AnalyticJet { value, d1, d2 }
            }
            _ => unreachable!("direct_jet on a log-form factor"),
        }
    }

    /// `(F, F'/F, (F'/F)')` at `z`; `integral` carries the precomputed
    /// shear integral when the factor is a [`Factor::Shear`].
    fn log_jet(&self, z: Complex<T>, integral: Option<Complex<T>>) -> Result<(Complex<T>, Complex<T>, Complex<T>)> {
        let two: T = lit(2.0);
        Ok(match self {
            Factor::Constant(c) => (*c, Complex::<T>::zero(), Complex::<T>::zero()),
            Factor::Monomial(_) | Factor::Mobius { .. } | Factor::Poly(_) => {
                let j = self.direct_jet(z);
                let l1 = j.d1 / j.value;
                (j.value, l1, j.d2 / j.value - l1 * l1)
            }
            Factor::Binomial { node, power, exponent } => {
                let (s, s1, s2) = zpow_jet(z, *power);
                let w = Complex::<T>::one() - node * s;
                let r1 = -(node * s1) / w;
                let r2 = -(node * s2) / w;
                let value = (w.ln() * *exponent).exp();
                (value, r1 * *exponent, (r2 - r1 * r1) * *exponent)
            }
            Factor::ExpRational { coef, node, power } => {
                let (s, s1, s2) = zpow_jet(z, *power);
                let t = Complex::<T>::one() - node * s;
                let arg = coef * s / t;
                let rs = coef / (t * t);
                let rss = coef * node * two / (t * t * t);
                (arg.exp(), rs * s1, rss * s1 * s1 + rs * s2)
            }
            Factor::ExpSeries(l) => {
                let [v, d1, d2] = l.eval_jet(z);
                (v.exp(), d1, d2)
            }
            Factor::Shear { integral: shear, sign } => {
                let i = match integral {
                    Some(i) => i,
                    None => shear.integral(z)?,
                };
                let (q, dq) = shear.integrand_jet(z)?;
                ((i * *sign).exp(), q * *sign, dq * *sign)
            }
            Factor::Recip(inner) => {
                let (v, l1, l2) = inner.log_jet(z, integral)?;
                (Complex::<T>::one() / v, -l1, -l2)
            }
        })
    }

    fn value(&self, z: Complex<T>, integral: Option<Complex<T>>) -> Result<Complex<T>> {
        Ok(match self {
            Factor::Constant(c) => *c,
            Factor::Monomial(_) | Factor::Mobius { .. } | Factor::Poly(_) => self.direct_jet(z).value,
            Factor::Binomial { node, power, exponent } => {
                let w = Complex::<T>::one() - node * zpow_jet(z, *power).0;
                (w.ln() * *exponent).exp()
            }
            Factor::ExpRational { coef, node, power } => {
                let s = zpow_jet(z, *power).0;
                (coef * s / (Complex::<T>::one() - node * s)).exp()
            }
            Factor::ExpSeries(l) => l.eval(z).exp(),
            Factor::Shear { integral: shear, sign } => {
                let i = match integral {
                    Some(i) => i,
                    None => shear.integral(z)?,
                };
                (i * *sign).exp()
            }
            Factor::Recip(inner) => Complex::<T>::one() / inner.value(z, integral)?,
        })
    }

    /// Relative truncation error of series-backed factors at radius `r`.
    fn relative_tail(&self, z: Complex<T>) -> T {
        match self {
            Factor::ExpSeries(l) => l.tail_estimate(z.norm()),
            Factor::Poly(p) => {
                let v = p.eval(z).norm();
                if v.is_zero() { T::infinity() } else { p.tail_estimate(z.norm()) / v }
            }
            Factor::Recip(inner) => inner.relative_tail(z),
            _ => T::zero(),
        }
    }

    fn reciprocal(&self) -> Self {
        match self {
            Factor::Constant(c) => Factor::Constant(Complex::<T>::one() / c),
            Factor::Monomial(m) => Factor::Monomial(-m),
            Factor::Binomial { node, power, exponent } => {
                Factor::Binomial { node: *node, power: *power, exponent: -*exponent }
            }
            Factor::ExpRational { coef, node, power } => {
                Factor::ExpRational { coef: -coef, node: *node, power: *power }
            }
            Factor::ExpSeries(l) => Factor::ExpSeries(l.neg()),
            Factor::Shear { integral, sign } => Factor::Shear { integral: integral.clone(), sign: -*sign },
            Factor::Recip(inner) => (**inner).clone(),
            other => Factor::Recip(Box::new(other.clone())),
        }
    }

    fn taylor(&self, order: usize) -> Result<Series<T>> {
        match self {
            Factor::Constant(c) => Ok(Series::constant(*c, order)),
            Factor::Monomial(m) => {
                let m = usize::try_from(*m)
                    .map_err(|_| Error::Unsupported("negative power of z has no Taylor expansion".into()))?;
                let mut s = Series::zero(order);
                if m <= order {
                    let mut c = s.coeffs().to_vec();
                    c[m] = Complex::<T>::one();
                    s = Series::from_vec_unchecked(c);
                }
                Ok(s)
            }
            Factor::Binomial { node, power, exponent } => {
                let p = *power as usize;
                let mut c = vec![Complex::<T>::zero(); order + 1];
                c[0] = Complex::<T>::one();
                if p > 0 {
                    let mut term: Complex<T> = Complex::<T>::one();
                    let mut k = 1;
                    while k * p <= order {
                        let kf: T = from_usize(k);
                        term = term * (-node) * ((*exponent - (kf - T::one())) / kf);
                        c[k * p] = term;
                        k += 1;
                    }
                }
                Series::new(c)
            }
            Factor::ExpRational { coef, node, power } => {
                let p = *power as usize;
                let mut c = vec![Complex::<T>::zero(); order + 1];
                if p > 0 {
                    let mut term = *coef;
                    let mut k = 1;
                    while k * p <= order {
                        c[k * p] = term;
                        term = term * node;
                        k += 1;
                    }
                }
                Series::new(c)?.exp_series()
            }
            Factor::Mobius { zero } => {
                let geo = Series::geometric(zero.conj(), order);
                let lin = Series::from_fn(order, |k| match k {
                    0 => -zero,
                    1 => Complex::<T>::one(),
                    _ => Complex::<T>::zero(),
                })?;
                lin.mul(&geo)
            }
            Factor::Poly(p) => Ok(p.with_order(order)),
            Factor::ExpSeries(l) => {
                let l = l.with_order(order);
                let c0 = l.coeff(0);
                let mut shifted = l.coeffs().to_vec();
                shifted[0] = Complex::<T>::zero();
                Ok(Series::new(shifted)?.exp_series()?.scale(c0.exp()))
            }
            Factor::Shear { integral, sign } => integral.log_series(order)?.scale(Complex::new(*sign, T::zero())).exp_series(),
            Factor::Recip(inner) => Series::one(order).div(&inner.taylor(order)?),
        }
    }
}

/// Analytic function on the disk, `c · Π factors`.
#[derive(Clone, Debug)]
pub struct AnalyticFn<T: Real> {
    factors: Vec<Factor<T>>,
    singular: Vec<Complex<T>>,
}

impl<T: Real> AnalyticFn<T> {
    pub fn new(factors: Vec<Factor<T>>) -> Self {
        let mut singular: Vec<Complex<T>> = Vec::new();
        for s in factors.iter().flat_map(Factor::singular_points) {
            if !singular.iter().any(|t| (t - s).norm() < lit(SINGULAR_EPS)) {
                singular.push(s);
            }
        }
        Self { factors, singular }
    }

    /// The identity `z`.
    pub fn identity() -> Self {
        Self::new(vec![Factor::Monomial(1)])
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::new(vec![Factor::Constant(c)])
    }

    /// Polynomial (series-backed) function.
    pub fn from_series(series: Series<T>) -> Self {
        Self::new(vec![Factor::Poly(series)])
    }

    /// `exp(L(z))` for a series `L`.
    pub fn exp_of_series(log: Series<T>) -> Self {
        Self::new(vec![Factor::ExpSeries(log)])
    }

    pub fn factors(&self) -> &[Factor<T>] {
        &self.factors
    }

    /// Declared singular points (all on or outside the unit circle for the
    /// catalog forms).
    pub fn singular_points(&self) -> &[Complex<T>] {
        &self.singular
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut f = self.factors.clone();
        f.extend(other.factors.iter().cloned());
        Self::new(f)
    }

    pub fn recip(&self) -> Self {
        Self::new(self.factors.iter().map(Factor::reciprocal).collect())
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        let mut f = self.factors.clone();
        f.push(Factor::Constant(c));
        Self::new(f)
    }

    /// `f(z) / z`. Cancels a leading monomial when there is one, otherwise
    /// divides a lone polynomial factor exactly.
    pub fn div_z(&self) -> Result<Self> {
        if let Some(i) = self.factors.iter().position(|f| matches!(f, Factor::Monomial(m) if *m >= 1)) {
            let mut f = self.factors.clone();
            if let Factor::Monomial(m) = f[i] {
                if m == 1 {
                    f.remove(i);
                } else {
                    f[i] = Factor::Monomial(m - 1);
                }
            }
            return Ok(Self::new(f));
        }
        let polys: Vec<usize> = self
            .factors
            .iter()
            .enumerate()
            .filter(|(_, f)| matches!(f, Factor::Poly(_)))
            .map(|(i, _)| i)
            .collect();
        if let [i] = polys[..] {
            if let Factor::Poly(p) = &self.factors[i] {
                if p.coeff(0).norm() <= lit(SINGULAR_EPS) {
                    let mut f = self.factors.clone();
                    f[i] = Factor::Poly(p.shift_down()?);
                    return Ok(Self::new(f));
                }
            }
        }
        Err(Error::Unsupported("cannot divide this representation by z exactly".into()))
    }

    pub fn check_domain(&self, z: Complex<T>) -> Result<()> {
        if !is_finite_c(z) {
            return Err(Error::NonFinite("evaluation point".into()));
        }
        if self.singular.iter().any(|s| (s - z).norm() < lit(SINGULAR_EPS)) {
            let (re, im) = pair(z);
            return Err(Error::Domain(re, im));
        }
        Ok(())
    }

    fn finite(z: Complex<T>, what: &str, at: Complex<T>) -> Result<Complex<T>> {
        if is_finite_c(z) {
            Ok(z)
        } else {
            let (re, im) = pair(at);
            Err(Error::NonFinite(format!("{what} at ({re:.6e}, {im:.6e})")))
        }
    }

    pub fn value(&self, z: Complex<T>) -> Result<Complex<T>> {
        self.check_domain(z)?;
        let mut v = Complex::<T>::one();
        for f in &self.factors {
            v = v * f.value(z, None)?;
        }
        Self::finite(v, "value", z)
    }

    pub fn jet(&self, z: Complex<T>) -> Result<AnalyticJet<T>> {
        self.check_domain(z)?;
        self.jet_with(z, &mut |_| None)
    }

    fn jet_with(
        &self,
        z: Complex<T>,
        integral_for: &mut dyn FnMut(usize) -> Option<Complex<T>>,
    ) -> Result<AnalyticJet<T>> {
        let mut direct = AnalyticJet::one();
        let mut value = Complex::<T>::one();
        let mut l1 = Complex::<T>::zero();
        let mut l2 = Complex::<T>::zero();
        for (i, f) in self.factors.iter().enumerate() {
            if f.is_direct() {
                direct = direct.times(f.direct_jet(z));
            } else {
                let (v, a, b) = f.log_jet(z, integral_for(i))?;
                value = value * v;
                l1 = l1 + a;
                l2 = l2 + b;
            }
        }
        let smooth = AnalyticJet { value, d1: value * l1, d2: value * (l1 * l1 + l2) };
        let jet = direct.times(smooth);
        Self::finite(jet.value, "value", z)?;
        Self::finite(jet.d1, "first derivative", z)?;
        Self::finite(jet.d2, "second derivative", z)?;
        Ok(jet)
    }

    /// `(f'/f, (f'/f)')`, the logarithmic derivatives. Singular at zeros of `f`.
    pub fn log_derivatives(&self, z: Complex<T>) -> Result<(Complex<T>, Complex<T>)> {
        self.check_domain(z)?;
        let mut l1 = Complex::<T>::zero();
        let mut l2 = Complex::<T>::zero();
        for f in &self.factors {
            let (_, a, b) = f.log_jet(z, None)?;
            l1 = l1 + a;
            l2 = l2 + b;
        }
        Self::finite(l1, "logarithmic derivative", z)?;
        Ok((l1, l2))
    }

    /// Jets at a sequence of nearby points. Shear integrals are continued
    /// from point to point along chords instead of being recomputed from the
    /// origin, so consecutive points should be close (a circle or a ray).
    pub fn jets_along(&self, points: &[Complex<T>]) -> Vec<Result<AnalyticJet<T>>> {
        self.jets_along_cached(points, &mut Vec::new())
    }

    /// As [`AnalyticFn::jets_along`], reusing integrals already in `cache`
    /// (keyed by the shared integral) and adding new ones to it.
    pub fn jets_along_cached(&self, points: &[Complex<T>], cache: &mut IntegralCache<T>) -> Vec<Result<AnalyticJet<T>>> {
        let integrals = self.shear_integrals_along(points, cache);
        points
            .iter()
            .enumerate()
            .map(|(k, &z)| {
                self.check_domain(z)?;
                for (_, ints) in &integrals {
                    if let Err(e) = &ints[k] {
                        return Err(e.clone());
                    }
                }
                self.jet_with(z, &mut |i| {
                    integrals.iter().find(|(j, _)| *j == i).and_then(|(_, v)| v[k].as_ref().ok().copied())
                })
            })
            .collect()
    }

    /// Values at a sequence of nearby points (see [`AnalyticFn::jets_along`]).
    pub fn values_along(&self, points: &[Complex<T>]) -> Vec<Result<Complex<T>>> {
        self.values_along_cached(points, &mut Vec::new())
    }

    pub fn values_along_cached(&self, points: &[Complex<T>], cache: &mut IntegralCache<T>) -> Vec<Result<Complex<T>>> {
        let integrals = self.shear_integrals_along(points, cache);
        points
            .iter()
            .enumerate()
            .map(|(k, &z)| {
                self.check_domain(z)?;
                let mut v = Complex::<T>::one();
                for (i, f) in self.factors.iter().enumerate() {
                    let pre = match integrals.iter().find(|(j, _)| *j == i) {
                        Some((_, ints)) => Some(ints[k].clone()?),
                        None => None,
                    };
                    v = v * f.value(z, pre)?;
                }
                Self::finite(v, "value", z)
            })
            .collect()
    }

    fn shear_integrals_along(
        &self,
        points: &[Complex<T>],
        cache: &mut IntegralCache<T>,
    ) -> Vec<(usize, Vec<Result<Complex<T>>>)> {
        let mut out = Vec::new();
        for (i, f) in self.factors.iter().enumerate() {
            let shear = match f {
                Factor::Shear { integral, .. } => integral,
                Factor::Recip(inner) => match inner.as_ref() {
                    Factor::Shear { integral, .. } => integral,
                    _ => continue,
                },
                _ => continue,
            };
            let values = match cache.iter().find(|(s, _)| Arc::ptr_eq(s, shear)) {
                Some((_, v)) => v.clone(),
                None => {
                    let v = shear.integrals_along(points);
                    cache.push((shear.clone(), v.clone()));
                    v
                }
            };
            out.push((i, values));
        }
        out
    }

    /// Estimated truncation error of series-backed factors at `z`, absolute.
    pub fn tail_estimate(&self, z: Complex<T>) -> T {
        let rel = self.factors.iter().map(|f| f.relative_tail(z)).fold(T::zero(), |a, b| a + b);
        if rel.is_zero() {
            return rel;
        }
        match self.value(z) {
            Ok(v) => v.norm() * rel,
            Err(_) => T::infinity(),
        }
    }

    /// Taylor expansion at 0 to `order`.
    pub fn taylor(&self, order: usize) -> Result<Series<T>> {
        let shift: i32 = self
            .factors
            .iter()
            .map(|f| if let Factor::Monomial(m) = f { *m } else { 0 })
            .sum();
        let extra = if shift < 0 { (-shift) as usize } else { 0 };
        let work = order + extra;
        let mut acc = Series::one(work);
        for f in &self.factors {
            if matches!(f, Factor::Monomial(_)) {
                continue;
            }
            acc = acc.mul(&f.taylor(work)?)?;
        }
        if shift >= 0 {
            let s = shift as usize;
            let c = (0..=order).map(|k| if k >= s { acc.coeff(k - s) } else { Complex::<T>::zero() }).collect();
            return Series::new(c);
        }
        let scale = acc.coeffs().iter().map(|c| c.norm()).fold(T::one(), T::max);
        if acc.coeffs()[..extra].iter().any(|c| c.norm() > scale * lit(SINGULAR_EPS)) {
            return Err(Error::Unsupported("function has a pole at the origin".into()));
        }
        Series::new(acc.coeffs()[extra..].to_vec())
    }
}

/// The shear integral `I(z) = ∫_0^z μ/(1-μ) · φ'/φ ds` from the log-harmonic
/// construction, evaluated by quadrature along straight segments.
#[derive(Debug)]
pub struct ShearIntegral<T: Real> {
    phi: AnalyticFn<T>,
    mu: AnalyticFn<T>,
    q0: Complex<T>,
    dq0: Complex<T>,
    integrator: SegmentIntegrator<T>,
}

/// Start offset of the radial quadrature, relative to the endpoint.
const RADIAL_START: f64 = 1e-12;
/// Below this modulus the integrand is replaced by its linear Taylor model.
const SMALL_ARG: f64 = 1e-7;
/// Normalization tolerance for φ(0) = 0, φ'(0) = 1 and μ(0) = 0.
pub const NORMALIZATION_TOL: f64 = 1e-10;

impl<T: Real> ShearIntegral<T> {
    pub fn new(phi: AnalyticFn<T>, mu: AnalyticFn<T>) -> Result<Self> {
        let zero = Complex::<T>::zero();
        let p = phi.jet(zero)?;
        if p.value.norm() > lit(NORMALIZATION_TOL) || (p.d1 - Complex::<T>::one()).norm() > lit(NORMALIZATION_TOL) {
            return Err(Error::InadmissiblePhi(format!(
                "need phi(0) = 0 and phi'(0) = 1, got {} and {}",
                p.value, p.d1
            )));
        }
        let m = mu.jet(zero)?;
        if m.value.norm() > lit(NORMALIZATION_TOL) {
            return Err(Error::InadmissibleDilatation(format!("need mu(0) = 0, got {}", m.value)));
        }
        let half: T = lit(0.5);
        let q0 = m.d1;
        let dq0 = m.d2 * half + m.d1 * m.d1 + m.d1 * p.d2 * half;
        Ok(Self { phi, mu, q0, dq0, integrator: SegmentIntegrator::default() })
    }

    pub fn phi(&self) -> &AnalyticFn<T> {
        &self.phi
    }

    pub fn mu(&self) -> &AnalyticFn<T> {
        &self.mu
    }

    /// Limit of the integrand at the origin, `μ'(0)`.
    pub fn limit_at_origin(&self) -> Complex<T> {
        self.q0
    }

    pub fn integrand(&self, s: Complex<T>) -> Result<Complex<T>> {
        if s.norm() < lit(SMALL_ARG) {
            return Ok(self.q0 + self.dq0 * s);
        }
        let m = self.mu.value(s)?;
        let (l1, _) = self.phi.log_derivatives(s)?;
        Ok(m / (Complex::<T>::one() - m) * l1)
    }

    /// Integrand and its derivative.
    pub fn integrand_jet(&self, s: Complex<T>) -> Result<(Complex<T>, Complex<T>)> {
        if s.norm() < lit(SMALL_ARG) {
            return Ok((self.q0 + self.dq0 * s, self.dq0));
        }
        let m = self.mu.jet(s)?;
        let (l1, l2) = self.phi.log_derivatives(s)?;
        let one_minus = Complex::<T>::one() - m.value;
        let ratio = m.value / one_minus;
        Ok((ratio * l1, m.d1 / (one_minus * one_minus) * l1 + ratio * l2))
    }

    /// `I(z)` along the radius `[0, z]`. The first `1e-12` of the segment is
    /// replaced by its limit contribution.
    pub fn integral(&self, z: Complex<T>) -> Result<Complex<T>> {
        if z.norm().is_zero() {
            return Ok(Complex::<T>::zero());
        }
        let start = z * lit::<T>(RADIAL_START);
        let body = self.integrator.integrate(|s| self.integrand(s), start, z)?;
        Ok(body + self.q0 * start)
    }

    /// `∫_a^b` along the chord.
    pub fn chord(&self, a: Complex<T>, b: Complex<T>) -> Result<Complex<T>> {
        self.integrator.integrate(|s| self.integrand(s), a, b)
    }

    /// `I` at every point, continuing along chords from the last good point.
    pub fn integrals_along(&self, points: &[Complex<T>]) -> Vec<Result<Complex<T>>> {
        let mut last: Option<(Complex<T>, Complex<T>)> = None;
        points
            .iter()
            .map(|&z| {
                let r = match last {
                    Some((a, ia)) => self.chord(a, z).map(|d| ia + d).or_else(|_| self.integral(z)),
                    None => self.integral(z),
                };
                if let Ok(v) = r {
                    last = Some((z, v));
                }
                r
            })
            .collect()
    }

    /// Taylor series of `I` to `order`: integrate `ν (1 + z u'/u) / (1 - μ)`
    /// with `μ = z ν` and `φ = z u`, so the pole of `φ'/φ` never appears.
    pub fn log_series(&self, order: usize) -> Result<Series<T>> {
        let phi = self.phi.taylor(order + 1)?;
        let u = phi.shift_down()?;
        let mu = self.mu.taylor(order + 1)?;
        let nu = mu.shift_down()?;
        let log_u_prime_z = u.derivative().div(&u)?.shift_up();
        let z_phi_ratio = Series::one(order).add(&log_u_prime_z)?;
        let one_minus_mu = Series::one(order).sub(&mu.with_order(order))?;
        let q = nu.mul(&z_phi_ratio)?.div(&one_minus_mu)?;
        Ok(q.integrate())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn koebe() -> AnalyticFn<f64> {
        AnalyticFn::new(vec![
            Factor::Monomial(1),
            Factor::Binomial { node: C::new(1.0, 0.0), power: 1, exponent: -2.0 },
        ])
    }

    fn fd_check(f: &AnalyticFn<f64>, z: C) {
        let h = 1e-5;
        let j = f.jet(z).unwrap();
        let d1 = (f.value(z + h).unwrap() - f.value(z - h).unwrap()) / (2.0 * h);
        let d2 = (f.jet(z + h).unwrap().d1 - f.jet(z - h).unwrap().d1) / (2.0 * h);
        assert!((d1 - j.d1).norm() < 1e-7 * (1.0 + j.d1.norm()), "d1 {d1} vs {}", j.d1);
        assert!((d2 - j.d2).norm() < 1e-6 * (1.0 + j.d2.norm()), "d2 {d2} vs {}", j.d2);
    }

    #[test]
    fn koebe_values_and_derivatives() {
        let k = koebe();
        let z = C::new(0.3, -0.2);
        let want = z / ((1.0 - z) * (1.0 - z));
        assert!((k.value(z).unwrap() - want).norm() < 1e-15);
        fd_check(&k, z);
        assert_eq!(k.singular_points(), &[C::new(1.0, 0.0)]);
        assert!(matches!(k.value(C::new(1.0, 0.0)), Err(Error::Domain(..))));
        let t = k.taylor(6).unwrap();
        for n in 0..=6 {
            assert!((t.coeff(n) - C::new(n as f64, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn every_factor_kind_matches_its_taylor_series() {
        let z = C::new(0.21, 0.13);
        let kinds = vec![
            Factor::Binomial { node: C::new(0.0, 1.0), power: 2, exponent: 0.25 },
            Factor::ExpRational { coef: C::new(2.0, 0.5), node: C::new(-1.0, 0.0), power: 1 },
            Factor::ExpRational { coef: C::new(1.0, 0.0), node: C::new(1.0, 0.0), power: 2 },
            Factor::Mobius { zero: C::new(0.4, -0.3) },
            Factor::Poly(Series::new(vec![C::new(1.0, 0.0), C::new(0.5, 0.5), C::new(-0.2, 0.0)]).unwrap()),
            Factor::ExpSeries(Series::new(vec![C::new(0.1, 0.0), C::new(0.5, -0.5)]).unwrap()),
            Factor::Constant(C::new(2.0, -1.0)),
            Factor::Monomial(3),
            Factor::Recip(Box::new(Factor::Poly(Series::new(vec![C::new(1.0, 0.0), C::new(0.3, -0.4)]).unwrap()))),
        ];
        for f in kinds {
            let a = AnalyticFn::new(vec![f.clone()]);
            let series = a.taylor(60).unwrap();
            let v = a.value(z).unwrap();
            assert!((series.eval(z) - v).norm() < 1e-12, "{f:?}: {} vs {v}", series.eval(z));
            fd_check(&a, z);
            let r = a.recip();
            assert!((r.value(z).unwrap() * v - 1.0).norm() < 1e-13, "{f:?} reciprocal");
        }
    }

    #[test]
    fn division_by_z() {
        let k = koebe();
        let u = k.div_z().unwrap();
        let z = C::new(0.2, 0.1);
        assert!((u.value(z).unwrap() * z - k.value(z).unwrap()).norm() < 1e-15);
        let p = AnalyticFn::from_series(Series::new(vec![C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(3.0, 0.0)]).unwrap());
        assert!((p.div_z().unwrap().value(z).unwrap() - (1.0 + 3.0 * z)).norm() < 1e-15);
        assert!(AnalyticFn::<f64>::constant(C::new(1.0, 0.0)).div_z().is_err());
        // the pole cancels in the Taylor expansion
        let mut f = k.factors().to_vec();
        f.push(Factor::Monomial(-1));
        let t = AnalyticFn::new(f).taylor(4).unwrap();
        assert!((t.coeff(0) - 1.0).norm() < 1e-15 && (t.coeff(1) - 2.0).norm() < 1e-15);
    }

    #[test]
    fn shear_integral_koebe_identity_dilatation() {
        // φ Koebe, μ = z: I(z) = 2z/(1-z) + log(1-z)
        let shear = ShearIntegral::new(koebe(), AnalyticFn::identity()).unwrap();
        let z = C::new(0.5, 0.0);
        let want = 2.0 * z / (1.0 - z) + (1.0 - z).ln();
        assert!((shear.integral(z).unwrap() - want).norm() < 1e-11);
        assert!((shear.limit_at_origin() - 1.0).norm() < 1e-15);
        let s = C::new(1e-6, 1e-6);
        assert!((shear.integrand(s).unwrap() - 1.0).norm() < 1e-5);
        let series = shear.log_series(5).unwrap();
        for n in 1..=5 {
            assert!((series.coeff(n).re - (2.0 - 1.0 / n as f64)).abs() < 1e-13);
        }
        // chained evaluation agrees with radial evaluation
        let pts: Vec<C> = (0..50).map(|k| C::from_polar(0.9, k as f64 * 0.12 + 0.05)).collect();
        for (p, v) in pts.iter().zip(shear.integrals_along(&pts)) {
            let want = 2.0 * p / (1.0 - p) + (1.0 - p).ln();
            assert!((v.unwrap() - want).norm() < 1e-9);
        }
    }

    #[test]
    fn shear_integral_rejects_bad_inputs() {
        let bad_mu = AnalyticFn::constant(C::new(0.5, 0.0));
        assert!(matches!(ShearIntegral::new(koebe(), bad_mu), Err(Error::InadmissibleDilatation(_))));
        let bad_phi = koebe().scale(C::new(2.0, 0.0));
        assert!(matches!(ShearIntegral::new(bad_phi, AnalyticFn::identity()), Err(Error::InadmissiblePhi(_))));
    }
}
