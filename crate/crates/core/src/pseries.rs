//! Truncated Taylor series with complex coefficients.
//!
//! A [`Series`] of order `N` stores `c_0..=c_N` and stands for
//! `c_0 + c_1 z + ... + c_N z^N + O(z^{N+1})`. Binary operations never change
//! the order implicitly: both operands must agree, otherwise
//! [`Error::OrderMismatch`] is returned. Use [`Series::with_order`] to
//! truncate or zero-extend explicitly.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{from_usize, is_finite_c, lit, to_f64, Error, Real, Result};

/// Number of trailing terms used by the geometric tail extrapolation.
pub(crate) const TAIL_WINDOW: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct Series<T> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> Series<T> {
    /// Builds a series of order `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition("a series needs at least one coefficient".into()));
        }
        if let Some(k) = coeffs.iter().position(|c| !is_finite_c(*c)) {
            return Err(Error::NonFinite(format!("series coefficient {k}")));
        }
        Ok(Self { coeffs })
    }

    /// Builds an order-`order` series whose `k`-th coefficient is `f(k)`.
    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Complex<T>) -> Result<Self> {
        Self::new((0..=order).map(f).collect())
    }

    pub(crate) fn from_vec_unchecked(coeffs: Vec<Complex<T>>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![Complex::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Complex::one(), order)
    }

    pub fn constant(c: Complex<T>, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The series `z` (zero when `order == 0`).
    pub fn variable(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = Complex::one();
        }
        s
    }

    /// Geometric series `sum_k (x z)^k`, i.e. `1/(1 - x z)`.
    pub fn geometric(x: Complex<T>, order: usize) -> Self {
        let mut s = Self::zero(order);
        let mut p = Complex::one();
        for c in s.coeffs.iter_mut() {
            *c = p;
            p = p * x;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Coefficient of `z^k`, zero beyond the truncation order.
    pub fn coeff(&self, k: usize) -> Complex<T> {
        self.coeffs.get(k).copied().unwrap_or_else(Complex::zero)
    }

    /// Truncates or zero-extends to `order`.
    pub fn with_order(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Complex::zero());
        Self { coeffs }
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch { left: self.order(), right: other.order() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() })
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let n = self.order();
        let mut out = vec![Complex::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        Ok(Self { coeffs: out })
    }

    /// Quotient `q` with `q * other = self` up to the truncation order.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let b0 = other.coeffs[0];
        if b0.is_zero() {
            return Err(Error::NonInvertible);
        }
        let n = self.order();
        let mut q: Vec<Complex<T>> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc = acc - other.coeffs[j] * q[k - j];
            }
            q.push(acc / b0);
        }
        Ok(Self { coeffs: q })
    }

    /// Formal derivative, re-extended to the same order with a trailing zero.
    pub fn derivative(&self) -> Self {
        let n = self.order();
        let mut out = vec![Complex::zero(); n + 1];
        for k in 1..=n {
            out[k - 1] = self.coeffs[k] * from_usize::<T>(k);
        }
        Self { coeffs: out }
    }

    /// Term-wise antiderivative with zero constant term, truncated at the order.
    pub fn integrate(&self) -> Self {
        let n = self.order();
        let mut out = vec![Complex::zero(); n + 1];
        for k in 1..=n {
            out[k] = self.coeffs[k - 1] / from_usize::<T>(k);
        }
        Self { coeffs: out }
    }

    /// Multiplies by `z`, dropping the top coefficient.
    pub fn shift_up(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        coeffs.push(Complex::zero());
        coeffs.extend_from_slice(&self.coeffs[..self.order()]);
        Self { coeffs }
    }

    /// Divides by `z`; the constant term must vanish. The order drops by one.
    pub fn shift_down(&self) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::Precondition("cannot divide an order-0 series by z".into()));
        }
        Ok(Self { coeffs: self.coeffs[1..].to_vec() })
    }

    /// `exp` of a series with zero constant term, via `n E_n = sum_k k a_k E_{n-k}`.
    pub fn exp_series(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Normalization("exp_series needs a zero constant term".into()));
        }
        let n = self.order();
        let mut e: Vec<Complex<T>> = Vec::with_capacity(n + 1);
        e.push(Complex::one());
        for m in 1..=n {
            let mut acc = Complex::zero();
            for k in 1..=m {
                let a = self.coeffs[k];
                if !a.is_zero() {
                    acc = acc + a * e[m - k] * from_usize::<T>(k);
                }
            }
            e.push(acc / from_usize::<T>(m));
        }
        Ok(Self { coeffs: e })
    }

    /// Logarithm of a series with constant term 1 (within 1e-12): integrate `a'/a`.
    pub fn log_series(&self) -> Result<Self> {
        if (self.coeffs[0] - Complex::one()).norm() > lit(1e-12) {
            return Err(Error::Normalization("log_series needs constant term 1".into()));
        }
        Ok(self.derivative().div(self)?.integrate())
    }

    /// `self ∘ inner`, truncated; `inner` must vanish at 0.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.check_order(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(Error::CompositionDomain);
        }
        let n = self.order();
        let mut acc = Self::zero(n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner)?;
            acc.coeffs[0] = acc.coeffs[0] + c;
        }
        Ok(acc)
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs.iter().rev().fold(Complex::zero(), |acc, c| acc * z + c)
    }

    /// First and second derivatives by Horner, together with the value.
    pub fn eval_jet(&self, z: Complex<T>) -> [Complex<T>; 3] {
        let mut p = Complex::zero();
        let mut d1 = Complex::zero();
        let mut d2 = Complex::zero();
        for c in self.coeffs.iter().rev() {
            d2 = d2 * z + d1 * lit::<T>(2.0);
            d1 = d1 * z + p;
            p = p * z + c;
        }
        [p, d1, d2]
    }

    /// Value together with the estimated truncation tail at `z`.
    pub fn eval_with_tail(&self, z: Complex<T>) -> (Complex<T>, T) {
        (self.eval(z), self.tail_estimate(z.norm()))
    }

    /// Geometric extrapolation of the omitted tail `sum_{k>N} |c_k| r^k` from
    /// the last eight terms. Infinite when the terms are not decaying.
    pub fn tail_estimate(&self, r: T) -> T {
        let n = self.order();
        let window = TAIL_WINDOW.min(n + 1);
        let terms: Vec<T> = (n + 1 - window..=n)
            .map(|k| self.coeffs[k].norm() * r.powi(k as i32))
            .collect();
        if terms.iter().all(|t| t.is_zero()) {
            return T::zero();
        }
        if window < 2 {
            return T::infinity();
        }
        let half = window / 2;
        let older: T = terms[..half].iter().copied().fold(T::zero(), |a, b| a + b);
        let newer: T = terms[window - half..].iter().copied().fold(T::zero(), |a, b| a + b);
        if older.is_zero() {
            return T::infinity();
        }
        let ratio = (newer / older).powf(T::one() / from_usize::<T>(window - half));
        if ratio >= T::one() {
            return T::infinity();
        }
        // extrapolate from every term in the window so that series with
        // vanishing odd (or even) coefficients are not underestimated
        let steps = |i: usize| ratio.powi((window - i) as i32);
        let lead = (0..window).map(|i| terms[i] * steps(i)).fold(T::zero(), T::max);
        lead / (T::one() - ratio)
    }

    /// Largest coefficientwise modulus of the difference (orders must agree).
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_order(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    order: usize,
    coeffs: Vec<[f64; 2]>,
}

impl<T: Real> Serialize for Series<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            order: self.order(),
            coeffs: self.coeffs.iter().map(|c| [to_f64(c.re), to_f64(c.im)]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for Series<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(deserializer)?;
        if repr.coeffs.len() != repr.order + 1 {
            return Err(serde::de::Error::custom(format!(
                "order {} needs {} coefficients, found {}",
                repr.order,
                repr.order + 1,
                repr.coeffs.len()
            )));
        }
        let coeffs = repr
            .coeffs
            .iter()
            .map(|[re, im]| Complex::new(lit(*re), lit(*im)))
            .collect();
        Series::new(coeffs).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn s(c: &[f64], order: usize) -> Series<f64> {
        Series::from_fn(order, |k| C::new(c.get(k).copied().unwrap_or(0.0), 0.0)).unwrap()
    }

    fn close(a: &Series<f64>, b: &Series<f64>, tol: f64) {
        let d = a.max_abs_diff(b).unwrap();
        assert!(d < tol, "max coefficient difference {d:e} >= {tol:e}\n{a:?}\n{b:?}");
    }

    fn random_series(order: usize) -> impl Strategy<Value = Series<f64>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), order + 1).prop_map(|v| {
            Series::new(
                v.into_iter()
                    .map(|(r, i)| {
                        let c = C::new(r, i);
                        if c.norm() > 1.0 { c / c.norm() } else { c }
                    })
                    .collect(),
            )
            .unwrap()
        })
    }

    #[test]
    fn add_and_scale() {
        let n = 6;
        close(&s(&[1.0, 1.0], n).add(&s(&[1.0, -1.0], n)).unwrap(), &s(&[2.0], n), 1e-15);
        close(&Series::variable(n).scale(C::new(2.0, 0.0)), &s(&[0.0, 2.0], n), 1e-15);
        assert_eq!(
            s(&[1.0], 3).add(&s(&[1.0], 4)),
            Err(Error::OrderMismatch { left: 3, right: 4 })
        );
    }

    #[test]
    fn products_and_quotients() {
        let n = 10;
        close(&s(&[1.0, 1.0], n).mul(&s(&[1.0, -1.0], n)).unwrap(), &s(&[1.0, 0.0, -1.0], n), 1e-15);
        // 1/(1-z) from the recurrence c_k = c_{k-1}, independent of `geometric`
        let mut geo = vec![1.0; n + 1];
        for k in 1..=n {
            geo[k] = geo[k - 1];
        }
        let geo = s(&geo, n);
        close(&geo.mul(&s(&[1.0, -1.0], n)).unwrap(), &Series::one(n), 1e-15);
        close(&Series::one(n).div(&s(&[1.0, -1.0], n)).unwrap(), &geo, 1e-15);
        close(&s(&[1.0, 0.0, -1.0], n).div(&s(&[1.0, -1.0], n)).unwrap(), &s(&[1.0, 1.0], n), 1e-15);
        assert_eq!(Series::<f64>::one(n).div(&Series::variable(n)), Err(Error::NonInvertible));
    }

    #[test]
    fn calculus() {
        let n = 12;
        let mut fact = 1.0;
        let e = Series::from_fn(n, |k| {
            if k > 0 {
                fact *= k as f64;
            }
            C::new(1.0 / fact, 0.0)
        })
        .unwrap();
        let d = e.derivative();
        for k in 0..n {
            assert!((d.coeff(k) - e.coeff(k)).norm() < 1e-15);
        }
        assert_eq!(d.coeff(n), C::new(0.0, 0.0));
        let log = Series::geometric(C::new(1.0, 0.0), n).integrate();
        for k in 1..=n {
            assert!((log.coeff(k).re - 1.0 / k as f64).abs() < 1e-15);
        }
        assert_eq!(log.coeff(0), C::new(0.0, 0.0));
    }

    #[test]
    fn exp_known_values() {
        close(&Series::<f64>::zero(5).exp_series().unwrap(), &Series::one(5), 1e-15);
        let e = s(&[0.0, 2.0], 6).exp_series().unwrap();
        let long = s(&[0.0, 2.0], 24).exp_series().unwrap();
        let expect = [1.0, 2.0, 2.0, 4.0 / 3.0, 2.0 / 3.0, 4.0 / 15.0, 4.0 / 45.0];
        for (k, v) in expect.iter().enumerate() {
            assert!((e.coeff(k).re - v).abs() < 1e-14);
        }
        assert!(matches!(Series::<f64>::one(3).exp_series(), Err(Error::Normalization(_))));
        assert!((long.eval(C::new(0.25, 0.0)).re - 0.5f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn exp_of_koebe_log_matches_closed_form() {
        // log(1/(1-z)) + 2z/(1-z) = sum (2 + 1/n) z^n
        let koebe_log = |n: usize| {
            Series::from_fn(n, |k| if k == 0 { C::new(0.0, 0.0) } else { C::new(2.0 + 1.0 / k as f64, 0.0) })
                .unwrap()
        };
        let z = C::new(0.3, 0.0);
        let one = C::new(1.0, 0.0);
        let closed = one / (one - z) * (z * 2.0 / (one - z)).exp();
        // at N = 8 the omitted tail at 0.3 is ~1e-3, so compare the N = 8
        // coefficients with a long expansion and the long expansion with the
        // closed form
        let long = koebe_log(80).exp_series().unwrap();
        assert!((long.eval(z) - closed).norm() < 1e-9);
        close(&koebe_log(8).exp_series().unwrap(), &long.with_order(8), 1e-12);
    }

    #[test]
    fn log_known_values() {
        close(&Series::<f64>::one(6).log_series().unwrap(), &Series::zero(6), 1e-15);
        let l = Series::geometric(C::new(1.0, 0.0), 9).log_series().unwrap();
        for k in 1..=9 {
            assert!((l.coeff(k).re - 1.0 / k as f64).abs() < 1e-15);
        }
        assert!(matches!(Series::<f64>::variable(3).log_series(), Err(Error::Normalization(_))));
    }

    #[test]
    fn composition() {
        let n = 10;
        let geo = Series::geometric(C::new(1.0, 0.0), n);
        let z2 = s(&[0.0, 0.0, 1.0], n);
        let want = Series::from_fn(n, |k| C::new(if k % 2 == 0 { 1.0 } else { 0.0 }, 0.0)).unwrap();
        close(&geo.compose(&z2).unwrap(), &want, 1e-15);
        close(&geo.compose(&Series::variable(n)).unwrap(), &geo, 1e-15);
        // Koebe k(z) = sum k z^k ; k(-z) = -(z/(1+z)^2) = sum (-1)^k k z^k
        let koebe = Series::from_fn(n, |k| C::new(k as f64, 0.0)).unwrap();
        let rotated = koebe.compose(&Series::variable(n).neg()).unwrap();
        for k in 0..=n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((rotated.coeff(k).re - sign * k as f64).abs() < 1e-12);
        }
        assert_eq!(geo.compose(&geo), Err(Error::CompositionDomain));
    }

    #[test]
    fn evaluation() {
        let geo = Series::geometric(C::new(1.0, 0.0), 50);
        assert!((geo.eval(C::new(0.5, 0.0)) - C::new(2.0, 0.0)).norm() < 1e-14);
        let a = s(&[0.7, 0.1, 3.0], 2);
        assert_eq!(a.eval(C::new(0.0, 0.0)), C::new(0.7, 0.0));
        let [v, d1, d2] = a.eval_jet(C::new(0.5, 0.0));
        assert!((v.re - (0.7 + 0.05 + 0.75)).abs() < 1e-15);
        assert!((d1.re - (0.1 + 3.0)).abs() < 1e-15);
        assert!((d2.re - 6.0).abs() < 1e-15);
    }

    #[test]
    fn tail_estimate_tracks_geometric_tail() {
        let geo = Series::geometric(C::new(1.0, 0.0), 40);
        let t = geo.tail_estimate(0.5);
        let exact = 0.5f64.powi(41) / 0.5;
        assert!((t - exact).abs() / exact < 1e-9, "{t} vs {exact}");
        assert!(geo.tail_estimate(1.0).is_infinite());
        assert_eq!(Series::<f64>::one(10).tail_estimate(0.9), 0.0);
    }

    #[test]
    fn json_shape() {
        let a = s(&[1.0, -2.0], 2);
        let txt = serde_json::to_string(&a).unwrap();
        assert_eq!(txt, r#"{"order":2,"coeffs":[[1.0,0.0],[-2.0,0.0],[0.0,0.0]]}"#);
        let back: Series<f64> = serde_json::from_str(&txt).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<Series<f64>>(r#"{"order":3,"coeffs":[[1,0]]}"#).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let e = Series::<f32>::variable(10).scale(Complex::new(2.0, 0.0)).exp_series().unwrap();
        assert!((e.eval(Complex::new(0.25, 0.0)).re - 0.5f32.exp()).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn ring_laws(a in random_series(12), b in random_series(12), c in random_series(12)) {
            close(&a.mul(&b).unwrap(), &b.mul(&a).unwrap(), 1e-13);
            close(&a.mul(&b).unwrap().mul(&c).unwrap(), &a.mul(&b.mul(&c).unwrap()).unwrap(), 1e-12);
            close(&a.mul(&b.add(&c).unwrap()).unwrap(), &a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap(), 1e-12);
            close(&a.add(&a.scale(C::new(-1.0, 0.0))).unwrap(), &Series::zero(12), 1e-15);
            close(&a.mul(&Series::one(12)).unwrap(), &a, 1e-15);
        }

        #[test]
        fn division_inverts_multiplication(a in random_series(15), b in random_series(15)) {
            prop_assume!(b.coeff(0).norm() > 0.5);
            let q = a.div(&b).unwrap();
            close(&q.mul(&b).unwrap(), &a, 1e-9);
        }

        #[test]
        fn integrate_inverts_derivative(a in random_series(20)) {
            let back = a.derivative().integrate();
            let mut want = a.clone();
            want.coeffs[0] = C::new(0.0, 0.0);
            close(&back, &want, 1e-14);
        }

        #[test]
        fn exp_log_round_trip(mut a in random_series(40)) {
            a.coeffs[0] = C::new(0.0, 0.0);
            let e = a.exp_series().unwrap();
            close(&e.log_series().unwrap(), &a, 1e-12);
        }

        #[test]
        fn exp_homomorphism(mut a in random_series(30), mut b in random_series(30)) {
            a.coeffs[0] = C::new(0.0, 0.0);
            b.coeffs[0] = C::new(0.0, 0.0);
            let lhs = a.add(&b).unwrap().exp_series().unwrap();
            let rhs = a.exp_series().unwrap().mul(&b.exp_series().unwrap()).unwrap();
            let scale = lhs.coeffs().iter().map(|c| c.norm()).fold(1.0, f64::max);
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-10 * scale);
        }
    }
}
