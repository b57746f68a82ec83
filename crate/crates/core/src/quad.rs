//! Composite Gauss–Legendre quadrature along straight segments of the plane.
//!
//! The panel count doubles until two successive estimates agree to the
//! requested tolerance or the panel cap is hit, in which case the last two
//! estimates are returned inside [`Error::QuadratureFailure`].

use num_complex::Complex;
use num_traits::Zero;

use crate::{from_usize, lit, pair, Error, Real, Result};

/// Agreement required between successive refinements.
pub const DEFAULT_TOL: f64 = 1e-11;
/// Refinement stops with an error beyond this many panels.
pub const MAX_PANELS: usize = 1 << 14;

const RULE_POINTS: usize = 10;

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Newton iteration on `P_n` from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        // compute in f64 then convert: the rule must be accurate even for f32
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self {
            nodes: nodes.into_iter().map(lit).collect(),
            weights: weights.into_iter().map(lit).collect(),
        }
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Composite rule with `panels` equal panels on the segment `[a, b]`.
    pub fn composite<F>(&self, f: &mut F, a: Complex<T>, b: Complex<T>, panels: usize) -> Result<Complex<T>>
    where
        F: FnMut(Complex<T>) -> Result<Complex<T>>,
    {
        let h = (b - a) / from_usize::<T>(panels);
        let half = h * lit::<T>(0.5);
        let mut total = Complex::<T>::zero();
        for p in 0..panels {
            let mid = a + h * (from_usize::<T>(p) + lit::<T>(0.5));
            let mut acc = Complex::<T>::zero();
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                acc = acc + f(mid + half * *x)? * *w;
            }
            total = total + acc * half;
        }
        Ok(total)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive integration of `f` along the straight segment from `a` to `b`.
#[derive(Clone, Debug)]
pub struct SegmentIntegrator<T> {
    rule: GaussLegendre<T>,
    tol: T,
    max_panels: usize,
}

impl<T: Real> Default for SegmentIntegrator<T> {
    fn default() -> Self {
        // never ask for less than a few hundred ulps
        let tol = lit::<T>(DEFAULT_TOL).max(T::epsilon() * lit(256.0));
        Self { rule: GaussLegendre::new(RULE_POINTS), tol, max_panels: MAX_PANELS }
    }
}

impl<T: Real> SegmentIntegrator<T> {
    pub fn with_tolerance(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels.max(1);
        self
    }

    pub fn tolerance(&self) -> T {
        self.tol
    }

    /// Doubles the panel count until successive estimates differ by less
    /// than `tol * max(1, |estimate|)`.
    pub fn integrate<F>(&self, mut f: F, a: Complex<T>, b: Complex<T>) -> Result<Complex<T>>
    where
        F: FnMut(Complex<T>) -> Result<Complex<T>>,
    {
        let mut panels = 1;
        let mut previous = self.rule.composite(&mut f, a, b, panels)?;
        loop {
            panels *= 2;
            let current = self.rule.composite(&mut f, a, b, panels)?;
            if (current - previous).norm() <= self.tol * current.norm().max(T::one()) {
                return Ok(current);
            }
            if panels >= self.max_panels {
                return Err(Error::QuadratureFailure { last: pair(current), previous: pair(previous) });
            }
            previous = current;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::<f64>::new(10);
        let sum: f64 = rule.weights().iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
        // degree 19 is the highest integrated exactly by 10 nodes
        let mut f = |z: C| Ok(z.powu(18) * 19.0);
        let v = rule.composite(&mut f, C::new(0.0, 0.0), C::new(1.0, 0.0), 1).unwrap();
        assert!((v.re - 1.0).abs() < 1e-13);
    }

    #[test]
    fn complex_segment() {
        // ∫_0^z e^s ds = e^z - 1 along the segment
        let z = C::new(0.4, 0.7);
        let v = SegmentIntegrator::default().integrate(|s| Ok(s.exp()), C::new(0.0, 0.0), z).unwrap();
        assert!((v - (z.exp() - 1.0)).norm() < 1e-13);
    }

    #[test]
    fn near_singularity_refines() {
        // ∫_0^0.99 ds/(1-s) = -ln(0.01)
        let v = SegmentIntegrator::default()
            .integrate(|s: C| Ok(1.0 / (1.0 - s)), C::new(0.0, 0.0), C::new(0.99, 0.0))
            .unwrap();
        assert!((v.re + 0.01f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn failure_reports_last_two_estimates() {
        let err = SegmentIntegrator::default()
            .with_max_panels(4)
            .integrate(|s: C| Ok(1.0 / (1.0 - s)), C::new(0.0, 0.0), C::new(0.999999, 0.0))
            .unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure { .. }));
    }
}
