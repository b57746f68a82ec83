use num_complex::Complex;
use num_traits::One;

use super::maps::single;
use super::{AnalyticFn, AnalyticMap, Factor, LogHarmonicMap, Mapping, PolyZZbarMap, WirtingerJet};
use crate::{lit, Error, Real, Result};

/// Names understood by [`catalog`], with a one-line description.
pub const CATALOG_NAMES: &[(&str, &str)] = &[
    ("f_alpha", "log-harmonic starlike map of order alpha, phi = z/(1-z)^(2(1-alpha))"),
    ("koebe_lh", "log-harmonic Koebe map (f_alpha with alpha = 0)"),
    ("half_plane_lh", "log-harmonic right half-plane map (f_alpha with alpha = 1/2)"),
    ("two_slits_lh", "log-harmonic two-slits map, phi = z/(1-z^2), mu = z^2"),
    ("counterexample", "starlike but non-convex map with phi = z/(1-z)"),
    ("lambda", "polynomial map (z - lambda |z|^2) |z|^(2(p-1))"),
    ("koebe", "analytic Koebe function z/(1-z)^2"),
    ("koebe_order", "analytic z/(1-z)^(2(1-alpha))"),
    ("half_plane", "analytic half-plane map z/(1-z)"),
    ("two_slits", "analytic two-slits map z/(1-z^2)"),
    ("identity", "the identity map"),
];

/// Parameters of the catalog families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatalogParams {
    pub alpha: f64,
    pub lambda: Complex<f64>,
    pub p: u32,
}

impl Default for CatalogParams {
    fn default() -> Self {
        Self { alpha: 0.0, lambda: Complex::new(0.25, 0.0), p: 1 }
    }
}

/// A named map from the catalog.
#[derive(Clone, Debug)]
pub enum CatalogEntry<T: Real> {
    LogHarmonic(LogHarmonicMap<T>),
    Poly(PolyZZbarMap<T>),
    Analytic(AnalyticMap<T>),
}

impl<T: Real> CatalogEntry<T> {
    pub fn as_log_harmonic(&self) -> Option<&LogHarmonicMap<T>> {
        match self {
            CatalogEntry::LogHarmonic(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_analytic(&self) -> Option<&AnalyticFn<T>> {
        match self {
            CatalogEntry::Analytic(m) => Some(m.function()),
            _ => None,
        }
    }

    pub fn as_poly(&self) -> Option<&PolyZZbarMap<T>> {
        match self {
            CatalogEntry::Poly(m) => Some(m),
            _ => None,
        }
    }

    fn inner(&self) -> &dyn Mapping<T> {
        match self {
            CatalogEntry::LogHarmonic(m) => m,
            CatalogEntry::Poly(m) => m,
            CatalogEntry::Analytic(m) => m,
        }
    }
}

impl<T: Real> Mapping<T> for CatalogEntry<T> {
    fn label(&self) -> String {
        self.inner().label()
    }

    fn value(&self, z: Complex<T>) -> Result<Complex<T>> {
        self.inner().value(z)
    }

    fn jet(&self, z: Complex<T>) -> Result<WirtingerJet<T>> {
        self.inner().jet(z)
    }

    fn singular_points(&self) -> Vec<Complex<T>> {
        self.inner().singular_points()
    }

    fn tail_estimate(&self, z: Complex<T>) -> T {
        self.inner().tail_estimate(z)
    }

    fn jets_along(&self, points: &[Complex<T>]) -> Vec<Result<WirtingerJet<T>>> {
        self.inner().jets_along(points)
    }

    fn values_along(&self, points: &[Complex<T>]) -> Vec<Result<Complex<T>>> {
        self.inner().values_along(points)
    }
}

fn real<T: Real>(x: f64) -> Complex<T> {
    Complex::new(lit(x), T::zero())
}

/// `(1 - node z^power)^exponent`, dropped when the exponent vanishes.
fn binomial<T: Real>(node: f64, power: u32, exponent: f64) -> Option<Factor<T>> {
    (exponent != 0.0).then(|| Factor::Binomial { node: real(node), power, exponent: lit(exponent) })
}

fn exp_rational<T: Real>(coef: f64, node: f64, power: u32) -> Option<Factor<T>> {
    (coef != 0.0).then(|| Factor::ExpRational { coef: real(coef), node: real(node), power })
}

fn product<T: Real>(factors: impl IntoIterator<Item = Option<Factor<T>>>) -> AnalyticFn<T> {
    let f: Vec<Factor<T>> = factors.into_iter().flatten().collect();
    if f.is_empty() {
        AnalyticFn::constant(Complex::<T>::one())
    } else {
        AnalyticFn::new(f)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange(format!("alpha = {alpha} must lie in [0, 1)")))
    }
}

/// `h` and `g` of the order-`alpha` family.
fn f_alpha<T: Real>(alpha: f64) -> Result<LogHarmonicMap<T>> {
    check_alpha(alpha)?;
    let c = 2.0 * (1.0 - alpha);
    let h = product([binomial(1.0, 1, -1.0), exp_rational(c, 1.0, 1)]);
    let g = product([binomial(1.0, 1, 1.0 - 2.0 * alpha), exp_rational(c, 1.0, 1)]);
    LogHarmonicMap::new(h, g, format!("f_alpha({alpha})"))
}

fn two_slits_lh<T: Real>() -> Result<LogHarmonicMap<T>> {
    let h = product([binomial(1.0, 2, -0.5), exp_rational(1.0, 1.0, 2)]);
    let g = product([binomial(1.0, 2, 0.5), exp_rational(1.0, 1.0, 2)]);
    LogHarmonicMap::new(h, g, "two_slits_lh")
}

fn counterexample<T: Real>() -> Result<LogHarmonicMap<T>> {
    // ((1-z)/(1+z))^{1/4} splits into principal powers because both bases
    // have positive real part on the disk
    let g = product([binomial(1.0, 1, 0.25), binomial(-1.0, 1, -0.25), exp_rational(0.5, 1.0, 1)]);
    let h = g.mul(&product([binomial(1.0, 1, -1.0)]));
    LogHarmonicMap::new(h, g, "counterexample")
}

/// `z (1 - z^power)^exponent`.
fn analytic<T: Real>(power: u32, exponent: f64) -> AnalyticFn<T> {
    let mut f = vec![Factor::Monomial(1)];
    f.extend(binomial(1.0, power, exponent));
    AnalyticFn::new(f)
}

/// Builds a named map.
pub fn catalog<T: Real>(name: &str, params: &CatalogParams) -> Result<CatalogEntry<T>> {
    let lh = CatalogEntry::LogHarmonic;
    let an = |f: AnalyticFn<T>, label: &str| Ok(CatalogEntry::Analytic(AnalyticMap::new(f, label)));
    match name {
        "f_alpha" => Ok(lh(f_alpha(params.alpha)?)),
        "koebe_lh" => Ok(lh(f_alpha(0.0)?.with_label("koebe_lh"))),
        "half_plane_lh" => Ok(lh(f_alpha(0.5)?.with_label("half_plane_lh"))),
        "two_slits_lh" => Ok(lh(two_slits_lh()?)),
        "counterexample" => Ok(lh(counterexample()?)),
        "lambda" => {
            let l = params.lambda;
            if !(l.norm() > 0.0 && l.norm() < 0.5) {
                return Err(Error::ParameterOutOfRange(format!("|lambda| = {} must lie in (0, 1/2)", l.norm())));
            }
            if params.p < 1 {
                return Err(Error::ParameterOutOfRange("p must be at least 1".into()));
            }
            let m = PolyZZbarMap::lambda_map(Complex::new(lit(l.re), lit(l.im)));
            Ok(CatalogEntry::Poly(m.times_abs_power(params.p).with_label(format!("lambda(p={})", params.p))))
        }
        "koebe" => an(analytic(1, -2.0), "koebe"),
        "koebe_order" => {
            check_alpha(params.alpha)?;
            an(analytic(1, -2.0 * (1.0 - params.alpha)), &format!("koebe_order({})", params.alpha))
        }
        "half_plane" => an(analytic(1, -1.0), "half_plane"),
        "two_slits" => an(analytic(2, -1.0), "two_slits"),
        "identity" => an(single(Factor::Monomial(1)), "identity"),
        other => Err(Error::UnknownMap(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn lh(name: &str, alpha: f64) -> LogHarmonicMap<f64> {
        let p = CatalogParams { alpha, ..Default::default() };
        catalog::<f64>(name, &p).unwrap().as_log_harmonic().unwrap().clone()
    }

    #[test]
    fn family_special_cases() {
        let z = C::new(0.35, -0.25);
        let k = lh("koebe_lh", 0.0);
        let f0 = lh("f_alpha", 0.0);
        assert_eq!(k.value(z).unwrap(), f0.value(z).unwrap());
        let half = lh("f_alpha", 0.5);
        let phi = half.associated_phi().value(z).unwrap();
        assert!((phi - z / (1.0 - z)).norm() < 1e-15);
        let ls = lh("two_slits_lh", 0.0);
        assert!((ls.associated_phi().value(z).unwrap() - z / (1.0 - z * z)).norm() < 1e-15);
        assert!((ls.dilatation(z).unwrap() - z * z).norm() < 1e-14);
    }

    #[test]
    fn catalog_coefficients() {
        let (a, b) = lh("half_plane_lh", 0.0).coeffs(10).unwrap();
        for n in 1..=10 {
            assert!((b[n - 1] - 1.0).norm() < 1e-13);
            assert!((a[n - 1] - (1.0 + 1.0 / n as f64)).norm() < 1e-13);
        }
        let (a, b) = lh("koebe_lh", 0.0).coeffs(10).unwrap();
        for n in 1..=10 {
            assert!((a[n - 1] - (2.0 + 1.0 / n as f64)).norm() < 1e-12);
            assert!((b[n - 1] - (2.0 - 1.0 / n as f64)).norm() < 1e-12);
        }
        let (a, b) = lh("two_slits_lh", 0.0).coeffs(10).unwrap();
        for n in 1..=10 {
            let (wa, wb) = if n % 2 == 0 {
                let m = (n / 2) as f64;
                (1.0 + 1.0 / (2.0 * m), 1.0 - 1.0 / (2.0 * m))
            } else {
                (0.0, 0.0)
            };
            assert!((a[n - 1] - wa).norm() < 1e-13 && (b[n - 1] - wb).norm() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn counterexample_branch() {
        let m = lh("counterexample", 0.0);
        assert!((m.g().value(C::new(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        let z = C::new(-0.3, 0.6);
        let want = ((1.0 - z) / (1.0 + z)).powf(0.25) * (z / (2.0 * (1.0 - z))).exp();
        assert!((m.g().value(z).unwrap() - want).norm() < 1e-14);
        assert!((m.associated_phi().value(z).unwrap() - z / (1.0 - z)).norm() < 1e-14);
    }

    #[test]
    fn closed_form_matches_taylor_inside() {
        for name in ["koebe_lh", "half_plane_lh", "two_slits_lh", "counterexample", "f_alpha"] {
            let m = lh(name, 0.25);
            let h = m.h().taylor(200).unwrap();
            let g = m.g().taylor(200).unwrap();
            for z in [C::new(0.5, 0.2), C::new(-0.1, -0.6), C::from_polar(0.7, 2.0)] {
                let series = z * h.eval(z) * g.eval(z).conj();
                let tol = 1e-9f64.max(h.tail_estimate(0.7) * 10.0);
                assert!((series - m.value(z).unwrap()).norm() < tol, "{name} at {z}");
            }
        }
    }

    #[test]
    fn parameter_checks() {
        let bad_alpha = CatalogParams { alpha: 1.0, ..Default::default() };
        assert!(matches!(catalog::<f64>("f_alpha", &bad_alpha), Err(Error::ParameterOutOfRange(_))));
        let bad_lambda = CatalogParams { lambda: C::new(0.5, 0.0), ..Default::default() };
        assert!(matches!(catalog::<f64>("lambda", &bad_lambda), Err(Error::ParameterOutOfRange(_))));
        let bad_p = CatalogParams { p: 0, ..Default::default() };
        assert!(matches!(catalog::<f64>("lambda", &bad_p), Err(Error::ParameterOutOfRange(_))));
        assert!(matches!(catalog::<f64>("nope", &CatalogParams::default()), Err(Error::UnknownMap(_))));
    }

    #[test]
    fn every_name_builds() {
        for (name, _) in CATALOG_NAMES {
            let m = catalog::<f64>(name, &CatalogParams::default()).unwrap();
            assert!(m.value(C::new(0.2, 0.1)).unwrap().norm() > 0.0);
        }
        let f32map = catalog::<f32>("koebe_lh", &CatalogParams::default()).unwrap();
        let j = f32map.jet(Complex::new(0.5f32, 0.0)).unwrap();
        assert!(((j.d() / j.f).re - 3.0).abs() < 1e-4);
    }
}
