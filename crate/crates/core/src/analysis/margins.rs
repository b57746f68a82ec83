use num_complex::Complex;

use super::grid::{scan, GridSpec, MarginReport};
use crate::fieldmap::{catalog, CatalogParams, Mapping};
use crate::{lit, to_f64, Real, Result};

/// `Df = z f_z - conj(z) f_zb`.
pub fn d<T: Real, M: Mapping<T> + ?Sized>(map: &M, z: Complex<T>) -> Result<Complex<T>> {
    Ok(map.jet(z)?.d())
}

/// `D²f`, assembled from the jet.
pub fn d2<T: Real, M: Mapping<T> + ?Sized>(map: &M, z: Complex<T>) -> Result<Complex<T>> {
    Ok(map.jet(z)?.d2())
}

fn ratio<T: Real>(num: Complex<T>, den: Complex<T>) -> Option<Complex<T>> {
    (den.norm() != T::zero()).then(|| num / den)
}

/// `min Re(Df/f) - α` over the grid.
pub fn starlike_margin<T: Real, M: Mapping<T> + ?Sized>(map: &M, grid: &GridSpec, alpha: f64) -> Result<MarginReport> {
    let a: T = lit(alpha);
    let s = scan(map, grid, |j| Ok(ratio(j.d(), j.f).map(|q| q.re - a)));
    MarginReport::from_scan("starlike", alpha, s, grid)
}

/// `min Re(D²f/Df) - α` over the grid.
pub fn convex_margin<T: Real, M: Mapping<T> + ?Sized>(map: &M, grid: &GridSpec, alpha: f64) -> Result<MarginReport> {
    let a: T = lit(alpha);
    let s = scan(map, grid, |j| Ok(ratio(j.d2(), j.d()).map(|q| q.re - a)));
    MarginReport::from_scan("convex", alpha, s, grid)
}

/// `min (|f_z|² - |f_zb|²)` over the grid.
pub fn jacobian_margin<T: Real, M: Mapping<T> + ?Sized>(map: &M, grid: &GridSpec) -> Result<MarginReport> {
    let s = scan(map, grid, |j| Ok(Some(j.jacobian())));
    MarginReport::from_scan("jacobian", 0.0, s, grid)
}

/// `Re(D²f/Df)` at `r e^{iθ}`.
pub fn v_value<T: Real, M: Mapping<T> + ?Sized>(map: &M, r: f64, theta: f64) -> Result<f64> {
    let z = Complex::new(lit(r * theta.cos()), lit(r * theta.sin()));
    let j = map.jet(z)?;
    Ok(to_f64((j.d2() / j.d()).re))
}

/// `V(r, θ)` of the starlike non-convex catalog map.
pub fn counterexample_v(r: f64, theta: f64) -> Result<f64> {
    let m = catalog::<f64>("counterexample", &CatalogParams::default())?;
    v_value(&m, r, theta)
}

/// The `(r, θ)` reference points at which `V` is tabulated.
pub const TABLE1_POINTS: [(f64, f64); 3] = [
    (8.0 / 9.0, std::f64::consts::FRAC_PI_4),
    (8.0 / 9.0, std::f64::consts::FRAC_PI_3),
    (8.0 / 9.0, 2.0 * std::f64::consts::FRAC_PI_3),
];

/// `(r, θ, V)` rows for [`TABLE1_POINTS`].
pub fn table1() -> Result<Vec<(f64, f64, f64)>> {
    TABLE1_POINTS.iter().map(|&(r, t)| Ok((r, t, counterexample_v(r, t)?))).collect()
}

/// Which operator identity [`identity_check`] compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityKind {
    /// `Re(Df/f) = Re(Dφ/φ)`, for `f = φ |g|²`.
    Starlike,
    /// `D²f/Df = D²φ/Dφ` as complex numbers, for `f = φ |z|^{2(p-1)}`.
    Convex,
}

/// Deviation between `map` and `companion` in the chosen identity; the
/// report's `max` is the largest deviation over the grid.
pub fn identity_check<T, M, C>(map: &M, companion: &C, kind: IdentityKind, grid: &GridSpec) -> Result<MarginReport>
where
    T: Real,
    M: Mapping<T> + ?Sized,
    C: Mapping<T> + ?Sized,
{
    let s = scan(map, grid, |j| {
        let c = companion.jet(j.z)?;
        Ok(match kind {
            IdentityKind::Starlike => {
                ratio(j.d(), j.f).zip(ratio(c.d(), c.f)).map(|(a, b)| (a.re - b.re).abs())
            }
            IdentityKind::Convex => ratio(j.d2(), j.d()).zip(ratio(c.d2(), c.d())).map(|(a, b)| (a - b).norm()),
        })
    });
    let name = match kind {
        IdentityKind::Starlike => "identity Re(Df/f) = Re(Dphi/phi)",
        IdentityKind::Convex => "identity D2f/Df = D2phi/Dphi",
    };
    MarginReport::from_scan(name, 0.0, s, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldmap::{AnalyticMap, CatalogEntry};

    type C = Complex<f64>;

    fn map(name: &str, alpha: f64) -> CatalogEntry<f64> {
        catalog(name, &CatalogParams { alpha, ..Default::default() }).unwrap()
    }

    #[test]
    fn operators_on_analytic_maps() {
        let k = map("koebe", 0.0);
        let z = C::new(0.3, 0.4);
        let f1 = (1.0 + z) / (1.0 - z).powi(3);
        let f2 = (4.0 + 2.0 * z) / (1.0 - z).powi(4);
        assert!((d(&k, z).unwrap() - z * f1).norm() < 1e-13);
        assert!((d2(&k, z).unwrap() - (z * f1 + z * z * f2)).norm() < 1e-12);
        let lam = map("lambda", 0.0);
        assert!((d(&lam, z).unwrap() - z).norm() < 1e-15);
        assert!((d2(&lam, z).unwrap() - z).norm() < 1e-15);
    }

    #[test]
    fn identity_map_margins() {
        let id = map("identity", 0.0);
        let g = GridSpec::new(vec![0.3, 0.7], 32).unwrap();
        let s = starlike_margin(&id, &g, 0.25).unwrap();
        assert!((s.min - 0.75).abs() < 1e-15 && (s.max - 0.75).abs() < 1e-15);
        assert_eq!(s.evaluated, 64);
    }

    #[test]
    fn koebe_lh_starlike_minimum_on_circles() {
        let f0 = map("koebe_lh", 0.0);
        for r in [0.5, 0.8] {
            let s = starlike_margin(&f0, &GridSpec::circle(r, 720).unwrap(), 0.0).unwrap();
            assert!((s.min - (1.0 - r) / (1.0 + r)).abs() < 1e-9);
            assert_eq!(s.skipped_singular, 1);
        }
    }

    #[test]
    fn convex_margin_of_analytic_matches_direct_formula() {
        let hp = map("half_plane", 0.0);
        let g = GridSpec::new(vec![0.2, 0.6, 0.9], 90).unwrap();
        let c = convex_margin(&hp, &g, 0.0).unwrap();
        // 1 + z φ''/φ' = (1 + z)/(1 - z) for φ = z/(1 - z)
        let direct = g
            .radii
            .iter()
            .flat_map(|&r| (0..90).map(move |m| C::from_polar(r, std::f64::consts::TAU * m as f64 / 90.0)))
            .filter(|z| z.im.abs() > 1e-12 || z.re < 0.0)
            .map(|z| ((1.0 + z) / (1.0 - z)).re)
            .fold(f64::INFINITY, f64::min);
        assert!((c.min - direct).abs() < 1e-10);
        assert!(c.min > 0.0);
    }

    #[test]
    fn lambda_jacobian_bound() {
        let lam = map("lambda", 0.0);
        let j = jacobian_margin(&lam, &GridSpec::default()).unwrap();
        assert!(j.min >= 0.5);
        let c = convex_margin(&lam, &GridSpec::default(), 0.0).unwrap();
        assert!((c.min - 1.0).abs() < 1e-12 && (c.max - 1.0).abs() < 1e-12);
    }

    #[test]
    fn counterexample_is_not_convex() {
        let ce = map("counterexample", 0.0);
        let c = convex_margin(&ce, &GridSpec::circle(8.0 / 9.0, 720).unwrap(), 0.0).unwrap();
        assert!(c.min < 0.0);
    }

    #[test]
    fn identity_checks_hold() {
        let ce = map("counterexample", 0.0);
        let phi = AnalyticMap::new(ce.as_log_harmonic().unwrap().associated_phi(), "phi");
        let grid = GridSpec::default_up_to(0.9);
        let r = identity_check(&ce, &phi, IdentityKind::Starlike, &grid).unwrap();
        assert!(r.max < 1e-9, "{}", r.max);
        let f = catalog::<f64>("lambda", &CatalogParams { p: 2, ..Default::default() }).unwrap();
        let phi = map("lambda", 0.0);
        let r = identity_check(&f, &phi, IdentityKind::Convex, &grid).unwrap();
        assert!(r.max < 1e-10, "{}", r.max);
    }

    #[test]
    fn reports_are_deterministic() {
        let f0 = map("counterexample", 0.0);
        let g = GridSpec::default();
        assert_eq!(starlike_margin(&f0, &g, 0.0).unwrap(), starlike_margin(&f0, &g, 0.0).unwrap());
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = single.install(|| convex_margin(&f0, &g, 0.0).unwrap());
        assert_eq!(serial, convex_margin(&f0, &g, 0.0).unwrap());
    }
}
