use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::grid::{circle_points, singular_directions, GridSpec, MarginReport};
use super::margins::starlike_margin;
use crate::fieldmap::{LogHarmonicMap, Mapping};
use crate::shear::ClhMap;
use crate::{lit, pair, to_f64, Real, Result};

/// Slack allowed above 1 before a coefficient ratio fails.
pub const COEFF_TOL: f64 = 1e-8;

/// Per-`n` ratios `n |a_n - b_n| / (2(1-α))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoeffCertificate {
    pub alpha: f64,
    pub order: usize,
    pub ratios: Vec<f64>,
    pub max: f64,
    pub argmax: usize,
    pub passes: bool,
}

/// Checks `|a_n - b_n| ≤ 2(1-α)/n` for `n = 1..=order`.
pub fn coeff_certificate<T: Real>(map: &LogHarmonicMap<T>, alpha: f64, order: usize) -> Result<CoeffCertificate> {
    let (a, b) = map.coeffs(order)?;
    Ok(certificate_from(&a, &b, alpha))
}

pub(crate) fn certificate_from<T: Real>(a: &[Complex<T>], b: &[Complex<T>], alpha: f64) -> CoeffCertificate {
    let ratios: Vec<f64> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (a, b))| (i + 1) as f64 * to_f64((a - b).norm()) / (2.0 * (1.0 - alpha)))
        .collect();
    let (argmax, max) = ratios
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &r)| if r > acc.1 { (i + 1, r) } else { acc });
    CoeffCertificate { alpha, order: ratios.len(), passes: max <= 1.0 + COEFF_TOL, max, argmax, ratios }
}

/// Outcome of the sufficient coefficient condition `Σ n |a_n - b_n| ≤ 1 - α`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SufficientReport {
    pub sum: f64,
    pub holds: bool,
    /// Starlike margin of the built map, when requested and the condition holds.
    pub margin: Option<MarginReport>,
}

/// Evaluates the condition and, when it holds and a grid is given, measures
/// the starlike margin of `z exp(Σ a_n z^n) conj(exp(Σ b_n z^n))`.
pub fn sufficient_starlike<T: Real>(
    a: &[Complex<T>],
    b: &[Complex<T>],
    alpha: f64,
    grid: Option<&GridSpec>,
) -> Result<SufficientReport> {
    let n = a.len().max(b.len());
    let at = |c: &[Complex<T>], k: usize| c.get(k).copied().unwrap_or_default();
    let sum: f64 = (0..n).map(|k| (k + 1) as f64 * to_f64((at(a, k) - at(b, k)).norm())).sum();
    let holds = sum <= 1.0 - alpha;
    let margin = match (holds, grid) {
        (true, Some(g)) => Some(starlike_margin(&LogHarmonicMap::from_log_coeffs(a, b, "sufficient")?, g, alpha)?),
        _ => None,
    };
    Ok(SufficientReport { sum, holds, margin })
}

/// Names of the six growth and distortion quantities, in report order.
pub const BOUND_NAMES: [&str; 6] = ["|h|", "|g|", "|f|", "|f_z|", "|f_zb|", "|Df|"];

/// Right-hand sides of the six bounds at `|z| = r`.
pub fn clh_bounds(r: f64) -> [f64; 6] {
    let e1 = (r / (1.0 - r)).exp();
    let e2 = e1 * e1;
    let c3 = (1.0 - r).powi(3);
    [e1 / (1.0 - r), e1, r / (1.0 - r) * e2, e2 / c3, r * e2 / c3, r * (1.0 + r) * e2 / c3]
}

/// Relative margins `1 - measured/bound` of the six quantities at `z`.
pub fn clh_margins_at<T: Real>(map: &ClhMap<T>, z: Complex<T>) -> Result<[f64; 6]> {
    let jets = map.map().hg_jets_along(&[z]);
    let (h, g) = jets.into_iter().next().expect("one point")?;
    Ok(margins_from(z, h, g))
}

fn margins_from<T: Real>(z: Complex<T>, h: crate::fieldmap::AnalyticJet<T>, g: crate::fieldmap::AnalyticJet<T>) -> [f64; 6] {
    let j = LogHarmonicMap::combine(z, h, g);
    let measured = [h.value.norm(), g.value.norm(), j.f.norm(), j.f_z.norm(), j.f_zb.norm(), j.d().norm()];
    let bounds = clh_bounds(to_f64(z.norm()));
    let mut out = [0.0; 6];
    for k in 0..6 {
        out[k] = 1.0 - to_f64(measured[k]) / bounds[k];
    }
    out
}

/// Smallest relative margin of one bound over the grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundItem {
    pub name: String,
    pub min_margin: f64,
    pub argmin: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub items: Vec<BoundItem>,
    pub evaluated: usize,
    pub degenerate: usize,
    pub grid: GridSpec,
}

impl GrowthReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.items.iter().all(|i| i.min_margin >= -tol)
    }

    pub fn worst(&self) -> f64 {
        self.items.iter().map(|i| i.min_margin).fold(f64::INFINITY, f64::min)
    }
}

/// The growth and distortion bounds of the class with associated function
/// `z/(1-z)`, checked on `grid`. Margins are relative: `1 - measured/bound`.
pub fn growth_distortion_certificate<T: Real>(map: &ClhMap<T>, grid: &GridSpec) -> Result<GrowthReport> {
    let directions = singular_directions(&map.singular_points());
    type Best = [Option<(f64, [f64; 2])>; 6];
    let per_radius: Vec<(Best, usize, usize)> = grid
        .radii
        .par_iter()
        .map(|&r| {
            let (_, points) = circle_points::<T>(r, grid.angles, &directions);
            let mut best: Best = [None; 6];
            let (mut ok, mut bad) = (0, 0);
            for (z, hg) in points.iter().zip(map.map().hg_jets_along(&points)) {
                let Ok((h, g)) = hg else {
                    bad += 1;
                    continue;
                };
                let m = margins_from(*z, h, g);
                if m.iter().any(|v| !v.is_finite()) {
                    bad += 1;
                    continue;
                }
                ok += 1;
                for k in 0..6 {
                    if best[k].is_none_or(|b| m[k] < b.0) {
                        best[k] = Some((m[k], pair(*z).into()));
                    }
                }
            }
            (best, ok, bad)
        })
        .collect();
    let mut best: Best = [None; 6];
    let (mut evaluated, mut degenerate) = (0, 0);
    for (b, ok, bad) in per_radius {
        evaluated += ok;
        degenerate += bad;
        for k in 0..6 {
            if let Some(c) = b[k] {
                if best[k].is_none_or(|cur| c.0 < cur.0) {
                    best[k] = Some(c);
                }
            }
        }
    }
    let items = BOUND_NAMES
        .iter()
        .zip(best)
        .map(|(name, b)| {
            let (min_margin, argmin) = b.unwrap_or((f64::NAN, [f64::NAN; 2]));
            BoundItem { name: name.to_string(), min_margin, argmin }
        })
        .collect();
    Ok(GrowthReport { items, evaluated, degenerate, grid: grid.clone() })
}

/// Relative margins at the real points `z = r` for each grid radius.
pub fn clh_margins_on_real_axis<T: Real>(map: &ClhMap<T>, radii: &[f64]) -> Result<Vec<(f64, [f64; 6])>> {
    radii.iter().map(|&r| Ok((r, clh_margins_at(map, Complex::new(lit(r), T::zero()))?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldmap::{catalog, AnalyticFn, CatalogParams};
    use crate::shear::{construct_clh, parse_dilatation};

    type C = Complex<f64>;

    #[test]
    fn f_alpha_is_extremal_for_coefficients() {
        for alpha in [0.0, 0.25, 0.5, 0.75] {
            let m = catalog::<f64>("f_alpha", &CatalogParams { alpha, ..Default::default() }).unwrap();
            let c = coeff_certificate(m.as_log_harmonic().unwrap(), alpha, 20).unwrap();
            assert!(c.ratios.iter().all(|r| (r - 1.0).abs() < 1e-10), "{alpha}: {:?}", c.ratios);
            assert!(c.passes);
        }
    }

    #[test]
    fn sufficient_condition_examples() {
        let one = [C::new(1.0, 0.0)];
        let r = sufficient_starlike(&one, &[], 0.0, Some(&GridSpec::default())).unwrap();
        assert!(r.holds && (r.sum - 1.0).abs() < 1e-15);
        assert!(r.margin.unwrap().min >= -1e-6);
        let a = [C::new(0.3, 0.2), C::new(-0.4, 0.0)];
        let r = sufficient_starlike(&a, &a, 0.5, Some(&GridSpec::default())).unwrap();
        let m = r.margin.unwrap();
        assert!((m.min - 0.5).abs() < 1e-12 && (m.max - 0.5).abs() < 1e-12);
        let r = sufficient_starlike(&[C::new(1.1, 0.0)], &[], 0.0, None).unwrap();
        assert!(!r.holds && r.margin.is_none());
    }

    #[test]
    fn identity_dilatation_is_extremal_on_the_real_axis() {
        let f = construct_clh(&AnalyticFn::<f64>::identity(), 20).unwrap();
        for (r, m) in clh_margins_on_real_axis(&f, &[0.3, 0.6, 0.9]).unwrap() {
            for k in 0..5 {
                assert!(m[k].abs() < 1e-9, "{} at {r}: {}", BOUND_NAMES[k], m[k]);
            }
            // |Df| = r(1 - r)/(1 - r)^3 e^{2r/(1-r)} on the real axis
            assert!((m[5] - (1.0 - (1.0 - r) / (1.0 + r))).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_dilatation_growth_is_strict() {
        let f = construct_clh(&parse_dilatation::<f64>("0").unwrap(), 8).unwrap();
        let rep = growth_distortion_certificate(&f, &GridSpec::default()).unwrap();
        assert!(rep.passes(1e-8));
        assert!(rep.items[2].min_margin > 0.0);
        assert_eq!(rep.degenerate, 0);
    }
}
