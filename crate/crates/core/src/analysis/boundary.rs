use num_complex::Complex;
use serde::Serialize;

use super::grid::{circle_points, singular_directions};
use crate::fieldmap::Mapping;
use crate::{is_finite_c, to_f64, Error, Real, Result};

/// One traced point `f(r e^{iθ})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub theta: f64,
    pub w: [f64; 2],
}

fn check_radius(r: f64, m: usize) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::ParameterOutOfRange(format!("trace radius {r} must lie in (0, 1)")));
    }
    if m == 0 {
        return Err(Error::ParameterOutOfRange("trace needs at least one angle".into()));
    }
    Ok(())
}

/// `f(r e^{iθ_m})` for `θ_m = 2πm/M`. Singular directions and points whose
/// value overflows are left out.
pub fn boundary_trace<T: Real, M: Mapping<T> + ?Sized>(map: &M, r: f64, m: usize) -> Result<Vec<TracePoint>> {
    check_radius(r, m)?;
    let directions = singular_directions(&map.singular_points());
    let (idx, points) = circle_points::<T>(r, m, &directions);
    Ok(idx
        .into_iter()
        .zip(map.values_along(&points))
        .filter_map(|(k, v)| {
            let w = v.ok().filter(|w| is_finite_c(*w))?;
            Some(TracePoint { theta: std::f64::consts::TAU * k as f64 / m as f64, w: [to_f64(w.re), to_f64(w.im)] })
        })
        .collect())
}

/// Smallest `|f|` on the circle of radius `r`, with the angle attaining it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Covering {
    pub r: f64,
    pub angles: usize,
    pub radius: f64,
    pub theta: f64,
}

/// Minimum modulus of `f` on `|z| = r`: a lower-envelope proxy for the
/// radius of the largest disk about 0 inside the image.
pub fn covering<T: Real, M: Mapping<T> + ?Sized>(map: &M, r: f64, m: usize) -> Result<Covering> {
    let trace = boundary_trace(map, r, m)?;
    let best = trace
        .iter()
        .map(|p| (p.w[0].hypot(p.w[1]), p.theta))
        .fold(None, |acc: Option<(f64, f64)>, cur| match acc {
            Some(a) if a.0 <= cur.0 => Some(a),
            _ => Some(cur),
        })
        .ok_or_else(|| Error::Precondition("no point of the circle could be evaluated".into()))?;
    Ok(Covering { r, angles: m, radius: best.0, theta: best.1 })
}

/// [`covering`] reduced to the radius.
pub fn covering_radius<T: Real, M: Mapping<T> + ?Sized>(map: &M, r: f64, m: usize) -> Result<f64> {
    Ok(covering(map, r, m)?.radius)
}

/// Fraction of points within `tol` of `target`, and their median distance.
pub fn cluster_stats(points: &[TracePoint], target: Complex<f64>, tol: f64) -> (f64, f64) {
    if points.is_empty() {
        return (0.0, f64::INFINITY);
    }
    let mut dist: Vec<f64> = points.iter().map(|p| (Complex::new(p.w[0], p.w[1]) - target).norm()).collect();
    dist.sort_by(f64::total_cmp);
    let inside = dist.iter().filter(|d| **d < tol).count() as f64 / dist.len() as f64;
    (inside, dist[dist.len() / 2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldmap::{catalog, CatalogParams};

    fn map(name: &str) -> crate::fieldmap::CatalogEntry<f64> {
        catalog(name, &CatalogParams::default()).unwrap()
    }

    #[test]
    fn identity_covering_is_radius() {
        let id = map("identity");
        assert!((covering_radius(&id, 0.7, 64).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(boundary_trace(&id, 0.5, 16).unwrap().len(), 16);
        assert!(boundary_trace(&id, 1.0, 16).is_err());
    }

    #[test]
    fn koebe_lh_covering() {
        let f0 = map("koebe_lh");
        let c = covering(&f0, 0.99, 2048).unwrap();
        let want = 0.99 * (-4.0 * 0.99 / 1.99f64).exp();
        assert!((c.radius - want).abs() < 1e-12);
        assert!((c.theta - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn half_plane_lh_trace() {
        let f = map("half_plane_lh");
        let t = boundary_trace(&f, 0.999, 2048).unwrap();
        let min_re = t.iter().map(|p| p.w[0]).fold(f64::INFINITY, f64::min);
        assert!((min_re + 1.0 / (2.0 * std::f64::consts::E)).abs() < 1e-3);
    }
}
