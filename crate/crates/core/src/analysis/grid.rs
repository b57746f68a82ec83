use std::fmt;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fieldmap::{Mapping, WirtingerJet};
use crate::{lit, pair, to_f64, Error, Real, Result};

/// Angular distance below which a grid point counts as lying on a singular
/// direction.
pub const EXCLUSION: f64 = 1e-9;
/// Series-backed points whose estimated tail exceeds this are not used.
pub const MAX_TAIL: f64 = 1e-8;

/// Polar sampling grid: every radius carries `angles` equispaced angles
/// starting at `θ = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub radii: Vec<f64>,
    pub angles: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        let mut radii: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
        radii.push(0.95);
        Self { radii, angles: 720 }
    }
}

impl GridSpec {
    pub fn new(radii: Vec<f64>, angles: usize) -> Result<Self> {
        if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
            return Err(Error::ParameterOutOfRange("grid radii must lie in (0, 1)".into()));
        }
        if angles < 8 {
            return Err(Error::ParameterOutOfRange(format!("grid needs at least 8 angles, got {angles}")));
        }
        Ok(Self { radii, angles })
    }

    pub fn circle(r: f64, angles: usize) -> Result<Self> {
        Self::new(vec![r], angles)
    }

    /// The default radii not exceeding `r_max`.
    pub fn default_up_to(r_max: f64) -> Self {
        let mut g = Self::default();
        g.radii.retain(|r| *r <= r_max + 1e-12);
        g
    }

    /// Same radii, `factor` times as many angles.
    pub fn densified(&self, factor: usize) -> Self {
        Self { radii: self.radii.clone(), angles: self.angles * factor.max(1) }
    }

    pub fn theta(&self, m: usize) -> f64 {
        std::f64::consts::TAU * m as f64 / self.angles as f64
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.angles
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Directions (angles) of the declared singular points on or inside the
/// closed unit disk, excluding the origin.
pub(crate) fn singular_directions<T: Real>(singular: &[Complex<T>]) -> Vec<f64> {
    singular
        .iter()
        .map(|s| pair(*s))
        .filter(|(re, im)| {
            let m = re.hypot(*im);
            m > 1e-12 && m <= 1.0 + EXCLUSION
        })
        .map(|(re, im)| im.atan2(re))
        .collect()
}

pub(crate) fn near_direction(theta: f64, directions: &[f64]) -> bool {
    directions.iter().any(|d| {
        let diff = (theta - d).rem_euclid(std::f64::consts::TAU);
        diff.min(std::f64::consts::TAU - diff) < EXCLUSION
    })
}

/// Points `r e^{iθ_m}` with the singular directions removed, together with
/// their angle indices.
pub(crate) fn circle_points<T: Real>(r: f64, angles: usize, directions: &[f64]) -> (Vec<usize>, Vec<Complex<T>>) {
    (0..angles)
        .filter_map(|m| {
            let t = std::f64::consts::TAU * m as f64 / angles as f64;
            (!near_direction(t, directions)).then(|| (m, Complex::new(lit(r * t.cos()), lit(r * t.sin()))))
        })
        .unzip()
}

/// A grid point with the scanned quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Sample {
    pub index: (usize, usize),
    pub z: [f64; 2],
    pub value: f64,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Scan {
    pub min: Option<Sample>,
    pub max: Option<Sample>,
    pub evaluated: usize,
    pub degenerate: usize,
    pub unreliable: usize,
    pub skipped: usize,
}

impl Scan {
    fn push(&mut self, s: Sample) {
        self.evaluated += 1;
        // strict comparisons keep the first extremum in grid order
        if self.min.is_none_or(|m| s.value < m.value) {
            self.min = Some(s);
        }
        if self.max.is_none_or(|m| s.value > m.value) {
            self.max = Some(s);
        }
    }

    fn merge(mut self, other: Scan) -> Scan {
        self.degenerate += other.degenerate;
        self.unreliable += other.unreliable;
        self.skipped += other.skipped;
        self.evaluated += other.evaluated;
        if let Some(m) = other.min {
            if self.min.is_none_or(|c| m.value < c.value) {
                self.min = Some(m);
            }
        }
        if let Some(m) = other.max {
            if self.max.is_none_or(|c| m.value > c.value) {
                self.max = Some(m);
            }
        }
        self
    }
}

/// Evaluates `quantity` on every grid point. `Ok(None)` and errors mark a
/// degenerate point. Radii are scanned in parallel; the reduction runs in
/// grid order, so the result does not depend on the thread count.
pub(crate) fn scan<T, M, F>(map: &M, grid: &GridSpec, quantity: F) -> Scan
where
    T: Real,
    M: Mapping<T> + ?Sized,
    F: Fn(&WirtingerJet<T>) -> Result<Option<T>> + Sync,
{
    let directions = singular_directions(&map.singular_points());
    let per_radius: Vec<Scan> = grid
        .radii
        .par_iter()
        .enumerate()
        .map(|(ri, &r)| {
            let (idx, points) = circle_points::<T>(r, grid.angles, &directions);
            let mut acc = Scan { skipped: grid.angles - idx.len(), ..Default::default() };
            for ((m, z), jet) in idx.into_iter().zip(&points).zip(map.jets_along(&points)) {
                if to_f64(map.tail_estimate(*z)) > MAX_TAIL {
                    acc.unreliable += 1;
                    continue;
                }
                match jet.and_then(|j| quantity(&j)) {
                    Ok(Some(v)) if v.is_finite() => acc.push(Sample { index: (ri, m), z: pair(*z).into(), value: to_f64(v) }),
                    _ => acc.degenerate += 1,
                }
            }
            acc
        })
        .collect();
    per_radius.into_iter().fold(Scan::default(), Scan::merge)
}

/// Extremes of a scanned quantity over a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub quantity: String,
    /// Subtracted from the raw quantity before taking extremes.
    pub threshold: f64,
    pub min: f64,
    pub argmin: [f64; 2],
    pub max: f64,
    pub argmax: [f64; 2],
    /// `max(0, -min)`.
    pub max_violation: f64,
    pub evaluated: usize,
    pub degenerate: usize,
    pub unreliable: usize,
    pub skipped_singular: usize,
    pub grid: GridSpec,
}

impl MarginReport {
    pub(crate) fn from_scan(quantity: &str, threshold: f64, scan: Scan, grid: &GridSpec) -> Result<Self> {
        let (Some(min), Some(max)) = (scan.min, scan.max) else {
            return Err(Error::Precondition(format!("no grid point could be evaluated for {quantity}")));
        };
        Ok(Self {
            quantity: quantity.to_string(),
            threshold,
            min: min.value,
            argmin: min.z,
            max: max.value,
            argmax: max.z,
            max_violation: (-min.value).max(0.0),
            evaluated: scan.evaluated,
            degenerate: scan.degenerate,
            unreliable: scan.unreliable,
            skipped_singular: scan.skipped,
            grid: grid.clone(),
        })
    }

    /// Minimum margin no worse than `-tol`.
    pub fn passes(&self, tol: f64) -> bool {
        self.min >= -tol
    }
}

impl fmt::Display for MarginReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<18} {}", "quantity", self.quantity)?;
        writeln!(f, "{:<18} {}", "threshold", self.threshold)?;
        writeln!(f, "{:<18} {:.12e} at ({:.6}, {:.6})", "min margin", self.min, self.argmin[0], self.argmin[1])?;
        writeln!(f, "{:<18} {:.12e} at ({:.6}, {:.6})", "max margin", self.max, self.argmax[0], self.argmax[1])?;
        writeln!(f, "{:<18} {:.6e}", "max violation", self.max_violation)?;
        writeln!(
            f,
            "{:<18} {} evaluated, {} degenerate, {} unreliable, {} on singular directions",
            "points", self.evaluated, self.degenerate, self.unreliable, self.skipped_singular
        )?;
        write!(f, "{:<18} {} radii x {} angles", "grid", self.grid.radii.len(), self.grid.angles)
    }
}
