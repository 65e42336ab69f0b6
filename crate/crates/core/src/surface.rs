//! The real surface F(x, y, z) = (y² + z²)² − 4x⁴z² = 0.
//!
//! Its slice x = a is a pair of circles of radius a² in the (y, z) plane,
//! centred at (0, ±a²) and touching at the origin of the slice. The whole
//! x-axis is singular, and every point satisfies √(y² + z²) ≤ 2x², so a C¹
//! curve leaving the origin inside the surface is tangent to the x-axis.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::rng_from_seed;
use crate::report::{digest_inputs, TrialRecord, VerificationReport};

/// Slack in the tangent-cone bound.
pub const CONE_SLACK: f64 = 1e-9;

/// Relative residual allowed for parametrized points.
pub const SURFACE_TOL: f64 = 1e-12;

pub fn surface_f(x: f64, y: f64, z: f64) -> f64 {
    let r2 = y * y + z * z;
    r2 * r2 - 4.0 * x.powi(4) * z * z
}

pub fn gradient(x: f64, y: f64, z: f64) -> [f64; 3] {
    let r2 = y * y + z * z;
    [
        -16.0 * x.powi(3) * z * z,
        4.0 * y * r2,
        4.0 * z * r2 - 8.0 * x.powi(4) * z,
    ]
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// |F(x, y, z)|.
    pub residual: f64,
}

impl SurfacePoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        SurfacePoint {
            x,
            y,
            z,
            residual: surface_f(x, y, z).abs(),
        }
    }

    /// (a, a² sin φ, ±a²(1 + cos φ)); `upper` picks the + sign.
    pub fn on_circle(a: f64, phi: f64, upper: bool) -> Self {
        let (s, c) = phi.sin_cos();
        let a2 = a * a;
        let z = a2 * (1.0 + c);
        SurfacePoint::new(a, a2 * s, if upper { z } else { -z })
    }

    pub fn gradient(&self) -> [f64; 3] {
        gradient(self.x, self.y, self.z)
    }

    pub fn grad_norm(&self) -> f64 {
        norm3(self.gradient())
    }

    /// Residual threshold for this point; F has degree 8.
    pub fn residual_limit(&self) -> f64 {
        SURFACE_TOL * self.x.powi(8).max(1.0)
    }

    /// Whether the point is outside the band |z| < x²/100 around the circles'
    /// touching point, where the gradient degenerates.
    pub fn off_band(&self) -> bool {
        self.z.abs() >= self.x * self.x / 100.0
    }
}

/// Where and how many surface points to draw.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceSampler {
    pub a_min: f64,
    pub a_max: f64,
    pub count: usize,
    pub seed: u64,
    /// Replaces the first sample by the + branch point at (a, φ).
    pub forced: Option<(f64, f64)>,
}

impl SurfaceSampler {
    pub fn new(a_min: f64, a_max: f64, count: usize, seed: u64) -> Result<Self> {
        if !(a_max > 0.0) || !(a_min >= 0.0) || !(a_min <= a_max) || !a_max.is_finite() {
            return Err(Error::InvalidInput(format!(
                "a-range [{a_min}, {a_max}] must be a finite interval with 0 ≤ a-min ≤ a-max and a-max > 0"
            )));
        }
        if count == 0 {
            return Err(Error::InvalidInput("sample count must be at least 1".into()));
        }
        Ok(SurfaceSampler {
            a_min,
            a_max,
            count,
            seed,
            forced: None,
        })
    }

    pub fn with_forced(mut self, a: f64, phi: f64) -> Result<Self> {
        if !a.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidInput("forced (a, φ) must be finite".into()));
        }
        self.forced = Some((a, phi));
        Ok(self)
    }

    pub fn sample(&self) -> Vec<SurfacePoint> {
        let mut rng = rng_from_seed(self.seed);
        (0..self.count)
            .map(|i| {
                let a = if self.a_min == self.a_max {
                    self.a_min
                } else {
                    rng.random_range(self.a_min..self.a_max)
                };
                let phi = rng.random_range(0.0..TAU);
                let upper = rng.random_bool(0.5);
                match (i, self.forced) {
                    (0, Some((fa, fphi))) => SurfacePoint::on_circle(fa, fphi, true),
                    _ => SurfacePoint::on_circle(a, phi, upper),
                }
            })
            .collect()
    }
}

/// Draws `count` points uniformly in a ∈ [a_min, a_max], φ ∈ [0, 2π).
pub fn sample_surface(a_min: f64, a_max: f64, count: usize, seed: u64) -> Result<Vec<SurfacePoint>> {
    Ok(SurfaceSampler::new(a_min, a_max, count, seed)?.sample())
}

/// Checks √(y² + z²) ≤ 2x² + 1e−9 at every point.
pub fn tangent_cone_bound_check(points: &[SurfacePoint]) -> VerificationReport {
    const CHECK: &str = "tangent-cone-bound";
    let mut violations = 0usize;
    let mut first = None;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_residual_ratio: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        let excess = (p.y * p.y + p.z * p.z).sqrt() - 2.0 * p.x * p.x;
        worst_excess = worst_excess.max(excess);
        worst_residual_ratio = worst_residual_ratio.max(p.residual / p.residual_limit());
        if excess > CONE_SLACK {
            violations += 1;
            first.get_or_insert(i);
        }
    }
    let flat: Vec<f64> = points.iter().flat_map(|p| [p.x, p.y, p.z]).collect();
    let mut trial = TrialRecord::new(0, None, digest_inputs(&[], &flat))
        .metric("points", points.len() as f64)
        .metric("violations", violations as f64)
        .metric("worst_excess", if points.is_empty() { 0.0 } else { worst_excess })
        .metric("worst_residual_ratio", worst_residual_ratio)
        .outcome(violations == 0, worst_excess.max(0.0));
    if let Some(i) = first {
        trial = trial.note("first_violation", i.to_string());
    }
    VerificationReport::single(CHECK, trial)
}

/// Gradient at x-axis points must be at most `zero_tol`; at off-band surface
/// points it must exceed `nonzero_tol`. Points inside the band are skipped
/// and counted.
pub fn singular_locus_scan(
    axis: &[f64],
    surface: &[SurfacePoint],
    zero_tol: f64,
    nonzero_tol: f64,
) -> VerificationReport {
    const CHECK: &str = "singular-locus";
    let axis_max = axis
        .iter()
        .map(|&x| norm3(gradient(x, 0.0, 0.0)))
        .fold(0.0, f64::max);
    let mut excluded = 0usize;
    let mut off_min = f64::INFINITY;
    for p in surface {
        if p.off_band() {
            off_min = off_min.min(p.grad_norm());
        } else {
            excluded += 1;
        }
    }
    let scanned = surface.len() - excluded;
    let axis_ok = axis_max <= zero_tol;
    let off_ok = scanned == 0 || off_min > nonzero_tol;
    let mut scalars: Vec<f64> = axis.to_vec();
    scalars.extend(surface.iter().flat_map(|p| [p.x, p.y, p.z]));
    let trial = TrialRecord::new(0, None, digest_inputs(&[], &scalars))
        .metric("axis_points", axis.len() as f64)
        .metric("axis_max_grad", axis_max)
        .metric("off_band_points", scanned as f64)
        .metric("off_band_min_grad", if scanned == 0 { 0.0 } else { off_min })
        .metric("excluded_in_band", excluded as f64)
        .outcome(axis_ok && off_ok, axis_max);
    VerificationReport::single(CHECK, trial)
}

/// Surface points with a ∈ [a_min, a_max] away from the band |z| < a²/100.
pub fn off_band_points(a_min: f64, a_max: f64, count: usize, seed: u64) -> Result<Vec<SurfacePoint>> {
    let sampler = SurfaceSampler::new(a_min, a_max, count, seed)?;
    if !(a_min > 0.0) {
        return Err(Error::InvalidInput("off-band points need a-min > 0".into()));
    }
    let mut rng = rng_from_seed(sampler.seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = if a_min == a_max { a_min } else { rng.random_range(a_min..a_max) };
        let p = SurfacePoint::on_circle(a, rng.random_range(0.0..TAU), rng.random_bool(0.5));
        if p.off_band() {
            out.push(p);
        }
    }
    Ok(out)
}

/// At x = a, samples both circles away from their touching point
/// (|φ − π| > 0.5) and checks that each has radius a² about (a, 0, ±a²) and
/// that the two branches stay more than a²/10 apart.
pub fn two_circle_check(a: f64, samples: usize, seed: u64) -> VerificationReport {
    const CHECK: &str = "two-circles";
    if !(a > 0.0) || samples == 0 {
        return VerificationReport::rejected(CHECK, "need a > 0 and at least one sample");
    }
    let mut rng = rng_from_seed(seed);
    let a2 = a * a;
    let mut upper = Vec::with_capacity(samples);
    let mut lower = Vec::with_capacity(samples);
    while upper.len() < samples {
        let phi = rng.random_range(0.0..TAU);
        if (phi - PI).abs() > 0.5 {
            upper.push(SurfacePoint::on_circle(a, phi, true));
        }
        let phi = rng.random_range(0.0..TAU);
        if (phi - PI).abs() > 0.5 && lower.len() < samples {
            lower.push(SurfacePoint::on_circle(a, phi, false));
        }
    }
    while lower.len() < samples {
        let phi = rng.random_range(0.0..TAU);
        if (phi - PI).abs() > 0.5 {
            lower.push(SurfacePoint::on_circle(a, phi, false));
        }
    }
    let radius_err = upper
        .iter()
        .map(|p| ((p.y).hypot(p.z - a2) - a2).abs())
        .chain(lower.iter().map(|p| ((p.y).hypot(p.z + a2) - a2).abs()))
        .fold(0.0, f64::max);
    let mut min_dist = f64::INFINITY;
    for p in &upper {
        for q in &lower {
            min_dist = min_dist.min((p.y - q.y).hypot(p.z - q.z));
        }
    }
    let passed = radius_err <= 1e-12 * a2.max(1.0) && min_dist > a2 / 10.0;
    let trial = TrialRecord::new(0, Some(seed), digest_inputs(&[], &[a, samples as f64]))
        .metric("radius_error", radius_err)
        .metric("min_branch_distance", min_dist)
        .metric("threshold", a2 / 10.0)
        .outcome(passed, radius_err);
    VerificationReport::single(CHECK, trial)
}

#[derive(Serialize)]
struct CloudRow {
    x: f64,
    y: f64,
    z: f64,
    residual: f64,
    grad_norm: f64,
}

/// CSV with columns x, y, z, residual, grad_norm.
pub fn point_cloud_csv(points: &[SurfacePoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if points.is_empty() {
        w.write_record(["x", "y", "z", "residual", "grad_norm"])
            .map_err(|e| Error::Parse(e.to_string()))?;
    }
    for p in points {
        w.serialize(CloudRow {
            x: p.x,
            y: p.y,
            z: p.z,
            residual: p.residual,
            grad_norm: p.grad_norm(),
        })
        .map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}
