//! Symmetric convex bodies as membership oracles with analytic metadata.
//!
//! Bodies are built from a small constructor grammar (slab, ball, cube,
//! ellipsoid, finite intersection, orthogonal image), which keeps symmetry
//! and convexity true by construction and lets volume, in-radius and fiber
//! formulas propagate where they are known. Closure is deliberately limited
//! to intersection and orthogonal images; a general affine image would break
//! central symmetry.

use serde::{Deserialize, Serialize};

use crate::linalg::{norm, normalize, Matrix};
use crate::sampling::{mc_expectation, Distribution, Estimate, SamplingPlan};
use crate::special::{chi_square_cdf, symmetric_interval_mass};
use crate::{Error, Result};

/// Radial bisection tolerance for exit radii.
const RADIAL_TOL: f64 = 1e-6;
/// Fiber endpoint bisection tolerance.
const FIBER_TOL: f64 = 1e-8;
/// Scan range for numeric fibers; Gaussian mass beyond is negligible.
const FIBER_RANGE: f64 = 24.0;

#[derive(Debug, Clone)]
enum Shape {
    /// {x : |v·x| ≤ c} with v a unit vector.
    Slab { normal: Vec<f64>, half_width: f64 },
    Ball { radius: f64 },
    /// {x : |xᵢ| ≤ r for all i}.
    Cube { half_side: f64 },
    /// {x : Σ (xᵢ/aᵢ)² ≤ 1}.
    Ellipsoid { semiaxes: Vec<f64> },
    Intersection(Vec<Shape>),
    /// The image Q·child for orthogonal Q; membership tests Qᵀx in child.
    Rotated { q: Matrix, child: Box<Shape> },
}

/// A 1-D fiber of a body: the intersection of a coordinate line with the set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fiber {
    Empty,
    Interval { lo: f64, hi: f64 },
    /// The whole line (the body does not constrain this coordinate here).
    Line,
}

impl Fiber {
    fn intersect(self, other: Fiber) -> Fiber {
        match (self, other) {
            (Fiber::Empty, _) | (_, Fiber::Empty) => Fiber::Empty,
            (Fiber::Line, f) | (f, Fiber::Line) => f,
            (Fiber::Interval { lo: a, hi: b }, Fiber::Interval { lo: c, hi: d }) => {
                let lo = a.max(c);
                let hi = b.min(d);
                if lo > hi {
                    Fiber::Empty
                } else {
                    Fiber::Interval { lo, hi }
                }
            }
        }
    }
}

/// A symmetric convex set, identified with its 0/1 indicator.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    dim: usize,
    shape: Shape,
    label: String,
}

impl ConvexBody {
    /// Slab {x : |v̂·x| ≤ c} with v̂ = v/‖v‖.
    pub fn slab(v: &[f64], c: f64, dim: usize) -> Result<Self> {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: v.len(),
            });
        }
        if !(c > 0.0) {
            return Err(Error::invalid(format!("slab half-width must be positive, got {c}")));
        }
        if norm(v) == 0.0 {
            return Err(Error::ZeroVector);
        }
        let mut normal = v.to_vec();
        normalize(&mut normal)?;
        Ok(ConvexBody {
            dim,
            shape: Shape::Slab {
                normal,
                half_width: c,
            },
            label: format!("slab(c={c},n={dim})"),
        })
    }

    /// Origin-centered Euclidean ball of radius r.
    pub fn ball(r: f64, dim: usize) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::invalid(format!("ball radius must be positive, got {r}")));
        }
        Ok(ConvexBody {
            dim,
            shape: Shape::Ball { radius: r },
            label: format!("ball(r={r},n={dim})"),
        })
    }

    /// Axis-aligned cube {x : |xᵢ| ≤ r}.
    pub fn cube(r: f64, dim: usize) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::invalid(format!("cube half-side must be positive, got {r}")));
        }
        Ok(ConvexBody {
            dim,
            shape: Shape::Cube { half_side: r },
            label: format!("cube(r={r},n={dim})"),
        })
    }

    /// Axis-aligned ellipsoid with the given semiaxes.
    pub fn ellipsoid(semiaxes: &[f64]) -> Result<Self> {
        if semiaxes.is_empty() {
            return Err(Error::invalid("ellipsoid needs at least one semiaxis"));
        }
        if semiaxes.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::invalid("ellipsoid semiaxes must be positive"));
        }
        Ok(ConvexBody {
            dim: semiaxes.len(),
            shape: Shape::Ellipsoid {
                semiaxes: semiaxes.to_vec(),
            },
            label: format!("ellipsoid(n={})", semiaxes.len()),
        })
    }

    /// Intersection of bodies of one common dimension.
    pub fn intersect(parts: Vec<ConvexBody>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::invalid("intersection needs at least one part"));
        };
        let dim = first.dim;
        for p in &parts {
            if p.dim != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: p.dim,
                });
            }
        }
        let label = format!(
            "intersect({})",
            parts.iter().map(|p| p.label.as_str()).collect::<Vec<_>>().join(",")
        );
        Ok(ConvexBody {
            dim,
            shape: Shape::Intersection(parts.into_iter().map(|p| p.shape).collect()),
            label,
        })
    }

    /// The image Q·K of a body under an orthogonal matrix Q.
    pub fn linear_image(body: ConvexBody, q: Matrix) -> Result<Self> {
        if q.dim() != body.dim {
            return Err(Error::DimensionMismatch {
                expected: body.dim,
                actual: q.dim(),
            });
        }
        if q.orthogonality_defect() > 1e-9 {
            return Err(Error::NotOrthogonal);
        }
        let label = format!("rotated({})", body.label);
        Ok(ConvexBody {
            dim: body.dim,
            shape: Shape::Rotated {
                q,
                child: Box::new(body.shape),
            },
            label,
        })
    }

    /// Rotation by `angle` radians in the (i, j) coordinate plane (0-based).
    pub fn rotation_in_plane(dim: usize, i: usize, j: usize, angle: f64) -> Result<Matrix> {
        if i >= dim || j >= dim || i == j {
            return Err(Error::invalid(format!(
                "rotation plane ({i},{j}) invalid for dimension {dim}"
            )));
        }
        let mut q = Matrix::identity(dim);
        let (s, c) = angle.sin_cos();
        q.set(i, i, c);
        q.set(j, j, c);
        q.set(i, j, -s);
        q.set(j, i, s);
        Ok(q)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Human-readable constructor description, used in report rows.
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Membership oracle. Safe to call from many threads.
    pub fn contains(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim);
        shape_contains(&self.shape, x)
    }

    /// Indicator value as a float, the form every estimator wants.
    #[inline]
    pub fn indicator(&self, x: &[f64]) -> f64 {
        if self.contains(x) {
            1.0
        } else {
            0.0
        }
    }

    /// Closed-form Gaussian volume γ_σ(K) when the constructor tree admits one.
    pub fn analytic_gaussian_volume(&self, sigma: f64) -> Option<f64> {
        analytic_volume(&self.shape, self.dim, sigma)
    }

    /// γ_σ(K) as an Estimate: analytic when available, Monte Carlo otherwise.
    pub fn gaussian_volume(&self, sigma: f64, plan: &SamplingPlan) -> Result<Estimate> {
        if let Some(v) = self.analytic_gaussian_volume(sigma) {
            return Ok(Estimate::exact(v));
        }
        mc_expectation(
            Distribution::Gaussian { dim: self.dim, sigma },
            plan,
            |x| self.indicator(x),
        )
    }

    /// Analytic in-radius and whether it is exact. For intersections the
    /// minimum over parts is reported as a certified lower bound only.
    pub fn analytic_in_radius(&self) -> Option<(f64, bool)> {
        analytic_in_radius(&self.shape)
    }

    /// Lower and upper bounds on the in-radius.
    ///
    /// Analytic bodies report the exact value twice. Otherwise the upper
    /// bound is the minimum exit radius over `plan.samples` random unit
    /// directions (each found by bisection on t ↦ membership(t·u)), and the
    /// lower bound is the best certified analytic bound. The upper bound is
    /// what the downstream inequalities consume.
    pub fn in_radius(&self, plan: &SamplingPlan) -> Result<(f64, f64)> {
        let origin = vec![0.0; self.dim];
        if !self.contains(&origin) {
            return Err(Error::EmptyBody);
        }
        match self.analytic_in_radius() {
            Some((r, true)) => Ok((r, r)),
            other => {
                let analytic_lower = other.map(|(r, _)| r).unwrap_or(0.0);
                let mut upper = f64::INFINITY;
                let mut direction = vec![0.0; self.dim];
                for i in 0..plan.samples.max(1) {
                    crate::sampling::fill_gaussian(plan.seed, i, 1.0, &mut direction);
                    if normalize(&mut direction).is_err() {
                        continue;
                    }
                    if let Some(exit) = self.exit_radius(&direction) {
                        upper = upper.min(exit);
                    }
                }
                if upper.is_infinite() {
                    // No sampled direction leaves the body; report what we know.
                    return Ok((analytic_lower, f64::INFINITY));
                }
                Ok((analytic_lower.min(upper), upper))
            }
        }
    }

    /// Exit radius sup{t ≥ 0 : t·u ∈ K} along a unit direction, or None when
    /// the sampled ray never leaves the body.
    pub fn exit_radius(&self, u: &[f64]) -> Option<f64> {
        let mut point = vec![0.0; self.dim];
        let eval = |t: f64, point: &mut [f64]| {
            for (p, &ui) in point.iter_mut().zip(u.iter()) {
                *p = t * ui;
            }
            shape_contains(&self.shape, point)
        };
        let mut hi = 1.0;
        let mut lo = 0.0;
        while eval(hi, &mut point) {
            lo = hi;
            hi *= 2.0;
            if hi > 1e9 {
                return None;
            }
        }
        while hi - lo > RADIAL_TOL {
            let mid = 0.5 * (lo + hi);
            if eval(mid, &mut point) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// The fiber {t : (x_rest with t spliced at coordinate i) ∈ K}.
    ///
    /// Analytic for every constructor except orthogonal images, which fall
    /// back to scanning plus bisection on the membership oracle.
    pub fn fiber_interval(&self, i: usize, x_rest: &[f64]) -> Result<Fiber> {
        if i >= self.dim {
            return Err(Error::invalid(format!(
                "fiber coordinate {i} out of range for dimension {}",
                self.dim
            )));
        }
        if x_rest.len() != self.dim - 1 {
            return Err(Error::DimensionMismatch {
                expected: self.dim - 1,
                actual: x_rest.len(),
            });
        }
        match analytic_fiber(&self.shape, i, x_rest) {
            Some(f) => Ok(f),
            None => Ok(self.numeric_fiber(i, x_rest)),
        }
    }

    fn numeric_fiber(&self, i: usize, x_rest: &[f64]) -> Fiber {
        let mut point = embed(x_rest, i, 0.0);
        let eval = |t: f64, point: &mut Vec<f64>| {
            point[i] = t;
            shape_contains(&self.shape, point)
        };

        // Locate any inside point, coarse first, then finer.
        let mut t_in = None;
        'scan: for steps in [512usize, 8192] {
            for k in 0..=steps {
                let t = -FIBER_RANGE + 2.0 * FIBER_RANGE * k as f64 / steps as f64;
                if eval(t, &mut point) {
                    t_in = Some(t);
                    break 'scan;
                }
            }
        }
        let Some(t0) = t_in else {
            return Fiber::Empty;
        };

        let in_hi = eval(FIBER_RANGE, &mut point);
        let in_lo = eval(-FIBER_RANGE, &mut point);
        if in_hi && in_lo {
            return Fiber::Line;
        }

        let mut bisect = |mut inside: f64, mut outside: f64| {
            while (outside - inside).abs() > FIBER_TOL {
                let mid = 0.5 * (inside + outside);
                if eval(mid, &mut point) {
                    inside = mid;
                } else {
                    outside = mid;
                }
            }
            0.5 * (inside + outside)
        };
        let hi = if in_hi { FIBER_RANGE } else { bisect(t0, FIBER_RANGE) };
        let lo = if in_lo {
            -FIBER_RANGE
        } else {
            bisect(t0, -FIBER_RANGE)
        };
        Fiber::Interval { lo, hi }
    }
}

/// Splice `t` into `x_rest` at coordinate `i`.
pub(crate) fn embed(x_rest: &[f64], i: usize, t: f64) -> Vec<f64> {
    let mut full = Vec::with_capacity(x_rest.len() + 1);
    full.extend_from_slice(&x_rest[..i]);
    full.push(t);
    full.extend_from_slice(&x_rest[i..]);
    full
}

fn shape_contains(shape: &Shape, x: &[f64]) -> bool {
    match shape {
        Shape::Slab { normal, half_width } => {
            let dot: f64 = normal.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
            dot.abs() <= *half_width
        }
        Shape::Ball { radius } => x.iter().map(|v| v * v).sum::<f64>() <= radius * radius,
        Shape::Cube { half_side } => x.iter().all(|v| v.abs() <= *half_side),
        Shape::Ellipsoid { semiaxes } => {
            semiaxes
                .iter()
                .zip(x.iter())
                .map(|(a, v)| (v / a) * (v / a))
                .sum::<f64>()
                <= 1.0
        }
        Shape::Intersection(parts) => parts.iter().all(|p| shape_contains(p, x)),
        Shape::Rotated { q, child } => {
            let back = q.matvec_transpose(x);
            shape_contains(child, &back)
        }
    }
}

fn analytic_volume(shape: &Shape, dim: usize, sigma: f64) -> Option<f64> {
    match shape {
        Shape::Slab { half_width, .. } => Some(symmetric_interval_mass(half_width / sigma)),
        Shape::Ball { radius } => Some(chi_square_cdf(dim, (radius / sigma).powi(2))),
        Shape::Cube { half_side } => {
            Some(symmetric_interval_mass(half_side / sigma).powi(dim as i32))
        }
        Shape::Ellipsoid { semiaxes } => {
            if semiaxes.len() == 1 {
                Some(symmetric_interval_mass(semiaxes[0] / sigma))
            } else {
                None
            }
        }
        Shape::Intersection(_) => None,
        Shape::Rotated { child, .. } => analytic_volume(child, dim, sigma),
    }
}

fn analytic_in_radius(shape: &Shape) -> Option<(f64, bool)> {
    match shape {
        Shape::Slab { half_width, .. } => Some((*half_width, true)),
        Shape::Ball { radius } => Some((*radius, true)),
        Shape::Cube { half_side } => Some((*half_side, true)),
        Shape::Ellipsoid { semiaxes } => {
            Some((semiaxes.iter().cloned().fold(f64::INFINITY, f64::min), true))
        }
        Shape::Intersection(parts) => {
            let mut min = f64::INFINITY;
            for p in parts {
                let (r, _) = analytic_in_radius(p)?;
                min = min.min(r);
            }
            // Min over parts certifies containment of the ball but is
            // reported as a bound, not the exact in-radius.
            Some((min, false))
        }
        Shape::Rotated { child, .. } => analytic_in_radius(child),
    }
}

fn analytic_fiber(shape: &Shape, i: usize, x_rest: &[f64]) -> Option<Fiber> {
    match shape {
        Shape::Slab { normal, half_width } => {
            let mut shift = 0.0;
            for (j, &v) in normal.iter().enumerate() {
                if j == i {
                    continue;
                }
                let idx = if j < i { j } else { j - 1 };
                shift += v * x_rest[idx];
            }
            let vi = normal[i];
            if vi.abs() < 1e-300 {
                if shift.abs() <= *half_width {
                    Some(Fiber::Line)
                } else {
                    Some(Fiber::Empty)
                }
            } else {
                let a = (-half_width - shift) / vi;
                let b = (half_width - shift) / vi;
                Some(Fiber::Interval {
                    lo: a.min(b),
                    hi: a.max(b),
                })
            }
        }
        Shape::Ball { radius } => {
            let rest: f64 = x_rest.iter().map(|v| v * v).sum();
            let d2 = radius * radius - rest;
            if d2 < 0.0 {
                Some(Fiber::Empty)
            } else {
                let d = d2.sqrt();
                Some(Fiber::Interval { lo: -d, hi: d })
            }
        }
        Shape::Cube { half_side } => {
            if x_rest.iter().all(|v| v.abs() <= *half_side) {
                Some(Fiber::Interval {
                    lo: -half_side,
                    hi: *half_side,
                })
            } else {
                Some(Fiber::Empty)
            }
        }
        Shape::Ellipsoid { semiaxes } => {
            let mut rest = 0.0;
            for (j, &a) in semiaxes.iter().enumerate() {
                if j == i {
                    continue;
                }
                let idx = if j < i { j } else { j - 1 };
                rest += (x_rest[idx] / a) * (x_rest[idx] / a);
            }
            let t = 1.0 - rest;
            if t < 0.0 {
                Some(Fiber::Empty)
            } else {
                let d = semiaxes[i] * t.sqrt();
                Some(Fiber::Interval { lo: -d, hi: d })
            }
        }
        Shape::Intersection(parts) => {
            let mut fiber = Fiber::Line;
            for p in parts {
                fiber = fiber.intersect(analytic_fiber(p, i, x_rest)?);
                if fiber == Fiber::Empty {
                    return Some(Fiber::Empty);
                }
            }
            Some(fiber)
        }
        Shape::Rotated { .. } => None,
    }
}

// ---------------------------------------------------------------------------
// Body specification files
// ---------------------------------------------------------------------------

/// Parse tree of the body constructor grammar, as read from spec files.
///
/// Axes in `plane` are 1-based, matching the e₁, e₂, … naming used in the
/// documentation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Slab { v: Vec<f64>, c: f64 },
    Ball { r: f64, dim: usize },
    Cube { r: f64, dim: usize },
    Ellipsoid { a: Vec<f64> },
    Intersect { parts: Vec<BodySpec> },
    Rotate {
        angle_deg: f64,
        plane: [usize; 2],
        child: Box<BodySpec>,
    },
}

impl BodySpec {
    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            BodySpec::Slab { v, c } => ConvexBody::slab(v, *c, v.len()),
            BodySpec::Ball { r, dim } => ConvexBody::ball(*r, *dim),
            BodySpec::Cube { r, dim } => ConvexBody::cube(*r, *dim),
            BodySpec::Ellipsoid { a } => ConvexBody::ellipsoid(a),
            BodySpec::Intersect { parts } => {
                let built = parts.iter().map(|p| p.build()).collect::<Result<Vec<_>>>()?;
                ConvexBody::intersect(built)
            }
            BodySpec::Rotate {
                angle_deg,
                plane,
                child,
            } => {
                let body = child.build()?;
                let [i, j] = *plane;
                if i == 0 || j == 0 {
                    return Err(Error::invalid("rotation plane axes are 1-based"));
                }
                let q = ConvexBody::rotation_in_plane(
                    body.dim(),
                    i - 1,
                    j - 1,
                    angle_deg.to_radians(),
                )?;
                ConvexBody::linear_image(body, q)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{sample_iter, SamplingPlan};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn e(i: usize, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    #[test]
    fn slab_membership() {
        let slab = ConvexBody::slab(&e(0, 3), 1.0, 3).unwrap();
        assert!(slab.contains(&[0.5, 9.0, -9.0]));
        assert!(!slab.contains(&[1.1, 0.0, 0.0]));
    }

    #[test]
    fn slab_rejects_zero_vector() {
        assert!(matches!(
            ConvexBody::slab(&[0.0, 0.0], 1.0, 2),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn diagonal_slab_volume() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let slab = ConvexBody::slab(&[s, s], 1.0, 2).unwrap();
        assert_relative_eq!(
            slab.analytic_gaussian_volume(1.0).unwrap(),
            symmetric_interval_mass(1.0),
            epsilon = 1e-12
        );
    }

    #[test]
    fn ball_volume_and_membership() {
        let r = (2.0 * (2.0f64).ln()).sqrt();
        let ball = ConvexBody::ball(r, 2).unwrap();
        assert_relative_eq!(ball.analytic_gaussian_volume(1.0).unwrap(), 0.5, epsilon = 1e-9);

        let one_d = ConvexBody::ball(1.0, 1).unwrap();
        assert_relative_eq!(
            one_d.analytic_gaussian_volume(1.0).unwrap(),
            symmetric_interval_mass(1.0),
            epsilon = 1e-9
        );

        let b5 = ConvexBody::ball(2.0, 5).unwrap();
        assert!(b5.contains(&[1.0, 1.0, 1.0, 0.9, 0.0]));
    }

    #[test]
    fn cube_volume_and_membership() {
        let cube = ConvexBody::cube(1.0, 2).unwrap();
        assert!(cube.contains(&[0.99, -0.99]));
        assert_relative_eq!(
            cube.analytic_gaussian_volume(1.0).unwrap(),
            symmetric_interval_mass(1.0).powi(2),
            epsilon = 1e-12
        );

        // Half-volume calibration: r with 2Φ(r)−1 = 2^{−1/n}.
        let n = 8;
        let r = crate::special::symmetric_interval_halfwidth((0.5f64).powf(1.0 / n as f64)).unwrap();
        let cube = ConvexBody::cube(r, n).unwrap();
        assert_relative_eq!(cube.analytic_gaussian_volume(1.0).unwrap(), 0.5, epsilon = 1e-10);
    }

    #[test]
    fn ellipsoid_membership() {
        let ell = ConvexBody::ellipsoid(&[1.0, 2.0]).unwrap();
        assert!(ell.contains(&[0.0, 1.9]));
        assert!(!ell.contains(&[1.05, 0.0]));
    }

    #[test]
    fn intersection_of_slabs_equals_cube() {
        let slabs = ConvexBody::intersect(vec![
            ConvexBody::slab(&e(0, 2), 1.0, 2).unwrap(),
            ConvexBody::slab(&e(1, 2), 1.0, 2).unwrap(),
        ])
        .unwrap();
        let cube = ConvexBody::cube(1.0, 2).unwrap();
        let plan = SamplingPlan::new(3, 10_000);
        for p in sample_iter(Distribution::Gaussian { dim: 2, sigma: 2.0 }, &plan) {
            assert_eq!(slabs.contains(&p), cube.contains(&p));
        }
    }

    #[test]
    fn rotated_slab_equals_diagonal_slab() {
        let slab = ConvexBody::slab(&e(0, 2), 1.0, 2).unwrap();
        let q = ConvexBody::rotation_in_plane(2, 0, 1, std::f64::consts::FRAC_PI_4).unwrap();
        let rotated = ConvexBody::linear_image(slab, q).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let diagonal = ConvexBody::slab(&[s, s], 1.0, 2).unwrap();
        let plan = SamplingPlan::new(5, 10_000);
        for p in sample_iter(Distribution::Gaussian { dim: 2, sigma: 1.5 }, &plan) {
            assert_eq!(rotated.contains(&p), diagonal.contains(&p));
        }
        // Rotation preserves the analytic volume.
        assert_relative_eq!(
            rotated.analytic_gaussian_volume(1.0).unwrap(),
            symmetric_interval_mass(1.0),
            epsilon = 1e-12
        );
    }

    #[test]
    fn linear_image_requires_orthogonal_matrix() {
        let slab = ConvexBody::slab(&e(0, 2), 1.0, 2).unwrap();
        let mut q = Matrix::identity(2);
        q.set(0, 1, 0.5);
        assert!(matches!(
            ConvexBody::linear_image(slab, q),
            Err(Error::NotOrthogonal)
        ));
    }

    #[test]
    fn in_radius_analytic_bodies() {
        let plan = SamplingPlan::new(1, 64);
        let slab = ConvexBody::slab(&e(0, 5), 1.0, 5).unwrap();
        assert_eq!(slab.in_radius(&plan).unwrap(), (1.0, 1.0));
        let ball = ConvexBody::ball(3.0, 4).unwrap();
        assert_eq!(ball.in_radius(&plan).unwrap(), (3.0, 3.0));
    }

    #[test]
    fn in_radius_of_two_slab_intersection() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let body = ConvexBody::intersect(vec![
            ConvexBody::slab(&e(0, 2), 1.0, 2).unwrap(),
            ConvexBody::slab(&[s, s], 1.0, 2).unwrap(),
        ])
        .unwrap();
        let (lo, hi) = body.in_radius(&SamplingPlan::new(9, 10_000)).unwrap();
        assert!(lo <= hi);
        // True in-radius is 1 (min of the two slab widths).
        assert!((hi - 1.0).abs() < 1e-3, "upper bound {hi}");
        assert!(hi >= 1.0 - RADIAL_TOL);
        assert_relative_eq!(lo, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fibers_of_reference_bodies() {
        let ball = ConvexBody::ball(2.0, 2).unwrap();
        match ball.fiber_interval(0, &[0.0]).unwrap() {
            Fiber::Interval { lo, hi } => {
                assert_relative_eq!(lo, -2.0, epsilon = 1e-12);
                assert_relative_eq!(hi, 2.0, epsilon = 1e-12);
            }
            other => panic!("unexpected fiber {other:?}"),
        }
        // Tangent fiber degenerates to a point.
        match ball.fiber_interval(0, &[2.0]).unwrap() {
            Fiber::Interval { lo, hi } => {
                assert_eq!(lo, 0.0);
                assert_eq!(hi, 0.0);
            }
            other => panic!("unexpected fiber {other:?}"),
        }

        let cube = ConvexBody::cube(1.0, 3).unwrap();
        match cube.fiber_interval(1, &[0.5, -0.5]).unwrap() {
            Fiber::Interval { lo, hi } => {
                assert_eq!((lo, hi), (-1.0, 1.0));
            }
            other => panic!("unexpected fiber {other:?}"),
        }

        // A slab constrains nothing orthogonal to its normal.
        let slab = ConvexBody::slab(&e(0, 2), 1.0, 2).unwrap();
        assert_eq!(slab.fiber_interval(1, &[0.5]).unwrap(), Fiber::Line);
        assert_eq!(slab.fiber_interval(1, &[1.5]).unwrap(), Fiber::Empty);
    }

    #[test]
    fn numeric_fiber_matches_analytic_for_rotated_slab() {
        let slab = ConvexBody::slab(&e(0, 2), 1.0, 2).unwrap();
        let q = ConvexBody::rotation_in_plane(2, 0, 1, 0.3).unwrap();
        let rotated = ConvexBody::linear_image(slab, q).unwrap();
        // The rotated slab is the slab with normal (cos .3, sin .3).
        let reference = ConvexBody::slab(&[(0.3f64).cos(), (0.3f64).sin()], 1.0, 2).unwrap();
        for &xr in &[-1.0, 0.0, 0.7, 2.0] {
            let got = rotated.fiber_interval(0, &[xr]).unwrap();
            let want = reference.fiber_interval(0, &[xr]).unwrap();
            match (got, want) {
                (Fiber::Interval { lo: a, hi: b }, Fiber::Interval { lo: c, hi: d }) => {
                    assert!((a - c).abs() < 1e-6 && (b - d).abs() < 1e-6);
                }
                (g, w) => assert_eq!(g, w),
            }
        }
    }

    #[test]
    fn volume_estimates_match_formulas() {
        // Every constructor that carries a volume formula, including the
        // rotated one (rotation preserves the analytic value).
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = ConvexBody::rotation_in_plane(3, 0, 1, 0.9).unwrap();
        let bodies = [
            ConvexBody::slab(&e(0, 3), 1.0, 3).unwrap(),
            ConvexBody::slab(&[s, s, 0.0], 0.8, 3).unwrap(),
            ConvexBody::ball(1.5, 3).unwrap(),
            ConvexBody::cube(1.0, 3).unwrap(),
            ConvexBody::linear_image(ConvexBody::cube(1.2, 3).unwrap(), q).unwrap(),
        ];
        for (k, body) in bodies.iter().enumerate() {
            for sigma in [1.0, 1.5] {
                let exact = body.analytic_gaussian_volume(sigma).unwrap();
                let plan = SamplingPlan::new(21 + k as u64, 1 << 18);
                let est = mc_expectation(
                    Distribution::Gaussian { dim: 3, sigma },
                    &plan,
                    |x| body.indicator(x),
                )
                .unwrap();
                assert!(
                    (est.value - exact).abs() <= 3.0 * est.std_error,
                    "{} sigma={sigma}: {} vs {}",
                    body.label(),
                    est.value,
                    exact
                );
            }
        }
    }

    #[test]
    fn in_radius_is_tight_at_the_boundary() {
        // Points safely below the analytic in-radius are members, and some
        // direction exits right at it.
        let cases: Vec<(ConvexBody, Vec<f64>)> = vec![
            (ConvexBody::slab(&e(0, 3), 1.0, 3).unwrap(), e(0, 3)),
            (ConvexBody::ball(2.5, 3).unwrap(), e(1, 3)),
            (ConvexBody::cube(1.0, 3).unwrap(), e(2, 3)),
            (
                ConvexBody::ellipsoid(&[1.5, 0.7, 2.0]).unwrap(),
                e(1, 3),
            ),
        ];
        for (body, tight_direction) in &cases {
            let (r, exact) = body.analytic_in_radius().unwrap();
            assert!(exact);
            let inside: Vec<f64> = tight_direction
                .iter()
                .map(|&x| x * r * (1.0 - 1e-9))
                .collect();
            assert!(body.contains(&inside), "{}", body.label());
            let exit = body.exit_radius(tight_direction).unwrap();
            assert!(
                (exit - r).abs() <= 2e-6,
                "{}: exit {exit} vs in-radius {r}",
                body.label()
            );
            let outside: Vec<f64> = tight_direction
                .iter()
                .map(|&x| x * r * (1.0 + 1e-6) + x * 1e-9)
                .collect();
            assert!(!body.contains(&outside), "{}", body.label());
        }
    }

    #[test]
    fn spec_round_trip_and_build() {
        let text = r#"{
            "kind": "rotate",
            "angle_deg": 45.0,
            "plane": [1, 2],
            "child": { "kind": "slab", "v": [1.0, 0.0], "c": 1.0 }
        }"#;
        let spec = BodySpec::from_json(text).unwrap();
        let body = spec.build().unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let diagonal = ConvexBody::slab(&[s, s], 1.0, 2).unwrap();
        let plan = SamplingPlan::new(7, 4096);
        for p in sample_iter(Distribution::Gaussian { dim: 2, sigma: 1.0 }, &plan) {
            assert_eq!(body.contains(&p), diagonal.contains(&p));
        }

        let bad = BodySpec::from_json("{\"kind\": \"slab\", \"v\": [1, 0]");
        assert!(matches!(bad, Err(Error::SpecParse { .. })));
    }

    // Random body from the constructor grammar, for property tests.
    fn arb_body(dim: usize) -> impl Strategy<Value = ConvexBody> {
        let leaf = prop_oneof![
            (prop::collection::vec(-1.0f64..1.0, dim), 0.2f64..3.0).prop_filter_map(
                "nonzero normal",
                move |(v, c)| {
                    if norm(&v) > 1e-6 {
                        ConvexBody::slab(&v, c, dim).ok()
                    } else {
                        None
                    }
                }
            ),
            (0.3f64..4.0).prop_map(move |r| ConvexBody::ball(r, dim).unwrap()),
            (0.3f64..3.0).prop_map(move |r| ConvexBody::cube(r, dim).unwrap()),
            prop::collection::vec(0.3f64..3.0, dim)
                .prop_map(|a| ConvexBody::ellipsoid(&a).unwrap()),
        ];
        leaf.prop_recursive(2, 6, 3, move |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 2..3)
                    .prop_map(|parts| ConvexBody::intersect(parts).unwrap()),
                (inner, 0.0f64..std::f64::consts::PI).prop_map(move |(b, angle)| {
                    let q = ConvexBody::rotation_in_plane(dim, 0, dim - 1, angle).unwrap();
                    ConvexBody::linear_image(b, q).unwrap()
                }),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn grammar_bodies_are_symmetric_and_midpoint_convex(
            body in arb_body(3),
            probe_seed in 0u64..1_000_000,
        ) {
            let plan = SamplingPlan::new(probe_seed, 512);
            let points: Vec<Vec<f64>> =
                sample_iter(Distribution::Gaussian { dim: 3, sigma: 2.0 }, &plan).collect();
            prop_assert!(body.contains(&[0.0, 0.0, 0.0]));
            for p in &points {
                let neg: Vec<f64> = p.iter().map(|x| -x).collect();
                prop_assert_eq!(body.contains(p), body.contains(&neg));
            }
            for pair in points.chunks(2) {
                if pair.len() < 2 { break; }
                if body.contains(&pair[0]) && body.contains(&pair[1]) {
                    let mid: Vec<f64> = pair[0]
                        .iter()
                        .zip(pair[1].iter())
                        .map(|(a, b)| 0.5 * (a + b))
                        .collect();
                    prop_assert!(body.contains(&mid));
                }
            }
        }

        #[test]
        fn grammar_in_radius_bounds_are_ordered(body in arb_body(3)) {
            let plan = SamplingPlan::new(11, 512);
            let (lo, hi) = body.in_radius(&plan).unwrap();
            prop_assert!(lo <= hi + 1e-12);
            // Points safely inside the certified lower bound are members.
            if lo.is_finite() && lo > 0.0 {
                let probe = [lo * (1.0 - 1e-9), 0.0, 0.0];
                prop_assert!(body.contains(&probe));
            }
        }
    }

    #[test]
    fn dense_probe_of_symmetry_and_convexity() {
        // The heavier fixed-seed probe: 10^5 points/pairs on one body built
        // from every constructor.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = ConvexBody::rotation_in_plane(3, 0, 2, 0.7).unwrap();
        let body = ConvexBody::linear_image(
            ConvexBody::intersect(vec![
                ConvexBody::slab(&[s, s, 0.0], 1.3, 3).unwrap(),
                ConvexBody::ball(2.0, 3).unwrap(),
                ConvexBody::ellipsoid(&[1.5, 2.5, 1.0]).unwrap(),
            ])
            .unwrap(),
            q,
        )
        .unwrap();
        let plan = SamplingPlan::new(99, 100_000);
        let points: Vec<Vec<f64>> =
            sample_iter(Distribution::Gaussian { dim: 3, sigma: 1.5 }, &plan).collect();
        for p in &points {
            let neg: Vec<f64> = p.iter().map(|x| -x).collect();
            assert_eq!(body.contains(p), body.contains(&neg));
        }
        for pair in points.chunks(2) {
            if body.contains(&pair[0]) && body.contains(&pair[1]) {
                let mid: Vec<f64> = pair[0]
                    .iter()
                    .zip(pair[1].iter())
                    .map(|(a, b)| 0.5 * (a + b))
                    .collect();
                assert!(body.contains(&mid));
            }
        }
    }
}
