//! Convex influences and their relatives.
//!
//! The workhorse identity: with M the second-moment matrix
//! M[i][j] = E[K(x)·xᵢxⱼ] under N(0,σ²)ⁿ and γ the volume on the same
//! stream,
//!
//! ```text
//! Inf_v[K] = (γ − vᵀMv/σ²) / √2
//! ```
//!
//! for any unit v. Influence is an affine decreasing function of the
//! quadratic form, so the max-influence direction is M's minimum eigenvector
//! and no search on the sphere is ever needed.

use crate::bodies::{ConvexBody, Fiber};
use crate::hermite::check_unit;
use crate::linalg::{dot, jacobi_eigen, Matrix};
use crate::sampling::{mc_expectations, Distribution, Estimate, SamplingPlan};
use crate::special::{chi_square_cdf, normal_cdf, normal_pdf, symmetric_interval_mass};
use crate::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Estimate of Inf_v^{(σ)}[K] = E[K(x)·(1 − (v·x/σ)²)/√2] by direct Monte
/// Carlo on its own stream.
pub fn influence_along(
    body: &ConvexBody,
    v: &[f64],
    sigma: f64,
    plan: &SamplingPlan,
) -> Result<Estimate> {
    check_unit(v)?;
    if v.len() != body.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            actual: v.len(),
        });
    }
    check_sigma(sigma)?;
    let dim = body.dim();
    let ests = mc_expectations(
        Distribution::Gaussian { dim, sigma },
        plan,
        1,
        move |x, out| {
            let proj = dot(v, x) / sigma;
            out[0] = body.indicator(x) * (1.0 - proj * proj) / SQRT_2;
        },
    )?;
    Ok(ests[0])
}

/// Estimate of the total influence TInf^{(σ)}[K] = E[K(x)·(n − ‖x/σ‖²)/√2]
/// in a single pass.
pub fn total_influence(body: &ConvexBody, sigma: f64, plan: &SamplingPlan) -> Result<Estimate> {
    check_sigma(sigma)?;
    let dim = body.dim();
    let nf = dim as f64;
    let ests = mc_expectations(
        Distribution::Gaussian { dim, sigma },
        plan,
        1,
        move |x, out| {
            let norm2 = x.iter().map(|t| (t / sigma) * (t / sigma)).sum::<f64>();
            out[0] = body.indicator(x) * (nf - norm2) / SQRT_2;
        },
    )?;
    Ok(ests[0])
}

/// Total influence written in an arbitrary orthonormal basis,
/// Σᵢ E[K(x)(1 − (vᵢ·x/σ)²)/√2], estimated directly. Used to exercise the
/// rotation invariance of the quantity rather than assume it.
pub fn total_influence_in_basis(
    body: &ConvexBody,
    basis: &[Vec<f64>],
    sigma: f64,
    plan: &SamplingPlan,
) -> Result<Estimate> {
    check_sigma(sigma)?;
    let dim = body.dim();
    if basis.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: basis.len(),
        });
    }
    for v in basis {
        check_unit(v)?;
    }
    let nf = dim as f64;
    let ests = mc_expectations(
        Distribution::Gaussian { dim, sigma },
        plan,
        1,
        move |x, out| {
            let sum_sq: f64 = basis
                .iter()
                .map(|v| {
                    let p = dot(v, x) / sigma;
                    p * p
                })
                .sum();
            out[0] = body.indicator(x) * (nf - sum_sq) / SQRT_2;
        },
    )?;
    Ok(ests[0])
}

/// The matrix M[i][j] = E[K(x)·xᵢxⱼ] under N(0,σ²)ⁿ together with the volume
/// estimated on the same sample stream. Encodes every degree-2 directional
/// influence of the body.
#[derive(Debug, Clone)]
pub struct SecondMomentMatrix {
    pub sigma: f64,
    /// γ_σ(K) on the shared stream.
    pub volume: Estimate,
    values: Matrix,
    std_errors: Matrix,
    seed: u64,
    samples: u64,
}

impl SecondMomentMatrix {
    pub fn dim(&self) -> usize {
        self.values.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> Estimate {
        Estimate {
            value: self.values.get(i, j),
            std_error: self.std_errors.get(i, j),
            samples: self.samples,
            seed: self.seed,
        }
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    /// Inf_v via the quadratic-form identity, with the conservative error
    /// propagation se = (se_γ + Σ|vᵢvⱼ|·se_Mᵢⱼ/σ²)/√2.
    pub fn influence_along(&self, v: &[f64]) -> Result<Estimate> {
        check_unit(v)?;
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: v.len(),
            });
        }
        let q = self.values.quadratic_form(v) / (self.sigma * self.sigma);
        let mut q_se = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                q_se += (v[i] * v[j]).abs() * self.std_errors.get(i, j);
            }
        }
        q_se /= self.sigma * self.sigma;
        Ok(Estimate {
            value: (self.volume.value - q) / SQRT_2,
            std_error: (self.volume.std_error + q_se) / SQRT_2,
            samples: self.samples,
            seed: self.seed,
        })
    }

    /// TInf = (n·γ − tr(M)/σ²)/√2 on the shared stream.
    pub fn total_influence(&self) -> Estimate {
        let n = self.dim();
        let tr = self.values.trace() / (self.sigma * self.sigma);
        let tr_se: f64 =
            (0..n).map(|i| self.std_errors.get(i, i)).sum::<f64>() / (self.sigma * self.sigma);
        Estimate {
            value: (n as f64 * self.volume.value - tr) / SQRT_2,
            std_error: (n as f64 * self.volume.std_error + tr_se) / SQRT_2,
            samples: self.samples,
            seed: self.seed,
        }
    }

    /// The unit direction maximizing the influence: the minimum-eigenvalue
    /// eigenvector of M, by Jacobi rotations.
    pub fn max_influence_direction(&self) -> Result<(Vec<f64>, Estimate)> {
        let eigen = jacobi_eigen(&self.values)?;
        let direction = eigen.vectors[0].clone();
        let influence = self.influence_along(&direction)?;
        Ok((direction, influence))
    }

    /// M restricted to span(basis): entries bᵢᵀ M bⱼ with matching
    /// conservative standard errors.
    pub fn restricted(&self, basis: &[Vec<f64>]) -> (Matrix, Matrix) {
        let k = basis.len();
        let mut values = Matrix::zeros(k);
        let mut errors = Matrix::zeros(k);
        for a in 0..k {
            for b in 0..k {
                let mut v = 0.0;
                let mut e = 0.0;
                for i in 0..self.dim() {
                    for j in 0..self.dim() {
                        v += basis[a][i] * self.values.get(i, j) * basis[b][j];
                        e += (basis[a][i] * basis[b][j]).abs() * self.std_errors.get(i, j);
                    }
                }
                values.set(a, b, v);
                errors.set(a, b, e);
            }
        }
        (values, errors)
    }

    /// Max-influence direction within span(basis): minimum eigenvector of the
    /// restricted matrix, mapped back to ambient coordinates.
    pub fn max_influence_direction_in(&self, basis: &[Vec<f64>]) -> Result<(Vec<f64>, Estimate)> {
        if basis.is_empty() {
            return Err(Error::invalid("restriction basis is empty"));
        }
        let (restricted, _) = self.restricted(basis);
        let eigen = jacobi_eigen(&restricted)?;
        let weights = &eigen.vectors[0];
        let mut direction = vec![0.0; self.dim()];
        for (w, b) in weights.iter().zip(basis.iter()) {
            for (d, &bi) in direction.iter_mut().zip(b.iter()) {
                *d += w * bi;
            }
        }
        crate::linalg::normalize(&mut direction)?;
        let influence = self.influence_along(&direction)?;
        Ok((direction, influence))
    }

    /// Total influence of the function averaged down to span(basis):
    /// Σ over the basis of the per-direction influences.
    pub fn total_influence_in(&self, basis: &[Vec<f64>]) -> Estimate {
        let (restricted, errors) = self.restricted(basis);
        let k = basis.len();
        let tr = restricted.trace() / (self.sigma * self.sigma);
        let tr_se: f64 = (0..k).map(|i| errors.get(i, i)).sum::<f64>() / (self.sigma * self.sigma);
        Estimate {
            value: (k as f64 * self.volume.value - tr) / SQRT_2,
            std_error: (k as f64 * self.volume.std_error + tr_se) / SQRT_2,
            samples: self.samples,
            seed: self.seed,
        }
    }
}

/// Estimate all n(n+1)/2 entries of M and the volume on one shared stream.
pub fn second_moment_matrix(
    body: &ConvexBody,
    sigma: f64,
    plan: &SamplingPlan,
) -> Result<SecondMomentMatrix> {
    check_sigma(sigma)?;
    let n = body.dim();
    let n_entries = n * (n + 1) / 2;
    let ests = mc_expectations(
        Distribution::Gaussian { dim: n, sigma },
        plan,
        n_entries + 1,
        move |x, out| {
            let k = body.indicator(x);
            let mut idx = 0;
            for i in 0..n {
                for j in i..n {
                    out[idx] = k * x[i] * x[j];
                    idx += 1;
                }
            }
            out[n_entries] = k;
        },
    )?;
    let mut values = Matrix::zeros(n);
    let mut errors = Matrix::zeros(n);
    let mut idx = 0;
    for i in 0..n {
        for j in i..n {
            values.set(i, j, ests[idx].value);
            values.set(j, i, ests[idx].value);
            errors.set(i, j, ests[idx].std_error);
            errors.set(j, i, ests[idx].std_error);
            idx += 1;
        }
    }
    Ok(SecondMomentMatrix {
        sigma,
        volume: ests[n_entries],
        values,
        std_errors: errors,
        seed: plan.seed,
        samples: plan.samples,
    })
}

/// Convenience wrapper: build M and return its extremal direction.
pub fn max_influence_direction(
    body: &ConvexBody,
    sigma: f64,
    plan: &SamplingPlan,
) -> Result<(Vec<f64>, Estimate)> {
    second_moment_matrix(body, sigma, plan)?.max_influence_direction()
}

/// Sampled shell-density curve r ↦ α_K(r).
#[derive(Debug, Clone)]
pub struct ShellDensity {
    pub radii: Vec<f64>,
    pub estimates: Vec<Estimate>,
}

/// α_K at each radius, all radii sharing one set of sphere directions so the
/// curve is monotone sample-by-sample.
pub fn shell_density(
    body: &ConvexBody,
    radii: &[f64],
    plan: &SamplingPlan,
) -> Result<ShellDensity> {
    if radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::invalid("shell radii must be positive"));
    }
    let dim = body.dim();
    let radii_owned = radii.to_vec();
    let estimates = mc_expectations(
        Distribution::Sphere { dim, radius: 1.0 },
        plan,
        radii.len(),
        move |u, out| {
            let mut point = vec![0.0; u.len()];
            for (k, &r) in radii_owned.iter().enumerate() {
                for (p, &ui) in point.iter_mut().zip(u.iter()) {
                    *p = r * ui;
                }
                out[k] = body.indicator(&point);
            }
        },
    )?;
    Ok(ShellDensity {
        radii: radii.to_vec(),
        estimates,
    })
}

/// The density increment α_K(r(1−ε)) − α_K(r), estimated with common random
/// numbers: both radii see the same sphere directions, so the per-sample
/// difference is a 0/1 variable and the variance collapses.
pub fn density_increment(
    body: &ConvexBody,
    r: f64,
    eps: f64,
    plan: &SamplingPlan,
) -> Result<Estimate> {
    if !(r > 0.0) {
        return Err(Error::invalid("radius must be positive"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("eps must lie in (0, 1)"));
    }
    let dim = body.dim();
    let ests = mc_expectations(
        Distribution::Sphere { dim, radius: 1.0 },
        plan,
        1,
        move |u, out| {
            let mut inner = vec![0.0; u.len()];
            let mut outer = vec![0.0; u.len()];
            for ((a, b), &ui) in inner.iter_mut().zip(outer.iter_mut()).zip(u.iter()) {
                *a = r * (1.0 - eps) * ui;
                *b = r * ui;
            }
            out[0] = body.indicator(&inner) - body.indicator(&outer);
        },
    )?;
    Ok(ests[0])
}

/// Geometric influence of coordinate i: the expected Gaussian lower
/// Minkowski content of the 1-D fiber, φ(a)+φ(b) for the fiber [a, b],
/// zero for empty or full-line fibers.
pub fn geometric_influence(body: &ConvexBody, i: usize, plan: &SamplingPlan) -> Result<Estimate> {
    fiber_functional(body, i, plan, |fiber| match fiber {
        Fiber::Empty | Fiber::Line => 0.0,
        Fiber::Interval { lo, hi } => normal_pdf(lo) + normal_pdf(hi),
    })
}

/// Expected variance of the indicator along the i-th fiber. The inner
/// variance is exact: p(1−p) with p = Φ(hi) − Φ(lo).
pub fn fiber_variance_influence(
    body: &ConvexBody,
    i: usize,
    plan: &SamplingPlan,
) -> Result<Estimate> {
    fiber_functional(body, i, plan, |fiber| {
        let p = match fiber {
            Fiber::Empty => 0.0,
            Fiber::Line => 1.0,
            Fiber::Interval { lo, hi } => normal_cdf(hi) - normal_cdf(lo),
        };
        p * (1.0 - p)
    })
}

fn fiber_functional(
    body: &ConvexBody,
    i: usize,
    plan: &SamplingPlan,
    f: impl Fn(Fiber) -> f64 + Sync,
) -> Result<Estimate> {
    let n = body.dim();
    if i >= n {
        return Err(Error::invalid(format!(
            "coordinate {i} out of range for dimension {n}"
        )));
    }
    if n == 1 {
        // No conditioning coordinates: the fiber is the body itself.
        let fiber = body.fiber_interval(0, &[])?;
        return Ok(Estimate::exact(f(fiber)));
    }
    let ests = mc_expectations(
        Distribution::Gaussian {
            dim: n - 1,
            sigma: 1.0,
        },
        plan,
        1,
        move |x_rest, out| {
            let fiber = body
                .fiber_interval(i, x_rest)
                .expect("dimensions checked above");
            out[0] = f(fiber);
        },
    )?;
    Ok(ests[0])
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// Influence of a slab of half-width c along its normal under N(0,σ²):
/// √2·(c/σ)·φ(c/σ).
pub fn analytic_slab_influence(c: f64, sigma: f64) -> f64 {
    let a = c / sigma;
    SQRT_2 * a * normal_pdf(a)
}

/// Total influence of the ball B_r in n dimensions under N(0,σ²):
/// n·(F_n(ρ) − F_{n+2}(ρ))/√2 with ρ = (r/σ)², from t·f_n(t) = n·f_{n+2}(t).
pub fn analytic_ball_total_influence(r: f64, n: usize, sigma: f64) -> f64 {
    let rho = (r / sigma).powi(2);
    n as f64 * (chi_square_cdf(n, rho) - chi_square_cdf(n + 2, rho)) / SQRT_2
}

/// Coordinate influence of the cube C_r in n dimensions:
/// (2Φ(r)−1)^{n−1} · √2·r·φ(r), the product rule applied to the slab factor.
pub fn analytic_cube_influence(r: f64, n: usize) -> f64 {
    symmetric_interval_mass(r).powi(n as i32 - 1) * analytic_slab_influence(r, 1.0)
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    Ok(())
}

/// Marginal volume of the diagonal fiber problem, used as the quadrature
/// oracle for the fiber-variance comparison: E_s[p(1−p)] where
/// p(s) = Φ(w−s) − Φ(−w−s) and s ~ N(0, n−1), for the slab
/// {|Σxᵢ| ≤ w = √n}.
pub fn diagonal_slab_fiber_variance_oracle(n: usize) -> f64 {
    let w = (n as f64).sqrt();
    let sd = ((n - 1) as f64).sqrt();
    let q = crate::sampling::quadrature_1d(
        |s| {
            let p = normal_cdf(w - s) - normal_cdf(-w - s);
            p * (1.0 - p) * normal_pdf(s / sd) / sd
        },
        -10.0 * sd,
        10.0 * sd,
        1e-10,
    );
    q.value
}
