//! Orthonormal (probabilists') Hermite polynomials, their σ-biased rescaling,
//! and Monte Carlo estimation of Hermite coefficients.
//!
//! The basis used throughout is orthonormal under N(0,1): h₀ ≡ 1, h₁(x) = x,
//! h₂(x) = (x² − 1)/√2, with the recurrence
//! h_{j+1}(x) = (x·h_j(x) − √j·h_{j−1}(x)) / √(j+1). The σ-biased polynomial
//! is h_{j,σ}(x) = h_j(x/σ), orthonormal under N(0, σ²).

use crate::sampling::{mc_expectation, Distribution, Estimate, SamplingPlan};
use crate::{Error, Result};

/// Degrees above this are rejected; no client needs them and failing loudly
/// beats silently degrading.
pub const MAX_DEGREE: u32 = 60;

/// A multi-index α ∈ ℕⁿ indexing the product basis h_α = Π h_{αᵢ}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    /// The ambient dimension n.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// |α| = Σ αᵢ.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }
}

/// Degree and bias of a univariate σ-biased Hermite polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteParams {
    pub degree: u32,
    pub sigma: f64,
}

impl HermiteParams {
    pub fn new(degree: u32, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
        }
        Ok(HermiteParams { degree, sigma })
    }
}

/// Evaluate the orthonormal Hermite polynomial h_j at x via the three-term
/// recurrence. Stable for every degree accepted by the guard.
pub fn hermite_eval(j: u32, x: f64) -> Result<f64> {
    if j > MAX_DEGREE {
        return Err(Error::UnsupportedDegree(j));
    }
    let mut prev = 0.0; // h_{-1}, by convention
    let mut cur = 1.0; // h_0
    for k in 0..j {
        let kf = k as f64;
        let next = (x * cur - kf.sqrt() * prev) / (kf + 1.0).sqrt();
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// h_{j,σ}(x) = h_j(x/σ).
pub fn biased_hermite_eval(params: HermiteParams, x: f64) -> Result<f64> {
    hermite_eval(params.degree, x / params.sigma)
}

/// Product basis h_{α,σ}(x) = Π h_{αᵢ,σ}(xᵢ).
pub fn multi_hermite_eval(alpha: &MultiIndex, sigma: f64, x: &[f64]) -> Result<f64> {
    if alpha.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: alpha.len(),
            actual: x.len(),
        });
    }
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    let mut product = 1.0;
    for (&a, &xi) in alpha.entries().iter().zip(x.iter()) {
        product *= hermite_eval(a, xi / sigma)?;
    }
    Ok(product)
}

/// Monte Carlo estimate of the σ-biased Hermite coefficient
/// f̃_σ(α) = E_{x ~ N(0,σ²)ⁿ}[f(x)·h_{α,σ}(x)].
pub fn hermite_coefficient<F>(
    f: F,
    alpha: &MultiIndex,
    sigma: f64,
    plan: &SamplingPlan,
) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    for &a in alpha.entries() {
        if a > MAX_DEGREE {
            return Err(Error::UnsupportedDegree(a));
        }
    }
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    let dim = alpha.len();
    let entries = alpha.entries().to_vec();
    mc_expectation(Distribution::Gaussian { dim, sigma }, plan, move |x| {
        let mut basis = 1.0;
        for (&a, &xi) in entries.iter().zip(x.iter()) {
            basis *= hermite_eval(a, xi / sigma).expect("degree checked above");
        }
        f(x) * basis
    })
}

/// Monte Carlo estimate of the degree-k σ-biased coefficient along a unit
/// direction v: E_{x ~ N(0,σ²)ⁿ}[f(x)·h_{k,σ}(v·x)].
pub fn directional_coefficient<F>(
    f: F,
    k: u32,
    v: &[f64],
    sigma: f64,
    plan: &SamplingPlan,
) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if k > MAX_DEGREE {
        return Err(Error::UnsupportedDegree(k));
    }
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    check_unit(v)?;
    let v = v.to_vec();
    mc_expectation(
        Distribution::Gaussian { dim: v.len(), sigma },
        plan,
        move |x| {
            let proj: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
            f(x) * hermite_eval(k, proj / sigma).expect("degree checked above")
        },
    )
}

pub(crate) fn check_unit(v: &[f64]) -> Result<()> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitVector(norm));
    }
    Ok(())
}
