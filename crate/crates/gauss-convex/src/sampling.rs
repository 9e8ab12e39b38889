//! Seeded random sources and estimators.
//!
//! Every sampler here is a pure function of `(seed, sample index)`: the stream
//! is counter-based, so any sample can be generated independently of the rest.
//! Estimation partitions the index range into fixed-size chunks, accumulates
//! each chunk with compensated summation, and folds the chunk partials in
//! index order. The result is bit-identical for a given `(seed, samples)`
//! no matter how many workers execute the chunks.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::special::chi_pdf;
use crate::{Error, Result};

/// Samples per reduction chunk. Fixed so that the reduction tree does not
/// depend on the worker count.
const CHUNK: u64 = 8192;

/// How a Monte Carlo run draws its points and how many to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SamplingPlan {
    /// Root seed of the counter-based stream.
    pub seed: u64,
    /// Number of samples N.
    pub samples: u64,
    /// Worker hint. Does not affect results, only scheduling.
    pub workers: usize,
}

impl SamplingPlan {
    /// Plan with the given seed and sample count, using all available cores.
    pub fn new(seed: u64, samples: u64) -> Self {
        let workers = std::thread::available_parallelism()
            .map(|p| p.get())
            .unwrap_or(1);
        SamplingPlan {
            seed,
            samples,
            workers,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn with_samples(mut self, samples: u64) -> Self {
        self.samples = samples;
        self
    }

    /// Derived plan whose stream is statistically independent of this one.
    ///
    /// Estimates that must not share randomness (e.g. the two sides of an
    /// identity checked on independent data) take distinct tags.
    pub fn substream(&self, tag: u64) -> Self {
        SamplingPlan {
            seed: mix64(self.seed ^ mix64(tag.wrapping_add(0x9E37_79B9_7F4A_7C15))),
            samples: self.samples,
            workers: self.workers,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::ZeroSamples);
        }
        Ok(())
    }
}

/// A Monte Carlo or quadrature result with its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    /// CLT standard error: sample standard deviation / √N. Zero for exact
    /// results and constant integrands.
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl Estimate {
    /// An exact (analytic) value carried in Estimate form.
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            std_error: 0.0,
            samples: 0,
            seed: 0,
        }
    }
}

// ---------------------------------------------------------------------------
// Counter-based uniform and Gaussian generation
// ---------------------------------------------------------------------------

/// SplitMix64 finalizer (variant 13 by Stafford).
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The SplitMix64 output at position `ctr` of the stream rooted at `seed`.
#[inline]
fn u64_at(seed: u64, ctr: u64) -> u64 {
    mix64(seed.wrapping_add(ctr.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Uniform in (0, 1], so logarithms stay finite.
#[inline]
fn unit_at(seed: u64, ctr: u64) -> f64 {
    ((u64_at(seed, ctr) >> 11) + 1) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Counters consumed per sample of dimension `n` (Box-Muller works in pairs).
#[inline]
fn stride(n: usize) -> u64 {
    (2 * n.div_ceil(2)) as u64
}

/// Fill `out` with one draw from N(0, sigma²)^n at stream position `index`.
///
/// Box-Muller with deterministic pairing keeps the counter consumption of a
/// sample fixed, which is what makes random access possible.
pub fn fill_gaussian(seed: u64, index: u64, sigma: f64, out: &mut [f64]) {
    let n = out.len();
    let base = index * stride(n);
    for p in 0..n.div_ceil(2) {
        let u1 = unit_at(seed, base + 2 * p as u64);
        let u2 = unit_at(seed, base + 2 * p as u64 + 1);
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        out[2 * p] = sigma * r * theta.cos();
        if 2 * p + 1 < n {
            out[2 * p + 1] = sigma * r * theta.sin();
        }
    }
}

/// The distribution a Monte Carlo run integrates against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    /// N(0, sigma²)^dim.
    Gaussian { dim: usize, sigma: f64 },
    /// Haar measure on the sphere of radius `radius` in `dim` dimensions,
    /// realized as r·g/‖g‖ for Gaussian g.
    Sphere { dim: usize, radius: f64 },
    /// The chi distribution χ(dim): the integrand receives a 1-element slice
    /// holding ‖g‖.
    Chi { dim: usize },
}

impl Distribution {
    fn point_len(&self) -> usize {
        match *self {
            Distribution::Gaussian { dim, .. } | Distribution::Sphere { dim, .. } => dim,
            Distribution::Chi { .. } => 1,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Distribution::Gaussian { dim, sigma } => {
                if dim == 0 {
                    return Err(Error::invalid("distribution dimension must be positive"));
                }
                if !(sigma > 0.0) {
                    return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
                }
            }
            Distribution::Sphere { dim, radius } => {
                if dim == 0 {
                    return Err(Error::invalid("distribution dimension must be positive"));
                }
                if !(radius >= 0.0) {
                    return Err(Error::invalid(format!("radius must be non-negative, got {radius}")));
                }
            }
            Distribution::Chi { dim } => {
                if dim == 0 {
                    return Err(Error::invalid("distribution dimension must be positive"));
                }
            }
        }
        Ok(())
    }

    fn fill(&self, seed: u64, index: u64, scratch: &mut [f64], point: &mut [f64]) {
        match *self {
            Distribution::Gaussian { sigma, .. } => fill_gaussian(seed, index, sigma, point),
            Distribution::Sphere { dim, radius } => {
                fill_gaussian(seed, index, 1.0, point);
                let norm = point.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm == 0.0 {
                    point.fill(0.0);
                    point[0] = radius;
                } else {
                    let scale = radius / norm;
                    for x in point.iter_mut() {
                        *x *= scale;
                    }
                }
                let _ = dim;
            }
            Distribution::Chi { dim } => {
                let g = &mut scratch[..dim];
                fill_gaussian(seed, index, 1.0, g);
                point[0] = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            }
        }
    }

    /// Counters consumed per sample, for stream layout.
    fn sample_stride_dim(&self) -> usize {
        match *self {
            Distribution::Gaussian { dim, .. }
            | Distribution::Sphere { dim, .. }
            | Distribution::Chi { dim } => dim,
        }
    }
}

/// Iterator over the draws of a plan, mostly for probing and tests.
pub fn sample_iter(
    dist: Distribution,
    plan: &SamplingPlan,
) -> impl Iterator<Item = Vec<f64>> + '_ {
    let seed = plan.seed;
    let point_len = dist.point_len();
    let scratch_len = dist.sample_stride_dim();
    (0..plan.samples).map(move |i| {
        let mut scratch = vec![0.0; scratch_len];
        let mut point = vec![0.0; point_len];
        dist.fill(seed, i, &mut scratch, &mut point);
        point
    })
}

// ---------------------------------------------------------------------------
// Estimation
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    #[inline]
    fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    fn value(&self) -> f64 {
        self.sum
    }
}

fn pool_for(workers: usize) -> Arc<rayon::ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
    let pools = POOLS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = pools.lock().unwrap();
    guard
        .entry(workers)
        .or_insert_with(|| {
            Arc::new(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .expect("thread pool"),
            )
        })
        .clone()
}

/// Estimate the expectations of `n_outputs` statistics on one shared stream.
///
/// `f` receives the sampled point and writes one value per output. All
/// outputs see exactly the same points, so downstream comparisons of the
/// outputs benefit from common random numbers.
pub fn mc_expectations<F>(
    dist: Distribution,
    plan: &SamplingPlan,
    n_outputs: usize,
    f: F,
) -> Result<Vec<Estimate>>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    mc_expectations_indexed(dist, plan, n_outputs, |_, point, out| f(point, out))
}

/// Like [`mc_expectations`] but hands the sample index to the integrand, so
/// nested estimators can derive per-sample substreams.
pub fn mc_expectations_indexed<F>(
    dist: Distribution,
    plan: &SamplingPlan,
    n_outputs: usize,
    f: F,
) -> Result<Vec<Estimate>>
where
    F: Fn(u64, &[f64], &mut [f64]) + Sync,
{
    plan.validate()?;
    dist.validate()?;
    if n_outputs == 0 {
        return Ok(Vec::new());
    }

    let n = plan.samples;
    let n_chunks = n.div_ceil(CHUNK);
    let point_len = dist.point_len();
    let scratch_len = dist.sample_stride_dim();
    let seed = plan.seed;

    let chunk_sums = |c: u64| -> Vec<[f64; 2]> {
        let lo = c * CHUNK;
        let hi = ((c + 1) * CHUNK).min(n);
        let mut acc = vec![[Kahan::default(), Kahan::default()]; n_outputs];
        let mut scratch = vec![0.0; scratch_len];
        let mut point = vec![0.0; point_len];
        let mut out = vec![0.0; n_outputs];
        for i in lo..hi {
            dist.fill(seed, i, &mut scratch, &mut point);
            f(i, &point, &mut out);
            for (a, &v) in acc.iter_mut().zip(out.iter()) {
                a[0].add(v);
                a[1].add(v * v);
            }
        }
        acc.iter().map(|a| [a[0].value(), a[1].value()]).collect()
    };

    let partials: Vec<Vec<[f64; 2]>> = if plan.workers <= 1 || n_chunks == 1 {
        (0..n_chunks).map(chunk_sums).collect()
    } else {
        pool_for(plan.workers)
            .install(|| (0..n_chunks).into_par_iter().map(chunk_sums).collect())
    };

    let mut estimates = Vec::with_capacity(n_outputs);
    for k in 0..n_outputs {
        let mut sum = Kahan::default();
        let mut sumsq = Kahan::default();
        for chunk in &partials {
            sum.add(chunk[k][0]);
            sumsq.add(chunk[k][1]);
        }
        let nf = n as f64;
        let mean = sum.value() / nf;
        let std_error = if n > 1 {
            let var = ((sumsq.value() - sum.value() * sum.value() / nf) / (nf - 1.0)).max(0.0);
            (var / nf).sqrt()
        } else {
            0.0
        };
        estimates.push(Estimate {
            value: mean,
            std_error,
            samples: n,
            seed,
        });
    }
    Ok(estimates)
}

/// Single-statistic version of [`mc_expectations`].
pub fn mc_expectation<F>(dist: Distribution, plan: &SamplingPlan, f: F) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let estimates = mc_expectations(dist, plan, 1, |point, out| out[0] = f(point))?;
    Ok(estimates[0])
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Result of an adaptive quadrature: the value together with the achieved
/// error estimate (which exceeds the requested tolerance only when the depth
/// cap was hit before convergence).
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

const SIMPSON_MAX_DEPTH: u32 = 40;

fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    whole: f64,
    m: f64,
    fm: f64,
    tol: f64,
    depth: u32,
    achieved: &mut f64,
    converged: &mut bool,
) -> f64 {
    let (left, lm, flm) = simpson(f, a, fa, m, fm);
    let (right, rm, frm) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || depth >= SIMPSON_MAX_DEPTH {
        if delta.abs() > 15.0 * tol {
            *converged = false;
        }
        *achieved += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    adaptive_step(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth + 1, achieved, converged)
        + adaptive_step(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth + 1, achieved, converged)
}

/// Panels the interval is split into before adaptive refinement. Without the
/// initial split, an integrand supported on a small part of [a, b] can hide
/// between the first Simpson nodes and the recursion terminates on 0 = 0.
const SIMPSON_INITIAL_PANELS: usize = 16;

/// Adaptive Simpson integration of `f` over [a, b].
pub fn quadrature_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Quadrature {
    if a == b {
        return Quadrature {
            value: 0.0,
            error_estimate: 0.0,
            converged: true,
        };
    }
    let mut achieved = 0.0;
    let mut converged = true;
    let mut value = 0.0;
    let panel_tol = tol / SIMPSON_INITIAL_PANELS as f64;
    for p in 0..SIMPSON_INITIAL_PANELS {
        let pa = a + (b - a) * p as f64 / SIMPSON_INITIAL_PANELS as f64;
        let pb = a + (b - a) * (p + 1) as f64 / SIMPSON_INITIAL_PANELS as f64;
        let fa = f(pa);
        let fb = f(pb);
        let (whole, m, fm) = simpson(&f, pa, fa, pb, fb);
        value += adaptive_step(
            &f,
            pa,
            fa,
            pb,
            fb,
            whole,
            m,
            fm,
            panel_tol,
            0,
            &mut achieved,
            &mut converged,
        );
    }
    Quadrature {
        value,
        error_estimate: achieved,
        converged,
    }
}

/// Integral of `g(r)` against the χ(n) density over [0, √n + 12].
///
/// The truncated tail mass is far below any tolerance used here.
pub fn radial_quadrature(g: impl Fn(f64) -> f64, n: usize, tol: f64) -> Quadrature {
    let hi = (n as f64).sqrt() + 12.0;
    quadrature_1d(|r| g(r) * chi_pdf(n, r), 0.0, hi, tol)
}
