//! Small dense linear algebra: just enough for n ≤ 16 second-moment matrices.
//! Jacobi rotations are foolproof for symmetric matrices of this size.

use crate::{Error, Result};

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut m = Matrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// y = A·x.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let mut acc = 0.0;
            for j in 0..self.n {
                acc += self.get(i, j) * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// y = Aᵀ·x.
    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for j in 0..self.n {
            let mut acc = 0.0;
            for i in 0..self.n {
                acc += self.get(i, j) * x[i];
            }
            y[j] = acc;
        }
        y
    }

    /// xᵀ·A·x.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let ax = self.matvec(x);
        dot(&ax, x)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Max |(QᵀQ − I)_{ij}|; zero for an orthogonal matrix.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc = 0.0;
                for k in 0..self.n {
                    acc += self.get(k, i) * self.get(k, j);
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).abs());
            }
        }
        worst
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: &mut [f64]) -> Result<()> {
    let n = norm(a);
    if n == 0.0 {
        return Err(Error::ZeroVector);
    }
    for x in a.iter_mut() {
        *x /= n;
    }
    Ok(())
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

const JACOBI_TOL: f64 = 1e-10;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi diagonalization, run until the off-diagonal Frobenius norm
/// drops below 1e-10.
pub fn jacobi_eigen(matrix: &Matrix) -> Result<Eigen> {
    let n = matrix.dim();
    let mut a = matrix.clone();
    let mut q = Matrix::identity(n);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a.get(i, j) * a.get(i, j);
            }
        }
        if (2.0 * off).sqrt() < JACOBI_TOL {
            let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
                .map(|k| {
                    let mut v: Vec<f64> = (0..n).map(|i| q.get(i, k)).collect();
                    // Fix the sign so decompositions are reproducible.
                    if let Some(lead) = v.iter().find(|x| x.abs() > 1e-12) {
                        if *lead < 0.0 {
                            for x in v.iter_mut() {
                                *x = -*x;
                            }
                        }
                    }
                    (a.get(k, k), v)
                })
                .collect();
            pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
            return Ok(Eigen {
                values: pairs.iter().map(|p| p.0).collect(),
                vectors: pairs.into_iter().map(|p| p.1).collect(),
            });
        }

        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a.get(p, r);
                if apr.abs() < f64::EPSILON * 1e-3 {
                    continue;
                }
                let theta = (a.get(r, r) - a.get(p, p)) / (2.0 * apr);
                let t = {
                    let s = if theta >= 0.0 { 1.0 } else { -1.0 };
                    s / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a.get(k, p);
                    let akr = a.get(k, r);
                    a.set(k, p, c * akp - s * akr);
                    a.set(k, r, s * akp + c * akr);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let ark = a.get(r, k);
                    a.set(p, k, c * apk - s * ark);
                    a.set(r, k, s * apk + c * ark);
                }
                for k in 0..n {
                    let qkp = q.get(k, p);
                    let qkr = q.get(k, r);
                    q.set(k, p, c * qkp - s * qkr);
                    q.set(k, r, s * qkp + c * qkr);
                }
            }
        }
    }
    Err(Error::EigenNoConvergence(JACOBI_MAX_SWEEPS))
}

/// Orthonormal basis of the subspace orthogonal to every vector in `against`,
/// seeded from `candidates`, by modified Gram-Schmidt. Vectors that collapse
/// below the tolerance are dropped.
pub fn orthonormal_complement_basis(candidates: &[Vec<f64>], against: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for cand in candidates {
        let mut v = cand.clone();
        for w in against.iter().chain(basis.iter()) {
            let proj = dot(&v, w);
            for (vi, wi) in v.iter_mut().zip(w.iter()) {
                *vi -= proj * wi;
            }
        }
        // Second pass for numerical cleanliness.
        for w in against.iter().chain(basis.iter()) {
            let proj = dot(&v, w);
            for (vi, wi) in v.iter_mut().zip(w.iter()) {
                *vi -= proj * wi;
            }
        }
        let len = norm(&v);
        if len > 1e-8 {
            for x in v.iter_mut() {
                *x /= len;
            }
            basis.push(v);
        }
    }
    basis
}

/// A seeded random orthonormal basis: Gaussian vectors run through
/// Gram-Schmidt. Rotation-invariance of the Gaussian makes this Haar-ish,
/// which is all the verification layer needs.
pub fn random_orthonormal_basis(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut index = 0u64;
    while basis.len() < n {
        let mut v = vec![0.0; n];
        crate::sampling::fill_gaussian(seed, index, 1.0, &mut v);
        index += 1;
        let appended = orthonormal_complement_basis(&[v], &basis);
        basis.extend(appended);
    }
    basis
}

/// Largest principal angle (radians) between two subspaces given by
/// orthonormal bases.
pub fn subspace_angle(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.len() == b.len() {
            0.0
        } else {
            std::f64::consts::FRAC_PI_2
        };
    }
    // cos of the smallest singular value of the cross-Gram matrix bounds the
    // largest principal angle; for the tiny dimensions here, compute the
    // eigenvalues of GᵀG.
    let k = a.len();
    let m = b.len();
    let mut gram = vec![vec![0.0; m]; k];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            gram[i][j] = dot(ai, bj);
        }
    }
    let mut gtg = Matrix::zeros(k);
    for i in 0..k {
        for j in 0..k {
            let mut acc = 0.0;
            for (l, _) in (0..m).enumerate() {
                acc += gram[i][l] * gram[j][l];
            }
            gtg.set(i, j, acc);
        }
    }
    let eig = jacobi_eigen(&gtg).expect("gram eigen");
    let min_sq = eig.values[0].clamp(0.0, 1.0);
    min_sq.sqrt().acos()
}
