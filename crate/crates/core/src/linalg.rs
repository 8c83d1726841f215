//! Small dense complex matrices and a Hermitian eigensolver.
//!
//! Everything in this crate lives in dimension 2 to 6, so the matrix type is
//! a plain row-major `Vec<Complex64>` and eigenvalues come from cyclic Jacobi
//! sweeps on the real-symmetric embedding of the Hermitian input. No attempt
//! is made at large-matrix performance.

use num_complex::Complex64;
use serde::Serialize;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Outer product `v v†` of a (not necessarily normalized) state vector.
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, c: f64) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * c;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let mut out = Self::zeros(da * db);
        for ia in 0..da {
            for ja in 0..da {
                let a = self[(ia, ja)];
                for ib in 0..db {
                    for jb in 0..db {
                        out[(ia * db + ib, ja * db + jb)] = a * other[(ib, jb)];
                    }
                }
            }
        }
        out
    }

    /// Partial transpose on the second factor of a `da ⊗ db` system.
    pub fn partial_transpose_second(&self, da: usize, db: usize) -> Self {
        assert_eq!(da * db, self.dim);
        let mut out = Self::zeros(self.dim);
        for i in 0..da {
            for j in 0..da {
                for a in 0..db {
                    for b in 0..db {
                        out[(i * db + a, j * db + b)] = self[(i * db + b, j * db + a)];
                    }
                }
            }
        }
        out
    }

    /// Largest elementwise deviation from the adjoint. Zero for Hermitian input.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues of a (numerically) Hermitian matrix, ascending.
    ///
    /// The n×n complex Hermitian matrix H = A + iB is embedded as the
    /// 2n×2n real symmetric matrix [[A, -B], [B, A]], whose spectrum is that
    /// of H with every eigenvalue doubled; cyclic Jacobi sweeps diagonalize
    /// the embedding and the pairs are collapsed back.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        let m = 2 * n;
        let mut a = vec![0.0f64; m * m];
        for i in 0..n {
            for j in 0..n {
                // Symmetrize so that ulp-level Hermiticity violations cannot
                // leak an antisymmetric part into the embedding.
                let h = 0.5 * (self[(i, j)] + self[(j, i)].conj());
                a[i * m + j] = h.re;
                a[(i + n) * m + (j + n)] = h.re;
                a[i * m + (j + n)] = -h.im;
                a[(i + n) * m + j] = h.im;
            }
        }
        let mut eig = jacobi_symmetric_eigenvalues(&mut a, m);
        eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
        (0..n)
            .map(|k| 0.5 * (eig[2 * k] + eig[2 * k + 1]))
            .collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues()[0]
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Converges quadratically; 50 sweeps is far beyond what a 12×12 matrix
/// needs. The matrix is destroyed.
fn jacobi_symmetric_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    const MAX_SWEEPS: usize = 50;
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    let stop = 1e-15 * scale;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if (2.0 * off).sqrt() <= stop {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                // Smaller-angle root of t^2 + 2 t theta - 1 = 0.
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[i * n + p];
                    let aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                    a[p * n + i] = a[i * n + p];
                    a[q * n + i] = a[i * n + q];
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}
