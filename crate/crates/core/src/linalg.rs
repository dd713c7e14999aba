//! Small dense linear algebra: square complex matrices and a cyclic Jacobi
//! eigensolver for real symmetric (and, by embedding, complex Hermitian)
//! matrices. Indices here are 0-based; the public state API is 1-based.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::one();
        }
        m
    }

    /// Builds a matrix from row-major entries. Returns `None` if the length is
    /// not `dim * dim`.
    pub fn from_row_major(dim: usize, data: Vec<Complex<T>>) -> Option<Self> {
        (data.len() == dim * dim).then_some(Self { dim, data })
    }

    pub fn from_real(dim: usize, data: &[T]) -> Option<Self> {
        (data.len() == dim * dim).then(|| Self {
            dim,
            data: data.iter().map(|&x| Complex::new(x, T::zero())).collect(),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).map(|i| self[(i, i)]).fold(Complex::zero(), |a, b| a + b)
    }

    pub fn scale(&mut self, s: T) {
        for z in &mut self.data {
            *z = z.scale(s);
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.dim);
        matmul_into(self, rhs, &mut out);
        out
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// Largest deviation from hermiticity, `max |a_ij - conj(a_ji)|`.
    pub fn hermiticity_deviation(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Replaces the matrix by `(A + A†) / 2`.
    pub fn hermitize(&mut self) {
        let n = self.dim;
        let half = T::of(0.5);
        for i in 0..n {
            let d = self.data[i * n + i];
            self.data[i * n + i] = Complex::new(d.re, T::zero());
            for j in (i + 1)..n {
                let avg = (self.data[i * n + j] + self.data[j * n + i].conj()).scale(half);
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg.conj();
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

/// `out = a * b`. All three must share the same dimension.
pub fn matmul_into<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>, out: &mut CMatrix<T>) {
    let n = a.dim;
    debug_assert!(b.dim == n && out.dim == n);
    out.data.iter_mut().for_each(|z| *z = Complex::zero());
    for i in 0..n {
        let row = &mut out.data[i * n..(i + 1) * n];
        for k in 0..n {
            let aik = a.data[i * n + k];
            if aik.re.is_zero() && aik.im.is_zero() {
                continue;
            }
            let brow = &b.data[k * n..(k + 1) * n];
            for (o, &bkj) in row.iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
}

/// `out = u * x * u^dagger`. Only the upper triangle of the second product is
/// computed; the result is exactly Hermitian when `x` is.
pub fn conjugate_into<T: Real>(
    u: &CMatrix<T>,
    x: &CMatrix<T>,
    scratch: &mut CMatrix<T>,
    out: &mut CMatrix<T>,
) {
    let n = u.dim;
    matmul_into(u, x, scratch);
    for i in 0..n {
        for j in i..n {
            // (u x u^dagger)_ij = sum_k (u x)_ik conj(u_jk), both rows contiguous
            let srow = &scratch.data[i * n..(i + 1) * n];
            let urow = &u.data[j * n..(j + 1) * n];
            let (mut re, mut im) = (T::zero(), T::zero());
            for (s, w) in srow.iter().zip(urow) {
                re += s.re * w.re + s.im * w.im;
                im += s.im * w.re - s.re * w.im;
            }
            let acc = Complex::new(re, im);
            out.data[i * n + j] = acc;
            if i != j {
                out.data[j * n + i] = acc.conj();
            }
        }
        let d = out.data[i * n + i];
        out.data[i * n + i] = Complex::new(d.re, T::zero());
    }
}

/// Eigen decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Row-major `n x n`; column `m` is the eigenvector for `values[m]`.
    pub vectors: Vec<T>,
}

/// Cyclic Jacobi eigensolver for a real symmetric row-major matrix.
///
/// Only the upper triangle is read. Converges quadratically; the sweep cap is
/// never reached for well-scaled input of the sizes used here (n <= 128).
pub fn symmetric_eigen<T: Real>(n: usize, sym: &[T]) -> SymmetricEigen<T> {
    assert_eq!(sym.len(), n * n, "matrix must be n x n");
    let mut a = vec![T::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            a[i * n + j] = sym[i * n + j];
            a[j * n + i] = sym[i * n + j];
        }
    }
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }

    let norm2: T = a.iter().map(|&x| x * x).sum();
    let tiny = T::epsilon() * T::epsilon() * norm2;
    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off <= tiny || off.is_zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.is_zero() {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (T::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                a[p * n + p] -= t * apq;
                a[q * n + q] += t * apq;
                a[p * n + q] = T::zero();
                a[q * n + p] = T::zero();
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[r * n + p];
                        let arq = a[r * n + q];
                        let new_rp = c * arp - s * arq;
                        let new_rq = s * arp + c * arq;
                        a[r * n + p] = new_rp;
                        a[p * n + r] = new_rp;
                        a[r * n + q] = new_rq;
                        a[q * n + r] = new_rq;
                    }
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = c * vrp - s * vrq;
                    v[r * n + q] = s * vrp + c * vrq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].partial_cmp(&a[j * n + j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&m| a[m * n + m]).collect();
    let mut vectors = vec![T::zero(); n * n];
    for (col, &m) in order.iter().enumerate() {
        for r in 0..n {
            vectors[r * n + col] = v[r * n + m];
        }
    }
    SymmetricEigen { values, vectors }
}

/// Ascending eigenvalues of a Hermitian matrix (upper triangle is read).
///
/// Uses the real embedding `[[A, -B], [B, A]]` of `A + iB`, whose spectrum is
/// that of the Hermitian matrix with every eigenvalue doubled.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let n = m.dim();
    let big = 2 * n;
    let mut e = vec![T::zero(); big * big];
    for i in 0..n {
        for j in i..n {
            let z = m[(i, j)];
            let (re, im) = if i == j { (z.re, T::zero()) } else { (z.re, z.im) };
            // upper triangle of [[A, -B], [B, A]]
            e[i * big + j] = re;
            e[(i + n) * big + (j + n)] = re;
            e[i * big + (j + n)] = -im;
            // B is antisymmetric, so the (j, i + n) entry is -B_ji = B_ij
            e[j * big + (i + n)] = im;
        }
    }
    let eig = symmetric_eigen(big, &e);
    eig.values.into_iter().step_by(2).collect()
}
