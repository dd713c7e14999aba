//! Single-particle states on an open chain: Hamiltonian, half-step
//! propagator, density matrices and their observables.
//!
//! Sites are numbered `1..=L` wherever they appear in the public API.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, symmetric_eigen, CMatrix, SymmetricEigen};
use crate::scalar::Real;

/// Tight-binding hopping Hamiltonian `H = J/2 sum_i (a_i^† a_{i+1} + h.c.)`
/// restricted to the one-particle sector, with open boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian<T> {
    dim: usize,
    hopping: T,
    /// Real symmetric, row-major.
    entries: Vec<T>,
}

impl<T: Real> Hamiltonian<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hopping(&self) -> T {
        self.hopping
    }

    /// Entry `(i, j)` with 1-based site indices.
    pub fn entry(&self, i: usize, j: usize) -> T {
        self.entries[(i - 1) * self.dim + (j - 1)]
    }

    pub fn as_real_slice(&self) -> &[T] {
        &self.entries
    }

    pub fn to_complex(&self) -> CMatrix<T> {
        CMatrix::from_real(self.dim, &self.entries).expect("square by construction")
    }
}

pub fn build_hamiltonian<T: Real>(dim: usize, hopping: T) -> Result<Hamiltonian<T>> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!("chain length must be >= 2, got {dim}")));
    }
    if !hopping.is_finite() {
        return Err(Error::NonFinite(format!("hopping amplitude {hopping}")));
    }
    let half = hopping * T::of(0.5);
    let mut entries = vec![T::zero(); dim * dim];
    for i in 0..dim - 1 {
        entries[i * dim + i + 1] = half;
        entries[(i + 1) * dim + i] = half;
    }
    Ok(Hamiltonian { dim, hopping, entries })
}

/// `U = exp(-i H halfstep)`, the unitary applied on either side of a Kraus
/// update. `halfstep` is `dt / 2`.
#[derive(Debug, Clone)]
pub struct Propagator<T> {
    halfstep: T,
    unitary: CMatrix<T>,
    adjoint: CMatrix<T>,
    eigen: SymmetricEigen<T>,
}

impl<T: Real> Propagator<T> {
    pub fn dim(&self) -> usize {
        self.unitary.dim()
    }

    pub fn halfstep(&self) -> T {
        self.halfstep
    }

    pub fn unitary(&self) -> &CMatrix<T> {
        &self.unitary
    }

    pub fn adjoint(&self) -> &CMatrix<T> {
        &self.adjoint
    }

    /// Eigenvalues of the Hamiltonian this propagator was built from.
    pub fn energies(&self) -> &[T] {
        &self.eigen.values
    }

    /// `max |U U† - 1|`.
    pub fn unitarity_error(&self) -> T {
        let n = self.dim();
        self.unitary.matmul(&self.adjoint).max_abs_diff(&CMatrix::identity(n))
    }

    /// Applies `U` on both sides: `rho -> U rho U†`.
    pub fn apply(&self, rho: &DensityMatrix<T>) -> DensityMatrix<T> {
        DensityMatrix::from_matrix(self.unitary.matmul(&rho.matrix).matmul(&self.adjoint))
    }
}

/// Builds `U = exp(-i H dt / 2)` from the eigendecomposition of `H`.
pub fn build_propagator<T: Real>(hamiltonian: &Hamiltonian<T>, dt: T) -> Result<Propagator<T>> {
    if !dt.is_finite() {
        return Err(Error::NonFinite(format!("time step {dt}")));
    }
    if dt <= T::zero() {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    if hamiltonian.entries.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("Hamiltonian entry".into()));
    }
    let n = hamiltonian.dim;
    let halfstep = dt * T::of(0.5);
    let eigen = symmetric_eigen(n, &hamiltonian.entries);
    let phases: Vec<Complex<T>> = eigen
        .values
        .iter()
        .map(|&e| Complex::from_polar(T::one(), -e * halfstep))
        .collect();
    let mut unitary = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex::zero();
            for (m, &ph) in phases.iter().enumerate() {
                acc += ph.scale(eigen.vectors[i * n + m] * eigen.vectors[j * n + m]);
            }
            unitary[(i, j)] = acc;
        }
    }
    if !unitary.is_finite() {
        return Err(Error::NonFinite("propagator entry".into()));
    }
    let adjoint = unitary.adjoint();
    Ok(Propagator { halfstep, unitary, adjoint, eigen })
}

/// Density matrix of one particle on `L` sites, in the site basis
/// `|j> = a_j^† |0>`.
///
/// Construction does not enforce physicality; use [`validate_state`] to audit.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    matrix: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn from_matrix(matrix: CMatrix<T>) -> Self {
        Self { matrix }
    }

    /// Builds a state from row-major entries.
    pub fn from_row_major(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        CMatrix::from_row_major(dim, entries)
            .map(Self::from_matrix)
            .ok_or_else(|| Error::InvalidDimension(format!("expected {} entries", dim * dim)))
    }

    /// `|psi><psi|` for an amplitude vector; the vector is normalized first.
    pub fn pure(amplitudes: &[Complex<T>]) -> Result<Self> {
        let n = amplitudes.len();
        if n < 2 {
            return Err(Error::InvalidDimension(format!("chain length must be >= 2, got {n}")));
        }
        let norm2: T = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !(norm2 > T::zero()) {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = (amplitudes[i] * amplitudes[j].conj()).unscale(norm2);
            }
        }
        Ok(Self::from_matrix(m))
    }

    /// The infinite-temperature state `1/L`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let mut m = CMatrix::identity(dim);
        m.scale(T::one() / T::from_usize_lossy(dim));
        Self::from_matrix(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `<i|rho|j>` with 1-based site indices.
    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.matrix[(i - 1, j - 1)]
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut CMatrix<T> {
        &mut self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    /// `Tr rho^2`, computed as the squared Frobenius norm.
    pub fn purity(&self) -> T {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// The dephased state `diag(rho)`.
    pub fn dephased(&self) -> Self {
        let n = self.dim();
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = self.matrix[(i, i)];
        }
        Self::from_matrix(m)
    }

    /// Spatial mirror image, site `i` mapped to `L + 1 - i`.
    pub fn mirrored(&self) -> Self {
        let n = self.dim();
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(n - 1 - i, n - 1 - j)] = self.matrix[(i, j)];
            }
        }
        Self::from_matrix(m)
    }
}

pub fn init_localized<T: Real>(dim: usize, site: usize) -> Result<DensityMatrix<T>> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!("chain length must be >= 2, got {dim}")));
    }
    if site == 0 || site > dim {
        return Err(Error::InvalidArgument(format!("site {site} outside 1..={dim}")));
    }
    let mut m = CMatrix::zeros(dim);
    m[(site - 1, site - 1)] = Complex::one();
    Ok(DensityMatrix::from_matrix(m))
}

/// `<n_i> = Tr[rho a_i^† a_i]`; element 0 is site 1.
pub fn local_densities<T: Real>(rho: &DensityMatrix<T>) -> Vec<T> {
    (0..rho.dim()).map(|i| rho.matrix[(i, i)].re).collect()
}

/// `sum_i <n_i> (i - origin)^2` with 1-based `origin`.
pub fn position_variance<T: Real>(rho: &DensityMatrix<T>, origin: usize) -> T {
    let o = origin as f64;
    local_densities(rho)
        .into_iter()
        .enumerate()
        .map(|(i, n)| {
            let d = T::of((i + 1) as f64 - o);
            n * d * d
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    pub trace: T,
    pub hermiticity: T,
    pub positivity: T,
    pub purity: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            trace: T::of(1e-10),
            hermiticity: T::of(1e-10),
            positivity: T::of(1e-8),
            purity: T::of(1e-10),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<T> {
    pub hermiticity_deviation: T,
    pub trace_deviation: T,
    pub min_eigenvalue: T,
    pub purity: T,
    pub hermiticity_ok: bool,
    pub trace_ok: bool,
    pub positivity_ok: bool,
    pub purity_ok: bool,
}

impl<T: Real> ValidationReport<T> {
    pub fn is_valid(&self) -> bool {
        self.hermiticity_ok && self.trace_ok && self.positivity_ok && self.purity_ok
    }

    pub fn violations(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if !self.hermiticity_ok {
            v.push("hermiticity");
        }
        if !self.trace_ok {
            v.push("trace");
        }
        if !self.positivity_ok {
            v.push("positivity");
        }
        if !self.purity_ok {
            v.push("purity");
        }
        v
    }
}

/// Audits the density matrix invariants. Never fails; violations are flagged
/// in the report.
pub fn validate_state<T: Real>(rho: &DensityMatrix<T>, tol: &Tolerances<T>) -> ValidationReport<T> {
    let herm = rho.matrix.hermiticity_deviation();
    let trace_dev = (rho.matrix.trace() - Complex::one()).norm();
    let min_eig = hermitian_eigenvalues(&rho.matrix)
        .first()
        .copied()
        .unwrap_or_else(T::nan);
    let purity = rho.purity();
    let lower = T::one() / T::from_usize_lossy(rho.dim().max(1)) - tol.purity;
    let upper = T::one() + tol.purity;
    ValidationReport {
        hermiticity_deviation: herm,
        trace_deviation: trace_dev,
        min_eigenvalue: min_eig,
        purity,
        hermiticity_ok: herm <= tol.hermiticity,
        trace_ok: trace_dev <= tol.trace,
        positivity_ok: min_eig >= -tol.positivity,
        purity_ok: purity >= lower && purity <= upper,
    }
}
