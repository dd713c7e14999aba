//! Stochastic master equation for continuous, inefficient density
//! measurement of every site:
//!
//! ```text
//! d rho = -i[H, rho] dt + sum_i k (n_i rho n_i - {n_i, rho}/2) dt
//!       + sum_i sqrt(eta k) (n_i rho + rho n_i - 2 <n_i> rho) dW_i
//! ```
//!
//! The production integrator is a trace-normalized Kraus update that keeps
//! every state physical. [`euler_maruyama_step`] transcribes the equation
//! literally and only serves as a cross-check.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{conjugate_into, matmul_into, CMatrix};
use crate::params::{Scheme, SimulationParams};
use crate::scalar::Real;
use crate::state::{build_hamiltonian, build_propagator, DensityMatrix, Hamiltonian, Propagator};

/// Unnormalized traces at or below this value abort the step.
pub const BREAKDOWN_TRACE: f64 = 1e-12;

/// One step's worth of independent Gaussian increments, one per site, each
/// with mean 0 and variance `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerIncrements<T> {
    pub values: Vec<T>,
    pub dt: T,
}

impl<T: Real> WienerIncrements<T> {
    pub fn zeros(len: usize, dt: T) -> Self {
        Self { values: vec![T::zero(); len], dt }
    }

    /// The two-site combined increment `(dW_1 - dW_2) / sqrt(2)`.
    pub fn two_site_combined(&self) -> T {
        (self.values[0] - self.values[1]) * T::FRAC_1_SQRT_2()
    }
}

/// Draws `len` increments in site order.
pub fn sample_wiener<T: Real, R: Rng + ?Sized>(rng: &mut R, len: usize, dt: T) -> WienerIncrements<T> {
    let mut inc = WienerIncrements::zeros(len, dt);
    fill_wiener(rng, &mut inc);
    inc
}

pub(crate) fn fill_wiener<T: Real, R: Rng + ?Sized>(rng: &mut R, inc: &mut WienerIncrements<T>) {
    let sd = inc.dt.sqrt();
    for v in &mut inc.values {
        let z: f64 = rng.sample(StandardNormal);
        *v = T::of(z) * sd;
    }
}

/// Seed of trajectory `index` under `master`. SplitMix64 finalizer, so nearby
/// indices give unrelated streams.
pub fn trajectory_seed(master: u64, index: usize) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(master ^ mix(index as u64))
}

/// Random stream of one trajectory.
pub fn trajectory_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Measurement Kraus operator. Diagonal in the site basis and Hermitian, so
/// only the real diagonal is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausOperator<T> {
    diag: Vec<T>,
}

impl<T: Real> KrausOperator<T> {
    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn as_complex(&self) -> Vec<Complex<T>> {
        self.diag.iter().map(|&d| Complex::new(d, T::zero())).collect()
    }
}

/// `M = (1 - k dt/2) + sum_i n_i [ sqrt(eta k) (2 sqrt(eta k) <n_i> dt + dW_i)
///      + (eta k / 2) (dW_i^2 - dt) ]`, with `<n_i>` taken from `rho`.
pub fn kraus_operator<T: Real>(
    rho: &DensityMatrix<T>,
    k: T,
    eta: T,
    dt: T,
    dw: &WienerIncrements<T>,
) -> KrausOperator<T> {
    let mut diag = vec![T::zero(); rho.dim()];
    fill_kraus_diag(rho.matrix(), k, eta, dt, &dw.values, &mut diag);
    KrausOperator { diag }
}

fn fill_kraus_diag<T: Real>(rho: &CMatrix<T>, k: T, eta: T, dt: T, dw: &[T], out: &mut [T]) {
    let base = T::one() - k * dt * T::of(0.5);
    let ek = eta * k;
    let sq = ek.sqrt();
    let half_ek = ek * T::of(0.5);
    for (i, m) in out.iter_mut().enumerate() {
        let n_i = rho[(i, i)].re;
        let w = dw[i];
        *m = base + sq * (T::of(2.0) * sq * n_i * dt + w) + half_ek * (w * w - dt);
    }
}

/// Reusable buffers for repeated Kraus updates of one trajectory.
#[derive(Debug, Clone)]
pub struct KrausStepper<T> {
    scheme: Scheme,
    k: T,
    eta: T,
    dt: T,
    propagator: Propagator<T>,
    hamiltonian: Hamiltonian<T>,
    kraus: Vec<T>,
    full_kraus: CMatrix<T>,
    scratch: CMatrix<T>,
    sigma: CMatrix<T>,
}

impl<T: Real> KrausStepper<T> {
    pub fn new(params: &SimulationParams<T>) -> Result<Self> {
        let hamiltonian = build_hamiltonian(params.chain_length, params.hopping)?;
        let propagator = build_propagator(&hamiltonian, params.dt)?;
        Ok(Self::from_parts(hamiltonian, propagator, params.k, params.eta, params.dt, params.scheme))
    }

    pub fn from_parts(
        hamiltonian: Hamiltonian<T>,
        propagator: Propagator<T>,
        k: T,
        eta: T,
        dt: T,
        scheme: Scheme,
    ) -> Self {
        let n = hamiltonian.dim();
        Self {
            scheme,
            k,
            eta,
            dt,
            propagator,
            hamiltonian,
            kraus: vec![T::zero(); n],
            full_kraus: CMatrix::zeros(n),
            scratch: CMatrix::zeros(n),
            sigma: CMatrix::zeros(n),
        }
    }

    pub fn propagator(&self) -> &Propagator<T> {
        &self.propagator
    }

    pub fn hamiltonian(&self) -> &Hamiltonian<T> {
        &self.hamiltonian
    }

    /// Advances `rho` by one step in place.
    pub fn step(&mut self, rho: &mut DensityMatrix<T>, dw: &WienerIncrements<T>) -> Result<()> {
        match self.scheme {
            Scheme::Improved => self.step_improved(rho, dw),
            Scheme::Plain => self.step_plain(rho, dw),
        }
    }

    fn step_improved(&mut self, rho: &mut DensityMatrix<T>, dw: &WienerIncrements<T>) -> Result<()> {
        let n = rho.dim();
        fill_kraus_diag(rho.matrix(), self.k, self.eta, self.dt, &dw.values, &mut self.kraus);
        let u = self.propagator.unitary();
        conjugate_into(u, rho.matrix(), &mut self.scratch, &mut self.sigma);

        // tau = M sigma M + (1 - eta) k dt diag(sigma)
        let dephase = (T::one() - self.eta) * self.k * self.dt;
        let mut trace = T::zero();
        let s = self.sigma.as_mut_slice();
        for i in 0..n {
            let mi = self.kraus[i];
            let diag = s[i * n + i].re;
            for j in 0..n {
                s[i * n + j] = s[i * n + j].scale(mi * self.kraus[j]);
            }
            let d = mi * mi * diag + dephase * diag;
            s[i * n + i] = Complex::new(d, T::zero());
            trace += d;
        }
        check_trace(trace)?;
        conjugate_into(u, &self.sigma, &mut self.scratch, rho.matrix_mut());
        rho.matrix_mut().scale(T::one() / trace);
        Ok(())
    }

    fn step_plain(&mut self, rho: &mut DensityMatrix<T>, dw: &WienerIncrements<T>) -> Result<()> {
        let n = rho.dim();
        fill_kraus_diag(rho.matrix(), self.k, self.eta, self.dt, &dw.values, &mut self.kraus);
        // M~ = M - i H dt
        let h = self.hamiltonian.as_real_slice();
        for i in 0..n {
            for j in 0..n {
                let re = if i == j { self.kraus[i] } else { T::zero() };
                self.full_kraus[(i, j)] = Complex::new(re, -h[i * n + j] * self.dt);
            }
        }
        let dephase = (T::one() - self.eta) * self.k * self.dt;
        let diag: Vec<T> = (0..n).map(|i| rho.matrix()[(i, i)].re).collect();
        conjugate_into(&self.full_kraus, rho.matrix(), &mut self.scratch, &mut self.sigma);
        let mut trace = T::zero();
        for i in 0..n {
            let d = self.sigma[(i, i)].re + dephase * diag[i];
            self.sigma[(i, i)] = Complex::new(d, T::zero());
            trace += d;
        }
        check_trace(trace)?;
        let m = rho.matrix_mut();
        m.as_mut_slice().copy_from_slice(self.sigma.as_slice());
        m.scale(T::one() / trace);
        m.hermitize();
        Ok(())
    }
}

fn check_trace<T: Real>(trace: T) -> Result<()> {
    if !trace.is_finite() || trace <= T::of(BREAKDOWN_TRACE) {
        return Err(Error::NumericBreakdown { trace: trace.to_f64_lossy(), threshold: BREAKDOWN_TRACE });
    }
    Ok(())
}

/// One improved Kraus update:
/// `rho' = U (M sigma M + (1 - eta) k dt diag(sigma)) U† / Tr[...]` with
/// `sigma = U rho U†` and `U = exp(-i H dt/2)`.
pub fn kraus_step<T: Real>(
    rho: &DensityMatrix<T>,
    propagator: &Propagator<T>,
    k: T,
    eta: T,
    dt: T,
    dw: &WienerIncrements<T>,
) -> Result<DensityMatrix<T>> {
    let n = rho.dim();
    let m = kraus_operator(rho, k, eta, dt, dw);
    let u = propagator.unitary();
    let mut scratch = CMatrix::zeros(n);
    let mut sigma = CMatrix::zeros(n);
    conjugate_into(u, rho.matrix(), &mut scratch, &mut sigma);
    let dephase = (T::one() - eta) * k * dt;
    let mut tau = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            tau[(i, j)] = sigma[(i, j)].scale(m.diag[i] * m.diag[j]);
        }
        tau[(i, i)] += Complex::new(dephase * sigma[(i, i)].re, T::zero());
    }
    let trace = tau.trace().re;
    check_trace(trace)?;
    let mut out = CMatrix::zeros(n);
    conjugate_into(u, &tau, &mut scratch, &mut out);
    out.scale(T::one() / trace);
    out.hermitize();
    Ok(DensityMatrix::from_matrix(out))
}

/// One plain Kraus update, `M~ = M - i H dt` with no propagator splitting.
pub fn plain_kraus_step<T: Real>(
    rho: &DensityMatrix<T>,
    hamiltonian: &Hamiltonian<T>,
    k: T,
    eta: T,
    dt: T,
    dw: &WienerIncrements<T>,
) -> Result<DensityMatrix<T>> {
    let propagator = build_propagator(hamiltonian, dt)?;
    let mut stepper = KrausStepper::from_parts(hamiltonian.clone(), propagator, k, eta, dt, Scheme::Plain);
    let mut out = rho.clone();
    stepper.step(&mut out, dw)?;
    Ok(out)
}

fn projector<T: Real>(n: usize, i: usize) -> CMatrix<T> {
    let mut p = CMatrix::zeros(n);
    p[(i, i)] = Complex::new(T::one(), T::zero());
    p
}

fn axpy<T: Real>(acc: &mut CMatrix<T>, a: Complex<T>, x: &CMatrix<T>) {
    for (o, v) in acc.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *o += a * *v;
    }
}

/// Right-hand side of the equation, split into its deterministic drift (per
/// unit time) and the coefficient matrix of each `dW_i`. Literal dense
/// transcription with explicit projector matrices.
pub fn sme_terms<T: Real>(
    rho: &DensityMatrix<T>,
    hamiltonian: &Hamiltonian<T>,
    k: T,
    eta: T,
) -> (CMatrix<T>, Vec<CMatrix<T>>) {
    let n = rho.dim();
    let r = rho.matrix();
    let h = hamiltonian.to_complex();
    let minus_i = Complex::new(T::zero(), -T::one());
    let half = Complex::new(T::of(0.5), T::zero());
    let kk = Complex::new(k, T::zero());

    let mut drift = CMatrix::zeros(n);
    axpy(&mut drift, minus_i, &h.matmul(r));
    axpy(&mut drift, -minus_i, &r.matmul(&h));

    let sq = Complex::new((eta * k).sqrt(), T::zero());
    let mut noise = Vec::with_capacity(n);
    let mut tmp = CMatrix::zeros(n);
    for i in 0..n {
        let p = projector::<T>(n, i);
        let pr = p.matmul(r);
        let rp = r.matmul(&p);
        matmul_into(&pr, &p, &mut tmp);
        axpy(&mut drift, kk, &tmp);
        axpy(&mut drift, -kk * half, &pr);
        axpy(&mut drift, -kk * half, &rp);

        let expect = r.matmul(&p).trace();
        let mut b = CMatrix::zeros(n);
        axpy(&mut b, sq, &pr);
        axpy(&mut b, sq, &rp);
        axpy(&mut b, -sq * expect * Complex::new(T::of(2.0), T::zero()), r);
        noise.push(b);
    }
    (drift, noise)
}

/// Euler–Maruyama step `rho + d rho` of the literal equation. No
/// renormalization; positivity is not guaranteed.
pub fn euler_maruyama_step<T: Real>(
    rho: &DensityMatrix<T>,
    hamiltonian: &Hamiltonian<T>,
    k: T,
    eta: T,
    dt: T,
    dw: &WienerIncrements<T>,
) -> DensityMatrix<T> {
    let (drift, noise) = sme_terms(rho, hamiltonian, k, eta);
    let mut out = rho.matrix().clone();
    axpy(&mut out, Complex::new(dt, T::zero()), &drift);
    for (b, &w) in noise.iter().zip(&dw.values) {
        axpy(&mut out, Complex::new(w, T::zero()), b);
    }
    DensityMatrix::from_matrix(out)
}

/// Deterministic Lindblad drift `-i[H, rho] + k (diag(rho) - rho)` written in
/// closed form for projector jump operators.
pub fn lindblad_drift<T: Real>(rho: &DensityMatrix<T>, hamiltonian: &Hamiltonian<T>, k: T) -> CMatrix<T> {
    let n = rho.dim();
    let r = rho.matrix();
    let h = hamiltonian.as_real_slice();
    let mut out = CMatrix::zeros(n);
    for a in 0..n {
        for b in 0..n {
            let mut comm: Complex<T> = Complex::zero();
            for c in 0..n {
                comm += r[(c, b)].scale(h[a * n + c]) - r[(a, c)].scale(h[c * n + b]);
            }
            let mut v = Complex::new(comm.im, -comm.re); // -i * comm
            if a != b {
                v -= r[(a, b)].scale(k);
            }
            out[(a, b)] = v;
        }
    }
    out
}
