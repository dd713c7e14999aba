//! Two-site reductions: Bloch vector picture, the Bloch stochastic
//! differential equation, and closed-form reference results used to check
//! the general integrator.
//!
//! Poles: `|1>` is the north pole `z = +1`, `|2>` the south pole `z = -1`.

use num_complex::Complex;

use crate::entanglement::config_coherence;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::DensityMatrix;

/// Slack allowed beyond the unit sphere when converting back to a state.
pub const BLOCH_RADIUS_TOL: f64 = 1e-9;

/// Largest `|x|` a sample may have and still count as lying on the `x = 0` disk.
pub const DISK_X_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> BlochVector<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn norm_sqr(&self) -> T {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }
}

/// `rho = (1/2) [[1 + z, x - iy], [x + iy, 1 - z]]`, read backwards.
pub fn bloch_from_rho<T: Real>(rho: &DensityMatrix<T>) -> Result<BlochVector<T>> {
    if rho.dim() != 2 {
        return Err(Error::InvalidDimension(format!("Bloch vector needs 2 sites, got {}", rho.dim())));
    }
    let two = T::of(2.0);
    let r21 = rho.entry(2, 1);
    Ok(BlochVector {
        x: two * r21.re,
        y: two * r21.im,
        z: rho.entry(1, 1).re - rho.entry(2, 2).re,
    })
}

pub fn rho_from_bloch<T: Real>(v: &BlochVector<T>) -> Result<DensityMatrix<T>> {
    if !(v.norm() <= T::one() + T::of(BLOCH_RADIUS_TOL)) {
        return Err(Error::InvalidArgument(format!("Bloch vector outside the unit ball: |v| = {}", v.norm())));
    }
    let h = T::of(0.5);
    DensityMatrix::from_row_major(
        2,
        vec![
            Complex::new(h * (T::one() + v.z), T::zero()),
            Complex::new(h * v.x, -h * v.y),
            Complex::new(h * v.x, h * v.y),
            Complex::new(h * (T::one() - v.z), T::zero()),
        ],
    )
}

/// Euler–Maruyama step of
///
/// ```text
/// dx = -x k dt - x z sqrt(2 eta k) dW
/// dy = -y k dt - z dt - y z sqrt(2 eta k) dW
/// dz =  y dt + (1 - z^2) sqrt(2 eta k) dW
/// ```
///
/// `dw` is the combined increment `(dW_1 - dW_2) / sqrt(2)`.
pub fn bloch_sde_step<T: Real>(v: &BlochVector<T>, k: T, eta: T, dt: T, dw: T) -> BlochVector<T> {
    let s = (T::of(2.0) * eta * k).sqrt() * dw;
    let BlochVector { x, y, z } = *v;
    BlochVector {
        x: x - x * k * dt - x * z * s,
        y: y - y * k * dt - z * dt - y * z * s,
        z: z + y * dt + (T::one() - z * z) * s,
    }
}

/// Configuration coherence of the two-site chain at `eta = 0`, starting from
/// `|1><1|`. Underdamped for `k < 2`, critical at `k = 2`, overdamped above.
pub fn analytical_cn_eta0<T: Real>(k: T, t: T) -> T {
    let two = T::of(2.0);
    let half_k = k / two;
    let decay = (-k * t).exp();
    if k < two {
        let w2 = T::one() - half_k * half_k;
        let w = w2.sqrt();
        decay / (two * w2) * (w * t).sin().powi(2)
    } else if k == two {
        T::of(0.5) * t * t * (-two * t).exp()
    } else {
        let g2 = half_k * half_k - T::one();
        let g = g2.sqrt();
        decay / (two * g2) * (g * t).sinh().powi(2)
    }
}

/// Stationary second moments of the linearized small-`eta` Bloch equations
/// and the resulting trajectory-averaged coherence.
///
/// Only meaningful for `eta << 1`; `zz = eta (1 - k)` turns negative for
/// `k > 1`, where the linearization no longer describes a variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryMoments<T> {
    pub yy: T,
    pub zz: T,
    pub yz: T,
    pub cn_mean: T,
}

pub fn small_eta_stationary_moments<T: Real>(k: T, eta: T) -> StationaryMoments<T> {
    StationaryMoments {
        yy: eta,
        zz: eta * (T::one() - k),
        yz: -eta * k,
        cn_mean: eta * T::of(0.5),
    }
}

/// Mean coherence of pure two-site states uniformly distributed on the
/// great circle `cos(theta)|1> + i sin(theta)|2>`.
pub fn avg_pure_state_coherence<T: Real>() -> T {
    T::of(0.25)
}

/// Trapezoid-rule average of the coherence over `nodes` equally spaced
/// angles of the great circle, evaluated on explicit density matrices.
pub fn pure_state_coherence_quadrature<T: Real>(nodes: usize) -> Result<T> {
    if nodes == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one node".into()));
    }
    let step = T::TAU() / T::from_usize_lossy(nodes);
    let mut acc = T::zero();
    for i in 0..nodes {
        let theta = step * T::from_usize_lossy(i);
        let rho = DensityMatrix::pure(&[
            Complex::new(theta.cos(), T::zero()),
            Complex::new(T::zero(), theta.sin()),
        ])?;
        acc += config_coherence(&rho, 1)?;
    }
    // periodic integrand: the trapezoid rule reduces to the plain mean
    Ok(acc / T::from_usize_lossy(nodes))
}

/// Histogram of Bloch vectors on the `x = 0` disk over `(y, z) in [-1, 1]^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochDiskHistogram {
    bins: usize,
    /// `counts[iy * bins + iz]`
    counts: Vec<u64>,
    total: u64,
}

impl BlochDiskHistogram {
    pub const DEFAULT_BINS: usize = 101;

    pub fn new(bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidArgument("histogram needs at least one bin".into()));
        }
        Ok(Self { bins, counts: vec![0; bins * bins], total: 0 })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn bin_width(&self) -> f64 {
        2.0 / self.bins as f64
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        -1.0 + (i as f64 + 0.5) * self.bin_width()
    }

    fn bin_of(&self, c: f64) -> usize {
        let i = ((c + 1.0) / self.bin_width()).floor();
        (i.max(0.0) as usize).min(self.bins - 1)
    }

    pub fn add<T: Real>(&mut self, v: &BlochVector<T>) -> Result<()> {
        let x = v.x.to_f64_lossy();
        if !(x.abs() <= DISK_X_TOL) {
            return Err(Error::ContractViolation(format!("sample off the x = 0 disk: x = {x:e}")));
        }
        let iy = self.bin_of(v.y.to_f64_lossy());
        let iz = self.bin_of(v.z.to_f64_lossy());
        self.counts[iy * self.bins + iz] += 1;
        self.total += 1;
        Ok(())
    }

    pub fn count(&self, iy: usize, iz: usize) -> u64 {
        self.counts[iy * self.bins + iz]
    }

    /// Fraction of samples in bin `(iy, iz)`.
    pub fn probability(&self, iy: usize, iz: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(iy, iz) as f64 / self.total as f64
        }
    }

    /// Probability density, normalized so that it integrates to one over the square.
    pub fn density(&self, iy: usize, iz: usize) -> f64 {
        self.probability(iy, iz) / (self.bin_width() * self.bin_width())
    }

    /// Whether the bin lies entirely outside the unit disk.
    pub fn is_exterior(&self, iy: usize, iz: usize) -> bool {
        let w = self.bin_width();
        let nearest = |i: usize| {
            let lo = -1.0 + i as f64 * w;
            let hi = lo + w;
            if lo > 0.0 {
                lo
            } else if hi < 0.0 {
                -hi
            } else {
                0.0
            }
        };
        let (dy, dz) = (nearest(iy), nearest(iz));
        dy * dy + dz * dz > 1.0 + BLOCH_RADIUS_TOL
    }

    pub fn exterior_mass(&self) -> f64 {
        let mut m = 0.0;
        for iy in 0..self.bins {
            for iz in 0..self.bins {
                if self.is_exterior(iy, iz) {
                    m += self.probability(iy, iz);
                }
            }
        }
        m
    }

    /// Mass of the bins whose centers lie within `radius` of `(y, z)`.
    pub fn mass_within(&self, y: f64, z: f64, radius: f64) -> f64 {
        let mut m = 0.0;
        for iy in 0..self.bins {
            for iz in 0..self.bins {
                let dy = self.bin_center(iy) - y;
                let dz = self.bin_center(iz) - z;
                if dy * dy + dz * dz <= radius * radius {
                    m += self.probability(iy, iz);
                }
            }
        }
        m
    }
}

/// Bins a set of final Bloch vectors. Fails if any sample leaves the `x = 0`
/// disk.
pub fn bloch_disk_histogram<'a, T: Real + 'a>(
    samples: impl IntoIterator<Item = &'a BlochVector<T>>,
    bins: usize,
) -> Result<BlochDiskHistogram> {
    let mut h = BlochDiskHistogram::new(bins)?;
    for v in samples {
        h.add(v)?;
    }
    Ok(h)
}
