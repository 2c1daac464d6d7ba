//! The evolving Gaussian wavefunction.
//!
//! A Gaussian in a quadratic potential stays Gaussian, so the full state is
//! the pair of complex numbers `(A, B)` in
//!
//! ```text
//! Psi(xi, tau) = A(tau) exp(-B(tau) xi^2)
//! ```
//!
//! `Re B > 0` is required for normalizability; `Im B` encodes the
//! phase-front curvature. With the unit-measure convention the norm is
//! `|A|^2 sqrt(pi / (2 Re B))`, equal to 1 for a unitary evolution.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{as_f64, fp, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState<T> {
    /// Complex amplitude `A`.
    pub a: Complex<T>,
    /// Complex width parameter `B`; `b.re > 0`.
    pub b: Complex<T>,
    /// Dimensionless time of the snapshot.
    pub tau: T,
}

impl<T: Real> GaussianState<T> {
    /// Build a state, validating finiteness and `Re B > 0`.
    pub fn new(a: Complex<T>, b: Complex<T>, tau: T) -> Result<Self> {
        if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite())
            || !tau.is_finite()
        {
            return Err(Error::InvalidParams("non-finite state component".into()));
        }
        if b.re <= T::zero() {
            return Err(Error::InvalidParams(format!(
                "width parameter must have Re B > 0, got {}",
                as_f64(b.re)
            )));
        }
        Ok(Self { a, b, tau })
    }

    /// `integral |Psi|^2 dxi = |A|^2 sqrt(pi / (2 Re B))`.
    pub fn norm(&self) -> T {
        self.a.norm_sqr() * (T::PI() / (fp::<T>(2.0) * self.b.re)).sqrt()
    }

    /// `| norm - 1 |`, the unitarity diagnostic.
    pub fn norm_residual(&self) -> T {
        (self.norm() - T::one()).abs()
    }
}

/// Oscillator ground state: `A = pi^(-1/4)`, `B = 1/2`, at `tau = 0`.
pub fn ground_state<T: Real>() -> GaussianState<T> {
    GaussianState {
        a: Complex::new(fp::<T>(core::f64::consts::PI).powf(fp(-0.25)), T::zero()),
        b: Complex::new(fp(0.5), T::zero()),
        tau: T::zero(),
    }
}

/// One observability snapshot along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample<T> {
    pub tau: T,
    pub state: GaussianState<T>,
    /// Drive value `g(tau)`.
    pub g: T,
    pub norm_residual: T,
    /// Instantaneous `<H_0>` in units of hbar*omega_0.
    pub energy: T,
}
