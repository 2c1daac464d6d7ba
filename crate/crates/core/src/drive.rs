//! Drive parameters and simulation configuration.
//!
//! Everything is expressed in dimensionless oscillator units, hbar = m =
//! omega_0 = 1: position xi, time tau, energies in units of hbar*omega_0.
//! The frequency modulation is
//!
//! ```text
//! g(tau) = 1 + h sin((2 + eps_bar) tau)   for 0 < tau < nu*pi/(2 + eps_bar)
//!        = 1                              otherwise
//! ```
//!
//! so the potential switches on and off continuously: the drive phase at
//! the window end is nu*pi, where the sine vanishes.

use crate::error::{Error, Result};
use crate::scalar::{as_f64, fp, Real};

/// Drive triple `(h, eps_bar, nu)`.
///
/// `h` is the modulation amplitude, `eps_bar` the detuning of the drive
/// frequency from twice the natural frequency, and `nu` the number of
/// drive half-cycles in the window. The detuning-to-amplitude ratio
/// `r = eps_bar / h` locates the parametric-resonance region `|r| < 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams<T> {
    h: T,
    eps_bar: T,
    nu: u32,
}

impl<T: Real> DriveParams<T> {
    /// Build from the canonical triple, validating the invariants
    /// `0 <= h < 1`, `nu >= 1` and `2 + eps_bar > 0`.
    ///
    /// Negative `h` is rejected rather than folded into a drive phase
    /// shift, so that `r = eps_bar / h` stays unambiguous.
    pub fn new(h: T, eps_bar: T, nu: u32) -> Result<Self> {
        if !h.is_finite() || h < T::zero() || h >= T::one() {
            return Err(Error::InvalidParams(format!(
                "drive amplitude h must satisfy 0 <= h < 1, got {}",
                as_f64(h)
            )));
        }
        if !eps_bar.is_finite() || fp::<T>(2.0) + eps_bar <= T::zero() {
            return Err(Error::InvalidParams(format!(
                "detuning eps_bar must satisfy 2 + eps_bar > 0, got {}",
                as_f64(eps_bar)
            )));
        }
        if nu < 1 {
            return Err(Error::InvalidParams("nu must be >= 1".into()));
        }
        Ok(Self { h, eps_bar, nu })
    }

    /// Build from `(h, r, nu)` with `eps_bar = r * h`. Requires `h > 0`,
    /// otherwise the ratio does not determine a detuning.
    pub fn from_ratio(h: T, r: T, nu: u32) -> Result<Self> {
        if h == T::zero() {
            return Err(Error::UndefinedRatio);
        }
        if !r.is_finite() {
            return Err(Error::InvalidParams(format!(
                "ratio r must be finite, got {}",
                as_f64(r)
            )));
        }
        Self::new(h, r * h, nu)
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn eps_bar(&self) -> T {
        self.eps_bar
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    /// `r = eps_bar / h`; `None` when `h = 0`.
    pub fn ratio(&self) -> Option<T> {
        (self.h > T::zero()).then(|| self.eps_bar / self.h)
    }

    fn two_plus_eps(&self) -> T {
        fp::<T>(2.0) + self.eps_bar
    }

    /// Dimensionless frequency modulation `g(tau)`.
    ///
    /// Total in `tau`: exactly 1 outside the open window `(0, tau_final)`,
    /// and `1 + h sin((2 + eps_bar) tau)` inside, hence always within
    /// `[1 - h, 1 + h]` and continuous across both window edges.
    pub fn g(&self, tau: T) -> T {
        if tau > T::zero() && tau < self.tau_final() {
            T::one() + self.h * (self.two_plus_eps() * tau).sin()
        } else {
            T::one()
        }
    }

    /// Window length `tau_f = nu * pi / (2 + eps_bar)`.
    pub fn tau_final(&self) -> T {
        fp::<T>(self.nu as f64) * T::PI() / self.two_plus_eps()
    }

    /// Period of the modulation, `2 pi / (2 + eps_bar)`.
    pub fn drive_period(&self) -> T {
        fp::<T>(2.0) * T::PI() / self.two_plus_eps()
    }
}

/// Numerical knobs for integration and spectral decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig<T> {
    /// Absolute tolerance of the adaptive integrator.
    pub abs_tol: T,
    /// Relative tolerance of the adaptive integrator.
    pub rel_tol: T,
    /// Step-size cap as a fraction of the drive period, so the controller
    /// cannot step over drive oscillations in the near-trivial transient.
    pub max_step_fraction: T,
    /// Initial highest eigenstate index kept by `decompose`; extended
    /// automatically while the tail mass stays above `tail_tol`.
    pub n_max: usize,
    /// Captured-probability requirement for the spectral decomposition.
    pub tail_tol: T,
    /// Accuracy target of the overlap quadrature.
    pub quadrature_tol: T,
    /// Unitarity guard: an evolution fails loudly once the norm residual
    /// exceeds this, rather than renormalizing silently.
    pub norm_tol: T,
}

impl<T: Real> Default for SimConfig<T> {
    fn default() -> Self {
        Self {
            abs_tol: fp(1e-10),
            rel_tol: fp(1e-10),
            max_step_fraction: fp(0.02),
            n_max: 200,
            tail_tol: fp(1e-6),
            quadrature_tol: fp(1e-10),
            // Coherent with the default integrator tolerances out to the
            // deepest run considered (nu = 1000 inside resonance).
            norm_tol: fp(1e-6),
        }
    }
}

impl<T: Real> SimConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            (self.abs_tol, "abs_tol"),
            (self.rel_tol, "rel_tol"),
            (self.tail_tol, "tail_tol"),
            (self.quadrature_tol, "quadrature_tol"),
            (self.norm_tol, "norm_tol"),
        ];
        for (v, name) in pos {
            if !v.is_finite() || v <= T::zero() {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and > 0, got {}",
                    as_f64(v)
                )));
            }
        }
        if !self.max_step_fraction.is_finite()
            || self.max_step_fraction <= T::zero()
            || self.max_step_fraction > T::one()
        {
            return Err(Error::InvalidParams(format!(
                "max_step_fraction must lie in (0, 1], got {}",
                as_f64(self.max_step_fraction)
            )));
        }
        if self.n_max < 2 || self.n_max % 2 != 0 {
            return Err(Error::InvalidParams(format!(
                "n_max must be even and >= 2, got {}",
                self.n_max
            )));
        }
        Ok(())
    }
}
