//! Time evolution of the Gaussian state through the drive window.
//!
//! Inserting `Psi = A exp(-B xi^2)` into the dimensionless Schroedinger
//! equation couples the real and imaginary parts of `A` and `B`:
//!
//! ```text
//! dA_R/dtau =  A_R B_I + A_I B_R
//! dA_I/dtau = -(A_R B_R - A_I B_I)
//! dB_R/dtau =  4 B_R B_I
//! dB_I/dtau =  g/2 - 2 (B_R^2 - B_I^2)
//! ```
//!
//! With `g = 1` the ground state is a fixed point of the width and `A`
//! rotates at the ground-state energy, `A -> A exp(-i tau / 2)`.
//!
//! [`rhs`] exposes this canonical block (it also backs the fixed-step
//! reference integrations). Production evolution does NOT step it
//! directly: deep inside resonance the width sweeps through poles of
//! size |B| ~ exp(2 s tau) twice per drive period (the squeezed packet
//! periodically collapses to width exp(-s tau)), and past nu ~ 800 at
//! h = 0.03 those spikes are too narrow for any explicit stepper in
//! double precision. The same flow is therefore integrated in pole-free
//! coordinates
//!
//! ```text
//! W    = (B - 1/2) / (B + 1/2)          Cayley map; Re B > 0 <=> |W| < 1
//! zeta = ln(A sqrt(1 - W))              log-amplitude
//! ell  = ln(1 - |W|^2)                  log-distance to the disk edge
//!
//! dW/dtau    = (i/2) [g (1-W)^2 - (1+W)^2]
//! dzeta/dtau = -(i/4) [(1+W) + g (1-W)]
//! dell/dtau  = -(g - 1) Im W
//! ```
//!
//! whose right-hand sides are smooth and bounded over the closed disk
//! (1-W stays in the right half-plane, so the principal square root
//! reconstructs `A` without branch tracking). `ell` duplicates
//! `ln(1-|W|^2)` analytically but is integrated separately: it gives
//! `Re B = exp(ell)/(2 |1-W|^2)` and the norm without catastrophic
//! cancellation at extreme squeezing.
//!
//! Norm drift is never repaired by rescaling: the residual
//! `|sqrt(pi) exp(2 Re zeta - ell/2) - 1|` is a diagnostic of integrator
//! error, and an evolution fails loudly once it exceeds
//! `SimConfig::norm_tol`.

use num_complex::Complex;

use crate::drive::{DriveParams, SimConfig};
use crate::error::{Error, Result};
use crate::ode::{dopri5, OdeOptions};
use crate::scalar::{as_f64, fp, Real};
use crate::spectral::energy_expectation;
use crate::state::{GaussianState, TrajectorySample};

/// Wavepacket width below which the state is numerically unnormalizable.
const B_RE_FLOOR: f64 = 1e-12;

/// Time derivatives `(dA_R, dA_I, dB_R, dB_I)` at drive value `g`.
pub fn rhs<T: Real>(state: &GaussianState<T>, g: T) -> (T, T, T, T) {
    let (ar, ai) = (state.a.re, state.a.im);
    let (br, bi) = (state.b.re, state.b.im);
    (
        ar * bi + ai * br,
        -(ar * br - ai * bi),
        fp::<T>(4.0) * br * bi,
        g * fp(0.5) - fp::<T>(2.0) * (br * br - bi * bi),
    )
}

/// Regularized state vector `[Re W, Im W, Re zeta, Im zeta, ell]`.
type Reg<T> = [T; 5];

#[inline]
fn reg_rhs<T: Real>(g: T, y: &Reg<T>) -> Reg<T> {
    let w = Complex::new(y[0], y[1]);
    let one = Complex::new(T::one(), T::zero());
    let half_i = Complex::new(T::zero(), fp(0.5));
    let quarter_i = Complex::new(T::zero(), fp(0.25));
    let omw = one - w;
    let opw = one + w;
    let dw = half_i * (omw * omw * g - opw * opw);
    let dzeta = -quarter_i * (opw + omw * g);
    let dell = -(g - T::one()) * w.im;
    [dw.re, dw.im, dzeta.re, dzeta.im, dell]
}

fn to_reg<T: Real>(state: &GaussianState<T>) -> Reg<T> {
    let half = Complex::new(fp::<T>(0.5), T::zero());
    let denom = state.b + half;
    let w = (state.b - half) / denom;
    let one_minus_w = Complex::new(T::one(), T::zero()) / denom;
    let zeta = state.a.ln() + one_minus_w.ln() * fp::<T>(0.5);
    // 1 - |W|^2 = 2 Re B / |B + 1/2|^2, free of cancellation
    let ell = (fp::<T>(2.0) * state.b.re).ln() - denom.norm_sqr().ln();
    [w.re, w.im, zeta.re, zeta.im, ell]
}

fn from_reg<T: Real>(y: &Reg<T>, tau: T) -> GaussianState<T> {
    let one_minus_w = Complex::new(T::one() - y[0], -y[1]);
    let denom = one_minus_w.norm_sqr();
    let b = Complex::new(
        y[4].exp() / (fp::<T>(2.0) * denom),
        y[1] / denom,
    );
    let a = Complex::new(y[2], y[3]).exp() / one_minus_w.sqrt();
    GaussianState { a, b, tau }
}

#[inline]
fn reg_norm_residual<T: Real>(y: &Reg<T>) -> T {
    (T::PI().sqrt() * (fp::<T>(2.0) * y[2] - y[4] * fp(0.5)).exp() - T::one()).abs()
}

fn check_start<T: Real>(start: &GaussianState<T>, config: &SimConfig<T>) -> Result<()> {
    config.validate()?;
    GaussianState::new(start.a, start.b, start.tau)?;
    if start.a.norm_sqr() == T::zero() {
        return Err(Error::InvalidParams("zero-amplitude state".into()));
    }
    if start.tau != T::zero() {
        return Err(Error::InvalidParams(format!(
            "evolution starts at tau = 0, got {}",
            as_f64(start.tau)
        )));
    }
    Ok(())
}

fn ode_options<T: Real>(params: &DriveParams<T>, config: &SimConfig<T>) -> OdeOptions<T> {
    OdeOptions {
        abs_tol: config.abs_tol,
        rel_tol: config.rel_tol,
        max_step: config.max_step_fraction * params.drive_period(),
        ..OdeOptions::default()
    }
}

/// Per-step guard: positivity of the width and bounded norm drift.
fn guard<T: Real>(tau: T, y: &Reg<T>, norm_tol: T) -> Result<()> {
    let one_minus_sqr = (T::one() - y[0]) * (T::one() - y[0]) + y[1] * y[1];
    let br = y[4].exp() / (fp::<T>(2.0) * one_minus_sqr);
    if br < fp(B_RE_FLOOR) {
        return Err(Error::IntegrationFailure(format!(
            "width parameter Re B = {} below {B_RE_FLOOR:e} at tau = {}; state numerically unnormalizable",
            as_f64(br),
            as_f64(tau)
        )));
    }
    let residual = reg_norm_residual(y);
    if residual > norm_tol {
        return Err(Error::UnitarityViolation {
            residual: as_f64(residual),
            tol: as_f64(norm_tol),
            tau: as_f64(tau),
        });
    }
    Ok(())
}

/// Evolve `start` through the whole drive window, returning the state at
/// `tau_final`.
pub fn evolve<T: Real>(
    start: &GaussianState<T>,
    params: &DriveParams<T>,
    config: &SimConfig<T>,
) -> Result<GaussianState<T>> {
    check_start(start, config)?;
    let opts = ode_options(params, config);
    let norm_tol = config.norm_tol;
    let y = dopri5(
        |tau, y: &Reg<T>| reg_rhs(params.g(tau), y),
        T::zero(),
        params.tau_final(),
        to_reg(start),
        &opts,
        |tau, y| guard(tau, y, norm_tol),
    )?;
    Ok(from_reg(&y, params.tau_final()))
}

/// Evolve while recording `sample_count` snapshots at uniform times from
/// 0 to `tau_final` inclusive.
///
/// The integrator is forced to land on every sample time, so no
/// interpolation is involved; the final sample agrees with [`evolve`] to
/// integrator tolerance.
pub fn evolve_traced<T: Real>(
    start: &GaussianState<T>,
    params: &DriveParams<T>,
    config: &SimConfig<T>,
    sample_count: usize,
) -> Result<Vec<TrajectorySample<T>>> {
    check_start(start, config)?;
    if sample_count < 2 {
        return Err(Error::InvalidParams(format!(
            "sample_count must be >= 2, got {sample_count}"
        )));
    }
    let opts = ode_options(params, config);
    let norm_tol = config.norm_tol;
    let tf = params.tau_final();
    let span = fp::<T>((sample_count - 1) as f64);

    let mut samples = Vec::with_capacity(sample_count);
    let mut record = |tau: T, y: &Reg<T>| {
        let state = from_reg(y, tau);
        samples.push(TrajectorySample {
            tau,
            state,
            g: params.g(tau),
            norm_residual: reg_norm_residual(y),
            energy: energy_expectation(&state),
        });
    };

    let mut y = to_reg(start);
    record(T::zero(), &y);
    for k in 1..sample_count {
        let t0 = tf * fp::<T>((k - 1) as f64) / span;
        let t1 = if k == sample_count - 1 { tf } else { tf * fp::<T>(k as f64) / span };
        y = dopri5(
            |tau, y: &Reg<T>| reg_rhs(params.g(tau), y),
            t0,
            t1,
            y,
            &opts,
            |tau, y| guard(tau, y, norm_tol),
        )?;
        record(t1, &y);
    }
    Ok(samples)
}
