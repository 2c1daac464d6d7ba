//! Classical parametric oscillator as an independent oracle.
//!
//! The complexified classical equation `u'' + g(tau) u = 0` with
//! `u(0) = 1`, `u'(0) = i` linearizes the quantum width equation through
//! the Riccati substitution `B = -(i/2) u'/u` (substituting back yields
//! `i B' = 2B^2 - g/2`, the width ODE). Consequences used as checks:
//!
//! * `Re B = 1/(2|u|^2) > 0` via the conserved Wronskian `Im(conj(u) u') = 1`;
//! * `<H_0> = (|u|^2 + |u'|^2)/4`, linking quantum energy absorption to
//!   classical solution growth.
//!
//! Floquet analysis of one drive period quantifies the classical
//! parametric-resonance region `|eps_bar| < h/2`.

use num_complex::Complex;

use crate::drive::{DriveParams, SimConfig};
use crate::error::{Error, Result};
use crate::ode::{dopri5, OdeOptions};
use crate::scalar::{fp, Real};

/// Complex solution of `u'' + g(tau) u = 0` at time `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalSolution<T> {
    pub u: Complex<T>,
    pub u_dot: Complex<T>,
    pub tau: T,
}

impl<T: Real> ClassicalSolution<T> {
    /// Conserved Wronskian `Im(conj(u) u_dot)`; 1 for the oracle initial
    /// conditions.
    pub fn wronskian(&self) -> T {
        (self.u.conj() * self.u_dot).im
    }

    /// Quantum width parameter `B = -(i/2) u_dot / u`.
    pub fn width_b(&self) -> Complex<T> {
        let ratio = self.u_dot / self.u;
        Complex::new(ratio.im * fp(0.5), -ratio.re * fp::<T>(0.5))
    }

    /// `(|u|^2 + |u_dot|^2) / 4`, the classical form of `<H_0>`.
    pub fn energy(&self) -> T {
        (self.u.norm_sqr() + self.u_dot.norm_sqr()) * fp(0.25)
    }
}

/// Classical parametric-resonance condition `|eps_bar / h| < 1/2`
/// (strict; the true Mathieu tongue edge shifts by O(h), see
/// [`floquet_growth`] for the measured boundary).
pub fn pr_condition<T: Real>(params: &DriveParams<T>) -> Result<bool> {
    let r = params.ratio().ok_or(Error::UndefinedRatio)?;
    Ok(r.abs() < fp(0.5))
}

fn ode_options<T: Real>(params: &DriveParams<T>, config: &SimConfig<T>) -> OdeOptions<T> {
    OdeOptions {
        abs_tol: config.abs_tol,
        rel_tol: config.rel_tol,
        max_step: config.max_step_fraction * params.drive_period(),
        ..OdeOptions::default()
    }
}

/// Integrate `x'' + g(tau) x = 0` from `(x0, v0)` to the end of the drive
/// window; returns `(x, v)` at `tau_final`.
pub fn classical_evolve<T: Real>(
    params: &DriveParams<T>,
    x0: T,
    v0: T,
    config: &SimConfig<T>,
) -> Result<(T, T)> {
    config.validate()?;
    let opts = ode_options(params, config);
    let y = dopri5(
        |tau, y: &[T; 2]| [y[1], -params.g(tau) * y[0]],
        T::zero(),
        params.tau_final(),
        [x0, v0],
        &opts,
        |_, _| Ok(()),
    )?;
    Ok((y[0], y[1]))
}

/// One snapshot of a classical trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalSample<T> {
    pub tau: T,
    pub x: T,
    pub v: T,
    pub g: T,
}

/// Like [`classical_evolve`] but recording `sample_count` snapshots at
/// uniform times from 0 to `tau_final` inclusive.
pub fn classical_evolve_traced<T: Real>(
    params: &DriveParams<T>,
    x0: T,
    v0: T,
    config: &SimConfig<T>,
    sample_count: usize,
) -> Result<Vec<ClassicalSample<T>>> {
    config.validate()?;
    if sample_count < 2 {
        return Err(Error::InvalidParams(format!(
            "sample_count must be >= 2, got {sample_count}"
        )));
    }
    let opts = ode_options(params, config);
    let tf = params.tau_final();
    let span = fp::<T>((sample_count - 1) as f64);
    let mut samples = Vec::with_capacity(sample_count);
    let mut y = [x0, v0];
    samples.push(ClassicalSample { tau: T::zero(), x: x0, v: v0, g: params.g(T::zero()) });
    for k in 1..sample_count {
        let t0 = tf * fp::<T>((k - 1) as f64) / span;
        let t1 = if k == sample_count - 1 { tf } else { tf * fp::<T>(k as f64) / span };
        y = dopri5(
            |tau, y: &[T; 2]| [y[1], -params.g(tau) * y[0]],
            t0,
            t1,
            y,
            &opts,
            |_, _| Ok(()),
        )?;
        samples.push(ClassicalSample { tau: t1, x: y[0], v: y[1], g: params.g(t1) });
    }
    Ok(samples)
}

/// Complexified classical solution at `tau_final`, starting from the
/// oracle initial conditions `u(0) = 1`, `u'(0) = i`.
pub fn riccati_solution<T: Real>(
    params: &DriveParams<T>,
    config: &SimConfig<T>,
) -> Result<ClassicalSolution<T>> {
    config.validate()?;
    let opts = ode_options(params, config);
    let y = dopri5(
        |tau, y: &[T; 4]| {
            let g = params.g(tau);
            [y[2], y[3], -g * y[0], -g * y[1]]
        },
        T::zero(),
        params.tau_final(),
        [T::one(), T::zero(), T::zero(), T::one()],
        &opts,
        |_, _| Ok(()),
    )?;
    Ok(ClassicalSolution {
        u: Complex::new(y[0], y[1]),
        u_dot: Complex::new(y[2], y[3]),
        tau: params.tau_final(),
    })
}

/// Width parameter `B(tau_final)` predicted by the linear classical
/// route; the independent oracle for `dynamics::evolve`.
pub fn riccati_oracle<T: Real>(params: &DriveParams<T>, config: &SimConfig<T>) -> Result<Complex<T>> {
    Ok(riccati_solution(params, config)?.width_b())
}

/// Spectral radius of the monodromy matrix of `x'' + g x = 0` over one
/// drive period (the periodic extension of the in-window modulation).
/// Growth factor > 1 means classical parametric resonance.
pub fn floquet_growth<T: Real>(params: &DriveParams<T>, config: &SimConfig<T>) -> Result<T> {
    config.validate()?;
    let opts = ode_options(params, config);
    let period = params.drive_period();
    let omega = fp::<T>(2.0) + params.eps_bar();
    let h = params.h();
    // periodic Hill form: the window cutoff of g() must not apply here
    let rhs = move |tau: T, y: &[T; 2]| {
        let g = T::one() + h * (omega * tau).sin();
        [y[1], -g * y[0]]
    };
    let col1 = dopri5(rhs, T::zero(), period, [T::one(), T::zero()], &opts, |_, _| Ok(()))?;
    let col2 = dopri5(rhs, T::zero(), period, [T::zero(), T::one()], &opts, |_, _| Ok(()))?;

    // eigenvalues of [[x1, x2], [v1, v2]]; det = 1 up to integrator error
    let trace = col1[0] + col2[1];
    let det = col1[0] * col2[1] - col2[0] * col1[1];
    let disc = trace * trace - fp::<T>(4.0) * det;
    if disc > T::zero() {
        Ok((trace.abs() + disc.sqrt()) * fp(0.5))
    } else {
        // complex pair on the circle of radius sqrt(det)
        Ok(det.max(T::zero()).sqrt())
    }
}
